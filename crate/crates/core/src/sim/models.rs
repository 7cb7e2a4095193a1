//! Vector fields with known equilibria.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrator::VectorField;
use super::section::Section;
use crate::error::Result;
use crate::normal_form::{self, EquilibriumKind, NfConstants, State2, UnfoldingPoint};

/// An equilibrium in any dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub location: Vec<f64>,
    /// `(re, im)` pairs.
    pub eigenvalues: Vec<[f64; 2]>,
    pub kind: EquilibriumKind,
}

impl FixedPoint {
    pub fn new(location: Vec<f64>, eigenvalues: &[Complex64], kind: EquilibriumKind) -> Self {
        Self {
            location,
            eigenvalues: eigenvalues.iter().map(|l| [l.re, l.im]).collect(),
            kind,
        }
    }

    pub fn is_focus(&self) -> bool {
        self.eigenvalues.iter().any(|e| e[1] != 0.0)
    }
}

impl From<&normal_form::Equilibrium> for FixedPoint {
    fn from(e: &normal_form::Equilibrium) -> Self {
        FixedPoint::new(vec![e.location.x, e.location.y], &e.eigenvalues, e.kind)
    }
}

/// A field whose equilibria can be listed and around which sections can be placed.
pub trait Model<const N: usize>: VectorField<N> + Sync {
    fn fixed_points(&self) -> Result<Vec<FixedPoint>>;

    /// Section used for cycle scans around `center`.
    fn section_at(&self, center: [f64; N]) -> Section<N> {
        let e0: [f64; N] = std::array::from_fn(|i| if i == 0 { 1.0 } else { 0.0 });
        let e1: [f64; N] = std::array::from_fn(|i| if i == 1 { 1.0 } else { 0.0 });
        Section::oriented(self, center, e0, e1)
    }
}

/// The planar normal form at fixed coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalFormField {
    pub mu: UnfoldingPoint,
    pub k: NfConstants,
}

impl NormalFormField {
    pub fn new(mu: UnfoldingPoint, k: NfConstants) -> Self {
        Self { mu, k }
    }
}

impl VectorField<2> for NormalFormField {
    fn eval(&self, s: &[f64; 2]) -> [f64; 2] {
        normal_form::vector_field(State2 { x: s[0], y: s[1] }, &self.mu, &self.k)
    }
}

impl Model<2> for NormalFormField {
    fn fixed_points(&self) -> Result<Vec<FixedPoint>> {
        Ok(normal_form::equilibria(&self.mu, &self.k)?.iter().map(FixedPoint::from).collect())
    }
}
