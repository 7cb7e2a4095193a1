//! The truncated parametric normal form
//!
//! ```text
//! x' = mu0 + mu1 y + mu2 x + mu3 x y + a1 y^3 + b0 x y^2 [+ b1 x y^4]
//! y' = -x + mu2 y + mu3 y^2 + b0 y^3                [+ b1 y^5]
//! ```
//!
//! together with its Jacobian, Routh data and equilibria. The system is
//! Z2-equivariant under `(x, y) -> (-x, -y)` exactly when `mu0 = mu3 = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// Real parts below this magnitude make an equilibrium non-hyperbolic.
pub const HYPERBOLICITY_TOL: f64 = 1e-9;

/// The four unfolding (controller) coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UnfoldingPoint {
    pub mu0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
}

impl UnfoldingPoint {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(mu0: f64, mu1: f64, mu2: f64, mu3: f64) -> Self {
        Self { mu0, mu1, mu2, mu3 }
    }

    /// Like [`UnfoldingPoint::new`] but rejects NaN and infinities.
    pub fn checked(mu0: f64, mu1: f64, mu2: f64, mu3: f64) -> Result<Self> {
        let p = Self::new(mu0, mu1, mu2, mu3);
        if p.as_array().iter().all(|v| v.is_finite()) {
            Ok(p)
        } else {
            Err(Error::NonFinite("unfolding coefficient"))
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.mu0, self.mu1, self.mu2, self.mu3]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// True when the symmetry-breaking coefficients vanish.
    pub fn is_symmetric(&self) -> bool {
        self.mu0 == 0.0 && self.mu3 == 0.0
    }

    pub fn with_mu0(self, mu0: f64) -> Self {
        Self { mu0, ..self }
    }
    pub fn with_mu1(self, mu1: f64) -> Self {
        Self { mu1, ..self }
    }
    pub fn with_mu2(self, mu2: f64) -> Self {
        Self { mu2, ..self }
    }
    pub fn with_mu3(self, mu3: f64) -> Self {
        Self { mu3, ..self }
    }
}

/// Normal-form constants: cubic `a1`, cross term `b0`, optional quintic `b1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NfConstants {
    pub a1: f64,
    pub b0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<f64>,
}

impl NfConstants {
    /// Cubic truncation. Fails unless `a1` and `b0` are finite and nonzero.
    pub fn new(a1: f64, b0: f64) -> Result<Self> {
        Self::validate(a1, b0)?;
        Ok(Self { a1, b0, b1: None })
    }

    /// Adds the quintic `b1 x y^4`, `b1 y^5` terms.
    pub fn with_b1(self, b1: f64) -> Result<Self> {
        if !b1.is_finite() {
            return Err(Error::NonFinite("b1"));
        }
        Ok(Self { b1: Some(b1), ..self })
    }

    fn validate(a1: f64, b0: f64) -> Result<()> {
        if !a1.is_finite() || !b0.is_finite() {
            return Err(Error::NonFinite("normal-form constant"));
        }
        if a1 == 0.0 {
            return Err(Error::InvalidConstants("a1 must be nonzero".into()));
        }
        if b0 == 0.0 {
            return Err(Error::InvalidConstants("b0 must be nonzero".into()));
        }
        Ok(())
    }

    /// Re-checks the nondegeneracy invariant (for values built by deserialization).
    pub fn validated(self) -> Result<Self> {
        Self::validate(self.a1, self.b0)?;
        if let Some(b1) = self.b1 {
            if !b1.is_finite() {
                return Err(Error::NonFinite("b1"));
            }
        }
        Ok(self)
    }

    fn b1_or_zero(&self) -> f64 {
        self.b1.unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State2 {
    pub x: f64,
    pub y: f64,
}

impl State2 {
    pub const ORIGIN: Self = Self { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: &State2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl std::ops::Neg for State2 {
    type Output = State2;
    fn neg(self) -> State2 {
        State2::new(-self.x, -self.y)
    }
}

/// Linear type of an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquilibriumKind {
    SpiralSink,
    SpiralSource,
    Sink,
    Source,
    Saddle,
    /// Some eigenvalue has |Re| below [`HYPERBOLICITY_TOL`].
    CenterLike,
}

impl EquilibriumKind {
    pub fn is_attracting(&self) -> bool {
        matches!(self, Self::Sink | Self::SpiralSink)
    }

    pub fn is_repelling(&self) -> bool {
        matches!(self, Self::Source | Self::SpiralSource)
    }

    /// Classifies a planar equilibrium from its Jacobian trace and determinant.
    pub fn from_trace_det(trace: f64, det: f64) -> (Self, [Complex64; 2]) {
        let half = 0.5 * trace;
        let disc = half * half - det;
        let eig = if disc >= 0.0 {
            let s = disc.sqrt();
            [Complex64::new(half + s, 0.0), Complex64::new(half - s, 0.0)]
        } else {
            let s = (-disc).sqrt();
            [Complex64::new(half, s), Complex64::new(half, -s)]
        };
        (Self::from_eigenvalues(&eig), eig)
    }

    pub fn from_eigenvalues(eig: &[Complex64]) -> Self {
        if eig.iter().any(|l| l.re.abs() < HYPERBOLICITY_TOL) {
            return Self::CenterLike;
        }
        let complex = eig.iter().any(|l| l.im.abs() > 0.0);
        let pos = eig.iter().filter(|l| l.re > 0.0).count();
        let neg = eig.len() - pos;
        match (pos, neg, complex) {
            (0, _, true) => Self::SpiralSink,
            (0, _, false) => Self::Sink,
            (_, 0, true) => Self::SpiralSource,
            (_, 0, false) => Self::Source,
            _ => Self::Saddle,
        }
    }
}

/// An equilibrium of the normal form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub location: State2,
    #[serde(with = "complex_pair")]
    pub eigenvalues: [Complex64; 2],
    pub kind: EquilibriumKind,
    /// Multiplicity of the corresponding root of the equilibrium polynomial.
    pub multiplicity: u32,
}

pub(crate) mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64; 2], s: S) -> Result<S::Ok, S::Error> {
        [[v[0].re, v[0].im], [v[1].re, v[1].im]].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Complex64; 2], D::Error> {
        let a = <[[f64; 2]; 2]>::deserialize(d)?;
        Ok([Complex64::new(a[0][0], a[0][1]), Complex64::new(a[1][0], a[1][1])])
    }
}

/// Right-hand side of the normal form.
pub fn vector_field(s: State2, mu: &UnfoldingPoint, k: &NfConstants) -> [f64; 2] {
    let (x, y) = (s.x, s.y);
    let y2 = y * y;
    let b1 = k.b1_or_zero();
    let dx = mu.mu0 + mu.mu1 * y + mu.mu2 * x + mu.mu3 * x * y + k.a1 * y2 * y + k.b0 * x * y2
        + b1 * x * y2 * y2;
    let dy = -x + mu.mu2 * y + mu.mu3 * y2 + k.b0 * y2 * y + b1 * y2 * y2 * y;
    [dx, dy]
}

/// Closed-form Jacobian `[[df/dx, df/dy], [dg/dx, dg/dy]]`.
pub fn jacobian(s: State2, mu: &UnfoldingPoint, k: &NfConstants) -> [[f64; 2]; 2] {
    let (x, y) = (s.x, s.y);
    let y2 = y * y;
    let b1 = k.b1_or_zero();
    [
        [
            mu.mu2 + mu.mu3 * y + k.b0 * y2 + b1 * y2 * y2,
            mu.mu1 + mu.mu3 * x + 3.0 * k.a1 * y2 + 2.0 * k.b0 * x * y + 4.0 * b1 * x * y2 * y,
        ],
        [
            -1.0,
            mu.mu2 + 2.0 * mu.mu3 * y + 3.0 * k.b0 * y2 + 5.0 * b1 * y2 * y2,
        ],
    ]
}

pub fn trace_det(j: &[[f64; 2]; 2]) -> (f64, f64) {
    (j[0][0] + j[1][1], j[0][0] * j[1][1] - j[0][1] * j[1][0])
}

/// The displayed Routh quantities `(d1, d2)` at a point of the equilibrium
/// curve `x = mu2 y + mu3 y^2 + b0 y^3`.
///
/// `d1` equals the Jacobian trace there and `d2` its determinant (cubic
/// truncation). Stability decisions elsewhere use trace/det directly.
pub fn routh_coefficients(y0: f64, mu: &UnfoldingPoint, k: &NfConstants) -> (f64, f64) {
    let (m1, m2, m3) = (mu.mu1, mu.mu2, mu.mu3);
    let (a1, b0) = (k.a1, k.b0);
    let y2 = y0 * y0;
    let d1 = 4.0 * b0 * y2 + 3.0 * m3 * y0 + 2.0 * m2;
    let d2 = 5.0 * b0 * b0 * y2 * y2
        + 8.0 * b0 * m3 * y2 * y0
        + 3.0 * (m3 * m3 + 2.0 * b0 * m2 + a1) * y2
        + 4.0 * m2 * m3 * y0
        + m2 * m2
        + m1;
    (d1, d2)
}

/// The x-coordinate of the equilibrium curve `y' = 0` at height `y`.
pub fn nullcline_x(y: f64, mu: &UnfoldingPoint, k: &NfConstants) -> f64 {
    let y2 = y * y;
    mu.mu2 * y + mu.mu3 * y2 + k.b0 * y2 * y + k.b1_or_zero() * y2 * y2 * y
}

/// Ascending coefficients of the scalar equilibrium equation in `y`.
///
/// Substituting `x` from `y' = 0` into `x' = 0` gives
/// `mu0 + mu1 y + a1 y^3 + y q(y)^2 = 0` with
/// `q(y) = mu2 + mu3 y + b0 y^2 [+ b1 y^4]`; for the cubic truncation this is
/// the quintic `mu0 + (mu1+mu2^2) y + 2 mu2 mu3 y^2 + (2 b0 mu2 + mu3^2 + a1) y^3
/// + 2 b0 mu3 y^4 + b0^2 y^5`.
pub fn equilibrium_polynomial(mu: &UnfoldingPoint, k: &NfConstants) -> Vec<f64> {
    let mut q = vec![mu.mu2, mu.mu3, k.b0];
    if let Some(b1) = k.b1 {
        q.extend([0.0, b1]);
    }
    // y * q^2
    let mut p = vec![0.0; 2 * q.len()];
    for (i, &qi) in q.iter().enumerate() {
        for (j, &qj) in q.iter().enumerate() {
            p[i + j + 1] += qi * qj;
        }
    }
    p[0] += mu.mu0;
    p[1] += mu.mu1;
    p[3] += k.a1;
    p
}

fn classify_at(location: State2, mu: &UnfoldingPoint, k: &NfConstants, multiplicity: u32) -> Equilibrium {
    let j = jacobian(location, mu, k);
    let (tr, det) = trace_det(&j);
    let (kind, eigenvalues) = EquilibriumKind::from_trace_det(tr, det);
    Equilibrium {
        location,
        eigenvalues,
        kind,
        multiplicity,
    }
}

/// Classifies an arbitrary point as an equilibrium (no root check).
pub fn equilibrium_at(location: State2, mu: &UnfoldingPoint, k: &NfConstants) -> Equilibrium {
    classify_at(location, mu, k, 1)
}

/// All real equilibria, sorted by `y`.
pub fn equilibria(mu: &UnfoldingPoint, k: &NfConstants) -> Result<Vec<Equilibrium>> {
    let coeffs = equilibrium_polynomial(mu, k);
    let roots = poly::real_roots(&coeffs)?;
    let origin_degenerate = mu.mu0.abs() < 1e-13 && (mu.mu1 + mu.mu2 * mu.mu2).abs() < 1e-13;
    Ok(roots
        .into_iter()
        .map(|r| {
            let y = r.value;
            let mut m = r.multiplicity;
            if y == 0.0 && origin_degenerate {
                m = m.max(3);
            }
            classify_at(State2::new(nullcline_x(y, mu, k), y), mu, k, m)
        })
        .collect())
}

/// Closed-form estimate of the two secondary equilibria `(E+, E-)` from the
/// cubic truncation of the equilibrium equation with `mu0` dropped.
pub fn secondary_equilibria(mu: &UnfoldingPoint, k: &NfConstants) -> Result<(State2, State2)> {
    let (m1, m2, m3) = (mu.mu1, mu.mu2, mu.mu3);
    let (a1, b0) = (k.a1, k.b0);
    let radicand = -a1 * m1 - a1 * m2 * m2 - 2.0 * b0 * m1 * m2 - 2.0 * b0 * m2 * m2 * m2 - m1 * m3 * m3;
    let denom = a1 + 2.0 * b0 * m2 + m3 * m3;
    if denom.abs() < 1e-12 {
        return Err(Error::DegenerateDenominator("secondary equilibria"));
    }
    if radicand < 0.0 {
        return Err(Error::NotBifurcated { radicand });
    }
    let s = radicand.sqrt();
    let point = |y: f64| {
        let y2 = y * y;
        State2::new(m2 * y + m3 * y2 + b0 * y2 * y, y)
    };
    Ok((point((-m2 * m3 + s) / denom), point((-m2 * m3 - s) / denom)))
}
