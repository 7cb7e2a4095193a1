//! Critical controller sets of the normal form as residual functions.
//!
//! Every set is returned as a [`SetResidual`]: the residual value, whether it
//! is defined at the point, and the named side conditions the set carries.
//! Sets that come in a `±` pair are always returned as a [`Pair`].

mod bautin;
pub mod constants;
mod global;
mod orbits;
mod primary;
mod secondary;

use serde::{Deserialize, Serialize};

pub use bautin::{
    amplitude_polynomial_roots, bautin_classify, bautin_data, AmplitudeCoeffs, AmplitudeRoot,
    BautinBranch, BautinClassification, BautinData,
};
pub use global::{
    heteroclinic_residual, homoclinic_gamma_residual, homoclinic_gamma_target,
    lambda_homoclinic_residual, lambda_homoclinic_target, primary_homoclinic_residual,
    saddle_connection_residual,
};
pub use orbits::{orbit_estimate, OrbitEstimate, OrbitKind};
pub use primary::{
    bifurcation_and_hysteresis, hysteresis_target, pitchfork_residual, primary_cycle_estimates,
    primary_hopf_residual, PrimaryCycle,
};
pub use secondary::{
    eta, saddle_node_xi, secondary_hopf_residual, solve_secondary_hopf_mu2, tertiary_criticality,
    tertiary_cycle_estimates,
    Criticality, TertiaryCycle,
};

/// Default absolute tolerance for set membership.
pub const DEFAULT_SET_TOL: f64 = 1e-9;

/// Which member of a `±` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

/// The two members of a `±` family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pair<T> {
    pub plus: T,
    pub minus: T,
}

impl<T> Pair<T> {
    pub fn from_fn(mut f: impl FnMut(Branch) -> T) -> Self {
        Pair {
            plus: f(Branch::Plus),
            minus: f(Branch::Minus),
        }
    }

    pub fn get(&self, b: Branch) -> &T {
        match b {
            Branch::Plus => &self.plus,
            Branch::Minus => &self.minus,
        }
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> Pair<U> {
        Pair {
            plus: f(self.plus),
            minus: f(self.minus),
        }
    }
}

/// A named boolean predicate attached to a set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideCondition {
    pub name: String,
    pub holds: bool,
}

impl SideCondition {
    pub fn new(name: impl Into<String>, holds: bool) -> Self {
        Self {
            name: name.into(),
            holds,
        }
    }
}

/// Residual of a set-defining function at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetResidual {
    pub name: String,
    pub value: f64,
    pub defined: bool,
    pub side_conditions: Vec<SideCondition>,
}

impl SetResidual {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        let defined = value.is_finite();
        Self {
            name: name.into(),
            value,
            defined,
            side_conditions: Vec::new(),
        }
    }

    /// An undefined residual; `reason` is recorded as a failed side condition.
    pub fn undefined(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            defined: false,
            side_conditions: vec![SideCondition::new(reason, false)],
        }
    }

    pub fn with(mut self, name: impl Into<String>, holds: bool) -> Self {
        self.side_conditions.push(SideCondition::new(name, holds));
        self
    }

    pub fn sides_hold(&self) -> bool {
        self.side_conditions.iter().all(|c| c.holds)
    }

    /// Membership: defined, residual below `tol`, and every side condition true.
    pub fn on_set(&self, tol: f64) -> bool {
        self.defined && self.value.abs() < tol && self.sides_hold()
    }

    /// Sign of the residual, or `None` when undefined.
    pub fn sign(&self) -> Option<i8> {
        if !self.defined {
            None
        } else if self.value > 0.0 {
            Some(1)
        } else if self.value < 0.0 {
            Some(-1)
        } else {
            Some(0)
        }
    }
}

/// Converts a fallible residual into a residual that records the failure.
pub fn residual_or_undefined(name: &str, r: crate::Result<SetResidual>) -> SetResidual {
    match r {
        Ok(r) => r,
        Err(e) => SetResidual::undefined(name, e.to_string()),
    }
}

fn pair_or_undefined(stem: &str, r: crate::Result<Pair<SetResidual>>) -> [SetResidual; 2] {
    match r {
        Ok(p) => [p.plus, p.minus],
        Err(e) => Branch::BOTH.map(|b| SetResidual::undefined(format!("{stem}{}", b.suffix()), e.to_string())),
    }
}

/// Every local and global set of the normal form at one point, in a fixed order:
/// `T_P`, `T_H`, `T_SN±`, `T_H±`, `T_HmC`, `T_SC`, `T_HtC`, `T_HmC_Gamma±`, `T_HmC_Lambda`.
pub fn normal_form_sets(mu: &crate::normal_form::UnfoldingPoint, k: &crate::normal_form::NfConstants) -> Vec<SetResidual> {
    let mut v = vec![primary::pitchfork_residual(mu), primary::primary_hopf_residual(mu)];
    v.extend(pair_or_undefined("T_SN", secondary::saddle_node_xi(mu, k)));
    v.extend(pair_or_undefined("T_H", secondary::secondary_hopf_residual(mu, k)));
    v.push(global::primary_homoclinic_residual(mu, k));
    v.push(global::saddle_connection_residual(mu, k));
    v.push(residual_or_undefined("T_HtC", global::heteroclinic_residual(mu, k)));
    for b in Branch::BOTH {
        let name = format!("T_HmC_Gamma{}", b.suffix());
        v.push(residual_or_undefined(&name, global::homoclinic_gamma_residual(mu, k, b)));
    }
    v.push(residual_or_undefined("T_HmC_Lambda", global::lambda_homoclinic_residual(mu, k)));
    v
}
