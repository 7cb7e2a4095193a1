//! Pitchfork, primary Hopf and hysteresis sets at the origin.

use serde::{Deserialize, Serialize};

use super::SetResidual;
use crate::error::{Error, Result};
use crate::normal_form::{NfConstants, UnfoldingPoint};

/// `T_P`: `mu1 + mu2^2 = 0`. The side condition records the small-`mu0` regime.
pub fn pitchfork_residual(mu: &UnfoldingPoint) -> SetResidual {
    let scale = mu.mu1.abs().max(mu.mu2.abs()).max(mu.mu3.abs());
    SetResidual::new("T_P", mu.mu1 + mu.mu2 * mu.mu2).with("mu0_small", mu.mu0.abs() <= scale.powi(4).max(1e-12))
}

/// `T_H`: `mu2 = 0` with `mu1 > 0`.
pub fn primary_hopf_residual(mu: &UnfoldingPoint) -> SetResidual {
    SetResidual::new("T_H", mu.mu2).with("mu1>0", mu.mu1 > 0.0)
}

/// Leading-order size of the cycle born at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimaryCycle {
    pub radius: f64,
    /// `sqrt(|mu1|)`.
    pub angular_frequency: f64,
    /// True when `mu1 > 0`, where the estimate `sqrt(-mu1)` is not real.
    pub mu1_positive: bool,
    /// Stable exactly when `b0 < 0`.
    pub supercritical: bool,
}

pub fn primary_cycle_estimates(mu: &UnfoldingPoint, k: &NfConstants) -> Result<PrimaryCycle> {
    let r2 = -2.0 * mu.mu2 / k.b0;
    if r2 < 0.0 {
        return Err(Error::NoCycle(format!("-2 mu2 / b0 = {r2:.3e} < 0")));
    }
    Ok(PrimaryCycle {
        radius: r2.sqrt(),
        angular_frequency: mu.mu1.abs().sqrt(),
        mu1_positive: mu.mu1 > 0.0,
        supercritical: k.b0 < 0.0,
    })
}

/// The `mu0` value of the hysteresis set at the given `(mu1, mu3)`.
pub fn hysteresis_target(mu: &UnfoldingPoint, k: &NfConstants) -> Result<f64> {
    if mu.mu1 > 0.0 {
        return Err(Error::domain("hysteresis set needs mu1 <= 0"));
    }
    let s = (-mu.mu1).sqrt();
    let den = k.a1 + 2.0 * k.b0 * s;
    if den.abs() < 1e-12 {
        return Err(Error::DegenerateDenominator("hysteresis set"));
    }
    Ok(8.0 * mu.mu3.powi(3) * s.powi(3) / (27.0 * den * den))
}

/// The bifurcation set `mu0 = 0` and the hysteresis set.
pub fn bifurcation_and_hysteresis(
    mu: &UnfoldingPoint,
    k: &NfConstants,
) -> Result<(SetResidual, SetResidual)> {
    let b = SetResidual::new("B", mu.mu0);
    let h = SetResidual::new("H", mu.mu0 - hysteresis_target(mu, k)?).with("mu1<=0", true);
    Ok((b, h))
}
