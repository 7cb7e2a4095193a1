//! Saddle-node and Hopf sets of the secondary equilibria `E±`.

use serde::{Deserialize, Serialize};

use super::{Branch, Pair, SetResidual};
use crate::error::{Error, Result};
use crate::normal_form::{NfConstants, UnfoldingPoint};

/// `T_SN±`: the two saddle-node residuals `xi±`.
pub fn saddle_node_xi(mu: &UnfoldingPoint, k: &NfConstants) -> Result<Pair<SetResidual>> {
    let UnfoldingPoint { mu0, mu1, mu2, mu3 } = *mu;
    let (a1, b0) = (k.a1, k.b0);
    let (m2s, m3s) = (mu2 * mu2, mu3 * mu3);
    let d = a1 + m3s + 2.0 * b0 * mu2;
    if d.abs() < 1e-12 {
        return Err(Error::DegenerateDenominator("saddle-node sets"));
    }
    let radicand = m2s * m3s - 6.0 * b0 * m2s * mu2 - 3.0 * m3s * mu1 - 3.0 * a1 * m2s
        - 6.0 * b0 * mu1 * mu2
        - 3.0 * a1 * mu1;
    if radicand < 0.0 {
        return Err(Error::ComplexBranch { radicand });
    }
    let p = 6.0 * b0 * mu1 * mu2 + 3.0 * a1 * mu1 + 3.0 * m3s * mu1 + 3.0 * a1 * m2s - m2s * m3s
        + 6.0 * b0 * m2s * mu2;
    let q = m2s * mu2 * m3s * mu3
        + 18.0 * b0 * m2s * m2s * mu3
        + 9.0 * mu1 * mu2 * m3s * mu3
        + 18.0 * b0 * mu1 * m2s * mu3
        + 9.0 * a1 * mu1 * mu2 * mu3
        + 9.0 * a1 * m2s * mu2 * mu3;
    let den = 27.0 * d * d;
    let root = radicand.sqrt();
    Ok(Pair::from_fn(|b| {
        let s = b.sign();
        let xi = mu0 - (-s * 2.0 * p * root) / den + 2.0 * q / den;
        SetResidual::new(format!("T_SN{}", b.suffix()), xi).with("radicand>=0", true)
    }))
}

fn check_secondary_domain(mu: &UnfoldingPoint, k: &NfConstants) -> Result<f64> {
    if k.a1 <= 0.0 {
        return Err(Error::domain("secondary Hopf sets need a1 > 0"));
    }
    let w = -mu.mu1 - mu.mu2 * mu.mu2;
    if w < 0.0 {
        return Err(Error::domain("secondary Hopf sets need mu1 + mu2^2 <= 0"));
    }
    Ok(w)
}

/// `T_H±`: Hopf sets of the secondary equilibria.
pub fn secondary_hopf_residual(mu: &UnfoldingPoint, k: &NfConstants) -> Result<Pair<SetResidual>> {
    let w = check_secondary_domain(mu, k)?;
    let UnfoldingPoint { mu1, mu2, mu3, .. } = *mu;
    let (a1, b0) = (k.a1, k.b0);
    let sa = a1.sqrt();
    let m3s = mu3 * mu3;
    let common = 2.0 * a1.powi(3) * sa * mu2 - 3.0 * a1 * a1 * sa * mu2 * m3s
        - 4.0 * b0 * a1 * sa * (a1 - 2.0 * b0 * mu2 - m3s) * (mu1 + mu2 * mu2);
    let odd = a1 * a1 * (6.0 * a1 - 22.0 * b0 * mu2 - 3.0 * m3s) * mu3 * w.sqrt() / 2.0;
    Ok(Pair::from_fn(|b| {
        SetResidual::new(format!("T_H{}", b.suffix()), common + b.sign() * odd)
            .with("a1>0", true)
            .with("mu1+mu2^2<=0", true)
    }))
}

/// `eta±`, whose sign decides the criticality of the Hopf bifurcation at `E±`.
pub fn eta(mu: &UnfoldingPoint, k: &NfConstants) -> Result<Pair<f64>> {
    let w = check_secondary_domain(mu, k)?;
    if w == 0.0 {
        return Err(Error::domain("eta needs -mu1 - mu2^2 > 0"));
    }
    let s = w.sqrt();
    let base = mu.mu2 / s + 2.0 * k.b0 * s / k.a1;
    let odd = 1.5 * mu.mu3 / k.a1.sqrt();
    Ok(Pair::from_fn(|b| base + b.sign() * odd))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criticality {
    Supercritical,
    Subcritical,
    /// `b0 eta <= 0`: no cycle bifurcates in this estimate.
    None,
}

/// Per-branch criticality of the tertiary Hopf bifurcations at `E±`.
pub fn tertiary_criticality(mu: &UnfoldingPoint, k: &NfConstants) -> Result<Pair<Criticality>> {
    let e = eta(mu, k)?;
    Ok(e.map(|v| {
        if k.b0 * v <= 0.0 {
            Criticality::None
        } else if v > 0.0 {
            Criticality::Supercritical
        } else {
            Criticality::Subcritical
        }
    }))
}

/// Leading-order size of the tertiary cycles around `E±`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TertiaryCycle {
    pub radius: f64,
    /// Read as `sqrt(2 (-mu1 - mu2^2))`.
    pub angular_velocity: f64,
}

pub fn tertiary_cycle_estimates(mu: &UnfoldingPoint, k: &NfConstants) -> Result<TertiaryCycle> {
    let (a1, b0) = (k.a1, k.b0);
    let w = -mu.mu1 - mu.mu2 * mu.mu2;
    let inner = 7.0 * a1 / b0 * mu.mu2 + 46.0 * w;
    if inner < -1e-14 || w < 0.0 {
        return Err(Error::domain("tertiary cycle estimate has a negative radicand"));
    }
    let radius = 8.0 * 2f64.sqrt() * inner.max(0.0).sqrt() / (7.0 * a1 * b0.signum()) - 64.0 * w.sqrt() / (7.0 * a1);
    Ok(TertiaryCycle {
        radius,
        angular_velocity: (2.0 * w).sqrt(),
    })
}

/// Bisection for a zero of one `T_H±` branch in `mu2`, holding the rest of `mu` fixed.
pub fn solve_secondary_hopf_mu2(
    mu: &UnfoldingPoint,
    k: &NfConstants,
    branch: Branch,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let f = |m2: f64| -> Result<f64> {
        Ok(secondary_hopf_residual(&mu.with_mu2(m2), k)?.get(branch).value)
    };
    crate::roots::bisect(f, lo, hi, 1e-15)
}
