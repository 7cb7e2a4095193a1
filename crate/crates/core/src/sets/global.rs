//! Homoclinic, saddle-connection and heteroclinic sets.

use super::constants::{GAMMA_HMC, LAMBDA_B0, LAMBDA_MU2, LAMBDA_MU3, TEN_POW_TWO_THIRDS};
use super::{Branch, SetResidual};
use crate::error::{Error, Result};
use crate::normal_form::{NfConstants, UnfoldingPoint};

/// The `mu2` value of the Gamma± homoclinic set at the given `(mu0, mu1, mu3)`.
pub fn homoclinic_gamma_target(mu: &UnfoldingPoint, k: &NfConstants, branch: Branch) -> Result<f64> {
    if mu.mu1 >= 0.0 {
        return Err(Error::domain("Gamma homoclinic sets need mu1 < 0"));
    }
    let s = (-mu.mu1).sqrt();
    let sg = branch.sign();
    Ok(8.0 * k.b0 / (5.0 * k.a1) * mu.mu1 + sg * GAMMA_HMC * mu.mu3 * s - sg * GAMMA_HMC * mu.mu0 / s)
}

pub fn homoclinic_gamma_residual(mu: &UnfoldingPoint, k: &NfConstants, branch: Branch) -> Result<SetResidual> {
    let t = homoclinic_gamma_target(mu, k, branch)?;
    Ok(SetResidual::new(format!("T_HmC_Gamma{}", branch.suffix()), mu.mu2 - t)
        .with("a1>0", k.a1 > 0.0)
        .with("mu1<0", true))
}

fn symmetric_homoclinic_value(mu: &UnfoldingPoint, k: &NfConstants) -> f64 {
    mu.mu2 - 8.0 * k.b0 / (5.0 * k.a1) * mu.mu1
}

/// `T_HmC` for the cycle around the origin: `mu2 = (8 b0 / 5 a1) mu1`.
pub fn primary_homoclinic_residual(mu: &UnfoldingPoint, k: &NfConstants) -> SetResidual {
    SetResidual::new("T_HmC", symmetric_homoclinic_value(mu, k)).with("mu1<=0", mu.mu1 <= 0.0)
}

/// `T_SC`: same leading term, read as a saddle connection for `mu1 < 0`.
pub fn saddle_connection_residual(mu: &UnfoldingPoint, k: &NfConstants) -> SetResidual {
    SetResidual::new("T_SC", symmetric_homoclinic_value(mu, k)).with("mu1<0", mu.mu1 < 0.0)
}

/// `T_HtC` (heteroclinic cycle between `E±`), for `a1 < 0` and `mu1 > 0`.
pub fn heteroclinic_residual(mu: &UnfoldingPoint, k: &NfConstants) -> Result<SetResidual> {
    if k.a1 >= 0.0 {
        return Err(Error::domain("heteroclinic set needs a1 < 0"));
    }
    if mu.mu1 <= 0.0 {
        return Err(Error::domain("heteroclinic set needs mu1 > 0"));
    }
    let s = mu.mu1.sqrt();
    let rhs = 2.0 * k.b0 / (5.0 * k.a1) * mu.mu1 + 9.0 / 16.0 * mu.mu3 * s - 9.0 / 16.0 * mu.mu0 / s;
    Ok(SetResidual::new("T_HtC", mu.mu2 - rhs).with("a1<0", true).with("mu1>0", true))
}

/// The `mu1` value of the Lambda± homoclinic set. The branch is `sign(mu0)`.
pub fn lambda_homoclinic_target(mu: &UnfoldingPoint, k: &NfConstants) -> Result<(Branch, f64)> {
    if k.a1 >= 0.0 {
        return Err(Error::domain("Lambda homoclinic sets need a1 < 0"));
    }
    if mu.mu0 == 0.0 {
        return Err(Error::domain("Lambda homoclinic sets need mu0 != 0"));
    }
    let c = -k.a1;
    let m = mu.mu0.abs();
    let branch = if mu.mu0 > 0.0 { Branch::Plus } else { Branch::Minus };
    // mu0 -> -mu0, mu3 -> -mu3 maps one branch to the other
    let rhs = TEN_POW_TWO_THIRDS * c.powf(-2.5) * m.powf(2.0 / 3.0) - LAMBDA_B0 * c.powf(-2.5) * k.b0 * m
        - LAMBDA_MU2 * TEN_POW_TWO_THIRDS * c.powf(-11.0 / 6.0) * mu.mu2 * m.cbrt()
        + LAMBDA_MU3 * TEN_POW_TWO_THIRDS * c.powi(-3) * branch.sign() * mu.mu3 * m.powf(2.0 / 3.0);
    Ok((branch, rhs))
}

pub fn lambda_homoclinic_residual(mu: &UnfoldingPoint, k: &NfConstants) -> Result<SetResidual> {
    let (branch, rhs) = lambda_homoclinic_target(mu, k)?;
    Ok(SetResidual::new(format!("T_HmC_Lambda{}", branch.suffix()), mu.mu1 - rhs).with("a1<0", true))
}
