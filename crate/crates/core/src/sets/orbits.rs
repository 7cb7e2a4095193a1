//! Leading-order parametrizations of the homoclinic and heteroclinic loops.

use serde::{Deserialize, Serialize};

use super::constants::{LAMBDA_P0, LAMBDA_Q0, LAMBDA_SHIFT, LAMBDA_X_AMP};
use crate::error::{Error, Result};
use crate::normal_form::{NfConstants, State2, UnfoldingPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitKind {
    HomoclinicGammaPlus,
    HomoclinicGammaMinus,
    Heteroclinic,
    HomoclinicLambdaPlus,
    HomoclinicLambdaMinus,
}

/// A loop `phi -> (x, y)` for `phi` in `[0, pi]`.
///
/// Lambda± loops are given in the rescaled coordinates of the
/// `mu0`-dominated regime, where the saddle sits at a root of `y^3 - y -+ 0.1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitEstimate {
    pub kind: OrbitKind,
    pub mu: UnfoldingPoint,
    pub constants: NfConstants,
}

impl OrbitEstimate {
    pub fn point(&self, phi: f64) -> State2 {
        let (s, c) = phi.sin_cos();
        let c2 = (2.0 * phi).cos();
        let s2 = (2.0 * phi).sin();
        let (a1, mu1) = (self.constants.a1, self.mu.mu1);
        match self.kind {
            OrbitKind::HomoclinicGammaPlus | OrbitKind::HomoclinicGammaMinus => {
                let sg = if self.kind == OrbitKind::HomoclinicGammaPlus { 1.0 } else { -1.0 };
                State2 {
                    x: -s * s * c * (3.0 - c2).sqrt() / a1.sqrt() * mu1,
                    y: sg * std::f64::consts::FRAC_1_SQRT_2 * (-mu1).sqrt() * (c2 - 1.0),
                }
            }
            OrbitKind::Heteroclinic => State2 {
                x: mu1 * std::f64::consts::FRAC_1_SQRT_2 * s2 * (a1 * c2 * c2 + 2.0 + a1).max(0.0).sqrt(),
                y: mu1.sqrt() / (-a1).sqrt() * c2,
            },
            OrbitKind::HomoclinicLambdaPlus | OrbitKind::HomoclinicLambdaMinus => {
                let sg = if self.kind == OrbitKind::HomoclinicLambdaPlus { 1.0 } else { -1.0 };
                State2 {
                    x: -sg * LAMBDA_X_AMP * std::f64::consts::SQRT_2 * s * s2 * (c2 + LAMBDA_SHIFT).sqrt(),
                    y: -sg * (LAMBDA_P0 * c2 + LAMBDA_Q0),
                }
            }
        }
    }

    /// `n + 1` points at equally spaced `phi` from 0 to `pi`.
    pub fn sample(&self, n: usize) -> Vec<State2> {
        let n = n.max(1);
        (0..=n)
            .map(|i| self.point(std::f64::consts::PI * i as f64 / n as f64))
            .collect()
    }
}

pub fn orbit_estimate(kind: OrbitKind, mu: &UnfoldingPoint, k: &NfConstants) -> Result<OrbitEstimate> {
    match kind {
        OrbitKind::HomoclinicGammaPlus | OrbitKind::HomoclinicGammaMinus => {
            if k.a1 <= 0.0 || mu.mu1 >= 0.0 {
                return Err(Error::domain("Gamma loops need a1 > 0 and mu1 < 0"));
            }
        }
        OrbitKind::Heteroclinic => {
            if k.a1 >= 0.0 || mu.mu1 <= 0.0 {
                return Err(Error::domain("heteroclinic loop needs a1 < 0 and mu1 > 0"));
            }
            // a1 cos^2 + 2 + a1 >= 0 along the whole loop only for a1 >= -1
            if k.a1 < -1.0 {
                return Err(Error::domain("heteroclinic loop estimate is real only for -1 <= a1 < 0"));
            }
        }
        OrbitKind::HomoclinicLambdaPlus | OrbitKind::HomoclinicLambdaMinus => {
            if k.a1 >= 0.0 {
                return Err(Error::domain("Lambda loops need a1 < 0"));
            }
        }
    }
    Ok(OrbitEstimate {
        kind,
        mu: *mu,
        constants: *k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::secondary_equilibria;
    use std::f64::consts::PI;

    #[test]
    fn gamma_points() {
        let k = NfConstants::new(1.0, 1.0).unwrap();
        let mu = UnfoldingPoint::new(0.0, -0.1, 0.0, 0.0);
        let o = orbit_estimate(OrbitKind::HomoclinicGammaPlus, &mu, &k).unwrap();
        assert_eq!(o.point(0.0), State2 { x: 0.0, y: 0.0 });
        assert!(o.point(PI).norm() < 1e-15);
        let p = o.point(PI / 2.0);
        assert!((p.y + 0.4472).abs() < 1e-4);
        let m = orbit_estimate(OrbitKind::HomoclinicGammaMinus, &mu, &k).unwrap();
        assert!((m.point(PI / 2.0).y - 0.4472).abs() < 1e-4);
        assert!(orbit_estimate(OrbitKind::HomoclinicGammaPlus, &mu.with_mu1(0.1), &k).is_err());
    }

    #[test]
    fn heteroclinic_endpoints_are_the_saddles() {
        let k = NfConstants::new(-1.0, 1.0).unwrap();
        let mu = UnfoldingPoint::new(0.0, 0.01, 0.0, 0.0);
        let o = orbit_estimate(OrbitKind::Heteroclinic, &mu, &k).unwrap();
        let p0 = o.point(0.0);
        assert!((p0.x).abs() < 1e-15 && (p0.y - 0.1).abs() < 1e-15);
        let (ep, em) = secondary_equilibria(&mu, &k).unwrap();
        let tol = 0.1 * mu.mu1.sqrt();
        let ends = [o.point(0.0), o.point(PI / 2.0)];
        for e in [ep, em] {
            assert!(ends.iter().any(|p| p.dist(&e) < tol));
        }
        assert!(orbit_estimate(OrbitKind::Heteroclinic, &mu, &NfConstants::new(-2.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn lambda_loop_closes_at_scaled_saddle() {
        let k = NfConstants::new(-1.0, 1.0).unwrap();
        let o = orbit_estimate(OrbitKind::HomoclinicLambdaPlus, &UnfoldingPoint::new(0.001, 0.0, 0.0, 0.0), &k).unwrap();
        let a = o.point(0.0);
        let b = o.point(PI);
        assert!(a.dist(&b) < 1e-12);
        // scaled saddle: negative outer root of y^3 - y - 0.1
        let ys = a.y;
        assert!((ys.powi(3) - ys - 0.1).abs() < 1e-9);
        assert!(a.x.abs() < 1e-15);
        let m = orbit_estimate(OrbitKind::HomoclinicLambdaMinus, &UnfoldingPoint::new(-0.001, 0.0, 0.0, 0.0), &k)
            .unwrap();
        assert!((m.point(0.7).y + o.point(0.7).y).abs() < 1e-15);
    }
}
