//! Generalized Hopf (Bautin) data at the Hopf points `E*±` of the normal form.

use serde::{Deserialize, Serialize};

use super::{Branch, Pair, SetResidual};
use crate::error::{Error, Result};
use crate::normal_form::{NfConstants, UnfoldingPoint};

/// Coefficients of `A R^2 + B R + C` with `R = rho^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl AmplitudeCoeffs {
    pub fn discriminant(&self) -> f64 {
        self.b * self.b - 4.0 * self.a * self.c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BautinData {
    pub delta: f64,
    /// `kappa` with `delta` taken with the branch sign (the closed form uses `+`).
    pub kappa: Pair<f64>,
    pub zeta: Pair<f64>,
    /// `y*± = (-3 mu3 ± delta) / (8 b0)`.
    pub y_star: Pair<f64>,
    pub coeffs: Pair<AmplitudeCoeffs>,
}

fn zeta_branch(mu: &UnfoldingPoint, k: &NfConstants, delta: f64, s: f64) -> f64 {
    let UnfoldingPoint { mu0, mu1, mu2, mu3 } = *mu;
    let (a1, b0) = (k.a1, k.b0);
    let m3s = mu3 * mu3;
    mu0 - mu3 * (7.0 * mu2 * mu2 + 12.0 * mu1) / (32.0 * b0)
        + 9.0 * mu2 * mu3 * (3.0 * m3s + 16.0 * a1) / (256.0 * b0 * b0)
        - 27.0 * m3s * mu3 * (m3s + 16.0 * a1) / (2048.0 * b0.powi(3))
        + s * delta
            * (9.0 * m3s * m3s - 56.0 * b0 * mu2 * m3s + 64.0 * b0 * b0 * mu2 * mu2 + 144.0 * a1 * m3s
                - 128.0 * a1 * b0 * mu2
                + 256.0 * b0 * b0 * mu1)
            / (2048.0 * b0.powi(3))
}

fn kappa_branch(mu: &UnfoldingPoint, k: &NfConstants, sdelta: f64) -> f64 {
    let UnfoldingPoint { mu1, mu2, mu3, .. } = *mu;
    let (a1, b0) = (k.a1, k.b0);
    let m3s = mu3 * mu3;
    432.0 * a1 * m3s - 3.0 * mu3 * sdelta * (48.0 * a1 + 16.0 * b0 * mu2 - 3.0 * m3s)
        - 768.0 * a1 * b0 * mu2
        + 512.0 * b0 * b0 * mu1
        + 192.0 * b0 * mu2 * m3s
        - 384.0 * b0 * b0 * mu2 * mu2
        - 27.0 * m3s * m3s
}

/// `delta`, `kappa`, `zeta±` and the amplitude-equation coefficients.
pub fn bautin_data(mu: &UnfoldingPoint, k: &NfConstants) -> Result<BautinData> {
    let d2 = 9.0 * mu.mu3 * mu.mu3 - 32.0 * k.b0 * mu.mu2;
    if d2 < 0.0 {
        return Err(Error::domain("Bautin data needs 9 mu3^2 >= 32 b0 mu2"));
    }
    let delta = d2.sqrt();
    let kappa = Pair::from_fn(|b| kappa_branch(mu, k, b.sign() * delta));
    let zeta = Pair::from_fn(|b| zeta_branch(mu, k, delta, b.sign()));
    let y_star = Pair::from_fn(|b| (-3.0 * mu.mu3 + b.sign() * delta) / (8.0 * k.b0));
    let coeffs = Pair::from_fn(|b| AmplitudeCoeffs {
        a: -64.0 * k.a1 * k.b0,
        b: k.b0 * kappa.get(b) / 2.0,
        c: b.sign() * 256.0 * delta * zeta.get(b),
    });
    Ok(BautinData {
        delta,
        kappa,
        zeta,
        y_star,
        coeffs,
    })
}

/// A positive root `R = rho^2` of the amplitude polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRoot {
    pub r: f64,
    pub rho: f64,
    /// The amplitude flow runs as `-rho (C + B R + A R^2)`: `C > 0` exactly when `E*` is a sink.
    pub stable: bool,
}

/// Positive roots of `A R^2 + B R + C`, ascending.
pub fn amplitude_polynomial_roots(c: &AmplitudeCoeffs) -> Vec<AmplitudeRoot> {
    let mut rs: Vec<f64> = if c.c == 0.0 {
        vec![-c.b / c.a]
    } else {
        let disc = c.discriminant();
        if disc < 0.0 {
            Vec::new()
        } else {
            // stable quadratic formula
            let q = -0.5 * (c.b + c.b.signum() * disc.sqrt());
            if q == 0.0 {
                vec![0.0]
            } else {
                vec![q / c.a, c.c / q]
            }
        }
    };
    rs.retain(|r| *r > 0.0);
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    rs.into_iter()
        .map(|r| AmplitudeRoot {
            r,
            rho: r.sqrt(),
            // d/drho [rho p(rho^2)] = 2 R (B + 2 A R) at a root, then the sign flip
            stable: c.b + 2.0 * c.a * r > 0.0,
        })
        .collect()
}

/// Predicted cycles and the critical sets of one branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BautinBranch {
    pub branch: Branch,
    pub cycles: usize,
    pub roots: Vec<AmplitudeRoot>,
    pub discriminant: f64,
    /// `T_SNL` for this branch: exact discriminant `B^2 - 4 A C`.
    pub snl: SetResidual,
    /// The Hopf sets whose side conditions can hold for the current signs of `a1`, `b0`.
    pub sets: Vec<SetResidual>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BautinClassification {
    pub data: BautinData,
    pub plus: BautinBranch,
    pub minus: BautinBranch,
}

impl BautinClassification {
    pub fn branch(&self, b: Branch) -> &BautinBranch {
        match b {
            Branch::Plus => &self.plus,
            Branch::Minus => &self.minus,
        }
    }
}

fn classify_branch(data: &BautinData, k: &NfConstants, b: Branch) -> BautinBranch {
    let s = b.sign();
    let sfx = b.suffix();
    let coeffs = *data.coeffs.get(b);
    let zeta = *data.zeta.get(b);
    let disc = coeffs.discriminant();
    let roots = amplitude_polynomial_roots(&coeffs);
    let (a1, b0) = (k.a1, k.b0);
    let snl = SetResidual::new(format!("T_SNL{sfx}"), disc)
        .with("±b0*zeta<0", s * b0 * zeta < 0.0)
        .with("a1>0", a1 > 0.0);
    let mut sets = Vec::new();
    if a1 < 0.0 {
        let name = if b0 < 0.0 { "T_H^Sup" } else { "T_H^Sub" };
        sets.push(SetResidual::new(format!("{name}{sfx}"), zeta).with("a1<0", true));
    } else {
        let kind1 = if b0 > 0.0 { "Sup1" } else { "Sub1" };
        sets.push(
            SetResidual::new(format!("T_H^{kind1}{sfx}"), disc)
                .with("±b0*zeta>0", s * b0 * zeta > 0.0)
                .with("a1>0", true),
        );
        let kind2 = if b0 < 0.0 { "Sup2" } else { "Sub2" };
        sets.push(
            SetResidual::new(format!("T_H^{kind2}{sfx}"), zeta)
                .with("B^2-4AC>0", disc > 0.0)
                .with("a1>0", true),
        );
        sets.push(snl.clone());
    }
    BautinBranch {
        branch: b,
        cycles: roots.len(),
        roots,
        discriminant: disc,
        snl,
        sets,
    }
}

/// Evaluates the Bautin sign predicates and the predicted cycle count around `E*±`.
pub fn bautin_classify(mu: &UnfoldingPoint, k: &NfConstants) -> Result<BautinClassification> {
    let data = bautin_data(mu, k)?;
    let plus = classify_branch(&data, k, Branch::Plus);
    let minus = classify_branch(&data, k, Branch::Minus);
    Ok(BautinClassification { data, plus, minus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::{equilibrium_polynomial, routh_coefficients};
    use crate::poly;

    fn k11() -> NfConstants {
        NfConstants::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn data_examples() {
        let mu = UnfoldingPoint::new(0.0, -0.01, -0.02, 0.0);
        let d = bautin_data(&mu, &k11()).unwrap();
        assert!((d.delta - 0.8).abs() < 1e-15);
        assert!((d.kappa.plus - 10.0864).abs() < 1e-12);
        assert_eq!(d.kappa.plus, d.kappa.minus);
        assert!((d.zeta.plus - 1e-5).abs() < 1e-18);
        assert!((d.zeta.minus + 1e-5).abs() < 1e-18);
        assert_eq!(d.coeffs.plus.a, -64.0);
        assert!((d.coeffs.plus.b - 5.0432).abs() < 1e-12);
        assert!((d.coeffs.plus.c - 2.048e-3).abs() < 1e-15);
    }

    #[test]
    fn domain_error() {
        let mu = UnfoldingPoint::new(0.0, -0.01, 0.02, 0.0);
        assert!(bautin_data(&mu, &k11()).unwrap_err().is_domain());
    }

    // second route: zeta± is the equilibrium polynomial at y*±, and kappa is
    // 512 b0^2 times the Jacobian determinant there
    #[test]
    fn zeta_and_kappa_by_second_route() {
        let k = NfConstants::new(0.7, -1.3).unwrap();
        for mu in [
            UnfoldingPoint::new(0.001, -0.02, 0.01, 0.1),
            UnfoldingPoint::new(-0.002, 0.03, 0.004, -0.2),
            UnfoldingPoint::new(0.0, -0.01, 0.02, 0.05),
        ] {
            let d = bautin_data(&mu, &k).unwrap();
            let p = equilibrium_polynomial(&mu, &k);
            for b in Branch::BOTH {
                let y = *d.y_star.get(b);
                let z = poly::eval(&p, y);
                let scale = poly::magnitude(&p, y).max(1e-300);
                assert!((z - d.zeta.get(b)).abs() <= 1e-12 * scale, "{b:?} {z} {}", d.zeta.get(b));
                let (d1, d2) = routh_coefficients(y, &mu, &k);
                assert!(d1.abs() < 1e-15);
                let kap = 512.0 * k.b0 * k.b0 * d2;
                assert!((kap - d.kappa.get(b)).abs() < 1e-12 * (1.0 + kap.abs()));
            }
        }
    }

    #[test]
    fn amplitude_examples() {
        let c = AmplitudeCoeffs { a: -64.0, b: 5.0432, c: 2.048e-3 };
        let r = amplitude_polynomial_roots(&c);
        assert_eq!(r.len(), 1);
        assert!((r[0].r - 0.07921).abs() < 1e-5);
        assert!((r[0].rho - 0.2815).abs() < 1e-4);
        assert!(!r[0].stable);

        let r = amplitude_polynomial_roots(&AmplitudeCoeffs { a: -64.0, b: 5.0, c: 0.0 });
        assert_eq!(r.len(), 1);
        assert!((r[0].r - 5.0 / 64.0).abs() < 1e-15);
        assert!(amplitude_polynomial_roots(&AmplitudeCoeffs { a: 64.0, b: 5.0, c: 0.0 }).is_empty());
        assert!(amplitude_polynomial_roots(&AmplitudeCoeffs { a: 1.0, b: 1.0, c: 1.0 }).is_empty());

        // two positive roots: C/A > 0 and B/A < 0
        let r = amplitude_polynomial_roots(&AmplitudeCoeffs { a: -64.0, b: 5.0, c: -0.05 });
        assert_eq!(r.len(), 2);
        assert!(r[0].stable && !r[1].stable);
    }

    #[test]
    fn classify_example() {
        let mu = UnfoldingPoint::new(0.0, -0.01, -0.02, 0.0);
        let c = bautin_classify(&mu, &k11()).unwrap();
        assert_eq!(c.plus.cycles, 1);
        assert_eq!(c.minus.cycles, 1);
        assert_eq!(c.plus.sets.len(), 3);
    }

    #[test]
    fn negative_a1_gives_no_cycle_when_c_over_a_positive() {
        // a1 < 0 and +b0 zeta+ > 0: C/A > 0 with -B/A < 0
        let k = NfConstants::new(-1.0, 1.0).unwrap();
        let mu = UnfoldingPoint::new(0.001, 0.01, -0.02, 0.0);
        let c = bautin_classify(&mu, &k).unwrap();
        assert!(k.b0 * c.data.zeta.plus > 0.0);
        assert_eq!(c.plus.cycles, 0);
        assert_eq!(c.plus.sets[0].name, "T_H^Sub+");
    }

    #[test]
    fn snl_is_a_double_root() {
        let k = k11();
        let base = UnfoldingPoint::new(0.0, -0.02, -0.06, 0.1);
        let d = bautin_data(&base, &k).unwrap();
        let c = d.coeffs.plus;
        // C at the double root: B^2 = 4 A C
        let c_snl = c.b * c.b / (4.0 * c.a);
        let zeta_snl = c_snl / (256.0 * d.delta);
        let mu0 = base.mu0 + zeta_snl - d.zeta.plus;
        let cl = bautin_classify(&base.with_mu0(mu0), &k).unwrap();
        assert!(cl.plus.discriminant.abs() < 1e-9 * c.b * c.b);
        assert!(cl.plus.snl.sides_hold());
        let inside = bautin_classify(&base.with_mu0(mu0 - 0.5 * zeta_snl), &k).unwrap();
        assert_eq!(inside.plus.cycles, 2);
        let outside = bautin_classify(&base.with_mu0(mu0 + 0.5 * zeta_snl), &k).unwrap();
        assert_eq!(outside.plus.cycles, 0);
    }
}
