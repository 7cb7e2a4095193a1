//! Single-input feedback on the cubic planar plant
//! `x' = c1 x^3 + c2 y^3 + c3 x y^2 + c4 y x^2 + u1`,
//! `y' = -x + c5 x^3 + c6 y^3 + c7 x y^2 + c8 y x^2 + u2`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal_form::{EquilibriumKind, NfConstants, State2, UnfoldingPoint};
use crate::poly::real_roots;
use crate::sets::{residual_or_undefined, Branch, SetResidual};
use crate::sim::{FixedPoint, Model, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicPlant {
    pub c: [f64; 8],
}

impl CubicPlant {
    pub const ALL_ONES: CubicPlant = CubicPlant { c: [1.0; 8] };
    /// Sign pattern of the linearly uncontrollable example.
    pub const ALTERNATING: CubicPlant = CubicPlant {
        c: [-1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0],
    };
    pub const PRESETS: [&'static str; 2] = ["all-ones", "alternating"];

    pub fn new(c: [f64; 8]) -> Result<Self> {
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("plant coefficient"));
        }
        Ok(Self { c })
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "all-ones" => Ok(Self::ALL_ONES),
            "alternating" => Ok(Self::ALTERNATING),
            _ => Err(Error::Config(format!(
                "unknown plant preset {name:?} (expected one of {:?})",
                Self::PRESETS
            ))),
        }
    }

    fn ci(&self, i: usize) -> f64 {
        self.c[i - 1]
    }

    /// `a1 = c2`, `b0 = (c3 + 3 c6) / 4`.
    pub fn normal_form_constants(&self) -> Result<NfConstants> {
        NfConstants::new(self.ci(2), (self.ci(3) + 3.0 * self.ci(6)) / 4.0)
    }

    fn denominators(&self) -> Result<(f64, f64)> {
        let c2 = self.ci(2);
        let s = self.ci(3) + 3.0 * self.ci(6);
        if c2 == 0.0 {
            return Err(Error::DegenerateDenominator("c2"));
        }
        if s == 0.0 {
            return Err(Error::DegenerateDenominator("c3 + 3 c6"));
        }
        Ok((c2, s))
    }
}

/// `u1 = v0 + v1 x + v2 y + v3 x y`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllableGains {
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

impl ControllableGains {
    pub fn new(v0: f64, v1: f64, v2: f64, v3: f64) -> Self {
        Self { v0, v1, v2, v3 }
    }

    fn is_zero(&self) -> bool {
        [self.v0, self.v1, self.v2, self.v3].iter().all(|v| *v == 0.0)
    }

    fn check(&self) -> Result<()> {
        if [self.v0, self.v1, self.v2, self.v3].iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("controller gain"))
        }
    }
}

/// `u2 = n0 + n1 y + n2 y^2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UncontrollableGains {
    pub n0: f64,
    pub n1: f64,
    pub n2: f64,
}

impl UncontrollableGains {
    pub fn new(n0: f64, n1: f64, n2: f64) -> Self {
        Self { n0, n1, n2 }
    }

    fn check(&self) -> Result<()> {
        if [self.n0, self.n1, self.n2].iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("controller gain"))
        }
    }
}

/// Leading-order unfolding coefficients for `u2 = 0`.
pub fn map_controllable(g: &ControllableGains, p: &CubicPlant) -> Result<UnfoldingPoint> {
    g.check()?;
    let (c2, s) = p.denominators()?;
    let [c1, _, c3, c4, _, c6, c7, c8] = p.c;
    let k0 = (288.0 * c2 * c2 * c8 + 864.0 * c1 * c2 * c2 + 77.0 * c3 * c3 * c6 + 231.0 * c3 * c6 * c6
        - 288.0 * c2 * c4 * c6
        - 96.0 * c2 * c3 * c4
        - 288.0 * c2 * c6 * c7
        - 96.0 * c2 * c3 * c7
        - 11.0 * c3.powi(3)
        - 297.0 * c6.powi(3))
        / (96.0 * c2 * c2 * s);
    let k1 = (10.0 * c3 * c6 + 48.0 * c2 * c7 + 23.0 * c3 * c3 - 33.0 * c6 * c6) / (32.0 * c2 * s);
    let k3 = (1442.0 * c1 * c2 * c2 + 212.0 * c3 * c6 * c6 + 72.0 * c3 * c3 * c6 + 482.0 * c2 * c2 * c8
        - 482.0 * c2 * c6 * c7
        - 162.0 * c2 * c3 * c7
        - 482.0 * c2 * c4 * c6
        - 162.0 * c2 * c3 * c4
        - 272.0 * c6.powi(3)
        - c3.powi(3))
        / (144.0 * c2 * c2);
    Ok(UnfoldingPoint::new(
        g.v0 + k0 * g.v0 * g.v2 + k1 * g.v0 * g.v1,
        g.v2,
        g.v1 / 2.0,
        k3 * g.v0 + g.v3 / 3.0,
    ))
}

pub fn controllable_heteroclinic(g: &ControllableGains, p: &CubicPlant) -> Result<SetResidual> {
    let (c2, s) = p.denominators()?;
    let [c1, _, _, c4, _, _, c7, c8] = p.c;
    let v = g.v1 / 2.0 - s / (10.0 * c2) * g.v2
        + (120.0 * c7 + 120.0 * c4 - 90.0 * c8 - 270.0 * c1) / 720.0 * g.v1 * g.v2
        + s * (9.0 * c1 + 3.0 * c8 - 4.0 * c4 - 4.0 * c7) / (60.0 * c2) * g.v2 * g.v2;
    Ok(SetResidual::new("T_HtC", v))
}

pub fn controllable_homoclinic(g: &ControllableGains, p: &CubicPlant) -> Result<SetResidual> {
    let (c2, s) = p.denominators()?;
    let [c1, _, c3, c4, _, c6, c7, c8] = p.c;
    let (v1, v2) = (g.v1, g.v2);
    let a1 = (77.0 * c3 * c3 + 213.0 * c6 * c6 + 80.0 * c2 * c7 + 222.0 * c3 * c6) / (320.0 * c2 * s);
    let a2 = (c3.powi(3) - 7.0 * c6 * c3 * c3 - 21.0 * c6 * c6 * c3 + 8.0 * c3 * c2 * c4 + 8.0 * c3 * c2 * c7)
        / (30.0 * c2.powi(3));
    let a3 = (135.0 * c6.powi(3) + 360.0 * c1 * c2 * c2 + 120.0 * c2 * c2 * c8
        - 120.0 * c2 * c4 * c6
        - 408.0 * c2 * c6 * c7)
        / (240.0 * c2 * c2 * s);
    let a4 = (27.0 * c6.powi(3) - 72.0 * c1 * c2 * c2 - 24.0 * c2 * c2 * c8 + 24.0 * c2 * c6 * c4 + 24.0 * c2 * c6 * c7)
        / (30.0 * c2.powi(3));
    let a5 = (87.0 * c3 * c6 * c6 - 59.0 * c3.powi(3) - 163.0 * c6 * c3 * c3 - 40.0 * c2 * c3 * c4 - 136.0 * c2 * c3 * c7)
        / (240.0 * c2 * c2 * s);
    let v = v1 / 2.0 + a1 * v1 * v1 + a2 * v2 * v2 + a3 * v1 * v2 - 2.0 * v2 / (5.0 * c2) * s
        + a4 * v2 * v2
        + a5 * v1 * v2;
    Ok(SetResidual::new("T_HmC", v))
}

/// Homoclinic loops through the origin around the secondary equilibria; needs `v2 < 0`.
pub fn controllable_homoclinic_pm(g: &ControllableGains, p: &CubicPlant, b: Branch) -> Result<SetResidual> {
    let (c2, s) = p.denominators()?;
    if g.v2 >= 0.0 {
        return Err(Error::domain("controllable homoclinic loops need v2 < 0"));
    }
    let [_, _, c3, _, _, c6, c7, _] = p.c;
    let r = (-g.v2).sqrt();
    let sg = b.sign();
    let k = 3.0 * SQRT_2 * PI / 32.0 + SQRT_2 * PI * (21.0 * c6 + 13.0 * c3) / (480.0 * c2) * g.v1;
    let q = (450.0 * c3 * c6 + 891.0 * c6 * c6 - 189.0 * c3 * c3 - 360.0 * c2 * c7) * SQRT_2 * PI / (7680.0 * c2 * c2);
    let v = g.v1 / 2.0 - 2.0 * g.v2 / (5.0 * c2) * s - sg * k * g.v3 * r - sg * q * g.v3 * g.v2 * r;
    Ok(SetResidual::new(format!("T_HmC{}", b.suffix()), v).with("v2<0", true))
}

/// `T_H`, `T_P`, `T_HtC`, `T_HmC`, `T_HmC+`, `T_HmC-`; undefined entries outside their domains.
pub fn controllable_sets(g: &ControllableGains, p: &CubicPlant) -> Result<Vec<SetResidual>> {
    g.check()?;
    p.denominators()?;
    let mut v = vec![
        SetResidual::new("T_H", g.v1),
        SetResidual::new("T_P", g.v2),
        controllable_heteroclinic(g, p)?,
        controllable_homoclinic(g, p)?,
    ];
    for b in Branch::BOTH {
        let name = format!("T_HmC{}", b.suffix());
        v.push(residual_or_undefined(&name, controllable_homoclinic_pm(g, p, b)));
    }
    Ok(v)
}

/// Leading-order unfolding coefficients for `u1 = 0`.
pub fn map_uncontrollable(g: &UncontrollableGains, p: &CubicPlant) -> Result<UnfoldingPoint> {
    g.check()?;
    let (c2, s) = p.denominators()?;
    let [c1, _, c3, c4, _, c6, c7, c8] = p.c;
    let mu1 = (32.0
        * s
        * (c3.powi(3) + 3.0 * c6 * c3 * c3 - 6.0 * c2 * c3 * c4 - 6.0 * c2 * c3 * c7 + 27.0 * c1 * c2 * c2 + 9.0 * c2 * c2 * c8)
        * g.n0
        * g.n0
        + 9.0 * c2 * (64.0 * c2 * c4 + 80.0 * c2 * c7 - 23.0 * c3 * c3 - 58.0 * c3 * c6 + 81.0 * c6 * c6) * g.n1 * g.n1)
        / (576.0 * c2 * c2 * s)
        + (288.0 * c2 * g.n1 - 192.0 * c3 * g.n0 * g.n2) / (576.0 * c2);
    let mu2 = (3.0 * c2 * c4 - c3 * c3) / (3.0 * c2) * g.n0 * g.n0;
    let mu3 = 2.0 * (3.0 * c2 * c4 + 3.0 * c7 * c2 - c3 * c3 - 3.0 * c3 * c6) / (9.0 * c2) * g.n0 + 2.0 / 3.0 * g.n2;
    Ok(UnfoldingPoint::new(0.0, mu1, mu2, mu3))
}

fn fold_disc(g: &UncontrollableGains, b: Branch) -> f64 {
    (1.0 + b.sign() * g.n1).powi(2) - 4.0 * g.n0 * g.n2
}

pub fn uncontrollable_saddle_node(g: &UncontrollableGains, b: Branch) -> SetResidual {
    SetResidual::new(format!("T_SN{}", b.suffix()), -fold_disc(g, b))
}

pub fn uncontrollable_hopf(g: &UncontrollableGains, b: Branch) -> Result<SetResidual> {
    let rad = 1.0 + 4.0 * g.n0 * g.n2;
    if rad < 0.0 {
        return Err(Error::domain("uncontrollable Hopf sets need 1 + 4 n0 n2 >= 0"));
    }
    let sg = b.sign();
    Ok(SetResidual::new(format!("T_H{}", b.suffix()), g.n1 - (sg - sg * rad.sqrt())))
}

pub fn uncontrollable_homoclinic(g: &UncontrollableGains, b: Branch) -> Result<SetResidual> {
    let w = 48.0 * g.n0 * g.n0 + 9.0 * g.n1 * g.n1;
    if w <= 0.0 {
        return Err(Error::domain("uncontrollable homoclinic sets need 48 n0^2 + 9 n1^2 > 0"));
    }
    let (n0, n1, n2) = (g.n0, g.n1, g.n2);
    let tail = SQRT_2 * PI * (16.0 * n0 * n0 + 3.0 * n1 * n1) * (4.0 * n0 - 3.0 * n2) / (32.0 * w.sqrt());
    let v = 0.5 * n1 + 16.0 / 45.0 * n0 * n0 + 37.0 / 80.0 * n1 * n1 - n0 * n2 / 3.0 - b.sign() * tail;
    Ok(SetResidual::new(format!("T_HmC{}", b.suffix()), v))
}

/// `T_SN±`, `T_H±`, `T_HmC±` for the alternating plant.
pub fn uncontrollable_sets(g: &UncontrollableGains) -> Result<Vec<SetResidual>> {
    g.check()?;
    let mut v: Vec<SetResidual> = Branch::BOTH.iter().map(|b| uncontrollable_saddle_node(g, *b)).collect();
    for b in Branch::BOTH {
        v.push(residual_or_undefined(&format!("T_H{}", b.suffix()), uncontrollable_hopf(g, b)));
    }
    for b in Branch::BOTH {
        v.push(residual_or_undefined(&format!("T_HmC{}", b.suffix()), uncontrollable_homoclinic(g, b)));
    }
    Ok(v)
}

/// Real equilibria of the alternating plant under `u2`, ordered `(1+, 1-, 2+, 2-)`.
///
/// Family 1 lies on `y = -x`, family 2 on `y = x`.
pub fn uncontrollable_equilibria(g: &UncontrollableGains) -> Result<Vec<State2>> {
    g.check()?;
    if g.n2 == 0.0 {
        return Err(Error::DegenerateDenominator("n2"));
    }
    let mut out = Vec::with_capacity(4);
    for (fam, b) in [(1.0, Branch::Plus), (-1.0, Branch::Minus)] {
        let d = fold_disc(g, b);
        if d < 0.0 {
            continue;
        }
        for s in [1.0, -1.0] {
            let x = (1.0 + fam * g.n1 + s * d.sqrt()) / (2.0 * g.n2);
            out.push(State2::new(x, -fam * x));
        }
    }
    Ok(out)
}

/// Number of real equilibria predicted by the fold sets.
pub fn uncontrollable_equilibrium_count(g: &UncontrollableGains) -> usize {
    Branch::BOTH.iter().map(|b| if fold_disc(g, *b) >= 0.0 { 2 } else { 0 }).sum()
}

/// The closed-loop cubic plant with both inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicSystem {
    pub plant: CubicPlant,
    #[serde(default)]
    pub u1: ControllableGains,
    #[serde(default)]
    pub u2: UncontrollableGains,
    /// Half-width of the seed box for Newton equilibrium search when `u1 != 0`.
    #[serde(default = "default_box")]
    pub search_box: f64,
}

fn default_box() -> f64 {
    2.0
}

impl CubicSystem {
    pub fn controllable(plant: CubicPlant, u1: ControllableGains) -> Self {
        Self {
            plant,
            u1,
            u2: UncontrollableGains::default(),
            search_box: default_box(),
        }
    }

    pub fn uncontrollable(plant: CubicPlant, u2: UncontrollableGains) -> Self {
        Self {
            plant,
            u1: ControllableGains::default(),
            u2,
            search_box: default_box(),
        }
    }

    pub fn jacobian(&self, s: &[f64; 2]) -> [[f64; 2]; 2] {
        let [c1, c2, c3, c4, c5, c6, c7, c8] = self.plant.c;
        let (x, y) = (s[0], s[1]);
        let (u, w) = (&self.u1, &self.u2);
        [
            [
                3.0 * c1 * x * x + c3 * y * y + 2.0 * c4 * x * y + u.v1 + u.v3 * y,
                3.0 * c2 * y * y + 2.0 * c3 * x * y + c4 * x * x + u.v2 + u.v3 * x,
            ],
            [
                -1.0 + 3.0 * c5 * x * x + c7 * y * y + 2.0 * c8 * x * y,
                3.0 * c6 * y * y + 2.0 * c7 * x * y + c8 * x * x + w.n1 + 2.0 * w.n2 * y,
            ],
        ]
    }

    fn fixed_point(&self, s: [f64; 2]) -> FixedPoint {
        let j = self.jacobian(&s);
        let (kind, eig) = EquilibriumKind::from_trace_det(j[0][0] + j[1][1], j[0][0] * j[1][1] - j[0][1] * j[1][0]);
        FixedPoint::new(s.to_vec(), &eig, kind)
    }

    /// With `u1 = 0`, `x' = 0` is a union of lines through the origin and each
    /// line reduces `y' = 0` to a cubic.
    fn line_equilibria(&self) -> Result<Vec<[f64; 2]>> {
        let [c1, c2, c3, c4, c5, c6, c7, c8] = self.plant.c;
        let w = &self.u2;
        let mut pts = Vec::new();
        let mut on_line = |coeffs: [f64; 4], dir: [f64; 2]| -> Result<()> {
            if coeffs.iter().all(|c| *c == 0.0) {
                return Err(Error::domain("a whole line of equilibria"));
            }
            for r in real_roots(&coeffs)? {
                pts.push([r.value * dir[0], r.value * dir[1]]);
            }
            Ok(())
        };
        if c2 == 0.0 {
            on_line([w.n0, w.n1, w.n2, c6], [0.0, 1.0])?;
        }
        let slopes = if [c1, c4, c3, c2].iter().all(|c| *c == 0.0) {
            return Err(Error::domain("x' vanishes identically"));
        } else {
            real_roots(&[c1, c4, c3, c2])?
        };
        for m in slopes {
            let m = m.value;
            on_line(
                [w.n0, -1.0 + w.n1 * m, w.n2 * m * m, c5 + c8 * m + c7 * m * m + c6 * m.powi(3)],
                [1.0, m],
            )?;
        }
        Ok(pts)
    }

    fn newton(&self, mut s: [f64; 2]) -> Option<[f64; 2]> {
        for _ in 0..80 {
            let f = self.eval(&s);
            let j = self.jacobian(&s);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            let dx = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
            let dy = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
            s = [s[0] - dx, s[1] - dy];
            if s[0].abs() > 1e3 || s[1].abs() > 1e3 {
                return None;
            }
            if dx.abs().max(dy.abs()) <= 1e-15 * (1.0 + s[0].abs().max(s[1].abs())) {
                break;
            }
        }
        let f = self.eval(&s);
        (f[0].abs().max(f[1].abs()) < 1e-11).then_some(s)
    }

    fn newton_equilibria(&self) -> Vec<[f64; 2]> {
        let n = 25;
        let r = self.search_box;
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let seed = [-r + 2.0 * r * i as f64 / (n - 1) as f64, -r + 2.0 * r * j as f64 / (n - 1) as f64];
                if let Some(p) = self.newton(seed) {
                    pts.push(p);
                }
            }
        }
        pts
    }
}

fn dedup(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[1].total_cmp(&b[1]).then(a[0].total_cmp(&b[0])));
    let mut out: Vec<[f64; 2]> = Vec::new();
    for p in pts {
        if !out.iter().any(|q| (p[0] - q[0]).hypot(p[1] - q[1]) <= 1e-8 * (1.0 + p[0].hypot(p[1]))) {
            out.push(p);
        }
    }
    out
}

impl VectorField<2> for CubicSystem {
    fn eval(&self, s: &[f64; 2]) -> [f64; 2] {
        let [c1, c2, c3, c4, c5, c6, c7, c8] = self.plant.c;
        let (x, y) = (s[0], s[1]);
        let (u, w) = (&self.u1, &self.u2);
        let u1 = u.v0 + u.v1 * x + u.v2 * y + u.v3 * x * y;
        let u2 = w.n0 + w.n1 * y + w.n2 * y * y;
        [
            c1 * x * x * x + c2 * y * y * y + c3 * x * y * y + c4 * y * x * x + u1,
            -x + c5 * x * x * x + c6 * y * y * y + c7 * x * y * y + c8 * y * x * x + u2,
        ]
    }
}

impl Model<2> for CubicSystem {
    fn fixed_points(&self) -> Result<Vec<FixedPoint>> {
        self.u1.check()?;
        self.u2.check()?;
        let pts = if self.u1.is_zero() {
            self.line_equilibria()?
        } else {
            self.newton_equilibria()
        };
        Ok(dedup(pts).into_iter().map(|p| self.fixed_point(p)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{heteroclinic_residual, homoclinic_gamma_residual, primary_homoclinic_residual};

    #[test]
    fn presets() {
        assert_eq!(CubicPlant::preset("all-ones").unwrap(), CubicPlant::ALL_ONES);
        assert!(matches!(CubicPlant::preset("nope"), Err(Error::Config(_))));
        let k = CubicPlant::ALL_ONES.normal_form_constants().unwrap();
        assert_eq!((k.a1, k.b0), (1.0, 1.0));
        let k = CubicPlant::ALTERNATING.normal_form_constants().unwrap();
        assert_eq!((k.a1, k.b0), (1.0, 1.0));
    }

    #[test]
    fn controllable_map_examples() {
        let p = CubicPlant::ALL_ONES;
        let z = map_controllable(&ControllableGains::default(), &p).unwrap();
        assert_eq!(z, UnfoldingPoint::ZERO);
        let mu = map_controllable(&ControllableGains::new(0.0, 0.01, 0.02, 0.3), &p).unwrap();
        assert_eq!(mu.mu0, 0.0);
        assert!((mu.mu1 - 0.02).abs() < 1e-15);
        assert!((mu.mu2 - 0.005).abs() < 1e-15);
        assert!((mu.mu3 - 0.1).abs() < 1e-15);
        let mut bad = p;
        bad.c[2] = -3.0;
        assert_eq!(
            map_controllable(&ControllableGains::default(), &bad),
            Err(Error::DegenerateDenominator("c3 + 3 c6"))
        );
    }

    #[test]
    fn controllable_set_examples() {
        let p = CubicPlant::ALL_ONES;
        let sets = controllable_sets(&ControllableGains::new(0.0, 0.0, 0.01, 0.3), &p).unwrap();
        assert!(sets[0].on_set(1e-15));
        assert!(!sets[4].defined && !sets[5].defined);
        for r in controllable_sets(&ControllableGains::default(), &p).unwrap().iter().take(4) {
            assert_eq!(r.value, 0.0);
        }
        // leading balance of the heteroclinic set: v1 = 0.8 v2
        let v2 = 1e-6;
        let r = controllable_heteroclinic(&ControllableGains::new(0.0, 0.8 * v2, v2, 0.0), &p).unwrap();
        assert!(r.value.abs() < 1e-11);
        assert!(controllable_homoclinic_pm(&ControllableGains::new(0.0, 0.0, 0.01, 0.3), &p, Branch::Plus)
            .unwrap_err()
            .is_domain());
    }

    fn gain_norm(g: &ControllableGains) -> f64 {
        (g.v1 * g.v1 + g.v2 * g.v2 + g.v3 * g.v3).sqrt()
    }

    #[test]
    fn gain_sets_agree_with_normal_form_sets() {
        let p = CubicPlant::ALL_ONES;
        let k = p.normal_form_constants().unwrap();
        let mut hp = CubicPlant::ALL_ONES;
        hp.c[1] = -1.0;
        let hk = hp.normal_form_constants().unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..200 {
            let t = i as f64 * 0.7;
            let r = 1e-2 * ((i % 10) as f64 + 1.0) / 10.0;
            let g = ControllableGains::new(0.0, r * t.cos() * 0.6, -r * (t * 1.3).sin().abs() * 0.6 - 1e-9, r * 0.5 * (t * 0.4).cos());
            let mu = map_controllable(&g, &p).unwrap();
            let n2 = gain_norm(&g).powi(2);
            let d = controllable_homoclinic(&g, &p).unwrap().value - primary_homoclinic_residual(&mu, &k).value;
            worst = worst.max(d.abs() / n2);
            for b in Branch::BOTH {
                let d = controllable_homoclinic_pm(&g, &p, b).unwrap().value
                    - homoclinic_gamma_residual(&mu, &k, b).unwrap().value;
                worst = worst.max(d.abs() / n2);
            }
            let g2 = ControllableGains { v2: -g.v2, ..g };
            let mu2 = map_controllable(&g2, &hp).unwrap();
            let d = controllable_heteroclinic(&g2, &hp).unwrap().value
                - heteroclinic_residual(&mu2.with_mu3(0.0), &hk).unwrap().value;
            worst = worst.max(d.abs() / n2);
        }
        assert!(worst <= 10.0, "slack constant {worst}");
    }

    #[test]
    fn uncontrollable_map_examples() {
        let p = CubicPlant::ALTERNATING;
        let z = map_uncontrollable(&UncontrollableGains::default(), &p).unwrap();
        assert_eq!(z, UnfoldingPoint::ZERO);
        let mu = map_uncontrollable(&UncontrollableGains::new(0.1, 0.1, 0.0), &p).unwrap();
        assert!((mu.mu2 + 4.0 / 300.0).abs() < 1e-15);
        assert_eq!(mu.mu0, 0.0);
        let mu = map_uncontrollable(&UncontrollableGains::new(0.0, 0.0, 0.3), &p).unwrap();
        assert_eq!(mu.mu2, 0.0);
        assert!((mu.mu3 - 0.2).abs() < 1e-15);
    }

    #[test]
    fn uncontrollable_set_examples() {
        let g = UncontrollableGains::new(-0.7, 0.1, -0.7);
        assert_eq!(uncontrollable_equilibrium_count(&g), 0);
        assert!(uncontrollable_equilibria(&g).unwrap().is_empty());
        let sets = uncontrollable_sets(&g).unwrap();
        assert!(sets[0].value > 0.0 && sets[1].value > 0.0);
        assert!(sets.iter().all(|r| r.defined));
        let sets = uncontrollable_sets(&UncontrollableGains::new(0.7, 0.1, -0.7)).unwrap();
        assert!(!sets[2].defined && !sets[3].defined);

        let g = UncontrollableGains::new(-0.4, 0.1, -0.6);
        assert_eq!(uncontrollable_equilibrium_count(&g), 2);
        assert_eq!(uncontrollable_equilibria(&g).unwrap().len(), 2);

        let g = UncontrollableGains::new(0.0, 0.0, -0.3);
        for b in Branch::BOTH {
            assert!(uncontrollable_hopf(&g, b).unwrap().on_set(1e-15));
        }
        assert!(uncontrollable_homoclinic(&UncontrollableGains::new(0.0, 0.0, 1.0), Branch::Plus)
            .unwrap_err()
            .is_domain());
        assert_eq!(
            uncontrollable_equilibria(&UncontrollableGains::new(0.1, 0.1, 0.0)),
            Err(Error::DegenerateDenominator("n2"))
        );
    }

    #[test]
    fn four_equilibria_and_symmetric_families() {
        let g = UncontrollableGains::new(0.1, 0.1, -0.2);
        assert_eq!(uncontrollable_equilibria(&g).unwrap().len(), 4);
        let g = UncontrollableGains::new(0.1, 0.0, -0.2);
        let e = uncontrollable_equilibria(&g).unwrap();
        for i in 0..2 {
            assert!((e[i].x - e[i + 2].x).abs() < 1e-15);
            assert!((e[i].y + e[i + 2].y).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_equilibria_match_the_field() {
        let g = UncontrollableGains::new(0.1, 0.1, -0.2);
        let sys = CubicSystem::uncontrollable(CubicPlant::ALTERNATING, g);
        let fps = sys.fixed_points().unwrap();
        let e = uncontrollable_equilibria(&g).unwrap();
        assert_eq!(fps.len(), e.len());
        for s in e {
            let v = sys.eval(&[s.x, s.y]);
            assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12);
            assert!(fps.iter().any(|p| (p.location[0] - s.x).abs() < 1e-9 && (p.location[1] - s.y).abs() < 1e-9));
        }
    }

    #[test]
    fn newton_equilibria_for_controllable_gains() {
        let g = ControllableGains::new(0.0, -0.01, -0.02, 0.3);
        let sys = CubicSystem::controllable(CubicPlant::ALL_ONES, g);
        let fps = sys.fixed_points().unwrap();
        assert!(fps.iter().any(|p| p.location[0].abs() < 1e-14 && p.location[1].abs() < 1e-14));
        for p in &fps {
            let v = sys.eval(&[p.location[0], p.location[1]]);
            assert!(v[0].abs() < 1e-11 && v[1].abs() < 1e-11);
        }
    }

    #[test]
    fn analytic_jacobian() {
        let sys = CubicSystem {
            plant: CubicPlant::new([0.3, -1.2, 0.7, 0.4, -0.9, 1.1, 0.2, -0.5]).unwrap(),
            u1: ControllableGains::new(0.01, -0.02, 0.03, 0.3),
            u2: UncontrollableGains::new(0.02, 0.1, -0.4),
            search_box: 2.0,
        };
        let s = [0.3, -0.2];
        let j = sys.jacobian(&s);
        let n = crate::sim::section::numeric_jacobian(&sys, &s);
        for r in 0..2 {
            for c in 0..2 {
                assert!((j[r][c] - n[r][c]).abs() < 1e-8);
            }
        }
    }
}
