//! The feedback-controlled Chua circuit
//! `x' = alpha (y - a x^3 - c x)`, `y' = x - y + z`, `z' = -beta y + u`,
//! `u = nu0 + nu1 x + nu2 y + nu3 x y`.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal_form::{EquilibriumKind, NfConstants, UnfoldingPoint};
use crate::poly::real_roots;
use crate::sets::{
    homoclinic_gamma_residual, pitchfork_residual, primary_homoclinic_residual, primary_hopf_residual,
    residual_or_undefined, secondary_hopf_residual, Branch, SetResidual,
};
use crate::sim::{
    classify_portrait, EquilibriumScan, FixedPoint, IntegratorConfig, Model, PortraitOptions, PortraitSummary, Section,
    Target, VectorField,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChuaParams {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub c: f64,
    #[serde(default)]
    pub nu0: f64,
    #[serde(default)]
    pub nu1: f64,
    #[serde(default)]
    pub nu2: f64,
    #[serde(default)]
    pub nu3: f64,
}

impl ChuaParams {
    /// The Bogdanov-Takens configuration `beta = alpha`, `c = 0` with the given gains.
    pub fn bt(alpha: f64, a: f64, gains: [f64; 4]) -> Self {
        Self {
            alpha,
            beta: alpha,
            a,
            c: 0.0,
            nu0: gains[0],
            nu1: gains[1],
            nu2: gains[2],
            nu3: gains[3],
        }
    }

    pub fn gains(&self) -> [f64; 4] {
        [self.nu0, self.nu1, self.nu2, self.nu3]
    }

    pub fn with_gains(self, g: [f64; 4]) -> Self {
        Self::bt(self.alpha, self.a, g).with_circuit(self.beta, self.c)
    }

    fn with_circuit(mut self, beta: f64, c: f64) -> Self {
        self.beta = beta;
        self.c = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.a, self.c, self.nu0, self.nu1, self.nu2, self.nu3];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Chua parameter"));
        }
        if self.alpha == 0.0 {
            return Err(Error::InvalidConstants("alpha must be nonzero".into()));
        }
        Ok(())
    }
}

pub type State3 = [f64; 3];

pub fn chua_field(s: &State3, p: &ChuaParams) -> State3 {
    let [x, y, z] = *s;
    let u = p.nu0 + p.nu1 * x + p.nu2 * y + p.nu3 * x * y;
    [p.alpha * (y - p.a * x * x * x - p.c * x), x - y + z, -p.beta * y + u]
}

pub fn chua_jacobian(s: &State3, p: &ChuaParams) -> [[f64; 3]; 3] {
    let [x, y, _] = *s;
    [
        [p.alpha * (-3.0 * p.a * x * x - p.c), p.alpha, 0.0],
        [1.0, -1.0, 1.0],
        [p.nu1 + p.nu3 * y, -p.beta + p.nu2 + p.nu3 * x, 0.0],
    ]
}

fn eigenvalues(j: &[[f64; 3]; 3]) -> Vec<Complex64> {
    let m = Matrix3::from_fn(|r, c| j[r][c]);
    let mut e: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    e.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    e
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BtCheck {
    pub holds: bool,
    /// Eigenvalues of the uncontrolled linearization at the origin, `(re, im)`.
    pub eigenvalues: Vec<[f64; 2]>,
}

pub fn bt_condition(p: &ChuaParams) -> BtCheck {
    let j = chua_jacobian(&[0.0; 3], &p.with_gains([0.0; 4]));
    let holds = p.c.abs() <= 1e-12 && (p.beta - p.alpha).abs() <= 1e-12;
    BtCheck {
        holds,
        eigenvalues: eigenvalues(&j).iter().map(|l| [l.re, l.im]).collect(),
    }
}

/// Unfolding coefficients and normal-form constants from the circuit and gains.
pub fn chua_to_unfolding(p: &ChuaParams) -> Result<(UnfoldingPoint, NfConstants)> {
    p.validate()?;
    let (al, a) = (p.alpha, p.a);
    let (n0, n1, n2, n3) = (p.nu0, p.nu1, p.nu2, p.nu3);
    let a1 = a * al.powi(4);
    let b0 = 0.75 * a * (al - 1.0) * al.powi(3);
    if a1 == 0.0 || b0 == 0.0 {
        return Err(Error::InvalidConstants(format!("a1 = {a1}, b0 = {b0}")));
    }
    let k = NfConstants::new(a1, b0)?;
    let mu0 = 9.0 / 8.0 * al * n1 * n0 - 3.0 / 32.0 * n1 * n0 - 33.0 / (32.0 * al) * n1 * n0 - 37.0 / 32.0 * n2 * n0
        - 11.0 / (32.0 * al) * n2 * n0
        - n0;
    let mu1 = -5.0 * al * al * n1 * n1 / 16.0 - 3.0 * n1 * n1 / 4.0 - 3.0 * al * n1 * n1 / 16.0 - 3.0 * al * n1 * n2 / 16.0
        - 5.0 * n1 * n2 / 16.0
        - n2 * n2 / 4.0
        - 1047.0 / 5120.0 * a * al.powi(4) * n0 * n0
        + 2583.0 / 1280.0 * a * al.powi(3) * n0 * n0
        - 1047.0 / 5120.0 * a * n0 * n0
        - 1857.0 / 512.0 * a * al * al * n0 * n0
        + 2583.0 / 1280.0 * a * al * n0 * n0
        - al * n1;
    let mu2 = -(49.0 * al * al + 3.0 * al + 12.0) / 64.0 * n1 * n1 + (27.0 * al * al - al + 6.0) / (32.0 * al) * n1 * n2
        - 5.0 * (al - 1.0) * n2 * n2 / (64.0 * al)
        + (63.0 * al - 31.0) * (al - 1.0) * n3 * n0 / (64.0 * al)
        + 3.0 * a * (2829.0 * al * al - 3226.0 * al + 2829.0) * (al - 1.0).powi(3) * n0 * n0 / (10240.0 * al)
        - al * n1 / 2.0
        + n2 / 2.0;
    let mu3 = al * n3 / 3.0 - 9.0 / 16.0 * al.powi(3) * a * n0 + 9.0 / 16.0 * a * al * al * n0 - 3.0 / 16.0 * a * al * n0
        + 3.0 / 16.0 * a * al.powi(4) * n0;
    Ok((UnfoldingPoint::new(mu0, mu1, mu2, mu3), k))
}

fn sqrt_nu1(nu1: f64, set: &str) -> Result<f64> {
    if nu1 < 0.0 {
        return Err(Error::domain(format!("{set} needs nu1 >= 0")));
    }
    Ok(nu1.sqrt())
}

pub fn chua_homoclinic_specialized(nu1: f64, nu2: f64) -> Result<SetResidual> {
    let rad = 1048576.0 + 5286912.0 * nu2 + 13861929.0 * nu2 * nu2;
    if rad < 0.0 {
        return Err(Error::domain("T_HmC radicand is negative"));
    }
    let rhs = 320.0 / 1771.0 + 35045.0 / 28336.0 * nu2 - 5.0 / 28336.0 * rad.sqrt();
    Ok(SetResidual::new("T_HmC", nu1 - rhs))
}

pub fn chua_homoclinic_pm_specialized(nu1: f64, nu2: f64, b: Branch) -> Result<SetResidual> {
    let s = sqrt_nu1(nu1, "T_HmC±")?;
    let sg = b.sign();
    let r10 = 10f64.sqrt();
    let v = sg * 4989.0 * r10 / 1600000.0 * PI * nu1 * s + sg * 21.0 * r10 / 160000.0 * PI * s * nu2 - 16.0 / 25.0 * nu1
        + 0.5 * nu2
        + sg * 9.0 * r10 / 1000.0 * PI * s;
    Ok(SetResidual::new(format!("T_HmC{}", b.suffix()), v))
}

pub fn chua_secondary_hopf_specialized(nu1: f64, nu2: f64, b: Branch) -> Result<SetResidual> {
    let s = sqrt_nu1(nu1, "T_H±")?;
    let sg = b.sign();
    let r5 = 5f64.sqrt();
    let v = 5293162496.0 / 30517578125.0 * nu2 * nu2 - 67273949184.0 / 152587890625.0 * nu1 * nu2
        + sg * 978767872.0 * r5 / 30517578125.0 * s * nu2
        - 1841299456.0 / 30517578125.0 * nu1
        + 2097152.0 / 48828125.0 * nu2
        + sg * 199753728.0 * r5 / 30517578125.0 * s;
    Ok(SetResidual::new(format!("T_H{}", b.suffix()), v))
}

/// Sets in the `(nu1, nu2)` plane at `nu3 = 0.3`, `alpha = 0.8`, `a = 1`, `nu0 = 0`:
/// `T_H`, `T_p`, `T_HmC`, `T_HmC±`, `T_H±`.
pub fn chua_sets_specialized(nu1: f64, nu2: f64) -> Result<Vec<SetResidual>> {
    if !nu1.is_finite() || !nu2.is_finite() {
        return Err(Error::NonFinite("controller gain"));
    }
    let mut v = vec![
        SetResidual::new("T_H", nu1 - 1.25 * nu2),
        SetResidual::new("T_p", nu1),
        residual_or_undefined("T_HmC", chua_homoclinic_specialized(nu1, nu2)),
    ];
    for b in Branch::BOTH {
        v.push(residual_or_undefined(&format!("T_HmC{}", b.suffix()), chua_homoclinic_pm_specialized(nu1, nu2, b)));
    }
    for b in Branch::BOTH {
        v.push(residual_or_undefined(&format!("T_H{}", b.suffix()), chua_secondary_hopf_specialized(nu1, nu2, b)));
    }
    Ok(v)
}

/// Normal-form sets evaluated after [`chua_to_unfolding`]:
/// `T_P`, `T_H`, `T_HmC`, `T_H±`, `T_HmC±`.
pub fn chua_general_sets(p: &ChuaParams) -> Result<Vec<SetResidual>> {
    let (mu, k) = chua_to_unfolding(p)?;
    let mut v = vec![pitchfork_residual(&mu), primary_hopf_residual(&mu), primary_homoclinic_residual(&mu, &k)];
    match secondary_hopf_residual(&mu, &k) {
        Ok(pair) => {
            v.push(pair.plus);
            v.push(pair.minus);
        }
        Err(e) => {
            for b in Branch::BOTH {
                v.push(SetResidual::undefined(format!("T_H{}", b.suffix()), e.to_string()));
            }
        }
    }
    for b in Branch::BOTH {
        let name = format!("T_HmC_Gamma{}", b.suffix());
        v.push(residual_or_undefined(&name, homoclinic_gamma_residual(&mu, &k, b)));
    }
    Ok(v)
}

/// Leading radius and angular frequency of the primary cycle. `valid` is false when
/// the radicand of the radius is negative, in which case `radius` uses its absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChuaCycleEstimate {
    pub radius: f64,
    pub angular_frequency: f64,
    pub valid: bool,
}

pub fn chua_primary_cycle_estimate(p: &ChuaParams) -> Result<ChuaCycleEstimate> {
    p.validate()?;
    let den = 3.0 * p.a * (p.alpha - 1.0) * p.alpha.powi(3);
    if den == 0.0 {
        return Err(Error::DegenerateDenominator("3 a (alpha - 1) alpha^3"));
    }
    let q = 4.0 * (p.alpha * p.nu1 - p.nu2) / den;
    Ok(ChuaCycleEstimate {
        radius: q.abs().sqrt(),
        angular_frequency: (p.alpha * p.nu1).abs().sqrt(),
        valid: q > 0.0,
    })
}

/// Controlled Chua circuit as a simulation model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChuaModel {
    pub params: ChuaParams,
    /// Equilibria with `|x|` above this are dropped. The `nu3 x y` term adds a
    /// root of order `beta / nu3` that is unrelated to the local unfolding.
    pub local_radius: f64,
}

impl VectorField<3> for ChuaModel {
    fn eval(&self, s: &[f64; 3]) -> [f64; 3] {
        chua_field(s, &self.params)
    }
}

impl ChuaModel {
    pub fn new(params: ChuaParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, local_radius: 1.0 })
    }

    pub fn with_local_radius(mut self, r: f64) -> Self {
        self.local_radius = r;
        self
    }

    /// Equilibria satisfy `y = a x^3 + c x`, `z = y - x` and a quartic in `x`.
    pub fn equilibrium_locations(&self) -> Result<Vec<State3>> {
        let p = &self.params;
        let coeffs = [
            p.nu0,
            p.nu1 + (p.nu2 - p.beta) * p.c,
            p.nu3 * p.c,
            (p.nu2 - p.beta) * p.a,
            p.nu3 * p.a,
        ];
        if coeffs.iter().all(|c| *c == 0.0) {
            return Err(Error::domain("a curve of equilibria"));
        }
        Ok(real_roots(&coeffs)?
            .into_iter()
            .filter(|r| r.value.abs() <= self.local_radius)
            .map(|r| {
                let x = r.value;
                let y = p.a * x * x * x + p.c * x;
                [x, y, y - x]
            })
            .collect())
    }
}

/// Drops one strongly contracting real eigenvalue so that the type reflects the
/// flow on the attracting two-dimensional slow manifold.
fn slow_kind(eig: &[Complex64]) -> EquilibriumKind {
    let fast = eig
        .iter()
        .enumerate()
        .filter(|(_, l)| l.im == 0.0 && l.re < -0.5)
        .min_by(|a, b| a.1.re.total_cmp(&b.1.re))
        .map(|(i, _)| i);
    match fast {
        Some(i) => {
            let rest: Vec<Complex64> = eig.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| *l).collect();
            EquilibriumKind::from_eigenvalues(&rest)
        }
        None => EquilibriumKind::from_eigenvalues(eig),
    }
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

impl Model<3> for ChuaModel {
    fn fixed_points(&self) -> Result<Vec<FixedPoint>> {
        Ok(self
            .equilibrium_locations()?
            .into_iter()
            .map(|s| {
                let eig = eigenvalues(&chua_jacobian(&s, &self.params));
                FixedPoint::new(s.to_vec(), &eig, slow_kind(&eig))
            })
            .collect())
    }

    /// Half-plane spanned by the kernel direction `(1, 0, -1)` and the fast
    /// eigendirection `(alpha, -1, -alpha)` of the organizing singularity.
    fn section_at(&self, center: [f64; 3]) -> Section<3> {
        let al = self.params.alpha;
        let d = [1.0, 0.0, -1.0];
        let n = cross(&d, &[al, -1.0, -al]);
        Section::oriented(self, center, d, n)
    }
}

/// Where a scenario trajectory is expected to settle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedTarget {
    Origin,
    EPlus,
    EMinus,
    StableCycle,
}

/// Attractor inventory expected in a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub equilibria: usize,
    pub attracting_equilibria: usize,
    pub stable_cycles: usize,
    pub unstable_cycles: usize,
    /// One entry per initial condition.
    pub targets: Vec<ExpectedTarget>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChuaScenario {
    pub name: String,
    pub params: ChuaParams,
    pub initial_conditions: Vec<State3>,
    pub t_max: f64,
    pub expect: Expectation,
}

/// Scenario file layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: Option<String>,
    pub gains: [f64; 4],
    pub alpha: f64,
    pub a: f64,
    pub initial_conditions: Vec<State3>,
    pub t_max: f64,
    #[serde(default)]
    pub expect: Option<Expectation>,
}

impl ScenarioFile {
    pub fn into_params(&self) -> Result<ChuaParams> {
        let p = ChuaParams::bt(self.alpha, self.a, self.gains);
        p.validate()?;
        if !(self.t_max > 0.0) {
            return Err(Error::Config("t_max must be positive".into()));
        }
        Ok(p)
    }
}

/// The eight regions of the `(nu1, nu2)` slice at `nu3 = 0.3`, `alpha = 0.8`, `a = 1`.
pub fn region_scenarios() -> Vec<ChuaScenario> {
    use ExpectedTarget::*;
    let mk = |name: &str, nu1: f64, nu2: f64, ics: Vec<State3>, e: (usize, usize, usize, usize), t: Vec<ExpectedTarget>| {
        ChuaScenario {
            name: name.to_string(),
            params: ChuaParams::bt(0.8, 1.0, [0.0, nu1, nu2, 0.3]),
            initial_conditions: ics,
            t_max: 6000.0,
            expect: Expectation {
                equilibria: e.0,
                attracting_equilibria: e.1,
                stable_cycles: e.2,
                unstable_cycles: e.3,
                targets: t,
            },
        }
    };
    vec![
        mk("a", -0.01, -0.02, vec![[-0.6, -0.54, -0.1]], (1, 1, 0, 0), vec![Origin]),
        mk("b", -0.01, 0.0, vec![[0.3, 0.54, 0.1]], (1, 0, 1, 0), vec![StableCycle]),
        mk("c", 0.01, 0.1, vec![[-0.7, -0.7, -0.3]], (3, 0, 1, 0), vec![StableCycle]),
        mk("d", 0.02, 0.068, vec![[0.004, -0.1, 0.0]], (3, 1, 1, 1), vec![EMinus]),
        mk("e", 0.02, 0.03, vec![[-0.015, -0.001, 0.015]], (3, 1, 1, 0), vec![EMinus]),
        mk("f", 0.02, 0.0, vec![[-0.02, -0.001, 0.1]], (3, 1, 0, 0), vec![EMinus]),
        mk(
            "g",
            0.018,
            -0.016,
            vec![[0.02, 0.005, -0.02], [-0.015, -0.001, 0.3]],
            (3, 1, 1, 0),
            vec![StableCycle, EMinus],
        ),
        mk(
            "h",
            0.02,
            -0.025,
            vec![[0.013, -0.03, 0.5], [-0.013, -0.001, 0.1]],
            (3, 2, 0, 0),
            vec![EPlus, EMinus],
        ),
    ]
}

/// Outcome of comparing a simulated portrait with a scenario's expectation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCheck {
    pub name: String,
    pub matched: bool,
    pub mismatches: Vec<String>,
    /// Attractor reached from each initial condition, `None` for escapes and unresolved runs.
    pub reached: Vec<Option<ExpectedTarget>>,
}

/// Portrait settings used for the region scenarios.
pub fn scenario_options(t_max: f64) -> PortraitOptions {
    PortraitOptions {
        integrator: IntegratorConfig::with_horizon(t_max),
        backward: false,
        scan: Some(EquilibriumScan {
            r_min: 1e-3,
            r_max: 0.5,
            points: 40,
            t_return: 400.0,
        }),
        dedup_tol: 1e-3,
    }
}

fn label(fp: &FixedPoint) -> ExpectedTarget {
    let x = fp.location[0];
    if x.abs() <= 1e-9 {
        ExpectedTarget::Origin
    } else if x > 0.0 {
        ExpectedTarget::EPlus
    } else {
        ExpectedTarget::EMinus
    }
}

/// Compares counts and the set of reached attractors. Which initial condition
/// lands on which attractor is reported but does not decide the match.
pub fn check_scenario(sc: &ChuaScenario, p: &PortraitSummary) -> ScenarioCheck {
    let e = &sc.expect;
    let mut mism = Vec::new();
    let mut cmp = |what: &str, want: usize, got: usize| {
        if want != got {
            mism.push(format!("{what}: expected {want}, found {got}"));
        }
    };
    cmp("equilibria", e.equilibria, p.equilibria.len());
    cmp("attracting equilibria", e.attracting_equilibria, p.attracting_equilibria());
    cmp("stable cycles", e.stable_cycles, p.stable_cycles());
    cmp("unstable cycles", e.unstable_cycles, p.unstable_cycles());
    let reached: Vec<Option<ExpectedTarget>> = p
        .outcomes
        .iter()
        .map(|o| match o.forward {
            Target::Equilibrium(i) => Some(label(&p.equilibria[i])),
            Target::Cycle(_) => Some(ExpectedTarget::StableCycle),
            _ => None,
        })
        .collect();
    let mut want = e.targets.clone();
    want.sort();
    want.dedup();
    let mut got: Vec<ExpectedTarget> = reached.iter().flatten().copied().collect();
    got.sort();
    got.dedup();
    if reached.iter().any(Option::is_none) || want != got {
        mism.push(format!("reached {reached:?}, expected {:?}", e.targets));
    }
    ScenarioCheck {
        name: sc.name.clone(),
        matched: mism.is_empty(),
        mismatches: mism,
        reached,
    }
}

pub fn run_scenario(sc: &ChuaScenario) -> Result<(PortraitSummary, ScenarioCheck)> {
    let m = ChuaModel::new(sc.params)?;
    let p = classify_portrait(&m, &sc.initial_conditions, &scenario_options(sc.t_max))?;
    let c = check_scenario(sc, &p);
    Ok((p, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bt(g: [f64; 4]) -> ChuaParams {
        ChuaParams::bt(0.8, 1.0, g)
    }

    #[test]
    fn field_examples() {
        assert_eq!(chua_field(&[0.0; 3], &bt([0.0; 4])), [0.0; 3]);
        let v = chua_field(&[1.0, 0.0, 0.0], &bt([0.0; 4]));
        assert!((v[0] + 0.8).abs() < 1e-15 && v[1] == 1.0 && v[2] == 0.0);
        let p = ChuaParams { c: -0.3, beta: 0.5, ..bt([0.0; 4]) };
        for s in [[0.3, -0.2, 0.7], [1.1, 0.4, -2.0]] {
            let a = chua_field(&s, &p);
            let b = chua_field(&s.map(|v| -v), &p);
            for i in 0..3 {
                assert_eq!(a[i], -b[i]);
            }
        }
    }

    #[test]
    fn bt_examples() {
        let c = bt_condition(&bt([0.0; 4]));
        assert!(c.holds);
        let mut e: Vec<f64> = c.eigenvalues.iter().map(|l| l[0]).collect();
        e.sort_by(f64::total_cmp);
        assert!((e[0] + 1.0).abs() < 1e-12 && e[1].abs() < 1e-7 && e[2].abs() < 1e-7);
        assert!(!bt_condition(&ChuaParams { beta: 0.9, ..bt([0.0; 4]) }).holds);
        assert!(!bt_condition(&ChuaParams { c: 0.1, ..bt([0.0; 4]) }).holds);
    }

    #[test]
    fn nilpotent_block() {
        // kernel (1, 0, -1), generalized eigenvector with J w = v
        let j = chua_jacobian(&[0.0; 3], &bt([0.0; 4]));
        let m = Matrix3::from_fn(|r, c| j[r][c]);
        assert_eq!(m.rank(1e-12), 2);
        assert_eq!((m * m).rank(1e-12), 1);
        let w = nalgebra::Vector3::new(0.0, 1.25, 1.25);
        let v = m * w;
        assert!((v - nalgebra::Vector3::new(1.0, 0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn uncontrolled_equilibria() {
        let m = ChuaModel::new(bt([0.0; 4])).unwrap();
        let e = m.equilibrium_locations().unwrap();
        assert_eq!(e, vec![[0.0; 3]]);
        let p = ChuaParams { c: -0.09, ..bt([0.0; 4]) };
        let e = ChuaModel::new(p).unwrap().equilibrium_locations().unwrap();
        assert_eq!(e.len(), 3);
        let r = 0.09f64.sqrt();
        for s in &e {
            let v = chua_field(s, &p);
            assert!(v.iter().all(|c| c.abs() < 1e-12));
            assert!(s[0].abs() < 1e-15 || ((s[0].abs() - r).abs() < 1e-12 && s[1].abs() < 1e-12 && (s[2] + s[0]).abs() < 1e-12));
        }
    }

    #[test]
    fn unfolding_examples() {
        let (mu, k) = chua_to_unfolding(&bt([0.0; 4])).unwrap();
        assert_eq!(mu.as_array(), [0.0; 4]);
        assert!((k.a1 - 0.4096).abs() < 1e-15);
        assert!((k.b0 + 0.0768).abs() < 1e-15);
        let (mu, _) = chua_to_unfolding(&bt([0.0, 0.0, 0.0, 0.3])).unwrap();
        assert!((mu.mu3 - 0.08).abs() < 1e-15);
        assert_eq!(mu.mu0, 0.0);
        let p = ChuaParams::bt(1.0, 1.0, [0.0; 4]);
        assert!(matches!(chua_to_unfolding(&p), Err(Error::InvalidConstants(_))));
    }

    #[test]
    fn specialized_examples() {
        let s = chua_sets_specialized(0.025, 0.02).unwrap();
        assert!(s[0].value.abs() < 1e-15);
        assert!(chua_sets_specialized(0.0, 0.3).unwrap()[1].value == 0.0);
        let h = chua_homoclinic_specialized(0.0, 0.0).unwrap();
        assert!(h.value.abs() < 1e-15);
        assert!(chua_homoclinic_pm_specialized(-0.01, 0.0, Branch::Plus).unwrap_err().is_domain());
        let s = chua_sets_specialized(-0.01, 0.0).unwrap();
        assert!(s[3..].iter().all(|r| !r.defined));
    }

    fn root(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        crate::roots::bisect(|x| Ok(f(x)), lo, hi, 1e-15).unwrap()
    }

    #[test]
    fn general_sets_agree_with_specialized() {
        let nu2 = 0.02;
        let composed = root(|n1| chua_general_sets(&bt([0.0, n1, nu2, 0.3])).unwrap()[1].value, 0.0, 0.05);
        let special = root(|n1| chua_sets_specialized(n1, nu2).unwrap()[0].value, 0.0, 0.05);
        assert!((special - 0.025).abs() < 1e-12);
        assert!((composed - 0.025).abs() < 1e-6, "{composed}");
        let composed = root(|n1| chua_general_sets(&bt([0.0, n1, nu2, 0.3])).unwrap()[0].value, -0.01, 0.01);
        assert!(composed.abs() < 1e-6);
        let s = chua_general_sets(&bt([0.0, 0.01, 0.0, 0.3])).unwrap();
        assert!(s[3].defined && s[4].defined, "{s:?}");
    }

    #[test]
    fn cycle_estimate_sign_flag() {
        let e = chua_primary_cycle_estimate(&bt([0.0, -0.01, 0.0, 0.3])).unwrap();
        assert!(e.valid);
        assert!((e.radius - (0.032f64 / 0.3072).sqrt()).abs() < 1e-14);
        assert!((e.angular_frequency - 0.008f64.sqrt()).abs() < 1e-15);
        assert!(!chua_primary_cycle_estimate(&bt([0.0, -0.01, -0.02, 0.3])).unwrap().valid);
    }

    #[test]
    fn scenarios_are_well_formed() {
        let s = region_scenarios();
        assert_eq!(s.len(), 8);
        for sc in &s {
            assert_eq!(sc.initial_conditions.len(), sc.expect.targets.len());
            let m = ChuaModel::new(sc.params).unwrap();
            assert_eq!(m.fixed_points().unwrap().len(), sc.expect.equilibria, "{}", sc.name);
        }
        let f = ScenarioFile {
            name: None,
            gains: [0.0, 0.02, 0.0, 0.3],
            alpha: 0.8,
            a: 1.0,
            initial_conditions: vec![[0.0; 3]],
            t_max: 100.0,
            expect: None,
        };
        let back: ScenarioFile = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
