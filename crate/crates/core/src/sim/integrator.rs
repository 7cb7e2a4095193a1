//! Dormand-Prince 5(4) with dense output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An autonomous vector field on `R^N`.
pub trait VectorField<const N: usize> {
    fn eval(&self, s: &[f64; N]) -> [f64; N];
}

/// Adapts a closure to [`VectorField`].
#[derive(Debug, Clone, Copy)]
pub struct FnField<F>(pub F);

impl<const N: usize, F> VectorField<N> for FnField<F>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    fn eval(&self, s: &[f64; N]) -> [f64; N] {
        (self.0)(s)
    }
}

/// The same field with time reversed.
#[derive(Debug, Clone, Copy)]
pub struct Reversed<F>(pub F);

impl<const N: usize, F: VectorField<N>> VectorField<N> for Reversed<F> {
    fn eval(&self, s: &[f64; N]) -> [f64; N] {
        let mut v = self.0.eval(s);
        v.iter_mut().for_each(|x| *x = -*x);
        v
    }
}

impl<const N: usize, F: VectorField<N> + ?Sized> VectorField<N> for &F {
    fn eval(&self, s: &[f64; N]) -> [f64; N] {
        (**self).eval(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub t_max: f64,
    pub transient_skip: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_step: 1.0,
            t_max: 2e3,
            transient_skip: 600.0,
        }
    }
}

/// Norm above which a trajectory counts as escaped.
pub const DIVERGENCE_NORM: f64 = 1e6;

impl IntegratorConfig {
    /// Defaults with the given horizon; the transient is 30% of it.
    pub fn with_horizon(t_max: f64) -> Self {
        Self {
            t_max,
            transient_skip: 0.3 * t_max,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1e-12..=1e-3).contains(&self.rtol) {
            return Err(Error::Config(format!("rtol {} outside [1e-12, 1e-3]", self.rtol)));
        }
        if !(self.atol > 0.0 && self.atol <= self.rtol) {
            return Err(Error::Config(format!("atol {} must be in (0, rtol]", self.atol)));
        }
        if !(self.max_step > 0.0 && self.t_max > 0.0) {
            return Err(Error::Config("max_step and t_max must be positive".into()));
        }
        if !(0.0..=self.t_max).contains(&self.transient_skip) {
            return Err(Error::Config("transient_skip must lie in [0, t_max]".into()));
        }
        Ok(())
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rc: [[f64; N]; 5],
}

impl<const N: usize> Step<N> {
    /// Dense output at `t` in `[t0, t1]`.
    pub fn at(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let th = if h == 0.0 { 0.0 } else { (t - self.t0) / h };
        let th1 = 1.0 - th;
        let mut out = [0.0; N];
        for i in 0..N {
            let r = &self.rc;
            out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        out
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Adaptive stepper holding the current state.
pub struct Dopri5<const N: usize, F> {
    field: F,
    cfg: IntegratorConfig,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    pub steps: usize,
}

impl<const N: usize, F: VectorField<N>> Dopri5<N, F> {
    pub fn new(field: F, y0: [f64; N], cfg: IntegratorConfig) -> Self {
        let k1 = field.eval(&y0);
        let mut s = Self {
            field,
            cfg,
            t: 0.0,
            y: y0,
            k1,
            h: 0.0,
            steps: 0,
        };
        s.h = s.initial_step();
        s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> [f64; N] {
        self.y
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.cfg.atol + self.cfg.rtol * a.abs().max(b.abs())
    }

    fn initial_step(&self) -> f64 {
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..N {
            let sc = self.scale(self.y[i], self.y[i]);
            d0 += (self.y[i] / sc).powi(2);
            d1 += (self.k1[i] / sc).powi(2);
        }
        let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0.min(self.cfg.max_step)
    }

    /// Advances one accepted step, not past `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<Step<N>> {
        let f = &self.field;
        let y = self.y;
        let k1 = self.k1;
        let mut h = self.h.min(self.cfg.max_step);
        loop {
            let mut last = false;
            if self.t + h >= t_end {
                h = t_end - self.t;
                last = true;
            }
            if h <= 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::StepFailure { t: self.t });
            }
            let k2 = f.eval(&axpy(&y, h, &[(A21, &k1)]));
            let k3 = f.eval(&axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f.eval(&axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f.eval(&axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f.eval(&axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ));
            let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f.eval(&y1);
            let mut err = 0.0;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                err += (e / self.scale(y[i], y1[i])).powi(2);
            }
            let err = (err / N as f64).sqrt();
            if !err.is_finite() {
                h *= 0.1;
                continue;
            }
            if err <= 1.0 {
                let fac = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 10.0) };
                let mut rc = [[0.0; N]; 5];
                for i in 0..N {
                    let dy = y1[i] - y[i];
                    let bspl = h * k1[i] - dy;
                    rc[0][i] = y[i];
                    rc[1][i] = dy;
                    rc[2][i] = bspl;
                    rc[3][i] = dy - h * k7[i] - bspl;
                    rc[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                let t0 = self.t;
                self.t = if last { t_end } else { self.t + h };
                self.y = y1;
                self.k1 = k7;
                self.steps += 1;
                // keep the pre-clipping step size after a shortened final step
                if !last || fac < 1.0 {
                    self.h = h * fac;
                }
                if norm(&y1) > DIVERGENCE_NORM || y1.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Divergence { t: self.t });
                }
                return Ok(Step {
                    t0,
                    t1: self.t,
                    y0: y,
                    y1,
                    rc,
                });
            }
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }

    /// Integrates to `t_end` without recording.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        while self.t < t_end {
            self.step(t_end)?;
        }
        Ok(())
    }
}

/// Time-stamped states.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    #[serde(with = "state_vec")]
    pub states: Vec<[f64; N]>,
}

mod state_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(v: &[[f64; N]], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|a| a.to_vec()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<Vec<[f64; N]>, D::Error> {
        let raw = Vec::<Vec<f64>>::deserialize(d)?;
        raw.into_iter()
            .map(|v| <[f64; N]>::try_from(v).map_err(|_| serde::de::Error::custom("wrong state dimension")))
            .collect()
    }
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last(&self) -> Option<(f64, [f64; N])> {
        self.t.last().map(|t| (*t, *self.states.last().unwrap()))
    }
}

/// Integrates from `s0` over `[0, cfg.t_max]`.
///
/// With `sample_dt` the dense output is sampled on a uniform grid, otherwise
/// every accepted step is recorded.
pub fn integrate<const N: usize, F: VectorField<N>>(
    field: F,
    s0: [f64; N],
    cfg: &IntegratorConfig,
    sample_dt: Option<f64>,
) -> Result<Trajectory<N>> {
    cfg.validate()?;
    let mut st = Dopri5::new(field, s0, *cfg);
    let mut out = Trajectory {
        t: vec![0.0],
        states: vec![s0],
    };
    let mut next = sample_dt.unwrap_or(0.0);
    while st.t() < cfg.t_max {
        let step = st.step(cfg.t_max)?;
        match sample_dt {
            Some(dt) => {
                while next <= step.t1 + 1e-12 * dt && next <= cfg.t_max + 1e-12 * dt {
                    out.t.push(next);
                    out.states.push(step.at(next.min(step.t1)));
                    next += dt;
                }
            }
            None => {
                out.t.push(step.t1);
                out.states.push(step.y1);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(mu1: f64) -> FnField<impl Fn(&[f64; 2]) -> [f64; 2]> {
        FnField(move |s: &[f64; 2]| [mu1 * s[1], -s[0]])
    }

    #[test]
    fn origin_is_fixed() {
        let f = FnField(|s: &[f64; 2]| [s[1] * s[1] * s[1] + s[0] * s[1] * s[1], -s[0] + s[1].powi(3)]);
        let tr = integrate(f, [0.0, 0.0], &IntegratorConfig::with_horizon(100.0), None).unwrap();
        assert!(tr.states.iter().all(|s| *s == [0.0, 0.0]));
    }

    #[test]
    fn exponential_decay() {
        let f = FnField(|s: &[f64; 1]| [-s[0]]);
        let cfg = IntegratorConfig::with_horizon(5.0);
        let tr = integrate(f, [1.0], &cfg, Some(0.5)).unwrap();
        for (t, s) in tr.t.iter().zip(&tr.states) {
            assert!((s[0] - (-t).exp()).abs() < 1e-9, "{t}");
        }
        assert_eq!(tr.len(), 11);
    }

    #[test]
    fn harmonic_period() {
        // x'' = -mu1 x: frequency sqrt(0.01)
        let f = harmonic(0.01);
        let cfg = IntegratorConfig::with_horizon(200.0);
        let tr = integrate(f, [0.0, 1.0], &cfg, Some(0.01)).unwrap();
        let mut ups = Vec::new();
        for w in tr.t.windows(2).zip(tr.states.windows(2)) {
            let (ts, ss) = w;
            if ss[0][1] < 0.0 && ss[1][1] >= 0.0 {
                let a = ss[0][1] / (ss[0][1] - ss[1][1]);
                ups.push(ts[0] + a * (ts[1] - ts[0]));
            }
        }
        let period = ups[1] - ups[0];
        assert!((period - 2.0 * std::f64::consts::PI / 0.1).abs() < 0.01);
    }

    #[test]
    fn dense_output_matches_exact_solution() {
        let f = harmonic(-1.0);
        let mut st = Dopri5::new(f, [0.0, 1.0], IntegratorConfig::default());
        let step = st.step(10.0).unwrap();
        let step = if step.t1 - step.t0 < 0.05 { st.step(10.0).unwrap() } else { step };
        let tm = 0.5 * (step.t0 + step.t1);
        let y = step.at(tm);
        let exact = [-(tm.sinh()), tm.cosh()];
        assert!((y[0] - exact[0]).abs() < 1e-8 && (y[1] - exact[1]).abs() < 1e-8);
    }

    #[test]
    fn observed_order_at_least_four() {
        // fixed horizon, error vs tolerance on the rotation x' = y, y' = -x
        let f = FnField(|s: &[f64; 2]| [s[1], -s[0]]);
        let mut pts = Vec::new();
        for rtol in [1e-5, 1e-6, 1e-7, 1e-8] {
            let cfg = IntegratorConfig { rtol, atol: rtol * 1e-3, ..IntegratorConfig::with_horizon(20.0) };
            let mut st = Dopri5::new(f, [0.0, 1.0], cfg);
            st.advance_to(20.0).unwrap();
            let s = st.state();
            let err = ((s[0] - 20f64.sin()).powi(2) + (s[1] - 20f64.cos()).powi(2)).sqrt();
            pts.push(((st.steps as f64).ln(), err.ln()));
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!(-slope >= 4.0, "observed order {}", -slope);
    }

    #[test]
    fn divergence_detected() {
        let f = FnField(|s: &[f64; 1]| [s[0] * s[0]]);
        let r = integrate(f, [1.0], &IntegratorConfig::with_horizon(2.0), None);
        assert!(matches!(r, Err(Error::Divergence { .. }) | Err(Error::StepFailure { .. })));
    }

    #[test]
    fn reversed_field() {
        let f = FnField(|s: &[f64; 1]| [-s[0]]);
        let tr = integrate(Reversed(f), [1.0], &IntegratorConfig::with_horizon(1.0), None).unwrap();
        let (_, s) = tr.last().unwrap();
        assert!((s[0] - 1f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig { rtol: 1e-2, ..Default::default() }.validate().is_err());
        assert!(IntegratorConfig { atol: 1e-6, rtol: 1e-9, ..Default::default() }.validate().is_err());
        assert!(IntegratorConfig::default().validate().is_ok());
    }
}
