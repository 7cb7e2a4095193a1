//! Poincare half-sections and the return map on them.

use serde::{Deserialize, Serialize};

use super::integrator::{Dopri5, IntegratorConfig, VectorField};
#[cfg(test)]
use super::integrator::FnField;
use crate::error::Result;
use crate::roots::brent;

pub(crate) fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sub<const N: usize>(a: &[f64; N], b: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| a[i] - b[i])
}

pub(crate) fn norm<const N: usize>(a: &[f64; N]) -> f64 {
    dot(a, a).sqrt()
}

fn unit<const N: usize>(a: &[f64; N]) -> [f64; N] {
    let n = norm(a);
    std::array::from_fn(|i| a[i] / n)
}

/// Finite-difference Jacobian, `J[i][j] = d f_i / d x_j`.
pub fn numeric_jacobian<const N: usize, F: VectorField<N> + ?Sized>(f: &F, s: &[f64; N]) -> [[f64; N]; N] {
    let mut j = [[0.0; N]; N];
    for c in 0..N {
        let h = 1e-6 * (1.0 + s[c].abs());
        let mut p = *s;
        let mut m = *s;
        p[c] += h;
        m[c] -= h;
        let (fp, fm) = (f.eval(&p), f.eval(&m));
        for r in 0..N {
            j[r][c] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}

/// The half-hyperplane `{ n . (s - c) = 0, d . (s - c) > 0 }`, crossed
/// in the direction of increasing `n . (s - c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Section<const N: usize> {
    #[serde(with = "arr")]
    pub center: [f64; N],
    #[serde(with = "arr")]
    pub dir: [f64; N],
    #[serde(with = "arr")]
    pub normal: [f64; N],
}

pub(crate) mod arr {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(v: &[f64; N], s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[f64; N], D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        <[f64; N]>::try_from(v).map_err(|_| serde::de::Error::custom("wrong dimension"))
    }
}

impl<const N: usize> Section<N> {
    /// `dir` and `normal` are normalized; `normal` is made orthogonal to `dir`.
    pub fn new(center: [f64; N], dir: [f64; N], normal: [f64; N]) -> Self {
        let d = unit(&dir);
        let p = dot(&normal, &d);
        let n: [f64; N] = std::array::from_fn(|i| normal[i] - p * d[i]);
        Self {
            center,
            dir: d,
            normal: unit(&n),
        }
    }

    /// Section through `center` and `point`, transverse to the flow at `point`.
    pub fn through<F: VectorField<N>>(field: &F, center: [f64; N], point: [f64; N]) -> Self {
        let d = sub(&point, &center);
        Self::new(center, d, field.eval(&point))
    }

    /// Section along `dir` whose crossing direction follows the linear rotation at `center`.
    pub fn oriented<F: VectorField<N> + ?Sized>(field: &F, center: [f64; N], dir: [f64; N], normal: [f64; N]) -> Self {
        let s = Self::new(center, dir, normal);
        let j = numeric_jacobian(field, &center);
        let jd: [f64; N] = std::array::from_fn(|r| dot(&j[r], &s.dir));
        if dot(&s.normal, &jd) < 0.0 {
            s.flipped()
        } else {
            s
        }
    }

    pub fn flipped(&self) -> Self {
        Self {
            normal: self.normal.map(|v| -v),
            ..*self
        }
    }

    pub fn point_at(&self, r: f64) -> [f64; N] {
        std::array::from_fn(|i| self.center[i] + r * self.dir[i])
    }

    pub fn coord(&self, s: &[f64; N]) -> f64 {
        dot(&self.dir, &sub(s, &self.center))
    }

    pub fn side(&self, s: &[f64; N]) -> f64 {
        dot(&self.normal, &sub(s, &self.center))
    }
}

/// 2D section along `+x` from `center`, oriented by the local rotation.
pub fn planar_section<F: VectorField<2>>(field: &F, center: [f64; 2]) -> Section<2> {
    Section::oriented(field, center, [1.0, 0.0], [0.0, 1.0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing<const N: usize> {
    pub t: f64,
    pub state: [f64; N],
    pub r: f64,
}

/// A trajectory that reports its successive crossings of a section.
pub struct SectionFlow<const N: usize, F> {
    stepper: Dopri5<N, F>,
    section: Section<N>,
    t_limit: f64,
    /// Set while the first step from a start on the section is pending.
    on_section: bool,
}

impl<const N: usize, F: VectorField<N>> SectionFlow<N, F> {
    pub fn new(field: F, s0: [f64; N], section: Section<N>, cfg: &IntegratorConfig, t_limit: f64) -> Self {
        let scale = norm(&sub(&s0, &section.center)).max(1e-300);
        Self {
            stepper: Dopri5::new(field, s0, *cfg),
            section,
            t_limit,
            on_section: section.side(&s0).abs() <= 1e-9 * scale,
        }
    }

    pub fn t(&self) -> f64 {
        self.stepper.t()
    }

    pub fn state(&self) -> [f64; N] {
        self.stepper.state()
    }

    /// The next crossing, `Ok(None)` once `t_limit` is reached.
    pub fn next_crossing(&mut self) -> Result<Option<Crossing<N>>> {
        loop {
            if self.stepper.t() >= self.t_limit {
                return Ok(None);
            }
            let step = self.stepper.step(self.t_limit)?;
            if std::mem::take(&mut self.on_section) {
                // a start placed on the section registers as a spurious crossing
                continue;
            }
            let g0 = self.section.side(&step.y0);
            let g1 = self.section.side(&step.y1);
            if g0 < 0.0 && g1 >= 0.0 {
                let sec = self.section;
                let tc = brent(|t| Ok(sec.side(&step.at(t))), step.t0, step.t1, 1e-14 * step.t1.abs().max(1.0), 100)?;
                let state = step.at(tc);
                let r = sec.coord(&state);
                if r > 0.0 {
                    return Ok(Some(Crossing { t: tc, state, r }));
                }
            }
        }
    }
}

/// Return map `P` on a section, evaluated by restarting from `c + r d`.
pub struct ReturnMap<'a, const N: usize, F> {
    pub field: &'a F,
    pub section: Section<N>,
    pub cfg: IntegratorConfig,
    /// Longest admissible time for one return.
    pub t_return: f64,
    /// Returns taken before measuring, so that in 3D the start settles on the slow manifold.
    pub skip: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnSample {
    pub r: f64,
    /// Section coordinate after `skip` returns.
    pub r_from: f64,
    /// Section coordinate after `skip + 1` returns.
    pub r_to: f64,
    /// Time of the measured return.
    pub period: f64,
}

impl ReturnSample {
    pub fn displacement(&self) -> f64 {
        self.r_to - self.r_from
    }
}

impl<'a, const N: usize, F: VectorField<N>> ReturnMap<'a, N, F> {
    pub fn new(field: &'a F, section: Section<N>, cfg: IntegratorConfig, t_return: f64) -> Self {
        Self {
            field,
            section,
            cfg,
            t_return,
            skip: if N > 2 { 1 } else { 0 },
        }
    }

    /// `None` when the orbit escapes, stalls or fails to come back in time.
    pub fn sample(&self, r: f64) -> Option<ReturnSample> {
        let t_limit = self.t_return * (self.skip + 1) as f64;
        let mut flow = SectionFlow::new(self.field, self.section.point_at(r), self.section, &self.cfg, t_limit);
        let mut r_from = r;
        let mut t_from = 0.0;
        for _ in 0..self.skip {
            let c = flow.next_crossing().ok()??;
            r_from = c.r;
            t_from = c.t;
        }
        let c = flow.next_crossing().ok()??;
        if c.t - t_from > self.t_return {
            return None;
        }
        Some(ReturnSample {
            r,
            r_from,
            r_to: c.r,
            period: c.t - t_from,
        })
    }

    pub fn displacement(&self, r: f64) -> Option<f64> {
        self.sample(r).map(|s| s.displacement())
    }
}
