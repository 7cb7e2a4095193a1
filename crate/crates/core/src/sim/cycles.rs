//! Limit cycles from the return map.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrator::{integrate, Dopri5, IntegratorConfig, Reversed, VectorField};
use super::section::{norm, sub, ReturnMap, ReturnSample, Section, SectionFlow};
use crate::error::{Error, Result};
use crate::roots::brent;

/// Samples stored per cycle in [`CycleRecord::orbit`].
pub const ORBIT_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub period: f64,
    /// `max |y - y_center|` over one period.
    pub amplitude_y: f64,
    /// Time average of `|s - center|`.
    pub mean_radius: f64,
    pub angular_frequency: f64,
    pub stable: bool,
    pub section_point: Vec<f64>,
    pub center: Vec<f64>,
    /// Return-map slope at the fixed point.
    pub multiplier: f64,
    /// Distance between the section point and its image after one period.
    pub closure_error: f64,
    pub orbit: Vec<Vec<f64>>,
}

impl CycleRecord {
    /// Winding number of the `(x, y)` projection of the orbit about `p`.
    pub fn winding_about(&self, p: [f64; 2]) -> i32 {
        winding_number(self.orbit.iter().map(|s| [s[0], s[1]]), p)
    }

    pub fn encloses(&self, p: [f64; 2]) -> bool {
        self.winding_about(p) != 0
    }

    /// Centroid of the stored orbit samples.
    pub fn centroid(&self) -> Vec<f64> {
        let n = self.orbit.len().max(1) as f64;
        let dim = self.section_point.len();
        (0..dim)
            .map(|i| self.orbit.iter().map(|s| s[i]).sum::<f64>() / n)
            .collect()
    }

    /// Largest distance of an orbit sample from the centroid.
    pub fn extent(&self) -> f64 {
        let c = self.centroid();
        self.orbit
            .iter()
            .map(|s| s.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Distance from `p` to the closed polyline through the orbit samples.
    pub fn distance_to(&self, p: &[f64]) -> f64 {
        let n = self.orbit.len();
        (0..n)
            .map(|i| seg_dist(&self.orbit[i], &self.orbit[(i + 1) % n], p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Same closed orbit, up to relative tolerance `tol` on period and shape.
    /// Independent of where the two records were sectioned.
    pub fn same_orbit(&self, other: &CycleRecord, tol: f64) -> bool {
        let dp = (self.period - other.period).abs() <= tol * self.period.max(other.period);
        let scale = self.extent().max(other.extent()).max(1e-12);
        dp && self.distance_to(&other.section_point) <= 10.0 * tol * scale
            && other.distance_to(&self.section_point) <= 10.0 * tol * scale
    }
}

fn seg_dist(a: &[f64], b: &[f64], p: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let ap: Vec<f64> = a.iter().zip(p).map(|(x, y)| y - x).collect();
    let l2: f64 = ab.iter().map(|v| v * v).sum();
    let t = if l2 > 0.0 {
        (ab.iter().zip(&ap).map(|(u, v)| u * v).sum::<f64>() / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ab.iter().zip(&ap).map(|(u, v)| (v - t * u).powi(2)).sum::<f64>().sqrt()
}

/// Winding number of a closed polygon about `p`.
pub fn winding_number(poly: impl IntoIterator<Item = [f64; 2]>, p: [f64; 2]) -> i32 {
    let pts: Vec<[f64; 2]> = poly.into_iter().collect();
    if pts.len() < 3 {
        return 0;
    }
    let mut total = 0.0;
    for i in 0..pts.len() {
        let a = pts[i];
        let b = pts[(i + 1) % pts.len()];
        let a0 = (a[1] - p[1]).atan2(a[0] - p[0]);
        let a1 = (b[1] - p[1]).atan2(b[0] - p[0]);
        let mut d = a1 - a0;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i32
}

fn slope<const N: usize, F: VectorField<N>>(rm: &ReturnMap<'_, N, F>, r: f64) -> Option<f64> {
    let h = 1e-5 * r.max(1e-9);
    let a = rm.displacement(r - h)?;
    let b = rm.displacement(r + h)?;
    Some((b - a) / (2.0 * h))
}

/// Builds the record of the cycle through `section.point_at(r)`.
///
/// `known_stable` overrides the slope test (used when the cycle was reached by iteration).
pub fn cycle_record<const N: usize, F: VectorField<N>>(
    field: &F,
    section: &Section<N>,
    r: f64,
    cfg: &IntegratorConfig,
    t_return: f64,
    known_stable: Option<bool>,
) -> Result<CycleRecord> {
    let rm = ReturnMap::new(field, *section, *cfg, t_return);
    let mut start = section.point_at(r);
    if rm.skip > 0 {
        let mut flow = SectionFlow::new(field, start, *section, cfg, t_return * rm.skip as f64);
        for _ in 0..rm.skip {
            start = flow
                .next_crossing()?
                .ok_or_else(|| Error::NoCycleFound("no return while settling on the section".into()))?
                .state;
        }
    }
    let mut flow = SectionFlow::new(field, start, *section, cfg, t_return);
    let end = flow
        .next_crossing()?
        .ok_or_else(|| Error::NoCycleFound(format!("no return from r = {r:.6e}")))?;
    let period = end.t;
    let c = IntegratorConfig { t_max: period, transient_skip: 0.0, ..*cfg };
    let tr = integrate(field, start, &c, Some(period / ORBIT_SAMPLES as f64))?;
    let orbit: Vec<[f64; N]> = tr.states.into_iter().take(ORBIT_SAMPLES).collect();
    let center = section.center;
    let mean_radius = orbit.iter().map(|s| norm(&sub(s, &center))).sum::<f64>() / orbit.len() as f64;
    let amplitude_y = orbit.iter().map(|s| (s[1] - center[1]).abs()).fold(0.0, f64::max);
    let sl = slope(&rm, r);
    let multiplier = sl.map_or(f64::NAN, |d| 1.0 + d);
    let stable = match known_stable {
        Some(s) => s,
        None => sl.is_some_and(|d| d < 0.0),
    };
    Ok(CycleRecord {
        period,
        amplitude_y,
        mean_radius,
        angular_frequency: 2.0 * std::f64::consts::PI / period,
        stable,
        section_point: start.to_vec(),
        center: center.to_vec(),
        multiplier,
        closure_error: norm(&sub(&end.state, &start)),
        orbit: orbit.iter().map(|s| s.to_vec()).collect(),
    })
}

fn no_cycle(msg: impl Into<String>) -> Error {
    Error::NoCycleFound(msg.into())
}

/// Secant iteration on the displacement, kept inside `(0, 2 r0)`.
fn polish<const N: usize, F: VectorField<N>>(rm: &ReturnMap<'_, N, F>, r0: f64, r1: f64) -> Option<f64> {
    let (mut a, mut b) = (r0, r1);
    let mut da = rm.displacement(a)?;
    let mut db = rm.displacement(b)?;
    for _ in 0..40 {
        if db.abs() <= 1e-13 * b.max(1e-9) || (b - a).abs() <= 1e-12 * b {
            return Some(b);
        }
        if db == da {
            return Some(b);
        }
        let mut c = b - db * (b - a) / (db - da);
        let lim = 0.5 * b;
        c = c.clamp(b - lim, b + lim);
        a = b;
        da = db;
        b = c;
        db = rm.displacement(b)?;
    }
    (db.abs() <= 1e-10 * b.max(1e-9)).then_some(b)
}

/// Runs from `seed` past the transient and locks onto the attracting cycle it reaches.
///
/// The section passes through `center` (or, when absent, through the centroid
/// of the post-transient motion) and the current state.
pub fn find_limit_cycle<const N: usize, F: VectorField<N>>(
    field: &F,
    seed: [f64; N],
    center: Option<[f64; N]>,
    cfg: &IntegratorConfig,
) -> Result<CycleRecord> {
    cfg.validate()?;
    let mut st = Dopri5::new(field, seed, *cfg);
    match st.advance_to(cfg.transient_skip) {
        Ok(()) => {}
        Err(Error::Divergence { t } | Error::StepFailure { t }) => {
            return Err(no_cycle(format!("trajectory escaped at t = {t:.3}")))
        }
        Err(e) => return Err(e),
    }
    let mut t_used = cfg.transient_skip;
    let mut s1 = st.state();
    let c = match center {
        Some(c) => c,
        None => {
            let w = (0.2 * cfg.t_max).min(cfg.t_max - t_used).max(1.0);
            let wc = IntegratorConfig { t_max: w, transient_skip: 0.0, ..*cfg };
            let tr = integrate(field, s1, &wc, Some(w / 4000.0)).map_err(|e| match e {
                Error::Divergence { t } | Error::StepFailure { t } => {
                    no_cycle(format!("trajectory escaped at t = {:.3}", t + t_used))
                }
                e => e,
            })?;
            t_used += w;
            let n = tr.states.len() as f64;
            let c: [f64; N] = std::array::from_fn(|i| tr.states.iter().map(|s| s[i]).sum::<f64>() / n);
            let spread = tr.states.iter().map(|s| norm(&sub(s, &c))).fold(0.0, f64::max);
            if spread <= 1e-9 * (1.0 + norm(&c)) {
                return Err(no_cycle("trajectory settled on an equilibrium"));
            }
            s1 = *tr.states.last().unwrap();
            c
        }
    };
    if norm(&sub(&s1, &c)) <= 1e-12 {
        return Err(no_cycle("trajectory sits at the section center"));
    }
    let section = Section::through(field, c, s1);
    let remaining = (cfg.t_max - t_used).max(0.25 * cfg.t_max);
    let mut flow = SectionFlow::new(field, s1, section, cfg, remaining);
    let mut rs: Vec<f64> = Vec::new();
    let mut times: Vec<f64> = Vec::new();
    let mut converged = false;
    while rs.len() < 2000 {
        match flow.next_crossing() {
            Ok(Some(cr)) => {
                rs.push(cr.r);
                times.push(cr.t);
            }
            Ok(None) => break,
            Err(Error::Divergence { .. } | Error::StepFailure { .. }) => return Err(no_cycle("trajectory escaped")),
            Err(e) => return Err(e),
        }
        let k = rs.len();
        if k >= 3 && (rs[k - 1] - rs[k - 2]).abs() <= 1e-10 * rs[k - 1].max(1e-9) {
            converged = true;
            break;
        }
    }
    if rs.len() < 3 {
        return Err(no_cycle("no rotation about the section center"));
    }
    let k = rs.len();
    let r_last = rs[k - 1];
    let r0 = rs[0].max(r_last);
    if r_last <= 1e-6 * r0 {
        return Err(no_cycle("trajectory spirals into the center"));
    }
    // successive return times approach the period; use their spread for the return limit
    let t_ret = 4.0 * (times[k - 1] - times[k - 2]).max(1e-3);
    let rm = ReturnMap::new(field, section, *cfg, t_ret);
    let r_star = polish(&rm, rs[k - 2], r_last).unwrap_or(r_last);
    let disp = rm.displacement(r_star);
    if !converged && disp.is_none_or(|d| d.abs() > 1e-8 * r_star.max(1e-9)) {
        return Err(no_cycle("return map iteration did not settle"));
    }
    cycle_record(field, &section, r_star, cfg, t_ret, Some(true))
}

/// Forward search, then the time-reversed one for repelling cycles.
pub fn find_limit_cycle_any<const N: usize, F: VectorField<N>>(
    field: &F,
    seed: [f64; N],
    center: Option<[f64; N]>,
    cfg: &IntegratorConfig,
) -> Result<CycleRecord> {
    match find_limit_cycle(field, seed, center, cfg) {
        Ok(c) => Ok(c),
        Err(Error::NoCycleFound(fwd)) => {
            let rev = Reversed(field);
            let mut c = find_limit_cycle(&rev, seed, center, cfg).map_err(|e| match e {
                Error::NoCycleFound(bwd) => no_cycle(format!("forward: {fwd}; backward: {bwd}")),
                e => e,
            })?;
            c.stable = false;
            c.multiplier = 1.0 / c.multiplier;
            // the reversed orbit runs the other way; restore forward time order
            c.orbit.reverse();
            Ok(c)
        }
        Err(e) => Err(e),
    }
}

/// Settings for [`scan_cycles`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    /// Longest admissible time for one return.
    pub t_return: f64,
}

fn sample_all<const N: usize, F: VectorField<N> + Sync>(
    rm: &ReturnMap<'_, N, F>,
    rs: &[f64],
) -> Vec<(f64, Option<ReturnSample>)> {
    rs.par_iter().map(|&r| (r, rm.sample(r))).collect()
}

/// Every cycle crossing the section between `r_min` and `r_max`, found from sign
/// changes of the displacement `P(r) - r`.
pub fn scan_cycles<const N: usize, F: VectorField<N> + Sync>(
    field: &F,
    section: &Section<N>,
    opts: &ScanOptions,
    cfg: &IntegratorConfig,
) -> Result<Vec<CycleRecord>> {
    cfg.validate()?;
    if !(opts.r_min > 0.0 && opts.r_max > opts.r_min && opts.points >= 2) {
        return Err(Error::Config("scan needs 0 < r_min < r_max and at least 2 points".into()));
    }
    let rm = ReturnMap::new(field, *section, *cfg, opts.t_return);
    let ratio = (opts.r_max / opts.r_min).ln() / (opts.points - 1) as f64;
    let grid: Vec<f64> = (0..opts.points).map(|i| opts.r_min * (ratio * i as f64).exp()).collect();
    let mut samples = sample_all(&rm, &grid);

    // resolve the edge of the region where orbits return
    let mut extra = Vec::new();
    for w in samples.windows(2) {
        let ((ra, sa), (rb, sb)) = (w[0], w[1]);
        if sa.is_some() == sb.is_some() {
            continue;
        }
        let (mut lo, mut hi) = (ra, rb);
        let inside_lo = sa.is_some();
        for _ in 0..48 {
            let mid = 0.5 * (lo + hi);
            if rm.sample(mid).is_some() == inside_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (edge, toward) = if inside_lo { (hi, lo - ra) } else { (lo, rb - hi) };
        let sgn = if inside_lo { -1.0 } else { 1.0 };
        let span = toward.abs().max((rb - ra) * 1e-3);
        for k in 1..=10 {
            extra.push(edge + sgn * span * 10f64.powi(-k));
        }
    }
    samples.extend(sample_all(&rm, &extra));
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut roots: Vec<f64> = Vec::new();
    for w in samples.windows(2) {
        let (Some(a), Some(b)) = (w[0].1, w[1].1) else { continue };
        let (da, db) = (a.displacement(), b.displacement());
        if da == 0.0 {
            roots.push(a.r);
            continue;
        }
        if (da > 0.0) == (db > 0.0) {
            continue;
        }
        let f = |r: f64| {
            rm.displacement(r)
                .ok_or_else(|| Error::NoCycleFound("return lost inside a bracket".into()))
        };
        let Ok(r) = brent(f, a.r, b.r, 1e-13 * b.r, 200) else { continue };
        // reject jumps: the displacement must actually vanish
        let Some(d) = rm.displacement(r) else { continue };
        let scale = da.abs().min(db.abs()).max(1e-9 * r);
        if d.abs() > 1e-3 * scale && d.abs() > 1e-10 * r.max(1e-6) {
            continue;
        }
        if roots.last().is_none_or(|p| (r - p).abs() > 1e-7 * r) {
            roots.push(r);
        }
    }
    roots
        .into_par_iter()
        .map(|r| cycle_record(field, section, r, cfg, opts.t_return, None))
        .collect()
}
