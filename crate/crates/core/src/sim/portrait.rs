//! Attractor inventories from sampled initial conditions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cycles::{find_limit_cycle, scan_cycles, CycleRecord, ScanOptions};
use super::integrator::{integrate, Dopri5, IntegratorConfig, Reversed, VectorField};
use super::models::{FixedPoint, Model};
use super::section::{norm, sub};
use crate::error::{Error, Result};
use crate::normal_form::EquilibriumKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Target {
    Equilibrium(usize),
    Cycle(usize),
    Escape,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcOutcome {
    pub ic: Vec<f64>,
    pub forward: Target,
    /// Limit set under reversed time, when requested.
    pub backward: Option<Target>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitSummary {
    pub equilibria: Vec<FixedPoint>,
    pub cycles: Vec<CycleRecord>,
    pub outcomes: Vec<IcOutcome>,
}

impl PortraitSummary {
    pub fn stable_cycles(&self) -> usize {
        self.cycles.iter().filter(|c| c.stable).count()
    }

    pub fn unstable_cycles(&self) -> usize {
        self.cycles.len() - self.stable_cycles()
    }

    pub fn count_kind(&self, pred: impl Fn(EquilibriumKind) -> bool) -> usize {
        self.equilibria.iter().filter(|e| pred(e.kind)).count()
    }

    pub fn attracting_equilibria(&self) -> usize {
        self.count_kind(|k| k.is_attracting())
    }

    /// Indices of equilibria reached forward from some initial condition.
    pub fn reached_equilibria(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .outcomes
            .iter()
            .filter_map(|o| match o.forward {
                Target::Equilibrium(i) => Some(i),
                _ => None,
            })
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Cycle scan around every non-saddle equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumScan {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub t_return: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PortraitOptions {
    pub integrator: IntegratorConfig,
    /// Also integrate each initial condition backward (planar fields only make sense here).
    pub backward: bool,
    pub scan: Option<EquilibriumScan>,
    /// Relative tolerance for identifying duplicate cycles.
    pub dedup_tol: f64,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig::default(),
            backward: true,
            scan: None,
            dedup_tol: 1e-4,
        }
    }
}

enum Settled {
    Point(usize),
    Cycle(CycleRecord),
    Escape,
    Unresolved,
}

fn nearest(fps: &[FixedPoint], s: &[f64]) -> Option<(usize, f64)> {
    fps.iter()
        .enumerate()
        .map(|(i, p)| {
            let d = p.location.iter().zip(s).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            (i, d)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

fn settle<const N: usize, F: VectorField<N>>(
    field: &F,
    fps: &[FixedPoint],
    scale: f64,
    ic: [f64; N],
    cfg: &IntegratorConfig,
) -> Result<Settled> {
    let escaped = |e: &Error| matches!(e, Error::Divergence { .. } | Error::StepFailure { .. });
    let mut st = Dopri5::new(field, ic, *cfg);
    if let Err(e) = st.advance_to(cfg.transient_skip) {
        return if escaped(&e) { Ok(Settled::Escape) } else { Err(e) };
    }
    let s0 = st.state();
    let w = (0.2 * cfg.t_max).max(1.0);
    let wc = IntegratorConfig { t_max: w, transient_skip: 0.0, ..*cfg };
    let tr = match integrate(field, s0, &wc, Some(w / 2000.0)) {
        Ok(t) => t,
        Err(e) if escaped(&e) => return Ok(Settled::Escape),
        Err(e) => return Err(e),
    };
    let s1 = *tr.states.last().unwrap();
    if norm(&s1) > 1e3 * scale.max(1.0) {
        return Ok(Settled::Escape);
    }
    if let Some((i, d1)) = nearest(fps, &s1) {
        let d0 = nearest(fps, &s0).map_or(f64::INFINITY, |(j, d)| if j == i { d } else { f64::INFINITY });
        let tiny = 1e-7 * scale.max(1e-9);
        let small = 1e-2 * scale.max(1e-9);
        if d1 <= tiny || (d1 <= small && d1 <= 0.5 * d0) {
            return Ok(Settled::Point(i));
        }
    }
    let n = tr.states.len() as f64;
    let c: [f64; N] = std::array::from_fn(|i| tr.states.iter().map(|s| s[i]).sum::<f64>() / n);
    let spread = tr.states.iter().map(|s| norm(&sub(s, &c))).fold(0.0, f64::max);
    if spread <= 1e-9 * (1.0 + norm(&c)) {
        return Ok(Settled::Unresolved);
    }
    let cc = IntegratorConfig {
        t_max: cfg.t_max,
        transient_skip: 0.0,
        ..*cfg
    };
    match find_limit_cycle(field, s1, None, &cc) {
        Ok(cyc) => Ok(Settled::Cycle(cyc)),
        Err(Error::NoCycleFound(_)) => Ok(Settled::Unresolved),
        Err(e) if escaped(&e) => Ok(Settled::Escape),
        Err(e) => Err(e),
    }
}

fn index_cycle(cycles: &mut Vec<CycleRecord>, c: CycleRecord, tol: f64) -> usize {
    if let Some(i) = cycles.iter().position(|o| o.same_orbit(&c, tol) && o.stable == c.stable) {
        return i;
    }
    cycles.push(c);
    cycles.len() - 1
}

fn to_target(s: Settled, cycles: &mut Vec<CycleRecord>, tol: f64, stable: bool) -> Target {
    match s {
        Settled::Point(i) => Target::Equilibrium(i),
        Settled::Cycle(mut c) => {
            c.stable = stable;
            if !stable {
                c.orbit.reverse();
                c.multiplier = 1.0 / c.multiplier;
            }
            Target::Cycle(index_cycle(cycles, c, tol))
        }
        Settled::Escape => Target::Escape,
        Settled::Unresolved => Target::Unresolved,
    }
}

fn system_scale(fps: &[FixedPoint], ics: &[Vec<f64>]) -> f64 {
    let a = fps.iter().map(|p| p.location.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let b = ics.iter().map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max);
    a.max(b).max(1e-6)
}

/// Equilibria, cycles and per-initial-condition limit sets of `model`.
pub fn classify_portrait<const N: usize, M: Model<N>>(
    model: &M,
    ics: &[[f64; N]],
    opts: &PortraitOptions,
) -> Result<PortraitSummary> {
    opts.integrator.validate()?;
    let fps = model.fixed_points()?;
    let ic_vecs: Vec<Vec<f64>> = ics.iter().map(|s| s.to_vec()).collect();
    let scale = system_scale(&fps, &ic_vecs);
    let rev = Reversed(model);
    let settled: Vec<(Settled, Option<Settled>)> = ics
        .par_iter()
        .map(|ic| {
            let f = settle(model, &fps, scale, *ic, &opts.integrator)?;
            let b = if opts.backward {
                Some(settle(&rev, &fps, scale, *ic, &opts.integrator)?)
            } else {
                None
            };
            Ok((f, b))
        })
        .collect::<Result<_>>()?;
    let mut cycles = Vec::new();
    let mut outcomes = Vec::with_capacity(ics.len());
    for (ic, (f, b)) in ics.iter().zip(settled) {
        let forward = to_target(f, &mut cycles, opts.dedup_tol, true);
        let backward = b.map(|b| to_target(b, &mut cycles, opts.dedup_tol, false));
        outcomes.push(IcOutcome {
            ic: ic.to_vec(),
            forward,
            backward,
        });
    }
    if let Some(sc) = opts.scan {
        for fp in fps.iter().filter(|p| p.kind != EquilibriumKind::Saddle) {
            let center: [f64; N] = std::array::from_fn(|i| fp.location[i]);
            let base = model.section_at(center);
            let sections = if fp.is_focus() { vec![base] } else { vec![base, base.flipped()] };
            for sec in sections {
                let so = ScanOptions {
                    r_min: sc.r_min,
                    r_max: sc.r_max,
                    points: sc.points,
                    t_return: sc.t_return,
                };
                for c in scan_cycles(model, &sec, &so, &opts.integrator)? {
                    if !cycles.iter().any(|o: &CycleRecord| o.same_orbit(&c, 1e-3)) {
                        cycles.push(c);
                    }
                }
            }
        }
    }
    Ok(PortraitSummary {
        equilibria: fps,
        cycles,
        outcomes,
    })
}

/// Uniform `n x n` grid of initial conditions on a box.
pub fn ic_grid(x: (f64, f64), y: (f64, f64), n: usize) -> Vec<[f64; 2]> {
    let n = n.max(1);
    let step = |(a, b): (f64, f64), i: usize| if n == 1 { 0.5 * (a + b) } else { a + (b - a) * i as f64 / (n - 1) as f64 };
    (0..n)
        .flat_map(|i| (0..n).map(move |j| [step(x, i), step(y, j)]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::{NfConstants, UnfoldingPoint};
    use crate::sim::models::NormalFormField;

    #[test]
    fn trivial_portrait() {
        let m = NormalFormField::new(UnfoldingPoint::ZERO, NfConstants::new(1.0, 1.0).unwrap());
        let opts = PortraitOptions { backward: false, ..Default::default() };
        let p = classify_portrait(&m, &[[0.0, 0.0]], &opts).unwrap();
        assert_eq!(p.equilibria.len(), 1);
        assert!(p.cycles.is_empty());
        assert_eq!(p.outcomes[0].forward, Target::Equilibrium(0));
    }

    #[test]
    fn supercritical_primary_cycle() {
        let k = NfConstants::new(1.0, -1.0).unwrap();
        let m = NormalFormField::new(UnfoldingPoint::new(0.0, 0.01, 0.003, 0.0), k);
        let opts = PortraitOptions {
            integrator: IntegratorConfig::with_horizon(3e3),
            backward: false,
            ..Default::default()
        };
        let p = classify_portrait(&m, &[[0.0, 0.02], [0.0, 0.2]], &opts).unwrap();
        assert_eq!(p.cycles.len(), 1, "{:?}", p.outcomes);
        assert!(p.cycles[0].stable);
        assert!(p.outcomes.iter().all(|o| o.forward == Target::Cycle(0)));
    }

    #[test]
    fn grid_shape() {
        let g = ic_grid((-1.0, 1.0), (0.0, 2.0), 3);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], [-1.0, 0.0]);
        assert_eq!(g[8], [1.0, 2.0]);
    }
}
