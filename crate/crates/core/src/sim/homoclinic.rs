//! Homoclinic parameter values by bisection on cycle existence.

use serde::{Deserialize, Serialize};

use super::cycles::{find_limit_cycle_any, CycleRecord};
use super::integrator::IntegratorConfig;
use super::models::{Model, NormalFormField};
use crate::error::{Error, Result};
use crate::normal_form::{NfConstants, UnfoldingPoint};
use crate::sets::Branch;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HomoclinicSearch {
    pub integrator: IntegratorConfig,
    /// Final bracket width in `mu2`.
    pub tol: f64,
}

impl Default for HomoclinicSearch {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig::with_horizon(2e4),
            tol: 1e-6,
        }
    }
}

/// `max(1e3, 50 * 2 pi / omega)` with `omega` the leading frequency at `E±`.
pub fn period_blowup_threshold(mu: &UnfoldingPoint) -> f64 {
    let w2 = -mu.mu1 - mu.mu2 * mu.mu2;
    let omega = if w2 > 0.0 { (2.0 * w2).sqrt() } else { mu.mu1.abs().sqrt() };
    if omega > 0.0 {
        (50.0 * 2.0 * std::f64::consts::PI / omega).max(1e3)
    } else {
        1e3
    }
}

/// The cycle around `E±` at `mu`, if one exists below the period threshold
/// and does not wind around the middle (saddle) equilibrium.
pub fn secondary_cycle(
    mu: &UnfoldingPoint,
    k: &NfConstants,
    branch: Branch,
    cfg: &IntegratorConfig,
) -> Result<Option<CycleRecord>> {
    let field = NormalFormField::new(*mu, *k);
    let mut fps = field.fixed_points()?;
    if fps.len() < 3 {
        return Ok(None);
    }
    fps.sort_by(|a, b| a.location[1].total_cmp(&b.location[1]));
    let target = match branch {
        Branch::Plus => fps.last().unwrap(),
        Branch::Minus => fps.first().unwrap(),
    };
    let c = [target.location[0], target.location[1]];
    let saddles: Vec<[f64; 2]> = fps
        .iter()
        .filter(|p| !std::ptr::eq(*p, target))
        .map(|p| [p.location[0], p.location[1]])
        .collect();
    let spacing = saddles
        .iter()
        .map(|s| ((s[0] - c[0]).powi(2) + (s[1] - c[1]).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min);
    let seed = [c[0] + 1e-3 * spacing, c[1]];
    let cyc = match find_limit_cycle_any(&field, seed, Some(c), cfg) {
        Ok(cyc) => cyc,
        Err(Error::NoCycleFound(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let threshold = period_blowup_threshold(mu);
    if cyc.period >= threshold || saddles.iter().any(|s| cyc.encloses(*s)) || !cyc.encloses(c) {
        return Ok(None);
    }
    Ok(Some(cyc))
}

/// Bisects `mu2` in `bracket` on the existence of the cycle around `E±`; the
/// limit is the numerical homoclinic value. Other coefficients come from `template`.
pub fn locate_homoclinic_mu2(
    template: &UnfoldingPoint,
    k: &NfConstants,
    branch: Branch,
    bracket: (f64, f64),
    search: &HomoclinicSearch,
) -> Result<f64> {
    let exists = |mu2: f64| -> Result<bool> {
        Ok(secondary_cycle(&template.with_mu2(mu2), k, branch, &search.integrator)?.is_some())
    };
    let (mut lo, mut hi) = bracket;
    let e_lo = exists(lo)?;
    let e_hi = exists(hi)?;
    if e_lo == e_hi {
        return Err(Error::BracketInvalid(format!(
            "cycle existence is {e_lo} at both mu2 = {lo:.6e} and mu2 = {hi:.6e}"
        )));
    }
    while (hi - lo).abs() > search.tol {
        let mid = 0.5 * (lo + hi);
        if exists(mid)? == e_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
