//! Real-root isolation for small real polynomials.
//!
//! Roots are isolated by recursion on the derivative: between consecutive
//! real critical points a polynomial is monotone, so every simple root sits in
//! exactly one monotone interval and is found by bisection. Roots of even
//! multiplicity show up as critical points where the polynomial itself
//! vanishes to rounding. Coefficients are stored in ascending order.

use crate::error::{Error, Result};

/// A real root with its estimated multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: u32,
}

/// Evaluates `sum c[i] x^i` by Horner's rule.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Sum of |c[i] x^i|, the natural rounding scale of `eval(coeffs, x)`.
pub fn magnitude(coeffs: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
}

pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

fn trimmed(coeffs: &[f64]) -> &[f64] {
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1] == 0.0 {
        n -= 1;
    }
    &coeffs[..n]
}

/// Cauchy bound: every root satisfies |x| < 1 + max |c_i / c_n|.
pub fn cauchy_bound(coeffs: &[f64]) -> f64 {
    let c = trimmed(coeffs);
    if c.len() < 2 {
        return 1.0;
    }
    let lead = c[c.len() - 1].abs();
    1.0 + c[..c.len() - 1]
        .iter()
        .map(|v| v.abs() / lead)
        .fold(0.0, f64::max)
}

const REL_ZERO: f64 = 64.0 * f64::EPSILON;

fn bisect_monotone(coeffs: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(coeffs, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(coeffs, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    // closest endpoint to zero
    let (a, b) = (eval(coeffs, lo).abs(), eval(coeffs, hi).abs());
    if a <= b {
        lo
    } else {
        hi
    }
}

/// Distinct real roots (no multiplicities), sorted ascending.
fn distinct_roots(coeffs: &[f64]) -> Vec<f64> {
    let c = trimmed(coeffs);
    match c.len() {
        0 | 1 => return Vec::new(),
        2 => return vec![-c[0] / c[1]],
        _ => {}
    }
    let bound = cauchy_bound(c);
    let crit = distinct_roots(&derivative(c));
    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(-bound);
    knots.extend(crit.iter().copied().filter(|x| x.abs() < bound));
    knots.push(bound);

    let mut roots = Vec::new();
    let near_zero = |x: f64| eval(c, x).abs() <= REL_ZERO * magnitude(c, x);
    for (i, w) in knots.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        // interior knots are critical points: test for tangential roots
        if i > 0 && near_zero(a) {
            roots.push(a);
            continue;
        }
        let (fa, fb) = (eval(c, a), eval(c, b));
        if fa == 0.0 {
            roots.push(a);
        } else if (fa > 0.0) != (fb > 0.0) && fb != 0.0 {
            roots.push(bisect_monotone(c, a, b));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
    roots
}

/// All real roots of the polynomial with ascending coefficients `coeffs`.
///
/// Multiplicity is the number of consecutive derivatives that vanish to
/// rounding at the root. Fails if the polynomial is identically zero or a
/// located root does not reach a residual below `1e-12`.
pub fn real_roots(coeffs: &[f64]) -> Result<Vec<RealRoot>> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("polynomial coefficient"));
    }
    let c = trimmed(coeffs);
    if c.is_empty() {
        return Err(Error::SolverFailure("zero polynomial".into()));
    }
    let roots = distinct_roots(c);
    let mut out = Vec::with_capacity(roots.len());
    for r in roots {
        let res = eval(c, r).abs();
        if res > 1e-12 && res > 1e3 * REL_ZERO * magnitude(c, r) {
            return Err(Error::SolverFailure(format!(
                "root {r:.6e} has residual {res:.3e}"
            )));
        }
        out.push(RealRoot {
            value: r,
            multiplicity: multiplicity_at(c, r),
        });
    }
    Ok(out)
}

fn multiplicity_at(coeffs: &[f64], x: f64) -> u32 {
    let mut m = 1;
    let mut d = derivative(coeffs);
    while d.len() > 1 && eval(&d, x).abs() <= 1e3 * REL_ZERO * magnitude(&d, x) {
        m += 1;
        d = derivative(&d);
    }
    m
}
