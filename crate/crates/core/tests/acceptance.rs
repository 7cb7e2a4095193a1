//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits 1 if any fails.

use std::time::{Duration, Instant};

use bt_control::chua::{chua_field, chua_jacobian, ChuaParams};
use bt_control::feedback::{ControllableGains, CubicPlant, CubicSystem, UncontrollableGains};
use bt_control::normal_form::{
    equilibria, equilibrium_polynomial, jacobian, nullcline_x, routh_coefficients, secondary_equilibria, trace_det, vector_field,
    NfConstants, State2, UnfoldingPoint,
};
use bt_control::poly::real_roots;
use bt_control::sets::constants::*;
use bt_control::sim::VectorField;
use bt_control::verify::{
    bautin_suite, gamma_branch_suite, homoclinic_suite, hopf_radius_suite, regions_chua_suite, regions_uncontrollable_suite, SuiteReport,
};
use bt_control::Error;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

struct Outcome {
    pass: bool,
    summary: String,
}

fn suite_outcome(r: bt_control::Result<SuiteReport>, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    match r {
        Ok(rep) => {
            let failed: Vec<String> = rep
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| match c.measured {
                    Some(m) => format!("{} measured {m:.6e} vs {:.6e}", c.name, c.predicted),
                    None => format!("{}: {}", c.name, c.detail),
                })
                .collect();
            let in_time = limit.is_none_or(|l| elapsed <= l);
            let mut summary = format!("{}/{} checks (need {}), {:.1} s", rep.passed, rep.checks.len(), rep.required, elapsed.as_secs_f64());
            if let Some(l) = limit {
                summary.push_str(&format!(" (limit {} s)", l.as_secs()));
            }
            if !failed.is_empty() {
                summary.push_str(&format!("; failing: {}", failed.join("; ")));
            }
            Outcome {
                pass: rep.pass && in_time,
                summary,
            }
        }
        Err(e) => Outcome {
            pass: false,
            summary: format!("error: {e}"),
        },
    }
}

fn timed(f: impl FnOnce() -> bt_control::Result<SuiteReport>, limit: Option<Duration>) -> Outcome {
    let t0 = Instant::now();
    let r = f();
    suite_outcome(r, t0.elapsed(), limit)
}

// ---------- criterion 7: property suites ----------

fn runner() -> TestRunner {
    let cfg = Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(cfg, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn nonzero(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v })
}

fn mu_strategy() -> impl Strategy<Value = UnfoldingPoint> {
    (-0.2..0.2f64, -0.2..0.2f64, -0.2..0.2f64, -0.2..0.2f64).prop_map(|(a, b, c, d)| UnfoldingPoint::new(a, b, c, d))
}

fn k_strategy() -> impl Strategy<Value = NfConstants> {
    (nonzero(0.5, 2.0), nonzero(0.5, 2.0)).prop_map(|(a1, b0)| NfConstants::new(a1, b0).unwrap())
}

fn state() -> impl Strategy<Value = [f64; 2]> {
    [-1.0..1.0f64, -1.0..1.0f64]
}

// the field written out again, term by term
fn field_oracle(s: [f64; 2], m: &UnfoldingPoint, k: &NfConstants) -> [f64; 2] {
    let [x, y] = s;
    [
        m.mu0 + m.mu1 * y + m.mu2 * x + m.mu3 * x * y + k.a1 * y * y * y + k.b0 * x * y * y,
        -x + m.mu2 * y + m.mu3 * y * y + k.b0 * y * y * y,
    ]
}

fn fd_jacobian<const N: usize>(f: impl Fn(&[f64; N]) -> [f64; N], s: &[f64; N]) -> [[f64; N]; N] {
    let mut j = [[0.0; N]; N];
    for c in 0..N {
        let h = 1e-5 * (1.0 + s[c].abs());
        let mut p = *s;
        let mut q = *s;
        p[c] += h;
        q[c] -= h;
        let (fp, fq) = (f(&p), f(&q));
        for r in 0..N {
            j[r][c] = (fp[r] - fq[r]) / (2.0 * h);
        }
    }
    j
}

fn rel_matrix_err<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> f64 {
    let scale = a.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn prop_symmetry() -> Result<(), String> {
    runner()
        .run(&(mu_strategy(), k_strategy(), state()), |(mu, k, s)| {
            let mirrored = UnfoldingPoint::new(-mu.mu0, mu.mu1, mu.mu2, -mu.mu3);
            let f = vector_field(State2::new(s[0], s[1]), &mu, &k);
            let g = vector_field(State2::new(-s[0], -s[1]), &mirrored, &k);
            let o = field_oracle(s, &mu, &k);
            for i in 0..2 {
                check((f[i] + g[i]).abs() <= 1e-14, || format!("f(-s; mu') != -f(s; mu): {f:?} {g:?}"))?;
                check((f[i] - o[i]).abs() <= 1e-14, || format!("field {f:?} vs oracle {o:?}"))?;
            }
            let eq = equilibria(&mu, &k).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let em = equilibria(&mirrored, &k).map_err(|e| TestCaseError::fail(e.to_string()))?;
            check(eq.len() == em.len(), || format!("equilibrium counts {} vs {} at {mu:?}", eq.len(), em.len()))?;
            // sorted by y, so the mirror image comes in reverse order
            for (p, q) in eq.iter().zip(em.iter().rev()) {
                let d = (p.location.x + q.location.x).abs().max((p.location.y + q.location.y).abs());
                check(d <= 1e-8, || format!("equilibria not mirrored: {:?} {:?}", p.location, q.location))?;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn prop_jacobians() -> Result<(), String> {
    runner()
        .run(&(mu_strategy(), k_strategy(), state()), |(mu, k, s)| {
            let j = jacobian(State2::new(s[0], s[1]), &mu, &k);
            let fd = fd_jacobian(|p: &[f64; 2]| field_oracle(*p, &mu, &k), &s);
            let e = rel_matrix_err(&j, &fd);
            check(e < 1e-6, || format!("normal form jacobian error {e:.3e}"))
        })
        .map_err(|e| format!("normal form: {e}"))?;
    runner()
        .run(
            &(
                0.3..1.5f64,
                0.5..2.0f64,
                [-0.05..0.05f64, -0.05..0.05f64, -0.05..0.05f64, -0.5..0.5f64],
                [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64],
            ),
            |(alpha, a, g, s)| {
                let p = ChuaParams::bt(alpha, a, g);
                let j = chua_jacobian(&s, &p);
                let fd = fd_jacobian(|q: &[f64; 3]| chua_field(q, &p), &s);
                let e = rel_matrix_err(&j, &fd);
                check(e < 1e-6, || format!("chua jacobian error {e:.3e}"))
            },
        )
        .map_err(|e| format!("chua: {e}"))?;
    let plants = ["all-ones", "alternating"];
    runner()
        .run(
            &(0..2usize, [-0.3..0.3f64, -0.3..0.3f64, -0.3..0.3f64, -0.3..0.3f64], any::<bool>(), state()),
            |(pi, g, controllable, s)| {
                let plant = CubicPlant::preset(plants[pi]).map_err(|e| TestCaseError::fail(e.to_string()))?;
                let sys = if controllable {
                    CubicSystem::controllable(plant, ControllableGains::new(g[0], g[1], g[2], g[3]))
                } else {
                    CubicSystem::uncontrollable(plant, UncontrollableGains::new(g[0], g[1], g[2]))
                };
                let j = sys.jacobian(&s);
                let fd = fd_jacobian(|q: &[f64; 2]| sys.eval(q), &s);
                let e = rel_matrix_err(&j, &fd);
                check(e < 1e-6, || format!("plant jacobian error {e:.3e}"))
            },
        )
        .map_err(|e| format!("plant: {e}"))
}

fn prop_routh() -> Result<(), String> {
    runner()
        .run(&(mu_strategy(), k_strategy(), -1.0..1.0f64), |(mu, k, y0)| {
            let x0 = mu.mu2 * y0 + mu.mu3 * y0 * y0 + k.b0 * y0 * y0 * y0;
            let (tr, det) = trace_det(&jacobian(State2::new(x0, y0), &mu, &k));
            let (d1, d2) = routh_coefficients(y0, &mu, &k);
            check((d2 - det).abs() < 1e-9 * det.abs().max(1.0), || format!("d2 {d2} vs det {det}"))?;
            check((d1 - tr).abs() < 1e-9 * tr.abs().max(1.0), || format!("d1 {d1} vs trace {tr}"))?;
            check((nullcline_x(y0, &mu, &k) - x0).abs() < 1e-15, || "nullcline".to_string())
        })
        .map_err(|e| e.to_string())
}

fn prop_quintic() -> Result<(), String> {
    runner()
        .run(&(mu_strategy(), k_strategy()), |(mu, k)| {
            let c = equilibrium_polynomial(&mu, &k);
            // coefficients of the quintic written out independently
            let want = [
                mu.mu0,
                mu.mu1 + mu.mu2 * mu.mu2,
                2.0 * mu.mu2 * mu.mu3,
                2.0 * k.b0 * mu.mu2 + mu.mu3 * mu.mu3 + k.a1,
                2.0 * k.b0 * mu.mu3,
                k.b0 * k.b0,
            ];
            check(c.len() == 6, || format!("degree {}", c.len() - 1))?;
            for (a, b) in c.iter().zip(&want) {
                check((a - b).abs() < 1e-15, || format!("coefficients {c:?} vs {want:?}"))?;
            }
            let roots = real_roots(&c).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let lead = want[5];
            let bound = 1.0 + want[..5].iter().map(|v| (v / lead).abs()).fold(0.0, f64::max);
            let n = 40_000;
            let mut prev = (-bound, horner(&want, -bound));
            for i in 1..=n {
                let x = -bound + 2.0 * bound * i as f64 / n as f64;
                let v = horner(&want, x);
                if v == 0.0 || (v > 0.0) != (prev.1 > 0.0) {
                    let (lo, hi) = (prev.0, x);
                    let slack = 1e-9 * bound;
                    check(roots.iter().any(|r| r.value >= lo - slack && r.value <= hi + slack), || {
                        format!("sign change in [{lo}, {hi}] without a reported root; roots {roots:?}")
                    })?;
                }
                prev = (x, v);
            }
            for r in &roots {
                let scale = want.iter().enumerate().map(|(i, a)| (a * r.value.powi(i as i32)).abs()).sum::<f64>();
                check(horner(&want, r.value).abs() <= 1e-8 * scale.max(1e-300), || format!("spurious root {r:?}"))?;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn prop_antisymmetry() -> Result<(), String> {
    runner()
        .run(&(-0.2..0.2f64, -0.2..0.2f64, k_strategy()), |(mu1, mu2, k)| {
            let mu = UnfoldingPoint::new(0.0, mu1, mu2, 0.0);
            match secondary_equilibria(&mu, &k) {
                Ok((p, m)) => {
                    check((p.x + m.x).abs() < 1e-15 && (p.y + m.y).abs() < 1e-15, || format!("E+ {p:?} E- {m:?}"))?;
                }
                Err(Error::NotBifurcated { .. }) | Err(Error::DegenerateDenominator(_)) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
            let eq = equilibria(&mu, &k).map_err(|e| TestCaseError::fail(e.to_string()))?;
            for (a, b) in eq.iter().zip(eq.iter().rev()) {
                check(
                    (a.location.x + b.location.x).abs() < 1e-9 && (a.location.y + b.location.y).abs() < 1e-9,
                    || format!("equilibria not symmetric: {:?}", eq.iter().map(|e| e.location).collect::<Vec<_>>()),
                )?;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn criterion_7() -> Outcome {
    let parts: [(&str, fn() -> Result<(), String>); 5] = [
        ("Z2 symmetry", prop_symmetry),
        ("jacobians vs finite differences", prop_jacobians),
        ("d2 = det", prop_routh),
        ("quintic roots vs scan", prop_quintic),
        ("E+- antisymmetry", prop_antisymmetry),
    ];
    let mut failed = Vec::new();
    for (name, f) in parts {
        if let Err(e) = f() {
            failed.push(format!("{name}: {e}"));
        }
    }
    Outcome {
        pass: failed.is_empty(),
        summary: if failed.is_empty() {
            "5 property suites, 1000 draws each".into()
        } else {
            failed.join("; ")
        },
    }
}

// ---------- criterion 8: constants ----------

fn newton(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, mut x: f64) -> f64 {
    for _ in 0..100 {
        let dx = f(x) / df(x);
        x -= dx;
        if dx.abs() < 1e-17 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

struct LoopConstants {
    p0: f64,
    q0: f64,
    x_amp: f64,
    shift: f64,
    gamma31: f64,
    gamma23: f64,
}

// scaled Lambda loop, energy U(y) = y^2/2 - y^4/4 + y/10 at the saddle level
fn loop_constants() -> LoopConstants {
    let u = |y: f64| y * y / 2.0 - y.powi(4) / 4.0 + y / 10.0;
    let du = |y: f64| y - y.powi(3) + 0.1;
    let ys = newton(|y| y.powi(3) - y - 0.1, |y| 3.0 * y * y - 1.0, -1.0);
    let level = u(ys);
    let yt = newton(|y| u(y) - level, du, 0.5);
    let y3 = newton(|y| u(y) - level, du, 1.4);
    let p0 = (ys - yt) / 2.0;
    let q0 = (ys + yt) / 2.0;
    // I_k = int_ys^yt y^k 2 sqrt(2 (U(ys) - U(y))) dy, with y = yt - (yt - ys) s^2
    let len = yt - ys;
    let moment = |k: i32| {
        simpson(
            |s| {
                let y = yt - len * s * s;
                let w = 2.0 * (2.0 * (level - u(y))).max(0.0).sqrt();
                y.powi(k) * w * 2.0 * len * s
            },
            0.0,
            1.0,
            20_000,
        )
    };
    let (i0, i1, i2) = (moment(0), moment(1), moment(2));
    LoopConstants {
        p0,
        q0,
        x_amp: p0 * p0 / 2f64.sqrt(),
        shift: (q0 - y3) / p0,
        gamma31: -4.0 * i2 / (3.0 * i1),
        gamma23: -3.0 * i1 / (2.0 * i0),
    }
}

/// Half a unit in the tenth significant digit of `reference`.
fn ten_digits(value: f64, reference: f64) -> bool {
    let e = reference.abs().log10().floor();
    (value - reference).abs() <= 0.5 * 10f64.powf(e - 9.0)
}

fn criterion_8() -> Outcome {
    let lc = loop_constants();
    let items: Vec<(&str, f64, f64)> = vec![
        ("9 sqrt2 pi / 32", GAMMA_HMC, 9.0 * 2f64.sqrt() * std::f64::consts::PI / 32.0),
        ("10^(2/3)", TEN_POW_TWO_THIRDS, (2.0 / 3.0 * 10f64.ln()).exp()),
        ("loop p0", LAMBDA_P0, lc.p0.abs()),
        ("loop q0", LAMBDA_Q0, lc.q0.abs()),
        ("loop x amplitude", LAMBDA_X_AMP, lc.x_amp),
        ("loop shift", LAMBDA_SHIFT, lc.shift),
        ("gamma31", LAMBDA_G31, lc.gamma31),
        ("gamma23", LAMBDA_G23, lc.gamma23),
        ("b0 / (10 mu3) coefficient ratio", LAMBDA_B0 / (10.0 * LAMBDA_MU3), lc.gamma31),
        ("mu3 / (mu2 10^(1/3)) coefficient ratio", LAMBDA_MU3 / (LAMBDA_MU2 * 10f64.cbrt()), lc.gamma23),
    ];
    let bad: Vec<String> = items
        .iter()
        .filter(|(_, v, r)| !ten_digits(*v, *r))
        .map(|(n, v, r)| format!("{n}: {v:.12} vs {r:.12} (rel {:.1e})", ((v - r) / r).abs()))
        .collect();
    Outcome {
        pass: bad.is_empty(),
        summary: format!(
            "{}/{} constants to 10 significant digits{}",
            items.len() - bad.len(),
            items.len(),
            if bad.is_empty() { String::new() } else { format!("; off: {}", bad.join("; ")) }
        ),
    }
}

fn main() {
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome>)> = vec![
        ("primary Hopf radius and frequency", Box::new(|| timed(hopf_radius_suite, Some(Duration::from_secs(30))))),
        ("homoclinic set on the symmetric slice", Box::new(|| timed(homoclinic_suite, Some(Duration::from_secs(120))))),
        ("Gamma-branch reference point", Box::new(|| timed(gamma_branch_suite, None))),
        ("Bautin cycle counts", Box::new(|| timed(bautin_suite, None))),
        ("uncontrollable design regions", Box::new(|| timed(regions_uncontrollable_suite, None))),
        ("Chua regions (a)-(h)", Box::new(|| timed(regions_chua_suite, Some(Duration::from_secs(600))))),
        ("equivariance and oracle properties", Box::new(criterion_7)),
        ("constant accuracy", Box::new(criterion_8)),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!("acceptance {} {}: {} ({})", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.summary);
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
