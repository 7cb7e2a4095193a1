//! Integrate a few trajectories and classify the phase portrait.

use bt_control::normal_form::{NfConstants, UnfoldingPoint};
use bt_control::sim::{classify_portrait, integrate, IntegratorConfig, NormalFormField, PortraitOptions};

fn main() -> bt_control::Result<()> {
    // past the Hopf set with b0 < 0: a stable cycle around an unstable focus
    let k = NfConstants::new(1.0, -1.0)?;
    let mu = UnfoldingPoint::new(0.0, 0.01, 0.002, 0.0);
    let field = NormalFormField::new(mu, k);

    let tr = integrate(field, [0.05, 0.0], &IntegratorConfig::with_horizon(500.0), Some(50.0))?;
    for (t, s) in tr.t.iter().zip(&tr.states) {
        println!("t = {t:6.1}  x = {:+.5}  y = {:+.5}", s[0], s[1]);
    }

    let ics = [[0.01, 0.0], [0.2, 0.0]];
    let p = classify_portrait(&field, &ics, &PortraitOptions::default())?;
    for e in &p.equilibria {
        println!("equilibrium {:?} at {:?}", e.kind, e.location);
    }
    for c in &p.cycles {
        println!("cycle: period {:.3}, mean radius {:.4}, stable {}", c.period, c.mean_radius, c.stable);
    }
    Ok(())
}
