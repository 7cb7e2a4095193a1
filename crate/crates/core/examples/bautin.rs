//! Predicted and simulated cycle counts around a secondary equilibrium near a Bautin point.

use bt_control::normal_form::NfConstants;
use bt_control::sets::bautin_classify;
use bt_control::verify::{bautin_points, bautin_simulated_cycles};

fn main() -> bt_control::Result<()> {
    let k = NfConstants::new(1.0, 1.0)?;
    for p in bautin_points(&k)?.into_iter().filter(|p| p.t == 1.0) {
        let c = bautin_classify(&p.mu, &k)?;
        let sim = bautin_simulated_cycles(&p.mu, &k)?;
        let stab: Vec<&str> = sim.iter().map(|c| if c.stable { "stable" } else { "unstable" }).collect();
        println!("f = {:5}: predicted {}, simulated {} {:?}", p.f, c.plus.cycles, sim.len(), stab);
    }
    Ok(())
}
