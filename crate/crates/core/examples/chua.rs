//! Controlled Chua circuit: Bogdanov-Takens check, normal-form image and one simulated region.

use bt_control::chua::{bt_condition, chua_sets_specialized, chua_to_unfolding, region_scenarios, run_scenario, ChuaParams};

fn main() -> bt_control::Result<()> {
    let p = ChuaParams::bt(0.8, 1.0, [0.0, -0.01, -0.0075, 0.0]);
    println!("BT condition holds: {}", bt_condition(&p).holds);
    let (mu, k) = chua_to_unfolding(&p)?;
    println!("mu = {:?}, a1 = {:.4}, b0 = {:.4}", mu, k.a1, k.b0);
    for r in chua_sets_specialized(-0.01, -0.0075)? {
        println!("  {:8} {:+.4e}", r.name, r.value);
    }

    let sc = region_scenarios().into_iter().find(|s| s.name == "b").expect("region b");
    let (portrait, check) = run_scenario(&sc)?;
    println!("region b: {} cycles, matches expectation: {}", portrait.cycles.len(), check.matched);
    Ok(())
}
