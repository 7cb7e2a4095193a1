//! Feedback gains for a cubic plant: normal-form image, set residuals and closed-loop equilibria.

use bt_control::feedback::{
    controllable_sets, map_controllable, uncontrollable_equilibria, uncontrollable_sets, ControllableGains, CubicPlant,
    UncontrollableGains,
};

fn main() -> bt_control::Result<()> {
    let plant = CubicPlant::preset("all-ones")?;
    let g = ControllableGains::new(0.0, -0.02, 0.01, 0.05);
    println!("controllable gains map to {:?}", map_controllable(&g, &plant)?);
    for r in controllable_sets(&g, &plant)? {
        println!("  {:10} {:+.4e} defined {}", r.name, r.value, r.defined);
    }

    let n = UncontrollableGains::new(0.1, 0.1, -0.5);
    println!("uncontrollable gains: equilibria {:?}", uncontrollable_equilibria(&n)?);
    for r in uncontrollable_sets(&n)? {
        println!("  {:10} {:+.4e} defined {}", r.name, r.value, r.defined);
    }
    Ok(())
}
