//! Equilibria and bifurcation-set residuals of the normal form at one parameter point.

use bt_control::normal_form::{equilibria, NfConstants, UnfoldingPoint};
use bt_control::sets::{normal_form_sets, DEFAULT_SET_TOL};

fn main() -> bt_control::Result<()> {
    let k = NfConstants::new(1.0, 1.0)?;
    let mu = UnfoldingPoint::new(0.0, -0.05, 0.01, 0.02);

    for e in equilibria(&mu, &k)? {
        println!("equilibrium ({:+.5}, {:+.5})  {:?}", e.location.x, e.location.y, e.kind);
    }
    for r in normal_form_sets(&mu, &k) {
        if r.defined {
            println!("{:8} {:+.6e}  on set: {}", r.name, r.value, r.on_set(DEFAULT_SET_TOL));
        } else {
            println!("{:8} undefined", r.name);
        }
    }
    Ok(())
}
