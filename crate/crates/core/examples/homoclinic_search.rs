//! Locate a secondary homoclinic value of mu2 by bisection on cycle existence.

use bt_control::normal_form::{NfConstants, UnfoldingPoint};
use bt_control::sets::{homoclinic_gamma_target, Branch};
use bt_control::sim::{locate_homoclinic_mu2, HomoclinicSearch};

fn main() -> bt_control::Result<()> {
    let k = NfConstants::new(1.0, 1.0)?;
    let mu = UnfoldingPoint::new(0.001, -0.1, -0.122, 0.1);
    for b in [Branch::Plus, Branch::Minus] {
        match homoclinic_gamma_target(&mu, &k, b) {
            Ok(v) => println!("estimate ({b:?}): mu2 = {v:.6}"),
            Err(e) => println!("estimate ({b:?}): {e}"),
        }
    }
    let found = locate_homoclinic_mu2(&mu, &k, Branch::Minus, (-0.13, -0.118), &HomoclinicSearch::default())?;
    println!("simulated loop around the lower equilibrium: mu2 = {found:.6}");
    Ok(())
}
