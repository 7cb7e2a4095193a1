//! Sign-vector regions on a slice of the uncontrollable gain space, with simulated portraits.

use bt_control::atlas::{build_atlas, verify_atlas};
use bt_control::verify::{uncontrollable_expectations, uncontrollable_slice, uncontrollable_verify_options};

fn main() -> bt_control::Result<()> {
    let atlas = build_atlas(&uncontrollable_slice())?;
    println!("{} regions, {} boundaries", atlas.regions.len(), atlas.boundaries.len());
    let rep = verify_atlas(&atlas, &uncontrollable_expectations(), &uncontrollable_verify_options());
    for r in &rep.regions {
        println!(
            "region {:2} ({:?}) at {:?}: matched {:?}",
            r.region, r.expectation, r.point, r.matched
        );
    }
    Ok(())
}
