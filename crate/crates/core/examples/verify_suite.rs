//! Run one check suite and print its report.

use bt_control::verify::Suite;

fn main() -> bt_control::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "gamma-branch".into());
    let rep = name.parse::<Suite>()?.run()?;
    for c in &rep.checks {
        println!("{:30} measured {:?} predicted {} pass {}", c.name, c.measured, c.predicted, c.pass);
    }
    println!("{}: {}/{} (need {})", rep.suite, rep.passed, rep.checks.len(), rep.required);
    Ok(())
}
