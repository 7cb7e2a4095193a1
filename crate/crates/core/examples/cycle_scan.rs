//! Return-map scan for limit cycles around the origin, compared with the small-amplitude estimate.

use bt_control::normal_form::{NfConstants, UnfoldingPoint};
use bt_control::sets::primary_cycle_estimates;
use bt_control::sim::{planar_section, scan_cycles, IntegratorConfig, NormalFormField, ScanOptions};

fn main() -> bt_control::Result<()> {
    let k = NfConstants::new(1.0, -1.0)?;
    for mu2 in [0.001, 0.002, 0.004] {
        let mu = UnfoldingPoint::new(0.0, 0.01, mu2, 0.0);
        let est = primary_cycle_estimates(&mu, &k)?;
        let field = NormalFormField::new(mu, k);
        let opts = ScanOptions {
            r_min: 0.01 * est.radius,
            r_max: 3.0 * est.radius,
            points: 60,
            t_return: 20.0 * std::f64::consts::TAU / est.angular_frequency,
        };
        let cycles = scan_cycles(&field, &planar_section(&field, [0.0, 0.0]), &opts, &IntegratorConfig::with_horizon(1e4))?;
        for c in cycles {
            println!(
                "mu2 = {mu2}: radius {:.5} (estimate {:.5}), frequency {:.5} (estimate {:.5}), stable {}",
                c.mean_radius, est.radius, c.angular_frequency, est.angular_frequency, c.stable
            );
        }
    }
    Ok(())
}
