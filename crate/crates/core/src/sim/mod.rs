//! Numerical oracle: integration, limit cycles and portraits.

pub mod integrator;
pub mod cycles;
pub mod homoclinic;
pub mod models;
pub mod section;
pub mod portrait;
pub mod export;

pub use integrator::{integrate, Dopri5, FnField, IntegratorConfig, Reversed, Trajectory, VectorField};
pub use cycles::{cycle_record, find_limit_cycle, find_limit_cycle_any, scan_cycles, winding_number, CycleRecord, ScanOptions};
pub use section::{planar_section, ReturnMap, Section, SectionFlow};
pub use homoclinic::{locate_homoclinic_mu2, period_blowup_threshold, secondary_cycle, HomoclinicSearch};
pub use models::{FixedPoint, Model, NormalFormField};
pub use portrait::{classify_portrait, ic_grid, EquilibriumScan, IcOutcome, PortraitOptions, PortraitSummary, Target};
pub use export::{fmt17, write_json, write_trajectory_csv, write_trajectory_gnuplot};
