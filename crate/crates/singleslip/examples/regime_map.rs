//! Regime labels over L with the two ablations: no curl penalty, and both
//! slip systems allowed everywhere.

use std::error::Error;

use singleslip::geometry::BcKind;
use singleslip::sweep::{regime_map, SweepSettings};

fn main() -> Result<(), Box<dyn Error>> {
    let s = SweepSettings::new(16);
    let rows = regime_map(BcKind::Horizontal, &[0.5, 1.5, 2.5], &[1.0, 2.0, 4.0, 8.0], 0.1, &s)?;
    println!("{:>5}  {:<14} {:<14} {:<14}", "L", "single slip", "sigma = 0", "relaxed");
    for r in &rows {
        println!(
            "{:>5}  {:<14} {:<14} {:<14}",
            r.l,
            r.constrained.class.as_str(),
            r.sigma_zero.class.as_str(),
            r.relaxed.class.as_str()
        );
    }
    Ok(())
}
