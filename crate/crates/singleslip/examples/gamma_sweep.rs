//! Scaling of the minimal energy with the applied shear, inside and
//! outside the linear regime.

use std::error::Error;

use singleslip::geometry::BcKind;
use singleslip::sweep::{sweep_gamma, SweepSettings};

fn main() -> Result<(), Box<dyn Error>> {
    let n = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(32);
    let s = SweepSettings::new(n);
    for (l, gammas) in [(0.5, [0.5, 1.0, 2.0, 4.0]), (1.5, [2.0, 4.0, 8.0, 16.0])] {
        let g = sweep_gamma(BcKind::Horizontal, l, 0.1, 0.0, &gammas, &s)?;
        println!("L = {l}: exponent {:?} -> {}", g.exponent, g.class.as_str());
        for r in &g.records {
            println!("  gamma {:>5}  J {:.6e}  bracket {}", r.gamma, r.j_numeric, r.bracket_ok);
        }
    }
    Ok(())
}
