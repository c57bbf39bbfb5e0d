//! Alternating minimization against exhaustive search over all labellings
//! on grids of at most 2 x 2 cells.

use std::error::Error;

use singleslip::minimizer::{oracle_check, SolverConfig};

fn main() -> Result<(), Box<dyn Error>> {
    let cases = oracle_check(20, 42, &SolverConfig::default())?;
    for c in &cases {
        println!(
            "L {:>3}  gamma {:.3}  sigma {:.3}  minimize {:.8e}  exhaustive {:.8e}  {}",
            c.l, c.gamma, c.sigma, c.minimized, c.exhaustive, if c.matches { "ok" } else { "MISMATCH" }
        );
    }
    println!("{} of {} match", cases.iter().filter(|c| c.matches).count(), cases.len());
    Ok(())
}
