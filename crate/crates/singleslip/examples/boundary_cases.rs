//! Construction sequences at the boundary heights L = 1 (BC1), L = 2 (BC2)
//! and L = 1/2 (antiplane). The harmonic column completes `u_beta` by a
//! harmonic correction; the second column takes the best displacement for
//! the same plastic field.

use std::error::Error;

use singleslip::sweep::{boundary_case_study, BoundaryCase};

fn main() -> Result<(), Box<dyn Error>> {
    let n = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(64);
    let alphas = [1.0, 0.5, 0.2, 0.05];
    for case in [BoundaryCase::Bc1L1, BoundaryCase::Bc2L2, BoundaryCase::ScalarLHalf] {
        let s = boundary_case_study(case, 0.1, 0.1, &alphas, n)?;
        println!("{} (strictly decreasing: {})", case.name(), s.strictly_decreasing);
        for r in &s.records {
            let best = r.optimal_total.map(|v| format!("{v:.4e}")).unwrap_or_else(|| "-".into());
            println!("  alpha {:>4}  harmonic {:.4e}  best u {best}", r.alpha, r.total);
        }
    }
    Ok(())
}
