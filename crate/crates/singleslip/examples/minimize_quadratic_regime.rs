//! Alternating minimization at L = 1/2, where the energy sits between
//! gamma^2 (1 - L) / (2L) and gamma^2 / (2L).

use std::error::Error;

use singleslip::analysis::analytic_bounds;
use singleslip::energy::MaterialParams;
use singleslip::geometry::{make_grid, BcKind, BoundaryCondition, DomainSpec};
use singleslip::minimizer::{minimize, SolverConfig};

fn main() -> Result<(), Box<dyn Error>> {
    let (l, gamma, sigma) = (0.5, 0.1, 0.1);
    let n = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(64);
    let grid = make_grid(&DomainSpec::two_d(l)?, n)?;
    let r = minimize(&grid, &BoundaryCondition::horizontal(gamma), &MaterialParams::new(sigma, 0.0)?, &SolverConfig::default())?;
    for s in &r.start_log {
        println!("{:<22} start {:.6e}  optimized {:.6e}  converged {}", s.name, s.initial, s.optimized, s.converged);
    }
    let b = analytic_bounds(BcKind::Horizontal, l, gamma, sigma, 0.0)?;
    println!(
        "best {:.6e} from {}  (elastic {:.3e}, curl {:.3e}); bounds [{:?}, {:?}]",
        r.energy.total,
        r.warm_start_used,
        r.energy.elastic,
        r.energy.curl,
        b.lower.value(),
        b.upper_min()
    );
    println!("slipping cells: {} of {}", r.p.active_cells(), grid.num_cells());
    Ok(())
}
