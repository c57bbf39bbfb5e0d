//! Energies of the explicit test fields next to the closed-form bounds.

use std::error::Error;

use singleslip::analysis::analytic_bounds;
use singleslip::constructions::{bc1_elastic, bc1_shear_band, bc2_crossing_bands, bc2_double_band, bc2_elastic};
use singleslip::energy::{total_energy, MaterialParams};
use singleslip::geometry::{make_grid, BcKind, DomainSpec};

fn main() -> Result<(), Box<dyn Error>> {
    let (gamma, sigma, n) = (0.1, 0.2, 128);
    let m = MaterialParams::new(sigma, 0.0)?;
    let grid = |l: f64| make_grid(&DomainSpec::two_d(l).unwrap(), n);

    let g = grid(0.5)?;
    let e1 = total_energy(&g, &bc1_elastic(&g, gamma)?.u, &bc1_elastic(&g, gamma)?.p, &m)?;
    let e2 = total_energy(&g, &bc2_elastic(&g, gamma)?.u, &bc2_elastic(&g, gamma)?.p, &m)?;
    println!("L = 0.5  linear shear   BC1 {:.6}  BC2 {:.6}", e1.total, e2.total);

    let g = grid(1.5)?;
    let c = bc2_crossing_bands(&g, gamma)?;
    let e = total_energy(&g, &c.u, &c.p, &m)?;
    let b = analytic_bounds(BcKind::Horizontal, 1.5, gamma, sigma, 0.0)?;
    println!(
        "L = 1.5  crossing bands  total {:.6}  elastic {:.2e}  2 sqrt2 gamma sigma = {:.6}",
        e.total,
        e.elastic,
        2.0 * std::f64::consts::SQRT_2 * gamma * sigma
    );
    for u in &b.upper_candidates {
        println!("         upper candidate {:<20} {:?}", u.label, u.value());
    }

    let c = bc1_shear_band(&g, gamma, 0.1)?;
    println!("L = 1.5  BC1 shear band {:.3e}  ({})", total_energy(&g, &c.u, &c.p, &m)?.total, c.notes[0]);

    let g = grid(2.5)?;
    let c = bc2_double_band(&g, gamma)?;
    println!("L = 2.5  double band    {:.3e}  ({})", total_energy(&g, &c.u, &c.p, &m)?.total, c.notes[0]);
    Ok(())
}
