//! A planar construction extruded in depth keeps its energy; laminating
//! its Burgers vectors between the two directions of each plane raises
//! the curl by about sqrt 2.

use std::error::Error;

use singleslip::constructions::{bc2_crossing_bands, extrude_3d, laminate_burgers};
use singleslip::energy::{energy_3d, total_energy, MaterialParams};
use singleslip::geometry::{make_grid, make_grid3, DomainSpec, Dimension};

fn main() -> Result<(), Box<dyn Error>> {
    let (l, gamma, n) = (1.5, 0.1, 16);
    let m = MaterialParams::new(0.2, 0.0)?;
    let g2 = make_grid(&DomainSpec::two_d(l)?, n)?;
    let g3 = make_grid3(&DomainSpec::new(l, Dimension::ThreeD)?, n)?;
    let c = bc2_crossing_bands(&g2, gamma)?;
    let (u3, p3) = extrude_3d(&g3, &c.u, &c.p)?;
    let e2 = total_energy(&g2, &c.u, &c.p, &m)?;
    let e3 = energy_3d(&g3, &u3, &p3, &m)?;
    println!("planar {:.10e}  extruded {:.10e}", e2.total, e3.total);
    for k in [16.0, 8.0, 4.0, 2.0] {
        let q = laminate_burgers(&g3, &p3, k * g3.h())?;
        let e = energy_3d(&g3, &u3, &q, &m)?;
        println!("period {k:>2} h  curl ratio {:.4}  elastic {:.3e}", e.curl_raw / e3.curl_raw, e.elastic);
    }
    Ok(())
}
