//! Exhaustive search over labellings of very small grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::MaterialParams;
use crate::error::{Error, Result};
use crate::fields::SlipLabel;
use crate::geometry::{BoundaryCondition, Grid};

use super::{minimize, solve_convex, MinimizeResult, SolverConfig};

pub const BRUTE_FORCE_MAX_CELLS: usize = 16;

/// Solves the convex problem for every one of the `3^cells` labellings and
/// keeps the best (first in enumeration order among equals).
pub fn brute_force_minimize(
    grid: &Grid,
    bc: &BoundaryCondition,
    m: &MaterialParams,
    cfg: &SolverConfig,
) -> Result<MinimizeResult> {
    let cells = grid.num_cells();
    if cells > BRUTE_FORCE_MAX_CELLS {
        return Err(Error::TooLarge(format!(
            "exhaustive search allows at most {BRUTE_FORCE_MAX_CELLS} cells, grid has {cells}"
        )));
    }
    let total = 3usize.pow(cells as u32);
    let mut best: Option<MinimizeResult> = None;
    let mut all_converged = true;
    for code in 0..total {
        let mut k = code;
        let labels: Vec<SlipLabel> = (0..cells)
            .map(|_| {
                let l = SlipLabel::from_index(k % 3);
                k /= 3;
                l
            })
            .collect();
        let sol = solve_convex(grid, bc, m, &labels, None, cfg)?;
        all_converged &= sol.converged;
        if best.as_ref().map_or(true, |b| sol.energy.total < b.energy.total) {
            best = Some(MinimizeResult {
                energy: sol.energy,
                u: sol.u,
                p: sol.p,
                warm_start_used: format!("labelling_{code}"),
                outer_iterations: total,
                converged: sol.converged,
                start_log: Vec::new(),
            });
        }
    }
    let mut b = best.ok_or_else(|| Error::InvalidResolution("empty grid".into()))?;
    b.converged = all_converged;
    Ok(b)
}

/// One random instance of the exhaustive-search comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub l: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub minimized: f64,
    pub exhaustive: f64,
    /// `|minimized - exhaustive| <= 1e-6 + 0.01 exhaustive`.
    pub matches: bool,
}

/// Compares [`minimize`] against [`brute_force_minimize`] on `count` seeded
/// instances with `L` in {1/2, 1} on two-column grids, BC2,
/// `gamma` in [0.05, 1) and `sigma` in [0, 0.5).
pub fn oracle_check(count: usize, seed: u64, cfg: &SolverConfig) -> Result<Vec<OracleCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let l = if rng.gen::<bool>() { 0.5 } else { 1.0 };
            let gamma = rng.gen_range(0.05..1.0);
            let sigma = rng.gen_range(0.0..0.5);
            let g = Grid::coarse(l, 2)?;
            let bc = BoundaryCondition::horizontal(gamma);
            let m = MaterialParams::new(sigma, 0.0)?;
            let minimized = minimize(&g, &bc, &m, cfg)?.energy.total;
            let exhaustive = brute_force_minimize(&g, &bc, &m, cfg)?.energy.total;
            let matches = (minimized - exhaustive).abs() <= 1e-6 + 0.01 * exhaustive.abs();
            Ok(OracleCase { l, gamma, sigma, minimized, exhaustive, matches })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shear_is_zero() {
        let g = Grid::coarse(1.0, 2).unwrap();
        let r = brute_force_minimize(
            &g,
            &BoundaryCondition::horizontal(0.0),
            &MaterialParams::new(0.1, 0.0).unwrap(),
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(r.energy.total <= 1e-20);
    }

    #[test]
    fn oracle_cases_match() {
        let cases = oracle_check(3, 5, &SolverConfig::default()).unwrap();
        assert_eq!(cases.len(), 3);
        assert!(cases.iter().all(|c| c.matches), "{cases:?}");
    }

    #[test]
    fn rejects_large_grids() {
        let g = Grid::coarse(1.0, 6).unwrap();
        let r = brute_force_minimize(
            &g,
            &BoundaryCondition::horizontal(0.1),
            &MaterialParams::new(0.1, 0.0).unwrap(),
            &SolverConfig::default(),
        );
        assert!(matches!(r, Err(Error::TooLarge(_))));
    }
}
