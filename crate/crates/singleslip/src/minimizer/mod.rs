//! Upper estimates of the minimal energy by alternating convex solves and
//! slip-system label updates.

mod brute;
mod convex;
mod labels;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{
    bc1_shear_band, bc1_sigmoid, bc1_transition, bc2_crossing_bands, bc2_double_band, bc2_l2_sigmoid,
    bc2_transition, compatible_slip, ConstructionParams,
};
use crate::energy::{total_energy, EnergyBreakdown, MaterialParams};
use crate::error::{Error, Result};
use crate::fields::{DisplacementField, PlasticField, SlipLabel};
use crate::geometry::{BcKind, BoundaryCondition, Grid};

pub use brute::{brute_force_minimize, oracle_check, OracleCase, BRUTE_FORCE_MAX_CELLS};
pub use convex::{complete_fixed_slip, linear_start, solve_convex, solve_relaxed, ConvexSolution, RelaxedSolution};
pub use labels::{anneal, local_energy, update_labels};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    pub t_start: f64,
    pub t_end: f64,
    /// Proposed moves per temperature step, as a multiple of the cell count.
    pub sweeps: usize,
    pub steps: usize,
    pub seed: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self { t_start: 1e-2, t_end: 1e-6, sweeps: 4, steps: 12, seed: 7 }
    }
}

/// Starting points for the alternating iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "seed")]
pub enum WarmStart {
    Elastic,
    /// Every construction defined for the grid and boundary condition.
    Constructions,
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Initial Huber width, relative to the expected slip magnitude.
    pub huber_delta: f64,
    /// Final Huber width of the continuation, same units.
    pub huber_delta_final: f64,
    /// Relative primal and dual residual that ends a convex solve.
    pub inner_tol: f64,
    /// ADMM step cap per convex solve.
    pub max_inner: usize,
    pub max_outer: usize,
    pub seeds: Vec<WarmStart>,
    pub anneal: Option<AnnealConfig>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            huber_delta: 1e-6,
            huber_delta_final: 1e-8,
            inner_tol: 1e-5,
            max_inner: 3000,
            max_outer: 20,
            seeds: vec![WarmStart::Elastic, WarmStart::Constructions, WarmStart::Random(1)],
            anneal: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("huber_delta", self.huber_delta),
            ("huber_delta_final", self.huber_delta_final),
            ("inner_tol", self.inner_tol),
        ];
        for (name, v) in pos {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.huber_delta_final > self.huber_delta {
            return Err(Error::InvalidParameter("huber_delta_final exceeds huber_delta".into()));
        }
        if self.max_inner == 0 || self.max_outer == 0 {
            return Err(Error::InvalidParameter("iteration caps must be positive".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("at least one warm start is required".into()));
        }
        if let Some(a) = &self.anneal {
            if !(a.t_start > 0.0 && a.t_end > 0.0 && a.t_end <= a.t_start) || a.steps == 0 {
                return Err(Error::InvalidParameter("anneal temperatures must satisfy 0 < t_end <= t_start".into()));
            }
        }
        Ok(())
    }

    /// Magnitude scale for the Huber widths: slip of order `gamma / min(L, 1)`.
    pub(crate) fn beta_scale(&self, gamma: f64, height: f64) -> f64 {
        gamma.abs().max(1e-12) / height.min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub energy: EnergyBreakdown,
    pub u: DisplacementField,
    pub p: PlasticField,
    /// Name of the start that produced the best energy.
    pub warm_start_used: String,
    pub outer_iterations: usize,
    pub converged: bool,
    /// Exact energy of each start before and after optimization.
    pub start_log: Vec<StartLog>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartLog {
    pub name: String,
    pub initial: f64,
    pub optimized: f64,
    pub converged: bool,
    /// ADMM steps spent on this start.
    pub inner_iterations: usize,
}

/// A named starting pair.
#[derive(Debug, Clone, PartialEq)]
pub struct StartPoint {
    pub name: String,
    pub u: DisplacementField,
    pub p: PlasticField,
}

/// Expands the configured warm starts to concrete fields.
pub fn warm_starts(grid: &Grid, bc: &BoundaryCondition, cfg: &SolverConfig) -> Vec<StartPoint> {
    let mut out = Vec::new();
    for s in &cfg.seeds {
        match s {
            WarmStart::Elastic => out.push(StartPoint {
                name: "elastic".into(),
                u: linear_start(grid, bc),
                p: PlasticField::for_grid(grid),
            }),
            WarmStart::Constructions => out.extend(construction_starts(grid, bc)),
            WarmStart::Random(seed) => out.push(random_start(grid, bc, *seed)),
        }
    }
    out
}

fn construction_starts(grid: &Grid, bc: &BoundaryCondition) -> Vec<StartPoint> {
    let l = grid.height;
    let g = bc.gamma;
    let near = |a: f64| (l - a).abs() < 1e-9;
    let eps = (4.0 * grid.h).max(0.02);
    let alpha = ConstructionParams::scheduled(eps).map(|p| p.alpha).unwrap_or(0.25);
    let mut out = Vec::new();
    let mut push = |name: &str, c: Result<(DisplacementField, PlasticField)>| {
        if let Ok((u, p)) = c {
            out.push(StartPoint { name: name.into(), u, p });
        }
    };
    match bc.kind {
        BcKind::Horizontal => {
            if l > 2.0 + 1e-9 {
                push("double_band", bc2_double_band(grid, g).map(|c| (c.u, c.p)));
            }
            if l > 1.0 + 1e-9 && l < 2.0 - 1e-9 {
                push("crossing_bands", bc2_crossing_bands(grid, g).map(|c| (c.u, c.p)));
            }
            if l < 1.0 - 1e-9 {
                push("transition", bc2_transition(grid, g, eps, alpha).map(|c| (c.u, c.p)));
            }
            if near(2.0) {
                push("sigmoid", bc2_l2_sigmoid(grid, g, 0.5).map(|c| sigmoid_pair(grid, bc, c)));
            }
        }
        BcKind::Diagonal => {
            if l > 1.0 + 1e-9 {
                push("shear_band", bc1_shear_band(grid, g, eps).map(|c| (c.u, c.p)));
            }
            if l < 1.0 - 1e-9 {
                push("transition", bc1_transition(grid, g, eps, alpha).map(|c| (c.u, c.p)));
            }
            if near(1.0) {
                push("sigmoid", bc1_sigmoid(grid, g, 0.5).map(|c| sigmoid_pair(grid, bc, c)));
            }
        }
        _ => {}
    }
    out
}

fn sigmoid_pair(
    grid: &Grid,
    bc: &BoundaryCondition,
    c: crate::constructions::SigmoidConstruction,
) -> (DisplacementField, PlasticField) {
    let mut u = c.u_beta;
    u.apply_bc(grid, bc);
    (u, c.p)
}

/// Linear field plus nodal noise, with the compatible slip of the result.
fn random_start(grid: &Grid, bc: &BoundaryCondition, seed: u64) -> StartPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = linear_start(grid, bc);
    let amp = 0.5 * bc.gamma.abs() * grid.h;
    for w in u.values.iter_mut() {
        w[0] += amp * (2.0 * rng.gen::<f64>() - 1.0);
        w[1] += amp * (2.0 * rng.gen::<f64>() - 1.0);
    }
    u.apply_bc(grid, bc);
    let p = compatible_slip(grid, &u);
    StartPoint { name: format!("random_{seed}"), u, p }
}

fn check_inputs(grid: &Grid, bc: &BoundaryCondition) -> Result<()> {
    match bc.kind {
        BcKind::Diagonal | BcKind::Horizontal => Ok(()),
        k => Err(Error::NotApplicable(format!("the planar minimizer does not handle {k:?} data"))),
    }
    .and_then(|_| if grid.num_cells() == 0 { Err(Error::InvalidResolution("empty grid".into())) } else { Ok(()) })
}

/// Alternating minimization from one start.
pub fn optimize_start(
    grid: &Grid,
    bc: &BoundaryCondition,
    m: &MaterialParams,
    start: &StartPoint,
    cfg: &SolverConfig,
) -> Result<(MinimizeResult, StartLog)> {
    let mut u = start.u.clone();
    u.apply_bc(grid, bc);
    let mut p = start.p.clone();
    p.normalize();
    let initial = total_energy(grid, &u, &p, m)?;
    let mut best = (initial.clone(), u.clone(), p.clone());
    let mut outer = 0;
    let mut inner = 0;
    let mut converged = false;
    let mut labels = p.labels.clone();
    for _ in 0..cfg.max_outer {
        outer += 1;
        let sol = solve_convex(grid, bc, m, &labels, Some((&u, &p)), cfg)?;
        inner += sol.iterations;
        converged = sol.converged;
        if sol.energy.total <= best.0.total {
            best = (sol.energy.clone(), sol.u.clone(), sol.p.clone());
        }
        u = sol.u;
        p = sol.p;
        let changed = update_labels(grid, &u, &mut p, m);
        if changed == 0 {
            break;
        }
        labels = p.labels.clone();
        converged = false;
    }
    if let Some(a) = &cfg.anneal {
        let mut pa = best.2.clone();
        anneal(grid, &best.1, &mut pa, m, a);
        let mut ua = best.1.clone();
        for _ in 0..cfg.max_outer {
            outer += 1;
            let sol = solve_convex(grid, bc, m, &pa.labels, Some((&ua, &pa)), cfg)?;
            inner += sol.iterations;
            if sol.energy.total < best.0.total {
                best = (sol.energy.clone(), sol.u.clone(), sol.p.clone());
                converged = sol.converged;
            }
            ua = sol.u;
            pa = sol.p;
            if update_labels(grid, &ua, &mut pa, m) == 0 {
                break;
            }
        }
    }
    let log = StartLog { name: start.name.clone(), initial: initial.total, optimized: best.0.total, converged, inner_iterations: inner };
    Ok((
        MinimizeResult {
            energy: best.0,
            u: best.1,
            p: best.2,
            warm_start_used: start.name.clone(),
            outer_iterations: outer,
            converged,
            start_log: vec![log.clone()],
        },
        log,
    ))
}

/// Best-of-starts minimization with the configured warm starts.
pub fn minimize(grid: &Grid, bc: &BoundaryCondition, m: &MaterialParams, cfg: &SolverConfig) -> Result<MinimizeResult> {
    cfg.validate()?;
    check_inputs(grid, bc)?;
    let starts = warm_starts(grid, bc, cfg);
    minimize_from(grid, bc, m, &starts, cfg)
}

/// Best-of-starts minimization from explicit starting pairs.
///
/// Starts run in parallel; the first start (in input order) attaining the
/// lowest energy wins, so the result does not depend on scheduling.
pub fn minimize_from(
    grid: &Grid,
    bc: &BoundaryCondition,
    m: &MaterialParams,
    starts: &[StartPoint],
    cfg: &SolverConfig,
) -> Result<MinimizeResult> {
    cfg.validate()?;
    check_inputs(grid, bc)?;
    if starts.is_empty() {
        return Err(Error::InvalidParameter("at least one warm start is required".into()));
    }
    for s in starts {
        s.u.check_grid(grid)?;
        s.p.check_grid(grid)?;
    }
    let runs: Vec<Result<(MinimizeResult, StartLog)>> =
        starts.par_iter().map(|s| optimize_start(grid, bc, m, s, cfg)).collect();
    let mut best: Option<MinimizeResult> = None;
    let mut logs = Vec::new();
    let mut first_err = None;
    let mut any_converged = false;
    for r in runs {
        match r {
            Ok((res, log)) => {
                any_converged |= log.converged;
                logs.push(log);
                if best.as_ref().map_or(true, |b| res.energy.total < b.energy.total) {
                    best = Some(res);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match best {
        Some(mut b) => {
            b.start_log = logs;
            // Flagged only when no start converged.
            b.converged = any_converged;
            Ok(b)
        }
        None => Err(first_err.unwrap_or_else(|| Error::SolverDiverged("no start produced a result".into()))),
    }
}

/// All labels set to one system; useful as a custom start.
pub fn uniform_labels(grid: &Grid, label: SlipLabel) -> Vec<SlipLabel> {
    vec![label; grid.num_cells()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_grid, DomainSpec};

    fn grid(l: f64, n: usize) -> Grid {
        make_grid(&DomainSpec::two_d(l).unwrap(), n).unwrap()
    }

    #[test]
    fn zero_gamma() {
        let g = grid(1.0, 8);
        let bc = BoundaryCondition::horizontal(0.0);
        let m = MaterialParams::new(0.1, 0.0).unwrap();
        let r = minimize(&g, &bc, &m, &SolverConfig::default()).unwrap();
        assert!(r.energy.total <= 1e-10);
    }

    #[test]
    fn never_worse_than_starts() {
        let g = grid(1.5, 8);
        let bc = BoundaryCondition::horizontal(0.2);
        let m = MaterialParams::new(0.1, 0.0).unwrap();
        let r = minimize(&g, &bc, &m, &SolverConfig::default()).unwrap();
        for s in &r.start_log {
            assert!(s.optimized <= s.initial + 1e-14, "{s:?}");
            assert!(r.energy.total <= s.optimized + 1e-14);
        }
    }

    #[test]
    fn invalid_config() {
        let cfg = SolverConfig { seeds: vec![], ..SolverConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig { huber_delta: 0.0, ..SolverConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
