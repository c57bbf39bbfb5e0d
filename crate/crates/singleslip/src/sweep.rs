//! Parameter sweeps, scaling-exponent fits and regime labels.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{analytic_bounds, complete_scalar, complete_vector, BoundPair};
use crate::constructions::{bc1_sigmoid, bc2_l2_sigmoid, scalar_half_construction, SigmoidConstruction};
use crate::energy::MaterialParams;
use crate::error::{Error, Result};
use crate::geometry::{make_grid, BcKind, BoundaryCondition, Dimension, DomainSpec, Grid};
use crate::minimizer::{complete_fixed_slip, minimize, solve_relaxed, SolverConfig};

/// Which plastic fields are admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlipModel {
    /// One slip system per cell.
    SingleSlip,
    /// Both off-diagonal components per cell; the problem becomes convex.
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub n: usize,
    pub solver: SolverConfig,
    pub model: SlipModel,
    /// Relative slack applied to both bounds when bracketing.
    pub slack: f64,
    /// Worker threads for independent points; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Record wall-clock time; off keeps records reproducible.
    pub timing: bool,
}

impl SweepSettings {
    pub fn new(n: usize) -> Self {
        Self { n, solver: SolverConfig::default(), model: SlipModel::SingleSlip, slack: 0.1, workers: None, timing: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub l: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub tau: f64,
    pub j_numeric: f64,
    pub bounds: BoundPair,
    pub bracket_ok: bool,
    pub slack: f64,
    pub runtime_seconds: f64,
    pub converged: bool,
    /// Set when the point failed; `j_numeric` is then NaN.
    pub error: Option<String>,
}

/// Grid matching the model behind `bc`.
pub fn grid_for(bc: BcKind, l: f64, n: usize) -> Result<Grid> {
    let dim = match bc {
        BcKind::ScalarShear => Dimension::ScalarTwoD,
        BcKind::Horizontal3d => Dimension::ThreeD,
        _ => Dimension::TwoD,
    };
    make_grid(&DomainSpec::new(l, dim)?, n)
}

/// Minimizes at one parameter point and brackets the result.
pub fn run_point(bc: BcKind, l: f64, gamma: f64, sigma: f64, tau: f64, s: &SweepSettings) -> Result<SweepRecord> {
    let bounds = analytic_bounds(bc, l, gamma, sigma, tau)?;
    let grid = grid_for(bc, l, s.n)?;
    let bcond = BoundaryCondition::new(bc, gamma)?;
    let m = MaterialParams::new(sigma, tau)?;
    let start = Instant::now();
    let outcome = match s.model {
        SlipModel::SingleSlip => minimize(&grid, &bcond, &m, &s.solver).map(|r| (r.energy.total, r.converged)),
        SlipModel::Relaxed => solve_relaxed(&grid, &bcond, &m, None, &s.solver).map(|r| (r.energy.total, r.converged)),
    };
    let runtime_seconds = if s.timing { start.elapsed().as_secs_f64() } else { 0.0 };
    let rec = |j: f64, converged: bool, error: Option<String>| SweepRecord {
        l,
        gamma,
        sigma,
        tau,
        j_numeric: j,
        bracket_ok: j.is_finite() && bounds.brackets(j, s.slack),
        bounds: bounds.clone(),
        slack: s.slack,
        runtime_seconds,
        converged,
        error,
    };
    Ok(match outcome {
        Ok((j, c)) => rec(j, c, None),
        Err(e @ (Error::SolverDiverged(_) | Error::TooLarge(_))) => rec(f64::NAN, false, Some(e.to_string())),
        Err(e) => return Err(e),
    })
}

/// Runs jobs on the configured pool, keeping input order.
fn run_jobs<T: Send>(workers: Option<usize>, jobs: Vec<Box<dyn Fn() -> T + Send + Sync + '_>>) -> Result<Vec<T>> {
    match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
            Ok(pool.install(|| jobs.par_iter().map(|j| j()).collect()))
        }
        None => Ok(jobs.par_iter().map(|j| j()).collect()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LSweep {
    pub records: Vec<SweepRecord>,
    /// Indices `i` where `j[i] > j[i-1]` by more than the monotonicity slack.
    pub monotonicity_violations: Vec<usize>,
    pub monotone: bool,
}

pub const MONOTONE_SLACK: f64 = 0.05;

/// Energies over an ascending list of heights.
pub fn sweep_l(bc: BcKind, gamma: f64, sigma: f64, tau: f64, ls: &[f64], s: &SweepSettings) -> Result<LSweep> {
    if ls.is_empty() {
        return Err(Error::InvalidParameter("empty L list".into()));
    }
    if ls.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("L list must be strictly ascending".into()));
    }
    let jobs: Vec<Box<dyn Fn() -> Result<SweepRecord> + Send + Sync>> = ls
        .iter()
        .map(|&l| Box::new(move || run_point(bc, l, gamma, sigma, tau, s)) as Box<dyn Fn() -> _ + Send + Sync>)
        .collect();
    let records = run_jobs(s.workers, jobs)?.into_iter().collect::<Result<Vec<_>>>()?;
    let monotonicity_violations = monotonicity_violations(&records.iter().map(|r| r.j_numeric).collect::<Vec<_>>());
    Ok(LSweep { monotone: monotonicity_violations.is_empty(), monotonicity_violations, records })
}

/// Positions where a sequence increases by more than `MONOTONE_SLACK` relative.
pub fn monotonicity_violations(j: &[f64]) -> Vec<usize> {
    (1..j.len())
        .filter(|&i| j[i] > j[i - 1] * (1.0 + MONOTONE_SLACK) + 1e-12 || !j[i].is_finite())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingClass {
    Zero,
    Linear,
    Quadratic,
    Unclassified,
}

impl ScalingClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalingClass::Zero => "zero",
            ScalingClass::Linear => "linear",
            ScalingClass::Quadratic => "quadratic",
            ScalingClass::Unclassified => "unclassified",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSweep {
    pub records: Vec<SweepRecord>,
    pub exponent: Option<f64>,
    pub class: ScalingClass,
}

/// Least-squares slope of `ln j` against `ln gamma` over the upper half of
/// the points. `None` when any of those energies is not positive.
pub fn fit_exponent(gammas: &[f64], energies: &[f64]) -> Option<f64> {
    let k = gammas.len();
    if k < 2 || energies.len() != k {
        return None;
    }
    let from = k / 2;
    let pts: Vec<(f64, f64)> = (from..k).map(|i| (gammas[i], energies[i])).collect();
    if pts.len() < 2 || pts.iter().any(|p| !(p.1 > 0.0 && p.1.is_finite()) || !(p.0 > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Zero below exponent 0.3 (or undefined) with every energy under
/// `1e-4 gamma^2`; linear in [0.75, 1.25]; quadratic in [1.8, 2.2].
pub fn classify(exponent: Option<f64>, gammas: &[f64], energies: &[f64]) -> ScalingClass {
    let small = gammas.iter().zip(energies).all(|(g, e)| *e < 1e-4 * g * g);
    match exponent {
        None => {
            if small {
                ScalingClass::Zero
            } else {
                ScalingClass::Unclassified
            }
        }
        Some(p) if small || p < 0.3 => {
            if small {
                ScalingClass::Zero
            } else {
                ScalingClass::Unclassified
            }
        }
        Some(p) if (0.75..=1.25).contains(&p) => ScalingClass::Linear,
        Some(p) if (1.8..=2.2).contains(&p) => ScalingClass::Quadratic,
        _ => ScalingClass::Unclassified,
    }
}

/// Energies over a log-spaced list of shears with the fitted exponent.
pub fn sweep_gamma(bc: BcKind, l: f64, sigma: f64, tau: f64, gammas: &[f64], s: &SweepSettings) -> Result<GammaSweep> {
    if gammas.len() < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 gamma values, got {}", gammas.len())));
    }
    if gammas.iter().any(|g| !(*g > 0.0 && g.is_finite())) || gammas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("gamma values must be positive and ascending".into()));
    }
    if gammas[gammas.len() - 1] / gammas[0] < 8.0 {
        return Err(Error::InvalidParameter("gamma range must span a factor of at least 8".into()));
    }
    let ratios: Vec<f64> = gammas.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    if ratios.iter().any(|r| (r - mean).abs() > 0.25 * mean) {
        return Err(Error::InvalidParameter("gamma values must be roughly log-spaced".into()));
    }
    let jobs: Vec<Box<dyn Fn() -> Result<SweepRecord> + Send + Sync>> = gammas
        .iter()
        .map(|&g| Box::new(move || run_point(bc, l, g, sigma, tau, s)) as Box<dyn Fn() -> _ + Send + Sync>)
        .collect();
    let records = run_jobs(s.workers, jobs)?.into_iter().collect::<Result<Vec<_>>>()?;
    let energies: Vec<f64> = records.iter().map(|r| r.j_numeric).collect();
    let exponent = fit_exponent(gammas, &energies);
    let class = classify(exponent, gammas, &energies);
    Ok(GammaSweep { records, exponent, class })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRow {
    pub l: f64,
    pub constrained: GammaSweep,
    /// Same sweep with `sigma = 0`.
    pub sigma_zero: GammaSweep,
    /// Same sweep with both slip systems allowed in every cell.
    pub relaxed: GammaSweep,
}

/// Scaling class per height, with the two ablations.
pub fn regime_map(bc: BcKind, ls: &[f64], gammas: &[f64], sigma: f64, s: &SweepSettings) -> Result<Vec<RegimeRow>> {
    if ls.is_empty() {
        return Err(Error::InvalidParameter("empty L list".into()));
    }
    let relaxed = SweepSettings { model: SlipModel::Relaxed, ..s.clone() };
    ls.iter()
        .map(|&l| {
            Ok(RegimeRow {
                l,
                constrained: sweep_gamma(bc, l, sigma, 0.0, gammas, s)?,
                sigma_zero: sweep_gamma(bc, l, 0.0, 0.0, gammas, s)?,
                relaxed: sweep_gamma(bc, l, sigma, 0.0, gammas, &relaxed)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCase {
    /// Diagonal shear at `L = 1`.
    Bc1L1,
    /// Horizontal shear at `L = 2`.
    Bc2L2,
    /// Antiplane shear at `L = 1/2`.
    ScalarLHalf,
}

impl BoundaryCase {
    pub fn height(self) -> f64 {
        match self {
            BoundaryCase::Bc1L1 => 1.0,
            BoundaryCase::Bc2L2 => 2.0,
            BoundaryCase::ScalarLHalf => 0.5,
        }
    }

    pub fn bc_kind(self) -> BcKind {
        match self {
            BoundaryCase::Bc1L1 => BcKind::Diagonal,
            BoundaryCase::Bc2L2 => BcKind::Horizontal,
            BoundaryCase::ScalarLHalf => BcKind::ScalarShear,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryCase::Bc1L1 => "bc1_l1",
            BoundaryCase::Bc2L2 => "bc2_l2",
            BoundaryCase::ScalarLHalf => "scalar_lhalf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bc1_l1" => Ok(BoundaryCase::Bc1L1),
            "bc2_l2" => Ok(BoundaryCase::Bc2L2),
            "scalar_lhalf" => Ok(BoundaryCase::ScalarLHalf),
            other => Err(Error::Config(format!("unknown boundary case {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRecord {
    pub alpha: f64,
    pub total: f64,
    pub elastic: f64,
    pub dirichlet_energy: f64,
    /// Total with the best displacement for the same plastic field (vector cases only).
    pub optimal_total: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryStudy {
    pub case: BoundaryCase,
    pub records: Vec<BoundaryRecord>,
    pub strictly_decreasing: bool,
    /// Intercept at `alpha = 0` of the line through the last two points, floored at 0.
    pub extrapolated_limit: f64,
}

/// Energies of the completed construction sequence for decreasing `alpha`.
pub fn boundary_case_study(case: BoundaryCase, gamma: f64, sigma: f64, alphas: &[f64], n: usize) -> Result<BoundaryStudy> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("empty alpha list".into()));
    }
    if alphas.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) || alphas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("alphas must be strictly decreasing in (0, 1]".into()));
    }
    let grid = grid_for(case.bc_kind(), case.height(), n)?;
    let bc = BoundaryCondition::new(case.bc_kind(), gamma)?;
    let m = MaterialParams::new(sigma, 0.0)?;
    let records = alphas
        .iter()
        .map(|&alpha| {
            let vector = |c: SigmoidConstruction| -> Result<_> {
                let best = complete_fixed_slip(&grid, &bc, &m, &c.p)?.1.total;
                Ok((complete_vector(&grid, &c, &bc, &m)?.1, Some(best)))
            };
            let (e, optimal_total) = match case {
                BoundaryCase::Bc1L1 => vector(bc1_sigmoid(&grid, gamma, alpha)?)?,
                BoundaryCase::Bc2L2 => vector(bc2_l2_sigmoid(&grid, gamma, alpha)?)?,
                BoundaryCase::ScalarLHalf => {
                    (complete_scalar(&grid, &scalar_half_construction(&grid, gamma, alpha)?, &bc, &m)?.1, None)
                }
            };
            Ok(BoundaryRecord {
                alpha,
                total: e.breakdown.total,
                elastic: e.breakdown.elastic,
                dirichlet_energy: e.dirichlet_energy,
                optimal_total,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let strictly_decreasing = records.windows(2).all(|w| w[1].total < w[0].total);
    let extrapolated_limit = match records.len() {
        1 => records[0].total,
        k => {
            let (a, b) = (&records[k - 2], &records[k - 1]);
            let slope = (a.total - b.total) / (a.alpha - b.alpha);
            (b.total - slope * b.alpha).max(0.0)
        }
    };
    Ok(BoundaryStudy { case, records, strictly_decreasing, extrapolated_limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_of_power_law() {
        let g = [0.5, 1.0, 2.0, 4.0];
        let e: Vec<f64> = g.iter().map(|x| 3.0 * x * x).collect();
        assert!((fit_exponent(&g, &e).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(classify(Some(2.0), &g, &e), ScalingClass::Quadratic);
        let e: Vec<f64> = g.iter().map(|x| 0.1 * x).collect();
        assert_eq!(classify(fit_exponent(&g, &e), &g, &e), ScalingClass::Linear);
    }

    #[test]
    fn zero_energies_classify_zero() {
        let g = [1.0, 2.0, 4.0, 8.0];
        let e = [0.0; 4];
        assert_eq!(fit_exponent(&g, &e), None);
        assert_eq!(classify(None, &g, &e), ScalingClass::Zero);
        let e = [1e-9, 1.1e-9, 1.2e-9, 1.3e-9];
        assert_eq!(classify(fit_exponent(&g, &e), &g, &e), ScalingClass::Zero);
    }

    #[test]
    fn monotonicity_flags() {
        assert!(monotonicity_violations(&[1.0, 0.9, 0.92, 0.5]).is_empty());
        assert_eq!(monotonicity_violations(&[1.0, 0.9, 1.0, 0.5]), vec![2]);
    }

    #[test]
    fn gamma_list_validation() {
        let s = SweepSettings::new(8);
        assert!(sweep_gamma(BcKind::Horizontal, 1.5, 0.1, 0.0, &[], &s).is_err());
        assert!(sweep_gamma(BcKind::Horizontal, 1.5, 0.1, 0.0, &[1.0, 2.0, 3.0, 4.0], &s).is_err());
        assert!(sweep_gamma(BcKind::Horizontal, 1.5, 0.1, 0.0, &[1.0, 1.1, 1.2, 16.0], &s).is_err());
    }

    #[test]
    fn boundary_study_first_step_decreases() {
        for case in [BoundaryCase::Bc1L1, BoundaryCase::Bc2L2, BoundaryCase::ScalarLHalf] {
            let b = boundary_case_study(case, 0.1, 0.1, &[0.5, 0.2], 32).unwrap();
            assert!(b.records[1].total < b.records[0].total, "{:?}", b.records);
            if let (Some(a), Some(c)) = (b.records[0].optimal_total, b.records[1].optimal_total) {
                assert!(c < a && a <= b.records[0].total);
            }
        }
        assert!(boundary_case_study(BoundaryCase::Bc2L2, 0.1, 0.1, &[0.2, 0.5], 8).is_err());
    }

    #[test]
    fn small_sweep_runs() {
        let s = SweepSettings::new(8);
        let r = sweep_l(BcKind::Horizontal, 0.1, 0.1, 0.0, &[0.5, 1.0, 2.5], &s).unwrap();
        assert_eq!(r.records.len(), 3);
        assert!(r.records[2].j_numeric <= 1e-6);
        for rec in &r.records {
            assert_eq!(rec.runtime_seconds, 0.0);
        }
    }
}
