//! Command-line runs: a config file in, `records.csv`, `run.json` and an
//! optional `plot.svg` out.
//!
//! Exit status is 0 on success, 2 when the configuration or a parameter is
//! invalid, 3 when a solver fails or output cannot be written. Sweeps with
//! failed points still write their files, flagged `partial` in `run.json`,
//! and exit 3. The worker count comes from `CRYSTAL_SHEAR_WORKERS`
//! (default: all cores); it never changes the numbers written.

pub mod config;
pub mod output;

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::analysis::{analytic_bounds, complete_scalar, complete_vector, q_alpha, q_alpha_monte_carlo, q_alpha_reflected};
use crate::constructions::{self as cons, ConstructionParams, Construction};
use crate::energy::{total_energy, EnergyBreakdown, MaterialParams};
use crate::error::{Error, Result};
use crate::geometry::{BcKind, BoundaryCondition};
use crate::minimizer::{minimize, oracle_check, solve_relaxed};
use crate::sweep::{
    boundary_case_study, grid_for, regime_map, sweep_gamma, sweep_l, GammaSweep, SlipModel, SweepRecord, SweepSettings,
};

pub use config::{Command, RunConfig};
pub use output::{records_csv, Plot, Row, Series, CSV_HEADER};

pub const WORKERS_ENV: &str = "CRYSTAL_SHEAR_WORKERS";

/// Everything a command produced, before it is written.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub rows: Vec<Row>,
    pub results: Value,
    pub grids: Vec<Value>,
    pub partial: bool,
    pub plot: Option<Plot>,
}

impl RunOutput {
    fn new(rows: Vec<Row>, results: Value) -> Self {
        Self { rows, results, grids: Vec::new(), partial: false, plot: None }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SolverDiverged(_) | Error::TooLarge(_) | Error::Quadrature(_) | Error::Io(_) => 3,
        _ => 2,
    }
}

/// Worker threads from the environment; unset or unparsable means all cores.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()).filter(|w| *w > 0)
}

/// Entry point for `singleslip <config> [key=value ...]`; returns the exit status.
pub fn main_with_args(args: &[String]) -> i32 {
    let Some(path) = args.first() else {
        eprintln!("usage: singleslip <config file> [key=value ...]");
        return 2;
    };
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {path}: {e}");
            return 2;
        }
    };
    let cfg = match RunConfig::from_text(&text, &args[1..]) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match run(&cfg) {
        Ok(out) if out.partial => {
            eprintln!("error: some points failed; partial results in {}", cfg.output_dir.display());
            3
        }
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs the configured command and writes its files.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let out = execute(cfg)?;
    write_outputs(cfg, &out)?;
    Ok(out)
}

/// Runs the configured command without touching the file system.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.command {
        Command::EvaluateConstruction => evaluate_construction(cfg),
        Command::Minimize => run_minimize(cfg),
        Command::SweepL => run_sweep_l(cfg),
        Command::SweepGamma => run_sweep_gamma(cfg),
        Command::RegimeMap => run_regime_map(cfg),
        Command::BoundaryCase => run_boundary_case(cfg),
        Command::QAlpha => run_q_alpha(cfg),
        Command::OracleCheck => run_oracle(cfg),
    }
}

pub fn write_outputs(cfg: &RunConfig, out: &RunOutput) -> Result<()> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("records.csv"), records_csv(&out.rows))?;
    let meta = json!({
        "command": cfg.command,
        "config": cfg,
        "rng_seed": cfg.rng_seed,
        "versions": { "singleslip": env!("CARGO_PKG_VERSION"), "run_json_format": 1 },
        "workers": workers_from_env(),
        "grids": out.grids,
        "partial": out.partial,
        "results": out.results,
    });
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join("run.json"), text + "\n")?;
    let svg = dir.join("plot.svg");
    match (&out.plot, cfg.plot) {
        (Some(p), true) => fs::write(svg, p.to_svg())?,
        _ => remove_stale(&svg)?,
    }
    Ok(())
}

fn remove_stale(path: &Path) -> Result<()> {
    match fs::remove_file(path) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(e.into()),
        _ => Ok(()),
    }
}

fn settings(cfg: &RunConfig) -> SweepSettings {
    SweepSettings {
        n: cfg.n,
        solver: cfg.solver.clone(),
        model: cfg.model,
        slack: cfg.slack,
        workers: workers_from_env(),
        timing: cfg.timing,
    }
}

fn grid_note(bc: BcKind, l: f64, n: usize) -> Result<Value> {
    let g = grid_for(bc, l, n)?;
    Ok(json!({ "l_requested": l, "l_used": g.height, "n": n, "nx": g.nx, "ny": g.ny, "note": g.rounding_note }))
}

fn grid_notes(bc: BcKind, ls: &[f64], n: usize) -> Result<Vec<Value>> {
    ls.iter().map(|&l| grid_note(bc, l, n)).collect()
}

fn failures(records: &[SweepRecord]) -> Vec<Value> {
    records
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| json!({ "l": r.l, "gamma": r.gamma, "error": e })))
        .collect()
}

fn bound_series(points: &[(f64, Option<f64>, Option<f64>)]) -> Vec<Series> {
    let mut out = Vec::new();
    for (label, pick) in [("lower bound", 1), ("upper bound", 2)] {
        let pts: Vec<(f64, f64)> = points
            .iter()
            .filter_map(|p| if pick == 1 { p.1 } else { p.2 }.map(|v| (p.0, v)))
            .collect();
        if !pts.is_empty() {
            out.push(Series { label: label.into(), points: pts, dashed: true });
        }
    }
    out
}

fn construction_bc(name: &str) -> Result<BcKind> {
    Ok(match name {
        "bc1_elastic" | "bc1_shear_band" | "bc1_transition" | "bc1_sigmoid" => BcKind::Diagonal,
        "bc2_elastic" | "bc2_double_band" | "bc2_crossing_bands" | "bc2_transition" | "bc2_l2_sigmoid" => {
            BcKind::Horizontal
        }
        "scalar_half" => BcKind::ScalarShear,
        other => return Err(Error::Config(format!("unknown construction '{other}'"))),
    })
}

/// Energy of a named test field, completed harmonically where it only fixes `beta`.
pub fn evaluate_named(
    name: &str,
    l: f64,
    gamma: f64,
    m: &MaterialParams,
    n: usize,
    epsilon: Option<f64>,
    alpha: Option<f64>,
) -> Result<(EnergyBreakdown, Vec<String>)> {
    let bc_kind = construction_bc(name)?;
    let grid = grid_for(bc_kind, l, n)?;
    let bc = BoundaryCondition::new(bc_kind, gamma)?;
    let eps = || epsilon.unwrap_or_else(|| (4.0 * grid.h).max(0.02));
    let transition_alpha = |e: f64| -> Result<f64> {
        match alpha {
            Some(a) => Ok(a),
            None => Ok(ConstructionParams::scheduled(e)?.alpha),
        }
    };
    let sigmoid_alpha = alpha.unwrap_or(0.5);
    let plain = |c: Construction| -> Result<(EnergyBreakdown, Vec<String>)> {
        Ok((total_energy(&grid, &c.u, &c.p, m)?, c.notes))
    };
    match name {
        "bc1_elastic" => plain(cons::bc1_elastic(&grid, gamma)?),
        "bc2_elastic" => plain(cons::bc2_elastic(&grid, gamma)?),
        "bc1_shear_band" => {
            let e = epsilon.unwrap_or((grid.height - 1.0).max(0.0) / (2.0 * std::f64::consts::SQRT_2));
            plain(cons::bc1_shear_band(&grid, gamma, e)?)
        }
        "bc2_double_band" => plain(cons::bc2_double_band(&grid, gamma)?),
        "bc2_crossing_bands" => plain(cons::bc2_crossing_bands(&grid, gamma)?),
        "bc1_transition" => plain(cons::bc1_transition(&grid, gamma, eps(), transition_alpha(eps())?)?),
        "bc2_transition" => plain(cons::bc2_transition(&grid, gamma, eps(), transition_alpha(eps())?)?),
        "bc1_sigmoid" => {
            let c = cons::bc1_sigmoid(&grid, gamma, sigmoid_alpha)?;
            Ok((complete_vector(&grid, &c, &bc, m)?.1.breakdown, vec![]))
        }
        "bc2_l2_sigmoid" => {
            let c = cons::bc2_l2_sigmoid(&grid, gamma, sigmoid_alpha)?;
            Ok((complete_vector(&grid, &c, &bc, m)?.1.breakdown, vec![]))
        }
        _ => {
            let c = cons::scalar_half_construction(&grid, gamma, sigmoid_alpha)?;
            Ok((complete_scalar(&grid, &c, &bc, m)?.1.breakdown, vec![]))
        }
    }
}

fn evaluate_construction(cfg: &RunConfig) -> Result<RunOutput> {
    let name = cfg.name.as_deref().unwrap_or_default();
    let (l, gamma) = (cfg.l.unwrap_or_default(), cfg.gamma.unwrap_or_default());
    let m = MaterialParams::new(cfg.sigma, cfg.tau)?;
    let bc = construction_bc(name)?;
    let (energy, notes) = evaluate_named(name, l, gamma, &m, cfg.n, cfg.epsilon, cfg.alpha)?;
    let bounds = analytic_bounds(bc, l, gamma, cfg.sigma, cfg.tau)?;
    let row = Row::new(l, gamma, cfg.sigma, cfg.tau, energy.total, &bounds, cfg.slack);
    let mut out = RunOutput::new(vec![row], json!({ "construction": name, "energy": energy, "notes": notes, "bounds": bounds }));
    out.grids = vec![grid_note(bc, l, cfg.n)?];
    Ok(out)
}

fn run_minimize(cfg: &RunConfig) -> Result<RunOutput> {
    let (l, gamma) = (cfg.l.unwrap_or_default(), cfg.gamma.unwrap_or_default());
    let grid = grid_for(cfg.bc, l, cfg.n)?;
    let bc = BoundaryCondition::new(cfg.bc, gamma)?;
    let m = MaterialParams::new(cfg.sigma, cfg.tau)?;
    let bounds = analytic_bounds(cfg.bc, l, gamma, cfg.sigma, cfg.tau)?;
    let start = std::time::Instant::now();
    let (energy, details) = match cfg.model {
        SlipModel::SingleSlip => {
            let r = minimize(&grid, &bc, &m, &cfg.solver)?;
            let d = json!({
                "warm_start_used": r.warm_start_used,
                "outer_iterations": r.outer_iterations,
                "converged": r.converged,
                "active_cells": r.p.active_cells(),
                "starts": r.start_log,
            });
            (r.energy, d)
        }
        SlipModel::Relaxed => {
            let r = solve_relaxed(&grid, &bc, &m, None, &cfg.solver)?;
            (r.energy, json!({ "iterations": r.iterations, "converged": r.converged }))
        }
    };
    let mut row = Row::new(l, gamma, cfg.sigma, cfg.tau, energy.total, &bounds, cfg.slack);
    if cfg.timing {
        row.runtime_s = start.elapsed().as_secs_f64();
    }
    let mut out = RunOutput::new(vec![row], json!({ "energy": energy, "bounds": bounds, "solver": details }));
    out.grids = vec![grid_note(cfg.bc, l, cfg.n)?];
    Ok(out)
}

fn run_sweep_l(cfg: &RunConfig) -> Result<RunOutput> {
    let gamma = cfg.gamma.unwrap_or_default();
    let s = sweep_l(cfg.bc, gamma, cfg.sigma, cfg.tau, &cfg.ls, &settings(cfg))?;
    let rows: Vec<Row> = s.records.iter().map(Row::from).collect();
    let failed = failures(&s.records);
    let mut series = vec![Series {
        label: "j_numeric".into(),
        points: rows.iter().map(|r| (r.l, r.j_numeric)).collect(),
        dashed: false,
    }];
    series.extend(bound_series(&rows.iter().map(|r| (r.l, r.lower, r.upper_min)).collect::<Vec<_>>()));
    let mut out = RunOutput::new(
        rows,
        json!({ "monotone": s.monotone, "monotonicity_violations": s.monotonicity_violations, "failed_points": failed, "records": s.records }),
    );
    out.partial = !failed.is_empty();
    out.grids = grid_notes(cfg.bc, &cfg.ls, cfg.n)?;
    out.plot = Some(Plot {
        title: format!("energy against L, gamma = {gamma}, sigma = {}", cfg.sigma),
        x_label: "L".into(),
        y_label: "J".into(),
        log_x: true,
        log_y: true,
        series,
    });
    Ok(out)
}

fn gamma_series(label: &str, g: &GammaSweep) -> Series {
    Series { label: label.into(), points: g.records.iter().map(|r| (r.gamma, r.j_numeric)).collect(), dashed: false }
}

fn run_sweep_gamma(cfg: &RunConfig) -> Result<RunOutput> {
    let l = cfg.l.unwrap_or_default();
    let g = sweep_gamma(cfg.bc, l, cfg.sigma, cfg.tau, &cfg.gammas, &settings(cfg))?;
    let rows: Vec<Row> = g.records.iter().map(Row::from).collect();
    let failed = failures(&g.records);
    let mut series = vec![gamma_series("j_numeric", &g)];
    series.extend(bound_series(&rows.iter().map(|r| (r.gamma, r.lower, r.upper_min)).collect::<Vec<_>>()));
    let mut out = RunOutput::new(
        rows,
        json!({ "exponent": g.exponent, "class": g.class.as_str(), "failed_points": failed, "records": g.records }),
    );
    out.partial = !failed.is_empty();
    out.grids = vec![grid_note(cfg.bc, l, cfg.n)?];
    out.plot = Some(Plot {
        title: format!("energy against gamma, L = {l}, sigma = {}", cfg.sigma),
        x_label: "gamma".into(),
        y_label: "J".into(),
        log_x: true,
        log_y: true,
        series,
    });
    Ok(out)
}

fn run_regime_map(cfg: &RunConfig) -> Result<RunOutput> {
    let table = regime_map(cfg.bc, &cfg.ls, &cfg.gammas, cfg.sigma, &settings(cfg))?;
    let mut rows = Vec::new();
    let mut series = Vec::new();
    let mut failed = Vec::new();
    let mut labels = Vec::new();
    for r in &table {
        for part in [&r.constrained, &r.sigma_zero] {
            rows.extend(part.records.iter().map(Row::from));
            failed.extend(failures(&part.records));
        }
        failed.extend(failures(&r.relaxed.records));
        series.push(gamma_series(&format!("L = {}", r.l), &r.constrained));
        labels.push(json!({
            "l": r.l,
            "constrained": { "class": r.constrained.class.as_str(), "exponent": r.constrained.exponent },
            "sigma_zero": { "class": r.sigma_zero.class.as_str(), "exponent": r.sigma_zero.exponent },
            "relaxed": {
                "class": r.relaxed.class.as_str(),
                "exponent": r.relaxed.exponent,
                "j_numeric": r.relaxed.records.iter().map(|x| x.j_numeric).collect::<Vec<_>>(),
            },
        }));
    }
    let mut out = RunOutput::new(rows, json!({ "regimes": labels, "failed_points": failed }));
    out.partial = !failed.is_empty();
    out.grids = grid_notes(cfg.bc, &cfg.ls, cfg.n)?;
    out.plot = Some(Plot {
        title: format!("scaling with gamma, sigma = {}", cfg.sigma),
        x_label: "gamma".into(),
        y_label: "J".into(),
        log_x: true,
        log_y: true,
        series,
    });
    Ok(out)
}

fn run_boundary_case(cfg: &RunConfig) -> Result<RunOutput> {
    let case = cfg.case.ok_or_else(|| Error::Config("missing case".into()))?;
    let gamma = cfg.gamma.unwrap_or_default();
    let alphas = if cfg.alphas.is_empty() { vec![0.5, 0.2, 0.05] } else { cfg.alphas.clone() };
    let study = boundary_case_study(case, gamma, cfg.sigma, &alphas, cfg.n)?;
    let l = case.height();
    let bounds = analytic_bounds(case.bc_kind(), l, gamma, cfg.sigma, 0.0)?;
    let rows = study.records.iter().map(|r| Row::new(l, gamma, cfg.sigma, 0.0, r.total, &bounds, cfg.slack)).collect();
    let mut series = vec![Series {
        label: "harmonic completion".into(),
        points: study.records.iter().map(|r| (r.alpha, r.total)).collect(),
        dashed: false,
    }];
    let best: Vec<(f64, f64)> = study.records.iter().filter_map(|r| r.optimal_total.map(|v| (r.alpha, v))).collect();
    if !best.is_empty() {
        series.push(Series { label: "best u at fixed beta".into(), points: best, dashed: false });
    }
    let mut out = RunOutput::new(rows, json!({ "case": case.name(), "study": study }));
    out.grids = vec![grid_note(case.bc_kind(), l, cfg.n)?];
    out.plot = Some(Plot {
        title: format!("construction sequence, {}", case.name()),
        x_label: "alpha".into(),
        y_label: "energy".into(),
        log_x: true,
        log_y: true,
        series,
    });
    Ok(out)
}

fn run_q_alpha(cfg: &RunConfig) -> Result<RunOutput> {
    let mut values = Vec::new();
    for (k, &a) in cfg.alphas.iter().enumerate() {
        let q = q_alpha(a)?;
        let mut v = json!({ "alpha": a, "q": q, "q_reflected": q_alpha_reflected(a)? });
        if cfg.mc_samples > 0 {
            let mc = q_alpha_monte_carlo(a, cfg.mc_samples, cfg.rng_seed.wrapping_add(k as u64), false)?;
            v["monte_carlo"] = json!(mc);
            v["within_3_sigma"] = json!((mc.mean - q).abs() <= 3.0 * mc.std_error);
        }
        println!("Q({a}) = {q:.11e}");
        values.push(v);
    }
    let mut out = RunOutput::new(Vec::new(), json!({ "values": values }));
    out.plot = Some(Plot {
        title: "Q(alpha)".into(),
        x_label: "alpha".into(),
        y_label: "Q".into(),
        log_x: true,
        log_y: true,
        series: vec![Series {
            label: "Q".into(),
            points: values.iter().map(|v| (v["alpha"].as_f64().unwrap_or(f64::NAN), v["q"].as_f64().unwrap_or(f64::NAN))).collect(),
            dashed: false,
        }],
    });
    Ok(out)
}

fn run_oracle(cfg: &RunConfig) -> Result<RunOutput> {
    let cases = oracle_check(cfg.instances, cfg.rng_seed, &cfg.solver)?;
    let rows = cases
        .iter()
        .map(|c| {
            let b = analytic_bounds(BcKind::Horizontal, c.l, c.gamma, c.sigma, 0.0)?;
            Ok(Row::new(c.l, c.gamma, c.sigma, 0.0, c.minimized, &b, cfg.slack))
        })
        .collect::<Result<Vec<_>>>()?;
    let all = cases.iter().all(|c| c.matches);
    println!("oracle check: {} of {} instances match", cases.iter().filter(|c| c.matches).count(), cases.len());
    Ok(RunOutput::new(rows, json!({ "all_match": all, "cases": cases })))
}
