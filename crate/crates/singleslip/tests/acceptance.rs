//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria listed in `KNOWN_FAILING` are reported but do not fail the run;
//! see the README for why they stay open. Any other failure exits non-zero.

use std::f64::consts::SQRT_2;
use std::fs;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use singleslip::analysis::{q_alpha, q_alpha_monte_carlo};
use singleslip::cli::{self, RunConfig};
use singleslip::constructions::{
    bc1_elastic, bc1_shear_band, bc2_crossing_bands, bc2_double_band, bc2_elastic, extrude_3d, laminate_burgers,
};
use singleslip::energy::{energy_3d, slice_energy, total_energy, MaterialParams};
use singleslip::fields::{Displacement3, PlasticField3, SlipPlane};
use singleslip::geometry::{make_grid, make_grid3, BcKind, BoundaryCondition, Dimension, DomainSpec, Grid3};
use singleslip::minimizer::{minimize, oracle_check, SolverConfig};
use singleslip::sweep::{
    boundary_case_study, run_point, sweep_gamma, sweep_l, BoundaryCase, SlipModel, SweepSettings,
};

const KNOWN_FAILING: &[usize] = &[9];

type Outcome = Result<(bool, String), String>;

fn grid(l: f64, n: usize) -> singleslip::geometry::Grid {
    make_grid(&DomainSpec::two_d(l).unwrap(), n).unwrap()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn closed_form_constructions() -> Outcome {
    let (gamma, target) = (0.1, 2.0 * SQRT_2 * 0.1 * 0.2);
    let g = grid(1.5, 128);
    let m = MaterialParams::new(0.2, 0.0).map_err(err)?;
    let c = bc2_crossing_bands(&g, gamma).map_err(err)?;
    let e = total_energy(&g, &c.u, &c.p, &m).map_err(err)?;
    let rel = (e.total - target).abs() / target;
    let s = bc1_shear_band(&g, gamma, 0.1).map_err(err)?;
    let es = total_energy(&g, &s.u, &s.p, &m).map_err(err)?.total;
    let g25 = grid(2.5, 128);
    let d = bc2_double_band(&g25, gamma).map_err(err)?;
    let ed = total_energy(&g25, &d.u, &d.p, &m).map_err(err)?.total;
    let ok = rel < 0.02 && e.elastic < 1e-3 * e.total && es <= 1e-10 && ed <= 1e-10;
    Ok((ok, format!("crossing {:.6e} (rel {rel:.2e}, elastic {:.2e}); shear band {es:.2e}; double band {ed:.2e}", e.total, e.elastic)))
}

fn elastic_baselines() -> Outcome {
    let g = grid(0.5, 64);
    let m = MaterialParams::new(0.1, 0.0).map_err(err)?;
    let c2 = bc2_elastic(&g, 0.1).map_err(err)?;
    let c1 = bc1_elastic(&g, 0.1).map_err(err)?;
    let e2 = total_energy(&g, &c2.u, &c2.p, &m).map_err(err)?.total;
    let e1 = total_energy(&g, &c1.u, &c1.p, &m).map_err(err)?.total;
    Ok(((e2 - 0.01).abs() <= 1e-5 && (e1 - 0.03).abs() <= 1e-5, format!("BC2 {e2:.8}, BC1 {e1:.8}")))
}

fn quadratic_bracket() -> Outcome {
    let r = minimize(&grid(0.5, 64), &BoundaryCondition::horizontal(0.1), &MaterialParams::new(0.1, 0.0).map_err(err)?, &SolverConfig::default())
        .map_err(err)?;
    let j = r.energy.total;
    Ok(((0.9 * 0.005..=1.1 * 0.01).contains(&j), format!("j = {j:.6e} in [4.5e-3, 1.1e-2]")))
}

fn zero_regime() -> Outcome {
    let gamma = 0.2;
    let r = minimize(&grid(2.5, 32), &BoundaryCondition::horizontal(gamma), &MaterialParams::new(0.1, 0.0).map_err(err)?, &SolverConfig::default())
        .map_err(err)?;
    Ok((r.energy.total <= 1e-4 * gamma * gamma, format!("j = {:.3e}, limit {:.1e}", r.energy.total, 1e-4 * gamma * gamma)))
}

fn linear_exponent() -> Outcome {
    let s = sweep_gamma(BcKind::Horizontal, 1.5, 0.1, 0.0, &[2.0, 4.0, 8.0, 16.0], &SweepSettings::new(64)).map_err(err)?;
    let below = s.records.iter().all(|r| r.j_numeric <= 2.0 * SQRT_2 * r.gamma * 0.1 * 1.05);
    let p = s.exponent.unwrap_or(f64::NAN);
    let js: Vec<String> = s.records.iter().map(|r| format!("{:.4e}", r.j_numeric)).collect();
    Ok(((0.75..=1.25).contains(&p) && below, format!("exponent {p:.3}, j = [{}], all below 1.05 * 2 sqrt2 gamma sigma: {below}", js.join(", "))))
}

fn quadratic_exponent() -> Outcome {
    let s = sweep_gamma(BcKind::Horizontal, 0.5, 0.1, 0.0, &[0.5, 1.0, 2.0, 4.0], &SweepSettings::new(32)).map_err(err)?;
    let p = s.exponent.unwrap_or(f64::NAN);
    Ok(((1.8..=2.2).contains(&p), format!("exponent {p:.3}")))
}

fn ablation() -> Outcome {
    let s = SweepSettings::new(32);
    let (l, gamma) = (1.5, 2.0);
    let constrained = run_point(BcKind::Horizontal, l, gamma, 0.1, 0.0, &s).map_err(err)?.j_numeric;
    let no_curl = run_point(BcKind::Horizontal, l, gamma, 0.0, 0.0, &s).map_err(err)?.j_numeric;
    let relaxed = SweepSettings { model: SlipModel::Relaxed, ..s.clone() };
    let both = run_point(BcKind::Horizontal, l, gamma, 0.1, 0.0, &relaxed).map_err(err)?.j_numeric;
    let ok = constrained > 0.0 && no_curl <= 1e-3 * constrained && both <= 1e-3 * constrained;
    Ok((ok, format!("constrained {constrained:.4e}, sigma = 0 {no_curl:.2e}, relaxed {both:.2e}")))
}

fn monotonicity() -> Outcome {
    let ls = [0.5, 0.8, 1.0, 1.3, 1.6, 2.0, 2.4];
    let s = sweep_l(BcKind::Horizontal, 0.1, 0.1, 0.0, &ls, &SweepSettings::new(40)).map_err(err)?;
    let js: Vec<String> = s.records.iter().map(|r| format!("{:.4e}", r.j_numeric)).collect();
    Ok((s.monotone, format!("j = [{}], violations at {:?}", js.join(", "), s.monotonicity_violations)))
}

fn boundary_cases() -> Outcome {
    let alphas = [0.5, 0.2, 0.05];
    let mut ok = true;
    let mut notes = Vec::new();
    let decays = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]) && v[2] < 0.25 * v[0];
    for case in [BoundaryCase::Bc1L1, BoundaryCase::Bc2L2, BoundaryCase::ScalarLHalf] {
        let s = boundary_case_study(case, 0.1, 0.1, &alphas, 64).map_err(err)?;
        let harmonic: Vec<f64> = s.records.iter().map(|r| r.total).collect();
        let best: Option<Vec<f64>> = s.records.iter().map(|r| r.optimal_total).collect();
        let pass = decays(&harmonic) || best.as_deref().is_some_and(decays);
        ok &= pass;
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join("/");
        notes.push(format!(
            "{} harmonic {}{}",
            case.name(),
            fmt(&harmonic),
            best.map(|b| format!(", best u {}", fmt(&b))).unwrap_or_default()
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn trace_seminorm() -> Outcome {
    let grid = [0.05, 0.1, 0.2, 0.5, 1.0];
    let q: Vec<f64> = grid.iter().map(|a| q_alpha(*a)).collect::<Result<_, _>>().map_err(err)?;
    let increasing = q.windows(2).all(|w| w[1] > w[0]);
    let mut mc_ok = true;
    for (k, a) in [0.1, 0.5, 1.0].into_iter().enumerate() {
        let mc = q_alpha_monte_carlo(a, 1_000_000, 7 + k as u64, false).map_err(err)?;
        mc_ok &= (mc.mean - q_alpha(a).map_err(err)?).abs() <= 3.0 * mc.std_error + 1e-12;
    }
    let ok = (q[4] - 1.0).abs() <= 1e-3 && increasing && q[0] < 0.15 && mc_ok;
    Ok((ok, format!("Q(1) = {:.6}, Q(0.05) = {:.4}, increasing {increasing}, Monte Carlo within 3 sigma {mc_ok}", q[4], q[0])))
}

fn oracle() -> Outcome {
    let cases = oracle_check(20, 42, &SolverConfig::default()).map_err(err)?;
    let worst = cases.iter().map(|c| (c.minimized - c.exhaustive).abs() / c.exhaustive.max(1e-300)).fold(0.0, f64::max);
    let n_ok = cases.iter().filter(|c| c.matches).count();
    Ok((n_ok == cases.len(), format!("{n_ok}/{} match, worst relative gap {worst:.1e}", cases.len())))
}

fn random_3d(grid: &Grid3, rng: &mut ChaCha8Rng) -> (Displacement3, PlasticField3) {
    let u = Displacement3 { values: (0..grid.num_nodes()).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect() };
    let planes = [SlipPlane::None, SlipPlane::PlaneXi, SlipPlane::PlaneEta, SlipPlane::PlaneZeta];
    let mut p = PlasticField3::zeros(grid.num_cells());
    for c in 0..grid.num_cells() {
        p.set(c, planes[rng.gen_range(0..4)], [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
    }
    (u, p)
}

fn three_d() -> Outcome {
    let n = 16;
    let m = MaterialParams::new(0.2, 0.0).map_err(err)?;
    let g2 = grid(1.5, n);
    let g3 = make_grid3(&DomainSpec::new(1.5, Dimension::ThreeD).map_err(err)?, n).map_err(err)?;
    let c = bc2_crossing_bands(&g2, 0.1).map_err(err)?;
    let (u3, p3) = extrude_3d(&g3, &c.u, &c.p).map_err(err)?;
    let e2 = total_energy(&g2, &c.u, &c.p, &m).map_err(err)?.total;
    let e3 = energy_3d(&g3, &u3, &p3, &m).map_err(err)?;
    let lam = energy_3d(&g3, &u3, &laminate_burgers(&g3, &p3, 4.0 * g3.h()).map_err(err)?, &m).map_err(err)?;
    let ratio = lam.curl_raw / e3.curl_raw;

    let small = Grid3::coarse(1.0, 4).map_err(err)?;
    let ms = MaterialParams::new(0.4, 0.0).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut slices_ok = true;
    for _ in 0..100 {
        let (u, p) = random_3d(&small, &mut rng);
        let full = energy_3d(&small, &u, &p, &ms).map_err(err)?.total;
        let sum: f64 = (0..small.nz).map(|k| slice_energy(&small, &u, &p, &ms, k)).sum::<Result<f64, _>>().map_err(err)? * small.h();
        slices_ok &= sum <= full * (1.0 + 1e-12);
    }
    let ok = (e3.total - e2).abs() <= 1e-8 && (ratio / SQRT_2 - 1.0).abs() <= 0.05 && slices_ok;
    Ok((ok, format!("extruded gap {:.1e}, laminated curl ratio {ratio:.4} at period 4h, slice inequality on 100 fields {slices_ok}", (e3.total - e2).abs())))
}

fn hardening() -> Outcome {
    let (gamma, tau) = (0.1, 0.05);
    let g = grid(2.5, 64);
    let c = bc2_double_band(&g, gamma).map_err(err)?;
    let e0 = total_energy(&g, &c.u, &c.p, &MaterialParams::new(0.1, 0.0).map_err(err)?).map_err(err)?;
    let e1 = total_energy(&g, &c.u, &c.p, &MaterialParams::new(0.1, tau).map_err(err)?).map_err(err)?;
    let coefficient = e1.hardening_raw / gamma;
    let unchanged = e0.elastic == e1.elastic && e0.curl == e1.curl;
    let ok = e1.total <= 1.05 * tau * gamma * coefficient && unchanged;
    Ok((ok, format!("total {:.4e}, raw coefficient {coefficient:.4} (bound {:.4e}), other parts unchanged {unchanged}", e1.total, 1.05 * tau * gamma * coefficient)))
}

fn determinism() -> Outcome {
    let base = std::env::temp_dir().join(format!("singleslip_acceptance_{}", std::process::id()));
    let text = "command=sweep-L bc=bc2 ls=0.5,1.0,1.5,2.5 gamma=0.1 sigma=0.1 n=16 rng_seed=5";
    let mut csv = Vec::new();
    for (k, workers) in ["1", "3"].into_iter().enumerate() {
        std::env::set_var(cli::WORKERS_ENV, workers);
        let dir = base.join(k.to_string());
        let cfg = RunConfig::from_text(text, &[format!("output_dir={}", dir.display())]).map_err(err)?;
        cli::run(&cfg).map_err(err)?;
        csv.push(fs::read(dir.join("records.csv")).map_err(err)?);
    }
    std::env::remove_var(cli::WORKERS_ENV);
    let _ = fs::remove_dir_all(&base);
    Ok((csv[0] == csv[1], format!("{} bytes, identical {}", csv[0].len(), csv[0] == csv[1])))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("closed-form construction energies", closed_form_constructions),
        ("elastic baselines", elastic_baselines),
        ("bound bracketing, quadratic regime", quadratic_bracket),
        ("zero regime", zero_regime),
        ("linear regime exponent", linear_exponent),
        ("quadratic regime exponent", quadratic_exponent),
        ("ablation", ablation),
        ("monotonicity in L", monotonicity),
        ("boundary continuity cases", boundary_cases),
        ("trace seminorm Q", trace_seminorm),
        ("exhaustive-search oracle", oracle),
        ("3-d consistency", three_d),
        ("hardening", hardening),
        ("determinism", determinism),
    ];
    let mut unexpected = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let id = k + 1;
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let known = KNOWN_FAILING.contains(&id);
        let tag = match (ok, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{tag} {id:>2} {name} [{:.1} s]: {detail}", start.elapsed().as_secs_f64());
        if !ok && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
