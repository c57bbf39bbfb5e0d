use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use singleslip::analysis::{q_alpha, q_alpha_cross, q_alpha_monte_carlo};
use singleslip::energy::{curl_energy, elastic_energy, energy_3d, hardening_energy, slice_energy, total_energy, MaterialParams};
use singleslip::fields::{project_single_slip, DisplacementField, PlasticField, PlasticField3, SlipLabel, SlipPlane};
use singleslip::geometry::{from_rotated, to_rotated, Grid, Grid3};
use singleslip::minimizer::update_labels;

fn random_pair(grid: &Grid, seed: u64) -> (DisplacementField, PlasticField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = DisplacementField { values: (0..grid.num_nodes()).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect() };
    let mut p = PlasticField::for_grid(grid);
    for c in 0..grid.num_cells() {
        p.set(c, SlipLabel::from_index(rng.gen_range(0..3)), rng.gen_range(-2.0..2.0));
    }
    (u, p)
}

fn random_3d(grid: &Grid3, seed: u64) -> (singleslip::fields::Displacement3, PlasticField3) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = singleslip::fields::Displacement3 {
        values: (0..grid.num_nodes()).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect(),
    };
    let planes = [SlipPlane::None, SlipPlane::PlaneXi, SlipPlane::PlaneEta, SlipPlane::PlaneZeta];
    let mut p = PlasticField3::zeros(grid.num_cells());
    for c in 0..grid.num_cells() {
        p.set(c, planes[rng.gen_range(0..4)], [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
    }
    (u, p)
}

proptest! {
    #[test]
    fn rotation_round_trip(a in -1e3f64..1e3, b in -1e3f64..1e3) {
        let w = from_rotated(to_rotated([a, b]));
        prop_assert!((w[0] - a).abs() <= 1e-12 * (1.0 + a.abs()));
        prop_assert!((w[1] - b).abs() <= 1e-12 * (1.0 + b.abs()));
        let r = to_rotated([a, b]);
        prop_assert!((r[0].hypot(r[1]) - a.hypot(b)).abs() <= 1e-12 * (1.0 + a.hypot(b)));
    }

    #[test]
    fn elastic_part_is_quadratic_and_plastic_parts_homogeneous(seed in any::<u64>(), lambda in -3.0f64..3.0) {
        let g = Grid::coarse(1.5, 4).unwrap();
        let (u, p) = random_pair(&g, seed);
        let mut us = u.clone();
        us.values.iter_mut().for_each(|w| { w[0] *= lambda; w[1] *= lambda; });
        let mut ps = p.clone();
        ps.s.iter_mut().for_each(|s| *s *= lambda);
        let e = elastic_energy(&g, &u, &p).unwrap();
        prop_assert!((elastic_energy(&g, &us, &ps).unwrap() - lambda * lambda * e).abs() <= 1e-10 * (1.0 + e));
        let c = curl_energy(&g, &p).unwrap();
        prop_assert!((curl_energy(&g, &ps).unwrap() - lambda.abs() * c).abs() <= 1e-10 * (1.0 + c));
        let h = hardening_energy(&g, &p).unwrap();
        prop_assert!((hardening_energy(&g, &ps).unwrap() - lambda.abs() * h).abs() <= 1e-10 * (1.0 + h));
    }

    #[test]
    fn rigid_translation_costs_nothing(seed in any::<u64>(), a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let g = Grid::coarse(1.0, 4).unwrap();
        let (u, p) = random_pair(&g, seed);
        let mut v = u.clone();
        v.values.iter_mut().for_each(|w| { w[0] += a; w[1] += b; });
        let m = MaterialParams::new(0.3, 0.2).unwrap();
        let (e0, e1) = (total_energy(&g, &u, &p, &m).unwrap().total, total_energy(&g, &v, &p, &m).unwrap().total);
        prop_assert!((e0 - e1).abs() <= 1e-10 * (1.0 + e0));
    }

    #[test]
    fn single_slip_projection_is_idempotent(entries in prop::collection::vec(-2.0f64..2.0, 4 * 6)) {
        let raw: Vec<[[f64; 2]; 2]> = entries.chunks(4).map(|e| [[e[0], e[1]], [e[2], e[3]]]).collect();
        let (p, _) = project_single_slip(&raw);
        let again: Vec<[[f64; 2]; 2]> = (0..raw.len()).map(|c| p.beta_matrix(c)).collect();
        let (q, residual) = project_single_slip(&again);
        prop_assert_eq!(&p, &q);
        prop_assert!(residual.iter().all(|r| *r == 0.0));
    }

    #[test]
    fn label_sweep_never_increases_energy(seed in any::<u64>()) {
        let g = Grid::coarse(1.0, 4).unwrap();
        let (u, mut p) = random_pair(&g, seed);
        let m = MaterialParams::new(0.2, 0.05).unwrap();
        let before = total_energy(&g, &u, &p, &m).unwrap().total;
        update_labels(&g, &u, &mut p, &m);
        prop_assert!(total_energy(&g, &u, &p, &m).unwrap().total <= before + 1e-12 * (1.0 + before));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn slices_never_exceed_the_full_energy(seed in any::<u64>()) {
        let g = Grid3::coarse(1.0, 4).unwrap();
        let (u, p) = random_3d(&g, seed);
        let m = MaterialParams::new(0.4, 0.0).unwrap();
        let full = energy_3d(&g, &u, &p, &m).unwrap().total;
        let sum: f64 = (0..g.nz).map(|k| slice_energy(&g, &u, &p, &m, k).unwrap()).sum::<f64>() * g.h();
        prop_assert!(sum <= full * (1.0 + 1e-12), "{} > {}", sum, full);
    }
}

#[test]
fn monte_carlo_agrees_with_quadrature() {
    for (k, alpha) in [0.1, 0.5, 1.0].into_iter().enumerate() {
        for cross in [false, true] {
            let q = if cross { q_alpha_cross(alpha).unwrap() } else { q_alpha(alpha).unwrap() };
            let mc = q_alpha_monte_carlo(alpha, 200_000, 100 + k as u64, cross).unwrap();
            assert!((mc.mean - q).abs() <= 3.0 * mc.std_error + 1e-12, "alpha {alpha} cross {cross}: {} vs {q}", mc.mean);
        }
    }
}
