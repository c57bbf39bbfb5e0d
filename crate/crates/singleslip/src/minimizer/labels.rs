//! Cellwise slip-system choice at fixed displacement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{cell_gradient, MaterialParams};
use crate::fields::{DisplacementField, PlasticField, SlipComponents, SlipLabel};
use crate::geometry::Grid;

use super::AnnealConfig;

/// Neighbours sharing a curl pair with cell `(i, j)`: along xi, then along eta.
fn neighbours(grid: &Grid, i: usize, j: usize) -> ([Option<usize>; 2], [Option<usize>; 2]) {
    let at = |di: i64, dj: i64| -> Option<usize> {
        let (a, b) = (i as i64 + di, j as i64 + dj);
        (a >= 0 && b >= 0 && (a as usize) < grid.nx && (b as usize) < grid.ny).then(|| grid.cell(a as usize, b as usize))
    };
    ([at(1, 1), at(-1, -1)], [at(-1, 1), at(1, -1)])
}

/// Data of the one-cell problem `min_s a/2 (s - r)^2 + sum w_k |s - b_k|`.
struct LocalProblem {
    area: f64,
    g: [[f64; 2]; 2],
    curl_w: f64,
    hard_w: f64,
    xi: [Option<usize>; 2],
    eta: [Option<usize>; 2],
}

impl LocalProblem {
    fn new(grid: &Grid, u: &DisplacementField, m: &MaterialParams, c: usize) -> Self {
        let (i, j) = grid.cell_ij(c);
        let (xi, eta) = neighbours(grid, i, j);
        Self {
            area: grid.cell_area(),
            g: cell_gradient(grid, u, i, j),
            curl_w: m.sigma * grid.diagonal_weight(),
            hard_w: m.tau * grid.cell_area(),
            xi,
            eta,
        }
    }

    fn energy(&self, p: &PlasticField, label: SlipLabel, s: f64) -> f64 {
        let (xe, ex) = match label {
            SlipLabel::None => (0.0, 0.0),
            SlipLabel::XiEta => (s, 0.0),
            SlipLabel::EtaXi => (0.0, s),
        };
        let g = &self.g;
        let off = g[0][1] + g[1][0] - xe - ex;
        let mut e = self.area * (g[0][0] * g[0][0] + g[1][1] * g[1][1] + 0.5 * off * off);
        for k in self.xi.iter().flatten() {
            e += self.curl_w * (xe - p.xi_eta(*k)).abs();
        }
        for k in self.eta.iter().flatten() {
            e += self.curl_w * (ex - p.eta_xi(*k)).abs();
        }
        e + self.hard_w * (xe.abs() + ex.abs())
    }

    /// Exact minimizer of the convex piecewise quadratic in `s`.
    fn best_s(&self, p: &PlasticField, label: SlipLabel) -> f64 {
        let nbrs = match label {
            SlipLabel::None => return 0.0,
            SlipLabel::XiEta => &self.xi,
            SlipLabel::EtaXi => &self.eta,
        };
        let get = |k: usize| if label == SlipLabel::XiEta { p.xi_eta(k) } else { p.eta_xi(k) };
        let mut kinks: Vec<(f64, f64)> = nbrs.iter().flatten().map(|k| (get(*k), self.curl_w)).collect();
        kinks.push((0.0, self.hard_w));
        kinks.retain(|k| k.1 > 0.0);
        kinks.sort_by(|a, b| a.0.total_cmp(&b.0));
        let r = self.g[0][1] + self.g[1][0];
        // f'(s) = area (s - r) + sum w sign(s - b); on a segment the sign sum is constant.
        let total: f64 = kinks.iter().map(|k| k.1).sum();
        let mut below = 0.0;
        let mut cands: Vec<f64> = kinks.iter().map(|k| k.0).collect();
        for seg in 0..=kinks.len() {
            let slope = below - (total - below);
            let s = r - slope / self.area;
            let lo = if seg == 0 { f64::NEG_INFINITY } else { kinks[seg - 1].0 };
            let hi = if seg == kinks.len() { f64::INFINITY } else { kinks[seg].0 };
            if s > lo && s < hi {
                cands.push(s);
            }
            if seg < kinks.len() {
                below += kinks[seg].1;
            }
        }
        let f = |s: f64| 0.5 * self.area * (s - r) * (s - r) + kinks.iter().map(|k| k.1 * (s - k.0).abs()).sum::<f64>();
        cands.into_iter().fold((r, f(r)), |best, s| if f(s) < best.1 { (s, f(s)) } else { best }).0
    }

    /// Best label in preference order none, eta_xi, xi_eta.
    fn best(&self, p: &PlasticField) -> (SlipLabel, f64, f64) {
        let mut best = (SlipLabel::None, 0.0, self.energy(p, SlipLabel::None, 0.0));
        for label in [SlipLabel::EtaXi, SlipLabel::XiEta] {
            let s = self.best_s(p, label);
            let e = self.energy(p, label, s);
            if e < best.2 - 1e-14 * best.2.abs().max(1e-300) {
                best = (label, s, e);
            }
        }
        best
    }
}

/// Energy terms that involve cell `c` when it carries `label` with magnitude `s`.
pub fn local_energy(
    grid: &Grid,
    u: &DisplacementField,
    p: &PlasticField,
    m: &MaterialParams,
    c: usize,
    label: SlipLabel,
    s: f64,
) -> f64 {
    LocalProblem::new(grid, u, m, c).energy(p, label, s)
}

/// One lexicographic sweep choosing each cell's label and magnitude to
/// minimize its local energy exactly; returns the number of label changes.
/// The total energy does not increase.
pub fn update_labels(grid: &Grid, u: &DisplacementField, p: &mut PlasticField, m: &MaterialParams) -> usize {
    let mut changed = 0;
    for c in 0..grid.num_cells() {
        let lp = LocalProblem::new(grid, u, m, c);
        let current = lp.energy(p, p.labels[c], p.s[c]);
        let (label, s, e) = lp.best(p);
        if label != p.labels[c] {
            // Keep the current label unless the switch strictly helps.
            let same_s = lp.best_s(p, p.labels[c]);
            let same_e = lp.energy(p, p.labels[c], same_s);
            if e < same_e - 1e-14 * same_e.abs().max(1e-300) {
                p.set(c, label, s);
                changed += 1;
            } else if same_e <= current {
                p.set(c, p.labels[c], same_s);
            }
        } else if e <= current {
            p.set(c, label, s);
        }
    }
    changed
}

/// Metropolis search over labels at fixed displacement. Moves relabel one
/// cell or a 2x2 block at random, each cell taking its optimal magnitude.
/// The best labelling visited is written back.
pub fn anneal(grid: &Grid, u: &DisplacementField, p: &mut PlasticField, m: &MaterialParams, cfg: &AnnealConfig) {
    let cells = grid.num_cells();
    if cells == 0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let probs: Vec<LocalProblem> = (0..cells).map(|c| LocalProblem::new(grid, u, m, c)).collect();
    let total: f64 = crate::energy::total_energy(grid, u, p, m).map(|e| e.total).unwrap_or(0.0);
    let scale = (total / cells as f64).max(f64::MIN_POSITIVE);
    let ratio = if cfg.steps > 1 { (cfg.t_end / cfg.t_start).powf(1.0 / (cfg.steps - 1) as f64) } else { 1.0 };
    let mut current = p.clone();
    let mut offset = 0.0;
    let mut best_offset = 0.0;
    let mut t = cfg.t_start;
    for _ in 0..cfg.steps {
        let temp = t * scale;
        for _ in 0..cfg.sweeps * cells {
            let c = rng.gen_range(0..cells);
            let (i, j) = grid.cell_ij(c);
            let block = rng.gen::<bool>() && i + 1 < grid.nx && j + 1 < grid.ny;
            let members: Vec<usize> = if block {
                vec![c, grid.cell(i + 1, j), grid.cell(i, j + 1), grid.cell(i + 1, j + 1)]
            } else {
                vec![c]
            };
            let mut trial = current.clone();
            let mut delta = 0.0;
            for &k in &members {
                let label = SlipLabel::from_index(rng.gen_range(0..3));
                let before = probs[k].energy(&trial, trial.labels[k], trial.s[k]);
                let s = probs[k].best_s(&trial, label);
                let after = probs[k].energy(&trial, label, s);
                trial.set(k, label, s);
                delta += after - before;
            }
            if delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp() {
                current = trial;
                offset += delta;
                if offset < best_offset - 1e-15 * scale {
                    best_offset = offset;
                    *p = current.clone();
                }
            }
        }
        t *= ratio;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::total_energy;
    use crate::geometry::BoundaryCondition;

    #[test]
    fn sweep_never_increases_energy() {
        let g = Grid::coarse(1.0, 6).unwrap();
        let bc = BoundaryCondition::horizontal(0.3);
        let m = MaterialParams::new(0.05, 0.01).unwrap();
        let mut u = DisplacementField::from_fn(&g, |x1, x2| [0.3 * x2 + 0.05 * (7.0 * x1).sin(), 0.1 * x1 * x2]);
        u.apply_bc(&g, &bc);
        let mut p = PlasticField::for_grid(&g);
        for c in 0..g.num_cells() {
            p.set(c, SlipLabel::from_index(c % 3), 0.1 * (c as f64).cos());
        }
        let mut e = total_energy(&g, &u, &p, &m).unwrap().total;
        for _ in 0..4 {
            update_labels(&g, &u, &mut p, &m);
            let e2 = total_energy(&g, &u, &p, &m).unwrap().total;
            assert!(e2 <= e + 1e-14, "{e2} > {e}");
            e = e2;
        }
    }

    #[test]
    fn local_minimizer_beats_grid_search() {
        let g = Grid::coarse(1.0, 4).unwrap();
        let m = MaterialParams::new(0.2, 0.05).unwrap();
        let u = DisplacementField::from_fn(&g, |x1, x2| [0.4 * x2 * x2, 0.2 * x1]);
        let mut p = PlasticField::for_grid(&g);
        for c in 0..g.num_cells() {
            p.set(c, SlipLabel::XiEta, 0.05 * c as f64 - 0.2);
        }
        let lp = LocalProblem::new(&g, &u, &m, 5);
        for label in [SlipLabel::XiEta, SlipLabel::EtaXi] {
            let s = lp.best_s(&p, label);
            let e = lp.energy(&p, label, s);
            for k in -2000..=2000 {
                let t = k as f64 * 1e-3;
                assert!(e <= lp.energy(&p, label, t) + 1e-15);
            }
        }
    }

    #[test]
    fn local_energy_tracks_total() {
        let g = Grid::coarse(1.0, 4).unwrap();
        let m = MaterialParams::new(0.3, 0.1).unwrap();
        let u = DisplacementField::from_fn(&g, |x1, x2| [x1 * x2, 0.3 * x2]);
        let mut p = PlasticField::for_grid(&g);
        p.set(3, SlipLabel::EtaXi, 0.2);
        let c = 6;
        let e0 = total_energy(&g, &u, &p, &m).unwrap().total - local_energy(&g, &u, &p, &m, c, SlipLabel::None, 0.0);
        let mut q = p.clone();
        q.set(c, SlipLabel::XiEta, 0.7);
        let e1 = total_energy(&g, &u, &q, &m).unwrap().total - local_energy(&g, &u, &p, &m, c, SlipLabel::XiEta, 0.7);
        assert!((e0 - e1).abs() < 1e-14);
    }
}
