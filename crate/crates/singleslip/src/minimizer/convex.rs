//! Convex subproblem at a fixed slip-system assignment.
//!
//! Unknowns are the free nodal displacements and one plastic magnitude per
//! active slip component. The energy is a sum of squared affine forms
//! (elastic) and weighted absolute values of affine forms `K x + o` (curl,
//! hardening). The absolute values are Huber-smoothed and the problem is
//! solved by ADMM on the splitting `z = K x + o`: the x-step is a sparse
//! Cholesky solve with a matrix that only changes with the penalty, the
//! z-step is the closed-form Huber prox. The Huber width follows a short
//! continuation down to its final value.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{Pair, SparseColMat, SymbolicSparseColMat};
use faer::{Col, Side};

use crate::energy::{total_energy, EnergyBreakdown, MaterialParams};
use crate::error::{Error, Result};
use crate::fields::{DisplacementField, PlasticField, RelaxedPlasticField, SlipComponents, SlipLabel};
use crate::geometry::{BoundaryCondition, Grid, SQRT2};

use super::SolverConfig;

/// Which plastic components are unknowns in a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Slots {
    Single(SlipLabel),
    Both,
    /// Plastic components held at the given values.
    Fixed(f64, f64),
}

/// Affine forms `t = sum coef * x[idx] + offset`, stored flat.
#[derive(Debug, Default, Clone)]
struct Forms {
    start: Vec<usize>,
    idx: Vec<usize>,
    coef: Vec<f64>,
    offset: Vec<f64>,
    weight: Vec<f64>,
}

impl Forms {
    fn push(&mut self, entries: &[(Option<usize>, f64)], offset: f64, weight: f64) -> bool {
        if self.start.is_empty() {
            self.start.push(0);
        }
        let before = self.idx.len();
        for &(v, c) in entries {
            if let Some(v) = v {
                if c != 0.0 {
                    self.idx.push(v);
                    self.coef.push(c);
                }
            }
        }
        if self.idx.len() == before {
            return false;
        }
        self.start.push(self.idx.len());
        self.offset.push(offset);
        self.weight.push(weight);
        true
    }

    fn len(&self) -> usize {
        self.offset.len()
    }

    fn range(&self, k: usize) -> std::ops::Range<usize> {
        self.start[k]..self.start[k + 1]
    }

    fn eval(&self, k: usize, x: &[f64]) -> f64 {
        let mut t = self.offset[k];
        for e in self.range(k) {
            t += self.coef[e] * x[self.idx[e]];
        }
        t
    }
}

/// Relative weight of the proximal term; small enough not to slow the iteration.
const PROX: f64 = 1e-9;
/// Initial ADMM penalty per unit cell area.
const RHO_CELL: f64 = 1.0;
/// Iterations between penalty adjustments.
const RHO_INTERVAL: usize = 20;
/// Absolute residual floor as a fraction of the typical magnitude.
const ABS_FRACTION: f64 = 1e-3;

struct QuadPart {
    vals: Vec<f64>,
    rhs: Vec<f64>,
    diag: Vec<f64>,
}

/// The assembled problem for one assignment of slots.
struct Problem {
    n_vars: usize,
    node_var: Vec<Option<usize>>,
    xe_var: Vec<Option<usize>>,
    ex_var: Vec<Option<usize>>,
    quad: Forms,
    abs: Forms,
    /// Abs forms are grouped; a group's value is the Euclidean norm of its members.
    group_start: Vec<usize>,
    fixed: Vec<[f64; 2]>,
}

impl Problem {
    fn build(grid: &Grid, bc: &BoundaryCondition, m: &MaterialParams, slots: &[Slots]) -> Problem {
        let mut n_vars = 0;
        let mut node_var = vec![None; grid.num_nodes()];
        for (k, v) in node_var.iter_mut().enumerate() {
            if !grid.is_dirichlet(k) {
                *v = Some(n_vars);
                n_vars += 2;
            }
        }
        let mut xe_var = vec![None; grid.num_cells()];
        let mut ex_var = vec![None; grid.num_cells()];
        let mut xe_fixed = vec![0.0; grid.num_cells()];
        let mut ex_fixed = vec![0.0; grid.num_cells()];
        for (c, s) in slots.iter().enumerate() {
            match s {
                Slots::Single(SlipLabel::None) => {}
                Slots::Fixed(a, b) => {
                    xe_fixed[c] = *a;
                    ex_fixed[c] = *b;
                }
                Slots::Single(SlipLabel::XiEta) => {
                    xe_var[c] = Some(n_vars);
                    n_vars += 1;
                }
                Slots::Single(SlipLabel::EtaXi) => {
                    ex_var[c] = Some(n_vars);
                    n_vars += 1;
                }
                Slots::Both => {
                    xe_var[c] = Some(n_vars);
                    ex_var[c] = Some(n_vars + 1);
                    n_vars += 2;
                }
            }
        }
        let mut fixed = vec![[0.0; 2]; grid.num_nodes()];
        let top = bc.top_rotated();
        for i in 0..=grid.nx {
            fixed[grid.node(i, grid.ny)] = top;
        }
        let comp = |k: usize, a: usize| node_var[k].map(|v| v + a);
        let d = 1.0 / (SQRT2 * grid.h);
        let area = grid.cell_area();

        let mut quad = Forms::default();
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let c = grid.cell(i, j);
                let [sw, se, nw, ne] = grid.cell_nodes(i, j);
                let off = |k: usize, a: usize, sign: f64| -> f64 {
                    if node_var[k].is_none() {
                        sign * fixed[k][a] * d
                    } else {
                        0.0
                    }
                };
                // d_xi u_xi and d_eta u_eta
                quad.push(
                    &[(comp(ne, 0), d), (comp(sw, 0), -d)],
                    off(ne, 0, 1.0) + off(sw, 0, -1.0),
                    area,
                );
                quad.push(
                    &[(comp(nw, 1), d), (comp(se, 1), -d)],
                    off(nw, 1, 1.0) + off(se, 1, -1.0),
                    area,
                );
                // shear: d_eta u_xi + d_xi u_eta - beta_xi_eta - beta_eta_xi
                let shear_off = off(nw, 0, 1.0) + off(se, 0, -1.0) + off(ne, 1, 1.0) + off(sw, 1, -1.0);
                quad.push(
                    &[
                        (comp(nw, 0), d),
                        (comp(se, 0), -d),
                        (comp(ne, 1), d),
                        (comp(sw, 1), -d),
                        (xe_var[c], -1.0),
                        (ex_var[c], -1.0),
                    ],
                    shear_off - xe_fixed[c] - ex_fixed[c],
                    0.5 * area,
                );
            }
        }

        let mut abs = Forms::default();
        let mut group_start = vec![0];
        let wc = m.sigma * grid.diagonal_weight();
        if wc > 0.0 {
            for (a, b) in grid.xi_pairs() {
                if abs.push(&[(xe_var[a], 1.0), (xe_var[b], -1.0)], xe_fixed[a] - xe_fixed[b], wc) {
                    group_start.push(abs.len());
                }
            }
            for (a, b) in grid.eta_pairs() {
                if abs.push(&[(ex_var[a], 1.0), (ex_var[b], -1.0)], ex_fixed[a] - ex_fixed[b], wc) {
                    group_start.push(abs.len());
                }
            }
        }
        let wh = m.tau * area;
        if wh > 0.0 {
            for c in 0..grid.num_cells() {
                let mut pushed = false;
                pushed |= abs.push(&[(xe_var[c], 1.0)], 0.0, wh);
                pushed |= abs.push(&[(ex_var[c], 1.0)], 0.0, wh);
                if pushed {
                    group_start.push(abs.len());
                }
            }
        }
        Problem { n_vars, node_var, xe_var, ex_var, quad, abs, group_start, fixed }
    }

    fn groups(&self) -> usize {
        self.group_start.len() - 1
    }

    fn group_norm(&self, g: usize, t: &[f64]) -> f64 {
        let r = self.group_start[g]..self.group_start[g + 1];
        if r.len() == 1 {
            t[r.start].abs()
        } else {
            t[r].iter().map(|v| v * v).sum::<f64>().sqrt()
        }
    }

    fn abs_values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.abs.len()).map(|k| self.abs.eval(k, x)).collect()
    }

    fn pattern(&self) -> Vec<Pair<usize, usize>> {
        let mut p = Vec::new();
        for v in 0..self.n_vars {
            p.push(Pair::new(v, v));
        }
        for forms in [&self.quad, &self.abs] {
            for k in 0..forms.len() {
                let r = forms.range(k);
                for a in r.clone() {
                    for b in r.start..=a {
                        let (i, j) = (forms.idx[a], forms.idx[b]);
                        p.push(Pair::new(i.max(j), i.min(j)));
                    }
                }
            }
        }
        p
    }

    /// Matrix values in pattern order and the right-hand side for the given
    /// abs-form factors, with a proximal term `PROX * diag(A) |x - x_k|^2`
    /// that keeps the factorization stable when the factors are huge.
    fn system(&self, factors: &[f64], x: &[f64], quad: &QuadPart) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut vals = Vec::with_capacity(quad.vals.len() + 3 * self.abs.idx.len());
        vals.extend_from_slice(&quad.vals);
        let mut diag = quad.diag.clone();
        let mut rhs = quad.rhs.clone();
        for k in 0..self.abs.len() {
            let f = factors[k];
            let r = self.abs.range(k);
            for a in r.clone() {
                for b in r.start..=a {
                    let mut v = f * self.abs.coef[a] * self.abs.coef[b];
                    if a != b && self.abs.idx[a] == self.abs.idx[b] {
                        v *= 2.0;
                    }
                    if a == b {
                        diag[self.abs.idx[a]] += v;
                    }
                    vals.push(v);
                }
                rhs[self.abs.idx[a]] -= f * self.abs.coef[a] * self.abs.offset[k];
            }
        }
        let mut shifts = vec![0.0; self.n_vars];
        for v in 0..self.n_vars {
            shifts[v] = PROX * diag[v] + 1e-300;
            vals[v] += shifts[v];
        }
        let _ = x;
        (vals, rhs, shifts)
    }

    /// Constant (elastic) part of the matrix values and right-hand side.
    fn quadratic_part(&self) -> QuadPart {
        let mut vals = vec![0.0; self.n_vars];
        let mut rhs = vec![0.0; self.n_vars];
        let mut diag = vec![0.0; self.n_vars];
        for k in 0..self.quad.len() {
            let q = 2.0 * self.quad.weight[k];
            let r = self.quad.range(k);
            for a in r.clone() {
                for b in r.start..=a {
                    let mut v = q * self.quad.coef[a] * self.quad.coef[b];
                    if a != b && self.quad.idx[a] == self.quad.idx[b] {
                        v *= 2.0;
                    }
                    if a == b {
                        diag[self.quad.idx[a]] += v;
                    }
                    vals.push(v);
                }
                rhs[self.quad.idx[a]] -= q * self.quad.coef[a] * self.quad.offset[k];
            }
        }
        QuadPart { vals, rhs, diag }
    }

    /// `out += rho * K^T v` for abs-form values `v(k)`.
    fn add_kt(&self, out: &mut [f64], rho: f64, v: impl Fn(usize) -> f64) {
        for k in 0..self.abs.len() {
            let t = rho * v(k);
            for e in self.abs.range(k) {
                out[self.abs.idx[e]] += t * self.abs.coef[e];
            }
        }
    }

    /// In-place prox of `sum_g w_g H_delta(|z_g|) / rho`.
    fn huber_prox(&self, z: &mut [f64], rho: f64, delta: f64) {
        for g in 0..self.groups() {
            let range = self.group_start[g]..self.group_start[g + 1];
            let lam = self.abs.weight[range.start] / rho;
            let r = self.group_norm(g, z);
            let f = if r <= delta + lam { delta / (delta + lam) } else { 1.0 - lam / r };
            for k in range {
                z[k] *= f;
            }
        }
    }

    fn initial(&self, u: &DisplacementField, p: &impl SlipComponents) -> Vec<f64> {
        let mut x = vec![0.0; self.n_vars];
        for (k, v) in self.node_var.iter().enumerate() {
            if let Some(v) = v {
                x[*v] = u.values[k][0];
                x[*v + 1] = u.values[k][1];
            }
        }
        for c in 0..self.xe_var.len() {
            if let Some(v) = self.xe_var[c] {
                x[v] = p.xi_eta(c);
            }
            if let Some(v) = self.ex_var[c] {
                x[v] = p.eta_xi(c);
            }
        }
        x
    }

    fn displacement(&self, x: &[f64]) -> DisplacementField {
        let values = self
            .node_var
            .iter()
            .enumerate()
            .map(|(k, v)| match v {
                Some(v) => [x[*v], x[*v + 1]],
                None => self.fixed[k],
            })
            .collect();
        DisplacementField { values }
    }

    fn relaxed(&self, x: &[f64]) -> RelaxedPlasticField {
        let pick = |v: &Option<usize>| v.map_or(0.0, |v| x[v]);
        RelaxedPlasticField {
            xi_eta: self.xe_var.iter().map(pick).collect(),
            eta_xi: self.ex_var.iter().map(pick).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexOutcome {
    pub u: DisplacementField,
    pub xi_eta: Vec<f64>,
    pub eta_xi: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes the Huber-smoothed energy with continuation in `delta`.
/// `iterations` counts ADMM steps.
pub(crate) fn solve_slots(
    grid: &Grid,
    bc: &BoundaryCondition,
    m: &MaterialParams,
    slots: &[Slots],
    init: (&DisplacementField, &dyn Fn(usize) -> (f64, f64)),
    cfg: &SolverConfig,
) -> Result<ConvexOutcome> {
    let prob = Problem::build(grid, bc, m, slots);
    let init_field = InitField { n: grid.num_cells(), f: init.1 };
    let mut x = prob.initial(init.0, &init_field);
    if prob.n_vars == 0 {
        return Ok(ConvexOutcome {
            u: prob.displacement(&x),
            xi_eta: vec![0.0; grid.num_cells()],
            eta_xi: vec![0.0; grid.num_cells()],
            iterations: 0,
            converged: true,
        });
    }
    let pattern = prob.pattern();
    let (symbolic, argsort) = SymbolicSparseColMat::try_new_from_indices(prob.n_vars, prob.n_vars, &pattern)
        .map_err(|e| Error::SolverDiverged(format!("sparsity pattern: {e:?}")))?;
    let sym_llt = SymbolicLlt::try_new(symbolic.as_ref(), Side::Lower)
        .map_err(|e| Error::SolverDiverged(format!("symbolic factorization: {e:?}")))?;
    let quad = prob.quadratic_part();
    // Gradient tolerances are relative to the load vector of the elastic problem.
    let load = quad.rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);

    let scale = cfg.beta_scale(bc.gamma, grid.height);
    let delta_final = cfg.huber_delta_final * scale;
    let mut delta = (cfg.huber_delta * scale).max(delta_final);
    let n_abs = prob.abs.len();
    let mut iterations = 0;
    if n_abs == 0 {
        let (vals, _, _) = prob.system(&[], &x, &quad);
        let llt = factor(&symbolic, &argsort, &sym_llt, &vals)?;
        x = solve(&llt, &quad.rhs)?;
        let u = prob.displacement(&x);
        let r = prob.relaxed(&x);
        return Ok(ConvexOutcome { u, xi_eta: r.xi_eta, eta_xi: r.eta_xi, iterations: 1, converged: true });
    }

    // ADMM on the splitting z = K x + o, with a Huber prox for z.
    let mut rho = RHO_CELL * grid.cell_area();
    let mut z: Vec<f64> = prob.abs_values(&x);
    let mut y = vec![0.0; n_abs];
    let mut system = prob.system(&vec![rho; n_abs], &x, &quad);
    let mut llt = factor(&symbolic, &argsort, &sym_llt, &system.0)?;
    let sqrt_p = (n_abs as f64).sqrt();
    let sqrt_n = (prob.n_vars as f64).sqrt();
    let mut converged = false;
    let mut since_rho = 0;
    while iterations < cfg.max_inner {
        let last_stage = delta <= delta_final * (1.0 + 1e-12);
        iterations += 1;
        since_rho += 1;
        // x-update: (M + rho K^T K + S) x = rhs_M - rho K^T o + S x_k + rho K^T (z - y)
        let mut rhs = system.1.clone();
        for (v, sh) in system.2.iter().enumerate() {
            rhs[v] += sh * x[v];
        }
        prob.add_kt(&mut rhs, rho, |k| z[k] - y[k]);
        x = solve(&llt, &rhs)?;
        let kx = prob.abs_values(&x);
        let z_old = std::mem::take(&mut z);
        z = kx.iter().zip(&y).map(|(a, b)| a + b).collect();
        prob.huber_prox(&mut z, rho, delta);
        let mut r2 = 0.0;
        for k in 0..n_abs {
            let r = kx[k] - z[k];
            y[k] += r;
            r2 += r * r;
        }
        let mut dz = vec![0.0; prob.n_vars];
        prob.add_kt(&mut dz, rho, |k| z[k] - z_old[k]);
        let s_norm = norm(&dz);
        let mut kty = vec![0.0; prob.n_vars];
        prob.add_kt(&mut kty, rho, |k| y[k]);
        let eps_pri = cfg.inner_tol * (sqrt_p * scale * ABS_FRACTION + norm(&kx).max(norm(&z)));
        let eps_dual = cfg.inner_tol * (sqrt_n * load / sqrt_n.max(1.0) * ABS_FRACTION + norm(&kty));
        let r_norm = r2.sqrt();
        if r_norm <= eps_pri && s_norm <= eps_dual {
            if last_stage {
                converged = true;
                break;
            }
            delta = (delta * 0.1).max(delta_final);
            continue;
        }
        // Residual balancing, refactorizing at most every few iterations.
        if since_rho >= RHO_INTERVAL && (r_norm / eps_pri > 10.0 * s_norm / eps_dual || s_norm / eps_dual > 10.0 * r_norm / eps_pri) {
            let f = if r_norm / eps_pri > s_norm / eps_dual { 2.0 } else { 0.5 };
            rho *= f;
            y.iter_mut().for_each(|v| *v /= f);
            system = prob.system(&vec![rho; n_abs], &x, &quad);
            llt = factor(&symbolic, &argsort, &sym_llt, &system.0)?;
            since_rho = 0;
        }
    }
    let u = prob.displacement(&x);
    let r = prob.relaxed(&x);
    Ok(ConvexOutcome { u, xi_eta: r.xi_eta, eta_xi: r.eta_xi, iterations, converged })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn solve(llt: &Llt<usize, f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    let b = Col::<f64>::from_fn(rhs.len(), |i| rhs[i]);
    let sol = llt.solve(&b);
    let x: Vec<f64> = (0..rhs.len()).map(|i| sol[i]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SolverDiverged("non-finite iterate".into()));
    }
    Ok(x)
}

fn factor(
    symbolic: &SymbolicSparseColMat<usize>,
    argsort: &faer::sparse::Argsort<usize>,
    sym_llt: &SymbolicLlt<usize>,
    vals: &[f64],
) -> Result<Llt<usize, f64>> {
    let a = SparseColMat::new_from_argsort(symbolic.clone(), argsort, vals)
        .map_err(|e| Error::SolverDiverged(format!("assembly: {e:?}")))?;
    Llt::try_new_with_symbolic(sym_llt.clone(), a.as_ref(), Side::Lower)
        .map_err(|e| Error::SolverDiverged(format!("cholesky: {e:?}")))
}

struct InitField<'a> {
    n: usize,
    f: &'a dyn Fn(usize) -> (f64, f64),
}

impl SlipComponents for InitField<'_> {
    fn cell_count(&self) -> usize {
        self.n
    }
    fn xi_eta(&self, c: usize) -> f64 {
        (self.f)(c).0
    }
    fn eta_xi(&self, c: usize) -> f64 {
        (self.f)(c).1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSolution {
    pub u: DisplacementField,
    pub p: PlasticField,
    pub energy: EnergyBreakdown,
    pub iterations: usize,
    pub converged: bool,
}

/// Joint minimization over `u` and the magnitudes at fixed labels.
///
/// `init` seeds the iteration; without it the linear elastic field and zero
/// slip are used. The returned energy is the exact (unsmoothed) functional.
pub fn solve_convex(
    grid: &Grid,
    bc: &BoundaryCondition,
    m: &MaterialParams,
    labels: &[SlipLabel],
    init: Option<(&DisplacementField, &PlasticField)>,
    cfg: &SolverConfig,
) -> Result<ConvexSolution> {
    if labels.len() != grid.num_cells() {
        return Err(Error::GridMismatch("label field does not match grid".into()));
    }
    let slots: Vec<Slots> = labels.iter().map(|l| Slots::Single(*l)).collect();
    let default_u = linear_start(grid, bc);
    let zero = PlasticField::for_grid(grid);
    let (u0, p0) = init.unwrap_or((&default_u, &zero));
    u0.check_grid(grid)?;
    p0.check_grid(grid)?;
    let getter = |c: usize| (p0.xi_eta(c), p0.eta_xi(c));
    let out = solve_slots(grid, bc, m, &slots, (u0, &getter), cfg)?;
    let mut p = PlasticField::for_grid(grid);
    for (c, l) in labels.iter().enumerate() {
        let s = match l {
            SlipLabel::None => 0.0,
            SlipLabel::XiEta => out.xi_eta[c],
            SlipLabel::EtaXi => out.eta_xi[c],
        };
        p.set(c, *l, s);
    }
    let energy = total_energy(grid, &out.u, &p, m)?;
    Ok(ConvexSolution { u: out.u, p, energy, iterations: out.iterations, converged: out.converged })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedSolution {
    pub u: DisplacementField,
    pub p: RelaxedPlasticField,
    pub energy: EnergyBreakdown,
    pub iterations: usize,
    pub converged: bool,
}

/// Both slip systems active in every cell; the problem is convex.
pub fn solve_relaxed(
    grid: &Grid,
    bc: &BoundaryCondition,
    m: &MaterialParams,
    init: Option<(&DisplacementField, &RelaxedPlasticField)>,
    cfg: &SolverConfig,
) -> Result<RelaxedSolution> {
    let slots = vec![Slots::Both; grid.num_cells()];
    let default_u = linear_start(grid, bc);
    let zero = RelaxedPlasticField::zeros(grid.num_cells());
    let (u0, p0) = init.unwrap_or((&default_u, &zero));
    u0.check_grid(grid)?;
    let getter = |c: usize| (p0.xi_eta[c], p0.eta_xi[c]);
    let out = solve_slots(grid, bc, m, &slots, (u0, &getter), cfg)?;
    let p = RelaxedPlasticField { xi_eta: out.xi_eta, eta_xi: out.eta_xi };
    let energy = total_energy(grid, &out.u, &p, m)?;
    Ok(RelaxedSolution { u: out.u, p, energy, iterations: out.iterations, converged: out.converged })
}

/// Best displacement for a fixed plastic field: the elastic solve with
/// `beta` held, starting nowhere in particular since the problem is quadratic.
pub fn complete_fixed_slip(
    grid: &Grid,
    bc: &BoundaryCondition,
    m: &MaterialParams,
    p: &impl SlipComponents,
) -> Result<(DisplacementField, EnergyBreakdown)> {
    if p.cell_count() != grid.num_cells() {
        return Err(Error::GridMismatch("plastic field does not match grid".into()));
    }
    let slots: Vec<Slots> = (0..grid.num_cells()).map(|c| Slots::Fixed(p.xi_eta(c), p.eta_xi(c))).collect();
    let u0 = linear_start(grid, bc);
    let zero = |_: usize| (0.0, 0.0);
    let out = solve_slots(grid, bc, m, &slots, (&u0, &zero), &SolverConfig::default())?;
    let energy = total_energy(grid, &out.u, p, m)?;
    Ok((out.u, energy))
}

/// Linear interpolation of the boundary data in `x2`.
pub fn linear_start(grid: &Grid, bc: &BoundaryCondition) -> DisplacementField {
    let top = bc.top_rotated();
    let l = grid.height;
    let mut u = DisplacementField::from_fn(grid, |_, x2| [top[0] * x2 / l, top[1] * x2 / l]);
    u.apply_bc(grid, bc);
    u
}
