//! Discrete harmonic extension of boundary data on the specimen.
//!
//! The strip is doubled by even reflection in `x1` and the lateral faces
//! identified, giving a periodic cylinder of width 2. The even solution has
//! zero normal derivative on the original lateral faces.

use serde::{Deserialize, Serialize};

use crate::constructions::{ResidualTrace, ScalarSigmoidConstruction, SigmoidConstruction};
use crate::energy::{scalar_energy, total_energy, EnergyBreakdown, MaterialParams};
use crate::error::{Error, Result};
use crate::fields::{DisplacementField, ScalarDisplacement};
use crate::geometry::{BoundaryCondition, Grid};

pub const CG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSolution {
    /// Nodal values on the original grid.
    pub v: Vec<f64>,
    /// `int |grad v|^2` over the specimen.
    pub dirichlet_energy: f64,
    pub iterations: usize,
}

/// Five-point Laplacian on the doubled cylinder, solved by conjugate gradients.
pub fn harmonic_complete(grid: &Grid, data: &ResidualTrace) -> Result<HarmonicSolution> {
    let nx = grid.nx;
    if data.bottom.len() != nx + 1 || data.top.len() != nx + 1 {
        return Err(Error::GridMismatch("boundary data length must be nx + 1".into()));
    }
    let cols = 2 * nx;
    let rows = grid.ny - 1;
    // Column q of the cylinder is x1 = (q - nx) h; its value is read from |q - nx|.
    let fold = |q: usize| -> usize { (q as i64 - nx as i64).unsigned_abs() as usize };
    let bottom: Vec<f64> = (0..cols).map(|q| data.bottom[fold(q)]).collect();
    let top: Vec<f64> = (0..cols).map(|q| data.top[fold(q)]).collect();
    let idx = |q: usize, r: usize| r * cols + q;
    let unknowns = cols * rows;

    let apply = |x: &[f64], out: &mut [f64]| {
        for r in 0..rows {
            for q in 0..cols {
                let left = (q + cols - 1) % cols;
                let right = (q + 1) % cols;
                let mut acc = 4.0 * x[idx(q, r)] - x[idx(left, r)] - x[idx(right, r)];
                if r > 0 {
                    acc -= x[idx(q, r - 1)];
                }
                if r + 1 < rows {
                    acc -= x[idx(q, r + 1)];
                }
                out[idx(q, r)] = acc;
            }
        }
    };
    let mut b = vec![0.0; unknowns];
    if rows > 0 {
        for q in 0..cols {
            b[idx(q, 0)] += bottom[q];
            b[idx(q, rows - 1)] += top[q];
        }
    }
    let (x, iterations) = conjugate_gradient(apply, &b, CG_TOL, 20 * unknowns + 100)?;

    let value = |q: usize, r: usize| -> f64 {
        if r == 0 {
            bottom[q]
        } else if r == grid.ny {
            top[q]
        } else {
            x[idx(q, r - 1)]
        }
    };
    let mut energy = 0.0;
    for r in 0..=grid.ny {
        for q in 0..cols {
            let d = value((q + 1) % cols, r) - value(q, r);
            // Edges on the Dirichlet rows still carry gradient energy.
            energy += d * d * if r == 0 || r == grid.ny { 0.5 } else { 1.0 };
        }
    }
    for r in 0..grid.ny {
        for q in 0..cols {
            let d = value(q, r + 1) - value(q, r);
            energy += d * d;
        }
    }
    let v = (0..grid.num_nodes())
        .map(|k| {
            let (i, j) = grid.node_ij(k);
            value((nx + i) % cols, j)
        })
        .collect();
    Ok(HarmonicSolution { v, dirichlet_energy: 0.5 * energy, iterations })
}

/// Unpreconditioned CG for a symmetric positive definite operator.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    for it in 0..max_iter {
        if rr.sqrt() <= tol * bnorm {
            return Ok((x, it));
        }
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::SolverDiverged("operator not positive definite".into()));
        }
        let a = rr / pap;
        for k in 0..n {
            x[k] += a * p[k];
            r[k] -= a * ap[k];
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_new / rr;
        rr = rr_new;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
    }
    if rr.sqrt() <= tol * bnorm {
        return Ok((x, max_iter));
    }
    Err(Error::SolverDiverged(format!(
        "conjugate gradients stopped at relative residual {:.3e} after {max_iter} iterations",
        rr.sqrt() / bnorm
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletedEnergy {
    pub breakdown: EnergyBreakdown,
    /// Sum of the harmonic correction's Dirichlet energies over components.
    pub dirichlet_energy: f64,
}

/// Adds the harmonic correction of each component to `u_beta` and evaluates
/// the full energy of the resulting admissible pair.
pub fn complete_vector(
    grid: &Grid,
    c: &SigmoidConstruction,
    bc: &BoundaryCondition,
    m: &MaterialParams,
) -> Result<(DisplacementField, CompletedEnergy)> {
    let sx = harmonic_complete(grid, &c.residual[0])?;
    let se = harmonic_complete(grid, &c.residual[1])?;
    let mut u = c.u_beta.clone();
    for (k, w) in u.values.iter_mut().enumerate() {
        w[0] += sx.v[k];
        w[1] += se.v[k];
    }
    u.apply_bc(grid, bc);
    let breakdown = total_energy(grid, &u, &c.p, m)?;
    Ok((u, CompletedEnergy { breakdown, dirichlet_energy: sx.dirichlet_energy + se.dirichlet_energy }))
}

pub fn complete_scalar(
    grid: &Grid,
    c: &ScalarSigmoidConstruction,
    bc: &BoundaryCondition,
    m: &MaterialParams,
) -> Result<(ScalarDisplacement, CompletedEnergy)> {
    let s = harmonic_complete(grid, &c.residual)?;
    let mut u = c.u_beta.clone();
    for (k, w) in u.values.iter_mut().enumerate() {
        *w += s.v[k];
    }
    u.apply_bc(grid, bc);
    let breakdown = scalar_energy(grid, &u, &c.p, m)?;
    Ok((u, CompletedEnergy { breakdown, dirichlet_energy: s.dirichlet_energy }))
}
