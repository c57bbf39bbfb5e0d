//! Discrete elastic, dislocation (curl) and hardening energies.
//!
//! Per cell the gradient is formed from the two diagonal node differences,
//! `d_xi f = (f_NE - f_SW) / (sqrt2 h)` and `d_eta f = (f_NW - f_SE) / (sqrt2 h)`,
//! which is exact for affine fields. The curl is an anisotropic total
//! variation: jumps of `beta_xi_eta` between xi-neighbours and of
//! `beta_eta_xi` between eta-neighbours, each weighted by
//! [`Grid::diagonal_weight`]. Jumps across the specimen boundary are free.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{
    DisplacementField, Displacement3, Mat2, Mat3, PlasticField3, ScalarDisplacement, ScalarPlasticField,
    SlipComponents, SlipPlane,
};
use crate::geometry::{Grid, Grid3, SQRT2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub sigma: f64,
    pub tau: f64,
}

impl MaterialParams {
    pub fn new(sigma: f64, tau: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be non-negative, got {sigma}")));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be non-negative, got {tau}")));
        }
        Ok(Self { sigma, tau })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub elastic: f64,
    pub curl_raw: f64,
    pub curl: f64,
    pub hardening_raw: f64,
    pub hardening: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn assemble(elastic: f64, curl_raw: f64, hardening_raw: f64, m: &MaterialParams) -> Self {
        let curl = m.sigma * curl_raw;
        let hardening = m.tau * hardening_raw;
        Self { elastic, curl_raw, curl, hardening_raw, hardening, total: elastic + curl + hardening }
    }
}

/// Rotated-frame gradient `G[a][b] = d_b u_a` on cell `(i, j)`.
#[inline]
pub fn cell_gradient(grid: &Grid, u: &DisplacementField, i: usize, j: usize) -> Mat2 {
    let [sw, se, nw, ne] = grid.cell_nodes(i, j);
    let d = 1.0 / (SQRT2 * grid.h);
    let v = &u.values;
    [
        [(v[ne][0] - v[sw][0]) * d, (v[nw][0] - v[se][0]) * d],
        [(v[ne][1] - v[sw][1]) * d, (v[nw][1] - v[se][1]) * d],
    ]
}

#[inline]
pub fn scalar_cell_gradient(grid: &Grid, u: &[f64], i: usize, j: usize) -> [f64; 2] {
    let [sw, se, nw, ne] = grid.cell_nodes(i, j);
    let d = 1.0 / (SQRT2 * grid.h);
    [(u[ne] - u[sw]) * d, (u[nw] - u[se]) * d]
}

/// Elastic energy density of one cell, `|(G - beta)_sym|^2`.
#[inline]
pub fn elastic_density(g: &Mat2, xi_eta: f64, eta_xi: f64) -> f64 {
    let off = g[0][1] + g[1][0] - xi_eta - eta_xi;
    g[0][0] * g[0][0] + g[1][1] * g[1][1] + 0.5 * off * off
}

fn check(grid: &Grid, u: &DisplacementField, p: &impl SlipComponents) -> Result<()> {
    u.check_grid(grid)?;
    if p.cell_count() != grid.num_cells() {
        return Err(Error::GridMismatch(format!(
            "plastic field has {} cells, grid has {}",
            p.cell_count(),
            grid.num_cells()
        )));
    }
    Ok(())
}

pub fn elastic_energy(grid: &Grid, u: &DisplacementField, p: &impl SlipComponents) -> Result<f64> {
    check(grid, u, p)?;
    let mut acc = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let c = grid.cell(i, j);
            let g = cell_gradient(grid, u, i, j);
            acc += elastic_density(&g, p.xi_eta(c), p.eta_xi(c));
        }
    }
    Ok(acc * grid.cell_area())
}

/// Elastic energy from specimen-frame nodal displacements and plastic matrices.
pub fn elastic_energy_x_frame(grid: &Grid, u_x: &[[f64; 2]], beta_x: &[Mat2]) -> Result<f64> {
    if u_x.len() != grid.num_nodes() || beta_x.len() != grid.num_cells() {
        return Err(Error::GridMismatch("x-frame field sizes do not match grid".into()));
    }
    let inv_h2 = 1.0 / (2.0 * grid.h);
    let mut acc = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let [sw, se, nw, ne] = grid.cell_nodes(i, j);
            let mut e = [[0.0; 2]; 2];
            for a in 0..2 {
                let d1 = (u_x[ne][a] + u_x[se][a] - u_x[nw][a] - u_x[sw][a]) * inv_h2;
                let d2 = (u_x[ne][a] + u_x[nw][a] - u_x[se][a] - u_x[sw][a]) * inv_h2;
                e[a] = [d1, d2];
            }
            let b = &beta_x[grid.cell(i, j)];
            let mut sym = 0.0;
            for a in 0..2 {
                for k in 0..2 {
                    let t = 0.5 * ((e[a][k] - b[a][k]) + (e[k][a] - b[k][a]));
                    sym += t * t;
                }
            }
            acc += sym;
        }
    }
    Ok(acc * grid.cell_area())
}

pub fn curl_energy(grid: &Grid, p: &impl SlipComponents) -> Result<f64> {
    if p.cell_count() != grid.num_cells() {
        return Err(Error::GridMismatch("plastic field does not match grid".into()));
    }
    Ok(curl_raw(grid, p))
}

fn curl_raw(grid: &Grid, p: &impl SlipComponents) -> f64 {
    let mut acc = 0.0;
    for j in 0..grid.ny.saturating_sub(1) {
        for i in 0..grid.nx.saturating_sub(1) {
            acc += (p.xi_eta(grid.cell(i + 1, j + 1)) - p.xi_eta(grid.cell(i, j))).abs();
        }
        for i in 1..grid.nx {
            acc += (p.eta_xi(grid.cell(i - 1, j + 1)) - p.eta_xi(grid.cell(i, j))).abs();
        }
    }
    acc * grid.diagonal_weight()
}

pub fn hardening_energy(grid: &Grid, p: &impl SlipComponents) -> Result<f64> {
    if p.cell_count() != grid.num_cells() {
        return Err(Error::GridMismatch("plastic field does not match grid".into()));
    }
    let acc: f64 = (0..grid.num_cells())
        .map(|c| {
            let (a, b) = (p.xi_eta(c), p.eta_xi(c));
            (a * a + b * b).sqrt()
        })
        .sum();
    Ok(acc * grid.cell_area())
}

pub fn total_energy(
    grid: &Grid,
    u: &DisplacementField,
    p: &impl SlipComponents,
    m: &MaterialParams,
) -> Result<EnergyBreakdown> {
    let elastic = elastic_energy(grid, u, p)?;
    let curl = curl_raw(grid, p);
    let hardening = hardening_energy(grid, p)?;
    Ok(EnergyBreakdown::assemble(elastic, curl, hardening, m))
}

/// Antiplane model: `|grad u - beta|^2` plus the curl with `beta_eta`
/// differenced along xi and `beta_xi` along eta.
pub fn scalar_energy(
    grid: &Grid,
    u: &ScalarDisplacement,
    p: &ScalarPlasticField,
    m: &MaterialParams,
) -> Result<EnergyBreakdown> {
    if u.values.len() != grid.num_nodes() || p.labels.len() != grid.num_cells() {
        return Err(Error::GridMismatch("scalar fields do not match grid".into()));
    }
    let mut elastic = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let g = scalar_cell_gradient(grid, &u.values, i, j);
            let b = p.beta(grid.cell(i, j));
            elastic += (g[0] - b[0]).powi(2) + (g[1] - b[1]).powi(2);
        }
    }
    elastic *= grid.cell_area();
    let mut curl = 0.0;
    for j in 0..grid.ny.saturating_sub(1) {
        for i in 0..grid.nx.saturating_sub(1) {
            curl += (p.beta(grid.cell(i + 1, j + 1))[1] - p.beta(grid.cell(i, j))[1]).abs();
        }
        for i in 1..grid.nx {
            curl += (p.beta(grid.cell(i - 1, j + 1))[0] - p.beta(grid.cell(i, j))[0]).abs();
        }
    }
    curl *= grid.diagonal_weight();
    let hardening: f64 = p.s.iter().map(|s| s.abs()).sum::<f64>() * grid.cell_area();
    Ok(EnergyBreakdown::assemble(elastic, curl, hardening, m))
}

/// Rotated-frame gradient `G[a][b] = d_b u_a` on 3-d cell `(i, j, k)`.
///
/// In-plane derivatives average the diagonal differences of the two
/// `zeta` faces; `d_zeta` averages the four vertical edges.
pub fn cell_gradient_3d(grid: &Grid3, u: &Displacement3, i: usize, j: usize, k: usize) -> Mat3 {
    let h = grid.h();
    let dd = 0.5 / (SQRT2 * h);
    let dz = 0.25 / h;
    let v = &u.values;
    let mut g = [[0.0; 3]; 3];
    for a in 0..3 {
        let mut dxi = 0.0;
        let mut deta = 0.0;
        for kk in [k, k + 1] {
            dxi += v[grid.node(i + 1, j + 1, kk)][a] - v[grid.node(i, j, kk)][a];
            deta += v[grid.node(i, j + 1, kk)][a] - v[grid.node(i + 1, j, kk)][a];
        }
        let mut dzeta = 0.0;
        for (ii, jj) in [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)] {
            dzeta += v[grid.node(ii, jj, k + 1)][a] - v[grid.node(ii, jj, k)][a];
        }
        g[a] = [dxi * dd, deta * dd, dzeta * dz];
    }
    g
}

fn sym_norm2_3(g: &Mat3, b: &Mat3) -> f64 {
    let mut acc = 0.0;
    for a in 0..3 {
        for c in 0..3 {
            let t = 0.5 * ((g[a][c] - b[a][c]) + (g[c][a] - b[c][a]));
            acc += t * t;
        }
    }
    acc
}

fn check3(grid: &Grid3, u: &Displacement3, p: &PlasticField3) -> Result<()> {
    if u.values.len() != grid.num_nodes() || p.labels.len() != grid.num_cells() {
        return Err(Error::GridMismatch("3-d fields do not match grid".into()));
    }
    Ok(())
}

fn plane_burgers(p: &PlasticField3, c: usize, plane: SlipPlane) -> [f64; 2] {
    if p.labels[c] == plane {
        p.burgers[c]
    } else {
        [0.0; 2]
    }
}

/// Full 3-d energy. The curl sums, for every slip plane and each of its
/// in-plane directions, the Euclidean jump of that plane's Burgers vector
/// between neighbours along the direction.
pub fn energy_3d(grid: &Grid3, u: &Displacement3, p: &PlasticField3, m: &MaterialParams) -> Result<EnergyBreakdown> {
    check3(grid, u, p)?;
    let g2 = &grid.plane;
    let h = grid.h();
    let vol = h * h * h;
    let mut elastic = 0.0;
    for k in 0..grid.nz {
        for j in 0..g2.ny {
            for i in 0..g2.nx {
                let g = cell_gradient_3d(grid, u, i, j, k);
                elastic += sym_norm2_3(&g, &p.beta_matrix(grid.cell(i, j, k)));
            }
        }
    }
    elastic *= vol;

    let jump = |a: usize, b: usize, plane: SlipPlane| {
        let x = plane_burgers(p, a, plane);
        let y = plane_burgers(p, b, plane);
        ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt()
    };
    let w_diag = g2.diagonal_weight() * h;
    let w_z = h * h;
    let mut curl = 0.0;
    for k in 0..grid.nz {
        for j in 0..g2.ny.saturating_sub(1) {
            for i in 0..g2.nx.saturating_sub(1) {
                let (a, b) = (grid.cell(i, j, k), grid.cell(i + 1, j + 1, k));
                curl += w_diag * (jump(a, b, SlipPlane::PlaneEta) + jump(a, b, SlipPlane::PlaneZeta));
            }
            for i in 1..g2.nx {
                let (a, b) = (grid.cell(i, j, k), grid.cell(i - 1, j + 1, k));
                curl += w_diag * (jump(a, b, SlipPlane::PlaneXi) + jump(a, b, SlipPlane::PlaneZeta));
            }
        }
    }
    for k in 0..grid.nz.saturating_sub(1) {
        for j in 0..g2.ny {
            for i in 0..g2.nx {
                let (a, b) = (grid.cell(i, j, k), grid.cell(i, j, k + 1));
                curl += w_z * (jump(a, b, SlipPlane::PlaneXi) + jump(a, b, SlipPlane::PlaneEta));
            }
        }
    }
    let hardening: f64 = p.burgers.iter().map(|b| (b[0] * b[0] + b[1] * b[1]).sqrt()).sum::<f64>() * vol;
    Ok(EnergyBreakdown::assemble(elastic, curl, hardening, m))
}

/// Reduced energy of layer `k`: the in-plane symmetric elastic part plus
/// `sigma` times the in-plane variation of `beta_xi_eta` and `beta_eta_xi`.
pub fn slice_energy(grid: &Grid3, u: &Displacement3, p: &PlasticField3, m: &MaterialParams, k: usize) -> Result<f64> {
    check3(grid, u, p)?;
    if k >= grid.nz {
        return Err(Error::InvalidParameter(format!("layer {k} out of range 0..{}", grid.nz)));
    }
    let g2 = &grid.plane;
    let mut elastic = 0.0;
    for j in 0..g2.ny {
        for i in 0..g2.nx {
            let g = cell_gradient_3d(grid, u, i, j, k);
            let b = p.beta_matrix(grid.cell(i, j, k));
            let off = g[0][1] + g[1][0] - b[0][1] - b[1][0];
            let d0 = g[0][0] - b[0][0];
            let d1 = g[1][1] - b[1][1];
            elastic += d0 * d0 + d1 * d1 + 0.5 * off * off;
        }
    }
    elastic *= g2.cell_area();
    let xe = |c: usize| p.beta_matrix(c)[0][1];
    let ex = |c: usize| p.beta_matrix(c)[1][0];
    let mut curl = 0.0;
    for j in 0..g2.ny.saturating_sub(1) {
        for i in 0..g2.nx.saturating_sub(1) {
            curl += (xe(grid.cell(i + 1, j + 1, k)) - xe(grid.cell(i, j, k))).abs();
        }
        for i in 1..g2.nx {
            curl += (ex(grid.cell(i - 1, j + 1, k)) - ex(grid.cell(i, j, k))).abs();
        }
    }
    Ok(elastic + m.sigma * curl * g2.diagonal_weight())
}
