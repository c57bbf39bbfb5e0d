//! Explicit test pairs `(u, beta)` for the boundary-value problems.
//!
//! Band and layer boundaries lie on grid diagonals. Along a diagonal line
//! `x2 - x1 = const` the node index difference `j - i` is constant, so a
//! displacement that depends on `x2 - x1` alone has no xi-derivative and its
//! eta-derivative is constant along xi-chains of cells, which keeps both the
//! elastic and the curl term exact.
//!
//! Power-law profiles `t^alpha` are sampled as cell averages over the node's
//! dual interval rather than pointwise, so that the discrete sequence keeps
//! the continuum decay as `alpha -> 0`.

use serde::{Deserialize, Serialize};

use crate::energy::{cell_gradient, scalar_cell_gradient};
use crate::error::{Error, Result};
use crate::fields::{
    Displacement3, DisplacementField, PlasticField, PlasticField3, ScalarDisplacement, ScalarPlasticField,
    ScalarSlipLabel, SlipLabel, SlipPlane,
};
use crate::geometry::{to_rotated, BoundaryCondition, Grid, Grid3, FRAC_1_SQRT2, SQRT2};

const HEIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub lamination_period: f64,
}

impl ConstructionParams {
    pub fn new(epsilon: f64, alpha: f64, lamination_period: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        check_alpha(alpha)?;
        if !(lamination_period > 0.0 && lamination_period.is_finite()) {
            return Err(Error::InvalidParameter(format!("lamination period must be positive, got {lamination_period}")));
        }
        Ok(Self { epsilon, alpha, lamination_period })
    }

    /// The joint limit used by the transition constructions: `alpha = epsilon^2`.
    pub fn scheduled(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, (epsilon * epsilon).min(1.0), 1.0)
    }

    pub fn validate_for(&self, grid: &Grid) -> Result<()> {
        let limit = grid.height.min(1.0) / 2.0;
        if self.epsilon >= limit {
            return Err(Error::InvalidParameter(format!(
                "epsilon {} must be below min(1, L)/2 = {limit}",
                self.epsilon
            )));
        }
        if self.lamination_period < 2.0 * grid.h {
            return Err(Error::InvalidParameter(format!(
                "lamination period {} below 2h = {}",
                self.lamination_period,
                2.0 * grid.h
            )));
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma must be non-negative, got {gamma}")));
    }
    Ok(())
}

fn height_is(grid: &Grid, l: f64) -> bool {
    (grid.height - l).abs() <= HEIGHT_TOL
}

/// A complete test pair together with notes on how it was fitted to the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub u: DisplacementField,
    pub p: PlasticField,
    pub notes: Vec<String>,
}

/// Dirichlet data for one component of the remainder `v = u - u_beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualTrace {
    pub bottom: Vec<f64>,
    pub top: Vec<f64>,
}

impl ResidualTrace {
    pub fn zero(nx: usize) -> Self {
        Self { bottom: vec![0.0; nx + 1], top: vec![0.0; nx + 1] }
    }
}

/// Curl-free plastic field from a potential, with the Dirichlet data still
/// to be matched by a correction `v` (components `[xi, eta]`).
#[derive(Debug, Clone, PartialEq)]
pub struct SigmoidConstruction {
    pub u_beta: DisplacementField,
    pub p: PlasticField,
    pub residual: [ResidualTrace; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSigmoidConstruction {
    pub u_beta: ScalarDisplacement,
    pub p: ScalarPlasticField,
    pub residual: ResidualTrace,
}

/// Single-slip field with zero off-diagonal elastic strain: per cell the
/// shear `G_xi_eta + G_eta_xi` is put on the system carrying the larger
/// gradient component (ties go to `EtaXi`).
pub fn compatible_slip(grid: &Grid, u: &DisplacementField) -> PlasticField {
    let mut p = PlasticField::for_grid(grid);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let g = cell_gradient(grid, u, i, j);
            let s = g[0][1] + g[1][0];
            let label = if s == 0.0 {
                SlipLabel::None
            } else if g[0][1].abs() > g[1][0].abs() {
                SlipLabel::XiEta
            } else {
                SlipLabel::EtaXi
            };
            p.set(grid.cell(i, j), label, s);
        }
    }
    p
}

/// Scalar analogue: `beta = grad u` on the dominant component.
pub fn compatible_scalar_slip(grid: &Grid, u: &ScalarDisplacement) -> ScalarPlasticField {
    let mut p = ScalarPlasticField::zeros(grid.num_cells());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let g = scalar_cell_gradient(grid, &u.values, i, j);
            let c = grid.cell(i, j);
            if g[0] == 0.0 && g[1] == 0.0 {
                continue;
            }
            if g[0].abs() >= g[1].abs() {
                p.set(c, ScalarSlipLabel::Xi, g[0]);
            } else {
                p.set(c, ScalarSlipLabel::Eta, g[1]);
            }
        }
    }
    p
}

fn from_indices(grid: &Grid, f: impl Fn(i64, i64, f64) -> [f64; 2]) -> DisplacementField {
    let mut values = Vec::with_capacity(grid.num_nodes());
    for j in 0..=grid.ny {
        for i in 0..=grid.nx {
            let (ii, jj) = (i as i64, j as i64);
            values.push(f(jj - ii, ii + jj, j as f64 * grid.h));
        }
    }
    DisplacementField { values }
}

fn ramp(k: i64, lo: i64, hi: i64) -> f64 {
    if k <= lo {
        0.0
    } else if k >= hi {
        1.0
    } else {
        (k - lo) as f64 / (hi - lo) as f64
    }
}

pub fn bc1_elastic(grid: &Grid, gamma: f64) -> Result<Construction> {
    check_gamma(gamma)?;
    let l = grid.height;
    let mut u = DisplacementField::from_fn(grid, |_, x2| to_rotated([gamma * x2 / l, gamma * x2 / l]));
    u.apply_bc(grid, &BoundaryCondition::diagonal(gamma));
    Ok(Construction { u, p: PlasticField::for_grid(grid), notes: vec![] })
}

pub fn bc2_elastic(grid: &Grid, gamma: f64) -> Result<Construction> {
    check_gamma(gamma)?;
    let l = grid.height;
    let mut u = DisplacementField::from_fn(grid, |_, x2| to_rotated([gamma * x2 / l, 0.0]));
    u.apply_bc(grid, &BoundaryCondition::horizontal(gamma));
    Ok(Construction { u, p: PlasticField::for_grid(grid), notes: vec![] })
}

/// One simple-shear band along `x2 - x1 = const`, placed in the middle of
/// the strip `0 <= x2 - x1 <= L - 1` that meets neither Dirichlet face.
pub fn bc1_shear_band(grid: &Grid, gamma: f64, epsilon: f64) -> Result<Construction> {
    check_gamma(gamma)?;
    let l = grid.height;
    if l <= 1.0 + HEIGHT_TOL {
        return Err(Error::NotApplicable(format!("shear band needs L > 1, got {l}")));
    }
    if !(epsilon > 0.0) || epsilon >= (l - 1.0) * FRAC_1_SQRT2 {
        return Err(Error::InvalidParameter(format!(
            "band width {epsilon} must lie in (0, (L-1)/sqrt2 = {})",
            (l - 1.0) * FRAC_1_SQRT2
        )));
    }
    let room = (grid.ny - grid.nx) as i64;
    let width = ((SQRT2 * epsilon / grid.h).round() as i64).clamp(1, room);
    let lo = (room - width) / 2;
    let hi = lo + width;
    let top = SQRT2 * gamma;
    let u = from_indices(grid, |c, _, _| [top * ramp(c, lo, hi), 0.0]);
    let p = compatible_slip(grid, &u);
    let notes = vec![format!(
        "band between x2-x1 = {} and {} (width {} after snapping)",
        lo as f64 * grid.h,
        hi as f64 * grid.h,
        width as f64 * grid.h * FRAC_1_SQRT2
    )];
    Ok(Construction { u, p, notes })
}

/// Two non-intersecting bands touching at one node: `u_xi` ramps across
/// `0 <= x2 - x1 <= k h`, `u_eta` across `2 + k h <= x1 + x2 <= L`.
pub fn bc2_double_band(grid: &Grid, gamma: f64) -> Result<Construction> {
    check_gamma(gamma)?;
    let l = grid.height;
    if l <= 2.0 + HEIGHT_TOL {
        return Err(Error::NotApplicable(format!("double band needs L > 2, got {l}")));
    }
    let excess = grid.ny as i64 - 2 * grid.nx as i64;
    let k = excess / 2;
    if k < 1 {
        return Err(Error::InvalidResolution(format!(
            "L = {l} leaves {excess} cell(s) above 2 at n = {}; refine the grid",
            grid.n
        )));
    }
    let d_lo = 2 * grid.nx as i64 + k;
    let d_hi = grid.ny as i64;
    let a = gamma * FRAC_1_SQRT2;
    let u = from_indices(grid, |c, d, _| [a * ramp(c, 0, k), -a * ramp(d, d_lo, d_hi)]);
    let p = compatible_slip(grid, &u);
    let notes = vec![format!(
        "bands 0 <= x2-x1 <= {} and {} <= x1+x2 <= {l}",
        k as f64 * grid.h,
        d_lo as f64 * grid.h
    )];
    Ok(Construction { u, p, notes })
}

/// Crossing bands `0 <= x2 - x1 <= L - 1` and `1 <= x1 + x2 <= L`.
pub fn bc2_crossing_bands(grid: &Grid, gamma: f64) -> Result<Construction> {
    check_gamma(gamma)?;
    let l = grid.height;
    if l <= 1.0 + HEIGHT_TOL || l >= 2.0 - HEIGHT_TOL {
        return Err(Error::NotApplicable(format!("crossing bands need 1 < L < 2, got {l}")));
    }
    let w = (grid.ny - grid.nx) as i64;
    let n = grid.nx as i64;
    let a = gamma * FRAC_1_SQRT2;
    let u = from_indices(grid, |c, d, _| [a * ramp(c, 0, w), -a * ramp(d, n, n + w)]);
    let p = compatible_slip(grid, &u);
    Ok(Construction { u, p, notes: vec![] })
}

/// Cell average of `max(t, 0)^alpha` over `[a, b]`.
fn avg_pos_power(a: f64, b: f64, alpha: f64) -> f64 {
    let f = |t: f64| t.max(0.0).powf(alpha + 1.0) / (alpha + 1.0);
    if b <= a {
        return a.max(0.0).powf(alpha);
    }
    (f(b) - f(a)) / (b - a)
}

/// Node value of `max(t, 0)^alpha`, cell-averaged over `[t - h/2, t + h/2]`
/// and pinned to zero for `t <= 0`.
fn node_power(t: f64, h: f64, alpha: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        avg_pos_power(t - 0.5 * h, t + 0.5 * h, alpha)
    }
}

/// Layer profile on node offsets `k = 0..=width`: `0` and `1` at the ends,
/// `t^alpha` cell-averaged in between.
fn layer_profile(width: i64, alpha: f64) -> Vec<f64> {
    let w = width as f64;
    (0..=width)
        .map(|k| {
            if k == 0 {
                0.0
            } else if k == width {
                1.0
            } else {
                let t = k as f64;
                avg_pos_power((t - 0.5) / w, (t + 0.5) / w, alpha)
            }
        })
        .collect()
}

/// Transition profile on the diagonal index `c = j - i` for one component:
/// rigid above `c >= e`, linear in `x2` on `L - 1 <= c <= 0`, zero below
/// `c <= L - 1 - e`, with `x^alpha` layers of width `e` in between.
fn transition_component(c: i64, x2: f64, l: f64, lo: i64, e: i64, profile: &[f64]) -> f64 {
    let lin = x2 / l;
    if c >= e {
        1.0
    } else if c >= 0 {
        let w = profile[c as usize];
        lin * (1.0 - w) + w
    } else if c >= lo {
        lin
    } else if c >= lo - e {
        let w = profile[(lo - c) as usize];
        lin * (1.0 - w)
    } else {
        0.0
    }
}

fn transition_width(grid: &Grid, epsilon: f64, alpha: f64) -> Result<(i64, Vec<String>)> {
    check_alpha(alpha)?;
    let l = grid.height;
    if !(epsilon > 0.0) || epsilon >= l.min(1.0) / 2.0 {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must lie in (0, min(1, L)/2)")));
    }
    let max_width = grid.ny as i64;
    let e = ((SQRT2 * epsilon / grid.h).round() as i64).clamp(1, max_width);
    let notes = vec![format!("layer width {} after snapping", e as f64 * grid.h * FRAC_1_SQRT2)];
    Ok((e, notes))
}

/// Five-region test field for BC1 with `L < 1`: the linear shear region
/// `L - 1 <= x2 - x1 <= 0`, rigid corner triangles, and two `x^alpha`
/// transition layers on the triangle sides of the diagonals.
pub fn bc1_transition(grid: &Grid, gamma: f64, epsilon: f64, alpha: f64) -> Result<Construction> {
    check_gamma(gamma)?;
    let l = grid.height;
    if l >= 1.0 - HEIGHT_TOL {
        return Err(Error::NotApplicable(format!("transition layers need L < 1, got {l}")));
    }
    let (e, notes) = transition_width(grid, epsilon, alpha)?;
    let profile = layer_profile(e, alpha);
    let lo = grid.ny as i64 - grid.nx as i64;
    let top = SQRT2 * gamma;
    let mut u = from_indices(grid, |c, _, x2| [top * transition_component(c, x2, l, lo, e, &profile), 0.0]);
    u.apply_bc(grid, &BoundaryCondition::diagonal(gamma));
    let p = compatible_slip(grid, &u);
    Ok(Construction { u, p, notes })
}

/// BC2 analogue of [`bc1_transition`]: the construction is applied to
/// `u_xi` along `x2 - x1` and, mirrored in `x1`, to `u_eta` along `x1 + x2`.
pub fn bc2_transition(grid: &Grid, gamma: f64, epsilon: f64, alpha: f64) -> Result<Construction> {
    check_gamma(gamma)?;
    let l = grid.height;
    if l >= 1.0 - HEIGHT_TOL {
        return Err(Error::NotApplicable(format!("transition layers need L < 1, got {l}")));
    }
    let (e, notes) = transition_width(grid, epsilon, alpha)?;
    let profile = layer_profile(e, alpha);
    let lo = grid.ny as i64 - grid.nx as i64;
    let n = grid.nx as i64;
    let a = gamma * FRAC_1_SQRT2;
    let mut u = from_indices(grid, |c, d, x2| {
        [
            a * transition_component(c, x2, l, lo, e, &profile),
            -a * transition_component(d - n, x2, l, lo, e, &profile),
        ]
    });
    u.apply_bc(grid, &BoundaryCondition::horizontal(gamma));
    let p = compatible_slip(grid, &u);
    Ok(Construction { u, p, notes })
}

/// Cell average of `sgn(t) |t|^alpha` over `[c - h/2, c + h/2]`.
fn avg_signed_power(c: f64, h: f64, alpha: f64) -> f64 {
    let f = |t: f64| t.abs().powf(alpha + 1.0) / (alpha + 1.0);
    (f(c + 0.5 * h) - f(c - 0.5 * h)) / h
}

fn traces_from(grid: &Grid, u_beta: &DisplacementField, bc: &BoundaryCondition) -> [ResidualTrace; 2] {
    let top = bc.top_rotated();
    let mut out = [ResidualTrace::zero(grid.nx), ResidualTrace::zero(grid.nx)];
    for i in 0..=grid.nx {
        let b = u_beta.values[grid.node(i, 0)];
        let t = u_beta.values[grid.node(i, grid.ny)];
        for a in 0..2 {
            out[a].bottom[i] = -b[a];
            out[a].top[i] = top[a] - t[a];
        }
    }
    out
}

/// BC1 at `L = 1`: `u_xi = (gamma/sqrt2)(1 + sgn(c)|c|^alpha)` with
/// `c = x2 - x1`, a steep shear across the main diagonal.
pub fn bc1_sigmoid(grid: &Grid, gamma: f64, alpha: f64) -> Result<SigmoidConstruction> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    if !height_is(grid, 1.0) {
        return Err(Error::NotApplicable(format!("needs L = 1, got {}", grid.height)));
    }
    let h = grid.h;
    let a = gamma * FRAC_1_SQRT2;
    let u_beta = from_indices(grid, |c, _, _| [a * (1.0 + avg_signed_power(c as f64 * h, h, alpha)), 0.0]);
    let p = compatible_slip(grid, &u_beta);
    let residual = traces_from(grid, &u_beta, &BoundaryCondition::diagonal(gamma));
    Ok(SigmoidConstruction { u_beta, p, residual })
}

/// BC2 at `L = 2`: `u_xi` drops from `gamma/sqrt2` to zero below the
/// diagonal `x2 = x1`, `u_eta` ramps down above `x1 + x2 = 2`; the
/// remaining quadrant carries constant values.
pub fn bc2_l2_sigmoid(grid: &Grid, gamma: f64, alpha: f64) -> Result<SigmoidConstruction> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    if !height_is(grid, 2.0) {
        return Err(Error::NotApplicable(format!("needs L = 2, got {}", grid.height)));
    }
    let h = grid.h;
    let n = grid.nx as i64;
    let a = gamma * FRAC_1_SQRT2;
    let u_beta = from_indices(grid, |c, d, _| {
        let xi = a * (1.0 - node_power(-(c as f64) * h, h, alpha));
        let eta = -a * node_power((d - 2 * n) as f64 * h, h, alpha);
        [xi, eta]
    });
    let p = compatible_slip(grid, &u_beta);
    let residual = traces_from(grid, &u_beta, &BoundaryCondition::horizontal(gamma));
    Ok(SigmoidConstruction { u_beta, p, residual })
}

/// Antiplane model at `L = 1/2`: `u = gamma (2(x1 + x2 - 1))^alpha` to the
/// right of the top midpoint, `gamma (2(x2 - x1))^alpha` to its left, zero
/// below both diagonals.
pub fn scalar_half_construction(grid: &Grid, gamma: f64, alpha: f64) -> Result<ScalarSigmoidConstruction> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    if !height_is(grid, 0.5) {
        return Err(Error::NotApplicable(format!("needs L = 1/2, got {}", grid.height)));
    }
    let h = grid.h;
    let n = grid.nx as i64;
    let scale = 2f64.powf(alpha);
    let part = |t: f64| scale * node_power(t, h, alpha);
    let mut values = Vec::with_capacity(grid.num_nodes());
    for j in 0..=grid.ny {
        for i in 0..=grid.nx {
            let (ii, jj) = (i as i64, j as i64);
            let right = (ii + jj - n) as f64 * h;
            let left = (jj - ii) as f64 * h;
            values.push(gamma * (part(right) + part(left)));
        }
    }
    let u_beta = ScalarDisplacement { values };
    let p = compatible_scalar_slip(grid, &u_beta);
    let mut residual = ResidualTrace::zero(grid.nx);
    for i in 0..=grid.nx {
        residual.bottom[i] = -u_beta.values[grid.node(i, 0)];
        residual.top[i] = gamma - u_beta.values[grid.node(i, grid.ny)];
    }
    Ok(ScalarSigmoidConstruction { u_beta, p, residual })
}

/// Constant extension in `zeta`: `XiEta` slip lives on the plane with
/// normal `eta`, `EtaXi` on the plane with normal `xi`.
pub fn extrude_3d(grid: &Grid3, u: &DisplacementField, p: &PlasticField) -> Result<(Displacement3, PlasticField3)> {
    let g2 = &grid.plane;
    u.check_grid(g2)?;
    p.check_grid(g2)?;
    let u3 = Displacement3::extrude(grid, u);
    let mut p3 = PlasticField3::zeros(grid.num_cells());
    let per = g2.num_cells();
    for c3 in 0..grid.num_cells() {
        let c = c3 % per;
        match p.labels[c] {
            SlipLabel::None => {}
            SlipLabel::XiEta => p3.set(c3, SlipPlane::PlaneEta, [p.s[c], 0.0]),
            SlipLabel::EtaXi => p3.set(c3, SlipPlane::PlaneXi, [p.s[c], 0.0]),
        }
    }
    Ok((u3, p3))
}

/// Replaces every Burgers vector by an oscillation between the two
/// admissible directions of its plane with the same average. Layers are
/// stacked along the plane normal with the given period.
pub fn laminate_burgers(grid: &Grid3, p: &PlasticField3, period: f64) -> Result<PlasticField3> {
    if p.labels.len() != grid.num_cells() {
        return Err(Error::GridMismatch("plastic field does not match 3-d grid".into()));
    }
    let h = grid.h();
    if !(period >= 2.0 * h - 1e-12) {
        return Err(Error::InvalidParameter(format!("lamination period {period} below 2h = {}", 2.0 * h)));
    }
    let half = 0.5 * period;
    let mut out = p.clone();
    out.discrete_burgers = true;
    for c in 0..grid.num_cells() {
        let (i, j, k) = grid.cell_ijk(c);
        let x1 = (i as f64 + 0.5) * h;
        let x2 = (j as f64 + 0.5) * h;
        let x3 = (k as f64 + 0.5) * h;
        let b = p.burgers[c];
        let (coord, first, second) = match p.labels[c] {
            SlipPlane::None => continue,
            SlipPlane::PlaneXi | SlipPlane::PlaneEta => {
                let coord = if p.labels[c] == SlipPlane::PlaneXi { (x1 + x2) * FRAC_1_SQRT2 } else { (x2 - x1) * FRAC_1_SQRT2 };
                let plus = b[0] + b[1];
                let minus = b[0] - b[1];
                (coord, [plus, plus], [minus, -minus])
            }
            SlipPlane::PlaneZeta => (x3, [2.0 * b[0], 0.0], [0.0, 2.0 * b[1]]),
        };
        let phase = (coord / half).floor() as i64;
        out.burgers[c] = if phase.rem_euclid(2) == 0 { first } else { second };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{curl_energy, elastic_energy, total_energy, MaterialParams};
    use crate::geometry::{make_grid, DomainSpec};

    fn grid(l: f64, n: usize) -> Grid {
        make_grid(&DomainSpec::two_d(l).unwrap(), n).unwrap()
    }

    fn params(sigma: f64) -> MaterialParams {
        MaterialParams::new(sigma, 0.0).unwrap()
    }

    #[test]
    fn elastic_constructions() {
        let g = grid(0.5, 16);
        let c = bc2_elastic(&g, 0.1).unwrap();
        let e = total_energy(&g, &c.u, &c.p, &params(1.0)).unwrap();
        assert!((e.total - 0.01).abs() < 1e-14);
        let c = bc1_elastic(&g, 0.1).unwrap();
        let e = total_energy(&g, &c.u, &c.p, &params(1.0)).unwrap();
        assert!((e.total - 0.03).abs() < 1e-14);
        let c = bc1_elastic(&g, 0.0).unwrap();
        assert_eq!(total_energy(&g, &c.u, &c.p, &params(1.0)).unwrap().total, 0.0);
    }

    #[test]
    fn shear_band_is_free() {
        let g = grid(1.5, 64);
        let c = bc1_shear_band(&g, 0.3, 0.1).unwrap();
        assert!(c.u.satisfies_bc(&g, &BoundaryCondition::diagonal(0.3)));
        let e = total_energy(&g, &c.u, &c.p, &params(1.0)).unwrap();
        assert!(e.total <= 1e-10, "{e:?}");
        let g = grid(1.01, 100);
        let c = bc1_shear_band(&g, 0.3, 0.001).unwrap();
        assert!(total_energy(&g, &c.u, &c.p, &params(1.0)).unwrap().total <= 1e-10);
        assert!(bc1_shear_band(&grid(1.0, 8), 0.3, 0.01).is_err());
        assert!(bc1_shear_band(&grid(1.5, 8), 0.3, 0.4).is_err());
    }

    #[test]
    fn double_band_is_free() {
        let g = grid(2.5, 80);
        let c = bc2_double_band(&g, 0.2).unwrap();
        assert!(c.u.satisfies_bc(&g, &BoundaryCondition::horizontal(0.2)));
        let e = total_energy(&g, &c.u, &c.p, &params(1.0)).unwrap();
        assert!(e.total <= 1e-10, "{e:?}");
        let g = grid(2.05, 40);
        let c = bc2_double_band(&g, 0.2).unwrap();
        assert!(total_energy(&g, &c.u, &c.p, &params(1.0)).unwrap().total <= 1e-10);
        assert!(bc2_double_band(&grid(2.0, 8), 0.2).is_err());
    }

    #[test]
    fn double_band_hardening_is_twice_gamma() {
        // |s| integrates to gamma/sqrt2 * sqrt2 per unit band length on each band,
        // over band lengths sqrt2 (each band crosses the unit width diagonally).
        let g = grid(2.5, 32);
        let c = bc2_double_band(&g, 0.2).unwrap();
        let e = total_energy(&g, &c.u, &c.p, &MaterialParams::new(0.0, 1.0).unwrap()).unwrap();
        assert!((e.hardening_raw - 2.0 * 0.2).abs() < 1e-12, "{e:?}");
    }

    #[test]
    fn crossing_bands_curl() {
        let g = grid(1.5, 128);
        let c = bc2_crossing_bands(&g, 0.1).unwrap();
        assert!(c.u.satisfies_bc(&g, &BoundaryCondition::horizontal(0.1)));
        let e = total_energy(&g, &c.u, &c.p, &params(0.2)).unwrap();
        let target = 2.0 * SQRT2 * 0.1 * 0.2;
        assert!((e.total - target).abs() < 0.02 * target, "{e:?}");
        assert!(e.elastic < 1e-3 * e.total);
        assert!(bc2_crossing_bands(&grid(2.0, 8), 0.1).is_err());
    }

    #[test]
    fn transition_elastic_limits() {
        let g = grid(0.5, 128);
        let c = bc1_transition(&g, 0.1, 0.02, 0.0004).unwrap();
        assert!(c.u.satisfies_bc(&g, &BoundaryCondition::diagonal(0.1)));
        let el = elastic_energy(&g, &c.u, &c.p).unwrap();
        assert!((el - 0.01).abs() < 0.1 * 0.01, "{el}");
        let c = bc2_transition(&g, 0.1, 0.02, 0.0004).unwrap();
        assert!(c.u.satisfies_bc(&g, &BoundaryCondition::horizontal(0.1)));
        let el = elastic_energy(&g, &c.u, &c.p).unwrap();
        assert!((el - 0.005).abs() < 0.1 * 0.005, "{el}");
        assert!(bc1_transition(&grid(1.0, 8), 0.1, 0.1, 0.5).is_err());
    }

    #[test]
    fn central_square_has_no_shear_strain() {
        let g = grid(0.5, 64);
        let c = bc2_transition(&g, 0.1, 0.05, 0.25).unwrap();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let gr = cell_gradient(&g, &c.u, i, j);
                let b = c.p.beta_matrix(g.cell(i, j));
                assert!((gr[0][1] + gr[1][0] - b[0][1] - b[1][0]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn potentials_are_curl_free() {
        for alpha in [1.0, 0.5, 0.05] {
            let g = grid(1.0, 32);
            let s = bc1_sigmoid(&g, 0.1, alpha).unwrap();
            assert_eq!(curl_energy(&g, &s.p).unwrap(), 0.0);
            assert!(elastic_energy(&g, &s.u_beta, &s.p).unwrap() < 1e-24);
            let g = grid(2.0, 16);
            let s = bc2_l2_sigmoid(&g, 0.1, alpha).unwrap();
            assert_eq!(curl_energy(&g, &s.p).unwrap(), 0.0);
            assert!(elastic_energy(&g, &s.u_beta, &s.p).unwrap() < 1e-24);
            let g = grid(0.5, 32);
            let s = scalar_half_construction(&g, 0.1, alpha).unwrap();
            let e = crate::energy::scalar_energy(&g, &s.u_beta, &s.p, &params(1.0)).unwrap();
            assert_eq!(e.curl_raw, 0.0);
            assert!(e.elastic < 1e-24);
        }
        assert!(bc1_sigmoid(&grid(1.5, 8), 0.1, 0.5).is_err());
        assert!(bc2_l2_sigmoid(&grid(1.5, 8), 0.1, 0.5).is_err());
        assert!(scalar_half_construction(&grid(1.0, 8), 0.1, 0.5).is_err());
    }

    #[test]
    fn linear_sigmoid_trace() {
        let g = grid(1.0, 8);
        let s = bc1_sigmoid(&g, 0.2, 1.0).unwrap();
        let a = 0.2 * FRAC_1_SQRT2;
        for i in 0..=g.nx {
            let x1 = i as f64 * g.h;
            assert!((s.residual[0].bottom[i] + a * (1.0 - x1)).abs() < 1e-14);
            assert!((s.residual[0].top[i] - a * x1).abs() < 1e-14);
            assert_eq!(s.residual[1].top[i], 0.0);
        }
    }

    #[test]
    fn lamination_of_zero_is_zero() {
        let g3 = Grid3::coarse(1.5, 4).unwrap();
        let p = PlasticField3::zeros(g3.num_cells());
        let q = laminate_burgers(&g3, &p, 0.5).unwrap();
        assert_eq!(q.burgers, p.burgers);
        assert!(laminate_burgers(&g3, &p, 0.1).is_err());
    }
}
