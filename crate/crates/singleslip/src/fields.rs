//! Nodal displacements and cellwise plastic distortions.
//!
//! Plastic fields store one label and one magnitude per cell. Matrices are
//! indexed `[row][col]` in the rotated basis `(xi, eta)` (and `zeta` in 3-d),
//! so `beta[1][0]` is the `eta xi` component.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{from_rotated, to_rotated, BcKind, BoundaryCondition, Grid, Grid3, FRAC_1_SQRT2};

pub type Mat2 = [[f64; 2]; 2];
pub type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SlipLabel {
    #[default]
    None,
    /// Only `beta_eta_xi` may be nonzero.
    EtaXi,
    /// Only `beta_xi_eta` may be nonzero.
    XiEta,
}

impl SlipLabel {
    pub const ALL: [SlipLabel; 3] = [SlipLabel::None, SlipLabel::EtaXi, SlipLabel::XiEta];

    pub fn index(self) -> usize {
        match self {
            SlipLabel::None => 0,
            SlipLabel::EtaXi => 1,
            SlipLabel::XiEta => 2,
        }
    }

    pub fn from_index(k: usize) -> Self {
        Self::ALL[k % 3]
    }
}

/// Access to the two off-diagonal components of a cellwise 2-d plastic field.
pub trait SlipComponents {
    fn cell_count(&self) -> usize;
    fn xi_eta(&self, c: usize) -> f64;
    fn eta_xi(&self, c: usize) -> f64;

    fn shear_sum(&self, c: usize) -> f64 {
        self.xi_eta(c) + self.eta_xi(c)
    }
}

/// Single-slip plastic field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlasticField {
    pub labels: Vec<SlipLabel>,
    pub s: Vec<f64>,
}

impl PlasticField {
    pub fn zeros(cells: usize) -> Self {
        Self { labels: vec![SlipLabel::None; cells], s: vec![0.0; cells] }
    }

    pub fn for_grid(grid: &Grid) -> Self {
        Self::zeros(grid.num_cells())
    }

    pub fn set(&mut self, c: usize, label: SlipLabel, s: f64) {
        self.labels[c] = label;
        self.s[c] = if label == SlipLabel::None { 0.0 } else { s };
    }

    /// Zeroes magnitudes on cells labelled `None`.
    pub fn normalize(&mut self) {
        for (l, s) in self.labels.iter().zip(self.s.iter_mut()) {
            if *l == SlipLabel::None {
                *s = 0.0;
            }
        }
    }

    pub fn beta_matrix(&self, c: usize) -> Mat2 {
        let s = self.s[c];
        match self.labels[c] {
            SlipLabel::None => [[0.0; 2]; 2],
            SlipLabel::EtaXi => [[0.0, 0.0], [s, 0.0]],
            SlipLabel::XiEta => [[0.0, s], [0.0, 0.0]],
        }
    }

    pub fn beta_matrix_x_frame(&self, c: usize) -> Mat2 {
        rotated_to_x_frame(&self.beta_matrix(c))
    }

    pub fn active_cells(&self) -> usize {
        self.labels.iter().filter(|l| **l != SlipLabel::None).count()
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.labels.len() != grid.num_cells() || self.s.len() != grid.num_cells() {
            return Err(Error::GridMismatch(format!(
                "plastic field has {} cells, grid has {}",
                self.labels.len(),
                grid.num_cells()
            )));
        }
        Ok(())
    }
}

impl SlipComponents for PlasticField {
    fn cell_count(&self) -> usize {
        self.labels.len()
    }

    fn xi_eta(&self, c: usize) -> f64 {
        if self.labels[c] == SlipLabel::XiEta {
            self.s[c]
        } else {
            0.0
        }
    }

    fn eta_xi(&self, c: usize) -> f64 {
        if self.labels[c] == SlipLabel::EtaXi {
            self.s[c]
        } else {
            0.0
        }
    }
}

/// Plastic field with both slip systems active at once (no cross-hardening).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxedPlasticField {
    pub xi_eta: Vec<f64>,
    pub eta_xi: Vec<f64>,
}

impl RelaxedPlasticField {
    pub fn zeros(cells: usize) -> Self {
        Self { xi_eta: vec![0.0; cells], eta_xi: vec![0.0; cells] }
    }

    pub fn from_single(p: &PlasticField) -> Self {
        let n = p.cell_count();
        Self {
            xi_eta: (0..n).map(|c| p.xi_eta(c)).collect(),
            eta_xi: (0..n).map(|c| p.eta_xi(c)).collect(),
        }
    }
}

impl SlipComponents for RelaxedPlasticField {
    fn cell_count(&self) -> usize {
        self.xi_eta.len()
    }

    fn xi_eta(&self, c: usize) -> f64 {
        self.xi_eta[c]
    }

    fn eta_xi(&self, c: usize) -> f64 {
        self.eta_xi[c]
    }
}

/// `M_x = R^T M R` where `R` maps specimen-frame vectors to the rotated frame.
pub fn rotated_to_x_frame(m: &Mat2) -> Mat2 {
    let r = [[FRAC_1_SQRT2, FRAC_1_SQRT2], [-FRAC_1_SQRT2, FRAC_1_SQRT2]];
    let mut out = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = 0.0;
            for p in 0..2 {
                for q in 0..2 {
                    acc += r[p][a] * m[p][q] * r[q][b];
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

pub fn x_frame_to_rotated(m: &Mat2) -> Mat2 {
    let r = [[FRAC_1_SQRT2, FRAC_1_SQRT2], [-FRAC_1_SQRT2, FRAC_1_SQRT2]];
    let mut out = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = 0.0;
            for p in 0..2 {
                for q in 0..2 {
                    acc += r[a][p] * m[p][q] * r[b][q];
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

pub fn frobenius(m: &Mat2) -> f64 {
    (m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]).sqrt()
}

/// Nearest single-slip matrix per cell in the Frobenius norm.
///
/// Returns the field and the per-cell residual norms. Ties go to `None`,
/// then `EtaXi`.
pub fn project_single_slip(raw: &[Mat2]) -> (PlasticField, Vec<f64>) {
    let mut p = PlasticField::zeros(raw.len());
    let mut residual = Vec::with_capacity(raw.len());
    for (c, m) in raw.iter().enumerate() {
        let total = m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
        let keep_ex = m[1][0] * m[1][0];
        let keep_xe = m[0][1] * m[0][1];
        let (label, s, kept) = if keep_ex == 0.0 && keep_xe == 0.0 {
            (SlipLabel::None, 0.0, 0.0)
        } else if keep_ex >= keep_xe {
            (SlipLabel::EtaXi, m[1][0], keep_ex)
        } else {
            (SlipLabel::XiEta, m[0][1], keep_xe)
        };
        p.set(c, label, s);
        residual.push((total - kept).max(0.0).sqrt());
    }
    (p, residual)
}

/// Scalar (antiplane) model labels: which in-plane component of `beta` is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScalarSlipLabel {
    #[default]
    None,
    Xi,
    Eta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarPlasticField {
    pub labels: Vec<ScalarSlipLabel>,
    pub s: Vec<f64>,
}

impl ScalarPlasticField {
    pub fn zeros(cells: usize) -> Self {
        Self { labels: vec![ScalarSlipLabel::None; cells], s: vec![0.0; cells] }
    }

    pub fn set(&mut self, c: usize, label: ScalarSlipLabel, s: f64) {
        self.labels[c] = label;
        self.s[c] = if label == ScalarSlipLabel::None { 0.0 } else { s };
    }

    /// `(beta_xi, beta_eta)`.
    pub fn beta(&self, c: usize) -> [f64; 2] {
        match self.labels[c] {
            ScalarSlipLabel::None => [0.0, 0.0],
            ScalarSlipLabel::Xi => [self.s[c], 0.0],
            ScalarSlipLabel::Eta => [0.0, self.s[c]],
        }
    }
}

/// Slip-plane label in three dimensions, named by the plane normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SlipPlane {
    #[default]
    None,
    PlaneXi,
    PlaneEta,
    PlaneZeta,
}

impl SlipPlane {
    /// Axis index of the plane normal.
    pub fn normal(self) -> Option<usize> {
        match self {
            SlipPlane::None => None,
            SlipPlane::PlaneXi => Some(0),
            SlipPlane::PlaneEta => Some(1),
            SlipPlane::PlaneZeta => Some(2),
        }
    }

    /// Axis indices carrying the two in-plane Burgers components.
    pub fn in_plane(self) -> Option<[usize; 2]> {
        match self {
            SlipPlane::None => None,
            SlipPlane::PlaneXi => Some([1, 2]),
            SlipPlane::PlaneEta => Some([0, 2]),
            SlipPlane::PlaneZeta => Some([0, 1]),
        }
    }
}

/// Three-dimensional plastic field: per cell a slip plane and an in-plane
/// Burgers vector `(s_a, s_b)` along the axes returned by
/// [`SlipPlane::in_plane`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlasticField3 {
    pub labels: Vec<SlipPlane>,
    pub burgers: Vec<[f64; 2]>,
    /// Restrict Burgers vectors to the discrete crystallographic directions.
    pub discrete_burgers: bool,
}

impl PlasticField3 {
    pub fn zeros(cells: usize) -> Self {
        Self { labels: vec![SlipPlane::None; cells], burgers: vec![[0.0; 2]; cells], discrete_burgers: false }
    }

    pub fn set(&mut self, c: usize, plane: SlipPlane, b: [f64; 2]) {
        self.labels[c] = plane;
        self.burgers[c] = if plane == SlipPlane::None { [0.0; 2] } else { b };
    }

    /// The plastic distortion: column `normal` holds the Burgers vector.
    pub fn beta_matrix(&self, c: usize) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        if let (Some(col), Some(rows)) = (self.labels[c].normal(), self.labels[c].in_plane()) {
            m[rows[0]][col] = self.burgers[c][0];
            m[rows[1]][col] = self.burgers[c][1];
        }
        m
    }

    /// Whether every Burgers vector points along an admissible crystal direction.
    ///
    /// Planes with normal `xi` or `eta` admit `(1, 1)` and `(1, -1)`, the
    /// `zeta` plane admits `(1, 0)` and `(0, 1)`, all up to sign.
    pub fn satisfies_discrete_burgers(&self, tol: f64) -> bool {
        self.labels.iter().zip(&self.burgers).all(|(l, b)| burgers_direction_ok(*l, *b, tol))
    }
}

pub fn burgers_direction_ok(plane: SlipPlane, b: [f64; 2], tol: f64) -> bool {
    let scale = b[0].abs().max(b[1].abs());
    if scale <= tol {
        return true;
    }
    match plane {
        SlipPlane::None => scale <= tol,
        SlipPlane::PlaneXi | SlipPlane::PlaneEta => {
            (b[0].abs() - b[1].abs()).abs() <= tol * scale.max(1.0)
        }
        SlipPlane::PlaneZeta => b[0].abs().min(b[1].abs()) <= tol * scale.max(1.0),
    }
}

/// Nodal displacement in the rotated frame, `values[k] = [u_xi, u_eta]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementField {
    pub values: Vec<[f64; 2]>,
}

impl DisplacementField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { values: vec![[0.0; 2]; grid.num_nodes()] }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let mut values = Vec::with_capacity(grid.num_nodes());
        for j in 0..=grid.ny {
            for i in 0..=grid.nx {
                let x = grid.node_coord(i, j);
                values.push(f(x[0], x[1]));
            }
        }
        Self { values }
    }

    /// From specimen-frame components `(u1, u2)`.
    pub fn from_x_frame(values: &[[f64; 2]]) -> Self {
        Self { values: values.iter().map(|v| to_rotated(*v)).collect() }
    }

    pub fn x_frame(&self) -> Vec<[f64; 2]> {
        self.values.iter().map(|w| from_rotated(*w)).collect()
    }

    /// Overwrites both Dirichlet rows with the boundary data.
    pub fn apply_bc(&mut self, grid: &Grid, bc: &BoundaryCondition) {
        let top = bc.top_rotated();
        for i in 0..=grid.nx {
            self.values[grid.node(i, 0)] = [0.0, 0.0];
            self.values[grid.node(i, grid.ny)] = top;
        }
    }

    pub fn satisfies_bc(&self, grid: &Grid, bc: &BoundaryCondition) -> bool {
        let top = bc.top_rotated();
        (0..=grid.nx).all(|i| self.values[grid.node(i, 0)] == [0.0, 0.0] && self.values[grid.node(i, grid.ny)] == top)
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.values.len() != grid.num_nodes() {
            return Err(Error::GridMismatch(format!(
                "displacement has {} nodes, grid has {}",
                self.values.len(),
                grid.num_nodes()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarDisplacement {
    pub values: Vec<f64>,
}

impl ScalarDisplacement {
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.num_nodes());
        for j in 0..=grid.ny {
            for i in 0..=grid.nx {
                let x = grid.node_coord(i, j);
                values.push(f(x[0], x[1]));
            }
        }
        Self { values }
    }

    pub fn apply_bc(&mut self, grid: &Grid, bc: &BoundaryCondition) {
        for i in 0..=grid.nx {
            self.values[grid.node(i, 0)] = 0.0;
            self.values[grid.node(i, grid.ny)] = bc.gamma;
        }
    }
}

/// Nodal displacement in the rotated frame `(u_xi, u_eta, u_zeta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Displacement3 {
    pub values: Vec<[f64; 3]>,
}

impl Displacement3 {
    pub fn zeros(grid: &Grid3) -> Self {
        Self { values: vec![[0.0; 3]; grid.num_nodes()] }
    }

    /// Copies a planar field to every layer with zero `u_zeta`.
    pub fn extrude(grid: &Grid3, u: &DisplacementField) -> Self {
        let per = grid.plane.num_nodes();
        let values = (0..grid.num_nodes()).map(|v| {
            let w = u.values[v % per];
            [w[0], w[1], 0.0]
        });
        Self { values: values.collect() }
    }

    pub fn apply_bc(&mut self, grid: &Grid3, bc: &BoundaryCondition) {
        debug_assert!(matches!(bc.kind, BcKind::Horizontal3d | BcKind::Horizontal));
        let t = bc.top_rotated();
        for k in 0..=grid.nz {
            for i in 0..=grid.plane.nx {
                self.values[grid.node(i, 0, k)] = [0.0; 3];
                self.values[grid.node(i, grid.plane.ny, k)] = [t[0], t[1], 0.0];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_matrix_structure() {
        let mut p = PlasticField::zeros(2);
        p.set(0, SlipLabel::EtaXi, 2.0);
        assert_eq!(p.beta_matrix(0), [[0.0, 0.0], [2.0, 0.0]]);
        assert_eq!(p.beta_matrix(1), [[0.0; 2]; 2]);
        p.set(1, SlipLabel::None, 5.0);
        assert_eq!(p.s[1], 0.0);
    }

    #[test]
    fn three_d_zeta_column() {
        let mut p = PlasticField3::zeros(1);
        p.set(0, SlipPlane::PlaneZeta, [1.0, -1.0]);
        let m = p.beta_matrix(0);
        assert_eq!([m[0][2], m[1][2], m[2][2]], [1.0, -1.0, 0.0]);
        assert_eq!(m[2], [0.0; 3]);
        assert!(!p.satisfies_discrete_burgers(1e-12));
        p.set(0, SlipPlane::PlaneXi, [1.0, -1.0]);
        assert!(p.satisfies_discrete_burgers(1e-12));
        let m = p.beta_matrix(0);
        assert_eq!(m[0], [0.0; 3]);
    }

    #[test]
    fn x_frame_is_traceless_rank_one() {
        let mut p = PlasticField::zeros(2);
        p.set(0, SlipLabel::EtaXi, 1.0);
        p.set(1, SlipLabel::XiEta, 1.0);
        for c in 0..2 {
            let m = p.beta_matrix_x_frame(c);
            assert!((m[0][0] + m[1][1]).abs() < 1e-15);
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            assert!(det.abs() < 1e-15);
            assert!((frobenius(&m) - 1.0).abs() < 1e-15);
        }
        let e = p.beta_matrix_x_frame(0);
        assert!((e[0][0] - e[0][1]).abs() < 1e-15 && (e[0][0] + e[1][0]).abs() < 1e-15);
        let x = p.beta_matrix_x_frame(1);
        assert!((x[0][0] + x[0][1]).abs() < 1e-15 && (x[0][0] - x[1][0]).abs() < 1e-15);
        let back = x_frame_to_rotated(&x);
        assert!((back[0][1] - 1.0).abs() < 1e-15 && back[1][0].abs() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        let raw = [[[0.0; 2]; 2], [[0.0, 0.0], [3.0, 0.0]], [[0.0, 1.0], [1.0, 0.0]]];
        let (p, r) = project_single_slip(&raw);
        assert_eq!(p.labels[0], SlipLabel::None);
        assert_eq!((p.labels[1], p.s[1], r[1]), (SlipLabel::EtaXi, 3.0, 0.0));
        assert_eq!(p.labels[2], SlipLabel::EtaXi);
        // Oracle: residual of each label computed directly.
        let m = raw[2];
        let cand = [
            frobenius(&m),
            frobenius(&[[m[0][0], m[0][1]], [0.0, m[1][1]]]),
            frobenius(&[[m[0][0], 0.0], [m[1][0], m[1][1]]]),
        ];
        let best = cand.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((r[2] - best).abs() < 1e-15 && (r[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bc_rows_exact() {
        let g = Grid::coarse(1.0, 4).unwrap();
        let bc = BoundaryCondition::horizontal(0.3);
        let mut u = DisplacementField::from_fn(&g, |x, y| [x * y, x - y]);
        u.apply_bc(&g, &bc);
        assert!(u.satisfies_bc(&g, &bc));
    }
}
