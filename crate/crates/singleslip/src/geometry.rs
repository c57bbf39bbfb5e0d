//! Domain, slip-aligned frame, grids and boundary conditions.
//!
//! The grid is axis-aligned with the specimen `(0,1) x (0,L)`; slip-frame
//! derivatives are taken along cell diagonals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SQRT2: f64 = std::f64::consts::SQRT_2;
pub const FRAC_1_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

const TILING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    TwoD,
    ScalarTwoD,
    ThreeD,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub height: f64,
    pub dimension: Dimension,
}

impl DomainSpec {
    pub fn new(height: f64, dimension: Dimension) -> Result<Self> {
        if !(height.is_finite() && height > 0.0) {
            return Err(Error::InvalidDomain(format!("height must be positive, got {height}")));
        }
        Ok(Self { height, dimension })
    }

    pub fn two_d(height: f64) -> Result<Self> {
        Self::new(height, Dimension::TwoD)
    }

    pub fn width(&self) -> f64 {
        1.0
    }

    pub fn depth(&self) -> f64 {
        1.0
    }
}

/// Rotation by 45 degrees: `xi = (x1 + x2)/sqrt2`, `eta = (x2 - x1)/sqrt2`.
///
/// `origin` shifts where point coordinates are measured from; vectors are
/// unaffected by it.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RotatedFrame {
    pub origin: [f64; 2],
}

impl RotatedFrame {
    pub fn with_origin(origin: [f64; 2]) -> Self {
        Self { origin }
    }

    pub fn to_rotated(&self, v: [f64; 2]) -> [f64; 2] {
        to_rotated(v)
    }

    pub fn from_rotated(&self, w: [f64; 2]) -> [f64; 2] {
        from_rotated(w)
    }

    pub fn point_to_rotated(&self, x: [f64; 2]) -> [f64; 2] {
        to_rotated([x[0] - self.origin[0], x[1] - self.origin[1]])
    }

    pub fn point_from_rotated(&self, w: [f64; 2]) -> [f64; 2] {
        let v = from_rotated(w);
        [v[0] + self.origin[0], v[1] + self.origin[1]]
    }
}

pub fn to_rotated(v: [f64; 2]) -> [f64; 2] {
    [(v[0] + v[1]) * FRAC_1_SQRT2, (v[1] - v[0]) * FRAC_1_SQRT2]
}

pub fn from_rotated(w: [f64; 2]) -> [f64; 2] {
    [(w[0] - w[1]) * FRAC_1_SQRT2, (w[0] + w[1]) * FRAC_1_SQRT2]
}

/// Uniform grid of square cells with `n` cells per unit length.
///
/// Cell `(i, j)` spans `[i h, (i+1) h] x [j h, (j+1) h]` with `i < nx`, `j < ny`.
/// Nodes are indexed `j * (nx + 1) + i`, cells `j * nx + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub height: f64,
    pub requested_height: f64,
    pub rounding_note: Option<String>,
}

pub fn make_grid(spec: &DomainSpec, n: usize) -> Result<Grid> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidResolution(format!("n must be even and at least 4, got {n}")));
    }
    Grid::build(spec.height, n)
}

impl Grid {
    /// Small grids (even `n >= 2`) for exhaustive checks.
    pub fn coarse(height: f64, n: usize) -> Result<Grid> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidResolution(format!("n must be even and at least 2, got {n}")));
        }
        if !(height.is_finite() && height > 0.0) {
            return Err(Error::InvalidDomain(format!("height must be positive, got {height}")));
        }
        Grid::build(height, n)
    }

    fn build(height: f64, n: usize) -> Result<Grid> {
        if !(height.is_finite() && height > 0.0) {
            return Err(Error::InvalidDomain(format!("height must be positive, got {height}")));
        }
        let cells = height * n as f64;
        let rounded = cells.round();
        if rounded < 1.0 || (cells - rounded).abs() > TILING_TOL {
            let nearest = rounded.max(1.0) / n as f64;
            return Err(Error::InvalidResolution(format!(
                "n*L = {cells} is not an integer for n = {n}; nearest valid L = {nearest}"
            )));
        }
        let ny = rounded as usize;
        let exact = ny as f64 / n as f64;
        let rounding_note = if exact != height {
            Some(format!("height {height} rounded to {exact} for n = {n}"))
        } else {
            None
        };
        Ok(Grid {
            n,
            h: 1.0 / n as f64,
            nx: n,
            ny,
            height: exact,
            requested_height: height,
            rounding_note,
        })
    }

    pub fn num_nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn num_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn node(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn cell_ij(&self, c: usize) -> (usize, usize) {
        (c % self.nx, c / self.nx)
    }

    pub fn node_ij(&self, k: usize) -> (usize, usize) {
        (k % (self.nx + 1), k / (self.nx + 1))
    }

    pub fn node_coord(&self, i: usize, j: usize) -> [f64; 2] {
        [i as f64 * self.h, j as f64 * self.h]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        [(i as f64 + 0.5) * self.h, (j as f64 + 0.5) * self.h]
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    /// Corner nodes of a cell in the order SW, SE, NW, NE.
    pub fn cell_nodes(&self, i: usize, j: usize) -> [usize; 4] {
        [self.node(i, j), self.node(i + 1, j), self.node(i, j + 1), self.node(i + 1, j + 1)]
    }

    /// Cell pairs `(i, j) - (i+1, j+1)`, neighbours along the xi direction.
    pub fn xi_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for j in 0..self.ny.saturating_sub(1) {
            for i in 0..self.nx.saturating_sub(1) {
                pairs.push((self.cell(i, j), self.cell(i + 1, j + 1)));
            }
        }
        pairs
    }

    /// Cell pairs `(i, j) - (i-1, j+1)`, neighbours along the eta direction.
    pub fn eta_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for j in 0..self.ny.saturating_sub(1) {
            for i in 1..self.nx {
                pairs.push((self.cell(i, j), self.cell(i - 1, j + 1)));
            }
        }
        pairs
    }

    /// Weight of one diagonal jump in the discrete curl: the cell-centre
    /// distance `sqrt2 h` times the dual face length `h/2`.
    pub fn diagonal_weight(&self) -> f64 {
        self.h * FRAC_1_SQRT2
    }

    /// Nodes on `x2 = 0` and `x2 = L`.
    pub fn dirichlet_nodes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..=self.nx).map(|i| self.node(i, 0)).collect();
        v.extend((0..=self.nx).map(|i| self.node(i, self.ny)));
        v
    }

    pub fn is_dirichlet(&self, k: usize) -> bool {
        let (_, j) = self.node_ij(k);
        j == 0 || j == self.ny
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.n == other.n
    }
}

/// Three-dimensional grid: the planar grid extruded over depth one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub plane: Grid,
    pub nz: usize,
}

pub fn make_grid3(spec: &DomainSpec, n: usize) -> Result<Grid3> {
    let plane = make_grid(spec, n)?;
    Ok(Grid3 { nz: n, plane })
}

impl Grid3 {
    pub fn coarse(height: f64, n: usize) -> Result<Grid3> {
        let plane = Grid::coarse(height, n)?;
        Ok(Grid3 { nz: n, plane })
    }

    pub fn h(&self) -> f64 {
        self.plane.h
    }

    pub fn num_nodes(&self) -> usize {
        self.plane.num_nodes() * (self.nz + 1)
    }

    pub fn num_cells(&self) -> usize {
        self.plane.num_cells() * self.nz
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> usize {
        k * self.plane.num_nodes() + self.plane.node(i, j)
    }

    pub fn cell(&self, i: usize, j: usize, k: usize) -> usize {
        k * self.plane.num_cells() + self.plane.cell(i, j)
    }

    pub fn cell_ijk(&self, c: usize) -> (usize, usize, usize) {
        let per = self.plane.num_cells();
        let (i, j) = self.plane.cell_ij(c % per);
        (i, j, c / per)
    }

    pub fn node_ijk(&self, v: usize) -> (usize, usize, usize) {
        let per = self.plane.num_nodes();
        let (i, j) = self.plane.node_ij(v % per);
        (i, j, v / per)
    }

    pub fn is_dirichlet(&self, v: usize) -> bool {
        let (_, j, _) = self.node_ijk(v);
        j == 0 || j == self.plane.ny
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcKind {
    /// `u = gamma (1, 1)` on the top face.
    Diagonal,
    /// `u = gamma (1, 0)` on the top face.
    Horizontal,
    /// `u = gamma (1, 0, 0)` on the top face, three dimensions.
    Horizontal3d,
    /// `u = gamma` on the top face, antiplane model.
    ScalarShear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub kind: BcKind,
    pub gamma: f64,
}

impl BoundaryCondition {
    pub fn new(kind: BcKind, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be non-negative, got {gamma}")));
        }
        Ok(Self { kind, gamma })
    }

    pub fn diagonal(gamma: f64) -> Self {
        Self { kind: BcKind::Diagonal, gamma }
    }

    pub fn horizontal(gamma: f64) -> Self {
        Self { kind: BcKind::Horizontal, gamma }
    }

    pub fn horizontal_3d(gamma: f64) -> Self {
        Self { kind: BcKind::Horizontal3d, gamma }
    }

    pub fn scalar(gamma: f64) -> Self {
        Self { kind: BcKind::ScalarShear, gamma }
    }

    /// Top-face displacement in the specimen frame.
    pub fn top_x_frame(&self) -> [f64; 3] {
        let g = self.gamma;
        match self.kind {
            BcKind::Diagonal => [g, g, 0.0],
            BcKind::Horizontal | BcKind::Horizontal3d => [g, 0.0, 0.0],
            BcKind::ScalarShear => [g, 0.0, 0.0],
        }
    }

    /// Top-face displacement in the rotated frame `(u_xi, u_eta)`.
    pub fn top_rotated(&self) -> [f64; 2] {
        let t = self.top_x_frame();
        match self.kind {
            BcKind::Diagonal => [SQRT2 * self.gamma, 0.0],
            _ => to_rotated([t[0], t[1]]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_of_basis_vectors() {
        let f = RotatedFrame::default();
        let a = f.to_rotated([1.0, 0.0]);
        assert!((a[0] - FRAC_1_SQRT2).abs() < 1e-15 && (a[1] + FRAC_1_SQRT2).abs() < 1e-15);
        let b = f.to_rotated([1.0, 1.0]);
        assert!((b[0] - SQRT2).abs() < 1e-15 && b[1].abs() < 1e-15);
    }

    #[test]
    fn offset_only_moves_points() {
        let f = RotatedFrame::with_origin([0.5, 0.5]);
        let p = f.point_to_rotated([0.5, 0.5]);
        assert_eq!(p, [0.0, 0.0]);
        let q = f.point_from_rotated(f.point_to_rotated([0.3, 0.9]));
        assert!((q[0] - 0.3).abs() < 1e-15 && (q[1] - 0.9).abs() < 1e-15);
        assert_eq!(f.to_rotated([2.0, 0.0]), to_rotated([2.0, 0.0]));
    }

    #[test]
    fn grid_shapes() {
        let g = make_grid(&DomainSpec::two_d(1.0).unwrap(), 4).unwrap();
        assert_eq!((g.nx, g.ny, g.num_nodes()), (4, 4, 25));
        let g = make_grid(&DomainSpec::two_d(2.0).unwrap(), 4).unwrap();
        assert_eq!((g.nx, g.ny), (4, 8));
    }

    #[test]
    fn diagonal_pairs_match_enumeration() {
        let g = make_grid(&DomainSpec::two_d(0.5).unwrap(), 6).unwrap();
        assert_eq!((g.nx, g.ny), (6, 3));
        let mut xi = 0;
        let mut eta = 0;
        for a in 0..g.num_cells() {
            for b in 0..g.num_cells() {
                let (ia, ja) = g.cell_ij(a);
                let (ib, jb) = g.cell_ij(b);
                if jb == ja + 1 && ib == ia + 1 {
                    xi += 1;
                }
                if jb == ja + 1 && ib + 1 == ia {
                    eta += 1;
                }
            }
        }
        assert_eq!(g.xi_pairs().len(), xi);
        assert_eq!(g.eta_pairs().len(), eta);
        assert_eq!(xi + eta, 20);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(DomainSpec::two_d(0.0).is_err());
        assert!(DomainSpec::two_d(-1.0).is_err());
        let spec = DomainSpec::two_d(0.3).unwrap();
        match make_grid(&spec, 4) {
            Err(Error::InvalidResolution(msg)) => assert!(msg.contains("0.25"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(make_grid(&DomainSpec::two_d(1.0).unwrap(), 5).is_err());
        assert!(make_grid(&DomainSpec::two_d(1.0).unwrap(), 2).is_err());
    }

    #[test]
    fn rounding_is_recorded() {
        let g = make_grid(&DomainSpec::two_d(1.0 / 3.0 * 3.0 + 1e-12).unwrap(), 4).unwrap();
        assert_eq!(g.ny, 4);
        assert!(g.rounding_note.is_some());
        assert_eq!(g.height, 1.0);
    }

    #[test]
    fn area_and_dirichlet_rows() {
        let g = make_grid(&DomainSpec::two_d(1.5).unwrap(), 8).unwrap();
        let area: f64 = (0..g.num_cells()).map(|_| g.cell_area()).sum();
        assert!((area - 1.5).abs() < 1e-12);
        let d = g.dirichlet_nodes();
        for k in 0..g.num_nodes() {
            let (_, j) = g.node_ij(k);
            assert_eq!(d.contains(&k), j == 0 || j == g.ny);
            assert_eq!(g.is_dirichlet(k), j == 0 || j == g.ny);
        }
    }

    #[test]
    fn top_values() {
        let t = BoundaryCondition::diagonal(0.1).top_rotated();
        assert!((t[0] - SQRT2 * 0.1).abs() < 1e-16 && t[1] == 0.0);
        let t = BoundaryCondition::horizontal(0.1).top_rotated();
        assert!((t[0] - 0.1 * FRAC_1_SQRT2).abs() < 1e-16 && (t[1] + 0.1 * FRAC_1_SQRT2).abs() < 1e-16);
    }
}
