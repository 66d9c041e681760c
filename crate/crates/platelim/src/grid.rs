//! Rectangular midplane grids and nodal displacement fields.
//!
//! The domain is the axis-aligned rectangle of side lengths `lx x ly`
//! centred at the origin (so field barycentres and moments are computed
//! about 0). Nodes form an `nx x ny` lattice including the boundary; cells
//! are the `(nx-1) x (ny-1)` rectangles between them. Node storage is
//! row-major: index `j * nx + i` for column `i`, row `j`.

use crate::error::{Error, Result};

/// Uniform node lattice on a centred rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
}

impl Grid2D {
    /// At least 3 nodes per side so second differences exist everywhere.
    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(lx.is_finite() && ly.is_finite() && lx > 0.0 && ly > 0.0) {
            return Err(Error::Grid(format!("side lengths must be positive, got {lx} x {ly}")));
        }
        if nx < 3 || ny < 3 {
            return Err(Error::Grid(format!("need at least 3 nodes per side, got {nx} x {ny}")));
        }
        Ok(Grid2D {
            lx,
            ly,
            nx,
            ny,
            hx: lx / (nx - 1) as f64,
            hy: ly / (ny - 1) as f64,
        })
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        self.hx
    }

    pub fn hy(&self) -> f64 {
        self.hy
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_count(&self) -> usize {
        (self.nx - 1) * (self.ny - 1)
    }

    /// Row-major node index.
    pub fn node(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    pub fn node_x(&self, i: usize) -> f64 {
        -0.5 * self.lx + i as f64 * self.hx
    }

    pub fn node_y(&self, j: usize) -> f64 {
        -0.5 * self.ly + j as f64 * self.hy
    }

    /// Row-major cell index (cells indexed by their lower-left corner node).
    pub fn cell(&self, ci: usize, cj: usize) -> usize {
        debug_assert!(ci + 1 < self.nx && cj + 1 < self.ny);
        cj * (self.nx - 1) + ci
    }

    pub fn cell_center(&self, ci: usize, cj: usize) -> (f64, f64) {
        (self.node_x(ci) + 0.5 * self.hx, self.node_y(cj) + 0.5 * self.hy)
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    /// Domain area `lx * ly`.
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// Corner node indices of a cell: `(n00, n10, n01, n11)` with the first
    /// digit the x-offset and the second the y-offset.
    pub fn cell_corners(&self, ci: usize, cj: usize) -> (usize, usize, usize, usize) {
        (
            self.node(ci, cj),
            self.node(ci + 1, cj),
            self.node(ci, cj + 1),
            self.node(ci + 1, cj + 1),
        )
    }
}

/// In-plane displacement components and the out-of-plane deflection, one
/// value per grid node.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementField {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub v: Vec<f64>,
}

impl DisplacementField {
    pub fn zeros(grid: &Grid2D) -> Self {
        let n = grid.node_count();
        DisplacementField { u1: vec![0.0; n], u2: vec![0.0; n], v: vec![0.0; n] }
    }

    /// Sample closed-form fields at the nodes.
    pub fn from_fn(
        grid: &Grid2D,
        mut u: impl FnMut(f64, f64) -> [f64; 2],
        mut v: impl FnMut(f64, f64) -> f64,
    ) -> Self {
        let mut f = DisplacementField::zeros(grid);
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let (x, y) = (grid.node_x(i), grid.node_y(j));
                let n = grid.node(i, j);
                let ui = u(x, y);
                f.u1[n] = ui[0];
                f.u2[n] = ui[1];
                f.v[n] = v(x, y);
            }
        }
        f
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        let n = grid.node_count();
        if self.u1.len() != n || self.u2.len() != n || self.v.len() != n {
            return Err(Error::Fields(format!(
                "field lengths ({}, {}, {}) do not match the {} grid nodes",
                self.u1.len(),
                self.u2.len(),
                self.v.len(),
                n
            )));
        }
        Ok(())
    }

    /// Concatenate as `[u1, u2, v]` for the optimizer.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(3 * self.u1.len());
        out.extend_from_slice(&self.u1);
        out.extend_from_slice(&self.u2);
        out.extend_from_slice(&self.v);
        out
    }

    pub fn from_flat(grid: &Grid2D, flat: &[f64]) -> Result<Self> {
        let n = grid.node_count();
        if flat.len() != 3 * n {
            return Err(Error::Fields(format!(
                "flat vector has {} entries, expected {}",
                flat.len(),
                3 * n
            )));
        }
        Ok(DisplacementField {
            u1: flat[..n].to_vec(),
            u2: flat[n..2 * n].to_vec(),
            v: flat[2 * n..].to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid2D::new(0.0, 1.0, 5, 5).is_err());
        assert!(Grid2D::new(1.0, -2.0, 5, 5).is_err());
        assert!(Grid2D::new(1.0, 1.0, 2, 5).is_err());
        assert!(Grid2D::new(1.0, 1.0, 5, 1).is_err());
        assert!(Grid2D::new(f64::NAN, 1.0, 5, 5).is_err());
    }

    #[test]
    fn nodes_are_centred() {
        let g = Grid2D::new(2.0, 1.0, 5, 3).unwrap();
        assert_eq!(g.node_x(0), -1.0);
        assert_eq!(g.node_x(4), 1.0);
        assert_eq!(g.node_y(1), 0.0);
        assert_eq!(g.hx(), 0.5);
        assert_eq!(g.hy(), 0.5);
        // barycentre of the node set is the origin
        let (mut sx, mut sy) = (0.0, 0.0);
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                sx += g.node_x(i);
                sy += g.node_y(j);
            }
        }
        assert!(sx.abs() < 1e-14 && sy.abs() < 1e-14);
    }

    #[test]
    fn indexing_is_row_major() {
        let g = Grid2D::new(1.0, 1.0, 4, 3).unwrap();
        assert_eq!(g.node(0, 0), 0);
        assert_eq!(g.node(3, 0), 3);
        assert_eq!(g.node(0, 1), 4);
        assert_eq!(g.node(2, 2), 10);
        assert_eq!(g.node_count(), 12);
        assert_eq!(g.cell_count(), 6);
        assert_eq!(g.cell(1, 1), 4);
        let (n00, n10, n01, n11) = g.cell_corners(2, 1);
        assert_eq!((n00, n10, n01, n11), (6, 7, 10, 11));
    }

    #[test]
    fn cell_geometry_tiles_the_domain() {
        let g = Grid2D::new(3.0, 2.0, 7, 5).unwrap();
        let total: f64 = (0..g.cell_count()).map(|_| g.cell_area()).sum();
        assert!((total - g.area()).abs() < 1e-12);
        let (cx, cy) = g.cell_center(0, 0);
        assert!((cx - (-1.5 + 0.25)).abs() < 1e-15);
        assert!((cy - (-1.0 + 0.25)).abs() < 1e-15);
    }

    #[test]
    fn flat_round_trip() {
        let g = Grid2D::new(1.0, 1.0, 3, 3).unwrap();
        let f = DisplacementField::from_fn(&g, |x, y| [x + y, x - y], |x, y| x * y);
        let flat = f.to_flat();
        assert_eq!(flat.len(), 27);
        let back = DisplacementField::from_flat(&g, &flat).unwrap();
        assert_eq!(f, back);
        assert!(DisplacementField::from_flat(&g, &flat[1..]).is_err());
    }

    #[test]
    fn validate_checks_shapes() {
        let g = Grid2D::new(1.0, 1.0, 3, 3).unwrap();
        let mut f = DisplacementField::zeros(&g);
        assert!(f.validate(&g).is_ok());
        f.v.pop();
        assert!(f.validate(&g).is_err());
    }
}
