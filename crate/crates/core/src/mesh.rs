//! Uniform periodic Cartesian grid with per-cell nodal coefficients and
//! per-face space-time trace buffers.
//!
//! Cells are numbered `iy * n + ix`. The x-face with the same index as a
//! cell is that cell's left face: the cell is its `plus` side and the cell to
//! the left (with periodic wrap) is its `minus` side. y-faces follow the same
//! pattern with the bottom face.
//!
//! Buffers hold `f64` values, but every value written through the grid API is
//! rounded to the format of the owning kernel first, so the buffers only ever
//! contain numbers representable in that format.

use crate::basis::ReferenceBasis;
use crate::error::{Error, Result};
use crate::pde::{Direction, PdeSystem};
use crate::precision::{round_to_format, FloatFormat};

/// Square domain `[lower, lower + length]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lower: [f64; 2],
    pub length: f64,
}

impl Domain {
    pub fn square(lo: f64, hi: f64) -> Self {
        Self {
            lower: [lo, lo],
            length: hi - lo,
        }
    }

    /// Wraps a coordinate into the periodic interval along one axis.
    pub fn wrap(&self, x: f64, axis: usize) -> f64 {
        let lo = self.lower[axis];
        lo + (x - lo).rem_euclid(self.length)
    }

    pub fn area(&self) -> f64 {
        self.length * self.length
    }
}

/// Nodal coefficients of one cell, layout `(v * n1 + iy) * n1 + ix`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSolution {
    pub coeffs: Vec<f64>,
}

/// One side of a face: state and normal flux at every (face node, time node).
/// Layout `(v * n1 + s) * n1 + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceTrace {
    pub q: Vec<f64>,
    pub flux: Vec<f64>,
}

impl FaceTrace {
    fn zeros(len: usize) -> Self {
        Self {
            q: vec![0.0; len],
            flux: vec![0.0; len],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceBuffer {
    pub normal: Direction,
    pub minus: FaceTrace,
    pub plus: FaceTrace,
    /// Numerical flux seen by the minus cell, same layout as the traces.
    pub flux_minus: Vec<f64>,
    /// Numerical flux seen by the plus cell.
    pub flux_plus: Vec<f64>,
}

impl FaceBuffer {
    fn zeros(normal: Direction, len: usize) -> Self {
        Self {
            normal,
            minus: FaceTrace::zeros(len),
            plus: FaceTrace::zeros(len),
            flux_minus: vec![0.0; len],
            flux_plus: vec![0.0; len],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Grid {
    pub n: usize,
    pub domain: Domain,
    pub h: f64,
    pub order: usize,
    pub nvars: usize,
    pub storage: FloatFormat,
    pub cells: Vec<CellSolution>,
    pub x_faces: Vec<FaceBuffer>,
    pub y_faces: Vec<FaceBuffer>,
}

pub fn build_grid(n: usize, domain: Domain, order: usize, sys: &PdeSystem) -> Result<Grid> {
    Grid::new(n, domain, order, sys.nvars(), FloatFormat::Fp64)
}

impl Grid {
    pub fn new(
        n: usize,
        domain: Domain,
        order: usize,
        nvars: usize,
        storage: FloatFormat,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("cells per dimension must be positive".into()));
        }
        if !(domain.length > 0.0) || !domain.length.is_finite() {
            return Err(Error::Config("domain edge length must be positive".into()));
        }
        let n1 = order + 1;
        let cell_len = nvars * n1 * n1;
        let cells = vec![
            CellSolution {
                coeffs: vec![0.0; cell_len],
            };
            n * n
        ];
        let x_faces = vec![FaceBuffer::zeros(Direction::X, cell_len); n * n];
        let y_faces = vec![FaceBuffer::zeros(Direction::Y, cell_len); n * n];
        Ok(Self {
            n,
            domain,
            h: domain.length / n as f64,
            order,
            nvars,
            storage,
            cells,
            x_faces,
            y_faces,
        })
    }

    pub fn n1(&self) -> usize {
        self.order + 1
    }

    pub fn num_cells(&self) -> usize {
        self.n * self.n
    }

    pub fn cell_index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    pub fn cell_coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.n, cell / self.n)
    }

    /// Neighbouring cell in `dir`, `forward` meaning the +x or +y side.
    pub fn neighbor(&self, cell: usize, dir: Direction, forward: bool) -> usize {
        let (ix, iy) = self.cell_coords(cell);
        let n = self.n;
        let step = |i: usize| if forward { (i + 1) % n } else { (i + n - 1) % n };
        match dir {
            Direction::X => self.cell_index(step(ix), iy),
            Direction::Y => self.cell_index(ix, step(iy)),
        }
    }

    /// Faces of a cell in `dir`: (lower face, upper face).
    pub fn cell_faces(&self, cell: usize, dir: Direction) -> (usize, usize) {
        (cell, self.neighbor(cell, dir, true))
    }

    /// Cells adjacent to a face: (minus, plus).
    pub fn face_cells(&self, face: usize, dir: Direction) -> (usize, usize) {
        (self.neighbor(face, dir, false), face)
    }

    pub fn cell_corner(&self, cell: usize) -> [f64; 2] {
        let (ix, iy) = self.cell_coords(cell);
        [
            self.domain.lower[0] + ix as f64 * self.h,
            self.domain.lower[1] + iy as f64 * self.h,
        ]
    }

    /// Physical node positions of a cell, ordered `iy * n1 + ix`.
    pub fn node_coordinates(&self, cell: usize, basis: &ReferenceBasis<f64>) -> Vec<[f64; 2]> {
        let c = self.cell_corner(cell);
        let mut out = Vec::with_capacity(basis.nodes.len().pow(2));
        for &yn in &basis.nodes {
            for &xn in &basis.nodes {
                out.push([c[0] + self.h * xn, c[1] + self.h * yn]);
            }
        }
        out
    }

    /// Writes nodal coefficients, rounding each to the storage format.
    pub fn write_cell(&mut self, cell: usize, values: &[f64]) {
        let fmt = self.storage;
        for (dst, &v) in self.cells[cell].coeffs.iter_mut().zip(values) {
            *dst = round_to_format(v, fmt);
        }
    }

    /// Samples `f` at every node and stores the rounded values.
    pub fn initialize<F>(&mut self, basis: &ReferenceBasis<f64>, f: F)
    where
        F: Fn(f64, f64) -> Vec<f64>,
    {
        let values = self.sample(basis, f);
        for (cell, vals) in values.iter().enumerate() {
            self.write_cell(cell, vals);
        }
    }

    /// Samples `f` at every node in `f64` without touching the grid.
    pub fn sample<F>(&self, basis: &ReferenceBasis<f64>, f: F) -> Vec<Vec<f64>>
    where
        F: Fn(f64, f64) -> Vec<f64>,
    {
        let n1 = self.n1();
        let nn = n1 * n1;
        (0..self.num_cells())
            .map(|cell| {
                let mut vals = vec![0.0; self.nvars * nn];
                for (node, p) in self.node_coordinates(cell, basis).iter().enumerate() {
                    let q = f(p[0], p[1]);
                    for v in 0..self.nvars {
                        vals[v * nn + node] = q[v];
                    }
                }
                vals
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.cells
            .iter()
            .flat_map(|c| c.coeffs.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Coefficients of variable `v` at node `(ix, iy)` of every cell.
    pub fn value(&self, cell: usize, v: usize, ix: usize, iy: usize) -> f64 {
        let n1 = self.n1();
        self.cells[cell].coeffs[(v * n1 + iy) * n1 + ix]
    }
}
