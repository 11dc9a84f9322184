//! Uniform triangulations of axis-aligned rectangles.
//!
//! Vertex `(i, j)` of an `N x N` grid has index `j * (N + 1) + i`. Square
//! `(i, j)` is split along the diagonal from its lower-left to its
//! upper-right corner into a lower cell `2 * (j * N + i)` and an upper cell
//! `2 * (j * N + i) + 1`, both counter-clockwise.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{AxisBox, Point2};
use crate::quadrature::QuadratureRule;

/// Relative tolerance for points that fall slightly outside the box.
const OUTSIDE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<Point2>,
    pub cells: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    /// Subdivisions per side; zero for meshes not built on a grid.
    pub n: usize,
    /// Largest cell diameter.
    pub h: f64,
    grid: Option<AxisBox>,
}

impl Mesh {
    /// Uniform mesh of `2 N^2` congruent right triangles.
    pub fn uniform(n: usize, domain: AxisBox) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("mesh needs N >= 1".into()));
        }
        let nv = n + 1;
        let dx = domain.width() / n as f64;
        let dy = domain.height() / n as f64;
        let mut vertices = Vec::with_capacity(nv * nv);
        let mut boundary = Vec::with_capacity(nv * nv);
        for j in 0..nv {
            for i in 0..nv {
                // pin the last row/column to the box so boundary coordinates are exact
                let x = if i == n { domain.hi[0] } else { domain.lo[0] + i as f64 * dx };
                let y = if j == n { domain.hi[1] } else { domain.lo[1] + j as f64 * dy };
                vertices.push([x, y]);
                boundary.push(i == 0 || j == 0 || i == n || j == n);
            }
        }
        let mut cells = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let v00 = j * nv + i;
                let v10 = v00 + 1;
                let v01 = v00 + nv;
                let v11 = v01 + 1;
                cells.push([v00, v10, v11]);
                cells.push([v00, v11, v01]);
            }
        }
        let mut mesh = Self {
            vertices,
            cells,
            boundary,
            n,
            h: 0.0,
            grid: Some(domain),
        };
        mesh.h = mesh.compute_size();
        Ok(mesh)
    }

    /// Unstructured mesh from explicit triangles. Point location falls back to
    /// a linear scan and no vertex is flagged as boundary.
    pub fn from_triangles(vertices: Vec<Point2>, cells: Vec<[usize; 3]>) -> Self {
        let boundary = vec![false; vertices.len()];
        let mut mesh = Self {
            vertices,
            cells,
            boundary,
            n: 0,
            h: 0.0,
            grid: None,
        };
        mesh.h = mesh.compute_size();
        mesh
    }

    pub fn domain(&self) -> Option<AxisBox> {
        self.grid
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_points(&self, cell: usize) -> [Point2; 3] {
        let [a, b, c] = self.cells[cell];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area (positive for counter-clockwise cells).
    pub fn cell_area(&self, cell: usize) -> f64 {
        triangle_area(&self.cell_points(cell))
    }

    /// Gradients of the three barycentric coordinates, constant per cell.
    pub fn barycentric_gradients(&self, cell: usize) -> [[f64; 2]; 3] {
        let [p0, p1, p2] = self.cell_points(cell);
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        [
            [(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det],
            [(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det],
            [(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det],
        ]
    }

    pub fn point_from_barycentric(&self, cell: usize, bary: [f64; 3]) -> Point2 {
        barycentric_to_point(&self.cell_points(cell), bary)
    }

    /// Longest cell edge over the whole mesh.
    pub fn mesh_size(&self) -> f64 {
        self.h
    }

    fn compute_size(&self) -> f64 {
        (0..self.num_cells())
            .map(|c| triangle_diameter(&self.cell_points(c)))
            .fold(0.0, f64::max)
    }

    /// Quadrature points and weights mapped onto `cell`. Weights sum to the
    /// cell area.
    pub fn cell_quadrature(&self, cell: usize, rule: &QuadratureRule) -> Vec<(Point2, f64)> {
        triangle_quadrature(&self.cell_points(cell), rule)
    }

    /// Finds a cell containing `x` and the barycentric coordinates of `x` in
    /// it. Points on the diagonal of a grid square resolve to the lower cell.
    pub fn locate_point(&self, x: Point2) -> Result<(usize, [f64; 3])> {
        match self.grid {
            Some(domain) => self.locate_structured(&domain, x),
            None => self.locate_scan(x),
        }
    }

    fn locate_structured(&self, domain: &AxisBox, x: Point2) -> Result<(usize, [f64; 3])> {
        let tol = OUTSIDE_TOL * domain.diagonal();
        if x[0] < domain.lo[0] - tol
            || x[0] > domain.hi[0] + tol
            || x[1] < domain.lo[1] - tol
            || x[1] > domain.hi[1] + tol
            || !x[0].is_finite()
            || !x[1].is_finite()
        {
            return Err(Error::PointOutsideDomain { x: x[0], y: x[1] });
        }
        let n = self.n;
        let u = ((x[0] - domain.lo[0]) / domain.width() * n as f64).clamp(0.0, n as f64);
        let v = ((x[1] - domain.lo[1]) / domain.height() * n as f64).clamp(0.0, n as f64);
        let i = (u.floor() as usize).min(n - 1);
        let j = (v.floor() as usize).min(n - 1);
        let s = (u - i as f64).clamp(0.0, 1.0);
        let t = (v - j as f64).clamp(0.0, 1.0);
        let square = 2 * (j * n + i);
        if t <= s {
            Ok((square, [1.0 - s, s - t, t]))
        } else {
            Ok((square + 1, [1.0 - t, s, t - s]))
        }
    }

    fn locate_scan(&self, x: Point2) -> Result<(usize, [f64; 3])> {
        let tol = 1e-12;
        for cell in 0..self.num_cells() {
            let bary = cartesian_to_barycentric(&self.cell_points(cell), x);
            if bary.iter().all(|&l| l >= -tol) {
                return Ok((cell, bary));
            }
        }
        Err(Error::PointOutsideDomain { x: x[0], y: x[1] })
    }

    /// Plain-text dump: vertex count, vertices, cell count, cells.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.num_vertices())?;
        for (v, b) in self.vertices.iter().zip(&self.boundary) {
            writeln!(out, "{:.17e} {:.17e} {}", v[0], v[1], u8::from(*b))?;
        }
        writeln!(out, "{}", self.num_cells())?;
        for c in &self.cells {
            writeln!(out, "{} {} {}", c[0], c[1], c[2])?;
        }
        Ok(())
    }
}

pub fn triangle_area(p: &[Point2; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

pub fn triangle_diameter(p: &[Point2; 3]) -> f64 {
    let d = |a: Point2, b: Point2| (a[0] - b[0]).hypot(a[1] - b[1]);
    d(p[0], p[1]).max(d(p[1], p[2])).max(d(p[2], p[0]))
}

pub fn barycentric_to_point(p: &[Point2; 3], l: [f64; 3]) -> Point2 {
    [
        l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
        l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
    ]
}

pub fn cartesian_to_barycentric(p: &[Point2; 3], x: Point2) -> [f64; 3] {
    let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let l1 = ((x[0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (x[1] - p[0][1])) / det;
    let l2 = ((p[1][0] - p[0][0]) * (x[1] - p[0][1]) - (x[0] - p[0][0]) * (p[1][1] - p[0][1])) / det;
    [1.0 - l1 - l2, l1, l2]
}

pub fn triangle_quadrature(p: &[Point2; 3], rule: &QuadratureRule) -> Vec<(Point2, f64)> {
    let area = triangle_area(p).abs();
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(l, w)| (barycentric_to_point(p, *l), w * area))
        .collect()
}

/// Splits a triangle into four by connecting edge midpoints.
pub fn split_triangle(p: &[Point2; 3]) -> [[Point2; 3]; 4] {
    let mid = |a: Point2, b: Point2| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let m01 = mid(p[0], p[1]);
    let m12 = mid(p[1], p[2]);
    let m20 = mid(p[2], p[0]);
    [
        [p[0], m01, m20],
        [m01, p[1], m12],
        [m20, m12, p[2]],
        [m01, m12, m20],
    ]
}
