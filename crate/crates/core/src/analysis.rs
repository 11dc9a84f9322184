//! Pointwise evaluation of discrete solutions, error norms against fine-mesh
//! or analytic references, convergence rates and the pressure jump probe.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{AxisBox, Point2, Vec2};
use crate::mesh::{cartesian_to_barycentric, split_triangle, triangle_quadrature, Mesh};
use crate::quadrature::QuadratureRule;
use crate::stokes::{shape_functions, DiscreteSolution};

/// Value of a discrete or exact solution at a point. `grad_u[j][i]` is
/// `du_j / dx_i`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointValue {
    pub u: Vec2,
    pub grad_u: [[f64; 2]; 2],
    pub p: f64,
}

/// Evaluates the finite element functions at barycentric point `l` of `cell`.
pub fn eval_in_cell(sol: &DiscreteSolution, cell: usize, l: [f64; 3]) -> PointValue {
    let mesh = &sol.mesh;
    let grads = mesh.barycentric_gradients(cell);
    let (phi, dphi) = shape_functions(l, &grads);
    let verts = mesh.cells[cell];
    let mut out = PointValue::default();
    for a in 0..4 {
        let coef = if a < 3 {
            sol.vertex_velocity[verts[a]]
        } else {
            sol.bubble_velocity[cell]
        };
        for j in 0..2 {
            out.u[j] += coef[j] * phi[a];
            for i in 0..2 {
                out.grad_u[j][i] += coef[j] * dphi[a][i];
            }
        }
    }
    for k in 0..3 {
        out.p += sol.pressure[verts[k]] * l[k];
    }
    out
}

pub fn eval_solution(sol: &DiscreteSolution, x: Point2) -> Result<PointValue> {
    let (cell, l) = sol.mesh.locate_point(x)?;
    Ok(eval_in_cell(sol, cell, l))
}

/// Closed-form solution used as an error yardstick.
pub trait ExactSolution: Send + Sync {
    fn value(&self, x: Point2) -> PointValue;

    /// Circle `(center, radius)` across which the solution jumps, if any.
    fn discontinuity(&self) -> Option<(Point2, f64)> {
        None
    }
}

/// Exact solution of the circle problem: zero velocity and pressure
/// `g . (x - x_c) + kappa (1_{|x| < R} - pi R^2 / |box|)`.
///
/// The force `kappa X''` on a circle of radius `R` is `-kappa n` per unit
/// arc length, balanced by a pressure jump `kappa` at rest; the body force
/// `g` is the gradient of `g . x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleJumpSolution {
    pub g: Vec2,
    pub kappa: f64,
    pub center: Point2,
    pub radius: f64,
    pub domain: AxisBox,
}

impl CircleJumpSolution {
    pub fn jump(&self) -> f64 {
        self.kappa
    }
}

impl ExactSolution for CircleJumpSolution {
    fn value(&self, x: Point2) -> PointValue {
        let c = self.domain.center();
        let r = (x[0] - self.center[0]).hypot(x[1] - self.center[1]);
        let inside = if r < self.radius { 1.0 } else { 0.0 };
        let shift = PI * self.radius * self.radius / self.domain.area();
        PointValue {
            u: [0.0; 2],
            grad_u: [[0.0; 2]; 2],
            p: self.g[0] * (x[0] - c[0]) + self.g[1] * (x[1] - c[1]) + self.kappa * (inside - shift),
        }
    }

    fn discontinuity(&self) -> Option<(Point2, f64)> {
        (self.kappa != 0.0).then_some((self.center, self.radius))
    }
}

/// The default experiment's exact solution: `u = 0`,
/// `p = x1 + 2 * 1_{|x| < 1/2} - pi / 8` on `(-1, 1)^2`.
pub fn analytic_reference() -> ReferenceSolution {
    ReferenceSolution::Analytic(Arc::new(CircleJumpSolution {
        g: [1.0, 0.0],
        kappa: 2.0,
        center: [0.0, 0.0],
        radius: 0.5,
        domain: AxisBox::symmetric_unit(),
    }))
}

#[derive(Clone)]
pub enum ReferenceSolution {
    FineMesh(Arc<DiscreteSolution>),
    Analytic(Arc<dyn ExactSolution>),
}

impl std::fmt::Debug for ReferenceSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::FineMesh(s) => write!(f, "FineMesh(N = {})", s.mesh.n),
            Self::Analytic(_) => f.write_str("Analytic"),
        }
    }
}

/// `(||u - u_h||_{L^r}, ||u - u_h||_{W^{1,r}}, ||p - p_h||_{L^r})` for one `r`.
/// Pointwise magnitudes are Euclidean for vectors and Frobenius for
/// gradients; the W^{1,r} norm is `(||e||_r^r + ||grad e||_r^r)^(1/r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    pub r: f64,
    pub velocity_lr: f64,
    pub velocity_w1r: f64,
    pub pressure_lr: f64,
}

impl ErrorNorms {
    pub fn as_array(&self) -> [f64; 3] {
        [self.velocity_lr, self.velocity_w1r, self.pressure_lr]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorOptions {
    pub quad_order: u32,
    /// Cells within this distance of a reference discontinuity are
    /// subdivided before integration.
    pub band_halfwidth: f64,
    /// Uniform subdivision levels inside the band.
    pub band_levels: u32,
    /// Maximum subdivision depth for pieces straddling the discontinuity.
    pub max_depth: u32,
}

impl Default for ErrorOptions {
    fn default() -> Self {
        Self {
            quad_order: 6,
            band_halfwidth: 0.0,
            band_levels: 2,
            max_depth: 8,
        }
    }
}

#[derive(Clone, Debug)]
struct Accumulator {
    r: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
    p: Vec<f64>,
}

impl Accumulator {
    fn new(r: &[f64]) -> Self {
        let n = r.len();
        Self {
            r: r.to_vec(),
            u: vec![0.0; n],
            du: vec![0.0; n],
            p: vec![0.0; n],
        }
    }

    fn add(&mut self, w: f64, a: &PointValue, b: &PointValue) {
        let eu = (a.u[0] - b.u[0]).hypot(a.u[1] - b.u[1]);
        let mut g2 = 0.0;
        for j in 0..2 {
            for i in 0..2 {
                g2 += (a.grad_u[j][i] - b.grad_u[j][i]).powi(2);
            }
        }
        let edu = g2.sqrt();
        let ep = (a.p - b.p).abs();
        for (k, &r) in self.r.iter().enumerate() {
            self.u[k] += w * pow(eu, r);
            self.du[k] += w * pow(edu, r);
            self.p[k] += w * pow(ep, r);
        }
    }

    fn finish(&self) -> Vec<ErrorNorms> {
        self.r
            .iter()
            .enumerate()
            .map(|(k, &r)| ErrorNorms {
                r,
                velocity_lr: self.u[k].powf(1.0 / r),
                velocity_w1r: (self.u[k] + self.du[k]).powf(1.0 / r),
                pressure_lr: self.p[k].powf(1.0 / r),
            })
            .collect()
    }
}

#[inline]
fn pow(x: f64, r: f64) -> f64 {
    if r == 1.0 {
        x
    } else if r == 2.0 {
        x * x
    } else if x == 0.0 {
        0.0
    } else {
        x.powf(r)
    }
}

/// Error norms of `sol` against `reference` for every order in `r_list`.
///
/// Fine-mesh references are integrated cell by cell on the finer mesh;
/// analytic references on the solution mesh, with cells near the
/// reference's discontinuity subdivided.
pub fn error_norms(
    sol: &DiscreteSolution,
    reference: &ReferenceSolution,
    r_list: &[f64],
    opts: &ErrorOptions,
) -> Result<Vec<ErrorNorms>> {
    if let Some(&r) = r_list.iter().find(|&&r| !(r >= 1.0)) {
        return Err(Error::InvalidArgument(format!("norm order must be >= 1, got {r}")));
    }
    let rule = QuadratureRule::for_order(opts.quad_order)?;
    let mut acc = Accumulator::new(r_list);
    match reference {
        ReferenceSolution::FineMesh(fine) => {
            let (inner, outer) = if fine.mesh.num_cells() >= sol.mesh.num_cells() {
                (fine.as_ref(), sol)
            } else {
                (sol, fine.as_ref())
            };
            let same_mesh = Arc::ptr_eq(&inner.mesh, &outer.mesh);
            for cell in 0..inner.mesh.num_cells() {
                let pts = inner.mesh.cell_points(cell);
                let area = inner.mesh.cell_area(cell);
                for (l, w) in rule.points.iter().zip(&rule.weights) {
                    let x = crate::mesh::barycentric_to_point(&pts, *l);
                    let a = eval_in_cell(inner, cell, *l);
                    let b = if same_mesh {
                        eval_in_cell(outer, cell, *l)
                    } else {
                        eval_solution(outer, x)?
                    };
                    acc.add(w * area, &a, &b);
                }
            }
        }
        ReferenceSolution::Analytic(exact) => {
            let disc = exact.discontinuity();
            for cell in 0..sol.mesh.num_cells() {
                let pts = sol.mesh.cell_points(cell);
                let mut visit = |tri: &[Point2; 3]| {
                    for (x, w) in triangle_quadrature(tri, &rule) {
                        let l = cartesian_to_barycentric(&pts, x);
                        let a = eval_in_cell(sol, cell, l);
                        acc.add(w, &a, &exact.value(x));
                    }
                };
                match disc {
                    Some((center, radius)) => subdivide_near_circle(&pts, center, radius, opts, 0, &mut visit),
                    None => visit(&pts),
                }
            }
        }
    }
    Ok(acc.finish())
}

fn subdivide_near_circle<F: FnMut(&[Point2; 3])>(
    tri: &[Point2; 3],
    center: Point2,
    radius: f64,
    opts: &ErrorOptions,
    depth: u32,
    visit: &mut F,
) {
    let (dmin, dmax) = distance_range(tri, center);
    let in_band = dmin <= radius + opts.band_halfwidth && dmax >= radius - opts.band_halfwidth;
    let straddles = dmin < radius && dmax > radius;
    let refine = (in_band && depth < opts.band_levels) || (straddles && depth < opts.max_depth);
    if refine {
        for child in split_triangle(tri) {
            subdivide_near_circle(&child, center, radius, opts, depth + 1, visit);
        }
    } else {
        visit(tri);
    }
}

/// Minimum and maximum distance from `c` to points of the triangle.
fn distance_range(tri: &[Point2; 3], c: Point2) -> (f64, f64) {
    let d = |p: Point2| (p[0] - c[0]).hypot(p[1] - c[1]);
    let dmax = d(tri[0]).max(d(tri[1])).max(d(tri[2]));
    let l = cartesian_to_barycentric(tri, c);
    if l.iter().all(|&v| v >= 0.0) {
        return (0.0, dmax);
    }
    let seg = |a: Point2, b: Point2| {
        let ab = [b[0] - a[0], b[1] - a[1]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1];
        let t = (((c[0] - a[0]) * ab[0] + (c[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
        d([a[0] + t * ab[0], a[1] + t * ab[1]])
    };
    let dmin = seg(tri[0], tri[1]).min(seg(tri[1], tri[2])).min(seg(tri[2], tri[0]));
    (dmin, dmax)
}

/// One row of a convergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateRow {
    pub h: f64,
    pub errors: [f64; 3],
    /// Absent on the first row.
    pub rates: Option<[f64; 3]>,
}

/// Rates `(log E_2h - log E_h) / (log 2h - log h)` between consecutive
/// levels, which must halve `h`.
pub fn convergence_rates(levels: &[(f64, [f64; 3])]) -> Result<Vec<RateRow>> {
    for w in levels.windows(2) {
        let ratio = w[0].0 / w[1].0;
        if (ratio - 2.0).abs() > 1e-9 {
            return Err(Error::NonHalvingLevels {
                coarse: w[0].0,
                fine: w[1].0,
            });
        }
    }
    Ok(levels
        .iter()
        .enumerate()
        .map(|(k, &(h, errors))| {
            let rates = (k > 0).then(|| {
                let (h0, e0) = levels[k - 1];
                let mut r = [0.0; 3];
                for i in 0..3 {
                    r[i] = (e0[i].ln() - errors[i].ln()) / (h0.ln() - h.ln());
                }
                r
            });
            RateRow { h, errors, rates }
        })
        .collect())
}

/// Angular mean of `p_h` on the circle of radius `r_in` minus its mean on
/// radius `r_out`, both centred at `center`.
pub fn pressure_jump_probe(sol: &DiscreteSolution, center: Point2, radii: (f64, f64), samples: usize) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidArgument("pressure probe needs samples > 0".into()));
    }
    let mean_on = |r: f64| -> Result<f64> {
        let mut s = 0.0;
        for k in 0..samples {
            let t = 2.0 * PI * (k as f64 + 0.5) / samples as f64;
            s += eval_solution(sol, [center[0] + r * t.cos(), center[1] + r * t.sin()])?.p;
        }
        Ok(s / samples as f64)
    };
    Ok(mean_on(radii.0)? - mean_on(radii.1)?)
}

/// Pressure jump of an exact solution, sampled the same way.
pub fn exact_pressure_jump(exact: &dyn ExactSolution, center: Point2, radii: (f64, f64), samples: usize) -> f64 {
    let mean_on = |r: f64| -> f64 {
        (0..samples)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / samples as f64;
                exact.value([center[0] + r * t.cos(), center[1] + r * t.sin()]).p
            })
            .sum::<f64>()
            / samples as f64
    };
    mean_on(radii.0) - mean_on(radii.1)
}

/// `int_Omega f` over a mesh with the given rule (helper for checks).
pub fn integrate_over_mesh(mesh: &Mesh, rule: &QuadratureRule, f: impl Fn(Point2) -> f64) -> f64 {
    let mut s = 0.0;
    for cell in 0..mesh.num_cells() {
        for (x, w) in mesh.cell_quadrature(cell, rule) {
            s += w * f(x);
        }
    }
    s
}
