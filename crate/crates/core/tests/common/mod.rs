#![allow(dead_code)]

use std::f64::consts::PI;

use ibfem::analysis::{ExactSolution, PointValue};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

/// Gauss-Legendre nodes and weights on `[a, b]` from the Jacobi matrix
/// eigenproblem.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let beta = kf / (4.0 * kf * kf - 1.0).sqrt();
        j[(k, k - 1)] = beta;
        j[(k - 1, k)] = beta;
    }
    let eig = SymmetricEigen::new(j);
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let x = eig.eigenvalues[k];
            let w = 2.0 * eig.eigenvectors[(0, k)].powi(2);
            (0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w)
        })
        .collect();
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}

/// `sum a_ij x^i y^j` over `i + j <= 3`.
#[derive(Clone, Debug)]
pub struct Cubic(pub [f64; 10]);

const EXPONENTS: [(i32, i32); 10] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];

impl Cubic {
    pub fn random(rng: &mut impl Rng) -> Self {
        let mut a = [0.0; 10];
        for v in &mut a {
            *v = rng.gen_range(-1.0..1.0);
        }
        Self(a)
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        EXPONENTS.iter().zip(&self.0).map(|(&(i, j), a)| a * x.powi(i) * y.powi(j)).sum()
    }

    pub fn dx(&self, x: f64, y: f64) -> f64 {
        EXPONENTS
            .iter()
            .zip(&self.0)
            .filter(|((i, _), _)| *i > 0)
            .map(|(&(i, j), a)| a * f64::from(i) * x.powi(i - 1) * y.powi(j))
            .sum()
    }

    pub fn dy(&self, x: f64, y: f64) -> f64 {
        EXPONENTS
            .iter()
            .zip(&self.0)
            .filter(|((_, j), _)| *j > 0)
            .map(|(&(i, j), a)| a * f64::from(j) * x.powi(i) * y.powi(j - 1))
            .sum()
    }
}

/// Test field `phi = (1 - x^2)(1 - y^2) (q1, q2)`, zero on the square's boundary.
#[derive(Clone, Debug)]
pub struct TestField {
    pub q: [Cubic; 2],
}

impl TestField {
    pub fn random(rng: &mut impl Rng) -> Self {
        Self {
            q: [Cubic::random(rng), Cubic::random(rng)],
        }
    }

    pub fn value(&self, x: f64, y: f64) -> [f64; 2] {
        let b = (1.0 - x * x) * (1.0 - y * y);
        [b * self.q[0].value(x, y), b * self.q[1].value(x, y)]
    }

    pub fn divergence(&self, x: f64, y: f64) -> f64 {
        let b = (1.0 - x * x) * (1.0 - y * y);
        let bx = -2.0 * x * (1.0 - y * y);
        let by = -2.0 * y * (1.0 - x * x);
        bx * self.q[0].value(x, y) + b * self.q[0].dx(x, y) + by * self.q[1].value(x, y) + b * self.q[1].dy(x, y)
    }
}

/// Residual of `-int p div(phi) = int_0^{2 pi} F . phi(X) dtheta + int g . phi`
/// for `u = 0`, `p = x1 + jump * 1_{|x| < 1/2} - jump * pi / 16` on
/// `(-1, 1)^2`, with `X = (cos, sin) / 2`, `F = -(cos, sin)`, `g = (1, 0)`.
///
/// Box integrals use tensor Gauss rules; the indicator term is integrated in
/// polar coordinates over the disk and the boundary term with the periodic
/// trapezoid rule, all exact for the polynomial fields used here.
pub fn weak_form_residual(phi: &TestField, jump: f64) -> f64 {
    let gx = gauss_legendre(12, -1.0, 1.0);
    let mut lhs = 0.0;
    let mut load = 0.0;
    let shift = jump * PI / 16.0;
    for &(x, wx) in &gx {
        for &(y, wy) in &gx {
            let w = wx * wy;
            lhs -= w * (x - shift) * phi.divergence(x, y);
            load += w * phi.value(x, y)[0];
        }
    }
    let gr = gauss_legendre(12, 0.0, 0.5);
    let nt = 64;
    for &(r, wr) in &gr {
        for k in 0..nt {
            let t = 2.0 * PI * k as f64 / nt as f64;
            lhs -= wr * r * (2.0 * PI / nt as f64) * jump * phi.divergence(r * t.cos(), r * t.sin());
        }
    }
    let mut boundary = 0.0;
    for k in 0..nt {
        let t = 2.0 * PI * k as f64 / nt as f64;
        let p = phi.value(0.5 * t.cos(), 0.5 * t.sin());
        boundary += (2.0 * PI / nt as f64) * (-t.cos() * p[0] - t.sin() * p[1]);
    }
    lhs - (boundary + load)
}

fn bump(s: f64) -> (f64, f64, f64, f64) {
    let p = (1.0 - s * s).powi(2);
    let p1 = -4.0 * s * (1.0 - s * s);
    let p2 = 12.0 * s * s - 4.0;
    let p3 = 24.0 * s;
    (p, p1, p2, p3)
}

/// Divergence-free `u = curl psi` with `psi = (1 - x^2)^2 (1 - y^2)^2` and
/// pressure `sin(pi x) sin(pi y)`.
pub struct Manufactured {
    pub nu: f64,
}

impl Manufactured {
    /// `-nu Lap u + grad p`.
    pub fn force(&self, x: [f64; 2]) -> [f64; 2] {
        let (px, px1, px2, px3) = bump(x[0]);
        let (py, py1, py2, py3) = bump(x[1]);
        let lap1 = px2 * py1 + px * py3;
        let lap2 = -(px3 * py + px1 * py2);
        let (sx, cx) = (PI * x[0]).sin_cos();
        let (sy, cy) = (PI * x[1]).sin_cos();
        [-self.nu * lap1 + PI * cx * sy, -self.nu * lap2 + PI * sx * cy]
    }
}

impl ExactSolution for Manufactured {
    fn value(&self, x: [f64; 2]) -> PointValue {
        let (px, px1, px2, _) = bump(x[0]);
        let (py, py1, py2, _) = bump(x[1]);
        PointValue {
            u: [px * py1, -px1 * py],
            grad_u: [[px1 * py1, px * py2], [-px2 * py, -px1 * py1]],
            p: (PI * x[0]).sin() * (PI * x[1]).sin(),
        }
    }
}
