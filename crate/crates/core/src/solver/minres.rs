//! Preconditioned MINRES for symmetric (indefinite) systems with a symmetric
//! positive definite diagonal preconditioner.

use crate::solver::sparse::{dot, norm2};

#[derive(Clone, Debug)]
pub struct MinresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Relative residual `||b - K x|| / ||b||`, recomputed explicitly.
    pub residual: f64,
    pub converged: bool,
}

/// Solves `K x = b` where `apply(v, out)` writes `K v` into `out` and
/// `precond_inv[i]` is the inverse of the i-th preconditioner diagonal.
pub fn minres<F>(apply: F, b: &[f64], precond_inv: &[f64], tol: f64, max_iter: usize) -> MinresOutcome
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let b_norm = norm2(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return MinresOutcome {
            x,
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let true_residual = |x: &[f64], scratch: &mut [f64]| -> f64 {
        apply(x, scratch);
        let r: f64 = scratch.iter().zip(b).map(|(a, b)| (b - a).powi(2)).sum();
        r.sqrt() / b_norm
    };
    let mut scratch = vec![0.0; n];

    let mut v_old = vec![0.0; n];
    let mut v = b.to_vec();
    let mut z: Vec<f64> = v.iter().zip(precond_inv).map(|(a, p)| a * p).collect();
    let mut gamma = dot(&z, &v).sqrt();
    let mut gamma_old = 1.0;
    let mut eta = gamma;
    let (mut s_old, mut s) = (0.0, 0.0);
    let (mut c_old, mut c) = (1.0, 1.0);
    let mut w_old = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut az = vec![0.0; n];
    let eta0 = eta;
    let mut iterations = 0;

    while iterations < max_iter {
        iterations += 1;
        for zi in z.iter_mut() {
            *zi /= gamma;
        }
        apply(&z, &mut az);
        let delta = dot(&az, &z);
        let mut v_new = vec![0.0; n];
        for i in 0..n {
            v_new[i] = az[i] - (delta / gamma) * v[i] - (gamma / gamma_old) * v_old[i];
        }
        let z_new: Vec<f64> = v_new.iter().zip(precond_inv).map(|(a, p)| a * p).collect();
        let gamma_new = dot(&z_new, &v_new).max(0.0).sqrt();

        let alpha0 = c * delta - c_old * s * gamma;
        let alpha1 = alpha0.hypot(gamma_new);
        let alpha2 = s * delta + c_old * c * gamma;
        let alpha3 = s_old * gamma;
        let c_new = alpha0 / alpha1;
        let s_new = gamma_new / alpha1;

        let mut w_new = vec![0.0; n];
        for i in 0..n {
            w_new[i] = (z[i] - alpha3 * w_old[i] - alpha2 * w[i]) / alpha1;
            x[i] += c_new * eta * w_new[i];
        }
        eta *= -s_new;

        v_old = std::mem::replace(&mut v, v_new);
        z = z_new;
        w_old = std::mem::replace(&mut w, w_new);
        gamma_old = gamma;
        gamma = gamma_new;
        c_old = c;
        c = c_new;
        s_old = s;
        s = s_new;

        let estimate = eta.abs() / eta0;
        if estimate <= tol || gamma == 0.0 || !alpha1.is_finite() {
            let r = true_residual(&x, &mut scratch);
            if r <= tol || gamma == 0.0 || !alpha1.is_finite() {
                return MinresOutcome {
                    x,
                    iterations,
                    residual: r,
                    converged: r <= tol,
                };
            }
        }
    }
    let residual = true_residual(&x, &mut scratch);
    MinresOutcome {
        x,
        iterations,
        residual,
        converged: residual <= tol,
    }
}
