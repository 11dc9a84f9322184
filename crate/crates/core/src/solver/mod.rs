//! Sparse storage and solvers for the symmetric indefinite saddle point
//! system
//!
//! ```text
//! [ A  B^T  0 ] [u]   [f]
//! [ B   0   c ] [p] = [g]
//! [ 0  c^T  0 ] [l]   [0]
//! ```

mod ldl;
mod minres;
mod sparse;

pub use ldl::{LdlFactor, LdlSettings};
pub use minres::{minres, MinresOutcome};
pub use sparse::{SparseMatrix, TripletBuilder};

use crate::error::{Error, Result};
use sparse::norm2;

/// Saddle point operator assembled from its blocks. `c` is the optional
/// constraint column coupling the second block to one scalar multiplier.
#[derive(Clone, Debug)]
pub struct SaddleOperator {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub c: Option<Vec<f64>>,
}

impl SaddleOperator {
    pub fn new(a: SparseMatrix, b: SparseMatrix, c: Option<Vec<f64>>) -> Result<Self> {
        if a.nrows() != a.ncols() || b.ncols() != a.nrows() {
            return Err(Error::InvalidArgument(format!(
                "inconsistent block shapes: A is {}x{}, B is {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        if let Some(c) = &c {
            if c.len() != b.nrows() {
                return Err(Error::InvalidArgument(
                    "constraint length differs from the row count of B".into(),
                ));
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn n_primal(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_dual(&self) -> usize {
        self.b.nrows()
    }

    pub fn dim(&self) -> usize {
        self.n_primal() + self.n_dual() + usize::from(self.c.is_some())
    }

    /// Pivot signs of the regularized factorization: `+1` on the primal
    /// block and the multiplier, `-1` on the dual block. Grouping the
    /// multiplier with the primal unknowns keeps the shifted matrix
    /// quasi-definite.
    pub fn signs(&self) -> Vec<i8> {
        let mut s = vec![1i8; self.n_primal()];
        s.resize(self.n_primal() + self.n_dual(), -1);
        s.resize(self.dim(), 1);
        s
    }

    /// `y = K x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (nu, np) = (self.n_primal(), self.n_dual());
        let (xu, rest) = x.split_at(nu);
        let (xp, xl) = rest.split_at(np);
        let (yu, rest) = y.split_at_mut(nu);
        let (yp, yl) = rest.split_at_mut(np);
        self.a.matvec(xu, yu);
        self.b.transpose_matvec_add(xp, yu);
        self.b.matvec(xu, yp);
        if let Some(c) = &self.c {
            for (y, ci) in yp.iter_mut().zip(c) {
                *y += ci * xl[0];
            }
            yl[0] = c.iter().zip(xp).map(|(a, b)| a * b).sum();
        }
    }

    /// Full symmetric matrix.
    pub fn assemble(&self) -> SparseMatrix {
        let nu = self.n_primal();
        let np = self.n_dual();
        let mut t = TripletBuilder::with_capacity(self.dim(), self.dim(), self.a.nnz() + 2 * self.b.nnz() + 2 * np);
        for r in 0..nu {
            for (c, v) in self.a.row(r) {
                t.push(r, c, v);
            }
        }
        for r in 0..np {
            for (c, v) in self.b.row(r) {
                t.push(nu + r, c, v);
                t.push(c, nu + r, v);
            }
        }
        if let Some(c) = &self.c {
            let l = nu + np;
            for (j, &v) in c.iter().enumerate() {
                t.push(nu + j, l, v);
                t.push(l, nu + j, v);
            }
        }
        t.finalize().expect("block indices are in range")
    }

    /// Block-diagonal preconditioner: `diag(A)` on the primal block, the
    /// diagonal of `B diag(A)^-1 B^T` on the dual block and the matching
    /// Schur estimate for the multiplier. Returns inverse diagonal entries.
    pub fn block_diagonal_preconditioner(&self) -> Vec<f64> {
        let da: Vec<f64> = self
            .a
            .diagonal()
            .into_iter()
            .map(|d| if d > 0.0 { d } else { 1.0 })
            .collect();
        let mut inv: Vec<f64> = da.iter().map(|d| 1.0 / d).collect();
        let mut sd = Vec::with_capacity(self.n_dual());
        for r in 0..self.n_dual() {
            let s: f64 = self.b.row(r).map(|(c, v)| v * v / da[c]).sum();
            sd.push(if s > 0.0 { s } else { 1.0 });
        }
        inv.extend(sd.iter().map(|s| 1.0 / s));
        if let Some(c) = &self.c {
            let s: f64 = c.iter().zip(&sd).map(|(ci, si)| ci * ci / si).sum();
            inv.push(if s > 0.0 { 1.0 / s } else { 1.0 });
        }
        inv
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    Direct,
    Minres,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Systems up to this dimension are factored directly.
    pub direct_threshold: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 20_000,
            direct_threshold: 200_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub x: Vec<f64>,
    /// `||K x - b|| / ||b||` recomputed from the unregularized operator.
    pub residual: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

/// Solves the saddle point system to relative residual `tol`.
///
/// Small and medium systems use a regularized LDL^T factorization followed
/// by iterative refinement against the exact operator; larger ones use
/// block-preconditioned MINRES.
pub fn solve_symmetric_indefinite(op: &SaddleOperator, rhs: &[f64], opts: &SolverOptions) -> Result<SolveOutcome> {
    if rhs.len() != op.dim() {
        return Err(Error::InvalidArgument(format!(
            "right-hand side has length {}, operator dimension is {}",
            rhs.len(),
            op.dim()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("solver tolerance must be positive".into()));
    }
    let b_norm = norm2(rhs);
    if b_norm == 0.0 {
        return Ok(SolveOutcome {
            x: vec![0.0; rhs.len()],
            residual: 0.0,
            iterations: 0,
            method: SolveMethod::Direct,
        });
    }
    if op.dim() <= opts.direct_threshold {
        solve_direct(op, rhs, opts, b_norm)
    } else {
        let precond = op.block_diagonal_preconditioner();
        let out = minres(|x, y| op.apply(x, y), rhs, &precond, opts.tol, opts.max_iter);
        let residual = relative_residual(op, &out.x, rhs, b_norm);
        if residual > opts.tol {
            return Err(Error::SolverBreakdown {
                iterations: out.iterations,
                residual,
            });
        }
        Ok(SolveOutcome {
            x: out.x,
            residual,
            iterations: out.iterations,
            method: SolveMethod::Minres,
        })
    }
}

const MAX_REFINEMENT_STEPS: usize = 30;

fn solve_direct(op: &SaddleOperator, rhs: &[f64], opts: &SolverOptions, b_norm: f64) -> Result<SolveOutcome> {
    let k = op.assemble();
    let factor = LdlFactor::new(&k, &op.signs(), &LdlSettings::default())?;
    log::debug!(
        "ldl: n = {}, nnz(K) = {}, nnz(L) = {}, regularized pivots = {}",
        k.nrows(),
        k.nnz(),
        factor.factor_nnz(),
        factor.regularized_pivots
    );
    let mut x = rhs.to_vec();
    factor.solve_in_place(&mut x);
    let mut r = vec![0.0; rhs.len()];
    let mut residual = f64::INFINITY;
    let mut steps = 0;
    loop {
        op.apply(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(rhs) {
            *ri = bi - *ri;
        }
        let next = norm2(&r) / b_norm;
        if !next.is_finite() {
            return Err(Error::SolverBreakdown {
                iterations: steps,
                residual: next,
            });
        }
        // refine past `tol` until progress stalls; the regularized factor
        // leaves errors well above the residual on ill-conditioned systems
        let stalled = next > 0.5 * residual;
        residual = next;
        if residual == 0.0 || stalled || steps >= MAX_REFINEMENT_STEPS {
            break;
        }
        factor.solve_in_place(&mut r);
        for (xi, di) in x.iter_mut().zip(&r) {
            *xi += di;
        }
        steps += 1;
    }
    if residual > opts.tol {
        return Err(Error::SolverBreakdown {
            iterations: steps,
            residual,
        });
    }
    Ok(SolveOutcome {
        x,
        residual,
        iterations: steps,
        method: SolveMethod::Direct,
    })
}

pub fn relative_residual(op: &SaddleOperator, x: &[f64], rhs: &[f64], b_norm: f64) -> f64 {
    let mut r = vec![0.0; rhs.len()];
    op.apply(x, &mut r);
    let s: f64 = r.iter().zip(rhs).map(|(a, b)| (a - b).powi(2)).sum();
    s.sqrt() / b_norm
}
