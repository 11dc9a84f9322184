//! Sparse LDL^T factorization for quasi-definite matrices.
//!
//! The matrix is permuted with approximate minimum degree, regularized with
//! `+delta` on the positive block and `-delta` on the negative block, and
//! factored with an up-looking elimination-tree algorithm. Any symmetric
//! permutation of a quasi-definite matrix has an LDL^T factorization, so no
//! pivoting is needed.

use crate::error::{Error, Result};
use crate::solver::sparse::SparseMatrix;

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LdlSettings {
    /// Diagonal shift, scaled by the largest diagonal magnitude.
    pub static_regularization: f64,
    /// Pivots with `sign * d <= dynamic_eps` are replaced by `sign * dynamic_delta`.
    pub dynamic_eps: f64,
    pub dynamic_delta: f64,
}

impl Default for LdlSettings {
    fn default() -> Self {
        Self {
            static_regularization: 1e-10,
            dynamic_eps: 1e-13,
            dynamic_delta: 1e-7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LdlFactor {
    n: usize,
    perm: Vec<usize>,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    d_inv: Vec<f64>,
    /// Number of pivots replaced by dynamic regularization.
    pub regularized_pivots: usize,
}

impl LdlFactor {
    /// Factors the symmetric matrix `k` (full storage). `signs[i]` is `+1`
    /// for rows of the positive definite block and `-1` otherwise.
    pub fn new(k: &SparseMatrix, signs: &[i8], settings: &LdlSettings) -> Result<Self> {
        let n = k.nrows();
        assert_eq!(k.ncols(), n);
        assert_eq!(signs.len(), n);
        if n == 0 {
            return Ok(Self {
                n,
                perm: Vec::new(),
                l_ptr: vec![0],
                l_idx: Vec::new(),
                l_val: Vec::new(),
                d_inv: Vec::new(),
                regularized_pivots: 0,
            });
        }
        let perm = amd_ordering(k)?;
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let scale = k.diagonal().iter().fold(1.0f64, |m, d| m.max(d.abs()));
        let delta = settings.static_regularization * scale;
        let new_signs: Vec<i8> = perm.iter().map(|&old| signs[old]).collect();
        let (a_ptr, a_idx, a_val) = permuted_upper(k, &inv, signs, delta);
        let (etree, l_nz) = elimination_tree(n, &a_ptr, &a_idx)?;
        let mut l_ptr = vec![0usize; n + 1];
        for i in 0..n {
            l_ptr[i + 1] = l_ptr[i] + l_nz[i];
        }
        let mut factor = Self {
            n,
            perm,
            l_idx: vec![0; l_ptr[n]],
            l_val: vec![0.0; l_ptr[n]],
            l_ptr,
            d_inv: vec![0.0; n],
            regularized_pivots: 0,
        };
        factor.numeric(&a_ptr, &a_idx, &a_val, &etree, &new_signs, settings)?;
        Ok(factor)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Nonzeros in the strictly lower factor.
    pub fn factor_nnz(&self) -> usize {
        self.l_idx.len()
    }

    fn numeric(
        &mut self,
        a_ptr: &[usize],
        a_idx: &[usize],
        a_val: &[f64],
        etree: &[usize],
        signs: &[i8],
        settings: &LdlSettings,
    ) -> Result<()> {
        let n = self.n;
        let mut y_vals = vec![0.0; n];
        let mut y_used = vec![false; n];
        let mut y_idx = vec![0usize; n];
        let mut elim = vec![0usize; n];
        let mut next_space: Vec<usize> = self.l_ptr[..n].to_vec();
        let mut d = vec![0.0; n];

        for k in 0..n {
            // nonzero pattern of row k of L by walking the elimination tree
            let mut nnz_y = 0;
            for p in a_ptr[k]..a_ptr[k + 1] {
                let b = a_idx[p];
                if b == k {
                    d[k] = a_val[p];
                    continue;
                }
                y_vals[b] = a_val[p];
                if !y_used[b] {
                    y_used[b] = true;
                    elim[0] = b;
                    let mut ne = 1;
                    let mut next = etree[b];
                    while next != NONE && next < k {
                        if y_used[next] {
                            break;
                        }
                        y_used[next] = true;
                        elim[ne] = next;
                        ne += 1;
                        next = etree[next];
                    }
                    while ne > 0 {
                        ne -= 1;
                        y_idx[nnz_y] = elim[ne];
                        nnz_y += 1;
                    }
                }
            }
            for i in (0..nnz_y).rev() {
                let c = y_idx[i];
                let slot = next_space[c];
                let yc = y_vals[c];
                for j in self.l_ptr[c]..slot {
                    y_vals[self.l_idx[j]] -= self.l_val[j] * yc;
                }
                let lkc = yc * self.d_inv[c];
                self.l_idx[slot] = k;
                self.l_val[slot] = lkc;
                d[k] -= yc * lkc;
                next_space[c] += 1;
                y_vals[c] = 0.0;
                y_used[c] = false;
            }
            let s = f64::from(signs[k]);
            if s * d[k] <= settings.dynamic_eps {
                d[k] = s * settings.dynamic_delta;
                self.regularized_pivots += 1;
            }
            if !d[k].is_finite() {
                return Err(Error::SolverBreakdown {
                    iterations: 0,
                    residual: f64::NAN,
                });
            }
            self.d_inv[k] = 1.0 / d[k];
        }
        Ok(())
    }

    /// Solves `L D L^T x = b` in place (original ordering).
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for j in 0..self.n {
            let yj = y[j];
            if yj != 0.0 {
                for p in self.l_ptr[j]..self.l_ptr[j + 1] {
                    y[self.l_idx[p]] -= self.l_val[p] * yj;
                }
            }
        }
        for (yj, di) in y.iter_mut().zip(&self.d_inv) {
            *yj *= di;
        }
        for j in (0..self.n).rev() {
            let mut s = y[j];
            for p in self.l_ptr[j]..self.l_ptr[j + 1] {
                s -= self.l_val[p] * y[self.l_idx[p]];
            }
            y[j] = s;
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = y[new];
        }
    }
}

fn amd_ordering(k: &SparseMatrix) -> Result<Vec<usize>> {
    let n = k.nrows();
    let control = amd::Control::default();
    let (perm, _, _) = amd::order::<usize>(n, k.row_ptr(), k.col_idx(), &control).map_err(|status| {
        Error::InvalidArgument(format!("fill-reducing ordering failed: {status:?}"))
    })?;
    Ok(perm)
}

/// Upper triangle of `P K P^T + diag(sign * delta)` in compressed column form.
fn permuted_upper(
    k: &SparseMatrix,
    inv: &[usize],
    signs: &[i8],
    delta: f64,
) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
    let n = k.nrows();
    let mut count = vec![0usize; n + 1];
    let mut has_diag = vec![false; n];
    for r in 0..n {
        for (c, _) in k.row(r) {
            let (pr, pc) = (inv[r], inv[c]);
            if pr <= pc {
                count[pc + 1] += 1;
            }
            if r == c {
                has_diag[r] = true;
            }
        }
    }
    for (r, &h) in has_diag.iter().enumerate() {
        if !h {
            count[inv[r] + 1] += 1;
        }
    }
    for c in 0..n {
        count[c + 1] += count[c];
    }
    let mut fill = count.clone();
    let nnz = count[n];
    let mut idx = vec![0usize; nnz];
    let mut val = vec![0.0; nnz];
    for r in 0..n {
        for (c, v) in k.row(r) {
            let (pr, pc) = (inv[r], inv[c]);
            if pr <= pc {
                let shift = if r == c { f64::from(signs[r]) * delta } else { 0.0 };
                idx[fill[pc]] = pr;
                val[fill[pc]] = v + shift;
                fill[pc] += 1;
            }
        }
        if !has_diag[r] {
            let p = inv[r];
            idx[fill[p]] = p;
            val[fill[p]] = f64::from(signs[r]) * delta;
            fill[p] += 1;
        }
    }
    (count, idx, val)
}

fn elimination_tree(n: usize, a_ptr: &[usize], a_idx: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut work = vec![NONE; n];
    let mut l_nz = vec![0usize; n];
    let mut etree = vec![NONE; n];
    for j in 0..n {
        work[j] = j;
        for p in a_ptr[j]..a_ptr[j + 1] {
            let mut i = a_idx[p];
            if i > j {
                return Err(Error::InvalidArgument("factor input is not upper triangular".into()));
            }
            while work[i] != j {
                if etree[i] == NONE {
                    etree[i] = j;
                }
                l_nz[i] += 1;
                work[i] = j;
                i = etree[i];
            }
        }
    }
    Ok((etree, l_nz))
}
