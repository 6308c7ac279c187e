//! Minimal CSR storage and a Jacobi-preconditioned conjugate gradient solver.
//!
//! The FEM systems here are symmetric positive (semi)definite with a fixed
//! sparsity pattern across time steps, so the pattern is built once and the
//! values are rewritten each assembly.

use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds the pattern from (row, col) pairs; duplicates are merged.
    pub fn from_pairs(n: usize, pairs: &mut Vec<(usize, usize)>) -> CsrMatrix {
        pairs.sort_unstable();
        pairs.dedup();
        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _) in pairs.iter() {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = pairs.iter().map(|&(_, j)| j).collect::<Vec<_>>();
        let values = vec![0.0; col_idx.len()];
        CsrMatrix { n, row_ptr, col_idx, values }
    }

    pub fn zero_values(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }

    /// Adds `v` at `(i, j)`; the slot must exist in the pattern.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        let k = lo + self.col_idx[lo..hi].binary_search(&j).expect("entry not in pattern");
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Symmetric elimination of prescribed dofs: for constrained `i`, row and
    /// column `i` are zeroed, the diagonal is set to 1 and `rhs[i] = value`;
    /// coupling terms move to the right-hand side.
    pub fn eliminate_dirichlet(&mut self, rhs: &mut [f64], prescribed: &[Option<f64>]) {
        debug_assert_eq!(prescribed.len(), self.n);
        for i in 0..self.n {
            let row_fixed = prescribed[i].is_some();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                match (row_fixed, prescribed[j]) {
                    (true, _) => {
                        self.values[k] = if i == j { 1.0 } else { 0.0 };
                    }
                    (false, Some(g)) => {
                        rhs[i] -= self.values[k] * g;
                        self.values[k] = 0.0;
                    }
                    (false, None) => {}
                }
            }
            if let Some(g) = prescribed[i] {
                rhs[i] = g;
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveReport {
    pub iterations: usize,
    /// Final residual 2-norm relative to the right-hand side norm.
    pub relative_residual: f64,
}

/// Jacobi-preconditioned CG. `x` carries the initial guess and the solution.
/// Converges when `||b - A x||_2 <= rel_tol * ||b||_2`.
pub fn solve_pcg(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    let n = a.n;
    debug_assert_eq!(b.len(), n);
    debug_assert_eq!(x.len(), n);

    let b_norm = norm(b);
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveReport { iterations: 0, relative_residual: 0.0 });
    }

    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut r = vec![0.0; n];
    a.matvec_into(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut res = norm(&r);
    if res <= rel_tol * b_norm {
        return Ok(SolveReport { iterations: 0, relative_residual: res / b_norm });
    }

    let mut z: Vec<f64> = (0..n).map(|i| inv_diag[i] * r[i]).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    for it in 1..=max_iter {
        a.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::SolverFailure { iterations: it, residual: res / b_norm });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = norm(&r);
        if res <= rel_tol * b_norm {
            return Ok(SolveReport { iterations: it, relative_residual: res / b_norm });
        }
        for i in 0..n {
            z[i] = inv_diag[i] * r[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverFailure { iterations: max_iter, residual: res / b_norm })
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
