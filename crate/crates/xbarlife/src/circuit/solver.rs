//! Sparse symmetric positive-definite solvers for the nodal equations.
//!
//! Two backends: a banded Cholesky factorization for small systems and a
//! Jacobi-preconditioned conjugate gradient for large ones. Node numbering in
//! the crossbar interleaves wordline and bitline nodes per crosspoint, which
//! keeps the matrix bandwidth at `2N` and makes the banded path cheap.

use crate::error::{Error, Result};

/// Compressed sparse row matrix, symmetric by construction.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl Csr {
    /// Builds from per-row adjacency lists, summing duplicate column entries.
    pub fn from_rows(rows: Vec<Vec<(u32, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut it = row.into_iter();
            if let Some((mut c, mut v)) = it.next() {
                for (c2, v2) in it {
                    if c2 == c {
                        v += v2;
                    } else {
                        cols.push(c);
                        vals.push(v);
                        c = c2;
                        v = v2;
                    }
                }
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Csr {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[i] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] as usize == i {
                    d[i] = self.vals[k];
                }
            }
        }
        d
    }

    /// Largest |i - j| over stored entries.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                bw = bw.max((self.cols[k] as usize).abs_diff(i));
            }
        }
        bw
    }

    /// Relative residual ||Ax - b|| / ||b||.
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.n];
        self.mul_vec(x, &mut ax);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.n {
            num += (ax[i] - b[i]) * (ax[i] - b[i]);
            den += b[i] * b[i];
        }
        (num / den.max(f64::MIN_POSITIVE)).sqrt()
    }
}

/// Direct solve by banded Cholesky (lower band storage, in-place factorization).
///
/// Panics via assert if the matrix is not positive definite; the crossbar
/// assembly guarantees SPD, so a failure here is a stamping bug rather than a
/// recoverable condition.
pub fn solve_banded_cholesky(a: &Csr, b: &[f64]) -> Vec<f64> {
    let n = a.n;
    let bw = a.bandwidth();
    // band[j * (bw+1) + l] = A[j+l, j], l = 0..=bw
    let mut band = vec![0.0; n * (bw + 1)];
    for i in 0..n {
        for k in a.row_ptr[i]..a.row_ptr[i + 1] {
            let j = a.cols[k] as usize;
            if i >= j {
                band[j * (bw + 1) + (i - j)] = a.vals[k];
            }
        }
    }
    // factorize
    for j in 0..n {
        for k in j.saturating_sub(bw)..j {
            let off = j - k;
            let ljk = band[k * (bw + 1) + off];
            if ljk != 0.0 {
                let limit = (bw - off).min(n - 1 - j);
                for m in 0..=limit {
                    band[j * (bw + 1) + m] -= ljk * band[k * (bw + 1) + off + m];
                }
            }
        }
        let d = band[j * (bw + 1)];
        assert!(d > 0.0, "conductance matrix is not positive definite");
        let s = d.sqrt();
        band[j * (bw + 1)] = s;
        let limit = bw.min(n - 1 - j);
        for m in 1..=limit {
            band[j * (bw + 1) + m] /= s;
        }
    }
    // forward substitution L y = b
    let mut x = b.to_vec();
    for j in 0..n {
        x[j] /= band[j * (bw + 1)];
        let limit = bw.min(n - 1 - j);
        for m in 1..=limit {
            x[j + m] -= band[j * (bw + 1) + m] * x[j];
        }
    }
    // back substitution L^T x = y
    for j in (0..n).rev() {
        let limit = bw.min(n - 1 - j);
        for m in 1..=limit {
            x[j] -= band[j * (bw + 1) + m] * x[j + m];
        }
        x[j] /= band[j * (bw + 1)];
    }
    x
}

/// Jacobi-preconditioned conjugate gradient.
///
/// Iterates until the explicitly recomputed residual satisfies
/// ||b - Ax|| <= tol * ||b||, restarting the recurrence from the true
/// residual whenever the recurrence claims convergence prematurely.
/// Returns `(solution, iterations)`.
pub fn solve_pcg(a: &Csr, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)> {
    let n = a.n;
    let diag = a.diagonal();
    let inv_diag: Vec<f64> = diag
        .iter()
        .map(|&d| {
            debug_assert!(d > 0.0);
            1.0 / d
        })
        .collect();

    let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_b == 0.0 {
        return Ok((vec![0.0; n], 0));
    }
    let target = tol * norm_b;

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();

    let true_residual = |a: &Csr, x: &[f64], scratch: &mut [f64]| -> Vec<f64> {
        a.mul_vec(x, scratch);
        b.iter().zip(scratch.iter()).map(|(bi, ai)| bi - ai).collect()
    };

    for iter in 0..max_iter {
        let norm_r = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm_r <= target {
            // confirm against the explicit residual before declaring victory
            let r_true = true_residual(a, &x, &mut ap);
            let norm_true = r_true.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm_true <= target {
                return Ok((x, iter));
            }
            r = r_true;
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
                p[i] = z[i];
            }
            rz = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        }
        a.mul_vec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    let achieved = a.relative_residual(&x, b);
    if achieved <= tol {
        Ok((x, max_iter))
    } else {
        Err(Error::Solver {
            achieved,
            iterations: max_iter,
            tolerance: tol,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_chain(n: usize) -> Csr {
        // 1D chain with unit couplings, grounded at both ends: SPD tridiagonal.
        let mut rows = vec![Vec::new(); n];
        for i in 0..n {
            rows[i].push((i as u32, 2.0 + 0.1 * (i as f64 + 1.0)));
            if i + 1 < n {
                rows[i].push((i as u32 + 1, -1.0));
                rows[i + 1].push((i as u32, -1.0));
            }
        }
        Csr::from_rows(rows)
    }

    fn dense_solve(a: &Csr, b: &[f64]) -> Vec<f64> {
        let n = a.n;
        let mut m = vec![vec![0.0; n + 1]; n];
        for i in 0..n {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                m[i][a.cols[k] as usize] = a.vals[k];
            }
            m[i][n] = b[i];
        }
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs()))
                .unwrap();
            m.swap(col, piv);
            for row in col + 1..n {
                let f = m[row][col] / m[col][col];
                for k in col..=n {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let mut acc = m[row][n];
            for k in row + 1..n {
                acc -= m[row][k] * x[k];
            }
            x[row] = acc / m[row][row];
        }
        x
    }

    #[test]
    fn banded_matches_dense_elimination() {
        let a = laplacian_chain(25);
        let b: Vec<f64> = (0..25).map(|i| (i as f64 * 0.37).sin()).collect();
        let x_band = solve_banded_cholesky(&a, &b);
        let x_dense = dense_solve(&a, &b);
        for (u, v) in x_band.iter().zip(&x_dense) {
            assert!((u - v).abs() < 1e-12, "{u} vs {v}");
        }
        assert!(a.relative_residual(&x_band, &b) < 1e-13);
    }

    #[test]
    fn pcg_matches_banded() {
        let a = laplacian_chain(120);
        let b: Vec<f64> = (0..120).map(|i| 1.0 + (i % 7) as f64).collect();
        let (x_pcg, iters) = solve_pcg(&a, &b, 1e-12, 10_000).unwrap();
        let x_band = solve_banded_cholesky(&a, &b);
        assert!(iters > 0);
        for (u, v) in x_pcg.iter().zip(&x_band) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn pcg_reports_achieved_residual_on_budget_exhaustion() {
        let a = laplacian_chain(200);
        let b = vec![1.0; 200];
        let err = solve_pcg(&a, &b, 1e-14, 2).unwrap_err();
        match err {
            Error::Solver {
                achieved,
                iterations,
                tolerance,
            } => {
                assert!(achieved > tolerance);
                assert_eq!(iterations, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn csr_sums_duplicate_entries() {
        let a = Csr::from_rows(vec![vec![(0, 1.0), (0, 2.0), (1, -1.0)], vec![(1, 3.0)]]);
        assert_eq!(a.row_ptr, vec![0, 2, 3]);
        assert_eq!(a.vals, vec![3.0, -1.0, 3.0]);
        assert_eq!(a.bandwidth(), 1);
    }
}
