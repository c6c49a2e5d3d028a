use crate::error::{Error, Result};
use crate::pde::banded::{BandedLu, BandedMatrix};

/// Row-compressed sparse matrix with at most a handful of entries per row
/// (9-point stencils plus periodic wrap entries).
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn zeros(n: usize) -> Self {
        SparseMatrix {
            n,
            rows: vec![Vec::new(); n],
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        let row = &mut self.rows[i];
        if let Some(slot) = row.iter_mut().find(|(c, _)| *c == j) {
            slot.1 += v;
        } else {
            row.push((j, v));
        }
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = 0.0;
            for &(j, v) in row {
                acc += v * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Largest |i − j| over stored entries.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in row {
                bw = bw.max(i.abs_diff(j));
            }
        }
        bw
    }

    /// Banded copy, dropping any entry outside the band (periodic wrap
    /// entries, when used as a preconditioner).
    pub fn to_banded(&self, kl: usize, ku: usize) -> BandedMatrix {
        let mut m = BandedMatrix::zeros(self.n, kl, ku);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                if j + kl >= i && i + ku >= j {
                    m.add(i, j, v);
                }
            }
        }
        m
    }
}

/// BiCGSTAB with a banded-LU preconditioner. Sequential reductions keep the
/// result deterministic for a given input.
pub fn bicgstab(
    a: &SparseMatrix,
    b: &[f64],
    precond: &BandedLu,
    rel_tol: f64,
    max_iters: usize,
) -> Result<Vec<f64>> {
    let n = a.n;
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r0 = r.clone();
    let mut rho = 1.0f64;
    let mut alpha = 1.0f64;
    let mut omega = 1.0f64;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for _ in 0..max_iters {
        let rho_new = dot(&r0, &r);
        if rho_new.abs() < 1e-300 {
            return Err(Error::LinearSolverFailure("BiCGSTAB breakdown (rho → 0)".into()));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let p_hat = precond.solve(&p);
        v = a.matvec(&p_hat);
        let denom = dot(&r0, &v);
        if denom.abs() < 1e-300 {
            return Err(Error::LinearSolverFailure("BiCGSTAB breakdown (r0·v → 0)".into()));
        }
        alpha = rho / denom;
        let mut s = vec![0.0; n];
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm2(&s) <= rel_tol * b_norm {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            return Ok(x);
        }
        let s_hat = precond.solve(&s);
        let t = a.matvec(&s_hat);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            return Err(Error::LinearSolverFailure("BiCGSTAB breakdown (t = 0)".into()));
        }
        omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        if norm2(&r) <= rel_tol * b_norm {
            return Ok(x);
        }
        if omega.abs() < 1e-300 {
            return Err(Error::LinearSolverFailure("BiCGSTAB breakdown (omega → 0)".into()));
        }
    }
    Err(Error::LinearSolverFailure(format!(
        "BiCGSTAB did not reach {rel_tol:e} in {max_iters} iterations"
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
