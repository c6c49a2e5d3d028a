use crate::error::{Error, Result};

/// Banded matrix in LAPACK-style storage with room for partial-pivoting
/// fill-in: `ldab = 2·kl + ku + 1` rows per column, entry (i, j) stored at
/// `data[j·ldab + kl + ku + i − j]`.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandedMatrix {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i + self.ku + self.kl >= j && j + self.kl >= i);
        j * self.ldab + self.kl + self.ku + i - j
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + self.ku >= j && j + self.kl >= i {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// In-place LU factorization with partial pivoting. Returns the pivot
    /// permutation; fails on an exactly singular pivot.
    pub fn lu_factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let i_max = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = self.data[self.slot(j, j)].abs();
            for i in j + 1..=i_max {
                let v = self.data[self.slot(i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            ipiv[j] = p;
            if best == 0.0 {
                return Err(Error::LinearSolverFailure(format!(
                    "zero pivot in banded LU at column {j}"
                )));
            }
            let c_max = (j + kl + ku).min(n - 1);
            if p != j {
                for c in j..=c_max {
                    let (a, b) = (self.slot(j, c), self.slot(p, c));
                    self.data.swap(a, b);
                }
            }
            let piv = self.data[self.slot(j, j)];
            for i in j + 1..=i_max {
                let m = self.data[self.slot(i, j)] / piv;
                let s = self.slot(i, j);
                self.data[s] = m;
                if m != 0.0 {
                    for c in j + 1..=c_max {
                        let uc = self.data[self.slot(j, c)];
                        if uc != 0.0 {
                            let s = self.slot(i, c);
                            self.data[s] -= m * uc;
                        }
                    }
                }
            }
        }
        Ok(BandedLu { mat: self, ipiv })
    }
}

/// Factored banded system ready for repeated solves.
#[derive(Debug, Clone)]
pub struct BandedLu {
    mat: BandedMatrix,
    ipiv: Vec<usize>,
}

impl BandedLu {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.mat.n;
        let (kl, ku) = (self.mat.kl, self.mat.ku);
        let mut x = rhs.to_vec();
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                x.swap(p, j);
            }
            let xj = x[j];
            if xj != 0.0 {
                for i in j + 1..=(j + kl).min(n - 1) {
                    x[i] -= self.mat.data[self.mat.slot(i, j)] * xj;
                }
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.mat.data[self.mat.slot(j, j)];
            let xj = x[j];
            if xj != 0.0 {
                let i_lo = j.saturating_sub(kl + ku);
                for i in i_lo..j {
                    x[i] -= self.mat.data[self.mat.slot(i, j)] * xj;
                }
            }
        }
        x
    }
}
