use crate::error::{Error, Result};
use crate::spectral::matrix::{ComplexMatrix, C64};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn new(a: &ComplexMatrix) -> Self {
        let n = a.dim();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| lu[x * n + k].norm().total_cmp(&lu[y * n + k].norm()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            if pivot.norm() == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f.norm() == 0.0 {
                    continue;
                }
                let (top, bottom) = lu.split_at_mut(i * n);
                let pivot_row = &top[k * n..k * n + n];
                let row = &mut bottom[..n];
                for j in k + 1..n {
                    row[j] -= f * pivot_row[j];
                }
            }
        }
        Lu { n, lu, perm, swaps }
    }

    pub fn determinant(&self) -> C64 {
        let mut det = if self.swaps % 2 == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        };
        for k in 0..self.n {
            det *= self.lu[k * self.n + k];
        }
        det
    }

    /// `log |det|` and the phase of the determinant; robust for large n.
    pub fn log_abs_determinant(&self) -> (f64, C64) {
        let mut log_abs = 0.0;
        let mut phase = if self.swaps % 2 == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        };
        for k in 0..self.n {
            let d = self.lu[k * self.n + k];
            log_abs += d.norm().ln();
            phase *= d / d.norm();
        }
        (log_abs, phase)
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::domain("right-hand side length mismatch"));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: C64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: C64 = row.iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            let pivot = self.lu[i * n + i];
            if pivot.norm() == 0.0 {
                return Err(Error::domain("singular matrix in LU solve"));
            }
            x[i] = (x[i] - s) / pivot;
        }
        Ok(x)
    }
}
