//! Singular values by one-sided (Hestenes) Jacobi rotations.
//!
//! Only the singular values are kept. Jacobi is slower than bidiagonal QR but
//! resolves tiny singular values to high relative accuracy, which is what the
//! rank count of a partial isometry needs.

use crate::spectral::matrix::{ComplexMatrix, C64};

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.dim();
    // Work on columns, stored contiguously.
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| a[(i, j)]).collect()).collect();
    let tol = f64::EPSILON * (n as f64).sqrt();
    let max_sweeps = 60;

    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (left, right) = cols.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                let alpha: f64 = cp.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cq.iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cp.iter().zip(cq.iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotation zeroing the (p, q) entry of the 2x2 Gram block.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let sp = phase * s;
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let xp = *x;
                    let yq = *y;
                    *x = xp * c - yq * sp.conj();
                    *y = xp * sp + yq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_singular_values() {
        let a = ComplexMatrix::from_diagonal(&[
            C64::new(0.0, -3.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let sv = singular_values(&a);
        assert!((sv[0] - 3.0).abs() < 1e-14);
        assert!((sv[1] - 1.0).abs() < 1e-14);
        assert!(sv[2].abs() < 1e-14);
    }

    #[test]
    fn rank_one_complex() {
        // u v^H with |u| = |v| = sqrt(2): single singular value 2.
        let u = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let v = [C64::new(1.0, 1.0) / 2f64.sqrt(), C64::new(1.0, 0.0)];
        let a = ComplexMatrix::from_fn(2, |i, j| u[i] * v[j].conj());
        let sv = singular_values(&a);
        assert!((sv[0] - 2.0).abs() < 1e-13, "{sv:?}");
        assert!(sv[1] < 1e-14);
    }

    #[test]
    fn frobenius_identity() {
        let a = ComplexMatrix::from_fn(5, |i, j| C64::new((i * j) as f64 - 1.5, (i + 2 * j) as f64 * 0.1));
        let sv = singular_values(&a);
        let s2: f64 = sv.iter().map(|s| s * s).sum();
        let f = a.frobenius_norm();
        assert!((s2 - f * f).abs() < 1e-10 * f * f);
    }
}
