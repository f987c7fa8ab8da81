//! Implicit QL iteration for complex *symmetric* (not Hermitian) tridiagonal
//! matrices, the shape produced by a 3-point discretization of a complex
//! scaled or absorber-augmented Schrodinger operator.
//!
//! The rotations are complex orthogonal (`c^2 + s^2 = 1`) rather than unitary,
//! so the sweep is O(n) and the whole spectrum costs O(n^2). Complex
//! orthogonal rotations can break down when `f^2 + g^2` nearly cancels; that
//! case is reported so the caller can fall back to the dense Hessenberg path.

use crate::error::{Error, Result};
use crate::spectral::matrix::C64;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off.len() == diag.len() - 1`).
pub fn symmetric_tridiagonal_eigenvalues(diag: &[C64], off: &[C64]) -> Result<Vec<C64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::domain(format!(
            "off-diagonal length {} does not match diagonal length {n}",
            off.len()
        )));
    }
    let mut d = diag.to_vec();
    let mut e: Vec<C64> = off.to_vec();
    e.push(C64::new(0.0, 0.0));
    let eps = f64::EPSILON;
    let one = C64::new(1.0, 0.0);
    let max_iter = 30 * n.max(10);
    let mut total = 0usize;

    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].norm() + d[m + 1].norm();
                if e[m].norm() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total += 1;
            if total > max_iter {
                return Err(Error::NoConvergence { n, sweeps: max_iter });
            }
            let mut g = (d[l + 1] - d[l]) / (e[l] * 2.0);
            let mut r = (g * g + one).sqrt();
            let denom = if (g + r).norm() >= (g - r).norm() {
                g + r
            } else {
                g - r
            };
            g = d[m] - d[l] + e[l] / denom;
            let mut s = one;
            let mut c = one;
            let mut p = C64::new(0.0, 0.0);
            let mut early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
                let scale = f.norm().max(g.norm());
                e[i + 1] = r;
                if r.norm() <= eps * scale {
                    if scale == 0.0 {
                        // Exact split: recover and restart.
                        d[i + 1] -= p;
                        e[m] = C64::new(0.0, 0.0);
                        early = true;
                        break;
                    }
                    return Err(Error::Unsupported(
                        "complex orthogonal rotation broke down (f^2 + g^2 ~ 0)".into(),
                    ));
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + c * b * 2.0;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = C64::new(0.0, 0.0);
        }
    }
    if d.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Unsupported("tridiagonal QL produced non-finite values".into()));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_symmetric_second_difference() {
        // tridiag(-1, 2, -1) of size n has eigenvalues 2 - 2cos(k pi/(n+1)).
        let n = 40;
        let d = vec![C64::new(2.0, 0.0); n];
        let e = vec![C64::new(-1.0, 0.0); n - 1];
        let mut ev = symmetric_tridiagonal_eigenvalues(&d, &e).unwrap();
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (k, z) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((z - C64::new(exact, 0.0)).norm() < 1e-12, "{k}: {z} vs {exact}");
        }
    }

    #[test]
    fn rotated_laplacian_stays_on_ray() {
        // Scaling the whole matrix by e^{-2i theta} rotates every eigenvalue.
        let n = 30;
        let rot = C64::from_polar(1.0, -0.6);
        let d = vec![rot * 2.0; n];
        let e = vec![rot * -1.0; n - 1];
        let ev = symmetric_tridiagonal_eigenvalues(&d, &e).unwrap();
        for z in ev {
            assert!((z.arg() + 0.6).abs() < 1e-10, "{z}");
        }
    }

    #[test]
    fn mismatched_lengths() {
        let d = vec![C64::new(1.0, 0.0); 3];
        assert!(symmetric_tridiagonal_eigenvalues(&d, &d).is_err());
    }

    #[test]
    fn single_entry() {
        let v = symmetric_tridiagonal_eigenvalues(&[C64::new(0.5, -0.1)], &[]).unwrap();
        assert_eq!(v, vec![C64::new(0.5, -0.1)]);
    }
}
