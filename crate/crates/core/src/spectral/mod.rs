//! Dense complex linear algebra: nonsymmetric eigenvalues, DFT matrices,
//! singular values, LU.

mod dft;
mod hessenberg;
mod lu;
mod matrix;
mod record;
mod svd;
pub mod tridiagonal;

pub use dft::{dft_matrix, dft_matrix_with_phases, DftSign};
pub use hessenberg::{hessenberg_eigenvalues, reduce_to_hessenberg};
pub use lu::Lu;
pub use matrix::{ComplexMatrix, C64};
pub use record::{canonical_cmp, params_hash, spectral_radius, Diagnostics, SpectrumRecord};
pub use svd::singular_values;

use serde_json::json;

use crate::error::{Error, Result};

/// All eigenvalues of `a`, unordered.
///
/// Householder reduction to Hessenberg form followed by shifted QR with
/// deflation. Backward stable; O(n^3) time and O(n^2) memory.
pub fn eigenvalues_raw(a: &ComplexMatrix) -> Result<Vec<C64>> {
    if a.dim() == 0 {
        return Err(Error::domain("empty matrix"));
    }
    if !a.is_finite() {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let n = a.dim();
    let mut work = a.as_slice().to_vec();
    let (lo, hi) = isolate_eigenvalues(&mut work, n);
    let mut ev: Vec<C64> = (0..lo).chain(hi..n).map(|i| work[i * n + i]).collect();
    let m = hi - lo;
    if m > 0 {
        let mut block = Vec::with_capacity(m * m);
        for i in lo..hi {
            block.extend_from_slice(&work[i * n + lo..i * n + hi]);
        }
        drop(work);
        reduce_to_hessenberg(&mut block, m);
        ev.extend(hessenberg_eigenvalues(&mut block, m)?);
    }
    Ok(ev)
}

/// Permutation similarity that moves rows with no off-diagonal entries to
/// the bottom and columns with no off-diagonal entries to the top (the
/// permutation half of LAPACK balancing). Returns the active block
/// `lo..hi`; every diagonal entry outside it is an exact eigenvalue.
fn isolate_eigenvalues(a: &mut [C64], n: usize) -> (usize, usize) {
    let zero = C64::new(0.0, 0.0);
    let swap = |a: &mut [C64], p: usize, q: usize| {
        if p == q {
            return;
        }
        for j in 0..n {
            a.swap(p * n + j, q * n + j);
        }
        for i in 0..n {
            a.swap(i * n + p, i * n + q);
        }
    };
    let (mut lo, mut hi) = (0usize, n);
    'outer: while hi > lo {
        for r in (lo..hi).rev() {
            if (lo..hi).all(|c| c == r || a[r * n + c] == zero) {
                swap(a, r, hi - 1);
                hi -= 1;
                continue 'outer;
            }
        }
        for c in lo..hi {
            if (lo..hi).all(|r| r == c || a[r * n + c] == zero) {
                swap(a, c, lo);
                lo += 1;
                continue 'outer;
            }
        }
        break;
    }
    (lo, hi)
}

/// Eigenvalues of `a` as a canonical-order [`SpectrumRecord`] with a trace
/// residual attached. The builder metadata is a placeholder; callers that
/// know what produced `a` replace it with [`SpectrumRecord::with_builder`].
pub fn eigenvalues(a: &ComplexMatrix) -> Result<SpectrumRecord> {
    let ev = eigenvalues_raw(a)?;
    let n = a.dim();
    let sum: C64 = ev.iter().sum();
    let scale = (n as f64) * a.max_abs().max(f64::MIN_POSITIVE);
    let mut rec = SpectrumRecord::new(ev, json!({ "kind": "matrix", "n": n }));
    rec.diagnostics = Some(Diagnostics {
        trace_residual: (sum - a.trace()).norm() / scale,
        qr_sweeps: None,
    });
    Ok(rec)
}

/// Right eigenvector for an approximate eigenvalue by inverse iteration.
///
/// Returns the unit vector and the residual `|A v - lambda v|`. Diagnostic
/// only; the spectral pipeline never needs eigenvectors.
pub fn inverse_iteration(a: &ComplexMatrix, lambda: C64) -> Result<(Vec<C64>, f64)> {
    let n = a.dim();
    let shift = lambda + C64::new(1e-10, 1e-10) * a.max_abs().max(1.0);
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let lu = Lu::new(&shifted);
    let mut v = vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    for _ in 0..4 {
        let mut w = lu.solve(&v)?;
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::domain("inverse iteration diverged"));
        }
        for z in &mut w {
            *z /= norm;
        }
        v = w;
    }
    let av = a.mul_vec(&v);
    let res = av
        .iter()
        .zip(&v)
        .map(|(x, y)| (x - lambda * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok((v, res))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_columns_are_isolated_exactly() {
        let mut a = ComplexMatrix::from_fn(5, |i, j| C64::new(1.0 + (i * j) as f64, (i as f64) - (j as f64)));
        for i in 0..5 {
            a[(i, 1)] = C64::new(0.0, 0.0);
            a[(i, 3)] = C64::new(0.0, 0.0);
        }
        let ev = eigenvalues_raw(&a).unwrap();
        assert_eq!(ev.iter().filter(|z| z.norm() == 0.0).count(), 2);
        let sum: C64 = ev.iter().sum();
        assert!((sum - a.trace()).norm() < 1e-12);
    }

    #[test]
    fn identity_spectrum() {
        let rec = eigenvalues(&ComplexMatrix::identity(5)).unwrap();
        assert_eq!(rec.n, 5);
        for z in &rec.eigenvalues {
            assert!((z - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn triangular_is_sorted_descending() {
        let a = ComplexMatrix::from_diagonal(&[
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
            C64::new(3.0, 0.0),
        ]);
        let rec = eigenvalues(&a).unwrap();
        let got: Vec<f64> = rec.eigenvalues.iter().map(|z| z.re).collect();
        assert_eq!(got, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn non_finite_rejected() {
        let mut a = ComplexMatrix::identity(3);
        a[(1, 2)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(eigenvalues(&a), Err(Error::Domain(_))));
    }

    #[test]
    fn dft4_eigenvalues_are_fourth_roots_of_unity() {
        // The characteristic polynomial of the unitary 4x4 DFT factors as
        // (l - 1)^2 (l + 1)(l + i): multiset {1, 1, -1, -i}.
        let rec = eigenvalues(&dft_matrix(4, DftSign::Forward)).unwrap();
        let mut expected = vec![
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, -1.0),
        ];
        for z in &rec.eigenvalues {
            assert!((z.norm() - 1.0).abs() < 1e-10);
            let pos = expected
                .iter()
                .position(|e| (e - z).norm() < 1e-10)
                .unwrap_or_else(|| panic!("unexpected eigenvalue {z}"));
            expected.remove(pos);
        }
        assert!(expected.is_empty());
    }

    #[test]
    fn inverse_iteration_residual_is_small() {
        let a = ComplexMatrix::from_fn(6, |i, j| C64::new((i as f64 - j as f64).cos(), 0.1 * (i * j) as f64));
        let rec = eigenvalues(&a).unwrap();
        let (_, res) = inverse_iteration(&a, rec.eigenvalues[0]).unwrap();
        assert!(res < 1e-8, "residual {res}");
    }
}
