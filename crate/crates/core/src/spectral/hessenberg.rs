//! Unitary reduction to upper Hessenberg form and the complex single-shift
//! QR iteration that extracts eigenvalues from it.
//!
//! Both routines work in place on a row-major `n x n` buffer. The QR sweep
//! follows the LAPACK `zlahqr` scheme (Wilkinson shift, Ahues-Tisseur
//! deflation test, exceptional shifts every 10 stalled sweeps) but keeps the
//! subdiagonal complex instead of rescaling it real, which costs a few flops
//! and removes the rescaling bookkeeping.

use crate::error::{Error, Result};
use crate::spectral::matrix::C64;

#[inline]
fn cabs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Householder reflector `I - tau v v^H` with `v = [1, tail]` such that the
/// adjoint maps `[alpha, x]` onto `[beta, 0]`. Returns `(beta, tau)` and
/// overwrites `x` with the tail of `v`. `None` when `x` is already zero.
fn householder(alpha: C64, x: &mut [C64]) -> Option<(C64, C64)> {
    let xnorm_sq: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    if xnorm_sq == 0.0 {
        return None;
    }
    let norm = (alpha.norm_sqr() + xnorm_sq).sqrt();
    let beta = -norm.copysign(alpha.re);
    let tau = C64::new((beta - alpha.re) / beta, -alpha.im / beta);
    let scale = C64::new(1.0, 0.0) / (alpha - beta);
    for z in x.iter_mut() {
        *z *= scale;
    }
    Some((C64::new(beta, 0.0), tau))
}

/// Reduces `a` to upper Hessenberg form by a unitary similarity `Q^H A Q`.
/// Columns that are already in Hessenberg shape are skipped, so tridiagonal
/// or Hessenberg input costs O(n^2).
pub fn reduce_to_hessenberg(a: &mut [C64], n: usize) {
    assert_eq!(a.len(), n * n);
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    for k in 0..n - 2 {
        let m = n - k - 1; // reflector length
        let alpha = a[(k + 1) * n + k];
        for i in 1..m {
            v[i] = a[(k + 1 + i) * n + k];
        }
        let Some((beta, tau)) = householder(alpha, &mut v[1..m]) else {
            continue;
        };
        v[0] = C64::new(1.0, 0.0);
        a[(k + 1) * n + k] = beta;
        for i in 1..m {
            a[(k + 1 + i) * n + k] = ZERO;
        }

        // Left: A[k+1.., k+1..] -= conj(tau) v (v^H A)
        let cols = k + 1..n;
        for wj in &mut w[cols.clone()] {
            *wj = ZERO;
        }
        for i in 0..m {
            let vi = v[i].conj();
            let row = &a[(k + 1 + i) * n..(k + 2 + i) * n];
            for j in cols.clone() {
                w[j] += vi * row[j];
            }
        }
        let ctau = tau.conj();
        for i in 0..m {
            let f = ctau * v[i];
            let row = &mut a[(k + 1 + i) * n..(k + 2 + i) * n];
            for j in cols.clone() {
                row[j] -= f * w[j];
            }
        }

        // Right: A[.., k+1..] -= tau (A v) v^H
        for r in 0..n {
            let row = &mut a[r * n..(r + 1) * n];
            let s: C64 = row[k + 1..].iter().zip(&v[..m]).map(|(x, y)| x * y).sum();
            if s == ZERO {
                continue;
            }
            let f = tau * s;
            for (x, y) in row[k + 1..].iter_mut().zip(&v[..m]) {
                *x -= f * y.conj();
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR with deflation.
///
/// `h` is destroyed. At most `30 * max(n, 10)` sweeps are spent in total
/// before giving up with [`Error::NoConvergence`].
pub fn hessenberg_eigenvalues(h: &mut [C64], n: usize) -> Result<Vec<C64>> {
    assert_eq!(h.len(), n * n);
    let mut w = vec![ZERO; n];
    if n == 0 {
        return Ok(w);
    }
    if n == 1 {
        w[0] = h[0];
        return Ok(w);
    }
    let at = |i: usize, j: usize| i * n + j;

    // Clear anything below the first subdiagonal.
    for i in 2..n {
        for j in 0..i - 1 {
            h[at(i, j)] = ZERO;
        }
    }

    let ulp = f64::EPSILON;
    let safmin = f64::MIN_POSITIVE;
    let smlnum = safmin * (n as f64 / ulp);
    let max_sweeps = 30 * n.max(10);
    let mut sweeps = 0usize;
    let mut kdefl = 0usize;
    const KEXSH: usize = 10;

    let ilo = 0usize;
    let ihi = n - 1;
    let mut i_opt = Some(ihi);
    while let Some(i) = i_opt {
        let mut l = ilo;
        loop {
            // Single small subdiagonal.
            let mut k = i;
            while k > l {
                let hkk1 = h[at(k, k - 1)];
                if cabs1(hkk1) <= smlnum {
                    break;
                }
                let mut tst = cabs1(h[at(k - 1, k - 1)]) + cabs1(h[at(k, k)]);
                if tst == 0.0 {
                    if k >= ilo + 2 {
                        tst += cabs1(h[at(k - 1, k - 2)]);
                    }
                    if k < ihi {
                        tst += cabs1(h[at(k + 1, k)]);
                    }
                }
                if cabs1(hkk1) <= ulp * tst {
                    let hk1k = h[at(k - 1, k)];
                    let ab = cabs1(hkk1).max(cabs1(hk1k));
                    let ba = cabs1(hkk1).min(cabs1(hk1k));
                    let diff = h[at(k - 1, k - 1)] - h[at(k, k)];
                    let aa = cabs1(h[at(k, k)]).max(cabs1(diff));
                    let bb = cabs1(h[at(k, k)]).min(cabs1(diff));
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > ilo {
                h[at(l, l - 1)] = ZERO;
            }
            if l >= i {
                break;
            }

            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(Error::NoConvergence { n, sweeps: max_sweeps });
            }
            kdefl += 1;

            let t = if kdefl % (2 * KEXSH) == 0 {
                let s = 0.75 * cabs1(h[at(i, i - 1)]);
                h[at(i, i)] + s
            } else if kdefl % KEXSH == 0 {
                let s = 0.75 * cabs1(h[at(l + 1, l)]);
                h[at(l, l)] + s
            } else {
                wilkinson_shift(
                    h[at(i - 1, i - 1)],
                    h[at(i - 1, i)],
                    h[at(i, i - 1)],
                    h[at(i, i)],
                )
            };

            // Two consecutive small subdiagonals allow starting the bulge lower.
            let mut start = l;
            let mut v = [ZERO; 2];
            let mut found = false;
            for m in (l + 1..i).rev() {
                let h11 = h[at(m, m)];
                let h22 = h[at(m + 1, m + 1)];
                let h21 = h[at(m + 1, m)];
                let h11s = h11 - t;
                let s = cabs1(h11s) + cabs1(h21);
                let (h11s, h21) = (h11s / s, h21 / s);
                let h10 = h[at(m, m - 1)];
                if cabs1(h10) * cabs1(h21) <= ulp * (cabs1(h11s) * (cabs1(h11) + cabs1(h22))) {
                    v = [h11s, h21];
                    start = m;
                    found = true;
                    break;
                }
            }
            if !found {
                let h11s = h[at(l, l)] - t;
                let h21 = h[at(l + 1, l)];
                let s = cabs1(h11s) + cabs1(h21);
                v = [h11s / s, h21 / s];
            }

            // Bulge chase over rows/columns start..=i of the active block.
            for k in start..i {
                if k > start {
                    v = [h[at(k, k - 1)], h[at(k + 1, k - 1)]];
                }
                let mut tail = [v[1]];
                let (beta, tau) = match householder(v[0], &mut tail) {
                    Some(r) => r,
                    None => continue,
                };
                let v2 = tail[0];
                if k > start {
                    h[at(k, k - 1)] = beta;
                    h[at(k + 1, k - 1)] = ZERO;
                }
                let ctau = tau.conj();
                let cv2 = v2.conj();
                if k == start && start > l {
                    // The reflector also scales H(start, start-1); the fill it
                    // would create below is negligible by the choice of start.
                    h[at(k, k - 1)] *= C64::new(1.0, 0.0) - ctau;
                }
                {
                    let (upper, lower) = h.split_at_mut((k + 1) * n);
                    let row_k = &mut upper[k * n..];
                    let row_k1 = &mut lower[..n];
                    for j in k..=i {
                        let sum = ctau * (row_k[j] + cv2 * row_k1[j]);
                        row_k[j] -= sum;
                        row_k1[j] -= sum * v2;
                    }
                }
                let last = (k + 2).min(i);
                for j in l..=last {
                    let base = j * n + k;
                    let sum = tau * (h[base] + v2 * h[base + 1]);
                    h[base] -= sum;
                    h[base + 1] -= sum * cv2;
                }
            }
        }
        w[i] = h[at(i, i)];
        kdefl = 0;
        i_opt = if l == 0 { None } else { Some(l - 1) };
    }
    Ok(w)
}

/// Eigenvalue of the trailing 2x2 block closer to its bottom-right entry.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let mut t = d;
    let u = b.sqrt() * c.sqrt();
    let s = cabs1(u);
    if s != 0.0 {
        let x = (a - t) * 0.5;
        let sx = cabs1(x);
        let s = s.max(sx);
        let mut y = ((x / s) * (x / s) + (u / s) * (u / s)).sqrt() * s;
        if sx > 0.0 {
            let xs = x / sx;
            if xs.re * y.re + xs.im * y.im < 0.0 {
                y = -y;
            }
        }
        t -= u * (u / (x + y));
    }
    t
}
