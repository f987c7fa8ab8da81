//! Outgoing-wave transfer-matrix root finder for piecewise-constant
//! potentials: the exact reference the grid methods are checked against.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::Resonance;
use crate::resonance::potential::{Interval, Potential1D};
use crate::spectral::C64;

/// Axis-aligned rectangle in the complex energy plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        SearchBox { re_min, re_max, im_min, im_max }
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite())
            && self.re_min < self.re_max
            && self.im_min < self.im_max;
        if !ok {
            return Err(Error::domain(format!("degenerate search box {self:?}")));
        }
        // The branch cut of k(z) runs down the negative imaginary axis.
        if self.re_min <= 0.0 && self.re_max >= 0.0 && self.im_min <= 0.0 {
            return Err(Error::domain(
                "search box meets the branch cut {Re z = 0, Im z <= 0}",
            ));
        }
        Ok(())
    }

    fn contains(&self, z: C64) -> bool {
        (self.re_min..=self.re_max).contains(&z.re) && (self.im_min..=self.im_max).contains(&z.im)
    }

    fn scale(&self) -> f64 {
        (self.re_max - self.re_min).max(self.im_max - self.im_min)
    }
}

/// `sqrt` with its cut on the negative imaginary axis: `arg z` taken in
/// `(-pi/2, 3pi/2)`, so negative energies give `k = i sqrt|z|` and the
/// lower-right quadrant matches the principal branch.
fn sqrt_rotated_cut(z: C64) -> C64 {
    let mut arg = z.arg();
    if arg <= -PI / 2.0 {
        arg += 2.0 * PI;
    }
    C64::from_polar(z.norm().sqrt(), 0.5 * arg)
}

/// `sin(x)/x`, entire.
fn sinc(x: C64) -> C64 {
    if x.norm() < 1e-4 {
        let x2 = x * x;
        C64::new(1.0, 0.0) - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Outgoing-wave mismatch. Starts from `e^{-i k0 x}` on the left edge,
/// propagates `(psi, psi')` across every piece and returns
/// `psi' - i k0 psi` on the right edge, which vanishes exactly at
/// resonances (and bound states).
pub(crate) fn mismatch(pieces: &[Interval], hbar: f64, z: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let k0 = sqrt_rotated_cut(z * 2.0) / hbar;
    let mut psi = C64::new(1.0, 0.0);
    let mut dpsi = -i * k0;
    for p in pieces {
        let d = p.end - p.start;
        // cos(k d) and sin(k d)/k depend on k^2 only, so no branch enters.
        let k2 = (z - p.height) * 2.0 / (hbar * hbar);
        let k = k2.sqrt();
        let c = (k * d).cos();
        let s_over_k = sinc(k * d) * d;
        let (np, nd) = (c * psi + s_over_k * dpsi, -k2 * s_over_k * psi + c * dpsi);
        psi = np;
        dpsi = nd;
    }
    dpsi - i * k0 * psi
}

/// Winding number of `f` around the boundary of `b`, sampling adaptively so
/// that consecutive phase steps stay below pi/8.
fn winding(f: &impl Fn(C64) -> C64, b: &SearchBox) -> Result<i64> {
    let corners = [
        C64::new(b.re_min, b.im_min),
        C64::new(b.re_max, b.im_min),
        C64::new(b.re_max, b.im_max),
        C64::new(b.re_min, b.im_max),
    ];
    let min_step = 1e-14 * b.scale().max(1e-300);
    let mut total = 0.0;
    for e in 0..4 {
        let (a, c) = (corners[e], corners[(e + 1) % 4]);
        let coarse = 64;
        let mut prev_z = a;
        let mut prev_f = f(a);
        for k in 1..=coarse {
            let z = a + (c - a) * (k as f64 / coarse as f64);
            total += phase_change(f, prev_z, prev_f, z, min_step, 0)?;
            prev_z = z;
            prev_f = f(z);
        }
    }
    let w = total / (2.0 * PI);
    let rounded = w.round();
    if (w - rounded).abs() > 0.1 {
        return Err(Error::RootCount(format!("non-integer winding {w:.4}")));
    }
    Ok(rounded as i64)
}

fn phase_change(
    f: &impl Fn(C64) -> C64,
    za: C64,
    fa: C64,
    zb: C64,
    min_step: f64,
    depth: usize,
) -> Result<f64> {
    let fb = f(zb);
    if fa == C64::new(0.0, 0.0) || fb == C64::new(0.0, 0.0) {
        return Err(Error::RootCount(format!("root on the contour near {za}")));
    }
    let step = (fb / fa).arg();
    if step.abs() <= PI / 8.0 {
        return Ok(step);
    }
    if (zb - za).norm() < min_step || depth > 200 {
        return Err(Error::RootCount(format!("root on or too close to the contour near {za}")));
    }
    let zm = (za + zb) * 0.5;
    let fm = f(zm);
    Ok(phase_change(f, za, fa, zm, min_step, depth + 1)? + phase_change(f, zm, fm, zb, min_step, depth + 1)?)
}

fn newton(f: &impl Fn(C64) -> C64, start: C64, b: &SearchBox) -> Option<C64> {
    let mut z = start;
    for _ in 0..100 {
        let h = 1e-7 * z.norm().max(b.scale());
        let d = (f(z + h) - f(z - h)) / (2.0 * h);
        if d.norm() == 0.0 || !d.re.is_finite() {
            return None;
        }
        let dz = f(z) / d;
        z -= dz;
        if !b.contains(z) {
            return None;
        }
        if dz.norm() <= 1e-15 * z.norm().max(1e-300) + 1e-300 {
            return Some(z);
        }
    }
    None
}

fn solve_box(f: &impl Fn(C64) -> C64, b: SearchBox, depth: usize, out: &mut Vec<C64>) -> Result<()> {
    let n = winding(f, &b)?;
    if n < 0 {
        return Err(Error::RootCount(format!("negative winding {n} (pole inside?)")));
    }
    if n == 0 {
        return Ok(());
    }
    if n == 1 {
        let centre = C64::new(0.5 * (b.re_min + b.re_max), 0.5 * (b.im_min + b.im_max));
        if let Some(z) = newton(f, centre, &b) {
            out.push(z);
            return Ok(());
        }
    }
    if depth > 60 || b.scale() < 1e-13 {
        return Err(Error::RootCount(format!("could not isolate {n} root(s) in {b:?}")));
    }
    // Split the longer side off-centre so split lines rarely hit a root.
    let t = 0.4871;
    let (p, q) = if b.re_max - b.re_min >= b.im_max - b.im_min {
        let x = b.re_min + t * (b.re_max - b.re_min);
        (SearchBox { re_max: x, ..b }, SearchBox { re_min: x, ..b })
    } else {
        let y = b.im_min + t * (b.im_max - b.im_min);
        (SearchBox { im_max: y, ..b }, SearchBox { im_min: y, ..b })
    };
    solve_box(f, p, depth + 1, out)?;
    solve_box(f, q, depth + 1, out)
}

/// Complex roots of the outgoing-wave condition inside `search`, each
/// polished by Newton's method. Fails unless the number of polished roots
/// equals the winding number of the box boundary.
pub fn transfer_matrix_roots(v: &Potential1D, hbar: f64, search: &SearchBox) -> Result<Vec<C64>> {
    v.validate()?;
    search.validate()?;
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::domain("hbar must be positive"));
    }
    let pieces = v.contiguous_pieces()?;
    let f = |z: C64| mismatch(&pieces, hbar, z);
    let expected = winding(&f, search)?;
    let mut roots = Vec::new();
    solve_box(&f, *search, 0, &mut roots)?;
    // Roots on split lines may be found from both sides.
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots.dedup_by(|a, b| (*a - *b).norm() <= 1e-10 * b.norm().max(search.scale()));
    if roots.len() as i64 != expected {
        return Err(Error::RootCount(format!(
            "found {} roots but the boundary winding is {expected}",
            roots.len()
        )));
    }
    Ok(roots)
}

/// The oracle: transfer-matrix resonances sorted by real part.
pub fn transfer_matrix_resonances(v: &Potential1D, hbar: f64, search: &SearchBox) -> Result<Vec<Resonance>> {
    Ok(transfer_matrix_roots(v, hbar, search)?
        .into_iter()
        .map(|z| Resonance::from_energy(z, hbar))
        .collect())
}
