//! 1D Schrodinger resonances as eigenvalues of non-selfadjoint
//! discretizations (complex absorbing potential, uniform complex scaling)
//! plus an exact transfer-matrix oracle.

mod hamiltonian;
mod oracle;
mod potential;

pub use hamiltonian::{
    build_hamiltonian_cap, build_hamiltonian_scaled, CapProfile, CapSpec, Grid1D, Hamiltonian1D, ScalingContour,
};
pub use oracle::{transfer_matrix_resonances, transfer_matrix_roots, SearchBox};
pub use potential::{GaussianBarrier, Interval, Potential1D, TAIL_CUTOFF};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::Resonance;
use crate::report::csv_float;
use crate::spectral::{SpectrumRecord, C64};

/// Default resonance width cut, in units of hbar.
pub const DEFAULT_MAX_WIDTH: f64 = 10.0;

/// Eigenvalues with `Re z` in `window` and `0 < -Im z <= max_width * hbar`,
/// sorted by real part.
pub fn resonances_from_spectrum(
    rec: &SpectrumRecord,
    window: (f64, f64),
    max_width: f64,
    hbar: f64,
) -> Vec<Resonance> {
    let mut out: Vec<Resonance> = rec
        .eigenvalues
        .iter()
        .filter(|z| z.re >= window.0 && z.re <= window.1 && z.im < 0.0 && -z.im <= max_width * hbar)
        .map(|&z| Resonance::from_energy(z, hbar))
        .collect();
    out.sort_by(|a, b| a.re.total_cmp(&b.re));
    out
}

/// The `k` resonances with the smallest `|Im z|`, returned sorted by real part.
pub fn narrowest(resonances: &[Resonance], k: usize) -> Vec<Resonance> {
    let mut v = resonances.to_vec();
    v.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()).then(a.re.total_cmp(&b.re)));
    v.truncate(k);
    v.sort_by(|a, b| a.re.total_cmp(&b.re));
    v
}

/// Eigenvalue of `spectrum` closest to `z`.
pub fn nearest(spectrum: &[C64], z: C64) -> Option<C64> {
    spectrum
        .iter()
        .copied()
        .min_by(|a, b| (a - z).norm().total_cmp(&(b - z).norm()))
}

pub fn relative_distance(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Keeps the resonances that reappear, within relative `tol`, in every
/// perturbed spectrum (e.g. `eta -> 2 eta`, `theta -> theta + 0.05`).
/// Eigenvalues that move are discretization or branch artefacts.
pub fn plateau_filter(base: &[Resonance], perturbed: &[&SpectrumRecord], tol: f64) -> Vec<Resonance> {
    base.iter()
        .copied()
        .filter(|r| {
            perturbed.iter().all(|rec| {
                nearest(&rec.eigenvalues, r.value()).is_some_and(|w| relative_distance(w, r.value()) <= tol)
            })
        })
        .collect()
}

/// Observed convergence order from values on grids `n`, `2n`, `4n`:
/// `log2(|z_n - z_2n| / |z_2n - z_4n|)`.
pub fn richardson_order(z_n: C64, z_2n: C64, z_4n: C64) -> Result<f64> {
    let coarse = (z_n - z_2n).norm();
    let fine = (z_2n - z_4n).norm();
    if fine == 0.0 || coarse == 0.0 {
        return Err(Error::FitDegenerate("identical values on successive grids".into()));
    }
    Ok((coarse / fine).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonanceMethod {
    Cap,
    Scaling,
    Oracle,
}

impl ResonanceMethod {
    pub fn name(self) -> &'static str {
        match self {
            ResonanceMethod::Cap => "cap",
            ResonanceMethod::Scaling => "scaling",
            ResonanceMethod::Oracle => "oracle",
        }
    }
}

/// One line of a resonance table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceRow {
    pub method: ResonanceMethod,
    pub hbar: f64,
    pub resonance: Resonance,
    pub n_grid: Option<usize>,
    /// Scaling angle or absorber strength; empty for the oracle.
    pub theta_or_eta: Option<f64>,
}

pub const RESONANCE_CSV_HEADER: &str = "method,hbar,re_z,im_z,lifetime,n_grid,theta_or_eta";

pub fn resonance_csv(rows: &[ResonanceRow]) -> String {
    let mut out = String::from(RESONANCE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.method.name(),
            csv_float(r.hbar),
            csv_float(r.resonance.re),
            csv_float(r.resonance.im),
            csv_float(r.resonance.lifetime),
            r.n_grid.map(|n| n.to_string()).unwrap_or_default(),
            r.theta_or_eta.map(csv_float).unwrap_or_default(),
        ));
    }
    out
}
