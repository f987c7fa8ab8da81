use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::resonance::potential::Potential1D;
use crate::spectral::tridiagonal::symmetric_tridiagonal_eigenvalues;
use crate::spectral::{self, ComplexMatrix, SpectrumRecord, C64};

/// Cell-centred grid `x_j = -L + (j + 1/2) h`, `h = 2L/n`, Dirichlet ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid1D {
    pub half_width: f64,
    pub points: usize,
    pub hbar: f64,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 200;

    pub fn new(half_width: f64, points: usize, hbar: f64) -> Result<Self> {
        let g = Grid1D { half_width, points, hbar };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::domain("grid half-width must be positive"));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::domain("hbar must be positive"));
        }
        if self.points < Self::MIN_POINTS {
            return Err(Error::domain(format!(
                "grid needs at least {} points, got {}",
                Self::MIN_POINTS,
                self.points
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.spacing()
    }
}

fn default_profile() -> CapProfile {
    CapProfile::Quadratic
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapProfile {
    /// `W(x) = ((|x| - R0)_+)^2`
    Quadratic,
}

/// Complex absorbing potential `-i eta W(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapSpec {
    pub eta: f64,
    pub onset: f64,
    #[serde(default = "default_profile")]
    pub profile: CapProfile,
}

impl CapSpec {
    pub fn quadratic(eta: f64, onset: f64) -> Self {
        CapSpec { eta, onset, profile: CapProfile::Quadratic }
    }

    pub fn absorber(&self, x: f64) -> f64 {
        match self.profile {
            CapProfile::Quadratic => {
                let t = (x.abs() - self.onset).max(0.0);
                t * t
            }
        }
    }
}

/// Deformed contour `x + i theta f(x)`: `f = 0` for `|x| <= R0`, `f = x`
/// for `|x| >= 2 R0`, smoothstep in between. `R0 = 0` is uniform scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingContour {
    pub theta: f64,
    #[serde(default)]
    pub onset: f64,
}

impl ScalingContour {
    pub fn uniform(theta: f64) -> Self {
        ScalingContour { theta, onset: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta >= 0.0 && self.theta < FRAC_PI_4) {
            return Err(Error::domain(format!("scaling angle {} outside [0, pi/4)", self.theta)));
        }
        if !(self.onset >= 0.0 && self.onset.is_finite()) {
            return Err(Error::domain("contour onset must be >= 0"));
        }
        Ok(())
    }

    pub fn f(&self, x: f64) -> f64 {
        let r0 = self.onset;
        let a = x.abs();
        if a <= r0 {
            return 0.0;
        }
        if a >= 2.0 * r0 {
            return x;
        }
        let t = (a - r0) / r0;
        x * t * t * (3.0 - 2.0 * t)
    }
}

/// Tridiagonal complex-symmetric Hamiltonian on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian1D {
    pub diag: Vec<C64>,
    /// Uniform off-diagonal entry.
    pub off: C64,
    /// Violated soft preconditions.
    pub warnings: Vec<String>,
    pub builder: Value,
}

impl Hamiltonian1D {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off;
                m[(i + 1, i)] = self.off;
            }
        }
        m
    }

    /// Full spectrum: O(n^2) tridiagonal QL, falling back to the dense
    /// Hessenberg QR if the complex-orthogonal sweep breaks down.
    pub fn spectrum(&self) -> Result<SpectrumRecord> {
        let off = vec![self.off; self.dim().saturating_sub(1)];
        match symmetric_tridiagonal_eigenvalues(&self.diag, &off) {
            Ok(ev) => Ok(SpectrumRecord::new(ev, self.builder.clone())),
            Err(Error::Unsupported(_)) | Err(Error::NoConvergence { .. }) => self.spectrum_dense(),
            Err(e) => Err(e),
        }
    }

    /// Dense Hessenberg QR path only.
    pub fn spectrum_dense(&self) -> Result<SpectrumRecord> {
        Ok(spectral::eigenvalues(&self.to_matrix())?.with_builder(self.builder.clone()))
    }
}

fn soft_checks(grid: &Grid1D, v: &Potential1D, onset: Option<f64>) -> Vec<String> {
    let mut w = Vec::new();
    let ratio = grid.hbar / grid.spacing();
    if ratio < 5.0 {
        w.push(format!("hbar/h = {ratio:.3} < 5: grid may not resolve the wavelength"));
    }
    if let Some(r0) = onset {
        if r0 < v.support_radius() {
            w.push(format!(
                "onset R0 = {r0} inside the potential support R = {:.6}",
                v.support_radius()
            ));
        }
        if grid.half_width <= 2.0 * r0 {
            w.push(format!("L = {} <= 2 R0 = {}", grid.half_width, 2.0 * r0));
        }
    }
    w
}

fn kinetic(grid: &Grid1D) -> f64 {
    let h = grid.spacing();
    grid.hbar * grid.hbar / (2.0 * h * h)
}

/// `-(hbar^2/2) Delta_h + V - i eta W`.
pub fn build_hamiltonian_cap(grid: &Grid1D, v: &Potential1D, cap: &CapSpec) -> Result<Hamiltonian1D> {
    grid.validate()?;
    v.validate()?;
    if !(cap.eta.is_finite() && cap.eta >= 0.0 && cap.onset.is_finite() && cap.onset >= 0.0) {
        return Err(Error::domain("absorber strength and onset must be finite and >= 0"));
    }
    let t = kinetic(grid);
    let h = grid.spacing();
    let diag = (0..grid.points)
        .map(|j| {
            let x = grid.x(j);
            C64::new(2.0 * t + v.cell_value(x, h), -cap.eta * cap.absorber(x))
        })
        .collect();
    let mut warnings = soft_checks(grid, v, Some(cap.onset));
    if cap.eta == 0.0 {
        warnings.push("eta = 0: no absorption, spectrum is real".into());
    }
    Ok(Hamiltonian1D {
        diag,
        off: C64::new(-t, 0.0),
        builder: json!({ "kind": "cap", "grid": grid, "potential": v, "cap": cap, "warnings": warnings }),
        warnings,
    })
}

/// Uniformly scaled `-e^{-2i theta} (hbar^2/2) Delta_h + V(x e^{i theta})`.
pub fn build_hamiltonian_scaled(grid: &Grid1D, v: &Potential1D, theta: f64) -> Result<Hamiltonian1D> {
    grid.validate()?;
    v.validate()?;
    if !v.is_analytic() {
        return Err(Error::Unsupported(
            "complex scaling needs an analytic potential; use the absorbing-potential path".into(),
        ));
    }
    ScalingContour::uniform(theta).validate()?;
    let t = kinetic(grid);
    let rot = C64::from_polar(1.0, -2.0 * theta);
    let phase = C64::from_polar(1.0, theta);
    let diag = (0..grid.points)
        .map(|j| Ok(rot * (2.0 * t) + v.value_complex(phase * grid.x(j))?))
        .collect::<Result<Vec<_>>>()?;
    let warnings = soft_checks(grid, v, None);
    Ok(Hamiltonian1D {
        diag,
        off: rot * (-t),
        builder: json!({ "kind": "scaled", "grid": grid, "potential": v, "theta": theta, "warnings": warnings }),
        warnings,
    })
}
