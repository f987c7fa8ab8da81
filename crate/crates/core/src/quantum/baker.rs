use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classical::{DampingField, OpenMapSpec};
use crate::error::{Error, Result};
use crate::spectral::{self, ComplexMatrix, SpectrumRecord, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Open,
    Damped,
}

fn default_phases() -> (f64, f64) {
    (0.0, 0.0)
}

/// Quantum open or damped baker on an `n`-dimensional Hilbert space,
/// effective Planck constant `1/(2 pi n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumMapSpec {
    pub map: OpenMapSpec,
    pub n: usize,
    pub kind: MapKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<DampingField>,
    /// Lattice shifts `(a, b)` of the DFT blocks, each in `[0, 1)`.
    #[serde(default = "default_phases")]
    pub phases: (f64, f64),
}

impl QuantumMapSpec {
    pub fn open(map: OpenMapSpec, n: usize) -> Self {
        QuantumMapSpec {
            map,
            n,
            kind: MapKind::Open,
            damping: None,
            phases: default_phases(),
        }
    }

    /// Damped closed baker.
    pub fn damped(damping: DampingField, n: usize) -> Result<Self> {
        let map = OpenMapSpec::closed(damping.branches())?;
        Ok(QuantumMapSpec {
            map,
            n,
            kind: MapKind::Damped,
            damping: Some(damping),
            phases: default_phases(),
        })
    }

    pub fn with_phases(mut self, phases: (f64, f64)) -> Self {
        self.phases = phases;
        self
    }

    pub fn hbar(&self) -> f64 {
        1.0 / (2.0 * PI * self.n as f64)
    }

    pub fn validate(&self) -> Result<()> {
        self.map.validate()?;
        let m = self.map.branches();
        if self.n == 0 || self.n % m != 0 {
            return Err(Error::domain(format!(
                "dimension N = {} must be a positive multiple of M = {m}",
                self.n
            )));
        }
        let (a, b) = self.phases;
        if !(0.0..1.0).contains(&a) || !(0.0..1.0).contains(&b) {
            return Err(Error::domain(format!("phases ({a}, {b}) must lie in [0, 1)")));
        }
        match (self.kind, &self.damping) {
            (MapKind::Damped, None) => Err(Error::domain("damped map needs a damping field")),
            (MapKind::Open, Some(_)) => Err(Error::domain("open map takes no damping field")),
            (MapKind::Damped, Some(d)) => {
                d.validate()?;
                d.check_compatible(&self.map)
            }
            (MapKind::Open, None) => Ok(()),
        }
    }

    /// Builder metadata attached to spectrum records.
    pub fn builder_json(&self) -> Value {
        json!({
            "kind": match self.kind { MapKind::Open => "open_baker", MapKind::Damped => "damped_baker" },
            "spec": self,
        })
    }
}

/// `sin(pi x)` with `x` first reduced mod 2 so large arguments stay exact.
fn sin_pi(x: f64) -> f64 {
    (PI * x.rem_euclid(2.0)).sin()
}

/// Builds `F_N^{-1} blockdiag(G_0, ..., G_{M-1})` entry by entry.
///
/// Each entry is a geometric sum over one DFT block and is evaluated in
/// closed form, `e^{i pi (n-1) d} sin(pi n d) / sin(pi d)`, so assembly is
/// O(N^2) and never forms `F_N^{-1}`. Entries whose ratio is (nearly) 1 are
/// summed directly.
fn assemble(map: &OpenMapSpec, big_n: usize, phases: (f64, f64)) -> ComplexMatrix {
    let m = map.branches();
    let n = big_n / m;
    let (a, b) = phases;
    let nf = big_n as f64;
    let norm = 1.0 / (nf * n as f64).sqrt();
    let mut out = ComplexMatrix::zeros(big_n);
    for &block in map.kept() {
        let off = block * n;
        for j in 0..big_n {
            for c in 0..n {
                // Exponent / 2pi = k' d + phi0 with k' the in-block row.
                let d = ((j as f64 - (m * c) as f64) + b * (1.0 - m as f64)) / nf;
                let phi0 = {
                    // (off + a)(j + b) - M a (c + b), integer part reduced first.
                    let int = ((off as u128 * j as u128) % big_n as u128) as f64;
                    let rest = off as f64 * b + a * (j as f64 + b) - m as f64 * a * (c as f64 + b);
                    (int + rest) / nf
                };
                let sd = sin_pi(d);
                let sum = if sd.abs() < 1e-6 {
                    (0..n)
                        .map(|k| {
                            let t = (k as f64 * d + phi0).rem_euclid(1.0);
                            C64::from_polar(1.0, 2.0 * PI * t)
                        })
                        .sum::<C64>()
                } else {
                    let mag = sin_pi(n as f64 * d) / sd;
                    let t = (0.5 * (n as f64 - 1.0) * d + phi0).rem_euclid(1.0);
                    C64::from_polar(mag, 2.0 * PI * t)
                };
                out[(j, off + c)] = sum * norm;
            }
        }
    }
    out
}

/// Quantized open baker `B_N = F_N^{-1} blockdiag(G_i)`, `G_i = F_{N/M}` on
/// kept branches and 0 elsewhere; a partial isometry of rank `D N / M`.
pub fn quantize_open_baker(spec: &QuantumMapSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    if spec.kind != MapKind::Open {
        return Err(Error::domain("quantize_open_baker needs kind = open"));
    }
    Ok(assemble(&spec.map, spec.n, spec.phases))
}

/// Damped baker `U_N diag(e^{-b(x_j)})`, `x_j = (j + 1/2)/N`, with `U_N`
/// the closed baker.
pub fn quantize_damped_baker(spec: &QuantumMapSpec) -> Result<ComplexMatrix> {
    if spec.kind != MapKind::Damped || spec.damping.is_none() {
        return Err(Error::domain("quantize_damped_baker needs kind = damped and a damping field"));
    }
    spec.validate()?;
    let damping = spec.damping.as_ref().expect("checked above");
    let closed = OpenMapSpec::closed(spec.map.branches())?;
    let mut u = assemble(&closed, spec.n, spec.phases);
    let nf = spec.n as f64;
    let factors: Vec<C64> = (0..spec.n)
        .map(|j| C64::new((-damping.value_at((j as f64 + 0.5) / nf)).exp(), 0.0))
        .collect();
    u.scale_columns(&factors);
    Ok(u)
}

/// Matrix for either kind.
pub fn quantize(spec: &QuantumMapSpec) -> Result<ComplexMatrix> {
    match spec.kind {
        MapKind::Open => quantize_open_baker(spec),
        MapKind::Damped => quantize_damped_baker(spec),
    }
}

/// Quantizes and diagonalizes, tagging the record with the spec.
pub fn map_spectrum(spec: &QuantumMapSpec) -> Result<SpectrumRecord> {
    let b = quantize(spec)?;
    Ok(spectral::eigenvalues(&b)?.with_builder(spec.builder_json()))
}

/// Number of singular values above `tol` (default `1e-8 * |B|_2`).
pub fn rank_count(b: &ComplexMatrix, tol: Option<f64>) -> usize {
    let sv = spectral::singular_values(b);
    let tol = tol.unwrap_or_else(|| 1e-8 * sv.first().copied().unwrap_or(0.0));
    sv.iter().filter(|&&s| s > tol).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{dft_matrix_with_phases, DftSign};

    /// Direct product `F_N^dagger blockdiag(F_n or 0)`.
    fn naive(map: &OpenMapSpec, big_n: usize, phases: (f64, f64)) -> ComplexMatrix {
        let m = map.branches();
        let n = big_n / m;
        let f_inv = dft_matrix_with_phases(big_n, DftSign::Forward, phases).adjoint();
        let g = dft_matrix_with_phases(n, DftSign::Forward, phases);
        let mut block = ComplexMatrix::zeros(big_n);
        for &i in map.kept() {
            for r in 0..n {
                for c in 0..n {
                    block[(i * n + r, i * n + c)] = g[(r, c)];
                }
            }
        }
        f_inv.matmul(&block)
    }

    fn open(m: usize, keep: &[usize], n: usize) -> QuantumMapSpec {
        QuantumMapSpec::open(OpenMapSpec::new(m, keep.to_vec()).unwrap(), n)
    }

    #[test]
    fn closed_form_assembly_matches_product() {
        for (m, keep, n) in [(2, vec![0, 1], 8), (3, vec![0, 2], 27), (5, vec![1, 3], 25), (4, vec![3], 12)] {
            for phases in [(0.0, 0.0), (0.5, 0.5), (0.25, 0.7)] {
                let spec = open(m, &keep, n).with_phases(phases);
                let b = quantize_open_baker(&spec).unwrap();
                let r = naive(&spec.map, n, phases);
                assert!(b.max_abs_diff(&r) < 1e-13, "M={m} N={n} phases={phases:?}");
            }
        }
    }

    #[test]
    fn two_by_two_examples() {
        let r = 1.0 / 2f64.sqrt();
        let b = quantize_open_baker(&open(2, &[0, 1], 2)).unwrap();
        let expect = [[r, r], [r, -r]];
        let b2 = quantize_open_baker(&open(2, &[0], 2)).unwrap();
        let expect2 = [[r, 0.0], [r, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((b[(i, j)] - C64::new(expect[i][j], 0.0)).norm() < 1e-15);
                assert!((b2[(i, j)] - C64::new(expect2[i][j], 0.0)).norm() < 1e-15);
            }
        }
        let rec = spectral::eigenvalues(&b2).unwrap();
        assert!((rec.eigenvalues[0] - C64::new(r, 0.0)).norm() < 1e-14);
        assert!(rec.eigenvalues[1].norm() < 1e-14);
    }

    #[test]
    fn closed_baker_is_unitary() {
        for m in [2, 3, 5] {
            let b = quantize_open_baker(&QuantumMapSpec::open(OpenMapSpec::closed(m).unwrap(), m * m * 2)).unwrap();
            assert!(b.unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn keep_all_equals_undamped() {
        let n = 36;
        let open_b = quantize_open_baker(&QuantumMapSpec::open(OpenMapSpec::closed(3).unwrap(), n)).unwrap();
        let spec = QuantumMapSpec::damped(DampingField::constant(3, 0.0).unwrap(), n).unwrap();
        let damped = quantize_damped_baker(&spec).unwrap();
        assert_eq!(open_b, damped);
    }

    #[test]
    fn constant_damping_scales_moduli() {
        let spec = QuantumMapSpec::damped(DampingField::constant(2, 0.3).unwrap(), 16).unwrap();
        let rec = map_spectrum(&spec).unwrap();
        for r in rec.moduli() {
            assert!((r - (-0.3f64).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn rank_examples() {
        let closed = quantize_open_baker(&QuantumMapSpec::open(OpenMapSpec::closed(2).unwrap(), 16)).unwrap();
        assert_eq!(rank_count(&closed, None), 16);
        assert_eq!(rank_count(&quantize_open_baker(&open(3, &[0, 2], 9)).unwrap(), None), 6);
        assert_eq!(rank_count(&quantize_open_baker(&open(5, &[1, 3], 25)).unwrap(), None), 10);
    }

    #[test]
    fn spec_validation() {
        assert!(quantize_open_baker(&open(3, &[0], 10)).is_err());
        let mut s = open(2, &[0], 4);
        s.kind = MapKind::Damped;
        assert!(quantize_damped_baker(&s).is_err());
        assert!(quantize_open_baker(&open(2, &[0], 4).with_phases((1.0, 0.0))).is_err());
        let json = r#"{"map":{"branches":2,"kept":[0]},"n":4,"kind":"open","extra":1}"#;
        assert!(serde_json::from_str::<QuantumMapSpec>(json).is_err());
        let json = r#"{"map":{"branches":2,"kept":[0]},"n":4,"kind":"open"}"#;
        let s: QuantumMapSpec = serde_json::from_str(json).unwrap();
        assert_eq!(s.phases, (0.0, 0.0));
    }
}
