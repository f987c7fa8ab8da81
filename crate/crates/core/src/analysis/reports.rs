use serde::{Deserialize, Serialize};

use crate::analysis::require_map_spec;
use crate::classical::{DampingField, PressureEstimate};
use crate::error::{Error, Result};
use crate::report::{csv_float, ext_f64};
use crate::spectral::{spectral_radius, SpectrumRecord};
use crate::stats::{linear_fit, LinearFit};

/// Heuristic finite-N allowance `3 / ln N` in the gap verdict.
pub fn gap_margin(n: usize) -> f64 {
    3.0 / (n as f64).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapVerdict {
    Consistent,
    Inconsistent,
    /// `P >= 0`: no gap predicted.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapEntry {
    pub n: usize,
    pub outer_modulus: f64,
    pub margin: f64,
    #[serde(with = "ext_f64")]
    pub bound: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapReport {
    pub pressure: PressureEstimate,
    /// `e^P`, the asymptotic bound on eigenvalue moduli.
    #[serde(with = "ext_f64")]
    pub predicted_radius: f64,
    pub entries: Vec<GapEntry>,
    /// Outer modulus strictly decreasing along increasing N.
    pub strictly_decreasing: bool,
    /// Observation only: every outer modulus lies strictly below `e^P`, i.e.
    /// the spectra show a gap beyond the pressure bound.
    pub extra_gap: bool,
    pub verdict: GapVerdict,
    pub verdict_reason: String,
}

impl GapReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("n,outer_modulus,predicted_radius,margin,bound,within\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.n,
                csv_float(e.outer_modulus),
                csv_float(self.predicted_radius),
                csv_float(e.margin),
                csv_float(e.bound),
                e.within
            ));
        }
        out
    }
}

/// Checks outer eigenvalue moduli against `e^P + 3/ln N`, with `P` the
/// pressure at `s = 1/2` (and the damping weight for damped maps).
pub fn gap_report(records: &[SpectrumRecord], pressure: &PressureEstimate) -> Result<GapReport> {
    if records.is_empty() {
        return Err(Error::domain("gap report needs at least one spectrum"));
    }
    if pressure.s != 0.5 {
        return Err(Error::domain(format!(
            "gap criterion uses the pressure at s = 1/2, got s = {}",
            pressure.s
        )));
    }
    let mut recs: Vec<&SpectrumRecord> = records.iter().collect();
    recs.sort_by_key(|r| r.n);
    for rec in &recs {
        let spec = require_map_spec(rec)?;
        if spec.map != pressure.map {
            return Err(Error::domain(format!(
                "spectrum N = {} was built for {:?}, pressure for {:?}",
                rec.n, spec.map, pressure.map
            )));
        }
        let damping_matches = match (&spec.damping, &pressure.damping) {
            (None, None) => true,
            (Some(a), Some(b)) => a == b && pressure.beta == 1.0,
            (Some(_), None) | (None, Some(_)) => false,
        };
        if !damping_matches {
            return Err(Error::domain(format!(
                "damping of spectrum N = {} does not match the pressure weight",
                rec.n
            )));
        }
    }

    let predicted_radius = pressure.value.exp();
    let entries: Vec<GapEntry> = recs
        .iter()
        .map(|rec| {
            let outer = spectral_radius(rec);
            let margin = gap_margin(rec.n);
            let bound = predicted_radius + margin;
            GapEntry { n: rec.n, outer_modulus: outer, margin, bound, within: outer <= bound }
        })
        .collect();
    let strictly_decreasing = entries.windows(2).all(|w| w[1].outer_modulus < w[0].outer_modulus);
    let extra_gap = entries.iter().all(|e| e.outer_modulus < predicted_radius);
    let (verdict, verdict_reason) = if !(pressure.value < 0.0) {
        (GapVerdict::Inconclusive, "inconclusive: no gap predicted (P >= 0)".to_string())
    } else if entries.iter().all(|e| e.within) {
        (GapVerdict::Consistent, "outer moduli within e^P + 3/ln N at every N".to_string())
    } else {
        let bad: Vec<String> = entries.iter().filter(|e| !e.within).map(|e| e.n.to_string()).collect();
        (GapVerdict::Inconsistent, format!("outer modulus above e^P + 3/ln N at N = {}", bad.join(", ")))
    };
    Ok(GapReport {
        pressure: pressure.clone(),
        predicted_radius,
        entries,
        strictly_decreasing,
        extra_gap,
        verdict,
        verdict_reason,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationEntry {
    pub n: usize,
    /// One fraction per entry of the epsilon grid.
    pub fractions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationReport {
    pub mean_damping: f64,
    pub epsilons: Vec<f64>,
    pub entries: Vec<ConcentrationEntry>,
    /// Per epsilon: slope of the fraction against `ln N` (`None` with fewer
    /// than two N).
    pub trend: Vec<Option<LinearFit>>,
    /// Per epsilon: fraction non-decreasing along increasing N.
    pub non_decreasing: Vec<bool>,
}

impl ConcentrationReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("n,epsilon,fraction\n");
        for e in &self.entries {
            for (eps, f) in self.epsilons.iter().zip(&e.fractions) {
                out.push_str(&format!("{},{},{}\n", e.n, csv_float(*eps), csv_float(*f)));
            }
        }
        out
    }
}

/// Fraction of decay rates `-ln|lambda|` within `eps` of the space average
/// of the damping, per N and per `eps`.
pub fn concentration_report(
    records: &[SpectrumRecord],
    damping: &DampingField,
    epsilons: &[f64],
) -> Result<ConcentrationReport> {
    if epsilons.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::domain("epsilons must be finite and non-negative"));
    }
    let mean = damping.mean();
    let mut recs: Vec<&SpectrumRecord> = records.iter().collect();
    recs.sort_by_key(|r| r.n);
    let entries: Vec<ConcentrationEntry> = recs
        .iter()
        .map(|rec| {
            let rates: Vec<f64> = rec.moduli().map(|m| -m.ln()).collect();
            let fractions = epsilons
                .iter()
                .map(|&eps| {
                    if rates.is_empty() {
                        return 0.0;
                    }
                    rates.iter().filter(|&&g| (g - mean).abs() < eps).count() as f64 / rates.len() as f64
                })
                .collect();
            ConcentrationEntry { n: rec.n, fractions }
        })
        .collect();
    let xs: Vec<f64> = entries.iter().map(|e| (e.n as f64).ln()).collect();
    let mut trend = Vec::with_capacity(epsilons.len());
    let mut non_decreasing = Vec::with_capacity(epsilons.len());
    for k in 0..epsilons.len() {
        let ys: Vec<f64> = entries.iter().map(|e| e.fractions[k]).collect();
        trend.push(linear_fit(&xs, &ys, 2).ok());
        non_decreasing.push(ys.windows(2).all(|w| w[1] >= w[0]));
    }
    Ok(ConcentrationReport { mean_damping: mean, epsilons: epsilons.to_vec(), entries, trend, non_decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{closed_form_pressure, pressure, OpenMapSpec};
    use crate::quantum::{map_spectrum, QuantumMapSpec};
    use crate::spectral::C64;
    use serde_json::json;

    #[test]
    fn margin_shrinks() {
        assert!((gap_margin(125) - 3.0 / 125f64.ln()).abs() < 1e-15);
        assert!(gap_margin(3125) < gap_margin(625));
    }

    #[test]
    fn positive_pressure_is_inconclusive() {
        let map = OpenMapSpec::new(3, vec![0, 2]).unwrap();
        let p = pressure(&map, 0.5, None, 0.0, 4).unwrap();
        assert!(p.value > 0.14);
        let rec = map_spectrum(&QuantumMapSpec::open(map, 9)).unwrap();
        let r = gap_report(&[rec], &p).unwrap();
        assert_eq!(r.verdict, GapVerdict::Inconclusive);
        assert!(r.verdict_reason.contains("no gap predicted"));
    }

    #[test]
    fn mismatched_maps_rejected() {
        let p = pressure(&OpenMapSpec::new(5, vec![1, 3]).unwrap(), 0.5, None, 0.0, 4).unwrap();
        let rec = map_spectrum(&QuantumMapSpec::open(OpenMapSpec::new(3, vec![0, 2]).unwrap(), 9)).unwrap();
        assert!(matches!(gap_report(&[rec], &p), Err(Error::Domain(_))));
        let bare = SpectrumRecord::new(vec![C64::new(0.5, 0.0)], json!({}));
        assert!(gap_report(&[bare], &p).is_err());
    }

    #[test]
    fn damped_weight_required() {
        let d = DampingField::symbol_constant(vec![0.0, 3.0]).unwrap();
        let spec = QuantumMapSpec::damped(d.clone(), 16).unwrap();
        let rec = map_spectrum(&spec).unwrap();
        let undamped = pressure(&spec.map, 0.5, None, 0.0, 4).unwrap();
        assert!(gap_report(&[rec.clone()], &undamped).is_err());
        let p = pressure(&spec.map, 0.5, Some(&d), 1.0, 4).unwrap();
        let cf = closed_form_pressure(&spec.map, 0.5, Some(&d), 1.0).unwrap();
        assert!((p.value - cf).abs() < 1e-12);
        let r = gap_report(&[rec], &p).unwrap();
        assert!(r.pressure.value < 0.0);
        assert_ne!(r.verdict, GapVerdict::Inconclusive);
    }

    #[test]
    fn constant_damping_concentrates() {
        let d = DampingField::constant(2, 0.7).unwrap();
        let rec = map_spectrum(&QuantumMapSpec::damped(d.clone(), 32).unwrap()).unwrap();
        let r = concentration_report(&[rec], &d, &[1e-6, 0.1]).unwrap();
        assert_eq!(r.entries[0].fractions, vec![1.0, 1.0]);
    }

    #[test]
    fn bracketed_rates() {
        let d = DampingField::symbol_constant(vec![0.0, 1.0]).unwrap();
        let recs: Vec<SpectrumRecord> = [16, 32]
            .iter()
            .map(|&n| map_spectrum(&QuantumMapSpec::damped(d.clone(), n).unwrap()).unwrap())
            .collect();
        let r = concentration_report(&recs, &d, &[0.05, 0.1, 0.5]).unwrap();
        assert_eq!(r.mean_damping, 0.5);
        for e in &r.entries {
            assert!(e.fractions.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(e.fractions[2], 1.0);
        }
    }
}
