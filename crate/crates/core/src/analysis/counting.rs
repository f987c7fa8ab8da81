use serde::{Deserialize, Serialize};

use crate::analysis::record_map_spec;
use crate::classical::RateFunction;
use crate::error::{Error, Result};
use crate::report::{csv_float, ext_f64};
use crate::spectral::SpectrumRecord;
use crate::stats::{linear_fit, LinearFit};

/// `#{j : |lambda_j| >= r}`.
pub fn count_moduli(rec: &SpectrumRecord, r: f64) -> usize {
    rec.moduli().filter(|&m| m >= r).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitWindow {
    /// Drop the smallest N as a transient.
    pub drop_smallest: bool,
    pub min_points: usize,
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow { drop_smallest: true, min_points: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountEntry {
    pub n: usize,
    pub threshold: f64,
    pub count: usize,
    pub used: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

/// Counts `n(N, r)` over a family of records plus the fitted growth
/// exponent of `count` against `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountProfile {
    pub entries: Vec<CountEntry>,
    pub window: FitWindow,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<LinearFit>,
    /// Fitted exponent, `None` when the fit was degenerate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent_stderr: Option<f64>,
    /// Classical prediction printed next to the fit.
    #[serde(default, with = "ext_f64::option", skip_serializing_if = "Option::is_none")]
    pub classical: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<String>,
}

impl CountProfile {
    pub fn csv(&self) -> String {
        let mut out = String::from("n,threshold,count,used\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{},{}\n", e.n, csv_float(e.threshold), e.count, e.used));
        }
        out
    }
}

fn sorted_by_n(records: &[SpectrumRecord]) -> Result<Vec<&SpectrumRecord>> {
    let mut recs: Vec<&SpectrumRecord> = records.iter().collect();
    recs.sort_by_key(|r| r.n);
    if recs.windows(2).any(|w| w[0].n == w[1].n) {
        return Err(Error::domain("records must have distinct dimensions N"));
    }
    Ok(recs)
}

/// Builds the profile from `(N, threshold, count)` triples; the fit is
/// left empty (with the reason recorded) when too few points survive.
fn profile_from_counts(rows: Vec<(usize, f64, usize)>, window: FitWindow, classical: Option<f64>) -> CountProfile {
    let smallest = rows.iter().map(|r| r.0).min();
    let entries: Vec<CountEntry> = rows
        .into_iter()
        .map(|(n, threshold, count)| {
            let flag = if count == 0 {
                Some("zero count dropped".to_string())
            } else if window.drop_smallest && Some(n) == smallest {
                Some("smallest N dropped".to_string())
            } else {
                None
            };
            CountEntry { n, threshold, count, used: flag.is_none(), flag }
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = entries
        .iter()
        .filter(|e| e.used)
        .map(|e| ((e.n as f64).ln(), (e.count as f64).ln()))
        .unzip();
    let (fit, fit_error) = match linear_fit(&xs, &ys, window.min_points) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    CountProfile {
        entries,
        window,
        exponent: fit.map(|f| f.slope),
        exponent_stderr: fit.map(|f| f.slope_stderr),
        fit,
        classical,
        fit_error,
    }
}

/// Fractal Weyl fit with the default window.
pub fn weyl_fit(records: &[SpectrumRecord], r: f64) -> Result<CountProfile> {
    weyl_fit_with(records, r, FitWindow::default())
}

/// Slope of `ln n(N, r)` against `ln N`, next to the classical
/// `nu = ln D / ln M` when the records carry their map spec.
pub fn weyl_fit_with(records: &[SpectrumRecord], r: f64, window: FitWindow) -> Result<CountProfile> {
    let recs = sorted_by_n(records)?;
    if recs.len() < 3 {
        return Err(Error::FitDegenerate(format!(
            "need at least 3 distinct N, got {}",
            recs.len()
        )));
    }
    let classical = recs
        .first()
        .and_then(|r| record_map_spec(r))
        .map(|s| s.map.cantor_dimension());
    let rows = recs.iter().map(|rec| (rec.n, r, count_moduli(rec, r))).collect();
    let profile = profile_from_counts(rows, window, classical);
    match &profile.fit_error {
        Some(msg) => Err(Error::FitDegenerate(msg.clone())),
        None => Ok(profile),
    }
}

/// Large-deviation counting profile at one `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdProfile {
    pub alpha: f64,
    /// `H(alpha)` from the rate function.
    #[serde(with = "ext_f64")]
    pub rate: f64,
    /// `H(alpha) / ln M`, the classical bound for the fitted exponent.
    #[serde(with = "ext_f64")]
    pub normalized_rate: f64,
    /// `m(N, alpha) = #{-ln|lambda| <= alpha}` with its fit.
    pub lower: CountProfile,
    /// `#{-ln|lambda| >= alpha}` per N, reported without a symmetry claim.
    pub upper_counts: Vec<(usize, usize)>,
}

impl LdProfile {
    pub fn csv_rows(&self) -> Vec<String> {
        self.lower
            .entries
            .iter()
            .zip(&self.upper_counts)
            .map(|(e, (_, up))| format!("{},{},{},{},{}", csv_float(self.alpha), e.n, e.count, up, e.used))
            .collect()
    }
}

pub const LD_CSV_HEADER: &str = "alpha,n,count,upper_count,used";

/// For each `alpha`, counts `m(N, alpha)` and fits its growth in `N`.
///
/// `m(N, alpha)` is computed as `count_moduli(rec, e^{-alpha})`, so the
/// identity with the modulus count holds exactly.
pub fn ld_profile(records: &[SpectrumRecord], rate_fn: &RateFunction, alphas: &[f64]) -> Result<Vec<LdProfile>> {
    let recs = sorted_by_n(records)?;
    if alphas.is_empty() {
        return Err(Error::domain("empty alpha grid"));
    }
    let spec = recs
        .first()
        .and_then(|r| record_map_spec(r))
        .ok_or_else(|| Error::domain("records carry no map metadata (needed for the ln M normalization)"))?;
    let ln_m = spec.map.unstable_jacobian();
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let rate = rate_fn
            .alphas
            .iter()
            .position(|&a| (a - alpha).abs() <= 1e-12 * (1.0 + a.abs()))
            .map(|i| rate_fn.values[i])
            .ok_or_else(|| Error::domain(format!("alpha = {alpha} not on the rate-function grid")))?;
        let threshold = (-alpha).exp();
        let rows = recs.iter().map(|rec| (rec.n, threshold, count_moduli(rec, threshold))).collect();
        let lower = profile_from_counts(rows, FitWindow::default(), Some(rate / ln_m));
        let upper_counts = recs
            .iter()
            .map(|rec| (rec.n, rec.moduli().filter(|&m| -m.ln() >= alpha).count()))
            .collect();
        out.push(LdProfile { alpha, rate, normalized_rate: rate / ln_m, lower, upper_counts });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::C64;
    use serde_json::json;

    fn synthetic(n: usize, big: usize) -> SpectrumRecord {
        // `big` unit-modulus eigenvalues, the rest at modulus 0.1.
        let ev = (0..n).map(|j| if j < big { C64::new(1.0, 0.0) } else { C64::new(0.1, 0.0) }).collect();
        SpectrumRecord::new(ev, json!({}))
    }

    #[test]
    fn counts() {
        let rec = synthetic(16, 16);
        assert_eq!(count_moduli(&rec, 0.5), 16);
        assert_eq!(count_moduli(&rec, 1.1), 0);
        assert_eq!(count_moduli(&rec, 0.0), 16);
        let r = 1.0 / 2f64.sqrt();
        let two = SpectrumRecord::new(vec![C64::new(r, 0.0), C64::new(0.0, 0.0)], json!({}));
        assert_eq!(count_moduli(&two, 0.5), 1);
    }

    #[test]
    fn synthetic_power_law() {
        let nu = 0.63;
        let recs: Vec<SpectrumRecord> = [64usize, 256, 1024, 4096, 16384]
            .iter()
            .map(|&n| synthetic(n, (n as f64).powf(nu).ceil() as usize))
            .collect();
        let p = weyl_fit(&recs, 0.5).unwrap();
        assert!((p.exponent.unwrap() - nu).abs() < 1e-3);
        assert!(!p.entries[0].used);
    }

    #[test]
    fn degenerate_windows() {
        let recs = vec![synthetic(4, 4), synthetic(8, 8)];
        assert!(matches!(weyl_fit(&recs, 0.5), Err(Error::FitDegenerate(_))));
        let recs = vec![synthetic(4, 4), synthetic(8, 0), synthetic(16, 0), synthetic(32, 32)];
        let err = weyl_fit(&recs, 0.5).unwrap_err();
        assert!(matches!(err, Error::FitDegenerate(_)));
    }

    #[test]
    fn ld_profile_is_a_modulus_count() {
        use crate::classical::{rate_function, DampingField};
        use crate::quantum::{map_spectrum, QuantumMapSpec};
        let d = DampingField::symbol_constant(vec![0.0, 1.0]).unwrap();
        let recs: Vec<SpectrumRecord> = [8, 16, 32, 64]
            .iter()
            .map(|&n| map_spectrum(&QuantumMapSpec::damped(d.clone(), n).unwrap()).unwrap())
            .collect();
        let spec = QuantumMapSpec::damped(d.clone(), 8).unwrap();
        let alphas = [-0.5, 0.25, 0.5, 1.5];
        let h = rate_function(&spec.map, &d, &alphas).unwrap();
        let prof = ld_profile(&recs, &h, &alphas).unwrap();
        for p in &prof {
            for (e, rec) in p.lower.entries.iter().zip(&recs) {
                assert_eq!(e.count, count_moduli(rec, (-p.alpha).exp()));
            }
        }
        // Below the damping range nothing is counted; above it, everything.
        assert!(prof[0].lower.entries.iter().all(|e| e.count == 0));
        assert!(prof[0].lower.fit.is_none());
        assert!((prof[3].lower.exponent.unwrap() - 1.0).abs() < 1e-9);
        assert!((prof[2].normalized_rate - 1.0).abs() < 1e-9);
        assert!(ld_profile(&recs, &h, &[0.3]).is_err());
    }
}
