use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classical::map::{DampingField, OpenMapSpec};
use crate::classical::words::{check_cap, for_each_orbit_sum, DEFAULT_WORD_CAP};
use crate::error::{Error, Result};
use crate::report::ext_f64;

/// Horizon used by [`rate_function`] when only the empirical path applies.
pub const DEFAULT_EMPIRICAL_HORIZON: usize = 16;

/// `(1/T) sum_{t<T} b_{word[t]}`.
pub fn birkhoff_average(
    map: &OpenMapSpec,
    damping: &DampingField,
    word: &[usize],
    t: usize,
) -> Result<f64> {
    damping.check_compatible(map)?;
    if t == 0 {
        return Err(Error::domain("averaging time T must be >= 1"));
    }
    if word.len() < t {
        return Err(Error::domain(format!(
            "word of length {} shorter than T = {t}",
            word.len()
        )));
    }
    if let Some(&bad) = word.iter().find(|&&s| s >= map.branches()) {
        return Err(Error::domain(format!(
            "symbol {bad} is not a branch of a {}-branch map",
            map.branches()
        )));
    }
    let strips = damping.strip_values();
    Ok(word[..t].iter().map(|&s| strips[s]).sum::<f64>() / t as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RateMethod {
    /// Legendre transform of the cumulant generating function.
    Legendre,
    /// Normalized histogram of Birkhoff averages over all words of length `horizon`.
    Empirical { horizon: usize },
}

/// Large-deviation rate function sampled on a grid. Values outside
/// `[b_minus, b_plus]` are `-inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateFunction {
    pub alphas: Vec<f64>,
    #[serde(with = "ext_f64::vec")]
    pub values: Vec<f64>,
    pub b_minus: f64,
    pub b_plus: f64,
    pub method: RateMethod,
}

impl RateFunction {
    pub fn value_at(&self, alpha: f64) -> Option<f64> {
        self.alphas
            .iter()
            .position(|&a| a == alpha)
            .map(|i| self.values[i])
    }

    /// Largest discrete second difference over consecutive finite values on
    /// a uniform sub-grid; `<= 0` up to rounding for a concave function.
    pub fn max_second_difference(&self) -> f64 {
        self.values
            .windows(3)
            .zip(self.alphas.windows(3))
            .filter(|(v, _)| v.iter().all(|x| x.is_finite()))
            .map(|(v, a)| {
                let (h1, h2) = (a[1] - a[0], a[2] - a[1]);
                // Divided second difference scaled back to unit spacing.
                let d1 = (v[1] - v[0]) / h1;
                let d2 = (v[2] - v[1]) / h2;
                (d2 - d1) * h1.min(h2)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_grid(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::domain("empty alpha grid"));
    }
    if alphas.iter().any(|a| !a.is_finite()) {
        return Err(Error::domain("alpha grid must be finite"));
    }
    Ok(())
}

/// Rate function of the damping averages: Legendre path for
/// symbol-constant damping, empirical path otherwise.
pub fn rate_function(map: &OpenMapSpec, damping: &DampingField, alphas: &[f64]) -> Result<RateFunction> {
    if damping.is_symbol_constant() {
        rate_function_legendre(map, damping, alphas)
    } else {
        rate_function_empirical(map, damping, alphas, DEFAULT_EMPIRICAL_HORIZON)
    }
}

/// `H(alpha) = inf_beta [Lambda(beta) + beta alpha]` with
/// `Lambda(beta) = ln sum_{i in kept} e^{-beta b_i}`; maximum `ln D`.
pub fn rate_function_legendre(
    map: &OpenMapSpec,
    damping: &DampingField,
    alphas: &[f64],
) -> Result<RateFunction> {
    map.validate()?;
    damping.validate()?;
    damping.check_compatible(map)?;
    check_grid(alphas)?;
    if !damping.is_symbol_constant() {
        return Err(Error::Unsupported(
            "Legendre rate function needs symbol-constant damping".into(),
        ));
    }
    let b: Vec<f64> = map.kept().iter().map(|&i| damping.strip_values()[i]).collect();
    let (lo, hi) = damping.kept_range(map);
    let values = alphas.iter().map(|&a| legendre_at(&b, lo, hi, a)).collect();
    Ok(RateFunction {
        alphas: alphas.to_vec(),
        values,
        b_minus: lo,
        b_plus: hi,
        method: RateMethod::Legendre,
    })
}

fn lambda(b: &[f64], beta: f64) -> f64 {
    let top = b.iter().map(|x| -beta * x).fold(f64::NEG_INFINITY, f64::max);
    top + b.iter().map(|x| (-beta * x - top).exp()).sum::<f64>().ln()
}

/// Mean of `b` under the tilted weights `e^{-beta b_i}`.
fn tilted_mean(b: &[f64], beta: f64) -> f64 {
    let top = b.iter().map(|x| -beta * x).fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for x in b {
        let w = (-beta * x - top).exp();
        num += w * x;
        den += w;
    }
    num / den
}

fn legendre_at(b: &[f64], lo: f64, hi: f64, alpha: f64) -> f64 {
    let tol = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    if alpha < lo - tol || alpha > hi + tol {
        return f64::NEG_INFINITY;
    }
    let count_eq = |v: f64| b.iter().filter(|&&x| (x - v).abs() <= tol).count() as f64;
    if (alpha - lo).abs() <= tol {
        return count_eq(lo).ln();
    }
    if (alpha - hi).abs() <= tol {
        return count_eq(hi).ln();
    }
    // The tilted mean decreases from hi to lo as beta runs over the reals.
    let (mut a, mut c) = (-1.0, 1.0);
    while tilted_mean(b, a) < alpha {
        a *= 2.0;
    }
    while tilted_mean(b, c) > alpha {
        c *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + c);
        if mid == a || mid == c {
            break;
        }
        if tilted_mean(b, mid) > alpha {
            a = mid;
        } else {
            c = mid;
        }
    }
    let beta = 0.5 * (a + c);
    lambda(b, beta) + beta * alpha
}

/// Empirical rate function from exact enumeration of all admissible words
/// of length `horizon`.
///
/// Birkhoff averages are binned on `horizon + 1` bins of width
/// `(b_+ - b_-)/horizon` centred on `b_- + k (b_+ - b_-)/horizon`, and
/// `H(alpha) = ln D + (1/T) ln(count(bin(alpha)) / max count)`. Dividing by
/// the largest bin cancels the polynomial prefactor of the counts, so the
/// estimate peaks at exactly `ln D` like the Legendre path. Empty bins and
/// points outside the range of averages give `-inf`.
pub fn rate_function_empirical(
    map: &OpenMapSpec,
    damping: &DampingField,
    alphas: &[f64],
    horizon: usize,
) -> Result<RateFunction> {
    map.validate()?;
    damping.validate()?;
    damping.check_compatible(map)?;
    check_grid(alphas)?;
    if horizon == 0 {
        return Err(Error::domain("horizon must be >= 1"));
    }
    check_cap(map, horizon, DEFAULT_WORD_CAP, "rate-function words")?;

    let t = horizon as f64;
    let mut averages = Vec::new();
    for_each_orbit_sum(map, damping, horizon, |s| averages.push(s / t))?;
    let lo = averages.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = averages.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / t;
    let tol = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    let bin = |x: f64| -> i64 {
        if width <= tol {
            0
        } else {
            ((x - lo) / width).round() as i64
        }
    };
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for &a in &averages {
        *counts.entry(bin(a)).or_default() += 1;
    }
    let max_count = counts.values().copied().max().unwrap_or(1) as f64;
    let ln_d = (map.kept_count() as f64).ln();
    let values = alphas
        .iter()
        .map(|&a| {
            if a < lo - tol || a > hi + tol {
                return f64::NEG_INFINITY;
            }
            if width <= tol && (a - lo).abs() > tol {
                return f64::NEG_INFINITY;
            }
            match counts.get(&bin(a)) {
                Some(&c) => ln_d + (c as f64 / max_count).ln() / t,
                None => f64::NEG_INFINITY,
            }
        })
        .collect();
    Ok(RateFunction {
        alphas: alphas.to_vec(),
        values,
        b_minus: lo,
        b_plus: hi,
        method: RateMethod::Empirical { horizon },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> (OpenMapSpec, DampingField) {
        (
            OpenMapSpec::closed(2).unwrap(),
            DampingField::symbol_constant(vec![0.0, 1.0]).unwrap(),
        )
    }

    #[test]
    fn birkhoff_examples() {
        let m3 = OpenMapSpec::closed(3).unwrap();
        let c = DampingField::constant(3, 0.4).unwrap();
        assert!((birkhoff_average(&m3, &c, &[2, 0, 1, 1], 3).unwrap() - 0.4).abs() < 1e-15);

        let (m2, b) = two();
        assert_eq!(birkhoff_average(&m2, &b, &[0, 1, 0, 1, 0, 1], 4).unwrap(), 0.5);

        let b3 = DampingField::symbol_constant(vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(birkhoff_average(&m3, &b3, &[0, 1, 2, 0, 1, 2], 6).unwrap(), 1.0);

        assert!(birkhoff_average(&m2, &b, &[0, 2], 2).is_err());
        assert!(birkhoff_average(&m2, &b, &[0], 2).is_err());
    }

    #[test]
    fn constant_damping_is_degenerate() {
        let m = OpenMapSpec::closed(3).unwrap();
        let c = DampingField::constant(3, 0.7).unwrap();
        let r = rate_function_legendre(&m, &c, &[0.7, 0.5, 0.9]).unwrap();
        assert!((r.values[0] - 3f64.ln()).abs() < 1e-15);
        assert_eq!(r.values[1], f64::NEG_INFINITY);
        assert_eq!(r.values[2], f64::NEG_INFINITY);
    }

    #[test]
    fn bernoulli_cramer() {
        let (m, b) = two();
        let r = rate_function(&m, &b, &[0.25, 0.5, 0.75, 0.0, 1.0, 1.5]).unwrap();
        let cramer = -(0.25 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        assert!((r.values[0] - cramer).abs() < 1e-12);
        assert!((r.values[1] - 2f64.ln()).abs() < 1e-12);
        assert!((r.values[2] - cramer).abs() < 1e-12);
        assert_eq!(r.values[3], 0.0);
        assert_eq!(r.values[4], 0.0);
        assert_eq!(r.values[5], f64::NEG_INFINITY);
    }

    #[test]
    fn empirical_tracks_legendre_at_sixteen() {
        let (m, b) = two();
        let alphas = [0.25, 0.5, 0.75];
        let exact = rate_function_legendre(&m, &b, &alphas).unwrap();
        let emp = rate_function_empirical(&m, &b, &alphas, 16).unwrap();
        for (e, x) in emp.values.iter().zip(&exact.values) {
            assert!((e - x).abs() < 0.05, "{e} vs {x}");
        }
        // C(16,4) / C(16,8) normalization.
        let expect = 2f64.ln() + (1820.0f64 / 12870.0).ln() / 16.0;
        assert!((emp.values[0] - expect).abs() < 1e-12);
    }

    #[test]
    fn open_map_peaks_at_ln_d() {
        let m = OpenMapSpec::new(4, vec![0, 1, 3]).unwrap();
        let b = DampingField::symbol_constant(vec![0.0, 0.5, 9.0, 2.0]).unwrap();
        let grid: Vec<f64> = (0..=200).map(|k| 2.0 * k as f64 / 200.0).collect();
        let r = rate_function_legendre(&m, &b, &grid).unwrap();
        let max = r.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((max - 3f64.ln()).abs() < 1e-3);
        assert!(r.max_second_difference() <= 1e-9);
        assert_eq!((r.b_minus, r.b_plus), (0.0, 2.0));
    }

    #[test]
    fn empty_grid_rejected() {
        let (m, b) = two();
        assert!(rate_function(&m, &b, &[]).is_err());
    }
}
