use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Open baker map on the unit square with `branches` vertical strips, of
/// which only `kept` survive. Every kept branch expands by exactly
/// `branches`, so the unstable Jacobian is the constant `ln M` per step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenMapSpec {
    branches: usize,
    kept: Vec<usize>,
}

impl OpenMapSpec {
    pub fn new(branches: usize, kept: Vec<usize>) -> Result<Self> {
        let spec = OpenMapSpec { branches, kept };
        spec.validate()?;
        Ok(spec)
    }

    /// The closed map: every branch kept.
    pub fn closed(branches: usize) -> Result<Self> {
        Self::new(branches, (0..branches).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.branches < 2 {
            return Err(Error::domain(format!(
                "branch count must be >= 2, got {}",
                self.branches
            )));
        }
        if self.kept.is_empty() {
            return Err(Error::domain("at least one branch must be kept"));
        }
        if self.kept.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("kept branches must be strictly increasing"));
        }
        if let Some(&last) = self.kept.last() {
            if last >= self.branches {
                return Err(Error::domain(format!(
                    "kept branch {last} out of range 0..{}",
                    self.branches
                )));
            }
        }
        Ok(())
    }

    /// `M`
    #[inline]
    pub fn branches(&self) -> usize {
        self.branches
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    /// `D`, number of surviving branches.
    #[inline]
    pub fn kept_count(&self) -> usize {
        self.kept.len()
    }

    pub fn is_closed(&self) -> bool {
        self.kept.len() == self.branches
    }

    pub fn is_kept(&self, branch: usize) -> bool {
        self.kept.binary_search(&branch).is_ok()
    }

    /// Unstable Jacobian per step, `ln M`.
    pub fn unstable_jacobian(&self) -> f64 {
        (self.branches as f64).ln()
    }

    /// Box (= Hausdorff, for these self-similar sets) dimension of the
    /// full trapped set, `2 ln D / ln M`.
    pub fn trapped_set_dimension(&self) -> f64 {
        2.0 * (self.kept.len() as f64).ln() / (self.branches as f64).ln()
    }

    /// Transverse dimension `nu = ln D / ln M` of one Cantor factor.
    pub fn cantor_dimension(&self) -> f64 {
        self.trapped_set_dimension() / 2.0
    }
}

/// Damping on the unit square as a function of the horizontal coordinate.
///
/// Either constant on each of the `M` vertical strips, or a smooth profile
/// sampled on a uniform periodic grid of `[0, 1)` and linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampingField {
    strips: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    profile: Option<Vec<f64>>,
}

fn check_values(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::domain(format!("{what} is empty")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::domain(format!(
            "{what} values must be finite and >= 0, found {v}"
        )));
    }
    Ok(())
}

impl DampingField {
    /// Constant `values[i]` on the i-th vertical strip.
    pub fn symbol_constant(values: Vec<f64>) -> Result<Self> {
        check_values(&values, "damping")?;
        Ok(DampingField {
            strips: values,
            profile: None,
        })
    }

    pub fn constant(branches: usize, value: f64) -> Result<Self> {
        Self::symbol_constant(vec![value; branches])
    }

    /// Smooth damping sampled at `x_k = k / len` on the periodic unit
    /// interval. Strip values are the strip means of the interpolant.
    pub fn sampled(branches: usize, profile: Vec<f64>) -> Result<Self> {
        check_values(&profile, "damping profile")?;
        if branches < 1 {
            return Err(Error::domain("branch count must be positive"));
        }
        let mut field = DampingField {
            strips: vec![0.0; branches],
            profile: Some(profile),
        };
        let sub = 64;
        for i in 0..branches {
            let mean = (0..sub)
                .map(|k| field.value_at((i as f64 + (k as f64 + 0.5) / sub as f64) / branches as f64))
                .sum::<f64>()
                / sub as f64;
            field.strips[i] = mean;
        }
        Ok(field)
    }

    pub fn validate(&self) -> Result<()> {
        check_values(&self.strips, "damping")?;
        if let Some(p) = &self.profile {
            check_values(p, "damping profile")?;
        }
        Ok(())
    }

    pub fn branches(&self) -> usize {
        self.strips.len()
    }

    pub fn strip_values(&self) -> &[f64] {
        &self.strips
    }

    pub fn profile(&self) -> Option<&[f64]> {
        self.profile.as_deref()
    }

    pub fn is_symbol_constant(&self) -> bool {
        self.profile.is_none()
    }

    pub fn check_compatible(&self, map: &OpenMapSpec) -> Result<()> {
        if self.strips.len() != map.branches() {
            return Err(Error::domain(format!(
                "damping has {} strips but the map has {} branches",
                self.strips.len(),
                map.branches()
            )));
        }
        Ok(())
    }

    /// Damping at horizontal position `x` (taken mod 1).
    pub fn value_at(&self, x: f64) -> f64 {
        let x = x - x.floor();
        match &self.profile {
            None => {
                let m = self.strips.len();
                let i = ((x * m as f64).floor() as usize).min(m - 1);
                self.strips[i]
            }
            Some(p) => {
                let len = p.len();
                let t = x * len as f64;
                let k = (t.floor() as usize).min(len - 1);
                let frac = t - k as f64;
                p[k] * (1.0 - frac) + p[(k + 1) % len] * frac
            }
        }
    }

    /// Space average over the unit interval (the invariant Lebesgue measure
    /// of the closed map).
    pub fn mean(&self) -> f64 {
        match &self.profile {
            None => self.strips.iter().sum::<f64>() / self.strips.len() as f64,
            Some(p) => p.iter().sum::<f64>() / p.len() as f64,
        }
    }

    /// Extremal values over the kept strips. For symbol-constant damping
    /// these are exactly the extremal ergodic averages `b_-`, `b_+` (both are
    /// attained on fixed points).
    pub fn kept_range(&self, map: &OpenMapSpec) -> (f64, f64) {
        map.kept()
            .iter()
            .map(|&i| self.strips[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_specs() {
        assert!(OpenMapSpec::new(1, vec![0]).is_err());
        assert!(OpenMapSpec::new(3, vec![]).is_err());
        assert!(OpenMapSpec::new(3, vec![2, 0]).is_err());
        assert!(OpenMapSpec::new(3, vec![0, 0]).is_err());
        assert!(OpenMapSpec::new(3, vec![0, 3]).is_err());
        assert!(OpenMapSpec::new(3, vec![0, 2]).is_ok());
    }

    #[test]
    fn dimensions() {
        let m = OpenMapSpec::new(3, vec![0, 2]).unwrap();
        assert!((m.trapped_set_dimension() - 2.0 * 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        assert!((OpenMapSpec::closed(4).unwrap().trapped_set_dimension() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn strip_lookup() {
        let b = DampingField::symbol_constant(vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(b.value_at(0.1), 0.0);
        assert_eq!(b.value_at(0.5), 1.0);
        assert_eq!(b.value_at(0.99), 2.0);
        assert_eq!(b.value_at(1.5), 1.0);
        assert!((b.mean() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_damping_rejected() {
        assert!(DampingField::symbol_constant(vec![0.0, -0.1]).is_err());
        assert!(DampingField::symbol_constant(vec![f64::NAN]).is_err());
    }

    #[test]
    fn sampled_profile_interpolates_periodically() {
        let b = DampingField::sampled(2, vec![0.0, 1.0]).unwrap();
        assert!((b.value_at(0.25) - 0.5).abs() < 1e-15);
        assert!((b.value_at(0.75) - 0.5).abs() < 1e-15);
        assert!((b.strip_values()[0] - 0.5).abs() < 1e-12);
        assert!(!b.is_symbol_constant());
    }
}
