use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::C64;

/// Gaussian tails are treated as zero below this value.
pub const TAIL_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianBarrier {
    pub center: f64,
    pub height: f64,
    pub width: f64,
}

/// Constant `height` on `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
    pub height: f64,
}

/// Real, (effectively) compactly supported 1D potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential1D {
    /// `sum_k A_k exp(-((x - c_k)/w_k)^2)`; entire, so complex scaling applies.
    GaussianBarriers { barriers: Vec<GaussianBarrier> },
    /// Finitely many disjoint constant pieces, zero elsewhere.
    PiecewiseConstant { intervals: Vec<Interval> },
}

impl Potential1D {
    /// Two barriers of height `a` and width parameter `w` centred at `+-c`.
    pub fn gaussian_double_barrier(a: f64, c: f64, w: f64) -> Self {
        Potential1D::GaussianBarriers {
            barriers: vec![
                GaussianBarrier { center: -c, height: a, width: w },
                GaussianBarrier { center: c, height: a, width: w },
            ],
        }
    }

    /// Square barriers of the given height on `[-(inner+width), -inner]`
    /// and `[inner, inner+width]`.
    pub fn square_double_barrier(height: f64, width: f64, inner: f64) -> Self {
        Potential1D::PiecewiseConstant {
            intervals: vec![
                Interval { start: -(inner + width), end: -inner, height },
                Interval { start: inner, end: inner + width, height },
            ],
        }
    }

    pub fn square_well(depth: f64, width: f64) -> Self {
        Potential1D::PiecewiseConstant {
            intervals: vec![Interval { start: -0.5 * width, end: 0.5 * width, height: depth }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Potential1D::GaussianBarriers { barriers } => {
                for b in barriers {
                    if !(b.center.is_finite() && b.height.is_finite() && b.width.is_finite()) || b.width <= 0.0 {
                        return Err(Error::domain(format!("invalid gaussian barrier {b:?}")));
                    }
                }
            }
            Potential1D::PiecewiseConstant { intervals } => {
                for iv in intervals {
                    if !(iv.start.is_finite() && iv.end.is_finite() && iv.height.is_finite()) || iv.start >= iv.end {
                        return Err(Error::domain(format!("invalid interval {iv:?}")));
                    }
                }
                if intervals.windows(2).any(|w| w[0].end > w[1].start) {
                    return Err(Error::domain("intervals must be sorted and disjoint"));
                }
            }
        }
        Ok(())
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, Potential1D::GaussianBarriers { .. })
    }

    /// Radius `R` with `|V(x)| <= 1e-12` for `|x| > R`.
    pub fn support_radius(&self) -> f64 {
        match self {
            Potential1D::GaussianBarriers { barriers } => barriers
                .iter()
                .map(|b| {
                    let ratio = b.height.abs() / TAIL_CUTOFF;
                    let reach = if ratio > 1.0 { b.width * ratio.ln().sqrt() } else { 0.0 };
                    b.center.abs() + reach
                })
                .fold(0.0, f64::max),
            Potential1D::PiecewiseConstant { intervals } => intervals
                .iter()
                .map(|iv| iv.start.abs().max(iv.end.abs()))
                .fold(0.0, f64::max),
        }
    }

    pub fn max_value(&self) -> f64 {
        match self {
            Potential1D::GaussianBarriers { barriers } => {
                // Overlapping barriers can exceed each height; sample finely.
                let r = self.support_radius();
                let steps = 20_000;
                (0..=steps)
                    .map(|k| self.value(-r + 2.0 * r * k as f64 / steps as f64))
                    .fold(barriers.iter().map(|b| b.height).fold(0.0, f64::max), f64::max)
            }
            Potential1D::PiecewiseConstant { intervals } => {
                intervals.iter().map(|iv| iv.height).fold(0.0, f64::max)
            }
        }
    }

    /// Point value on the real line (interval ends belong to the interval).
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential1D::GaussianBarriers { barriers } => barriers
                .iter()
                .map(|b| {
                    let t = (x - b.center) / b.width;
                    b.height * (-t * t).exp()
                })
                .sum(),
            Potential1D::PiecewiseConstant { intervals } => intervals
                .iter()
                .find(|iv| iv.start <= x && x <= iv.end)
                .map_or(0.0, |iv| iv.height),
        }
    }

    /// Analytic continuation `V(z)`; only defined for the gaussian kind.
    pub fn value_complex(&self, z: C64) -> Result<C64> {
        match self {
            Potential1D::GaussianBarriers { barriers } => Ok(barriers
                .iter()
                .map(|b| {
                    let t = (z - b.center) / b.width;
                    (-t * t).exp() * b.height
                })
                .sum()),
            Potential1D::PiecewiseConstant { .. } => Err(Error::Unsupported(
                "piecewise-constant potential has no analytic continuation; use the absorbing-potential path"
                    .into(),
            )),
        }
    }

    /// Average of `V` over the cell `[x - h/2, x + h/2]`: exact for the
    /// piecewise kind, the midpoint value for the smooth kind.
    pub fn cell_value(&self, x: f64, h: f64) -> f64 {
        match self {
            Potential1D::GaussianBarriers { .. } => self.value(x),
            Potential1D::PiecewiseConstant { intervals } => {
                let (lo, hi) = (x - 0.5 * h, x + 0.5 * h);
                intervals
                    .iter()
                    .map(|iv| iv.height * (hi.min(iv.end) - lo.max(iv.start)).max(0.0))
                    .sum::<f64>()
                    / h
            }
        }
    }

    /// Pieces covering `[first start, last end]` with zero-height gaps
    /// filled in; the layout the transfer-matrix oracle propagates through.
    pub(crate) fn contiguous_pieces(&self) -> Result<Vec<Interval>> {
        let Potential1D::PiecewiseConstant { intervals } = self else {
            return Err(Error::Unsupported("transfer matrices need a piecewise-constant potential".into()));
        };
        let mut out: Vec<Interval> = Vec::new();
        for iv in intervals {
            if let Some(last) = out.last() {
                if iv.start > last.end {
                    out.push(Interval { start: last.end, end: iv.start, height: 0.0 });
                }
            }
            out.push(*iv);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_support_and_values() {
        let v = Potential1D::gaussian_double_barrier(1.0, 0.65, 0.15);
        let r = v.support_radius();
        assert!(v.value(r + 1e-9) <= TAIL_CUTOFF * 1.0001);
        assert!((v.value(0.65) - 1.0).abs() < 1e-6);
        let z = v.value_complex(C64::new(0.3, 0.0)).unwrap();
        assert!((z.re - v.value(0.3)).abs() < 1e-15 && z.im == 0.0);
    }

    #[test]
    fn cell_average_is_exact_on_partial_overlap() {
        let v = Potential1D::square_double_barrier(1.0, 0.3, 0.5);
        assert!((v.cell_value(0.5, 0.2) - 0.5).abs() < 1e-15);
        assert_eq!(v.cell_value(0.0, 0.2), 0.0);
        assert!((v.cell_value(0.65, 0.1) - 1.0).abs() < 1e-15);
        assert!((v.support_radius() - 0.8).abs() < 1e-15);
        assert!(v.value_complex(C64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn gaps_are_filled() {
        let v = Potential1D::square_double_barrier(2.0, 0.3, 0.5);
        let p = v.contiguous_pieces().unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!((p[1].start, p[1].end, p[1].height), (-0.5, 0.5, 0.0));
    }

    #[test]
    fn rejects_overlap_and_serde_roundtrip() {
        let bad = Potential1D::PiecewiseConstant {
            intervals: vec![
                Interval { start: 0.0, end: 1.0, height: 1.0 },
                Interval { start: 0.5, end: 2.0, height: 1.0 },
            ],
        };
        assert!(bad.validate().is_err());
        let v = Potential1D::gaussian_double_barrier(1.0, 0.65, 0.15);
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("\"kind\":\"gaussian_barriers\""));
        assert_eq!(serde_json::from_str::<Potential1D>(&text).unwrap(), v);
    }
}
