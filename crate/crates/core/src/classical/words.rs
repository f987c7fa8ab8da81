//! Enumeration of admissible words (equivalently, periodic orbits of the
//! open map) in lexicographic order.

use crate::classical::map::{DampingField, OpenMapSpec};
use crate::error::{Error, Result};

/// Default cap on the number of words a single enumeration may visit.
pub const DEFAULT_WORD_CAP: u128 = 10_000_000;

pub(crate) fn word_count(map: &OpenMapSpec, len: usize) -> Option<u128> {
    let d = map.kept_count() as u128;
    let mut acc: u128 = 1;
    for _ in 0..len {
        acc = acc.checked_mul(d)?;
    }
    Some(acc)
}

pub(crate) fn check_cap(map: &OpenMapSpec, len: usize, cap: u128, what: &'static str) -> Result<u128> {
    let required = word_count(map, len).unwrap_or(u128::MAX);
    if required > cap {
        return Err(Error::Capacity { what, required, cap });
    }
    Ok(required)
}

/// Calls `f` with the damping summed along every admissible periodic orbit
/// of period `len`, words visited in lexicographic order.
///
/// Symbol-constant damping is summed strip by strip. A sampled profile is
/// evaluated at the exact orbit points `x_t = rot^t(W) / (M^len - 1)`,
/// where `W` is the word read as a base-M integer.
pub(crate) fn for_each_orbit_sum(
    map: &OpenMapSpec,
    damping: &DampingField,
    len: usize,
    mut f: impl FnMut(f64),
) -> Result<()> {
    let m = map.branches();
    let kept = map.kept();
    let d = kept.len();
    let mut digits = vec![0usize; len];
    let profile = !damping.is_symbol_constant();
    let modulus = if profile {
        let bits = len as f64 * (m as f64).log2();
        if bits > 126.0 {
            return Err(Error::domain(format!(
                "period {len} too long for exact orbit points with M = {m}"
            )));
        }
        (m as u128).pow(len as u32)
    } else {
        0
    };
    let strips = damping.strip_values();
    loop {
        let total = if profile {
            let mut w: u128 = 0;
            for &k in &digits {
                w = w * m as u128 + kept[k] as u128;
            }
            let denom = (modulus - 1) as f64;
            let high = modulus / m as u128;
            let mut sum = 0.0;
            for _ in 0..len {
                sum += damping.value_at(w as f64 / denom);
                // Rotate left by one digit.
                let lead = w / high;
                w = (w % high) * m as u128 + lead;
            }
            sum
        } else {
            digits.iter().map(|&k| strips[kept[k]]).sum()
        };
        f(total);

        // Odometer increment; done once it wraps around.
        let mut pos = len;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < d {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_sums_symbol_constant() {
        let map = OpenMapSpec::new(3, vec![0, 2]).unwrap();
        let b = DampingField::symbol_constant(vec![0.0, 5.0, 1.0]).unwrap();
        let mut got = Vec::new();
        for_each_orbit_sum(&map, &b, 2, |s| got.push(s)).unwrap();
        assert_eq!(got, vec![0.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn profile_orbit_points() {
        // Fixed points of x -> 2x mod 1 are 0 (word "0") and 1 == 0 (word "1").
        let map = OpenMapSpec::closed(2).unwrap();
        let b = DampingField::sampled(2, vec![0.0, 1.0, 2.0, 1.0]).unwrap();
        let mut got = Vec::new();
        for_each_orbit_sum(&map, &b, 1, |s| got.push(s)).unwrap();
        assert_eq!(got, vec![0.0, 0.0]);
        // Period 2: orbit {1/3, 2/3}.
        got.clear();
        for_each_orbit_sum(&map, &b, 2, |s| got.push(s)).unwrap();
        let expect = b.value_at(1.0 / 3.0) + b.value_at(2.0 / 3.0);
        assert!((got[1] - expect).abs() < 1e-15);
        assert!((got[2] - expect).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-17);
        }
        assert!((s.total() - (1.0 + 1e-14)).abs() < 1e-16);
    }
}
