use serde::{Deserialize, Serialize};

use crate::classical::map::{DampingField, OpenMapSpec};
use crate::classical::words::{check_cap, for_each_orbit_sum, word_count, CompensatedSum, DEFAULT_WORD_CAP};
use crate::error::{Error, Result};
use crate::report::ext_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureMethod {
    /// Explicit sum over every admissible word of length T.
    Enumeration,
    /// Trace of the T-th power of the symbolic transfer matrix.
    TransferOperator,
    /// Sum over periodic orbits with damping sampled at the orbit points.
    PeriodicOrbits,
}

/// `P(-s phi_u - beta b)` estimated from an orbit sum of length `truncation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureEstimate {
    pub map: OpenMapSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<DampingField>,
    pub weight: String,
    pub s: f64,
    pub beta: f64,
    pub truncation: usize,
    #[serde(with = "ext_f64")]
    pub value: f64,
    #[serde(default, with = "ext_f64::option", skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<f64>,
    pub method: PressureMethod,
}

impl PressureEstimate {
    /// `T * |value - closed form|`, the constant in the O(1/T) error.
    pub fn observed_constant(&self) -> Option<f64> {
        self.closed_form
            .map(|p| self.truncation as f64 * (self.value - p).abs())
    }
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let top = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = CompensatedSum::default();
    for x in xs {
        acc.add((x - top).exp());
    }
    top + acc.total().ln()
}

/// Per-symbol log weights `-s ln M - beta b_i` over the kept branches.
fn symbol_weights(map: &OpenMapSpec, s: f64, damping: Option<&DampingField>, beta: f64) -> Vec<f64> {
    let ln_m = map.unstable_jacobian();
    map.kept()
        .iter()
        .map(|&i| {
            let b = damping.map_or(0.0, |d| d.strip_values()[i]);
            // 0 * b stays 0 even for beta = 0.
            let damp = if beta == 0.0 { 0.0 } else { beta * b };
            -s * ln_m - damp
        })
        .collect()
}

/// `ln sum_{i in kept} M^-s e^{-beta b_i}`: exact pressure for
/// symbol-constant weights.
pub fn closed_form_pressure(
    map: &OpenMapSpec,
    s: f64,
    damping: Option<&DampingField>,
    beta: f64,
) -> Result<f64> {
    check_inputs(map, s, damping, beta)?;
    if damping.is_some_and(|d| !d.is_symbol_constant()) {
        return Err(Error::Unsupported(
            "closed-form pressure needs symbol-constant damping".into(),
        ));
    }
    let w = symbol_weights(map, s, damping, beta);
    Ok(log_sum_exp(w.iter().copied()))
}

fn check_inputs(map: &OpenMapSpec, s: f64, damping: Option<&DampingField>, beta: f64) -> Result<()> {
    map.validate()?;
    if !s.is_finite() || !beta.is_finite() {
        return Err(Error::domain("weight coefficients must be finite"));
    }
    if let Some(d) = damping {
        d.validate()?;
        d.check_compatible(map)?;
    }
    Ok(())
}

/// Topological pressure of the weight `-s phi_u - beta b` from the sum
/// over admissible periodic words of length `t`.
pub fn pressure(
    map: &OpenMapSpec,
    s: f64,
    damping: Option<&DampingField>,
    beta: f64,
    t: usize,
) -> Result<PressureEstimate> {
    pressure_with_cap(map, s, damping, beta, t, DEFAULT_WORD_CAP)
}

pub fn pressure_with_cap(
    map: &OpenMapSpec,
    s: f64,
    damping: Option<&DampingField>,
    beta: f64,
    t: usize,
    cap: u128,
) -> Result<PressureEstimate> {
    check_inputs(map, s, damping, beta)?;
    if t == 0 {
        return Err(Error::domain("orbit length T must be >= 1"));
    }
    let weight = format!("-{s}*phi_u - {beta}*b");
    let symbol_constant = damping.map_or(true, |d| d.is_symbol_constant());
    let tf = t as f64;

    let (log_sum, method) = if !symbol_constant {
        let damping = damping.expect("profile implies damping");
        check_cap(map, t, cap, "periodic orbits")?;
        let base = -s * tf * map.unstable_jacobian();
        let mut sums = Vec::new();
        for_each_orbit_sum(map, damping, t, |b| sums.push(base - beta * b))?;
        (log_sum_exp(sums.iter().copied()), PressureMethod::PeriodicOrbits)
    } else {
        let w = symbol_weights(map, s, damping, beta);
        let fits = word_count(map, t).is_some_and(|c| c <= cap);
        if fits {
            (enumerate(&w, t), PressureMethod::Enumeration)
        } else {
            (transfer_trace(&w, t), PressureMethod::TransferOperator)
        }
    };

    let closed_form = if symbol_constant {
        Some(closed_form_pressure(map, s, damping, beta)?)
    } else {
        None
    };
    Ok(PressureEstimate {
        map: map.clone(),
        damping: damping.cloned(),
        weight,
        s,
        beta,
        truncation: t,
        value: log_sum / tf,
        closed_form,
        method,
    })
}

/// `ln sum_{words} exp(sum_t w[word_t])` by depth-first enumeration. The
/// shift by the maximal word weight keeps every term in (0, 1].
fn enumerate(w: &[f64], t: usize) -> f64 {
    let top = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let shifted: Vec<f64> = w.iter().map(|x| x - top).collect();
    fn dfs(shifted: &[f64], depth: usize, acc: f64, out: &mut CompensatedSum) {
        if depth == 0 {
            out.add(acc.exp());
            return;
        }
        for &x in shifted {
            dfs(shifted, depth - 1, acc + x, out);
        }
    }
    let mut out = CompensatedSum::default();
    dfs(&shifted, t, 0.0, &mut out);
    top * t as f64 + out.total().ln()
}

/// `ln tr(L^t)` with `L_ij = exp(w_j)` (full shift on the kept symbols),
/// by repeated squaring with a running log scale.
fn transfer_trace(w: &[f64], t: usize) -> f64 {
    let d = w.len();
    let top = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let l: Vec<f64> = (0..d * d).map(|k| (w[k % d] - top).exp()).collect();
    let mul = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let aik = a[i * d + k];
                for j in 0..d {
                    c[i * d + j] += aik * b[k * d + j];
                }
            }
        }
        c
    };
    let normalize = |a: &mut Vec<f64>| -> f64 {
        let m = a.iter().copied().fold(0.0, f64::max);
        for x in a.iter_mut() {
            *x /= m;
        }
        m.ln()
    };
    let mut result: Vec<f64> = (0..d * d).map(|k| if k % (d + 1) == 0 { 1.0 } else { 0.0 }).collect();
    let mut result_log = 0.0;
    let mut base = l;
    let mut base_log = 0.0;
    let mut e = t;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base);
            result_log += base_log + normalize(&mut result);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
            base_log = 2.0 * base_log + normalize(&mut base);
        }
    }
    let trace: f64 = (0..d).map(|i| result[i * d + i]).sum();
    top * t as f64 + result_log + trace.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(m: usize, keep: &[usize]) -> OpenMapSpec {
        OpenMapSpec::new(m, keep.to_vec()).unwrap()
    }

    #[test]
    fn entropy_of_full_shift() {
        let p = pressure(&map(3, &[0, 1, 2]), 0.0, None, 0.0, 10).unwrap();
        assert!((p.value - 3f64.ln()).abs() < 1e-13);
        assert_eq!(p.method, PressureMethod::Enumeration);
    }

    #[test]
    fn half_jacobian_examples() {
        let p = pressure(&map(3, &[0, 2]), 0.5, None, 0.0, 12).unwrap();
        let expect = 2f64.ln() - 0.5 * 3f64.ln();
        assert!((p.value - expect).abs() < 1e-13);
        assert!((p.value - 0.1438).abs() < 1e-4);

        let p = pressure(&map(5, &[1, 3]), 0.5, None, 0.0, 12).unwrap();
        let expect = 2f64.ln() - 0.5 * 5f64.ln();
        assert!((p.value - expect).abs() < 1e-13);
        assert!((p.value + 0.1116).abs() < 1e-4);
    }

    #[test]
    fn transfer_route_agrees_with_enumeration() {
        let m = map(4, &[0, 1, 3]);
        let b = DampingField::symbol_constant(vec![0.2, 0.0, 3.0, 1.1]).unwrap();
        let small = pressure_with_cap(&m, 0.3, Some(&b), 0.7, 9, 10).unwrap();
        assert_eq!(small.method, PressureMethod::TransferOperator);
        let big = pressure(&m, 0.3, Some(&b), 0.7, 9).unwrap();
        assert_eq!(big.method, PressureMethod::Enumeration);
        assert!((small.value - big.value).abs() < 1e-13);
        assert!((big.value - big.closed_form.unwrap()).abs() < 1e-13);
    }

    #[test]
    fn damped_two_branch_closed_form() {
        let m = OpenMapSpec::closed(2).unwrap();
        let c = 4.0;
        let b = DampingField::symbol_constant(vec![0.0, c]).unwrap();
        let p = pressure(&m, 0.5, Some(&b), 1.0, 16).unwrap();
        let expect = (2f64.powf(-0.5) * (1.0 + (-c as f64).exp())).ln();
        assert!((p.value - expect).abs() < 1e-13);
        assert!(p.value < 0.0);
    }

    #[test]
    fn profile_route_reduces_to_strips_for_flat_profile() {
        let m = OpenMapSpec::closed(2).unwrap();
        let b = DampingField::sampled(2, vec![0.7; 8]).unwrap();
        let p = pressure(&m, 0.0, Some(&b), 1.0, 10).unwrap();
        assert_eq!(p.method, PressureMethod::PeriodicOrbits);
        assert!(p.closed_form.is_none());
        assert!((p.value - (2f64.ln() - 0.7)).abs() < 1e-12);
    }

    #[test]
    fn underflowing_weights_give_minus_infinity() {
        let m = OpenMapSpec::new(2, vec![1]).unwrap();
        let b = DampingField::symbol_constant(vec![0.0, f64::MAX]).unwrap();
        let p = pressure(&m, 0.0, Some(&b), 10.0, 3).unwrap();
        assert_eq!(p.value, f64::NEG_INFINITY);
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"-inf\""));
    }

    #[test]
    fn errors() {
        assert!(pressure(&map(3, &[0]), 0.0, None, 0.0, 0).is_err());
        let b = DampingField::symbol_constant(vec![0.0, 1.0]).unwrap();
        assert!(pressure(&map(3, &[0]), 0.0, Some(&b), 1.0, 2).is_err());
        let prof = DampingField::sampled(2, vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            pressure_with_cap(&OpenMapSpec::closed(2).unwrap(), 0.0, Some(&prof), 1.0, 30, 1000),
            Err(Error::Capacity { .. })
        ));
    }
}
