use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::spectral::matrix::{ComplexMatrix, C64};

/// Sign of the exponent in the transform kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DftSign {
    /// `exp(-2 pi i j k / n)`
    Forward,
    /// `exp(+2 pi i j k / n)`
    Inverse,
}

/// Unitary DFT matrix `(1/sqrt n) exp(-+2 pi i (j+a)(k+b)/n)`.
///
/// `phases = (a, b)` shifts the row and column lattices; `(0, 0)` is the
/// plain DFT. The integer part of the phase `j k mod n` is reduced exactly
/// before converting to an angle, so large `n` keeps full accuracy.
pub fn dft_matrix_with_phases(n: usize, sign: DftSign, phases: (f64, f64)) -> ComplexMatrix {
    let norm = 1.0 / (n as f64).sqrt();
    let s = match sign {
        DftSign::Forward => -1.0,
        DftSign::Inverse => 1.0,
    };
    let (a, b) = phases;
    let nf = n as f64;
    ComplexMatrix::from_fn(n, |j, k| {
        let int_part = ((j as u128 * k as u128) % n as u128) as f64;
        let frac_part = j as f64 * b + a * k as f64 + a * b;
        let turns = (int_part + frac_part) / nf;
        let turns = turns - turns.floor();
        C64::from_polar(norm, s * 2.0 * PI * turns)
    })
}

/// Unitary DFT matrix with zero phases.
pub fn dft_matrix(n: usize, sign: DftSign) -> ComplexMatrix {
    dft_matrix_with_phases(n, sign, (0.0, 0.0))
}
