//! Quantized open and damped baker maps.

mod baker;

pub use baker::{
    map_spectrum, quantize, quantize_damped_baker, quantize_open_baker, rank_count, MapKind, QuantumMapSpec,
};

use serde::{Deserialize, Serialize};

use crate::report::ext_f64;
use crate::spectral::C64;

/// One resonance with its decay rate and lifetime.
///
/// Map setting: `gamma = -ln|lambda|` per step. Hamiltonian setting:
/// `gamma = |Im z| / hbar`. In both cases `tau = 1 / (2 gamma)`, which is
/// `hbar / (2 |Im z|)` for Hamiltonians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resonance {
    pub re: f64,
    pub im: f64,
    #[serde(with = "ext_f64")]
    pub decay_rate: f64,
    #[serde(with = "ext_f64")]
    pub lifetime: f64,
}

fn lifetime(gamma: f64) -> f64 {
    if gamma > 0.0 {
        1.0 / (2.0 * gamma)
    } else {
        f64::INFINITY
    }
}

impl Resonance {
    pub fn from_map_eigenvalue(lambda: C64) -> Self {
        let gamma = -lambda.norm().ln();
        Resonance {
            re: lambda.re,
            im: lambda.im,
            decay_rate: gamma,
            lifetime: lifetime(gamma),
        }
    }

    pub fn from_energy(z: C64, hbar: f64) -> Self {
        let gamma = z.im.abs() / hbar;
        Resonance {
            re: z.re,
            im: z.im,
            decay_rate: gamma,
            lifetime: lifetime(gamma),
        }
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}
