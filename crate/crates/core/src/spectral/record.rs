use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::report;
use crate::spectral::matrix::C64;

/// Full eigenvalue list of one matrix plus what built it.
///
/// Eigenvalues are always held in canonical order: descending modulus, ties
/// broken by descending real part and then descending imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumRecord {
    pub n: usize,
    pub builder: Value,
    pub params_hash: String,
    #[serde(with = "pairs")]
    pub eigenvalues: Vec<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

/// Optional residual checks recorded next to a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    /// `|sum lambda - tr A| / (n max|A_ij|)`.
    pub trace_residual: f64,
    pub qr_sweeps: Option<usize>,
}

pub fn canonical_cmp(a: &C64, b: &C64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then_with(|| b.re.total_cmp(&a.re))
        .then_with(|| b.im.total_cmp(&a.im))
}

/// SHA-256 of the canonical JSON text of `params`, hex encoded.
pub fn params_hash(params: &Value) -> String {
    let text = serde_json::to_string(params).expect("JSON value always serializes");
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl SpectrumRecord {
    pub fn new(mut eigenvalues: Vec<C64>, builder: Value) -> Self {
        eigenvalues.sort_by(canonical_cmp);
        SpectrumRecord {
            n: eigenvalues.len(),
            params_hash: params_hash(&builder),
            builder,
            eigenvalues,
            diagnostics: None,
        }
    }

    pub fn with_builder(mut self, builder: Value) -> Self {
        self.params_hash = params_hash(&builder);
        self.builder = builder;
        self
    }

    pub fn moduli(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues.iter().map(|z| z.norm())
    }

    pub fn to_json(&self) -> String {
        report::to_json_string(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: SpectrumRecord = serde_json::from_str(text)
            .map_err(|e| Error::domain(format!("invalid spectrum record: {e}")))?;
        if rec.eigenvalues.len() != rec.n {
            return Err(Error::domain(format!(
                "record declares n = {} but lists {} eigenvalues",
                rec.n,
                rec.eigenvalues.len()
            )));
        }
        Ok(rec)
    }
}

/// Largest eigenvalue modulus; 0 for an empty record.
pub fn spectral_radius(rec: &SpectrumRecord) -> f64 {
    rec.moduli().fold(0.0, f64::max)
}

mod pairs {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::C64;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}
