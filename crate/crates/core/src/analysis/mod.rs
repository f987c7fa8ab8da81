//! Counting functions, fractal Weyl fits, gap and concentration reports,
//! large-deviation profiles.
//!
//! Map-analog dictionary used throughout:
//! - `hbar` becomes `1/(2 pi N)`;
//! - the strip `-Im z / hbar in [0, alpha]` becomes the decay rate
//!   `-ln|lambda| in [0, alpha]`;
//! - `O(hbar^{-nu-0})` becomes a fitted exponent of `N`, checked with a
//!   one-sided tolerance;
//! - `d - 1` becomes `ln M`.

mod counting;
mod reports;

pub use counting::{
    count_moduli, ld_profile, weyl_fit, weyl_fit_with, CountEntry, CountProfile, FitWindow, LdProfile,
    LD_CSV_HEADER,
};
pub use reports::{
    concentration_report, gap_margin, gap_report, ConcentrationEntry, ConcentrationReport, GapEntry, GapReport,
    GapVerdict,
};

use crate::error::{Error, Result};
use crate::quantum::QuantumMapSpec;
use crate::spectral::SpectrumRecord;

/// The quantum map a record was built from, if its builder says so.
pub fn record_map_spec(rec: &SpectrumRecord) -> Option<QuantumMapSpec> {
    serde_json::from_value(rec.builder.get("spec")?.clone()).ok()
}

fn require_map_spec(rec: &SpectrumRecord) -> Result<QuantumMapSpec> {
    record_map_spec(rec).ok_or_else(|| {
        Error::domain(format!(
            "record of size {} carries no quantum-map builder metadata",
            rec.n
        ))
    })
}
