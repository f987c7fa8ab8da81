//! Experiment configs (`wcl-config-v1`).

use serde::{Deserialize, Serialize};

use wcl_core::classical::{DampingField, Direction, OpenMapSpec, RateMethod};
use wcl_core::quantum::QuantumMapSpec;
use wcl_core::resonance::{CapSpec, Potential1D, ResonanceMethod, SearchBox};
use wcl_core::{Error, Result};

pub const CONFIG_SCHEMA: &str = "wcl-config-v1";

fn default_phases() -> (f64, f64) {
    (0.0, 0.0)
}

fn is_zero_phases(p: &(f64, f64)) -> bool {
    *p == (0.0, 0.0)
}

/// A list of runs executed in order; reports are merged by position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    /// Requested parallelism; `WCL_THREADS` still caps it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub runs: Vec<Run>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    /// Report path (`.json`); the CSV mirror and metadata sidecar sit next
    /// to it. Relative paths resolve against the config file's directory.
    pub output: String,
    pub task: Task,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Domain(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != CONFIG_SCHEMA {
            return Err(Error::Domain(format!(
                "unsupported config schema {:?}, expected {CONFIG_SCHEMA:?}",
                self.schema
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::Domain("threads must be >= 1".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for run in &self.runs {
            if !seen.insert(run.output.as_str()) {
                return Err(Error::Domain(format!("output {:?} used by two runs", run.output)));
            }
            run.task.validate()?;
        }
        Ok(())
    }

    /// Canonical serialization; parsing it back gives the same config.
    pub fn normalized(&self) -> String {
        wcl_core::report::to_json_string(self)
    }
}

/// One experiment. `command` matches the CLI subcommand name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Task {
    ClassicalDim(ClassicalDimTask),
    Pressure(PressureTask),
    RateFunction(RateFunctionTask),
    BakerSpectrum(BakerSpectrumTask),
    DampedSpectrum(DampedSpectrumTask),
    WeylFit(WeylFitTask),
    GapReport(GapReportTask),
    Concentration(ConcentrationTask),
    LdProfile(LdProfileTask),
    #[serde(rename = "resonance-1d")]
    Resonance1d(Resonance1dTask),
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::ClassicalDim(_) => "classical-dim",
            Task::Pressure(_) => "pressure",
            Task::RateFunction(_) => "rate-function",
            Task::BakerSpectrum(_) => "baker-spectrum",
            Task::DampedSpectrum(_) => "damped-spectrum",
            Task::WeylFit(_) => "weyl-fit",
            Task::GapReport(_) => "gap-report",
            Task::Concentration(_) => "concentration",
            Task::LdProfile(_) => "ld-profile",
            Task::Resonance1d(_) => "resonance-1d",
        }
    }

    /// Cheap structural checks; numerical preconditions are left to the
    /// library calls.
    pub fn validate(&self) -> Result<()> {
        match self {
            Task::ClassicalDim(t) => t.map.validate(),
            Task::Pressure(t) => t.map.validate(),
            Task::RateFunction(t) => t.map.validate(),
            Task::BakerSpectrum(t) => t.spec().validate(),
            Task::DampedSpectrum(t) => t.spec()?.validate(),
            Task::WeylFit(t) => check_ladder(&t.n_ladder).and_then(|_| t.map.validate()),
            Task::GapReport(t) => {
                check_ladder(&t.n_ladder)?;
                t.map.validate()?;
                if t.damping.is_some() && !t.map.is_closed() {
                    return Err(Error::Domain("damped gap reports need the closed map".into()));
                }
                Ok(())
            }
            Task::Concentration(t) => check_ladder(&t.n_ladder),
            Task::LdProfile(t) => check_ladder(&t.n_ladder),
            Task::Resonance1d(t) => t.potential.validate(),
        }
    }
}

fn check_ladder(ladder: &[usize]) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::Domain("empty N ladder".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalDimTask {
    pub map: OpenMapSpec,
    /// Inclusive depth range of the box-counting fit.
    pub depths: (usize, usize),
    #[serde(default = "default_direction")]
    pub direction: Direction,
}

fn default_direction() -> Direction {
    Direction::Full
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureTask {
    pub map: OpenMapSpec,
    pub s: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<DampingField>,
    pub truncation: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateFunctionTask {
    pub map: OpenMapSpec,
    pub damping: DampingField,
    pub alphas: Vec<f64>,
    /// Defaults to Legendre for symbol-constant damping, empirical otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<RateMethod>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BakerSpectrumTask {
    pub map: OpenMapSpec,
    pub n: usize,
    #[serde(default = "default_phases", skip_serializing_if = "is_zero_phases")]
    pub phases: (f64, f64),
}

impl BakerSpectrumTask {
    pub fn spec(&self) -> QuantumMapSpec {
        QuantumMapSpec::open(self.map.clone(), self.n).with_phases(self.phases)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampedSpectrumTask {
    pub damping: DampingField,
    pub n: usize,
    #[serde(default = "default_phases", skip_serializing_if = "is_zero_phases")]
    pub phases: (f64, f64),
}

impl DampedSpectrumTask {
    pub fn spec(&self) -> Result<QuantumMapSpec> {
        Ok(QuantumMapSpec::damped(self.damping.clone(), self.n)?.with_phases(self.phases))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylFitTask {
    pub map: OpenMapSpec,
    pub r: f64,
    pub n_ladder: Vec<usize>,
    #[serde(default = "default_phases", skip_serializing_if = "is_zero_phases")]
    pub phases: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapReportTask {
    pub map: OpenMapSpec,
    /// Damped closed baker when present; the pressure then carries `beta = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<DampingField>,
    pub n_ladder: Vec<usize>,
    pub truncation: usize,
    #[serde(default = "default_phases", skip_serializing_if = "is_zero_phases")]
    pub phases: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationTask {
    pub damping: DampingField,
    pub n_ladder: Vec<usize>,
    pub epsilons: Vec<f64>,
    #[serde(default = "default_phases", skip_serializing_if = "is_zero_phases")]
    pub phases: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LdProfileTask {
    pub damping: DampingField,
    pub n_ladder: Vec<usize>,
    pub alphas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<RateMethod>,
    #[serde(default = "default_phases", skip_serializing_if = "is_zero_phases")]
    pub phases: (f64, f64),
}

/// Discretization parameters of the grid methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub half_width: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resonance1dTask {
    pub potential: Potential1D,
    pub hbar: f64,
    pub method: ResonanceMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<CapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Oracle search rectangle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchBox>,
    /// Real-part window for the grid methods; defaults to `(0, max V)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    /// Width cut in units of hbar.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_width: Option<f64>,
    /// Keep only the k narrowest resonances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub narrowest: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> &'static str {
        r#"{
  "schema": "wcl-config-v1",
  "threads": 2,
  "runs": [
    {"output": "w.json", "task": {"command": "weyl-fit", "map": {"branches": 3, "kept": [0, 2]}, "r": 0.5, "n_ladder": [27, 81, 243]}},
    {"output": "p.json", "task": {"command": "pressure", "map": {"branches": 5, "kept": [1, 3]}, "s": 0.5, "truncation": 20}},
    {"output": "r.json", "task": {"command": "resonance-1d", "potential": {"kind": "piecewise_constant", "intervals": [{"start": 0.5, "end": 0.8, "height": 1.0}]}, "hbar": 0.05, "method": "oracle", "search": {"re_min": 0.01, "re_max": 0.3, "im_min": -0.01, "im_max": 0.01}}}
  ]
}"#
    }

    #[test]
    fn round_trip_is_stable() {
        let cfg = ExperimentConfig::from_json(sample()).unwrap();
        let once = cfg.normalized();
        let again = ExperimentConfig::from_json(&once).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.normalized(), once);
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = sample().replace("\"r\": 0.5", "\"r\": 0.5, \"radius\": 1");
        assert!(ExperimentConfig::from_json(&bad).is_err());
        let bad = sample().replace("\"threads\": 2", "\"threads\": 2, \"extra\": true");
        assert!(ExperimentConfig::from_json(&bad).is_err());
        let bad = sample().replace("weyl-fit", "weyl-fits");
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn schema_checked() {
        let bad = sample().replace("wcl-config-v1", "wcl-config-v0");
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn duplicate_outputs_rejected() {
        let bad = sample().replace("p.json", "w.json");
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }
}
