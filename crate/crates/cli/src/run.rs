//! Task execution. Every task returns its report text; nothing here
//! touches the filesystem.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use wcl_core::analysis::{
    concentration_report, gap_report, ld_profile, weyl_fit, ConcentrationReport, CountProfile, GapReport,
    LdProfile, LD_CSV_HEADER,
};
use wcl_core::classical::{
    box_dimension, pressure, rate_function, rate_function_empirical, rate_function_legendre, trapped_set_sample,
    DampingField, OpenMapSpec, RateFunction, RateMethod,
};
use wcl_core::quantum::{map_spectrum, QuantumMapSpec};
use wcl_core::report::{csv_float, to_json_string, REPORT_SCHEMA};
use wcl_core::resonance::{
    build_hamiltonian_cap, build_hamiltonian_scaled, narrowest, resonance_csv, resonances_from_spectrum,
    transfer_matrix_resonances, Grid1D, ResonanceMethod, ResonanceRow, DEFAULT_MAX_WIDTH,
};
use wcl_core::spectral::SpectrumRecord;
use wcl_core::{Error, Result};

use crate::config::*;

/// Rendered report: primary JSON plus an optional CSV mirror.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub kind: &'static str,
    pub json: String,
    pub csv: Option<String>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    kind: &'static str,
    task: &'a Task,
    result: &'a T,
}

fn render<T: Serialize>(task: &Task, result: &T, csv: Option<String>) -> Rendered {
    let env = Envelope { schema: REPORT_SCHEMA, kind: task.kind(), task, result };
    Rendered { kind: task.kind(), json: to_json_string(&env), csv }
}

/// Spectra for every N of a ladder, one task per N, returned in ladder
/// order whatever the completion order.
pub fn ladder_spectra(specs: Vec<QuantumMapSpec>) -> Result<Vec<SpectrumRecord>> {
    specs.par_iter().map(map_spectrum).collect()
}

fn open_ladder(map: &OpenMapSpec, ladder: &[usize], phases: (f64, f64)) -> Vec<QuantumMapSpec> {
    ladder
        .iter()
        .map(|&n| QuantumMapSpec::open(map.clone(), n).with_phases(phases))
        .collect()
}

fn damped_ladder(damping: &DampingField, ladder: &[usize], phases: (f64, f64)) -> Result<Vec<QuantumMapSpec>> {
    ladder
        .iter()
        .map(|&n| Ok(QuantumMapSpec::damped(damping.clone(), n)?.with_phases(phases)))
        .collect()
}

fn spectrum_csv(rec: &SpectrumRecord) -> String {
    let mut out = String::from("re,im,modulus\n");
    for z in &rec.eigenvalues {
        out.push_str(&format!("{},{},{}\n", csv_float(z.re), csv_float(z.im), csv_float(z.norm())));
    }
    out
}

fn rate_csv(h: &RateFunction) -> String {
    let mut out = String::from("alpha,rate\n");
    for (a, v) in h.alphas.iter().zip(&h.values) {
        out.push_str(&format!("{},{}\n", csv_float(*a), csv_float(*v)));
    }
    out
}

fn rate_with(map: &OpenMapSpec, damping: &DampingField, alphas: &[f64], method: Option<RateMethod>) -> Result<RateFunction> {
    match method {
        None => rate_function(map, damping, alphas),
        Some(RateMethod::Legendre) => rate_function_legendre(map, damping, alphas),
        Some(RateMethod::Empirical { horizon }) => rate_function_empirical(map, damping, alphas, horizon),
    }
}

#[derive(Serialize)]
struct LdResult<'a> {
    rate_function: &'a RateFunction,
    profiles: &'a [LdProfile],
}

#[derive(Serialize)]
struct ResonanceResult<'a> {
    rows: &'a [ResonanceRow],
    warnings: &'a [String],
}

/// Runs one task. Parallel work goes to the current rayon pool.
pub fn run_task(task: &Task) -> Result<Rendered> {
    task.validate()?;
    match task {
        Task::ClassicalDim(t) => {
            let sample = trapped_set_sample(&t.map, t.depths.1, t.direction)?;
            let est = box_dimension(&sample, t.depths)?;
            let mut csv = String::from("ln_cell_size,ln_count\n");
            for (x, y) in &est.points {
                csv.push_str(&format!("{},{}\n", csv_float(*x), csv_float(*y)));
            }
            Ok(render(task, &est, Some(csv)))
        }
        Task::Pressure(t) => {
            let p = pressure(&t.map, t.s, t.damping.as_ref(), t.beta, t.truncation)?;
            Ok(render(task, &p, None))
        }
        Task::RateFunction(t) => {
            let h = rate_with(&t.map, &t.damping, &t.alphas, t.method)?;
            Ok(render(task, &h, Some(rate_csv(&h))))
        }
        Task::BakerSpectrum(t) => {
            let rec = map_spectrum(&t.spec())?;
            Ok(render(task, &rec, Some(spectrum_csv(&rec))))
        }
        Task::DampedSpectrum(t) => {
            let rec = map_spectrum(&t.spec()?)?;
            Ok(render(task, &rec, Some(spectrum_csv(&rec))))
        }
        Task::WeylFit(t) => {
            let recs = ladder_spectra(open_ladder(&t.map, &t.n_ladder, t.phases))?;
            let profile: CountProfile = weyl_fit(&recs, t.r)?;
            let csv = profile.csv();
            Ok(render(task, &profile, Some(csv)))
        }
        Task::GapReport(t) => {
            let (specs, beta) = match &t.damping {
                Some(d) => (damped_ladder(d, &t.n_ladder, t.phases)?, 1.0),
                None => (open_ladder(&t.map, &t.n_ladder, t.phases), 0.0),
            };
            let p = pressure(&t.map, 0.5, t.damping.as_ref(), beta, t.truncation)?;
            let recs = ladder_spectra(specs)?;
            let report: GapReport = gap_report(&recs, &p)?;
            let csv = report.csv();
            Ok(render(task, &report, Some(csv)))
        }
        Task::Concentration(t) => {
            let recs = ladder_spectra(damped_ladder(&t.damping, &t.n_ladder, t.phases)?)?;
            let report: ConcentrationReport = concentration_report(&recs, &t.damping, &t.epsilons)?;
            let csv = report.csv();
            Ok(render(task, &report, Some(csv)))
        }
        Task::LdProfile(t) => {
            let map = OpenMapSpec::closed(t.damping.branches())?;
            let h = rate_with(&map, &t.damping, &t.alphas, t.method)?;
            let recs = ladder_spectra(damped_ladder(&t.damping, &t.n_ladder, t.phases)?)?;
            let profiles = ld_profile(&recs, &h, &t.alphas)?;
            let mut csv = String::from(LD_CSV_HEADER);
            csv.push('\n');
            for p in &profiles {
                for row in p.csv_rows() {
                    csv.push_str(&row);
                    csv.push('\n');
                }
            }
            Ok(render(task, &LdResult { rate_function: &h, profiles: &profiles }, Some(csv)))
        }
        Task::Resonance1d(t) => {
            let (rows, warnings) = resonance_rows(t)?;
            let csv = resonance_csv(&rows);
            Ok(render(task, &ResonanceResult { rows: &rows, warnings: &warnings }, Some(csv)))
        }
    }
}

/// Resonance table of one method, plus soft-precondition warnings.
pub fn resonance_rows(t: &Resonance1dTask) -> Result<(Vec<ResonanceRow>, Vec<String>)> {
    let missing = |what: &str| Error::Domain(format!("method {} needs `{what}`", t.method.name()));
    let (resonances, n_grid, param, warnings) = match t.method {
        ResonanceMethod::Oracle => {
            let search = t.search.ok_or_else(|| missing("search"))?;
            (transfer_matrix_resonances(&t.potential, t.hbar, &search)?, None, None, Vec::new())
        }
        ResonanceMethod::Cap | ResonanceMethod::Scaling => {
            let g = t.grid.ok_or_else(|| missing("grid"))?;
            let grid = Grid1D::new(g.half_width, g.points, t.hbar)?;
            let (h, param) = if t.method == ResonanceMethod::Cap {
                let cap = t.cap.ok_or_else(|| missing("cap"))?;
                (build_hamiltonian_cap(&grid, &t.potential, &cap)?, cap.eta)
            } else {
                let theta = t.theta.ok_or_else(|| missing("theta"))?;
                (build_hamiltonian_scaled(&grid, &t.potential, theta)?, theta)
            };
            let rec = h.spectrum()?;
            let window = t.window.unwrap_or((0.0, t.potential.max_value()));
            let max_width = t.max_width.unwrap_or(DEFAULT_MAX_WIDTH);
            let res = resonances_from_spectrum(&rec, window, max_width, t.hbar);
            (res, Some(g.points), Some(param), h.warnings)
        }
    };
    let resonances = match t.narrowest {
        Some(k) => narrowest(&resonances, k),
        None => resonances,
    };
    let rows = resonances
        .into_iter()
        .map(|resonance| ResonanceRow { method: t.method, hbar: t.hbar, resonance, n_grid, theta_or_eta: param })
        .collect();
    Ok((rows, warnings))
}

/// Metadata kept out of the primary report so that reports stay
/// byte-identical between runs.
pub fn sidecar(kind: &str, task: &Task, threads: usize, unix_time: u64) -> Value {
    let task_value = serde_json::to_value(task).expect("tasks serialize");
    json!({
        "schema": REPORT_SCHEMA,
        "kind": kind,
        "task_hash": wcl_core::spectral::params_hash(&task_value),
        "threads": threads,
        "created_unix": unix_time,
        "version": env!("CARGO_PKG_VERSION"),
    })
}
