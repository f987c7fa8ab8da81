use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wcl_cli::config::*;
use wcl_cli::output::CliError;
use wcl_cli::{run_config_file, run_single};
use wcl_core::classical::{DampingField, Direction, OpenMapSpec, RateMethod, DEFAULT_EMPIRICAL_HORIZON};
use wcl_core::resonance::{CapSpec, Potential1D, ResonanceMethod, SearchBox};

#[derive(Parser)]
#[command(name = "wcl", version, about = "Resonance counting, pressures and gaps for open and damped baker maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Box-counting dimension of the trapped set.
    ClassicalDim {
        #[command(flatten)]
        map: MapArgs,
        /// Inclusive depth range, e.g. 1..8
        #[arg(long, value_parser = parse_range)]
        depths: (usize, usize),
        #[arg(long, value_enum, default_value = "full")]
        direction: DirectionArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Topological pressure P(-s phi_u - beta b).
    Pressure {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[command(flatten)]
        damping: OptDampingArgs,
        /// Orbit length.
        #[arg(long = "T")]
        truncation: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Large-deviation rate function of the damping averages.
    RateFunction {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        damping: DampingArgs,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        alphas: Vec<f64>,
        #[command(flatten)]
        method: RateMethodArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Spectrum of the quantized open baker.
    BakerSpectrum {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long = "N")]
        n: usize,
        #[command(flatten)]
        phases: PhaseArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Spectrum of the damped closed baker.
    DampedSpectrum {
        #[command(flatten)]
        damping: DampingArgs,
        #[arg(long = "N")]
        n: usize,
        #[command(flatten)]
        phases: PhaseArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fractal Weyl exponent fit over an N ladder.
    WeylFit {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        r: f64,
        #[arg(long = "N-ladder", value_delimiter = ',', required = true)]
        n_ladder: Vec<usize>,
        #[command(flatten)]
        phases: PhaseArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Outer eigenvalue moduli against the pressure bound.
    GapReport {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        damping: OptDampingArgs,
        #[arg(long = "N-ladder", value_delimiter = ',', required = true)]
        n_ladder: Vec<usize>,
        /// Orbit length of the pressure estimate.
        #[arg(long = "T", default_value_t = 20)]
        truncation: usize,
        #[command(flatten)]
        phases: PhaseArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Concentration of decay rates near the mean damping.
    Concentration {
        #[command(flatten)]
        damping: DampingArgs,
        #[arg(long = "N-ladder", value_delimiter = ',', required = true)]
        n_ladder: Vec<usize>,
        #[arg(long = "eps", value_delimiter = ',', required = true)]
        epsilons: Vec<f64>,
        #[command(flatten)]
        phases: PhaseArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Counting profiles of decay rates below alpha.
    LdProfile {
        #[command(flatten)]
        damping: DampingArgs,
        #[arg(long = "N-ladder", value_delimiter = ',', required = true)]
        n_ladder: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        alphas: Vec<f64>,
        #[command(flatten)]
        method: RateMethodArgs,
        #[command(flatten)]
        phases: PhaseArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Resonances of a 1D barrier potential.
    #[command(name = "resonance-1d")]
    Resonance1d(Box<ResonanceArgs>),
    /// Runs every task of a config file.
    Sweep {
        config: PathBuf,
    },
}

#[derive(Args)]
struct OutArgs {
    /// Report path; the JSON goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MapArgs {
    /// Number of branches.
    #[arg(long = "M")]
    m: usize,
    /// Kept branches (default: all).
    #[arg(long, value_delimiter = ',')]
    keep: Option<Vec<usize>>,
}

impl MapArgs {
    fn spec(&self) -> wcl_core::Result<OpenMapSpec> {
        match &self.keep {
            Some(k) => OpenMapSpec::new(self.m, k.clone()),
            None => OpenMapSpec::closed(self.m),
        }
    }
}

#[derive(Args)]
struct DampingArgs {
    /// Damping value on each strip.
    #[arg(long, value_delimiter = ',', required_unless_present = "damping_profile")]
    damping: Option<Vec<f64>>,
    /// Periodic damping profile samples (needs --branches).
    #[arg(long, value_delimiter = ',', conflicts_with = "damping", requires = "branches")]
    damping_profile: Option<Vec<f64>>,
    /// Branch count for a sampled profile.
    #[arg(long)]
    branches: Option<usize>,
}

impl DampingArgs {
    fn field(&self) -> wcl_core::Result<DampingField> {
        match (&self.damping, &self.damping_profile, self.branches) {
            (Some(b), _, _) => DampingField::symbol_constant(b.clone()),
            (None, Some(p), Some(m)) => DampingField::sampled(m, p.clone()),
            _ => Err(wcl_core::Error::Domain("give --damping or --damping-profile with --branches".into())),
        }
    }
}

#[derive(Args)]
struct OptDampingArgs {
    /// Damping value on each strip.
    #[arg(long, value_delimiter = ',')]
    damping: Option<Vec<f64>>,
    /// Periodic damping profile samples (branch count from --M).
    #[arg(long, value_delimiter = ',', conflicts_with = "damping")]
    damping_profile: Option<Vec<f64>>,
}

impl OptDampingArgs {
    fn field(&self, branches: usize) -> wcl_core::Result<Option<DampingField>> {
        match (&self.damping, &self.damping_profile) {
            (Some(b), _) => DampingField::symbol_constant(b.clone()).map(Some),
            (None, Some(p)) => DampingField::sampled(branches, p.clone()).map(Some),
            (None, None) => Ok(None),
        }
    }
}

#[derive(Args)]
struct PhaseArgs {
    /// Lattice shifts a,b of the quantization.
    #[arg(long, value_delimiter = ',', num_args = 1, value_parser = clap::value_parser!(f64))]
    phases: Option<Vec<f64>>,
}

impl PhaseArgs {
    fn get(&self) -> wcl_core::Result<(f64, f64)> {
        match self.phases.as_deref() {
            None => Ok((0.0, 0.0)),
            Some([a, b]) => Ok((*a, *b)),
            Some(_) => Err(wcl_core::Error::Domain("--phases takes two values a,b".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RateMethodArg {
    Legendre,
    Empirical,
}

#[derive(Args)]
struct RateMethodArgs {
    #[arg(long, value_enum)]
    method: Option<RateMethodArg>,
    /// Word length of the empirical estimate.
    #[arg(long, default_value_t = DEFAULT_EMPIRICAL_HORIZON)]
    horizon: usize,
}

impl RateMethodArgs {
    fn get(&self) -> Option<RateMethod> {
        self.method.map(|m| match m {
            RateMethodArg::Legendre => RateMethod::Legendre,
            RateMethodArg::Empirical => RateMethod::Empirical { horizon: self.horizon },
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Cap,
    Scaling,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum PotentialArg {
    GaussianDouble,
    SquareDouble,
}

#[derive(Args)]
struct ResonanceArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long, value_enum, required_unless_present = "potential_file")]
    potential: Option<PotentialArg>,
    /// Potential as JSON, instead of --potential.
    #[arg(long, conflicts_with = "potential")]
    potential_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    height: f64,
    /// Barrier width (gaussian width parameter or square width).
    #[arg(long, default_value_t = 0.15)]
    width: f64,
    /// Gaussian barrier centre.
    #[arg(long, default_value_t = 0.65)]
    center: f64,
    /// Inner edge of the square barriers.
    #[arg(long, default_value_t = 0.5)]
    inner: f64,
    #[arg(long)]
    hbar: f64,
    /// Grid half-width.
    #[arg(long = "L")]
    half_width: Option<f64>,
    /// Grid points.
    #[arg(long = "n")]
    points: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    /// CAP onset radius.
    #[arg(long)]
    cap_onset: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// Oracle box re_min,re_max,im_min,im_max.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    search: Option<Vec<f64>>,
    /// Real-part window lo,hi.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    window: Option<Vec<f64>>,
    /// Width cut in units of hbar.
    #[arg(long)]
    max_width: Option<f64>,
    #[arg(long)]
    narrowest: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

impl ResonanceArgs {
    fn task(&self) -> Result<Resonance1dTask, CliError> {
        let potential = match (&self.potential_file, self.potential) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<Potential1D>(&text)
                    .map_err(|e| CliError::Config(format!("invalid potential: {e}")))?
            }
            (None, Some(PotentialArg::GaussianDouble)) => {
                Potential1D::gaussian_double_barrier(self.height, self.center, self.width)
            }
            (None, Some(PotentialArg::SquareDouble)) => {
                Potential1D::square_double_barrier(self.height, self.width, self.inner)
            }
            (None, None) => return Err(CliError::Config("no potential given".into())),
        };
        let method = match self.method {
            MethodArg::Cap => ResonanceMethod::Cap,
            MethodArg::Scaling => ResonanceMethod::Scaling,
            MethodArg::Oracle => ResonanceMethod::Oracle,
        };
        let grid = match (self.half_width, self.points) {
            (Some(half_width), Some(points)) => Some(GridParams { half_width, points }),
            (None, None) => None,
            _ => return Err(CliError::Config("--L and --n go together".into())),
        };
        let cap = self.eta.map(|eta| CapSpec::quadratic(eta, self.cap_onset.unwrap_or_else(|| potential.support_radius())));
        let search = match self.search.as_deref() {
            None => None,
            Some([a, b, c, d]) => Some(SearchBox::new(*a, *b, *c, *d)),
            Some(_) => return Err(CliError::Config("--search takes four values".into())),
        };
        let window = match self.window.as_deref() {
            None => None,
            Some([a, b]) => Some((*a, *b)),
            Some(_) => return Err(CliError::Config("--window takes two values".into())),
        };
        Ok(Resonance1dTask {
            potential,
            hbar: self.hbar,
            method,
            grid,
            cap,
            theta: self.theta,
            search,
            window,
            max_width: self.max_width,
            narrowest: self.narrowest,
        })
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    let (task, out) = match cmd {
        Command::Sweep { config } => {
            for p in run_config_file(&config)? {
                eprintln!("wrote {}", p.display());
            }
            return Ok(());
        }
        Command::ClassicalDim { map, depths, direction, out } => {
            let direction = match direction {
                DirectionArg::Forward => Direction::Forward,
                DirectionArg::Backward => Direction::Backward,
                DirectionArg::Full => Direction::Full,
            };
            (Task::ClassicalDim(ClassicalDimTask { map: map.spec()?, depths, direction }), out)
        }
        Command::Pressure { map, s, beta, damping, truncation, out } => {
            let damping = damping.field(map.m)?;
            (Task::Pressure(PressureTask { map: map.spec()?, s, beta, damping, truncation }), out)
        }
        Command::RateFunction { map, damping, alphas, method, out } => (
            Task::RateFunction(RateFunctionTask { map: map.spec()?, damping: damping.field()?, alphas, method: method.get() }),
            out,
        ),
        Command::BakerSpectrum { map, n, phases, out } => {
            (Task::BakerSpectrum(BakerSpectrumTask { map: map.spec()?, n, phases: phases.get()? }), out)
        }
        Command::DampedSpectrum { damping, n, phases, out } => {
            (Task::DampedSpectrum(DampedSpectrumTask { damping: damping.field()?, n, phases: phases.get()? }), out)
        }
        Command::WeylFit { map, r, n_ladder, phases, out } => {
            (Task::WeylFit(WeylFitTask { map: map.spec()?, r, n_ladder, phases: phases.get()? }), out)
        }
        Command::GapReport { map, damping, n_ladder, truncation, phases, out } => {
            let damping = damping.field(map.m)?;
            (
                Task::GapReport(GapReportTask { map: map.spec()?, damping, n_ladder, truncation, phases: phases.get()? }),
                out,
            )
        }
        Command::Concentration { damping, n_ladder, epsilons, phases, out } => (
            Task::Concentration(ConcentrationTask { damping: damping.field()?, n_ladder, epsilons, phases: phases.get()? }),
            out,
        ),
        Command::LdProfile { damping, n_ladder, alphas, method, phases, out } => (
            Task::LdProfile(LdProfileTask {
                damping: damping.field()?,
                n_ladder,
                alphas,
                method: method.get(),
                phases: phases.get()?,
            }),
            out,
        ),
        Command::Resonance1d(args) => (Task::Resonance1d(args.task()?), args.out),
    };
    run_single(&task, out.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
