//! `kapitza` — atomic diffraction from a pulsed standing-wave lattice.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical-health abort.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kapitza_cli::emit::{self, EmitError};
use kapitza_cli::manifest::{self, ManifestError};
use kapitza_cli::regime::{classify_regime, RegimeError};
use kapitza_cli::sweep::{
    auto_m_max, linear_tau_values, run_point, sweep_tau, MethodChoice, PointError, SweepSettings,
};
use kapitza::analytic::default_m_max;
use kapitza::propagator::max_binnable_order;
use kapitza::{DetuningSign, GridSpec, PulseShape, SimParams};

#[derive(Parser)]
#[command(
    name = "kapitza",
    version,
    about = "Atomic diffraction from counter-propagating light pulses",
    long_about = "Simulates an atom crossing a pulsed standing-wave lattice and reports \
                  the populations of the diffraction orders p0 + 2m, alongside the plain \
                  and Doppler-corrected thin-grating expansions."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one pulse and print the order populations
    Run(Box<RunArgs>),
    /// Scan pulse durations; one propagated run per point
    Sweep(Box<SweepArgs>),
    /// Tabulate the dynamical regime over a log-spaced (q, tau_r) lattice
    RegimeMap(RegimeMapArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PulseArg {
    Gaussian,
    Cos2,
}

impl From<PulseArg> for PulseShape {
    fn from(arg: PulseArg) -> Self {
        match arg {
            PulseArg::Gaussian => PulseShape::Gaussian,
            PulseArg::Cos2 => PulseShape::CosSquared,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DetuningArg {
    Positive,
    Negative,
}

impl From<DetuningArg> for DetuningSign {
    fn from(arg: DetuningArg) -> Self {
        match arg {
            DetuningArg::Positive => DetuningSign::Positive,
            DetuningArg::Negative => DetuningSign::Negative,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum HeatmapMethod {
    Numeric,
    PlainRn,
    ModifiedRn,
}

impl From<HeatmapMethod> for MethodChoice {
    fn from(arg: HeatmapMethod) -> Self {
        match arg {
            HeatmapMethod::Numeric => MethodChoice::Numeric,
            HeatmapMethod::PlainRn => MethodChoice::Plain,
            HeatmapMethod::ModifiedRn => MethodChoice::Modified,
        }
    }
}

#[derive(Args)]
struct BeamArgs {
    /// Initial momentum in photon recoils
    #[arg(long, default_value_t = 0.0)]
    p0: f64,
    /// Pulse envelope shape
    #[arg(long, value_enum, default_value_t = PulseArg::Gaussian)]
    pulse: PulseArg,
    /// Sign of the laser detuning (lattice wells vs. barriers)
    #[arg(long, value_enum, default_value_t = DetuningArg::Positive)]
    detuning: DetuningArg,
}

#[derive(Args)]
struct GridArgs {
    /// Lattice periods in the periodic box (box length n_periods * pi / k)
    #[arg(long, default_value_t = 64)]
    n_periods: usize,
    /// Grid points per period; doubles as the momentum cutoff in recoils
    #[arg(long, default_value_t = 32)]
    points_per_period: usize,
    /// Wavepacket waist in units of 1/k
    #[arg(long, default_value_t = 10.0)]
    sigma: f64,
}

#[derive(Args)]
struct NumericsArgs {
    /// Time step; defaults to the phase-advance policy
    #[arg(long)]
    dt: Option<f64>,
    /// Largest binned order; defaults to the analytic comb width, capped by
    /// the grid
    #[arg(long)]
    m_max: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    /// Dimensionless pulse intensity
    #[arg(long)]
    q: f64,
    /// Pulse duration in units of 1/omega_r
    #[arg(long)]
    tau_r: f64,
    #[command(flatten)]
    beam: BeamArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    numerics: NumericsArgs,
    /// Output format
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    out: OutFormat,
    /// Write the table here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Record a replayable manifest here
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Replay a recorded manifest (physics and grid flags come from it)
    #[arg(
        long,
        conflicts_with_all = [
            "q", "tau_list", "tau_max", "tau_min", "points", "p0", "pulse",
            "detuning", "n_periods", "points_per_period", "sigma", "dt", "m_max",
        ]
    )]
    from_manifest: Option<PathBuf>,
    /// Dimensionless pulse intensity
    #[arg(long, required_unless_present = "from_manifest")]
    q: Option<f64>,
    /// Explicit comma-separated durations (otherwise a linear ladder)
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["tau_max", "tau_min", "points"])]
    tau_list: Option<Vec<f64>>,
    /// Top of the duration ladder; the ladder spans (tau-min, tau-max]
    #[arg(long, required_unless_present_any = ["tau_list", "from_manifest"])]
    tau_max: Option<f64>,
    /// Bottom of the duration ladder (exclusive)
    #[arg(long, default_value_t = 0.0)]
    tau_min: f64,
    /// Number of ladder points
    #[arg(long, default_value_t = 120)]
    points: usize,
    #[command(flatten)]
    beam: BeamArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    numerics: NumericsArgs,
    /// Worker threads for the scan
    #[arg(long)]
    jobs: Option<usize>,
    /// Output format
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    out: OutFormat,
    /// Write the table here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Emit a P3 pixmap of the sweep here
    #[arg(long)]
    heatmap: Option<PathBuf>,
    /// Which spectrum the heatmap colors
    #[arg(long, value_enum, default_value_t = HeatmapMethod::Numeric)]
    heatmap_method: HeatmapMethod,
    /// Record a replayable manifest here
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct RegimeMapArgs {
    /// Lowest intensity sampled
    #[arg(long, default_value_t = 0.1)]
    q_min: f64,
    /// Highest intensity sampled
    #[arg(long, default_value_t = 100.0)]
    q_max: f64,
    /// Shortest duration sampled
    #[arg(long, default_value_t = 0.01)]
    tau_min: f64,
    /// Longest duration sampled
    #[arg(long, default_value_t = 10.0)]
    tau_max: f64,
    /// Samples per axis (log-spaced)
    #[arg(long, default_value_t = 64)]
    resolution: usize,
    /// Write the table here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

enum CliError {
    Validation(String),
    Numerics(String),
}

impl CliError {
    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerics(m) => m,
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerics(_) => 3,
        }
    }
}

impl From<PointError> for CliError {
    fn from(err: PointError) -> Self {
        match err {
            PointError::Validation(m) => CliError::Validation(m),
            PointError::Numerics(m) => CliError::Numerics(m),
        }
    }
}

impl From<EmitError> for CliError {
    fn from(err: EmitError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<ManifestError> for CliError {
    fn from(err: ManifestError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<RegimeError> for CliError {
    fn from(err: RegimeError) -> Self {
        CliError::Validation(err.to_string())
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => run(*args),
        Command::Sweep(args) => sweep(*args),
        Command::RegimeMap(args) => regime_map(args),
    }
}

fn deliver(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            CliError::Validation(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let params = SimParams::new(
        args.q,
        args.tau_r,
        args.beam.p0,
        args.beam.pulse.into(),
        args.beam.detuning.into(),
    )
    .map_err(|e| CliError::Validation(e.to_string()))?;
    let grid = GridSpec::new(args.grid.n_periods, args.grid.points_per_period, args.grid.sigma)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let m_max = args
        .numerics
        .m_max
        .unwrap_or_else(|| default_m_max(&params).min(max_binnable_order(params.p0, &grid)));

    let spectra = run_point(&params, &grid, args.numerics.dt, m_max)?;
    let result = emit::single_point_result(m_max, args.tau_r, spectra);

    let settings = SweepSettings {
        q: args.q,
        p0: args.beam.p0,
        pulse: args.beam.pulse.into(),
        detuning_sign: args.beam.detuning.into(),
        n_periods: args.grid.n_periods,
        points_per_period: args.grid.points_per_period,
        sigma: args.grid.sigma,
        dt: args.numerics.dt,
        m_max,
        tau_values: vec![args.tau_r],
        jobs: None,
    };

    let text = match args.out {
        OutFormat::Csv => emit::csv_string(&result, settings.p0),
        OutFormat::Json => {
            let regime = classify_regime(args.q, args.tau_r)?.name();
            emit::json_string("run", Some(regime), &settings, &result)
        }
    };
    deliver(&text, args.output.as_deref())?;

    if let Some(path) = &args.manifest {
        manifest::write(&manifest::build("run", &settings, &result), path)?;
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let settings = match &args.from_manifest {
        Some(path) => {
            let mut settings = manifest::settings_from(&manifest::read(path)?)?;
            settings.jobs = args.jobs;
            settings
        }
        None => {
            let q = args.q.expect("clap enforces --q without --from-manifest");
            let tau_values = match &args.tau_list {
                Some(list) => list.clone(),
                None => {
                    let tau_max = args.tau_max.expect("clap enforces --tau-max");
                    linear_tau_values(args.tau_min, tau_max, args.points)?
                }
            };
            let mut settings = SweepSettings {
                q,
                p0: args.beam.p0,
                pulse: args.beam.pulse.into(),
                detuning_sign: args.beam.detuning.into(),
                n_periods: args.grid.n_periods,
                points_per_period: args.grid.points_per_period,
                sigma: args.grid.sigma,
                dt: args.numerics.dt,
                m_max: 0,
                tau_values,
                jobs: args.jobs,
            };
            settings.m_max = match args.numerics.m_max {
                Some(m) => m,
                None => auto_m_max(&settings)?,
            };
            settings
        }
    };

    let result = sweep_tau(&settings)?;

    let text = match args.out {
        OutFormat::Csv => emit::csv_string(&result, settings.p0),
        OutFormat::Json => emit::json_string("sweep", None, &settings, &result),
    };
    deliver(&text, args.output.as_deref())?;

    if let Some(path) = &args.heatmap {
        emit::emit_heatmap(&result, args.heatmap_method.into(), path)?;
    }
    if let Some(path) = &args.manifest {
        manifest::write(&manifest::build("sweep", &settings, &result), path)?;
    }
    Ok(())
}

fn regime_map(args: RegimeMapArgs) -> Result<(), CliError> {
    let text = emit::regime_map_string(
        (args.q_min, args.q_max),
        (args.tau_min, args.tau_max),
        args.resolution,
    )?;
    deliver(&text, args.output.as_deref())
}
