use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;

use isoremesh::io::{load_path, save_path, MeshFormat};
use isoremesh::metrics::{angle_stats_with_bins, quality_report, QualityReport};
use isoremesh::{derive_target_length, remesh, Error, HalfEdgeMesh, RemeshConfig, RunReport, WeightingScheme};

const LOG_ENV: &str = "ISOREMESH_LOG";

#[derive(Parser, Debug)]
#[command(name = "isoremesh", version, about = "Isotropic triangle remeshing with angle-guarded edits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Remesh a surface and write the result.
    Remesh(RemeshCmd),
    /// Compare an original and a remeshed surface.
    Metrics(MetricsCmd),
    /// Write the inter-angle histogram of a mesh as CSV.
    Histogram(HistogramCmd),
    /// Remesh with and without the angle guards and compare.
    Ablate(AblateCmd),
}

#[derive(Args, Debug)]
struct RemeshCmd {
    /// Input mesh (.obj or .ply).
    #[arg(long)]
    input: PathBuf,
    /// Output mesh (.obj or .ply).
    #[arg(long)]
    output: PathBuf,
    /// Write run and quality report JSON here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    params: RemeshParams,
    #[command(flatten)]
    sampling: SamplingParams,
}

#[derive(Args, Debug)]
struct MetricsCmd {
    /// Reference mesh.
    #[arg(long)]
    original: PathBuf,
    /// Mesh to evaluate.
    #[arg(long)]
    remeshed: PathBuf,
    /// JSON destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    sampling: SamplingParams,
}

#[derive(Args, Debug)]
struct HistogramCmd {
    /// Mesh to measure.
    #[arg(long)]
    input: PathBuf,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Number of equal-width bins over [0°, 180°].
    #[arg(long, default_value_t = 36, value_parser = clap::value_parser!(u32).range(1..))]
    bins: u32,
}

#[derive(Args, Debug)]
struct AblateCmd {
    /// Input mesh (.obj or .ply).
    #[arg(long)]
    input: PathBuf,
    /// JSON destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    params: RemeshParams,
    #[command(flatten)]
    sampling: SamplingParams,
}

#[derive(Args, Debug)]
struct RemeshParams {
    /// Target edge length as a multiple of the input's average edge length.
    #[arg(long, default_value_t = 1.0)]
    multi_parameter: f64,
    /// Absolute target edge length; overrides --multi-parameter [default: unset].
    #[arg(long)]
    target_length: Option<f64>,
    /// Iteration budget.
    #[arg(long, default_value_t = 10)]
    iterations: usize,
    /// Tangential smoothing step.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Largest dihedral angle, in degrees, across which a flip is allowed.
    #[arg(long, default_value_t = 20.0)]
    dihedral_epsilon: f64,
    /// Largest vertex degree a collapse may create.
    #[arg(long, default_value_t = 6)]
    max_degree: usize,
    /// Disable the inter-angle guards [default: off].
    #[arg(long)]
    no_angle_opt: bool,
    /// Smooth without projecting onto the input surface [default: off].
    #[arg(long)]
    no_mls: bool,
    /// Centroid weighting for smoothing.
    #[arg(long, value_enum, default_value_t = Weighting::Area)]
    weighting: Weighting,
    /// Write zero for every wall-clock field so reports are reproducible [default: off].
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args, Debug)]
struct SamplingParams {
    /// Surface samples per mesh for distances [default: 100 × vertices, at most 1e6].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    /// Sampling seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Histogram bins in the quality report.
    #[arg(long, default_value_t = 36, value_parser = clap::value_parser!(u32).range(1..))]
    bins: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Weighting {
    Uniform,
    Area,
    Cotangent,
}

impl From<Weighting> for WeightingScheme {
    fn from(w: Weighting) -> Self {
        match w {
            Weighting::Uniform => WeightingScheme::Uniform,
            Weighting::Area => WeightingScheme::Area,
            Weighting::Cotangent => WeightingScheme::Cotangent,
        }
    }
}

/// A failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::Io(_) => 4,
            Error::InvalidConfig(_) => 2,
            _ => 3,
        };
        Self { code, message: err.to_string() }
    }
}

fn io_failure(path: &Path, err: io::Error) -> Failure {
    Failure {
        code: 4,
        message: format!("{}: {err}", path.display()),
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Serialize)]
struct RunSummary {
    total_edits: usize,
    wall_time_s: f64,
    run: RunReport,
    quality: QualityReport,
}

#[derive(Serialize)]
struct Ablation {
    enabled: RunSummary,
    disabled: RunSummary,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn"))
        .format_timestamp(None)
        .init();

    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(err) => err.exit(),
    };
    let sub = matches.subcommand().map(|(_, m)| m).expect("subcommand is required");
    let result = match &cli.command {
        Command::Remesh(cmd) => cmd_remesh(cmd, sub),
        Command::Metrics(cmd) => cmd_metrics(cmd),
        Command::Histogram(cmd) => cmd_histogram(cmd),
        Command::Ablate(cmd) => cmd_ablate(cmd, sub),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn require_mesh_extension(path: &Path) -> Outcome<()> {
    MeshFormat::from_path(path)
        .map(|_| ())
        .ok_or_else(|| Failure::usage(format!("{}: expected a .obj or .ply path", path.display())))
}

fn load(path: &Path) -> Outcome<HalfEdgeMesh> {
    require_mesh_extension(path)?;
    let mesh = load_path(path).map_err(|err| match err {
        Error::Io(e) => io_failure(path, e),
        other => Failure {
            code: 3,
            message: format!("{}: {other}", path.display()),
        },
    })?;
    info!("{}: {} vertices, {} faces", path.display(), mesh.n_vertices(), mesh.n_faces());
    Ok(mesh)
}

fn save(mesh: &HalfEdgeMesh, path: &Path) -> Outcome<()> {
    save_path(mesh, path).map_err(|err| match err {
        Error::Io(e) => io_failure(path, e),
        other => other.into(),
    })
}

/// Writes `text` to `path`, or to standard output when there is no path.
fn emit(path: Option<&Path>, text: &str) -> Outcome<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(|e| io_failure(p, e))?);
            w.write_all(text.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| io_failure(p, e))
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn config_for(mesh: &HalfEdgeMesh, params: &RemeshParams, matches: &ArgMatches) -> Outcome<RemeshConfig> {
    let target_length = match params.target_length {
        Some(l) => {
            if matches.value_source("multi_parameter") == Some(ValueSource::CommandLine) {
                warn!("--target-length given; ignoring --multi-parameter");
            }
            l
        }
        None => derive_target_length(mesh, params.multi_parameter).map_err(|err| match err {
            Error::InvalidConfig(m) => Failure::usage(m),
            other => other.into(),
        })?,
    };
    let cfg = RemeshConfig {
        target_length,
        iterations: params.iterations,
        lambda: params.lambda,
        dihedral_eps_deg: params.dihedral_epsilon,
        max_degree: params.max_degree,
        angle_opt_enabled: !params.no_angle_opt,
        mls_enabled: !params.no_mls,
        weighting: params.weighting.into(),
        ..RemeshConfig::default()
    };
    cfg.validate().map_err(|err| Failure::usage(err.to_string()))?;
    Ok(cfg)
}

fn clear_timings(report: &mut RunReport) {
    report.wall_time_s = 0.0;
    for it in &mut report.iterations {
        for pass in [&mut it.split, &mut it.collapse, &mut it.flip, &mut it.smooth] {
            pass.wall_time_s = 0.0;
        }
    }
}

fn run_and_evaluate(
    mesh: &HalfEdgeMesh,
    cfg: &RemeshConfig,
    sampling: &SamplingParams,
    no_timings: bool,
) -> Outcome<(HalfEdgeMesh, RunSummary)> {
    let (out, mut run) = remesh(mesh, cfg)?;
    if no_timings {
        clear_timings(&mut run);
    }
    let quality = quality_report(
        mesh,
        &out,
        sampling.samples.map(|n| n as usize),
        sampling.seed,
        sampling.bins as usize,
    )?;
    let summary = RunSummary {
        total_edits: run.total_edits(),
        wall_time_s: run.wall_time_s,
        run,
        quality,
    };
    Ok((out, summary))
}

fn cmd_remesh(cmd: &RemeshCmd, matches: &ArgMatches) -> Outcome<()> {
    require_mesh_extension(&cmd.output)?;
    let mesh = load(&cmd.input)?;
    let cfg = config_for(&mesh, &cmd.params, matches)?;
    info!("target edge length {}", cfg.target_length);
    let (out, summary) = match &cmd.report {
        Some(_) => {
            let (out, s) = run_and_evaluate(&mesh, &cfg, &cmd.sampling, cmd.params.no_timings)?;
            (out, Some(s))
        }
        None => (remesh(&mesh, &cfg)?.0, None),
    };
    save(&out, &cmd.output)?;
    if let (Some(path), Some(s)) = (&cmd.report, summary) {
        emit(Some(path), &to_json(&s))?;
    }
    Ok(())
}

fn cmd_metrics(cmd: &MetricsCmd) -> Outcome<()> {
    let original = load(&cmd.original)?;
    let remeshed = load(&cmd.remeshed)?;
    let q = quality_report(
        &original,
        &remeshed,
        cmd.sampling.samples.map(|n| n as usize),
        cmd.sampling.seed,
        cmd.sampling.bins as usize,
    )?;
    emit(cmd.output.as_deref(), &to_json(&q))
}

fn cmd_histogram(cmd: &HistogramCmd) -> Outcome<()> {
    let mesh = load(&cmd.input)?;
    let stats = angle_stats_with_bins(&mesh, cmd.bins as usize);
    if stats.degenerate_faces > 0 {
        warn!("{} degenerate faces left out of the histogram", stats.degenerate_faces);
    }
    emit(cmd.output.as_deref(), &stats.histogram.to_csv())
}

fn cmd_ablate(cmd: &AblateCmd, matches: &ArgMatches) -> Outcome<()> {
    let mesh = load(&cmd.input)?;
    let enabled_cfg = RemeshConfig {
        angle_opt_enabled: true,
        ..config_for(&mesh, &cmd.params, matches)?
    };
    let disabled_cfg = RemeshConfig {
        angle_opt_enabled: false,
        ..enabled_cfg.clone()
    };
    let (_, enabled) = run_and_evaluate(&mesh, &enabled_cfg, &cmd.sampling, cmd.params.no_timings)?;
    let (_, disabled) = run_and_evaluate(&mesh, &disabled_cfg, &cmd.sampling, cmd.params.no_timings)?;
    info!(
        "theta_max {:.2} (guards on) vs {:.2} (off); edits {} vs {}",
        enabled.quality.theta_max_deg, disabled.quality.theta_max_deg, enabled.total_edits, disabled.total_edits
    );
    emit(cmd.output.as_deref(), &to_json(&Ablation { enabled, disabled }))
}
