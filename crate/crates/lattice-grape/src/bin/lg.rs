//! `lg` — lattice gate-control toolbox.
//!
//! Subcommands: `bands`, `optimize`, `verify`, `nyquist`, `sweep`,
//! `pulse-info`. Every command that produces files writes them into its
//! `--out` directory together with a `manifest.json` recording the fully
//! resolved configuration; re-running with that configuration (sequential
//! mode, `--jobs 1`) reproduces the outputs bit for bit.
//!
//! Exit codes: 0 success (including non-converged optimizations),
//! 1 numerical failure, 2 usage or configuration error.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use lattice_grape::{
    bands, error::Error, experiments, fidelity, grape, pulse::ControlPulse, EnsembleSpec,
    InitStrategy, LatticeSpec, OptimizerConfig, RunManifest, SweepGrid, TargetGate,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "lg", version, about = "Ensemble control pulses for a 1-D optical lattice")]
struct Cli {
    /// Worker threads (1 guarantees sequential, bit-reproducible runs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Band structure scan and dispersion report.
    Bands(BandsArgs),
    /// GRAPE-optimize a gate pulse for the quasimomentum ensemble.
    Optimize(OptimizeArgs),
    /// Verify a pulse file on a fine quasimomentum grid.
    Verify(VerifyArgs),
    /// Single-k optimization and its fidelity response across the zone.
    Nyquist(NyquistArgs),
    /// Best-fidelity sweep over potential depths and durations.
    Sweep(SweepArgs),
    /// Print the physical laser parameters (eta, phi) of a pulse file.
    PulseInfo(PulseInfoArgs),
}

#[derive(Args)]
struct BandsArgs {
    /// Lattice depth in recoil energies.
    #[arg(long)]
    r: f64,
    /// Number of quasimomentum points from -1 to 1 inclusive.
    #[arg(long, default_value_t = 101)]
    kpoints: usize,
    /// Number of bands to tabulate.
    #[arg(long, default_value_t = 6)]
    bands: usize,
    /// Plane-wave basis half-width.
    #[arg(long, default_value_t = 16)]
    planewaves: usize,
    #[arg(long, default_value = "lg-out/bands")]
    out: PathBuf,
}

#[derive(Args)]
struct OptimizeArgs {
    /// JSON config file (flags override file values; a manifest.json from a
    /// previous run also works).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    r: Option<f64>,
    /// Pulse duration in free-oscillation periods.
    #[arg(long)]
    duration: Option<f64>,
    /// Quasimomentum samples in the optimization ensemble.
    #[arg(long)]
    k_samples: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    slices_per_period: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Initial guess: mixed | rabi | random | <pulse file>.
    #[arg(long)]
    init: Option<String>,
    /// Target gate: xpi | identity.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Amplitude box bound on |alpha|, |beta| (defaults to r/2).
    #[arg(long)]
    bound: Option<f64>,
    /// Verification grid size.
    #[arg(long)]
    fine_points: Option<usize>,
    /// Stop a restart early once the coarse fidelity reaches this value.
    #[arg(long)]
    phi_stop: Option<f64>,
    #[arg(long)]
    bands: Option<usize>,
    #[arg(long)]
    planewaves: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Pulse JSON file.
    pulse: PathBuf,
    #[arg(long, default_value_t = 100)]
    kpoints: usize,
    #[arg(long, default_value = "xpi")]
    target: String,
    #[arg(long, default_value_t = 6)]
    bands: usize,
    #[arg(long, default_value_t = 16)]
    planewaves: usize,
    #[arg(long, default_value = "lg-out/verify")]
    out: PathBuf,
}

#[derive(Args)]
struct NyquistArgs {
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    /// The single quasimomentum optimized for.
    #[arg(long, default_value_t = 0.5)]
    k: f64,
    /// Comma-separated durations in free-oscillation periods.
    #[arg(long, default_value = "5,15,30", value_delimiter = ',')]
    durations: Vec<f64>,
    #[arg(long, default_value_t = 201)]
    kpoints: usize,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 4000)]
    max_iters: usize,
    #[arg(long)]
    phi_stop: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "lg-out/nyquist")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config file (flags override file values).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    r_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    durations: Option<Vec<f64>>,
    #[arg(long)]
    k_samples: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    slices_per_period: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    phi_stop: Option<f64>,
    #[arg(long)]
    fine_points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PulseInfoArgs {
    /// Pulse JSON file.
    pulse: PathBuf,
}

enum CliError {
    /// Bad arguments, bad config, malformed inputs: exit 2.
    Usage(String),
    /// Numerical or system failure mid-run: exit 1.
    Failure(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

/// Library errors during computation: eigensolver trouble is a numerical
/// failure, everything else reflects bad inputs.
fn classify(err: Error) -> CliError {
    match err {
        Error::Eigensolver(_) | Error::Io(_) => CliError::Failure(err.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn usage(err: impl std::fmt::Display) -> CliError {
    CliError::Usage(err.to_string())
}

fn failure(err: impl std::fmt::Display) -> CliError {
    CliError::Failure(err.to_string())
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            std::process::exit(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    let result = match cli.command {
        Command::Bands(args) => cmd_bands(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Nyquist(args) => cmd_nyquist(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::PulseInfo(args) => cmd_pulse_info(args),
    };
    if let Err(err) = result {
        eprintln!("error: {}", err.message());
        std::process::exit(err.code());
    }
}

fn ensure_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(failure)
}

fn write_out(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(failure)
}

fn seed_fallback(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| std::env::var("LG_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0)
}

/// Load a `--config` JSON file; a manifest from a previous run is unwrapped
/// to its embedded config.
fn load_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    if value.get("command").is_some() && value.get("config").is_some() {
        value = value["config"].take();
    }
    serde_json::from_value(value).map_err(|e| usage(format!("config {}: {e}", path.display())))
}

#[allow(clippy::too_many_arguments)]
fn finish_manifest(
    out: &Path,
    command: &str,
    seed: Option<u64>,
    config: Value,
    inputs: Vec<String>,
    outputs: Vec<String>,
    started: Instant,
) -> Result<(), CliError> {
    let manifest = RunManifest {
        command: command.to_string(),
        version: VERSION.to_string(),
        seed,
        config,
        inputs,
        outputs,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    manifest.save(out.join("manifest.json")).map_err(failure)
}

// ---------------------------------------------------------------- bands

fn cmd_bands(args: BandsArgs) -> Result<(), CliError> {
    let started = Instant::now();
    if args.kpoints < 2 {
        return Err(usage(format!("--kpoints must be at least 2, got {}", args.kpoints)));
    }
    let spec = LatticeSpec::with_basis(args.r, args.planewaves, args.bands);
    spec.validate().map_err(classify)?;

    let step = 2.0 / (args.kpoints - 1) as f64;
    let k_points: Vec<f64> = (0..args.kpoints).map(|i| -1.0 + i as f64 * step).collect();
    let scan = bands::band_scan(&spec, &k_points).map_err(classify)?;
    let report = bands::dispersion(&spec).map_err(classify)?;

    ensure_out(&args.out)?;
    write_out(&args.out.join("bands.csv"), &scan.to_csv())?;
    let dispersion_json = serde_json::to_string_pretty(&report).map_err(failure)? + "\n";
    write_out(&args.out.join("dispersion.json"), &dispersion_json)?;

    let config = json!({
        "schema": "lg-bands/1",
        "r": args.r,
        "kpoints": args.kpoints,
        "bands": args.bands,
        "planewaves": args.planewaves,
    });
    finish_manifest(
        &args.out,
        "bands",
        None,
        config,
        vec![],
        vec!["bands.csv".into(), "dispersion.json".into()],
        started,
    )?;
    println!(
        "r = {}: D = {:.4} (gap {:.6} -> {:.6}), {} rows -> {}",
        args.r,
        report.d_value,
        report.gap_center,
        report.gap_edge,
        args.kpoints * args.bands,
        args.out.display()
    );
    Ok(())
}

// ------------------------------------------------------------- optimize

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default)]
struct OptimizeJob {
    schema: Option<String>,
    r: Option<f64>,
    duration: Option<f64>,
    k_samples: Option<usize>,
    restarts: Option<usize>,
    slices_per_period: Option<usize>,
    seed: Option<u64>,
    init: Option<String>,
    target: Option<String>,
    max_iters: Option<usize>,
    bound: Option<f64>,
    fine_points: Option<usize>,
    phi_stop: Option<f64>,
    bands: Option<usize>,
    planewaves: Option<usize>,
    out: Option<String>,
}

fn parse_target(name: &str) -> Result<TargetGate, CliError> {
    match name {
        "xpi" => Ok(TargetGate::x_pi()),
        "identity" => Ok(TargetGate::identity()),
        other => Err(usage(format!("unknown target '{other}' (expected xpi or identity)"))),
    }
}

fn parse_init(name: &str) -> Result<InitStrategy, CliError> {
    match name {
        "mixed" => Ok(InitStrategy::Mixed),
        "rabi" => Ok(InitStrategy::Rabi),
        "random" => Ok(InitStrategy::Random),
        path => {
            let pulse = ControlPulse::load(path).map_err(classify)?;
            Ok(InitStrategy::Pulse(pulse))
        }
    }
}

fn cmd_optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mut job: OptimizeJob = match &args.config {
        Some(path) => load_config(path)?,
        None => OptimizeJob::default(),
    };
    // flags > file > defaults
    job.r = args.r.or(job.r);
    job.duration = args.duration.or(job.duration);
    job.k_samples = args.k_samples.or(job.k_samples);
    job.restarts = args.restarts.or(job.restarts);
    job.slices_per_period = args.slices_per_period.or(job.slices_per_period);
    job.seed = args.seed.or(job.seed);
    job.init = args.init.or(job.init);
    job.target = args.target.or(job.target);
    job.max_iters = args.max_iters.or(job.max_iters);
    job.bound = args.bound.or(job.bound);
    job.fine_points = args.fine_points.or(job.fine_points);
    job.phi_stop = args.phi_stop.or(job.phi_stop);
    job.bands = args.bands.or(job.bands);
    job.planewaves = args.planewaves.or(job.planewaves);
    job.out = args.out.map(|p| p.display().to_string()).or(job.out);

    let r = job.r.ok_or_else(|| usage("missing --r (or r in config)"))?;
    let duration = job.duration.ok_or_else(|| usage("missing --duration"))?;
    let resolved = OptimizeJob {
        schema: Some("lg-optimize/1".into()),
        r: Some(r),
        duration: Some(duration),
        k_samples: Some(job.k_samples.unwrap_or(20)),
        restarts: Some(job.restarts.unwrap_or(11)),
        slices_per_period: Some(job.slices_per_period.unwrap_or(32)),
        seed: Some(seed_fallback(job.seed)),
        init: Some(job.init.clone().unwrap_or_else(|| "mixed".into())),
        target: Some(job.target.clone().unwrap_or_else(|| "xpi".into())),
        max_iters: Some(job.max_iters.unwrap_or(100_000)),
        bound: job.bound,
        fine_points: Some(job.fine_points.unwrap_or(100)),
        phi_stop: job.phi_stop,
        bands: Some(job.bands.unwrap_or(6)),
        planewaves: Some(job.planewaves.unwrap_or(16)),
        out: Some(job.out.clone().unwrap_or_else(|| "lg-out/optimize".into())),
    };

    let spec =
        LatticeSpec::with_basis(r, resolved.planewaves.unwrap(), resolved.bands.unwrap());
    spec.validate().map_err(classify)?;
    let ens = EnsembleSpec::uniform(resolved.k_samples.unwrap()).map_err(classify)?;
    let target = parse_target(resolved.target.as_deref().unwrap())?;
    let init = parse_init(resolved.init.as_deref().unwrap())?;
    let config = OptimizerConfig {
        max_iters: resolved.max_iters.unwrap(),
        restarts: resolved.restarts.unwrap(),
        amplitude_bound: resolved.bound,
        seed: resolved.seed.unwrap(),
        phi_stop: resolved.phi_stop,
        fine_grid_points: resolved.fine_points.unwrap(),
        ..Default::default()
    };
    let duration_periods = resolved.duration.unwrap();
    let n_slices = ((resolved.slices_per_period.unwrap() as f64 * duration_periods).ceil()
        as usize)
        .max(1);

    let result = grape::optimize(&config, &spec, &ens, &target, duration_periods, n_slices, init)
        .map_err(classify)?;

    let out = PathBuf::from(resolved.out.clone().unwrap());
    ensure_out(&out)?;
    let mut best_pulse = result.best_pulse.clone();
    best_pulse.meta = serde_json::Map::from_iter([
        ("target".to_string(), json!(resolved.target)),
        ("duration_periods".to_string(), json!(duration_periods)),
        ("seed".to_string(), json!(resolved.seed)),
        ("restart_winner".to_string(), json!(result.restart_index)),
    ]);
    write_out(&out.join("pulse.json"), &best_pulse.to_json())?;

    let report = json!({
        "phi_coarse": result.phi_coarse,
        "phi_fine": result.phi_fine,
        "phi_fine_coherent": result.fine_report.coherent_phi,
        "fine_min_fidelity": result.fine_report.min_fidelity,
        "fine_max_fidelity": result.fine_report.max_fidelity,
        "trace_length": result.trace.len(),
        "iterations": result.iterations(),
        "termination": result.termination.to_string(),
        "restart_winner": result.restart_index,
        "restarts": result.restart_summaries,
    });
    write_out(
        &out.join("report.json"),
        &(serde_json::to_string_pretty(&report).map_err(failure)? + "\n"),
    )?;
    write_out(&out.join("trace.csv"), &result.trace_csv())?;

    let config_value = serde_json::to_value(&resolved).map_err(failure)?;
    finish_manifest(
        &out,
        "optimize",
        resolved.seed,
        config_value,
        vec![],
        vec!["pulse.json".into(), "report.json".into(), "trace.csv".into()],
        started,
    )?;
    println!(
        "best restart {}: coarse {:.6}, fine mean {:.6} ({}) -> {}",
        result.restart_index,
        result.phi_coarse,
        result.phi_fine,
        result.termination,
        out.display()
    );
    Ok(())
}

// --------------------------------------------------------------- verify

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let started = Instant::now();
    if args.kpoints < 2 {
        return Err(usage(format!("--kpoints must be at least 2, got {}", args.kpoints)));
    }
    let pulse = ControlPulse::load(&args.pulse).map_err(classify)?;
    let spec = LatticeSpec::with_basis(pulse.r, args.planewaves, args.bands);
    spec.validate().map_err(classify)?;
    let target = parse_target(&args.target)?;

    let fine =
        fidelity::fine_grid_fidelity(&pulse, &spec, &target, args.kpoints).map_err(classify)?;
    ensure_out(&args.out)?;
    write_out(&args.out.join("scan.csv"), &fine.to_csv())?;

    let summary = json!({
        "pulse": args.pulse.display().to_string(),
        "kpoints": args.kpoints,
        "phi_coherent": fine.coherent_phi,
        "mean_fidelity": fine.mean_fidelity,
        "min_fidelity": fine.min_fidelity,
        "max_fidelity": fine.max_fidelity,
        "mean_error": 1.0 - fine.mean_fidelity,
        "max_error": 1.0 - fine.min_fidelity,
        "trace_phases": fine.trace_phase,
    });
    write_out(
        &args.out.join("summary.json"),
        &(serde_json::to_string_pretty(&summary).map_err(failure)? + "\n"),
    )?;

    let config = json!({
        "schema": "lg-verify/1",
        "pulse": args.pulse.display().to_string(),
        "kpoints": args.kpoints,
        "target": args.target,
        "bands": args.bands,
        "planewaves": args.planewaves,
    });
    finish_manifest(
        &args.out,
        "verify",
        None,
        config,
        vec![args.pulse.display().to_string()],
        vec!["scan.csv".into(), "summary.json".into()],
        started,
    )?;
    println!(
        "fidelity over {} points: mean {:.6}, min {:.6}, coherent {:.6} -> {}",
        args.kpoints,
        fine.mean_fidelity,
        fine.min_fidelity,
        fine.coherent_phi,
        args.out.display()
    );
    Ok(())
}

// -------------------------------------------------------------- nyquist

fn cmd_nyquist(args: NyquistArgs) -> Result<(), CliError> {
    let started = Instant::now();
    if args.durations.is_empty() {
        return Err(usage("--durations must name at least one duration"));
    }
    if args.kpoints < 2 {
        return Err(usage(format!("--kpoints must be at least 2, got {}", args.kpoints)));
    }
    let spec = LatticeSpec::new(args.r);
    spec.validate().map_err(classify)?;
    if !(args.k > -1.0 && args.k < 1.0) {
        return Err(usage(format!(
            "the optimized quasimomentum must be interior to the zone, got {}",
            args.k
        )));
    }
    let seed = seed_fallback(args.seed);
    let config = OptimizerConfig {
        max_iters: args.max_iters,
        restarts: args.restarts,
        seed,
        phi_stop: args.phi_stop,
        fine_grid_points: args.kpoints,
        ..Default::default()
    };
    let run =
        experiments::nyquist_experiment(&spec, &config, args.k, &args.durations, args.kpoints)
            .map_err(classify)?;

    ensure_out(&args.out)?;
    write_out(&args.out.join("nyquist.csv"), &run.to_csv())?;
    let summary = json!({
        "r": args.r,
        "k_opt": args.k,
        "durations": run.durations,
        "fwhm": run.fwhm,
        "kpoints": args.kpoints,
    });
    write_out(
        &args.out.join("summary.json"),
        &(serde_json::to_string_pretty(&summary).map_err(failure)? + "\n"),
    )?;

    let config_value = json!({
        "schema": "lg-nyquist/1",
        "r": args.r,
        "k": args.k,
        "durations": args.durations,
        "kpoints": args.kpoints,
        "restarts": args.restarts,
        "max_iters": args.max_iters,
        "phi_stop": args.phi_stop,
        "seed": seed,
    });
    finish_manifest(
        &args.out,
        "nyquist",
        Some(seed),
        config_value,
        vec![],
        vec!["nyquist.csv".into(), "summary.json".into()],
        started,
    )?;
    for (duration, fwhm) in run.durations.iter().zip(&run.fwhm) {
        println!("T = {duration:>6} periods: FWHM = {fwhm:.4}");
    }
    println!("-> {}", args.out.display());
    Ok(())
}

// ---------------------------------------------------------------- sweep

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default)]
struct SweepJob {
    schema: Option<String>,
    r_values: Option<Vec<f64>>,
    durations: Option<Vec<f64>>,
    k_samples: Option<usize>,
    restarts: Option<usize>,
    slices_per_period: Option<usize>,
    max_iters: Option<usize>,
    phi_stop: Option<f64>,
    fine_points: Option<usize>,
    seed: Option<u64>,
    out: Option<String>,
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mut job: SweepJob = match &args.config {
        Some(path) => load_config(path)?,
        None => SweepJob::default(),
    };
    job.r_values = args.r_values.or(job.r_values);
    job.durations = args.durations.or(job.durations);
    job.k_samples = args.k_samples.or(job.k_samples);
    job.restarts = args.restarts.or(job.restarts);
    job.slices_per_period = args.slices_per_period.or(job.slices_per_period);
    job.max_iters = args.max_iters.or(job.max_iters);
    job.phi_stop = args.phi_stop.or(job.phi_stop);
    job.fine_points = args.fine_points.or(job.fine_points);
    job.seed = args.seed.or(job.seed);
    job.out = args.out.map(|p| p.display().to_string()).or(job.out);

    let r_values = job
        .r_values
        .clone()
        .ok_or_else(|| usage("missing --r-values (or r_values in config)"))?;
    let durations = job
        .durations
        .clone()
        .ok_or_else(|| usage("missing --durations (or durations in config)"))?;
    if r_values.is_empty() || durations.is_empty() {
        return Err(usage("sweep grids must be nonempty"));
    }
    if durations.iter().any(|&d| !(d > 0.0)) {
        return Err(usage("sweep durations must be positive"));
    }
    let resolved = SweepJob {
        schema: Some("lg-sweep/1".into()),
        r_values: Some(r_values.clone()),
        durations: Some(durations.clone()),
        k_samples: Some(job.k_samples.unwrap_or(10)),
        restarts: Some(job.restarts.unwrap_or(5)),
        slices_per_period: Some(job.slices_per_period.unwrap_or(32)),
        max_iters: Some(job.max_iters.unwrap_or(100_000)),
        phi_stop: job.phi_stop,
        fine_points: Some(job.fine_points.unwrap_or(100)),
        seed: Some(seed_fallback(job.seed)),
        out: Some(job.out.clone().unwrap_or_else(|| "lg-out/sweep".into())),
    };

    let config = OptimizerConfig {
        max_iters: resolved.max_iters.unwrap(),
        restarts: resolved.restarts.unwrap(),
        seed: resolved.seed.unwrap(),
        phi_stop: resolved.phi_stop,
        fine_grid_points: resolved.fine_points.unwrap(),
        ..Default::default()
    };
    let mut grid = SweepGrid::new(r_values, durations, config);
    grid.k_samples = resolved.k_samples.unwrap();
    grid.slices_per_period = resolved.slices_per_period.unwrap();

    let table = experiments::depth_duration_sweep(&grid);
    let out = PathBuf::from(resolved.out.clone().unwrap());
    ensure_out(&out)?;
    write_out(&out.join("sweep.csv"), &table.to_csv())?;

    let config_value = serde_json::to_value(&resolved).map_err(failure)?;
    finish_manifest(
        &out,
        "sweep",
        resolved.seed,
        config_value,
        vec![],
        vec!["sweep.csv".into()],
        started,
    )?;
    println!("{} cells -> {}", table.rows.len(), out.display());
    Ok(())
}

// ----------------------------------------------------------- pulse-info

fn cmd_pulse_info(args: PulseInfoArgs) -> Result<(), CliError> {
    let pulse = ControlPulse::load(&args.pulse).map_err(classify)?;
    let phys = lattice_grape::physical_from_pulse(&pulse).map_err(classify)?;
    println!(
        "r = {}, {} slices of dt = {} (T = {})",
        pulse.r,
        pulse.n_slices,
        pulse.dt,
        pulse.duration()
    );
    println!("slice,eta,phi");
    for j in 0..pulse.n_slices {
        println!("{j},{:.12e},{:.12e}", phys.eta[j], phys.phi[j]);
    }
    Ok(())
}
