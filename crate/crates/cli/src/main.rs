//! Command-line driver: synthesize signals, corrupt them, reconstruct with
//! any of the four methods, and run benchmark experiments or
//! hyper-parameter sweeps over segmented audio.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use desr::error::CliError;
use desr::experiment::{
    self, CorruptionKind, ExperimentConfig, MethodSpec, ProposedParams, SignalSource,
};
use desr::wav;
use desr_core::{
    scale_hyperparameters, EmbeddingGeometry, ObservationMask, SignalSpec, SolverConfig,
};

#[derive(Parser)]
#[command(
    name = "desr",
    about = "Signal restoration in delay-embedded space: declipping and inpainting experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic test signal and write it as 16-bit PCM WAV.
    Synth(SynthArgs),
    /// Clip, drop, or add noise to a WAV; emits the corrupted WAV and mask.
    Corrupt(CorruptArgs),
    /// Reconstruct a corrupted WAV with one method.
    Reconstruct(ReconstructArgs),
    /// Segment a signal, corrupt each segment, reconstruct with the chosen
    /// methods, and emit per-segment and aggregate CSV results.
    Bench(BenchArgs),
    /// Run the solver over a (tau, lambda1, lambda2) grid and emit the
    /// aggregate SNR per cell.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Sine,
    Wavelet,
    Chirp,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    /// Signal length in samples.
    #[arg(long, default_value_t = 16_000)]
    n: usize,
    /// Frequency in cycles per sample (start frequency for chirps).
    #[arg(long, default_value_t = 0.03125)]
    frequency: f64,
    #[arg(long, default_value_t = 0.9)]
    amplitude: f64,
    /// Sine phase in radians.
    #[arg(long, default_value_t = 0.0)]
    phase: f64,
    /// Wavelet envelope center (defaults to the midpoint).
    #[arg(long)]
    center: Option<f64>,
    /// Wavelet envelope standard deviation (defaults to n/8).
    #[arg(long)]
    width: Option<f64>,
    /// Chirp frequency slope per sample (defaults to frequency/n, which
    /// doubles the instantaneous frequency over the signal).
    #[arg(long)]
    chirp_rate: Option<f64>,
    #[arg(long, default_value_t = 16_000)]
    sample_rate: u32,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorruptKind {
    Clip,
    Missing,
    Noise,
}

#[derive(Args)]
struct CorruptArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: CorruptKind,
    /// Clip level c.
    #[arg(long, default_value_t = 0.2)]
    level: f64,
    /// Missing rate in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    /// Noise standard deviation.
    #[arg(long, default_value_t = 0.1)]
    std: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long)]
    mask_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodKind {
    Proposed,
    Qv,
    Spline,
    Omp,
}

#[derive(Args, Clone, Copy)]
struct MethodParams {
    /// Embedding window of the rank-1 solver.
    #[arg(long, default_value_t = 128)]
    tau: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda1: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda2: f64,
    /// Monte-Carlo restarts K.
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 1000)]
    max_outer: usize,
    #[arg(long, default_value_t = 1e-9)]
    outer_tol: f64,
    /// Quadratic-variation weight (scaled by |observed|/N²).
    #[arg(long, default_value_t = 1.0)]
    qv_lambda1: f64,
    /// OMP residual threshold.
    #[arg(long, default_value_t = 0.001)]
    epsilon: f64,
    /// Gabor dictionary redundancy.
    #[arg(long, default_value_t = 2.0)]
    redundancy: f64,
}

impl MethodParams {
    fn proposed(&self) -> ProposedParams {
        ProposedParams {
            tau: self.tau,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            restarts: self.restarts,
            max_outer_iters: self.max_outer,
            outer_tol: self.outer_tol,
        }
    }

    fn to_spec(&self, kind: MethodKind) -> MethodSpec {
        match kind {
            MethodKind::Proposed => MethodSpec::Proposed(self.proposed()),
            MethodKind::Qv => MethodSpec::Qv {
                lambda1: self.qv_lambda1,
            },
            MethodKind::Spline => MethodSpec::Spline,
            MethodKind::Omp => MethodSpec::Omp {
                epsilon: self.epsilon,
                redundancy: self.redundancy,
            },
        }
    }
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Mask CSV from `corrupt`; a full mask is assumed when omitted.
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: MethodKind,
    #[command(flatten)]
    params: MethodParams,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
    /// Per-restart objective trajectories (proposed method only).
    #[arg(long)]
    trajectory_out: Option<PathBuf>,
    /// JSON solve report (proposed method only).
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(Args)]
struct SourceArgs {
    /// Input WAV file.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Synthesize the source instead of reading a file.
    #[arg(long, value_enum)]
    synth: Option<SynthKind>,
    #[arg(long, default_value_t = 16_000)]
    n: usize,
    #[arg(long, default_value_t = 0.03125)]
    frequency: f64,
    #[arg(long, default_value_t = 0.9)]
    amplitude: f64,
    #[arg(long, default_value_t = 0.0)]
    phase: f64,
    #[arg(long)]
    center: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    chirp_rate: Option<f64>,
    #[arg(long, default_value_t = 16_000)]
    sample_rate: u32,
}

#[derive(Args)]
struct CorruptionArgs {
    /// Corruption applied to every segment.
    #[arg(long, default_value = "clip")]
    corruption: String,
    #[arg(long, default_value_t = 0.2)]
    level: f64,
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    #[arg(long, default_value_t = 0.1)]
    std: f64,
}

impl CorruptionArgs {
    fn kind(&self) -> Result<CorruptionKind, CliError> {
        match self.corruption.as_str() {
            "none" => Ok(CorruptionKind::None),
            "clip" => Ok(CorruptionKind::Clip { level: self.level }),
            "missing" => Ok(CorruptionKind::RandomMissing { rate: self.rate }),
            "noise" => Ok(CorruptionKind::AdditiveNoise { std: self.std }),
            other => Err(CliError::config(format!(
                "unknown corruption {other:?} (expected none|clip|missing|noise)"
            ))),
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 128)]
    segment_length: usize,
    /// Minimum segment RMS ("sufficient amplitude" threshold).
    #[arg(long, default_value_t = 0.05)]
    min_rms: f64,
    #[arg(long)]
    max_segments: Option<usize>,
    #[command(flatten)]
    corruption: CorruptionArgs,
    /// Comma-separated subset of proposed,qv,spline,omp.
    #[arg(long, default_value = "proposed,qv,spline,omp")]
    methods: String,
    #[command(flatten)]
    params: MethodParams,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    results_out: PathBuf,
    #[arg(long)]
    summary_out: Option<PathBuf>,
    #[arg(long)]
    trajectory_out: Option<PathBuf>,
    #[arg(long)]
    manifest_out: Option<PathBuf>,
    /// Directory for per-method WAVs with reconstructed segments patched in.
    #[arg(long)]
    wav_out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 128)]
    segment_length: usize,
    #[arg(long, default_value_t = 0.05)]
    min_rms: f64,
    #[arg(long)]
    max_segments: Option<usize>,
    #[command(flatten)]
    corruption: CorruptionArgs,
    #[command(flatten)]
    params: MethodParams,
    /// Comma-separated embedding windows, e.g. 8,16,32,64,128,256.
    #[arg(long, default_value = "8,16,32,64,128,256")]
    tau_grid: String,
    /// Comma-separated weights applied to both lambda1 and lambda2.
    #[arg(long, default_value = "0.001,0.01,0.1,1,10")]
    lambda_grid: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

fn synth_spec(
    kind: SynthKind,
    n: usize,
    frequency: f64,
    amplitude: f64,
    phase: f64,
    center: Option<f64>,
    width: Option<f64>,
    chirp_rate: Option<f64>,
) -> SignalSpec {
    match kind {
        SynthKind::Sine => SignalSpec::Sine {
            n,
            frequency,
            amplitude,
            phase,
        },
        SynthKind::Wavelet => SignalSpec::Wavelet {
            n,
            frequency,
            amplitude,
            center: center.unwrap_or((n as f64 - 1.0) / 2.0),
            width: width.unwrap_or(n as f64 / 8.0),
        },
        SynthKind::Chirp => SignalSpec::Chirp {
            n,
            start_frequency: frequency,
            rate: chirp_rate.unwrap_or(frequency / n as f64),
            amplitude,
        },
    }
}

impl SourceArgs {
    fn to_source(&self) -> Result<SignalSource, CliError> {
        match (&self.input, self.synth) {
            (Some(path), None) => Ok(SignalSource::Wav(path.clone())),
            (None, Some(kind)) => Ok(SignalSource::Synthetic {
                spec: synth_spec(
                    kind,
                    self.n,
                    self.frequency,
                    self.amplitude,
                    self.phase,
                    self.center,
                    self.width,
                    self.chirp_rate,
                ),
                sample_rate: self.sample_rate,
            }),
            (Some(_), Some(_)) => Err(CliError::config("--input and --synth are exclusive")),
            (None, None) => Err(CliError::config("either --input or --synth is required")),
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn parse_methods(list: &str, params: &MethodParams) -> Result<Vec<MethodSpec>, CliError> {
    let mut methods = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let kind = match name {
            "proposed" => MethodKind::Proposed,
            "qv" => MethodKind::Qv,
            "spline" => MethodKind::Spline,
            "omp" => MethodKind::Omp,
            other => {
                return Err(CliError::config(format!(
                    "unknown method {other:?} (expected proposed|qv|spline|omp)"
                )))
            }
        };
        methods.push(params.to_spec(kind));
    }
    if methods.is_empty() {
        return Err(CliError::config("no methods selected"));
    }
    Ok(methods)
}

fn parse_grid<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| CliError::config(format!("bad {what} entry {s:?}: {e}")))
        })
        .collect()
}

fn run_synth(args: &SynthArgs) -> Result<(), CliError> {
    let spec = synth_spec(
        args.kind,
        args.n,
        args.frequency,
        args.amplitude,
        args.phase,
        args.center,
        args.width,
        args.chirp_rate,
    );
    let samples = desr_core::generate(&spec)?;
    wav::write_wav(&args.out, &samples, args.sample_rate)?;
    eprintln!("wrote {} samples to {}", samples.len(), args.out.display());
    Ok(())
}

fn run_corrupt(args: &CorruptArgs) -> Result<(), CliError> {
    let loaded = wav::load_wav(&args.input)?;
    let (corrupted, mask) = match args.kind {
        CorruptKind::Clip => desr_core::clip(&loaded.samples, args.level)?,
        CorruptKind::Missing => desr_core::random_missing(&loaded.samples, args.rate, args.seed)?,
        CorruptKind::Noise => {
            let noisy = desr_core::add_noise(&loaded.samples, args.std, args.seed)?;
            let mask = ObservationMask::full(loaded.samples.len());
            (noisy, mask)
        }
    };
    wav::write_wav(&args.out, &corrupted, loaded.sample_rate)?;
    if let Some(mask_path) = &args.mask_out {
        write_text(mask_path, &experiment::mask_to_csv(&mask))?;
    }
    eprintln!(
        "corrupted {} samples ({} observed)",
        loaded.samples.len(),
        mask.count_observed()
    );
    Ok(())
}

fn run_reconstruct(args: &ReconstructArgs) -> Result<(), CliError> {
    let loaded = wav::load_wav(&args.input)?;
    let n = loaded.samples.len();
    let mask = match &args.mask {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
            let mask = experiment::mask_from_csv(&text)?;
            if mask.n() != n {
                return Err(CliError::config(format!(
                    "mask length {} does not match signal length {n}",
                    mask.n()
                )));
            }
            mask
        }
        None => ObservationMask::full(n),
    };
    let y = &loaded.samples;
    let estimate = match args.method {
        MethodKind::Proposed => {
            let p = args.params.proposed();
            let geometry = EmbeddingGeometry::new(n, p.tau)?;
            let hp = scale_hyperparameters(p.lambda1, p.lambda2, &mask, &geometry)?;
            let config = SolverConfig {
                max_outer_iters: p.max_outer_iters,
                outer_tol: p.outer_tol,
                restarts_k: p.restarts,
                rng_seed: args.seed,
                ..Default::default()
            };
            let reports = desr_core::monte_carlo_runs(y, &mask, &hp, &config)?;
            let winner = desr_core::select_winner(&reports)?;
            if let Some(path) = &args.trajectory_out {
                let points: Vec<experiment::TrajectoryPoint> = reports
                    .iter()
                    .flat_map(|r| {
                        r.objective_trajectory.iter().enumerate().map(|(i, &f)| {
                            experiment::TrajectoryPoint {
                                segment_id: 0,
                                restart: r.restart_index,
                                iteration: i,
                                objective: f,
                            }
                        })
                    })
                    .collect();
                write_text(path, &experiment::trajectories_to_csv(&points))?;
            }
            if let Some(path) = &args.report_out {
                let report = &reports[winner];
                let json = serde_json::json!({
                    "restart_index": report.restart_index,
                    "final_objective": report.final_objective(),
                    "iterations_used": report.iterations_used,
                    "converged": report.converged,
                    "cg_warnings": report.cg_warnings,
                    "restart_final_objectives": reports
                        .iter()
                        .map(|r| r.final_objective())
                        .collect::<Vec<_>>(),
                    "seed": args.seed,
                });
                write_text(path, &serde_json::to_string_pretty(&json).unwrap())?;
            }
            reports[winner].final_model.reconstruct()
        }
        MethodKind::Qv => {
            let lambda =
                args.params.qv_lambda1 * mask.count_observed() as f64 / (n as f64 * n as f64);
            desr_core::qv_reconstruct(y, &mask, lambda)?
        }
        MethodKind::Spline => desr_core::spline_reconstruct(y, &mask)?,
        MethodKind::Omp => {
            let dict = desr_core::GaborDictionary::new(n, args.params.redundancy)?;
            desr_core::omp_reconstruct(y, &mask, &dict, args.params.epsilon)?.0
        }
    };
    wav::write_wav(&args.out, &estimate, loaded.sample_rate)?;
    eprintln!("reconstructed {} samples to {}", n, args.out.display());
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<(), CliError> {
    let config = ExperimentConfig {
        source: args.source.to_source()?,
        segment_length: args.segment_length,
        min_rms: args.min_rms,
        max_segments: args.max_segments,
        corruption: args.corruption.kind()?,
        methods: parse_methods(&args.methods, &args.params)?,
        seed: args.seed,
    };
    let outcome = experiment::run_experiment(&config)?;
    if outcome.rows.is_empty() {
        return Err(CliError::config(
            "no segments passed the RMS threshold; lower --min-rms or check the input",
        ));
    }
    write_text(&args.results_out, &experiment::results_to_csv(&outcome.rows))?;
    if let Some(path) = &args.summary_out {
        write_text(path, &experiment::summary_to_csv(&outcome.aggregates))?;
    }
    if let Some(path) = &args.trajectory_out {
        write_text(path, &experiment::trajectories_to_csv(&outcome.trajectories))?;
    }
    if let Some(path) = &args.manifest_out {
        let manifest = experiment::manifest_json(&config);
        write_text(path, &serde_json::to_string_pretty(&manifest).unwrap())?;
    }
    if let Some(dir) = &args.wav_out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
        let (signal, rate) = experiment::load_source(&config.source)?;
        let mut by_method: std::collections::BTreeMap<String, Vec<f64>> =
            std::collections::BTreeMap::new();
        for (segment_id, method, reconstruction) in &outcome.reconstructions {
            let patched = by_method.entry(method.clone()).or_insert_with(|| signal.clone());
            let start = outcome.segments[*segment_id].start;
            patched[start..start + reconstruction.len()].copy_from_slice(reconstruction);
        }
        for (method, patched) in by_method {
            wav::write_wav(&dir.join(format!("{method}.wav")), &patched, rate)?;
        }
    }
    if outcome.rows.iter().all(|r| r.status != "ok") {
        return Err(CliError::solver("every segment failed to reconstruct"));
    }
    print!("{}", experiment::summary_to_csv(&outcome.aggregates));
    eprintln!(
        "{} segments, {} rows -> {}",
        outcome.segments.len(),
        outcome.rows.len(),
        args.results_out.display()
    );
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let tau_grid: Vec<usize> = parse_grid(&args.tau_grid, "tau grid")?;
    let lambda_grid: Vec<f64> = parse_grid(&args.lambda_grid, "lambda grid")?;
    let config = ExperimentConfig {
        source: args.source.to_source()?,
        segment_length: args.segment_length,
        min_rms: args.min_rms,
        max_segments: args.max_segments,
        corruption: args.corruption.kind()?,
        methods: Vec::new(),
        seed: args.seed,
    };
    let base = args.params.proposed();
    let cells = experiment::sweep(&config, &tau_grid, &lambda_grid, &base)?;
    write_text(&args.out, &experiment::sweep_to_csv(&cells))?;
    print!("{}", experiment::sweep_to_csv(&cells));
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Synth(args) => run_synth(args),
        Command::Corrupt(args) => run_corrupt(args),
        Command::Reconstruct(args) => run_reconstruct(args),
        Command::Bench(args) => run_bench(args),
        Command::Sweep(args) => run_sweep(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
