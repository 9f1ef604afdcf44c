//! Experiment orchestration: corrupt → reconstruct → score, per segment and
//! per method, with CSV emission for per-segment rows, aggregate summaries,
//! solver trajectories, and hyper-parameter sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use desr_core::{
    monte_carlo_runs, omp_reconstruct, qv_reconstruct, scale_hyperparameters, select_winner,
    spline_reconstruct, EmbeddingGeometry, GaborDictionary, ObservationMask, SignalSpec,
    SolverConfig,
};

use crate::error::CliError;
use crate::segment::{extract_segments, Segment};
use crate::wav::load_wav;

/// Where the clean signal comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSource {
    Wav(PathBuf),
    Synthetic { spec: SignalSpec, sample_rate: u32 },
}

/// Corruption applied to every segment; per-segment seeds are derived from
/// the experiment seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorruptionKind {
    None,
    Clip { level: f64 },
    RandomMissing { rate: f64 },
    AdditiveNoise { std: f64 },
}

impl CorruptionKind {
    pub fn descriptor(&self) -> String {
        match self {
            CorruptionKind::None => "none".into(),
            CorruptionKind::Clip { level } => format!("clip({level})"),
            CorruptionKind::RandomMissing { rate } => format!("missing({rate})"),
            CorruptionKind::AdditiveNoise { std } => format!("noise({std})"),
        }
    }

    fn apply(
        &self,
        clean: &[f64],
        seed: u64,
    ) -> Result<(Vec<f64>, ObservationMask), desr_core::Error> {
        match *self {
            CorruptionKind::None => Ok((clean.to_vec(), ObservationMask::full(clean.len()))),
            CorruptionKind::Clip { level } => desr_core::clip(clean, level),
            CorruptionKind::RandomMissing { rate } => {
                desr_core::random_missing(clean, rate, seed)
            }
            CorruptionKind::AdditiveNoise { std } => {
                let noisy = desr_core::add_noise(clean, std, seed)?;
                let mask = ObservationMask::full(clean.len());
                Ok((noisy, mask))
            }
        }
    }
}

/// Settings of the rank-1 delay-embedded solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProposedParams {
    pub tau: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub restarts: usize,
    pub max_outer_iters: usize,
    pub outer_tol: f64,
}

impl Default for ProposedParams {
    fn default() -> Self {
        // audio defaults: tau = 128, lambda1 = lambda2 = 1.0, K = 20
        Self {
            tau: 128,
            lambda1: 1.0,
            lambda2: 1.0,
            restarts: 20,
            max_outer_iters: 1000,
            outer_tol: 1e-9,
        }
    }
}

/// One reconstruction method with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSpec {
    Proposed(ProposedParams),
    /// Quadratic-variation smoothing; `lambda1` is scaled by |Ω|/N² like the
    /// τ = 1 solver.
    Qv { lambda1: f64 },
    Spline,
    Omp { epsilon: f64, redundancy: f64 },
}

impl MethodSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MethodSpec::Proposed(_) => "proposed",
            MethodSpec::Qv { .. } => "qv",
            MethodSpec::Spline => "spline",
            MethodSpec::Omp { .. } => "omp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: SignalSource,
    pub segment_length: usize,
    pub min_rms: f64,
    pub max_segments: Option<usize>,
    pub corruption: CorruptionKind,
    pub methods: Vec<MethodSpec>,
    pub seed: u64,
}

/// One (segment, method, corruption) measurement. `runtime_ms` is kept in
/// memory for reporting but never serialized, so emitted CSVs stay
/// byte-identical across reruns of the same seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub segment_id: usize,
    pub method: String,
    pub corruption: String,
    pub snr_db: Option<f64>,
    pub snr_missing_db: Option<f64>,
    pub mse: Option<f64>,
    pub objective: Option<f64>,
    pub status: String,
    pub runtime_ms: f64,
}

/// Mean ± std per (method, corruption), over rows with status "ok".
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub method: String,
    pub corruption: String,
    pub segments: usize,
    pub snr_mean: f64,
    pub snr_std: f64,
    pub snr_missing_mean: f64,
    pub snr_missing_std: f64,
    pub mse_mean: f64,
}

/// Objective value after `iteration` full ALS iterations of `restart`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub segment_id: usize,
    pub restart: usize,
    pub iteration: usize,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    pub aggregates: Vec<AggregateRow>,
    pub trajectories: Vec<TrajectoryPoint>,
    pub segments: Vec<Segment>,
    pub sample_rate: u32,
    /// (segment_id, method, reconstruction), for WAV emission.
    pub reconstructions: Vec<(usize, String, Vec<f64>)>,
}

fn mix_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn now_ms() -> f64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64() * 1e3)
        .unwrap_or(0.0)
}

/// SNR restricted to the missing entries; `None` when nothing is missing.
fn snr_missing(clean: &[f64], estimate: &[f64], mask: &ObservationMask) -> Option<f64> {
    let mut signal = 0.0;
    let mut error = 0.0;
    let mut any = false;
    for i in 0..clean.len() {
        if !mask.is_observed(i) {
            any = true;
            signal += clean[i] * clean[i];
            let d = clean[i] - estimate[i];
            error += d * d;
        }
    }
    if !any || signal <= 0.0 {
        return None;
    }
    if error == 0.0 {
        return Some(desr_core::SNR_CAP_DB);
    }
    Some((10.0 * (signal / error).log10()).min(desr_core::SNR_CAP_DB))
}

pub fn load_source(source: &SignalSource) -> Result<(Vec<f64>, u32), CliError> {
    match source {
        SignalSource::Wav(path) => {
            let wav = load_wav(path)?;
            Ok((wav.samples, wav.sample_rate))
        }
        SignalSource::Synthetic { spec, sample_rate } => {
            let samples = desr_core::generate(spec).map_err(CliError::from)?;
            Ok((samples, *sample_rate))
        }
    }
}

struct MethodRun {
    estimate: Vec<f64>,
    objective: Option<f64>,
    trajectories: Vec<(usize, Vec<f64>)>,
}

fn run_method(
    method: &MethodSpec,
    clean_len: usize,
    y: &[f64],
    mask: &ObservationMask,
    solver_seed: u64,
    dictionaries: &mut BTreeMap<(usize, u64), GaborDictionary>,
) -> Result<MethodRun, desr_core::Error> {
    match *method {
        MethodSpec::Proposed(params) => {
            let geometry = EmbeddingGeometry::new(clean_len, params.tau)?;
            let hp = scale_hyperparameters(params.lambda1, params.lambda2, mask, &geometry)?;
            let config = SolverConfig {
                max_outer_iters: params.max_outer_iters,
                outer_tol: params.outer_tol,
                restarts_k: params.restarts,
                rng_seed: solver_seed,
                ..Default::default()
            };
            let reports = monte_carlo_runs(y, mask, &hp, &config)?;
            let winner = select_winner(&reports)?;
            let estimate = reports[winner].final_model.reconstruct();
            let objective = Some(reports[winner].final_objective());
            let trajectories = reports
                .iter()
                .map(|r| (r.restart_index, r.objective_trajectory.clone()))
                .collect();
            Ok(MethodRun {
                estimate,
                objective,
                trajectories,
            })
        }
        MethodSpec::Qv { lambda1 } => {
            let n = clean_len as f64;
            let lambda = lambda1 * mask.count_observed() as f64 / (n * n);
            let estimate = qv_reconstruct(y, mask, lambda)?;
            Ok(MethodRun {
                estimate,
                objective: None,
                trajectories: Vec::new(),
            })
        }
        MethodSpec::Spline => {
            let estimate = spline_reconstruct(y, mask)?;
            Ok(MethodRun {
                estimate,
                objective: None,
                trajectories: Vec::new(),
            })
        }
        MethodSpec::Omp {
            epsilon,
            redundancy,
        } => {
            let key = (clean_len, redundancy.to_bits());
            if !dictionaries.contains_key(&key) {
                dictionaries.insert(key, GaborDictionary::new(clean_len, redundancy)?);
            }
            let dict = &dictionaries[&key];
            let (estimate, _) = omp_reconstruct(y, mask, dict, epsilon)?;
            Ok(MethodRun {
                estimate,
                objective: None,
                trajectories: Vec::new(),
            })
        }
    }
}

/// Corrupt, reconstruct, and score every extracted segment with every
/// configured method. Per-segment failures land in the row's status and the
/// run continues.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, CliError> {
    if config.segment_length < 2 {
        return Err(CliError::config("segment length must be at least 2"));
    }
    if config.methods.is_empty() {
        return Err(CliError::config("at least one method is required"));
    }
    let (signal, sample_rate) = load_source(&config.source)?;
    let segments = extract_segments(
        &signal,
        config.segment_length,
        config.min_rms,
        config.max_segments,
    );
    let corruption_name = config.corruption.descriptor();

    let mut rows = Vec::new();
    let mut trajectories = Vec::new();
    let mut reconstructions = Vec::new();
    let mut dictionaries = BTreeMap::new();

    for (segment_id, segment) in segments.iter().enumerate() {
        let clean = &segment.samples;
        let corruption_seed = mix_seed(config.seed, 0x1000_0000 + segment_id as u64);
        let (y, mask) = match config.corruption.apply(clean, corruption_seed) {
            Ok(pair) => pair,
            Err(err) => {
                for method in &config.methods {
                    rows.push(ResultRow {
                        segment_id,
                        method: method.name().into(),
                        corruption: corruption_name.clone(),
                        snr_db: None,
                        snr_missing_db: None,
                        mse: None,
                        objective: None,
                        status: err.to_string(),
                        runtime_ms: 0.0,
                    });
                }
                continue;
            }
        };
        let solver_seed = mix_seed(config.seed, 0x2000_0000 + segment_id as u64);
        for method in &config.methods {
            let started = now_ms();
            match run_method(method, clean.len(), &y, &mask, solver_seed, &mut dictionaries) {
                Ok(run) => {
                    let runtime_ms = now_ms() - started;
                    let snr = desr_core::snr_db(clean, &run.estimate).ok();
                    let mse = desr_core::mse(clean, &run.estimate).ok();
                    let snr_miss = snr_missing(clean, &run.estimate, &mask);
                    for (restart, trajectory) in run.trajectories {
                        for (iteration, &objective) in trajectory.iter().enumerate() {
                            trajectories.push(TrajectoryPoint {
                                segment_id,
                                restart,
                                iteration,
                                objective,
                            });
                        }
                    }
                    reconstructions.push((segment_id, method.name().into(), run.estimate));
                    rows.push(ResultRow {
                        segment_id,
                        method: method.name().into(),
                        corruption: corruption_name.clone(),
                        snr_db: snr,
                        snr_missing_db: snr_miss,
                        mse,
                        objective: run.objective,
                        status: "ok".into(),
                        runtime_ms,
                    });
                }
                Err(err) => {
                    rows.push(ResultRow {
                        segment_id,
                        method: method.name().into(),
                        corruption: corruption_name.clone(),
                        snr_db: None,
                        snr_missing_db: None,
                        mse: None,
                        objective: None,
                        status: err.to_string().replace(',', ";"),
                        runtime_ms: now_ms() - started,
                    });
                }
            }
        }
    }

    rows.sort_by(|a, b| {
        a.segment_id
            .cmp(&b.segment_id)
            .then_with(|| a.method.cmp(&b.method))
    });
    let aggregates = aggregate_rows(&rows);
    Ok(ExperimentOutcome {
        rows,
        aggregates,
        trajectories,
        segments,
        sample_rate,
        reconstructions,
    })
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

/// Group ok-rows by (method, corruption) and compute mean/std summaries.
pub fn aggregate_rows(rows: &[ResultRow]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(String, String), Vec<&ResultRow>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.status == "ok") {
        groups
            .entry((row.method.clone(), row.corruption.clone()))
            .or_default()
            .push(row);
    }
    groups
        .into_iter()
        .map(|((method, corruption), group)| {
            let snrs: Vec<f64> = group.iter().filter_map(|r| r.snr_db).collect();
            let missing: Vec<f64> = group.iter().filter_map(|r| r.snr_missing_db).collect();
            let mses: Vec<f64> = group.iter().filter_map(|r| r.mse).collect();
            let (snr_mean, snr_std) = mean_and_std(&snrs);
            let (snr_missing_mean, snr_missing_std) = mean_and_std(&missing);
            let (mse_mean, _) = mean_and_std(&mses);
            AggregateRow {
                method,
                corruption,
                segments: group.len(),
                snr_mean,
                snr_std,
                snr_missing_mean,
                snr_missing_std,
                mse_mean,
            }
        })
        .collect()
}

/// One sweep cell: aggregate accuracy of the solver at (τ, λ₁, λ₂).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub tau: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub segments: usize,
    pub snr_mean: f64,
    pub snr_missing_mean: f64,
    pub mse_mean: f64,
}

/// Run the solver over every (τ, λ₁, λ₂) combination of the grids; the
/// segment set, corruption draws, and solver seeds are shared across cells.
pub fn sweep(
    config: &ExperimentConfig,
    tau_grid: &[usize],
    lambda_grid: &[f64],
    base: &ProposedParams,
) -> Result<Vec<SweepCell>, CliError> {
    if tau_grid.is_empty() || lambda_grid.is_empty() {
        return Err(CliError::config("sweep grids must be nonempty"));
    }
    let mut cells = Vec::with_capacity(tau_grid.len() * lambda_grid.len() * lambda_grid.len());
    for &tau in tau_grid {
        for &lambda1 in lambda_grid {
            for &lambda2 in lambda_grid {
                let mut cell_config = config.clone();
                cell_config.methods = vec![MethodSpec::Proposed(ProposedParams {
                    tau,
                    lambda1,
                    lambda2,
                    ..*base
                })];
                let outcome = run_experiment(&cell_config)?;
                let aggregate = outcome
                    .aggregates
                    .iter()
                    .find(|a| a.method == "proposed")
                    .cloned();
                let (segments, snr_mean, snr_missing_mean, mse_mean) = match aggregate {
                    Some(a) => (a.segments, a.snr_mean, a.snr_missing_mean, a.mse_mean),
                    None => (0, f64::NAN, f64::NAN, f64::NAN),
                };
                cells.push(SweepCell {
                    tau,
                    lambda1,
                    lambda2,
                    segments,
                    snr_mean,
                    snr_missing_mean,
                    mse_mean,
                });
            }
        }
    }
    Ok(cells)
}

fn push_opt(line: &mut String, value: Option<f64>) {
    if let Some(v) = value {
        let _ = write!(line, "{v}");
    }
}

/// Per-segment rows as CSV (runtime is intentionally not serialized).
pub fn results_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("segment,method,corruption,snr_db,snr_missing_db,mse,objective,status\n");
    for row in rows {
        let mut line = format!("{},{},{},", row.segment_id, row.method, row.corruption);
        push_opt(&mut line, row.snr_db);
        line.push(',');
        push_opt(&mut line, row.snr_missing_db);
        line.push(',');
        push_opt(&mut line, row.mse);
        line.push(',');
        push_opt(&mut line, row.objective);
        line.push(',');
        line.push_str(&row.status);
        line.push('\n');
        out.push_str(&line);
    }
    out
}

fn parse_opt(field: &str) -> Result<Option<f64>, CliError> {
    if field.is_empty() {
        Ok(None)
    } else {
        field
            .parse::<f64>()
            .map(Some)
            .map_err(|e| CliError::io(format!("bad float {field:?}: {e}")))
    }
}

/// Parse the output of [`results_to_csv`] back into rows (runtime is zero).
pub fn results_from_csv(text: &str) -> Result<Vec<ResultRow>, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::io("empty results csv"))?;
    if header != "segment,method,corruption,snr_db,snr_missing_db,mse,objective,status" {
        return Err(CliError::io(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(CliError::io(format!("bad results row {line:?}")));
        }
        rows.push(ResultRow {
            segment_id: fields[0]
                .parse()
                .map_err(|e| CliError::io(format!("bad segment id: {e}")))?,
            method: fields[1].into(),
            corruption: fields[2].into(),
            snr_db: parse_opt(fields[3])?,
            snr_missing_db: parse_opt(fields[4])?,
            mse: parse_opt(fields[5])?,
            objective: parse_opt(fields[6])?,
            status: fields[7].into(),
            runtime_ms: 0.0,
        });
    }
    Ok(rows)
}

pub fn summary_to_csv(aggregates: &[AggregateRow]) -> String {
    let mut out = String::from(
        "method,corruption,segments,snr_mean,snr_std,snr_missing_mean,snr_missing_std,mse_mean\n",
    );
    for a in aggregates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            a.method,
            a.corruption,
            a.segments,
            a.snr_mean,
            a.snr_std,
            a.snr_missing_mean,
            a.snr_missing_std,
            a.mse_mean
        );
    }
    out
}

pub fn trajectories_to_csv(points: &[TrajectoryPoint]) -> String {
    let mut out = String::from("segment,restart,iteration,objective\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.segment_id, p.restart, p.iteration, p.objective
        );
    }
    out
}

pub fn sweep_to_csv(cells: &[SweepCell]) -> String {
    let mut out = String::from("tau,lambda1,lambda2,segments,snr_mean,snr_missing_mean,mse_mean\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.tau, c.lambda1, c.lambda2, c.segments, c.snr_mean, c.snr_missing_mean, c.mse_mean
        );
    }
    out
}

/// Mask CSV: one `index,observed` row per sample.
pub fn mask_to_csv(mask: &ObservationMask) -> String {
    let mut out = String::from("index,observed\n");
    for i in 0..mask.n() {
        let _ = writeln!(out, "{},{}", i, u8::from(mask.is_observed(i)));
    }
    out
}

pub fn mask_from_csv(text: &str) -> Result<ObservationMask, CliError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CliError::io("empty mask csv"))?;
    if header != "index,observed" {
        return Err(CliError::io(format!("unexpected mask header {header:?}")));
    }
    let mut observed = Vec::new();
    for (expected, line) in lines.filter(|l| !l.is_empty()).enumerate() {
        let (idx, flag) = line
            .split_once(',')
            .ok_or_else(|| CliError::io(format!("bad mask row {line:?}")))?;
        let idx: usize = idx
            .parse()
            .map_err(|e| CliError::io(format!("bad mask index: {e}")))?;
        if idx != expected {
            return Err(CliError::io(format!(
                "mask rows out of order: expected {expected}, got {idx}"
            )));
        }
        observed.push(match flag {
            "0" => false,
            "1" => true,
            other => return Err(CliError::io(format!("bad mask flag {other:?}"))),
        });
    }
    Ok(ObservationMask::new(observed))
}

/// JSON manifest capturing the full configuration and seed.
pub fn manifest_json(config: &ExperimentConfig) -> serde_json::Value {
    let source = match &config.source {
        SignalSource::Wav(path) => serde_json::json!({"wav": path.display().to_string()}),
        SignalSource::Synthetic { spec, sample_rate } => serde_json::json!({
            "synthetic": format!("{spec:?}"),
            "sample_rate": sample_rate,
        }),
    };
    let methods: Vec<serde_json::Value> = config
        .methods
        .iter()
        .map(|m| match *m {
            MethodSpec::Proposed(p) => serde_json::json!({
                "method": "proposed",
                "tau": p.tau,
                "lambda1": p.lambda1,
                "lambda2": p.lambda2,
                "restarts": p.restarts,
                "max_outer_iters": p.max_outer_iters,
                "outer_tol": p.outer_tol,
            }),
            MethodSpec::Qv { lambda1 } => serde_json::json!({"method": "qv", "lambda1": lambda1}),
            MethodSpec::Spline => serde_json::json!({"method": "spline"}),
            MethodSpec::Omp {
                epsilon,
                redundancy,
            } => serde_json::json!({
                "method": "omp",
                "epsilon": epsilon,
                "redundancy": redundancy,
            }),
        })
        .collect();
    serde_json::json!({
        "source": source,
        "segment_length": config.segment_length,
        "min_rms": config.min_rms,
        "max_segments": config.max_segments,
        "corruption": config.corruption.descriptor(),
        "methods": methods,
        "seed": config.seed,
    })
}
