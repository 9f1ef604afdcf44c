//! Alternating least squares with unit-ball projections for the rank-1
//! delay-embedded model, plus the Monte-Carlo restart wrapper.
//!
//! One outer iteration performs:
//!
//! ```text
//! a ← solve [σ²·Mᵦᵀ P_Ω Mᵦ + λ_a LᵀL] a = σ·Mᵦᵀ P_Ω y     (CG, matrix-free)
//! a ← a / ‖a‖
//! σ ← ⟨y, P_Ω z⟩ / ‖P_Ω z‖²  with z = H†(a bᵀ)
//! b ← (symmetric solve in b)
//! b ← b / ‖b‖
//! σ ← (as above)
//! ```
//!
//! where `Mᵦ a = H†(a bᵀ)` is the scaled valid convolution. The normal
//! equations include the observation projection P_Ω in the left-hand
//! operator, which is what stationarity of the masked objective requires;
//! on a full mask this coincides with the unprojected form. Each inner
//! solve warm-starts the conjugate gradient from the current factor.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{adjoint_wrt_a, adjoint_wrt_b, inverse_embed_rank1, EmbeddingGeometry};
use crate::error::{Error, Result};
use crate::model::{objective, DifferenceOperator, Hyperparams, ObservationMask, Rank1Model};

/// Iteration counts, tolerances, restart count, and the random seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Cap on full ALS iterations per restart.
    pub max_outer_iters: usize,
    /// Relative objective-change threshold that ends a restart.
    pub outer_tol: f64,
    /// Relative residual threshold for the inner conjugate-gradient solves.
    pub cg_tol: f64,
    /// Cap on CG iterations; `None` selects min(10·max(T, τ), 2000).
    pub cg_max_iters: Option<usize>,
    /// Number of Monte-Carlo restarts K.
    pub restarts_k: usize,
    /// Seed behind all random initialization.
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_outer_iters: 1000,
            outer_tol: 1e-9,
            cg_tol: 1e-10,
            cg_max_iters: None,
            restarts_k: 10,
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_outer_iters == 0 || self.restarts_k == 0 {
            return Err(Error::Parameter(String::from(
                "iteration and restart counts must be at least 1",
            )));
        }
        if self.cg_max_iters == Some(0) {
            return Err(Error::Parameter(String::from(
                "cg_max_iters must be at least 1",
            )));
        }
        if !(self.outer_tol > 0.0) || !(self.cg_tol > 0.0) {
            return Err(Error::Parameter(String::from(
                "tolerances must be positive",
            )));
        }
        Ok(())
    }

    fn effective_cg_max(&self, geometry: &EmbeddingGeometry) -> usize {
        self.cg_max_iters
            .unwrap_or_else(|| (10 * geometry.t_rows().max(geometry.tau())).min(2000))
    }
}

/// Outcome of one restart (or of the winning restart for the Monte-Carlo
/// wrapper).
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    /// Objective value at initialization followed by one value per full
    /// ALS iteration.
    pub objective_trajectory: Vec<f64>,
    pub final_model: Rank1Model,
    /// Which restart produced this model (0 for a direct `als_solve`).
    pub restart_index: usize,
    /// Whether the relative objective change fell below `outer_tol`.
    pub converged: bool,
    /// Set when a σ update became undefined and the restart was abandoned.
    pub degenerate: bool,
    /// Full ALS iterations executed.
    pub iterations_used: usize,
    /// Number of inner CG solves that hit the iteration cap.
    pub cg_warnings: usize,
    /// Final objective of every restart (∞ for abandoned ones); a single
    /// entry for a direct `als_solve`.
    pub restart_final_objectives: Vec<f64>,
}

impl SolverReport {
    /// Final objective value (last trajectory entry).
    pub fn final_objective(&self) -> f64 {
        *self
            .objective_trajectory
            .last()
            .expect("trajectory is never empty")
    }
}

/// Result of one regularized factor solve.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorUpdate {
    /// Unnormalized solution of the normal equation.
    pub factor: Vec<f64>,
    pub cg_converged: bool,
    pub cg_iterations: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct CgSolve {
    x: Vec<f64>,
    converged: bool,
    iterations: usize,
}

/// Conjugate gradient on a symmetric positive (semi-)definite operator,
/// warm-started from `x0`. Stops at a relative residual of `tol` or after
/// `max_iters` iterations, whichever comes first.
fn conjugate_gradient<F>(apply: F, rhs: &[f64], x0: &[f64], tol: f64, max_iters: usize) -> CgSolve
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = rhs.len();
    let rhs_norm = norm(rhs);
    if rhs_norm == 0.0 {
        return CgSolve {
            x: vec![0.0; n],
            converged: true,
            iterations: 0,
        };
    }
    let threshold = tol * rhs_norm;
    let mut x = x0.to_vec();
    let ax = apply(&x);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut rs = dot(&r, &r);
    let mut iterations = 0;
    while rs.sqrt() > threshold && iterations < max_iters {
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) || !pap.is_finite() {
            // direction of zero curvature: the operator is only
            // semi-definite along p, keep the current iterate
            break;
        }
        let alpha = rs / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new = dot(&r, &r);
        let beta = rs_new / rs;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rs = rs_new;
        iterations += 1;
    }
    CgSolve {
        x,
        converged: rs.sqrt() <= threshold,
        iterations,
    }
}

fn check_solve_inputs(model: &Rank1Model, y: &[f64], mask: &ObservationMask) -> Result<()> {
    let n = model.geometry().n();
    if y.len() != n {
        return Err(Error::Dimension {
            what: "signal y",
            expected: n,
            actual: y.len(),
        });
    }
    mask.require_len(n)?;
    mask.require_nonempty()
}

/// Solve the regularized normal equation for `a` (returned unnormalized).
///
/// The left operator applied to v is
/// `σ²·adjoint_wrt_a(P_Ω·H†(v bᵀ), b) + λ_a·LᵀL v`, the right-hand side is
/// `σ·adjoint_wrt_a(P_Ω y, b)`.
pub fn update_a(
    model: &Rank1Model,
    y: &[f64],
    mask: &ObservationMask,
    hp: &Hyperparams,
    config: &SolverConfig,
) -> Result<FactorUpdate> {
    check_solve_inputs(model, y, mask)?;
    if hp.lambda_a == 0.0 && model.b.iter().all(|&v| v == 0.0) {
        return Err(Error::Singular("a update with zero b and no regularization"));
    }
    let sigma = model.sigma;
    let b = &model.b;
    let diff = DifferenceOperator::new(model.a.len());
    let mut rhs = adjoint_wrt_a(&mask.project(y), b)?;
    for v in &mut rhs {
        *v *= sigma;
    }
    let lambda = hp.lambda_a;
    let apply = |v: &[f64]| -> Vec<f64> {
        let mut z = inverse_embed_rank1(v, b).expect("factor lengths are consistent");
        mask.project_in_place(&mut z);
        let mut out = adjoint_wrt_a(&z, b).expect("factor lengths are consistent");
        for o in out.iter_mut() {
            *o *= sigma * sigma;
        }
        if lambda > 0.0 {
            let g = diff.gram_apply(v).expect("length fixed by operator");
            for (o, gi) in out.iter_mut().zip(&g) {
                *o += lambda * gi;
            }
        }
        out
    };
    let solve = conjugate_gradient(
        apply,
        &rhs,
        &model.a,
        config.cg_tol,
        config.effective_cg_max(model.geometry()),
    );
    Ok(FactorUpdate {
        factor: solve.x,
        cg_converged: solve.converged,
        cg_iterations: solve.iterations,
    })
}

/// Solve the regularized normal equation for `b` (returned unnormalized);
/// symmetric to [`update_a`] with `adjoint_wrt_b` and λ_b.
pub fn update_b(
    model: &Rank1Model,
    y: &[f64],
    mask: &ObservationMask,
    hp: &Hyperparams,
    config: &SolverConfig,
) -> Result<FactorUpdate> {
    check_solve_inputs(model, y, mask)?;
    if hp.lambda_b == 0.0 && model.a.iter().all(|&v| v == 0.0) {
        return Err(Error::Singular("b update with zero a and no regularization"));
    }
    let sigma = model.sigma;
    let a = &model.a;
    let diff = DifferenceOperator::new(model.b.len());
    let mut rhs = adjoint_wrt_b(&mask.project(y), a)?;
    for v in &mut rhs {
        *v *= sigma;
    }
    let lambda = hp.lambda_b;
    let apply = |v: &[f64]| -> Vec<f64> {
        let mut z = inverse_embed_rank1(a, v).expect("factor lengths are consistent");
        mask.project_in_place(&mut z);
        let mut out = adjoint_wrt_b(&z, a).expect("factor lengths are consistent");
        for o in out.iter_mut() {
            *o *= sigma * sigma;
        }
        if lambda > 0.0 {
            let g = diff.gram_apply(v).expect("length fixed by operator");
            for (o, gi) in out.iter_mut().zip(&g) {
                *o += lambda * gi;
            }
        }
        out
    };
    let solve = conjugate_gradient(
        apply,
        &rhs,
        &model.b,
        config.cg_tol,
        config.effective_cg_max(model.geometry()),
    );
    Ok(FactorUpdate {
        factor: solve.x,
        cg_converged: solve.converged,
        cg_iterations: solve.iterations,
    })
}

/// Exact least-squares scale: σ = ⟨y, P_Ω z⟩ / ‖P_Ω z‖² for z = H†(a bᵀ).
pub fn update_sigma(model: &Rank1Model, y: &[f64], mask: &ObservationMask) -> Result<f64> {
    check_solve_inputs(model, y, mask)?;
    let z = inverse_embed_rank1(&model.a, &model.b)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..y.len() {
        if mask.is_observed(i) {
            num += y[i] * z[i];
            den += z[i] * z[i];
        }
    }
    if den <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateModel);
    }
    Ok(num / den)
}

fn normalized(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let nrm = norm(&v);
    if nrm > 1e-300 {
        for x in &mut v {
            *x /= nrm;
        }
        Some(v)
    } else {
        None
    }
}

/// Run the ALS loop from the given initial factors until the relative
/// objective change drops below `outer_tol` or `max_outer_iters` is hit.
///
/// The initial factors are normalized, σ is initialized by the exact scale
/// update, and the objective is recorded at initialization and after every
/// full iteration. A σ update that becomes undefined abandons the run and
/// flags the report as degenerate.
pub fn als_solve(
    y: &[f64],
    mask: &ObservationMask,
    hp: &Hyperparams,
    config: &SolverConfig,
    init_a: &[f64],
    init_b: &[f64],
) -> Result<SolverReport> {
    config.validate()?;
    let geometry = EmbeddingGeometry::new(y.len(), hp.tau)?;
    mask.require_len(y.len())?;
    mask.require_nonempty()?;
    let a = normalized(init_a.to_vec())
        .ok_or_else(|| Error::Parameter(String::from("initial factor a must be nonzero")))?;
    let b = normalized(init_b.to_vec())
        .ok_or_else(|| Error::Parameter(String::from("initial factor b must be nonzero")))?;
    let mut model = Rank1Model::new(a, b, 0.0, geometry)?;

    let mut trajectory = Vec::new();
    let mut cg_warnings = 0usize;
    let mut converged = false;
    let mut degenerate = false;
    let mut iterations_used = 0usize;

    match update_sigma(&model, y, mask) {
        Ok(s) => model.sigma = s,
        Err(Error::DegenerateModel) => degenerate = true,
        Err(e) => return Err(e),
    }
    trajectory.push(objective(&model, y, mask, hp)?);

    if !degenerate {
        for _ in 0..config.max_outer_iters {
            let update = update_a(&model, y, mask, hp, config)?;
            if !update.cg_converged {
                cg_warnings += 1;
            }
            if let Some(a) = normalized(update.factor) {
                model.a = a;
            }
            match update_sigma(&model, y, mask) {
                Ok(s) => model.sigma = s,
                Err(Error::DegenerateModel) => {
                    degenerate = true;
                    break;
                }
                Err(e) => return Err(e),
            }

            let update = update_b(&model, y, mask, hp, config)?;
            if !update.cg_converged {
                cg_warnings += 1;
            }
            if let Some(b) = normalized(update.factor) {
                model.b = b;
            }
            match update_sigma(&model, y, mask) {
                Ok(s) => model.sigma = s,
                Err(Error::DegenerateModel) => {
                    degenerate = true;
                    break;
                }
                Err(e) => return Err(e),
            }

            iterations_used += 1;
            let previous = *trajectory.last().expect("trajectory holds the initial value");
            let value = objective(&model, y, mask, hp)?;
            trajectory.push(value);
            if (previous - value).abs() <= config.outer_tol * previous.abs().max(f64::MIN_POSITIVE)
            {
                converged = true;
                break;
            }
        }
    }

    if degenerate {
        // keep the report invariant: the last trajectory entry is the
        // objective of the state we are returning
        trajectory.push(objective(&model, y, mask, hp)?);
    }

    let final_objective = *trajectory.last().expect("trajectory is nonempty");
    Ok(SolverReport {
        objective_trajectory: trajectory,
        final_model: model,
        restart_index: 0,
        converged,
        degenerate,
        iterations_used,
        cg_warnings,
        restart_final_objectives: vec![final_objective],
    })
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller from two uniforms
    loop {
        let u1: f64 = rng.gen();
        if u1 > 0.0 {
            let u2: f64 = rng.gen();
            return (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos();
        }
    }
}

fn gaussian_vec<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| standard_normal(rng)).collect()
}

/// Run all `restarts_k` ALS restarts from independent Gaussian inits and
/// return every per-restart report. Restart k draws from the stream k of the
/// seeded generator, so reports are reproducible and independent of any
/// evaluation order.
pub fn monte_carlo_runs(
    y: &[f64],
    mask: &ObservationMask,
    hp: &Hyperparams,
    config: &SolverConfig,
) -> Result<Vec<SolverReport>> {
    config.validate()?;
    let geometry = EmbeddingGeometry::new(y.len(), hp.tau)?;
    let mut reports = Vec::with_capacity(config.restarts_k);
    for k in 0..config.restarts_k {
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        rng.set_stream(k as u64);
        let init_a = gaussian_vec(&mut rng, geometry.t_rows());
        let init_b = gaussian_vec(&mut rng, geometry.tau());
        let mut report = als_solve(y, mask, hp, config, &init_a, &init_b)?;
        report.restart_index = k;
        reports.push(report);
    }
    Ok(reports)
}

/// Index of the restart with the lowest final objective; degenerate and
/// non-finite runs are skipped, ties go to the lowest index.
pub fn select_winner(reports: &[SolverReport]) -> Result<usize> {
    let mut winner: Option<(usize, f64)> = None;
    for (k, report) in reports.iter().enumerate() {
        if report.degenerate {
            continue;
        }
        let value = report.final_objective();
        if !value.is_finite() {
            continue;
        }
        if winner.map_or(true, |(_, best)| value < best) {
            winner = Some((k, value));
        }
    }
    winner
        .map(|(k, _)| k)
        .ok_or(Error::AllRestartsDegenerate)
}

/// K restarts from random Gaussian initializations; returns the run with the
/// minimum final objective. Deterministic given `config.rng_seed`.
pub fn monte_carlo_solve(
    y: &[f64],
    mask: &ObservationMask,
    hp: &Hyperparams,
    config: &SolverConfig,
) -> Result<SolverReport> {
    let reports = monte_carlo_runs(y, mask, hp, config)?;
    let winner = select_winner(&reports)?;
    let finals: Vec<f64> = reports
        .iter()
        .map(|r| {
            if r.degenerate || !r.final_objective().is_finite() {
                f64::INFINITY
            } else {
                r.final_objective()
            }
        })
        .collect();
    let mut report = reports.into_iter().nth(winner).expect("winner index is valid");
    report.restart_final_objectives = finals;
    Ok(report)
}
