//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them). Criteria 10 and 11 exercise the
//! experiment harness and live in the `desr` crate's acceptance suite.

mod common;

use std::time::Instant;

use common::*;
use desr_core::{
    als_solve, clip, delay_embed, inverse_delay_embed, inverse_embed_rank1, monte_carlo_runs,
    monte_carlo_solve, mse, objective, qv_reconstruct, scale_hyperparameters, select_winner,
    snr_db, soft_smoothness_gap, spline_reconstruct, update_a, update_b, EmbeddingGeometry,
    Hyperparams, ObservationMask, Rank1Model, SignalSpec, SolverConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn criterion(id: u32, name: &str, pass: bool, details: &str) -> bool {
    println!(
        "criterion {id:02} {name}: {} ({details})",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| uniform(rng, -1.0, 1.0)).collect()
}

fn sine(n: usize) -> Vec<f64> {
    desr_core::generate(&SignalSpec::Sine {
        n,
        frequency: 1.0 / 32.0,
        amplitude: 1.0,
        phase: 0.0,
    })
    .unwrap()
}

fn wavelet(n: usize) -> Vec<f64> {
    desr_core::generate(&SignalSpec::Wavelet {
        n,
        frequency: 1.0 / 16.0,
        amplitude: 1.0,
        center: (n as f64 - 1.0) / 2.0,
        width: n as f64 / 8.0,
    })
    .unwrap()
}

#[test]
fn c01_operator_identity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=256);
        let tau = rng.gen_range(1..=n);
        let y = random_vec(&mut rng, n);
        let embedded = delay_embed(&y, tau).unwrap();
        let back = embedded.inverse();
        worst = worst.max(rel_l2_error(&back, &y));
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = worst <= 1e-12 && elapsed < 1.0;
    assert!(criterion(
        1,
        "operator identity",
        pass,
        &format!("max rel err {worst:.2e}, {elapsed:.3} s")
    ));
}

#[test]
fn c02_convolution_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=96);
        let tau = rng.gen_range(1..=n);
        let t_rows = n + tau - 1;
        let a = random_vec(&mut rng, t_rows);
        let b = random_vec(&mut rng, tau);
        let fast = inverse_embed_rank1(&a, &b).unwrap();
        let oracle = outer_product_inverse(&a, &b);
        worst = worst.max(rel_l2_error(&fast, &oracle));
    }
    let pass = worst <= 1e-12;
    assert!(criterion(
        2,
        "convolution equivalence",
        pass,
        &format!("max rel err {worst:.2e}")
    ));
}

#[test]
fn c03_rank1_universality() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=64);
        let tau = rng.gen_range(1..=n);
        let x = random_vec(&mut rng, n);
        // a = [0_{tau-1}; x], b = [tau; 0_{tau-1}]
        let mut a = vec![0.0; tau - 1];
        a.extend_from_slice(&x);
        let mut b = vec![tau as f64];
        b.extend(vec![0.0; tau - 1]);
        let direct = inverse_embed_rank1(&a, &b).unwrap();
        let geometry = EmbeddingGeometry::new(n, tau).unwrap();
        let model = Rank1Model::new(a.clone(), b.clone(), 1.0, geometry).unwrap();
        let reconstructed = model.reconstruct();
        for i in 0..n {
            let tolerance = 4.0 * f64::EPSILON * x[i].abs();
            worst = worst.max((direct[i] - x[i]).abs() - tolerance);
            worst = worst.max((reconstructed[i] - x[i]).abs() - tolerance);
        }
    }
    let pass = worst <= 0.0;
    assert!(criterion(
        3,
        "rank-1 universality",
        pass,
        &format!("worst excess beyond round-off {worst:.2e}")
    ));
}

#[test]
fn c04_normal_equation_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let n = rng.gen_range(8..=20);
        let tau = rng.gen_range(2..=6.min(n));
        let geometry = EmbeddingGeometry::new(n, tau).unwrap();
        let t_rows = geometry.t_rows();
        let mut a = random_vec(&mut rng, t_rows);
        let na = l2(&a);
        a.iter_mut().for_each(|v| *v /= na);
        let mut b = random_vec(&mut rng, tau);
        let nb = l2(&b);
        b.iter_mut().for_each(|v| *v /= nb);
        let sigma = uniform(&mut rng, 0.3, 2.0);
        let model = Rank1Model::new(a, b, sigma, geometry).unwrap();
        let y = random_vec(&mut rng, n);
        let observed: Vec<bool> = (0..n).map(|i| (i + trial) % 4 != 1).collect();
        let mask = ObservationMask::new(observed.clone());
        let hp = Hyperparams::direct(uniform(&mut rng, 0.005, 0.1), uniform(&mut rng, 0.005, 0.1), tau)
            .unwrap();
        let config = SolverConfig {
            cg_tol: 1e-13,
            ..Default::default()
        };

        let update = update_a(&model, &y, &mask, &hp, &config).unwrap();
        let forward = dense_forward_a(&model.b, n);
        let expected = dense_normal_solve(&forward, n, t_rows, &observed, &y, sigma, hp.lambda_a);
        worst = worst.max(rel_l2_error(&update.factor, &expected));

        let update = update_b(&model, &y, &mask, &hp, &config).unwrap();
        let forward = dense_forward_b(&model.a, n);
        let expected = dense_normal_solve(&forward, n, tau, &observed, &y, sigma, hp.lambda_b);
        worst = worst.max(rel_l2_error(&update.factor, &expected));
    }
    let pass = worst <= 1e-8;
    assert!(criterion(
        4,
        "normal-equation correctness",
        pass,
        &format!("max rel err {worst:.2e}")
    ));
}

/// The reduction claim behind this criterion holds for the model family:
/// with τ = 1 the objective matches the quadratic-variation objective under
/// λ_a = σ²λ. The fixed point of the projected ALS, however, satisfies
/// (P_Ω + λ*LᵀL)x = (1/c)·P_Ω y with c = σ²‖P_Ω a‖²/(σ²‖P_Ω a‖² + λ_a‖La‖²),
/// so the converged reconstruction is a *scalar multiple* of the QV
/// solution, not the QV solution itself. The directional (scale-aligned)
/// error reaches solver precision; the direct error pinned here scales with
/// λ and sits orders of magnitude above 1e−6 for ordinary weights. The
/// assertion is kept as specified and is expected to fail; the printed
/// table shows both errors per instance.
#[test]
fn c05_qv_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let lambdas = [0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0];
    let mut worst_direct = 0.0f64;
    let mut worst_aligned = 0.0f64;
    println!("  lambda1    direct_rel_err  aligned_rel_err");
    for trial in 0..20 {
        let lambda1 = lambdas[trial % lambdas.len()];
        let n = 24 + 8 * (trial % 3);
        let base: Vec<f64> = sine(n);
        let y: Vec<f64> = base
            .iter()
            .map(|v| v + 0.3 * uniform(&mut rng, -1.0, 1.0))
            .collect();
        let observed: Vec<bool> = (0..n).map(|_| rng.gen::<f64>() > 0.25).collect();
        let mask = if observed.iter().any(|&o| o) {
            ObservationMask::new(observed)
        } else {
            ObservationMask::full(n)
        };
        let geometry = EmbeddingGeometry::new(n, 1).unwrap();
        let hp = scale_hyperparameters(lambda1, lambda1, &mask, &geometry).unwrap();
        let config = SolverConfig {
            restarts_k: 2,
            rng_seed: 1000 + trial as u64,
            max_outer_iters: 6000,
            outer_tol: 1e-14,
            cg_tol: 1e-13,
            ..Default::default()
        };
        let report = monte_carlo_solve(&y, &mask, &hp, &config).unwrap();
        let x = report.final_model.reconstruct();
        let sigma = report.final_model.sigma;
        let qv = qv_reconstruct(&y, &mask, hp.lambda_a / (sigma * sigma)).unwrap();
        let direct = rel_l2_error(&x, &qv);
        let scale = x.iter().zip(&qv).map(|(a, b)| a * b).sum::<f64>()
            / qv.iter().map(|v| v * v).sum::<f64>();
        let aligned: Vec<f64> = x.iter().map(|v| v / scale).collect();
        let aligned_err = rel_l2_error(&aligned, &qv);
        println!("  {lambda1:<9} {direct:<15.3e} {aligned_err:.3e}");
        worst_direct = worst_direct.max(direct);
        worst_aligned = worst_aligned.max(aligned_err);
    }
    let pass = worst_direct <= 1e-6;
    assert!(criterion(
        5,
        "qv reduction at tau=1",
        pass,
        &format!("max direct rel err {worst_direct:.2e}, max scale-aligned {worst_aligned:.2e}")
    ));
}

#[test]
fn c06_soft_smoothness_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut worst_violation = f64::NEG_INFINITY;
    for trial in 0..1000 {
        let n = [16, 32, 64, 96][trial % 4];
        let a = random_vec(&mut rng, n);
        let b = random_vec(&mut rng, n);
        let (lhs, rhs) = soft_smoothness_gap(&a, &b).unwrap();
        worst_violation = worst_violation.max(rhs - lhs);
    }
    let pass = worst_violation <= 1e-10;
    assert!(criterion(
        6,
        "soft-smoothness inequality",
        pass,
        &format!("max rhs-lhs {worst_violation:.2e}")
    ));
}

#[test]
fn c07_tau_trend_on_clipped_sine() {
    let started = Instant::now();
    let clean = sine(128);
    let (y, mask) = clip(&clean, 0.4).unwrap();
    let mut mses = Vec::new();
    for tau in [1usize, 64] {
        let geometry = EmbeddingGeometry::new(128, tau).unwrap();
        let hp = scale_hyperparameters(0.1, 0.1, &mask, &geometry).unwrap();
        let config = SolverConfig {
            restarts_k: 10,
            rng_seed: 7,
            ..Default::default()
        };
        let report = monte_carlo_solve(&y, &mask, &hp, &config).unwrap();
        mses.push(mse(&clean, &report.final_model.reconstruct()).unwrap());
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = mses[1] < mses[0] && elapsed < 120.0;
    assert!(criterion(
        7,
        "declipping improves with larger tau",
        pass,
        &format!("mse tau=1 {:.3e}, tau=64 {:.3e}, {elapsed:.1} s", mses[0], mses[1])
    ));
}

#[test]
fn c08_declipping_margin_over_baselines() {
    let started = Instant::now();
    let mut pass = true;
    let mut details = String::new();
    for (name, clean) in [("sine", sine(128)), ("wavelet", wavelet(128))] {
        let (y, mask) = clip(&clean, 0.2).unwrap();
        let geometry = EmbeddingGeometry::new(128, 64).unwrap();
        let hp = scale_hyperparameters(1.0, 1.0, &mask, &geometry).unwrap();
        let config = SolverConfig {
            restarts_k: 10,
            rng_seed: 8,
            ..Default::default()
        };
        let report = monte_carlo_solve(&y, &mask, &hp, &config).unwrap();
        let proposed = snr_db(&clean, &report.final_model.reconstruct()).unwrap();
        let lambda_qv = 1.0 * mask.count_observed() as f64 / (128.0 * 128.0);
        let qv = snr_db(&clean, &qv_reconstruct(&y, &mask, lambda_qv).unwrap()).unwrap();
        let spline = snr_db(&clean, &spline_reconstruct(&y, &mask).unwrap()).unwrap();
        pass &= proposed >= qv + 3.0 && proposed >= spline + 3.0;
        details.push_str(&format!(
            "{name}: proposed {proposed:.1} dB, qv {qv:.1} dB, spline {spline:.1} dB; "
        ));
    }
    let elapsed = started.elapsed().as_secs_f64();
    details.push_str(&format!("{elapsed:.1} s"));
    pass &= elapsed < 300.0;
    assert!(criterion(8, "declipping margin >= 3 dB", pass, &details));
}

#[test]
fn c09_hyperparameter_trend() {
    let started = Instant::now();
    let clean = sine(128);
    let (y, mask) = clip(&clean, 0.4).unwrap();
    let mut best: Option<((usize, f64), f64)> = None;
    let mut details = String::new();
    for tau in [8usize, 64] {
        for lambda in [0.001, 1.0] {
            let geometry = EmbeddingGeometry::new(128, tau).unwrap();
            let hp = scale_hyperparameters(lambda, lambda, &mask, &geometry).unwrap();
            let config = SolverConfig {
                restarts_k: 10,
                rng_seed: 9,
                max_outer_iters: 500,
                ..Default::default()
            };
            let report = monte_carlo_solve(&y, &mask, &hp, &config).unwrap();
            let snr = snr_db(&clean, &report.final_model.reconstruct()).unwrap();
            details.push_str(&format!("({tau},{lambda}) {snr:.1} dB; "));
            if best.map_or(true, |(_, s)| snr > s) {
                best = Some(((tau, lambda), snr));
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    details.push_str(&format!("{elapsed:.1} s"));
    let ((best_tau, best_lambda), _) = best.unwrap();
    let pass = best_tau == 64 && best_lambda == 1.0 && elapsed < 600.0;
    assert!(criterion(
        9,
        "best grid cell at large tau and lambda",
        pass,
        &details
    ));
}

#[test]
fn c12_monte_carlo_selection() {
    let mut rng = ChaCha8Rng::seed_from_u64(112);
    let mut pass = true;
    let mut checked = 0;
    for trial in 0..5 {
        let n = 48;
        let clean = sine(n);
        let y: Vec<f64> = clean
            .iter()
            .map(|v| v + 0.1 * uniform(&mut rng, -1.0, 1.0))
            .collect();
        let observed: Vec<bool> = (0..n).map(|_| rng.gen::<f64>() > 0.3).collect();
        let mask = ObservationMask::new(observed);
        let geometry = EmbeddingGeometry::new(n, 8).unwrap();
        let hp = scale_hyperparameters(0.1, 0.1, &mask, &geometry).unwrap();
        let config = SolverConfig {
            restarts_k: 6,
            rng_seed: 300 + trial,
            max_outer_iters: 200,
            ..Default::default()
        };
        let reports = monte_carlo_runs(&y, &mask, &hp, &config).unwrap();
        let winner = select_winner(&reports).unwrap();
        let solved = monte_carlo_solve(&y, &mask, &hp, &config).unwrap();
        let min_final = reports
            .iter()
            .filter(|r| !r.degenerate)
            .map(|r| r.final_objective())
            .fold(f64::INFINITY, f64::min);
        pass &= solved.restart_index == winner;
        pass &= solved.final_objective() == min_final;
        pass &= solved
            .restart_final_objectives
            .iter()
            .all(|&f| f >= min_final);
        // the winner's trajectory end equals the recorded final objective
        pass &= (solved.final_objective()
            - objective(&solved.final_model, &y, &mask, &hp).unwrap())
        .abs()
            <= 1e-10 * solved.final_objective().max(1e-300);
        checked += 1;
    }
    assert!(criterion(
        12,
        "monte-carlo selects the minimum objective",
        pass,
        &format!("{checked} seeded runs")
    ));
}

/// Direct solves from explicit inits behave like the Monte-Carlo path on the
/// same initialization (exercised because criterion 12 quantifies over every
/// benchmark run, which always goes through `als_solve`).
#[test]
fn als_report_final_objective_is_consistent() {
    let clean = sine(64);
    let (y, mask) = clip(&clean, 0.4).unwrap();
    let geometry = EmbeddingGeometry::new(64, 16).unwrap();
    let hp = scale_hyperparameters(0.1, 0.1, &mask, &geometry).unwrap();
    let init_a = vec![1.0; geometry.t_rows()];
    let init_b: Vec<f64> = (0..16).map(|i| 1.0 + 0.1 * i as f64).collect();
    let report = als_solve(&y, &mask, &hp, &SolverConfig::default(), &init_a, &init_b).unwrap();
    let recomputed = objective(&report.final_model, &y, &mask, &hp).unwrap();
    assert!((report.final_objective() - recomputed).abs() <= 1e-10 * recomputed.max(1e-300));
    assert!(report.final_objective() <= report.objective_trajectory[0]);
}
