//! Restoration of smooth time-series signals in delay-embedded space.
//!
//! A length-N signal is modeled indirectly: a T×τ latent matrix (T = N+τ−1)
//! is constrained to be rank-1 with unit-norm factor vectors `a` and `b`,
//! and the reconstructed signal is the inverse delay embedding of `σ a bᵀ` —
//! equivalently a scaled valid convolution of the two factors. Smoothness is
//! imposed on the factors through quadratic-variation penalties, and the
//! model is fitted to the observed samples by alternating least squares with
//! unit-ball projections and Monte-Carlo restarts.
//!
//! The crate also ships the reference reconstructors used for comparison
//! (quadratic-variation smoothing, natural cubic splines, orthogonal matching
//! pursuit over a Gabor dictionary), corruption models (clipping, random
//! missing samples, additive Gaussian noise), synthetic test signals, and
//! reconstruction metrics.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature enables the standard library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod als;
pub mod baselines;
pub mod corruption;
pub mod embedding;
pub mod error;
pub mod metrics;
pub mod model;
pub mod signal;

pub use als::{
    als_solve, monte_carlo_runs, monte_carlo_solve, select_winner, update_a, update_b,
    update_sigma, FactorUpdate, SolverConfig, SolverReport,
};
pub use baselines::{
    omp_reconstruct, qv_reconstruct, spline_reconstruct, GaborDictionary, SparseCode,
};
pub use corruption::{add_noise, clip, random_missing, CorruptionSpec};
pub use embedding::{
    adjoint_wrt_a, adjoint_wrt_b, delay_embed, inverse_delay_embed, inverse_embed_rank1,
    EmbeddedMatrix, EmbeddingGeometry,
};
pub use error::{Error, Result};
pub use metrics::{mse, snr_db, soft_smoothness_gap, SNR_CAP_DB};
pub use model::{
    objective, scale_hyperparameters, DifferenceOperator, Hyperparams, ObservationMask,
    Rank1Model,
};
pub use signal::{generate, SignalSpec};
