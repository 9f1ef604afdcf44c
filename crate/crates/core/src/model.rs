//! The rank-1 signal model `x = H†(σ a bᵀ)` with unit-norm factors, its
//! objective function, and the hyper-parameter scaling.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::embedding::{inverse_embed_rank1, EmbeddingGeometry};
use crate::error::{Error, Result};

/// The index set Ω of observed samples and the projection P_Ω.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationMask {
    observed: Vec<bool>,
}

impl ObservationMask {
    /// Mask from a boolean vector (`true` ⇔ observed).
    pub fn new(observed: Vec<bool>) -> Self {
        Self { observed }
    }

    /// Mask observing every sample.
    pub fn full(n: usize) -> Self {
        Self {
            observed: vec![true; n],
        }
    }

    /// Mask observing exactly the given indices.
    pub fn from_observed_indices(n: usize, indices: &[usize]) -> Self {
        let mut observed = vec![false; n];
        for &i in indices {
            observed[i] = true;
        }
        Self { observed }
    }

    /// Signal length N.
    pub fn n(&self) -> usize {
        self.observed.len()
    }

    #[inline]
    pub fn is_observed(&self, i: usize) -> bool {
        self.observed[i]
    }

    pub fn observed(&self) -> &[bool] {
        &self.observed
    }

    /// |Ω|, the number of observed samples.
    pub fn count_observed(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    /// Indices outside Ω.
    pub fn missing_indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.observed[i]).collect()
    }

    /// P_Ω y: passes observed entries, zeroes missing ones.
    pub fn project(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(&self.observed)
            .map(|(&v, &o)| if o { v } else { 0.0 })
            .collect()
    }

    /// Zero out the missing entries in place.
    pub fn project_in_place(&self, y: &mut [f64]) {
        for (v, &o) in y.iter_mut().zip(&self.observed) {
            if !o {
                *v = 0.0;
            }
        }
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.observed.iter().any(|&o| o) {
            Ok(())
        } else {
            Err(Error::EmptyMask)
        }
    }

    pub(crate) fn require_len(&self, n: usize) -> Result<()> {
        if self.n() == n {
            Ok(())
        } else {
            Err(Error::Dimension {
                what: "observation mask",
                expected: n,
                actual: self.n(),
            })
        }
    }
}

/// Reconstruction parameters: factors `a` (length T) and `b` (length τ) and
/// the scale σ. The solver keeps both factors unit-norm; σ may be any sign.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Model {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub sigma: f64,
    geometry: EmbeddingGeometry,
}

impl Rank1Model {
    pub fn new(a: Vec<f64>, b: Vec<f64>, sigma: f64, geometry: EmbeddingGeometry) -> Result<Self> {
        if a.len() != geometry.t_rows() {
            return Err(Error::Dimension {
                what: "factor a",
                expected: geometry.t_rows(),
                actual: a.len(),
            });
        }
        if b.len() != geometry.tau() {
            return Err(Error::Dimension {
                what: "factor b",
                expected: geometry.tau(),
                actual: b.len(),
            });
        }
        if !sigma.is_finite() {
            return Err(Error::Parameter(String::from("sigma must be finite")));
        }
        Ok(Self {
            a,
            b,
            sigma,
            geometry,
        })
    }

    pub fn geometry(&self) -> &EmbeddingGeometry {
        &self.geometry
    }

    /// The modeled signal `σ · H†(a bᵀ)`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut z = inverse_embed_rank1(&self.a, &self.b)
            .expect("model factors are consistent with the geometry");
        for v in &mut z {
            *v *= self.sigma;
        }
        z
    }
}

/// Smoothness weights: the user-facing (λ₁, λ₂) and the derived per-factor
/// weights λ_a = λ₁|Ω|/(T·N) and λ_b = λ₂|Ω|/(τ·N).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub tau: usize,
    pub lambda_a: f64,
    pub lambda_b: f64,
}

impl Hyperparams {
    /// Build hyper-parameters from already-derived per-factor weights,
    /// bypassing the |Ω| scaling. `lambda1`/`lambda2` are recorded as the
    /// raw weights.
    pub fn direct(lambda_a: f64, lambda_b: f64, tau: usize) -> Result<Self> {
        if lambda_a < 0.0 || lambda_b < 0.0 {
            return Err(Error::Parameter(String::from(
                "smoothness weights must be nonnegative",
            )));
        }
        Ok(Self {
            lambda1: lambda_a,
            lambda2: lambda_b,
            tau,
            lambda_a,
            lambda_b,
        })
    }
}

/// Derive (λ_a, λ_b) from (λ₁, λ₂) with the observation-count scaling
/// λ_a = λ₁·|Ω|/(T·N), λ_b = λ₂·|Ω|/(τ·N).
pub fn scale_hyperparameters(
    lambda1: f64,
    lambda2: f64,
    mask: &ObservationMask,
    geometry: &EmbeddingGeometry,
) -> Result<Hyperparams> {
    if lambda1 < 0.0 || lambda2 < 0.0 {
        return Err(Error::Parameter(String::from(
            "lambda1 and lambda2 must be nonnegative",
        )));
    }
    mask.require_len(geometry.n())?;
    mask.require_nonempty()?;
    let observed = mask.count_observed() as f64;
    let n = geometry.n() as f64;
    let t_rows = geometry.t_rows() as f64;
    let tau = geometry.tau() as f64;
    Ok(Hyperparams {
        lambda1,
        lambda2,
        tau: geometry.tau(),
        lambda_a: lambda1 * observed / (t_rows * n),
        lambda_b: lambda2 * observed / (tau * n),
    })
}

/// First-difference operator L: the (m−1)×m map with rows (−1 at i, +1 at
/// i+1), applied matrix-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DifferenceOperator {
    size: usize,
}

impl DifferenceOperator {
    pub fn new(size: usize) -> Self {
        Self { size }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn check(&self, len: usize) -> Result<()> {
        if len == self.size {
            Ok(())
        } else {
            Err(Error::Dimension {
                what: "difference operator input",
                expected: self.size,
                actual: len,
            })
        }
    }

    /// L v: successive differences, length m−1 (empty for m ≤ 1).
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v.len())?;
        Ok(v.windows(2).map(|w| w[1] - w[0]).collect())
    }

    /// Lᵀ w for a length m−1 input.
    pub fn apply_transpose(&self, w: &[f64]) -> Result<Vec<f64>> {
        if self.size == 0 || w.len() != self.size - 1 {
            return Err(Error::Dimension {
                what: "difference operator transpose input",
                expected: self.size.saturating_sub(1),
                actual: w.len(),
            });
        }
        let mut out = vec![0.0; self.size];
        for (i, &wi) in w.iter().enumerate() {
            out[i] -= wi;
            out[i + 1] += wi;
        }
        Ok(out)
    }

    /// LᵀL v, the second-difference form used in the normal equations.
    pub fn gram_apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v.len())?;
        let m = self.size;
        let mut out = vec![0.0; m];
        if m < 2 {
            return Ok(out);
        }
        for i in 0..m - 1 {
            let d = v[i + 1] - v[i];
            out[i] -= d;
            out[i + 1] += d;
        }
        Ok(out)
    }

    /// ‖L v‖₂², the quadratic variation of v.
    pub fn quadratic_variation(&self, v: &[f64]) -> Result<f64> {
        self.check(v.len())?;
        Ok(v.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum())
    }
}

/// Eq-style objective: ‖P_Ω(y − reconstruct(model))‖₂² + λ_a‖L_a a‖₂² +
/// λ_b‖L_b b‖₂².
pub fn objective(
    model: &Rank1Model,
    y: &[f64],
    mask: &ObservationMask,
    hp: &Hyperparams,
) -> Result<f64> {
    let n = model.geometry().n();
    if y.len() != n {
        return Err(Error::Dimension {
            what: "signal y",
            expected: n,
            actual: y.len(),
        });
    }
    mask.require_len(n)?;
    mask.require_nonempty()?;
    let x = model.reconstruct();
    let mut fit = 0.0;
    for i in 0..n {
        if mask.is_observed(i) {
            let r = y[i] - x[i];
            fit += r * r;
        }
    }
    let qa = DifferenceOperator::new(model.a.len()).quadratic_variation(&model.a)?;
    let qb = DifferenceOperator::new(model.b.len()).quadratic_variation(&model.b)?;
    Ok(fit + hp.lambda_a * qa + hp.lambda_b * qb)
}
