//! Delay embedding and its inverse.
//!
//! The forward map turns a length-N vector into a T×τ Hankel matrix
//! (T = N+τ−1) whose rows are the sliding windows of the signal; cells whose
//! mapped signal index falls outside [0, N) are undefined. The inverse map
//! averages the anti-diagonals back into a length-N vector:
//!
//! ```text
//! out[n] = (1/τ) Σ_{j=0..τ-1} X[n+τ-1-j, j]
//! ```
//!
//! For a rank-1 matrix `a bᵀ` the inverse embedding collapses to the valid
//! part of the linear convolution `a ∗ b` scaled by 1/τ, which is what the
//! solver uses; the anti-diagonal form is kept as the reference path. The
//! selector tensor that expresses the inverse map as a sparse linear operator
//! is never materialized — products against it and its transposes are
//! realized by `inverse_embed_rank1`, `adjoint_wrt_a`, and `adjoint_wrt_b`,
//! all O(N·τ).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dimensions tying signal space to embedded space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingGeometry {
    n: usize,
    tau: usize,
}

impl EmbeddingGeometry {
    /// Create a geometry for signals of length `n` and embedding window `tau`.
    ///
    /// Requires `1 <= tau <= n`; `tau = n` is allowed.
    pub fn new(n: usize, tau: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension {
                what: "signal length",
                expected: 1,
                actual: 0,
            });
        }
        if tau == 0 || tau > n {
            return Err(Error::Dimension {
                what: "embedding window tau",
                expected: n,
                actual: tau,
            });
        }
        Ok(Self { n, tau })
    }

    /// Signal length N.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Embedding window τ (number of columns).
    pub fn tau(&self) -> usize {
        self.tau
    }

    /// Embedded row count T = N + τ − 1.
    pub fn t_rows(&self) -> usize {
        self.n + self.tau - 1
    }

    /// Signal index addressed by cell (i, j), if it lies inside the band.
    #[inline]
    fn signal_index(&self, i: usize, j: usize) -> Option<usize> {
        // n = i - (tau - 1) + j, defined iff 0 <= n < N
        let shifted = i + j + 1;
        if shifted >= self.tau && shifted - self.tau < self.n {
            Some(shifted - self.tau)
        } else {
            None
        }
    }
}

/// A T×τ matrix in embedded space, with a mask marking the corner cells that
/// do not correspond to any signal sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedMatrix {
    geometry: EmbeddingGeometry,
    /// Row-major T×τ values. Undefined corner cells hold 0 and are never read
    /// by the inverse map.
    values: Vec<f64>,
    /// Row-major T×τ band membership; `false` exactly on the corner cells.
    defined: Vec<bool>,
}

impl EmbeddedMatrix {
    pub fn geometry(&self) -> &EmbeddingGeometry {
        &self.geometry
    }

    /// Row-major T×τ values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.geometry.tau + j]
    }

    /// Whether cell (i, j) lies inside the anti-diagonal band.
    #[inline]
    pub fn is_defined(&self, i: usize, j: usize) -> bool {
        self.defined[i * self.geometry.tau + j]
    }

    /// Average the anti-diagonals back into a signal.
    pub fn inverse(&self) -> Vec<f64> {
        inverse_delay_embed(&self.values, &self.geometry)
            .expect("embedded matrix is consistent with its own geometry")
    }
}

/// Forward delay embedding of `y` with window `tau`.
///
/// Row i, column j holds `y[i - tau + 1 + j]` when that index is in range;
/// the remaining corner cells are zero-filled and flagged as undefined.
pub fn delay_embed(y: &[f64], tau: usize) -> Result<EmbeddedMatrix> {
    let geometry = EmbeddingGeometry::new(y.len(), tau)?;
    let t_rows = geometry.t_rows();
    let mut values = vec![0.0; t_rows * tau];
    let mut defined = vec![false; t_rows * tau];
    for i in 0..t_rows {
        for j in 0..tau {
            if let Some(n) = geometry.signal_index(i, j) {
                values[i * tau + j] = y[n];
                defined[i * tau + j] = true;
            }
        }
    }
    Ok(EmbeddedMatrix {
        geometry,
        values,
        defined,
    })
}

/// Inverse delay embedding: anti-diagonal averaging of a row-major T×τ matrix.
///
/// Corner cells of a Hankel-produced input are never touched; arbitrary dense
/// matrices are averaged over the band cells only.
pub fn inverse_delay_embed(values: &[f64], geometry: &EmbeddingGeometry) -> Result<Vec<f64>> {
    let (n, tau, t_rows) = (geometry.n(), geometry.tau(), geometry.t_rows());
    if values.len() != t_rows * tau {
        return Err(Error::Dimension {
            what: "embedded matrix",
            expected: t_rows * tau,
            actual: values.len(),
        });
    }
    let inv_tau = 1.0 / tau as f64;
    let mut out = Vec::with_capacity(n);
    for sample in 0..n {
        // cells (sample + tau - 1 - j, j) for j = 0..tau-1
        let mut acc = 0.0;
        let base = sample + tau - 1;
        for j in 0..tau {
            acc += values[(base - j) * tau + j];
        }
        out.push(acc * inv_tau);
    }
    Ok(out)
}

/// Inverse delay embedding of the rank-1 matrix `a bᵀ` without materializing
/// it: the N central outputs of the linear convolution `a ∗ b`, scaled 1/τ.
pub fn inverse_embed_rank1(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let (t_rows, tau) = (a.len(), b.len());
    check_factor_lengths(t_rows, tau)?;
    let n = t_rows - tau + 1;
    let inv_tau = 1.0 / tau as f64;
    let mut out = Vec::with_capacity(n);
    for sample in 0..n {
        let base = sample + tau - 1;
        let mut acc = 0.0;
        for (j, &bj) in b.iter().enumerate() {
            acc += a[base - j] * bj;
        }
        out.push(acc * inv_tau);
    }
    Ok(out)
}

/// Adjoint of `a ↦ inverse_embed_rank1(a, b)`: returns g with
/// `⟨g, a⟩ = ⟨r, inverse_embed_rank1(a, b)⟩` for all a.
pub fn adjoint_wrt_a(r: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let (n, tau) = (r.len(), b.len());
    if n == 0 || tau == 0 || tau > n {
        return Err(Error::Dimension {
            what: "adjoint window tau",
            expected: n,
            actual: tau,
        });
    }
    let t_rows = n + tau - 1;
    let inv_tau = 1.0 / tau as f64;
    let mut g = vec![0.0; t_rows];
    // g[i] = (1/tau) Σ_j b[j] r[i - tau + 1 + j] over in-range r indices
    for (sample, &rv) in r.iter().enumerate() {
        if rv == 0.0 {
            continue;
        }
        let base = sample + tau - 1;
        for (j, &bj) in b.iter().enumerate() {
            g[base - j] += bj * rv;
        }
    }
    for v in &mut g {
        *v *= inv_tau;
    }
    Ok(g)
}

/// Adjoint of `b ↦ inverse_embed_rank1(a, b)`: returns g with
/// `⟨g, b⟩ = ⟨r, inverse_embed_rank1(a, b)⟩` for all b.
pub fn adjoint_wrt_b(r: &[f64], a: &[f64]) -> Result<Vec<f64>> {
    let (n, t_rows) = (r.len(), a.len());
    if n == 0 || t_rows < n {
        return Err(Error::Dimension {
            what: "factor a",
            expected: n,
            actual: t_rows,
        });
    }
    let tau = t_rows - n + 1;
    check_factor_lengths(t_rows, tau)?;
    let inv_tau = 1.0 / tau as f64;
    let mut g = Vec::with_capacity(tau);
    for j in 0..tau {
        let offset = tau - 1 - j;
        let mut acc = 0.0;
        for (sample, &rv) in r.iter().enumerate() {
            acc += rv * a[sample + offset];
        }
        g.push(acc * inv_tau);
    }
    Ok(g)
}

fn check_factor_lengths(t_rows: usize, tau: usize) -> Result<()> {
    if tau == 0 || t_rows < tau {
        return Err(Error::Dimension {
            what: "factor b",
            expected: t_rows,
            actual: tau,
        });
    }
    let n = t_rows - tau + 1;
    if tau > n {
        // lengths must come from one geometry with 1 <= tau <= N
        return Err(Error::Dimension {
            what: "factor lengths (tau exceeds N)",
            expected: n,
            actual: tau,
        });
    }
    Ok(())
}
