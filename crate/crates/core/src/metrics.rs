//! Reconstruction metrics and the spectral soft-smoothness verification.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};

/// Reported ceiling for SNR; a zero-error reconstruction maps here instead
/// of +∞.
pub const SNR_CAP_DB: f64 = 300.0;

fn check_equal_lengths(reference: &[f64], estimate: &[f64]) -> Result<()> {
    if reference.len() != estimate.len() {
        return Err(Error::Dimension {
            what: "metric inputs",
            expected: reference.len(),
            actual: estimate.len(),
        });
    }
    Ok(())
}

/// 10·log₁₀(‖x₀‖² / ‖x₀ − x̂‖²), capped at [`SNR_CAP_DB`].
pub fn snr_db(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    check_equal_lengths(reference, estimate)?;
    let signal: f64 = reference.iter().map(|v| v * v).sum();
    if signal <= 0.0 {
        return Err(Error::Parameter(String::from(
            "SNR needs a nonzero reference signal",
        )));
    }
    let error: f64 = reference
        .iter()
        .zip(estimate)
        .map(|(r, e)| (r - e) * (r - e))
        .sum();
    if error == 0.0 {
        return Ok(SNR_CAP_DB);
    }
    Ok((10.0 * (signal / error).log10()).min(SNR_CAP_DB))
}

/// Mean squared error (1/N)‖x₀ − x̂‖².
pub fn mse(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    check_equal_lengths(reference, estimate)?;
    if reference.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = reference
        .iter()
        .zip(estimate)
        .map(|(r, e)| (r - e) * (r - e))
        .sum();
    Ok(total / reference.len() as f64)
}

/// Unnormalized DFT of a real vector, returned as (re, im) pairs.
fn dft(v: &[f64]) -> Vec<(f64, f64)> {
    let n = v.len();
    let mut out = Vec::with_capacity(n);
    for f in 0..n {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, &x) in v.iter().enumerate() {
            let angle = -2.0 * core::f64::consts::PI * (f * k) as f64 / n as f64;
            re += x * angle.cos();
            im += x * angle.sin();
        }
        out.push((re, im));
    }
    out
}

/// Both sides of the spectral smoothness bound for a circular factor pair.
///
/// Treating `a` and `b` as periodic signals of the same length and
/// `x = a ⊛ b` (circular convolution), the quadratic variations of the
/// factors bound a square-root-rescaled spectral quadratic variation of x:
///
/// ```text
/// lhs = ‖l ⊛ a‖² + ‖l ⊛ b‖²   with l = [−1, 1, 0, …]
/// rhs = (2/n) Σ_f |l̃_f|² |x̃_f|     (unnormalized DFTs, x̃ = ã ∘ b̃)
/// ```
///
/// The arithmetic–geometric mean inequality applied per frequency gives
/// lhs ≥ rhs, with equality when |ã| = |b̃| everywhere.
pub fn soft_smoothness_gap(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            what: "circular factor pair",
            expected: a.len(),
            actual: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::Dimension {
            what: "circular factor length",
            expected: 2,
            actual: n,
        });
    }
    let circular_qv = |v: &[f64]| -> f64 {
        (0..n)
            .map(|k| {
                let d = v[(k + 1) % n] - v[k];
                d * d
            })
            .sum()
    };
    let lhs = circular_qv(a) + circular_qv(b);

    let fa = dft(a);
    let fb = dft(b);
    let mut rhs = 0.0;
    for f in 0..n {
        let angle = 2.0 * core::f64::consts::PI * f as f64 / n as f64;
        let l_sq = 2.0 - 2.0 * angle.cos(); // |(-1 + e^{-i angle})|^2
        let (ar, ai) = fa[f];
        let (br, bi) = fb[f];
        // |x̃_f| = |ã_f|·|b̃_f|
        let x_mag = (ar * ar + ai * ai).sqrt() * (br * br + bi * bi).sqrt();
        rhs += l_sq * x_mag;
    }
    rhs *= 2.0 / n as f64;
    Ok((lhs, rhs))
}
