//! Shared oracles for the acceptance suite: dense assemblies and direct
//! solves kept independent of the library's matrix-free paths.

#![allow(dead_code)]

use desr_core::{inverse_delay_embed, EmbeddingGeometry};

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(matrix: &mut [f64], rhs: &mut [f64], n: usize) -> Vec<f64> {
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if matrix[row * n + col].abs() > matrix[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if pivot != col {
            for j in 0..n {
                matrix.swap(col * n + j, pivot * n + j);
            }
            rhs.swap(col, pivot);
        }
        let diag = matrix[col * n + col];
        for row in col + 1..n {
            let factor = matrix[row * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                matrix[row * n + j] -= factor * matrix[col * n + j];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for j in col + 1..n {
            acc -= matrix[col * n + j] * x[j];
        }
        x[col] = acc / matrix[col * n + col];
    }
    x
}

/// Anti-diagonal average of the dense outer product a bᵀ, straight from the
/// inverse-embedding definition.
pub fn outer_product_inverse(a: &[f64], b: &[f64]) -> Vec<f64> {
    let (t_rows, tau) = (a.len(), b.len());
    let n = t_rows - tau + 1;
    let mut dense = vec![0.0; t_rows * tau];
    for i in 0..t_rows {
        for j in 0..tau {
            dense[i * tau + j] = a[i] * b[j];
        }
    }
    let geometry = EmbeddingGeometry::new(n, tau).unwrap();
    inverse_delay_embed(&dense, &geometry).unwrap()
}

/// Dense matrix of the linear map a ↦ H†(a bᵀ): M[n, i] = b[n+τ−1−i]/τ.
pub fn dense_forward_a(b: &[f64], n: usize) -> Vec<f64> {
    let tau = b.len();
    let t_rows = n + tau - 1;
    let mut m = vec![0.0; n * t_rows];
    for row in 0..n {
        for (j, &bj) in b.iter().enumerate() {
            m[row * t_rows + (row + tau - 1 - j)] = bj / tau as f64;
        }
    }
    m
}

/// Dense matrix of the linear map b ↦ H†(a bᵀ): M[n, j] = a[n+τ−1−j]/τ.
pub fn dense_forward_b(a: &[f64], n: usize) -> Vec<f64> {
    let t_rows = a.len();
    let tau = t_rows - n + 1;
    let mut m = vec![0.0; n * tau];
    for row in 0..n {
        for j in 0..tau {
            m[row * tau + j] = a[row + tau - 1 - j] / tau as f64;
        }
    }
    m
}

/// Assemble σ²·Mᵀ P_Ω M + λ LᵀL densely and solve against σ·Mᵀ P_Ω y.
pub fn dense_normal_solve(
    forward: &[f64],
    rows: usize,
    cols: usize,
    observed: &[bool],
    y: &[f64],
    sigma: f64,
    lambda: f64,
) -> Vec<f64> {
    let mut normal = vec![0.0; cols * cols];
    for r in 0..rows {
        if !observed[r] {
            continue;
        }
        for i in 0..cols {
            let mi = forward[r * cols + i];
            if mi == 0.0 {
                continue;
            }
            for j in 0..cols {
                normal[i * cols + j] += sigma * sigma * mi * forward[r * cols + j];
            }
        }
    }
    for row in 0..cols.saturating_sub(1) {
        normal[row * cols + row] += lambda;
        normal[(row + 1) * cols + row + 1] += lambda;
        normal[row * cols + row + 1] -= lambda;
        normal[(row + 1) * cols + row] -= lambda;
    }
    let mut rhs = vec![0.0; cols];
    for r in 0..rows {
        if !observed[r] {
            continue;
        }
        for i in 0..cols {
            rhs[i] += sigma * forward[r * cols + i] * y[r];
        }
    }
    dense_solve(&mut normal, &mut rhs, cols)
}

pub fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rel_l2_error(estimate: &[f64], truth: &[f64]) -> f64 {
    let mut err = 0.0;
    let mut norm = 0.0;
    for (e, t) in estimate.iter().zip(truth) {
        err += (e - t) * (e - t);
        norm += t * t;
    }
    (err / norm.max(1e-300)).sqrt()
}
