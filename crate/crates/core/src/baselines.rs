//! Reference reconstructors: quadratic-variation smoothing, natural cubic
//! spline interpolation, and orthogonal matching pursuit over a Gabor
//! dictionary.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::ObservationMask;

/// Exact minimizer of ‖P_Ω(y − x)‖² + λ‖Lx‖², solved through the
/// tridiagonal system (P_Ω + λLᵀL)x = P_Ω y.
pub fn qv_reconstruct(y: &[f64], mask: &ObservationMask, lambda: f64) -> Result<Vec<f64>> {
    let n = y.len();
    mask.require_len(n)?;
    mask.require_nonempty()?;
    if lambda < 0.0 {
        return Err(Error::Parameter(String::from("lambda must be nonnegative")));
    }
    if lambda == 0.0 {
        if mask.count_observed() < n {
            return Err(Error::Singular(
                "unregularized reconstruction with missing samples",
            ));
        }
        return Ok(y.to_vec());
    }
    if n == 1 {
        return Ok(y.to_vec());
    }
    // diag: p_i + lambda * (1 at the ends, 2 inside); off-diagonal: -lambda
    let mut diag: Vec<f64> = (0..n)
        .map(|i| {
            let p = if mask.is_observed(i) { 1.0 } else { 0.0 };
            let deg = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
            p + lambda * deg
        })
        .collect();
    let mut rhs = mask.project(y);
    // Thomas elimination; the matrix is SPD whenever the mask is nonempty
    for i in 1..n {
        let pivot = diag[i - 1];
        if pivot <= 0.0 {
            return Err(Error::Singular("quadratic-variation system"));
        }
        let factor = -lambda / pivot;
        diag[i] -= factor * -lambda;
        rhs[i] -= factor * rhs[i - 1];
    }
    let mut x = vec![0.0; n];
    if diag[n - 1] <= 0.0 {
        return Err(Error::Singular("quadratic-variation system"));
    }
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (rhs[i] + lambda * x[i + 1]) / diag[i];
    }
    Ok(x)
}

/// Natural cubic spline through the observed samples, evaluated at every
/// index. Queries beyond the first or last observed sample evaluate the
/// boundary segment's polynomial.
pub fn spline_reconstruct(y: &[f64], mask: &ObservationMask) -> Result<Vec<f64>> {
    let n = y.len();
    mask.require_len(n)?;
    let knots: Vec<usize> = (0..n).filter(|&i| mask.is_observed(i)).collect();
    let m = knots.len();
    if m < 2 {
        return Err(Error::TooFewObserved {
            needed: 2,
            actual: m,
        });
    }
    let xs: Vec<f64> = knots.iter().map(|&i| i as f64).collect();
    let ys: Vec<f64> = knots.iter().map(|&i| y[i]).collect();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();

    // second derivatives with natural boundary conditions M_0 = M_{m-1} = 0
    let mut second = vec![0.0; m];
    if m > 2 {
        let inner = m - 2;
        let mut diag = vec![0.0; inner];
        let mut lower = vec![0.0; inner];
        let mut upper = vec![0.0; inner];
        let mut rhs = vec![0.0; inner];
        for i in 0..inner {
            let k = i + 1;
            lower[i] = h[k - 1];
            diag[i] = 2.0 * (h[k - 1] + h[k]);
            upper[i] = h[k];
            rhs[i] = 6.0 * ((ys[k + 1] - ys[k]) / h[k] - (ys[k] - ys[k - 1]) / h[k - 1]);
        }
        for i in 1..inner {
            let factor = lower[i] / diag[i - 1];
            diag[i] -= factor * upper[i - 1];
            rhs[i] -= factor * rhs[i - 1];
        }
        second[inner] = rhs[inner - 1] / diag[inner - 1];
        for i in (0..inner - 1).rev() {
            second[i + 1] = (rhs[i] - upper[i] * second[i + 2]) / diag[i];
        }
    }

    let eval = |seg: usize, t: f64| -> f64 {
        let (x0, x1) = (xs[seg], xs[seg + 1]);
        let hseg = h[seg];
        let (m0, m1) = (second[seg], second[seg + 1]);
        let (d0, d1) = (x1 - t, t - x0);
        m0 * d0 * d0 * d0 / (6.0 * hseg)
            + m1 * d1 * d1 * d1 / (6.0 * hseg)
            + (ys[seg] / hseg - m0 * hseg / 6.0) * d0
            + (ys[seg + 1] / hseg - m1 * hseg / 6.0) * d1
    };

    let mut out = Vec::with_capacity(n);
    let mut seg = 0usize;
    for i in 0..n {
        let t = i as f64;
        while seg + 2 < m && t > xs[seg + 1] {
            seg += 1;
        }
        out.push(eval(seg, t));
    }
    Ok(out)
}

/// Gaussian-windowed cosine/sine dictionary with unit-norm columns.
///
/// For redundancy ρ the dictionary holds ρ·N atoms: phase pairs {cos, sin}
/// on the frequency grid f_k = k/(2N), windowed by a Gaussian centered at
/// the segment midpoint with standard deviation N/4 and normalized over full
/// support. A grid point whose atom vanishes identically (the k = 0 sine)
/// is shifted by half a bin so every column stays unit-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborDictionary {
    n: usize,
    redundancy: f64,
    n_atoms: usize,
    /// column-major: atom m occupies [m·n, (m+1)·n)
    atoms: Vec<f64>,
}

impl GaborDictionary {
    pub fn new(n: usize, redundancy: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension {
                what: "atom length",
                expected: 1,
                actual: 0,
            });
        }
        if !(redundancy > 0.0) {
            return Err(Error::Parameter(String::from("redundancy must be positive")));
        }
        let exact = redundancy * n as f64;
        let n_atoms = exact.round() as usize;
        if n_atoms == 0 || (exact - n_atoms as f64).abs() > 1e-9 {
            return Err(Error::Parameter(String::from(
                "redundancy times atom length must be a positive integer",
            )));
        }
        let center = (n as f64 - 1.0) / 2.0;
        let width = n as f64 / 4.0;
        let window: Vec<f64> = (0..n)
            .map(|i| {
                let d = i as f64 - center;
                (-d * d / (2.0 * width * width)).exp()
            })
            .collect();
        let half_bin = 1.0 / (4.0 * n as f64);
        let mut atoms = Vec::with_capacity(n_atoms * n);
        let mut produced = 0usize;
        let mut k = 0usize;
        while produced < n_atoms {
            let freq = k as f64 / (2.0 * n as f64);
            for phase_is_sine in [false, true] {
                if produced == n_atoms {
                    break;
                }
                let make = |f: f64| -> Vec<f64> {
                    (0..n)
                        .map(|i| {
                            let arg = 2.0 * core::f64::consts::PI * f * (i as f64 - center);
                            window[i] * if phase_is_sine { arg.sin() } else { arg.cos() }
                        })
                        .collect()
                };
                let mut atom = make(freq);
                let mut nrm = l2(&atom);
                if nrm <= 1e-12 {
                    atom = make(freq + half_bin);
                    nrm = l2(&atom);
                }
                for v in &mut atom {
                    *v /= nrm;
                }
                atoms.extend_from_slice(&atom);
                produced += 1;
            }
            k += 1;
        }
        Ok(Self {
            n,
            redundancy,
            n_atoms,
            atoms,
        })
    }

    /// Dictionary from explicit columns; each column is normalized and must
    /// be nonzero.
    pub fn from_columns(n: usize, columns: &[Vec<f64>]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Parameter(String::from("dictionary needs atoms")));
        }
        let mut atoms = Vec::with_capacity(columns.len() * n);
        for column in columns {
            if column.len() != n {
                return Err(Error::Dimension {
                    what: "dictionary column",
                    expected: n,
                    actual: column.len(),
                });
            }
            let nrm = l2(column);
            if nrm <= 1e-12 {
                return Err(Error::Parameter(String::from(
                    "dictionary columns must be nonzero",
                )));
            }
            atoms.extend(column.iter().map(|v| v / nrm));
        }
        Ok(Self {
            n,
            redundancy: columns.len() as f64 / n as f64,
            n_atoms: columns.len(),
            atoms,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn redundancy(&self) -> f64 {
        self.redundancy
    }

    pub fn atom(&self, m: usize) -> &[f64] {
        &self.atoms[m * self.n..(m + 1) * self.n]
    }
}

/// Support, coefficients, and the final residual of a greedy sparse fit.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCode {
    pub support: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub residual_norm_sq: f64,
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cholesky solve of a symmetric positive definite system; `None` when a
/// pivot collapses (linearly dependent atoms).
fn cholesky_solve(gram: &mut [f64], rhs: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut scale = 0.0f64;
    for i in 0..n {
        scale = scale.max(gram[i * n + i].abs());
    }
    let floor = 1e-12 * scale.max(1e-300);
    for col in 0..n {
        let mut d = gram[col * n + col];
        for k in 0..col {
            d -= gram[col * n + k] * gram[col * n + k];
        }
        if d <= floor {
            return None;
        }
        let d = d.sqrt();
        gram[col * n + col] = d;
        for row in col + 1..n {
            let mut v = gram[row * n + col];
            for k in 0..col {
                v -= gram[row * n + k] * gram[col * n + k];
            }
            gram[row * n + col] = v / d;
        }
    }
    // forward then backward substitution
    let mut x = rhs.to_vec();
    for i in 0..n {
        for k in 0..i {
            let factor = gram[i * n + k];
            x[i] -= factor * x[k];
        }
        x[i] /= gram[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            x[i] -= gram[k * n + i] * x[k];
        }
        x[i] /= gram[i * n + i];
    }
    Some(x)
}

/// Greedy orthogonal matching pursuit on the row-restricted dictionary
/// P_Ω D.
///
/// Atom selection maximizes |⟨residual, atom⟩| normalized by the atom's
/// masked-support norm; coefficients are re-solved by least squares on the
/// current support after every selection. Stops when the masked squared
/// residual drops to `epsilon` or the support reaches ⌈N/4⌉ atoms. Atoms
/// with no energy on the observed set are excluded.
pub fn omp_reconstruct(
    y: &[f64],
    mask: &ObservationMask,
    dict: &GaborDictionary,
    epsilon: f64,
) -> Result<(Vec<f64>, SparseCode)> {
    let n = y.len();
    if dict.n() != n {
        return Err(Error::Dimension {
            what: "dictionary atom length",
            expected: n,
            actual: dict.n(),
        });
    }
    mask.require_len(n)?;
    mask.require_nonempty()?;
    if !(epsilon > 0.0) {
        return Err(Error::Parameter(String::from("epsilon must be positive")));
    }

    let observed: Vec<usize> = (0..n).filter(|&i| mask.is_observed(i)).collect();
    let k = observed.len();
    let n_atoms = dict.n_atoms();
    let masked_atom = |m: usize| -> Vec<f64> {
        let full = dict.atom(m);
        observed.iter().map(|&i| full[i]).collect()
    };
    let mut usable = vec![true; n_atoms];
    let mut masked_norms = vec![0.0; n_atoms];
    let mut any_usable = false;
    for m in 0..n_atoms {
        masked_norms[m] = l2(&masked_atom(m));
        usable[m] = masked_norms[m] > 1e-12;
        any_usable |= usable[m];
    }
    if !any_usable {
        return Err(Error::Singular("no dictionary atom overlaps the observed set"));
    }

    let target: Vec<f64> = observed.iter().map(|&i| y[i]).collect();
    let cap = n.div_ceil(4);
    let mut residual = target.clone();
    let mut support: Vec<usize> = Vec::new();
    let mut coefficients: Vec<f64> = Vec::new();
    let mut in_support = vec![false; n_atoms];

    loop {
        let residual_sq: f64 = residual.iter().map(|v| v * v).sum();
        if residual_sq <= epsilon || support.len() >= cap {
            break;
        }
        // best-correlated remaining atom
        let mut best: Option<(usize, f64)> = None;
        for m in 0..n_atoms {
            if !usable[m] || in_support[m] {
                continue;
            }
            let atom = masked_atom(m);
            let corr = residual
                .iter()
                .zip(&atom)
                .map(|(r, a)| r * a)
                .sum::<f64>()
                .abs()
                / masked_norms[m];
            if best.map_or(true, |(_, score)| corr > score) {
                best = Some((m, corr));
            }
        }
        let Some((chosen, score)) = best else { break };
        if score <= 1e-14 {
            break;
        }
        support.push(chosen);
        in_support[chosen] = true;

        // least squares on the masked support columns
        let s = support.len();
        let columns: Vec<Vec<f64>> = support.iter().map(|&m| masked_atom(m)).collect();
        let mut gram = vec![0.0; s * s];
        let mut rhs = vec![0.0; s];
        for i in 0..s {
            for j in 0..=i {
                let g: f64 = columns[i].iter().zip(&columns[j]).map(|(a, b)| a * b).sum();
                gram[i * s + j] = g;
                gram[j * s + i] = g;
            }
            rhs[i] = columns[i].iter().zip(&target).map(|(a, t)| a * t).sum();
        }
        match cholesky_solve(&mut gram, &rhs, s) {
            Some(w) => {
                coefficients = w;
                for (idx, r) in residual.iter_mut().enumerate() {
                    let mut fit = 0.0;
                    for (c, column) in columns.iter().enumerate() {
                        fit += coefficients[c] * column[idx];
                    }
                    *r = target[idx] - fit;
                }
                let _ = k;
            }
            None => {
                // linearly dependent with the current support: discard
                support.pop();
                in_support[chosen] = false;
                usable[chosen] = false;
                if !usable.iter().any(|&u| u) {
                    break;
                }
            }
        }
    }

    let mut x = vec![0.0; n];
    for (c, &m) in support.iter().enumerate() {
        let atom = dict.atom(m);
        for i in 0..n {
            x[i] += coefficients[c] * atom[i];
        }
    }
    let residual_norm_sq: f64 = residual.iter().map(|v| v * v).sum();
    Ok((
        x,
        SparseCode {
            support,
            coefficients,
            residual_norm_sq,
        },
    ))
}
