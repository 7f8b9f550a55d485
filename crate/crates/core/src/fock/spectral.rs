//! Eigenbasis of the truncated position operator.
//!
//! At dimension `D` the truncated `q` is the symmetric tridiagonal matrix
//! with off-diagonal `√(k/2)`.  Its eigenvalues are the `D` roots of the
//! Hermite polynomial `H_D`, and the eigenvector for root `x` has components
//! proportional to the Hermite functions `ψ_n(x)`, `n < D`.  Any function of
//! the truncated `q` is then `V·diag(f(x_k))·Vᵀ`, which is exactly the matrix
//! exponential of the truncated generator when `f = exp(i·g)`.
//!
//! The momentum operator is unitarily equivalent: `p = Φ q Φ†` with
//! `Φ = diag(i^n)`, so functions of `p` reuse the same basis.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use ndarray::Array2;
use parking_lot::RwLock;

use crate::error::{Error, Result};

/// Real eigen-decomposition of the truncated position operator at
/// dimension `dim`, keeping only the first `rows` Fock components of each
/// eigenvector.
#[derive(Debug)]
pub struct HermiteBasis {
    pub dim: usize,
    /// Eigenvalues, ascending.
    pub nodes: Vec<f64>,
    /// `rows × dim`; column `k` is the eigenvector of `nodes[k]` restricted
    /// to Fock levels `0..rows`.
    pub vectors: Array2<f64>,
}

impl HermiteBasis {
    pub fn new(dim: usize, rows: usize) -> Result<Self> {
        if dim < 2 || rows == 0 || rows > dim {
            return Err(Error::InvalidArgument(format!(
                "need 2 ≤ dim and 1 ≤ rows ≤ dim, got dim={dim}, rows={rows}"
            )));
        }
        let nodes = tridiagonal_eigenvalues(dim)?;
        let mut vectors = Array2::<f64>::zeros((rows, dim));
        let mut col = vec![0.0f64; dim];
        for (k, &x) in nodes.iter().enumerate() {
            hermite_column(x, &mut col);
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            for n in 0..rows {
                vectors[(n, k)] = col[n] / norm;
            }
        }
        Ok(Self { dim, nodes, vectors })
    }

    pub fn rows(&self) -> usize {
        self.vectors.nrows()
    }

    /// Shared, lazily built basis for `(dim, rows)`.
    pub fn shared(dim: usize, rows: usize) -> Result<Arc<HermiteBasis>> {
        static CACHE: OnceLock<RwLock<HashMap<(usize, usize), Arc<HermiteBasis>>>> =
            OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(b) = cache.read().get(&(dim, rows)) {
            return Ok(b.clone());
        }
        // Build outside the lock; a concurrent duplicate build is harmless.
        let built = Arc::new(HermiteBasis::new(dim, rows)?);
        let mut w = cache.write();
        Ok(w.entry((dim, rows)).or_insert(built).clone())
    }
}

/// Unnormalised Hermite functions `ψ_0(x)…ψ_{D−1}(x)` up to a common
/// positive factor, via `ψ_{n+1} = (x ψ_n − √(n/2) ψ_{n−1}) / √((n+1)/2)`
/// with periodic rescaling (the Gaussian prefactor would underflow).
fn hermite_column(x: f64, out: &mut [f64]) {
    const BIG: f64 = 1e150;
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = x * std::f64::consts::SQRT_2;
    for n in 1..out.len() - 1 {
        let next = (x * out[n] - (n as f64 / 2.0).sqrt() * out[n - 1]) / ((n as f64 + 1.0) / 2.0).sqrt();
        out[n + 1] = next;
        if next.abs() > BIG {
            for v in out[..=n + 1].iter_mut() {
                *v /= BIG;
            }
        }
    }
}

/// Eigenvalues of the truncated `q` by the implicit QL algorithm with
/// Wilkinson shifts (eigenvalues only), sorted ascending.
fn tridiagonal_eigenvalues(dim: usize) -> Result<Vec<f64>> {
    let mut d = vec![0.0f64; dim];
    // e[i] couples i and i+1.
    let mut e: Vec<f64> = (1..dim).map(|k| (k as f64 / 2.0).sqrt()).collect();
    e.push(0.0);
    for l in 0..dim {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < dim {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd.max(f64::MIN_POSITIVE) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numeric(format!(
                    "tridiagonal eigenvalue iteration did not converge at dim {dim}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    #[test]
    fn small_dims_match_hermite_roots() {
        // H_2 roots: ±1/√2; H_3 roots: 0, ±√(3/2).
        let b = HermiteBasis::new(2, 2).unwrap();
        assert_abs_diff_eq!(b.nodes[1], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        let b = HermiteBasis::new(3, 3).unwrap();
        assert_abs_diff_eq!(b.nodes[0], -(1.5f64).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(b.nodes[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn matches_dense_symmetric_eigensolver() {
        let dim = 120;
        let mut q = DMatrix::<f64>::zeros(dim, dim);
        for k in 1..dim {
            let s = (k as f64 / 2.0).sqrt();
            q[(k - 1, k)] = s;
            q[(k, k - 1)] = s;
        }
        let mut dense: Vec<f64> = q.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        dense.sort_by(|a, b| a.total_cmp(b));
        let b = HermiteBasis::new(dim, dim).unwrap();
        for (x, y) in b.nodes.iter().zip(&dense) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-11);
        }
        // Reconstruct q = V diag(x) Vᵀ.
        let v = &b.vectors;
        let mut recon = Array2::<f64>::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                recon[(i, j)] = (0..dim).map(|k| v[(i, k)] * b.nodes[k] * v[(j, k)]).sum();
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                assert_abs_diff_eq!(recon[(i, j)], q[(i, j)], epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn large_basis_is_orthogonal() {
        let dim = 2304;
        let b = HermiteBasis::new(dim, dim).unwrap();
        let g = b.vectors.t().dot(&b.vectors);
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        assert!(worst < 1e-10, "max deviation {worst}");
    }
}
