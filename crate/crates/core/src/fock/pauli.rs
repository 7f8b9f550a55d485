use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array1, ArrayView2};
use serde::Serialize;

use super::gates::{quadrature_function, Quadrature};
use super::spectral::HermiteBasis;
use super::{FockOperator, FockVector, C64};
use crate::error::{Error, Result};

/// Odd-term cutoff of the Pauli displacement sums (terms `±1, ±3, …, ±59`).
pub const DEFAULT_N_CUT: usize = 59;

/// Logical Pauli measured by an ideal-QEC readout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Diagonal covariance `diag(s_q, s_p)` of Gaussian random displacement
/// noise applied before the readout.  A displacement term `W(v)` is
/// multiplied by `exp(−π vᵀΩᵀΣΩv) = exp(−π(s_q v_p² + s_p v_q²))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Smear {
    pub s_q: f64,
    pub s_p: f64,
}

impl Smear {
    pub fn new(s_q: f64, s_p: f64) -> Result<Self> {
        if !(s_q >= 0.0 && s_p >= 0.0 && s_q.is_finite() && s_p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "smear variances must be finite and ≥ 0, got ({s_q}, {s_p})"
            )));
        }
        Ok(Self { s_q, s_p })
    }

    pub fn none() -> Self {
        Self { s_q: 0.0, s_p: 0.0 }
    }

    /// `tanh(Δ²/2)·diag(λ, 1/λ)`: the passive-Knill noise seen from the
    /// rectangular frame.
    pub fn biased(delta: f64, lam: f64) -> Self {
        let t = (delta * delta / 2.0).tanh();
        Self {
            s_q: t * lam,
            s_p: t / lam,
        }
    }

    /// `tanh(Δ²/2)·I`.
    pub fn isotropic(delta: f64) -> Self {
        Self::biased(delta, 1.0)
    }

    /// Multiplier of the displacement term `W(v_q, v_p)`.
    pub fn factor(&self, v_q: f64, v_p: f64) -> f64 {
        (-PI * (self.s_q * v_p * v_p + self.s_p * v_q * v_q)).exp()
    }
}

fn check_n_cut(n_cut: usize) -> Result<()> {
    if n_cut % 2 == 0 {
        return Err(Error::InvalidArgument(format!("n_cut must be odd, got {n_cut}")));
    }
    Ok(())
}

/// Eigenvalue weights of the smeared `X_m` or `Z_m` on the quadrature
/// eigenvalues `nodes` (`q` for `Z`, `p` for `X`):
/// `f(x) = Σ_{k odd ≤ n_cut} (4/(πk))(−1)^{(k−1)/2}·smear_k·cos(k·θ(x))`
/// with `θ = √(π/λ)·x` for `Z` and `θ = √(πλ)·x` for `X`.  This is the
/// pairing of the `±k` terms of `(1/π)Σ_n (−1)^n/(n+½) W(…)`.
pub fn pauli_weights(which: Pauli, lam: f64, smear: Smear, n_cut: usize, nodes: &[f64]) -> Result<Vec<f64>> {
    check_n_cut(n_cut)?;
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::InvalidArgument(format!("λ must be > 0, got {lam}")));
    }
    let (step, terms): (f64, Vec<(f64, f64)>) = match which {
        Pauli::Z => (
            (PI / lam).sqrt(),
            (1..=n_cut)
                .step_by(2)
                .map(|k| {
                    let v_p = k as f64 / (2.0 * lam).sqrt();
                    (k as f64, smear.factor(0.0, v_p))
                })
                .collect(),
        ),
        Pauli::X => (
            (PI * lam).sqrt(),
            (1..=n_cut)
                .step_by(2)
                .map(|k| {
                    let v_q = k as f64 * (lam / 2.0).sqrt();
                    (k as f64, smear.factor(v_q, 0.0))
                })
                .collect(),
        ),
        Pauli::Y => {
            return Err(Error::InvalidArgument(
                "Y is not a single-quadrature function; build it from X and Z".into(),
            ))
        }
    };
    Ok(nodes
        .iter()
        .map(|&x| {
            let theta = step * x;
            terms
                .iter()
                .map(|&(k, s)| {
                    let sign = if ((k as i64 - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    4.0 / (PI * k) * sign * s * (k * theta).cos()
                })
                .sum()
        })
        .collect())
}

/// Dense smeared Pauli measurement operator at dimension `d`, built at
/// `expand·d` and truncated.  `Y = (iXZ − iZX)/2`.
pub fn pauli_measurement_operator(
    which: Pauli,
    lam: f64,
    smear: Option<Smear>,
    d: usize,
    n_cut: usize,
    expand: usize,
) -> Result<FockOperator> {
    check_n_cut(n_cut)?;
    let smear = smear.unwrap_or_else(Smear::none);
    let basis = HermiteBasis::shared(expand * d, d)?;
    let op = |p: Pauli, quad: Quadrature| -> Result<FockOperator> {
        let w: Vec<C64> = pauli_weights(p, lam, smear, n_cut, &basis.nodes)?
            .into_iter()
            .map(|x| C64::new(x, 0.0))
            .collect();
        quadrature_function(&basis, &w, quad, d, d)
    };
    match which {
        Pauli::Z => op(Pauli::Z, Quadrature::Q),
        Pauli::X => op(Pauli::X, Quadrature::P),
        Pauli::Y => {
            let x = op(Pauli::X, Quadrature::P)?;
            let z = op(Pauli::Z, Quadrature::Q)?;
            let i = C64::new(0.0, 0.5);
            Ok((x.dot(&z) - z.dot(&x)) * i)
        }
    }
}

/// Matrix-free smeared Pauli readout at dimension `d`.
///
/// For a pair of output vectors `o_0, o_1` it returns the four Hermitian
/// 2×2 matrices `M_σ[i][j] = ⟨o_i|σ_m|o_j⟩` for `σ ∈ {I, X, Y, Z}`, from
/// which `tr(σ E(ρ)) = tr(M_σ ρ)` for any logical input `ρ`.
#[derive(Clone)]
pub struct PauliReadout {
    basis: Arc<HermiteBasis>,
    fz: Vec<f64>,
    fx: Vec<f64>,
    d: usize,
}

/// `[I, X, Y, Z]` response matrices, see [`PauliReadout`].
pub type ResponseMatrices = [[[C64; 2]; 2]; 4];

impl PauliReadout {
    pub fn new(lam: f64, smear: Smear, d: usize, n_cut: usize, expand: usize) -> Result<Self> {
        if expand < 2 {
            return Err(Error::InvalidArgument("expand factor must be ≥ 2".into()));
        }
        let basis = HermiteBasis::shared(expand * d, d)?;
        let fz = pauli_weights(Pauli::Z, lam, smear, n_cut, &basis.nodes)?;
        let fx = pauli_weights(Pauli::X, lam, smear, n_cut, &basis.nodes)?;
        Ok(Self { basis, fz, fx, d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn project(v: ArrayView2<f64>, psi: &FockVector) -> Vec<C64> {
        let re = Array1::from_iter(psi.iter().map(|z| z.re));
        let im = Array1::from_iter(psi.iter().map(|z| z.im));
        let r = v.t().dot(&re);
        let i = v.t().dot(&im);
        r.iter().zip(i.iter()).map(|(&a, &b)| C64::new(a, b)).collect()
    }

    fn back(v: ArrayView2<f64>, w: &[C64]) -> FockVector {
        let re = Array1::from_iter(w.iter().map(|z| z.re));
        let im = Array1::from_iter(w.iter().map(|z| z.im));
        let r = v.dot(&re);
        let i = v.dot(&im);
        Array1::from_iter(r.iter().zip(i.iter()).map(|(&a, &b)| C64::new(a, b)))
    }

    /// `(Xψ, Zψ)` for the smeared operators.
    fn apply_xz(&self, psi: &FockVector) -> (FockVector, FockVector) {
        let v = self.basis.vectors.view();
        // Z: function of q.
        let uq = Self::project(v, psi);
        let wz: Vec<C64> = uq.iter().zip(&self.fz).map(|(u, f)| u * f).collect();
        let zpsi = Self::back(v, &wz);
        // X: function of p = Φ q Φ†, Φ = diag(iⁿ).
        let rot: FockVector = psi.iter().enumerate().map(|(n, z)| z * ipow(n).conj()).collect();
        let up = Self::project(v, &rot);
        let wx: Vec<C64> = up.iter().zip(&self.fx).map(|(u, f)| u * f).collect();
        let xrot = Self::back(v, &wx);
        let xpsi: FockVector = xrot.iter().enumerate().map(|(n, z)| z * ipow(n)).collect();
        (xpsi, zpsi)
    }

    /// Response matrices for the output pair `outputs`.
    pub fn response(&self, outputs: [&FockVector; 2]) -> Result<ResponseMatrices> {
        for o in outputs {
            if o.len() != self.d {
                return Err(Error::DimensionMismatch(format!(
                    "readout at dimension {}, got a vector of length {}",
                    self.d,
                    o.len()
                )));
            }
        }
        let xz: Vec<(FockVector, FockVector)> = outputs.iter().map(|o| self.apply_xz(o)).collect();
        let ip = |a: &FockVector, b: &FockVector| super::inner(a, b);
        let mut m = [[[C64::new(0.0, 0.0); 2]; 2]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[0][i][j] = ip(outputs[i], outputs[j]);
                m[1][i][j] = ip(outputs[i], &xz[j].0);
                m[3][i][j] = ip(outputs[i], &xz[j].1);
                // ⟨o_i|(iXZ − iZX)/2|o_j⟩ = (i⟨Xo_i|Zo_j⟩ − i⟨Zo_i|Xo_j⟩)/2.
                let a = ip(&xz[i].0, &xz[j].1);
                let b = ip(&xz[i].1, &xz[j].0);
                m[2][i][j] = (a - b) * C64::new(0.0, 0.5);
            }
        }
        Ok(m)
    }

    /// `(‖ψ‖², ⟨X⟩, ⟨Y⟩, ⟨Z⟩)` for a single vector.
    pub fn expectations(&self, psi: &FockVector) -> Result<[f64; 4]> {
        if psi.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "readout at dimension {}, got {}",
                self.d,
                psi.len()
            )));
        }
        let (x, z) = self.apply_xz(psi);
        let ip = super::inner;
        Ok([
            ip(psi, psi).re,
            ip(psi, &x).re,
            -ip(&x, &z).im,
            ip(psi, &z).re,
        ])
    }
}

fn ipow(n: usize) -> C64 {
    match n % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}
