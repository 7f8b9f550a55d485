//! Truncated Fock-space engine.
//!
//! States are dense complex vectors and operators dense complex matrices
//! whose row and column dimensions are tracked explicitly, following a
//! [`TruncationPlan`]: codewords are built at `d_init`, gates map `d_init`
//! columns to `d_out = expand·d_init` rows, and every exponential is formed
//! at a temporary dimension `expand·d` before truncation.
//!
//! Functions of a single quadrature (polynomial phase gates, displacements
//! along one axis, Pauli measurement operators) are evaluated exactly in the
//! eigenbasis of the truncated position operator, see [`spectral`].  General
//! two-axis displacements use the Padé matrix exponential in [`expm`].

pub mod cache;
mod codeword;
pub mod expm;
mod gates;
mod pauli;
pub mod spectral;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub use codeword::{
    codeword_pair, default_lattice_cut, gkp_codeword, orthonormalize, Codeword, CodewordPair,
    MAX_ZEROED_WEIGHT,
};
pub use gates::{apply_poly_phase, displacement, poly_phase_gate, quadrature_phase, PhaseGateAction, Quadrature};
pub use pauli::{
    pauli_measurement_operator, pauli_weights, Pauli, PauliReadout, Smear, DEFAULT_N_CUT,
};

/// Complex scalar used throughout.
pub type C64 = Complex64;
/// State vector in the truncated Fock basis; its length is the dimension.
pub type FockVector = Array1<C64>;
/// Operator matrix, `rows = d_out`, `cols = d_in`.
pub type FockOperator = Array2<C64>;

/// Truncation dimensions used for one channel evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TruncationPlan {
    pub d_init: usize,
    pub expand_factor: usize,
}

impl TruncationPlan {
    pub const MIN_D_INIT: usize = 16;

    pub fn new(d_init: usize, expand_factor: usize) -> Result<Self> {
        if d_init < Self::MIN_D_INIT {
            return Err(Error::InvalidArgument(format!(
                "d_init must be ≥ {}, got {d_init}",
                Self::MIN_D_INIT
            )));
        }
        if expand_factor < 2 {
            return Err(Error::InvalidArgument(format!(
                "expand_factor must be ≥ 2, got {expand_factor}"
            )));
        }
        Ok(Self {
            d_init,
            expand_factor,
        })
    }

    /// Dimension of the gate output and of the Pauli readout.
    pub fn d_out(&self) -> usize {
        self.expand_factor * self.d_init
    }

    /// Temporary dimension used when exponentiating at dimension `d`.
    pub fn d_temp(&self, d: usize) -> usize {
        self.expand_factor * d
    }
}

impl Default for TruncationPlan {
    fn default() -> Self {
        Self {
            d_init: 400,
            expand_factor: 3,
        }
    }
}

/// Envelope strength `Δ` and lattice asymmetry `λ` of a rectangular code.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GkpParams {
    pub delta: f64,
    pub lam: f64,
}

impl GkpParams {
    pub fn new(delta: f64, lam: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidArgument(format!("Δ must be > 0, got {delta}")));
        }
        if !(lam.is_finite() && lam > 0.0) {
            return Err(Error::InvalidArgument(format!("λ must be > 0, got {lam}")));
        }
        Ok(Self { delta, lam })
    }

    /// Parameters for a given mean photon number `n̄ = 1/(2Δ²) − 1/2`.
    pub fn from_n_bar(n_bar: f64, lam: f64) -> Result<Self> {
        if !(n_bar > -0.5) {
            return Err(Error::InvalidArgument(format!("n̄ must exceed −1/2, got {n_bar}")));
        }
        Self::new(delta_from_n_bar(n_bar), lam)
    }

    pub fn n_bar(&self) -> f64 {
        n_bar_from_delta(self.delta)
    }

    pub fn delta_db(&self) -> f64 {
        delta_db(self.delta)
    }

    /// `1 − e^{−2Δ²}`, the width factor of the coherent-state weights.
    pub fn kappa(&self) -> f64 {
        -(-2.0 * self.delta * self.delta).exp_m1()
    }
}

/// `Δ = 1/√(2n̄ + 1)`.
pub fn delta_from_n_bar(n_bar: f64) -> f64 {
    1.0 / (2.0 * n_bar + 1.0).sqrt()
}

/// `n̄ = 1/(2Δ²) − 1/2`.
pub fn n_bar_from_delta(delta: f64) -> f64 {
    0.5 / (delta * delta) - 0.5
}

/// Squeezing in decibels, `−10·log10(Δ²)`.
pub fn delta_db(delta: f64) -> f64 {
    -10.0 * (delta * delta).log10()
}

/// Truncated `q = (a + a†)/√2` and `p = i(a† − a)/√2` at dimension `d`.
pub fn quadratures(d: usize) -> Result<(FockOperator, FockOperator)> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be ≥ 2, got {d}")));
    }
    let mut q = FockOperator::zeros((d, d));
    let mut p = FockOperator::zeros((d, d));
    for n in 1..d {
        let s = (n as f64 / 2.0).sqrt();
        // ⟨n−1|a|n⟩ = √n, ⟨n|a†|n−1⟩ = √n.
        q[(n - 1, n)] = C64::new(s, 0.0);
        q[(n, n - 1)] = C64::new(s, 0.0);
        p[(n - 1, n)] = C64::new(0.0, -s);
        p[(n, n - 1)] = C64::new(0.0, s);
    }
    Ok((q, p))
}

/// Photon-number operator `diag(0, 1, …, d−1)`.
pub fn number_operator(d: usize) -> FockOperator {
    FockOperator::from_diag(&Array1::from_iter((0..d).map(|n| C64::new(n as f64, 0.0))))
}

/// `‖ψ‖²`.
pub fn norm_sqr(v: &FockVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `⟨a|b⟩` (conjugate-linear in `a`), over the common leading dimensions.
pub fn inner(a: &FockVector, b: &FockVector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Checks that every entry is finite.
pub fn ensure_finite<'a>(values: impl IntoIterator<Item = &'a C64>, what: &str) -> Result<()> {
    if values.into_iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric(format!("{what} has non-finite entries")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vacuum_moments() {
        let (q, p) = quadratures(8).unwrap();
        let q2 = q.dot(&q);
        assert_abs_diff_eq!(q2[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(q[(1, 0)].re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        let comm = q.dot(&p) - p.dot(&q);
        for n in 0..7 {
            assert_abs_diff_eq!(comm[(n, n)].im, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(comm[(n, n)].re, 0.0, epsilon = 1e-14);
        }
        assert!(quadratures(1).is_err());
    }

    #[test]
    fn plan_and_params() {
        let p = TruncationPlan::default();
        assert_eq!((p.d_init, p.d_out(), p.d_temp(p.d_out())), (400, 1200, 3600));
        assert!(TruncationPlan::new(8, 3).is_err());
        assert!(TruncationPlan::new(32, 1).is_err());
        let g = GkpParams::from_n_bar(7.5, 1.0).unwrap();
        assert_abs_diff_eq!(g.delta, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(g.n_bar(), 7.5, epsilon = 1e-12);
        assert_abs_diff_eq!(g.delta_db(), 12.0412, epsilon = 1e-4);
        assert!(GkpParams::new(0.0, 1.0).is_err());
        assert!(GkpParams::new(0.3, -1.0).is_err());
    }
}
