//! Closed-form first and second moments of the twirled error distribution
//! of a polynomial phase gate `exp(2πi P(q/√π))` on an envelope with
//! squeezing `(Δ_q, Δ_p)`.
//!
//! With `Q(x) = Σ_{k≥2} a_k β_k x^{k−2}`, `β_k = 2k(k−1)/√2^{k−1}`, and
//! `x ~ N(0, 1/(πΔ_p²))`:
//!
//! * `E(v_q²) = Δ_q²/(4π)`,
//! * `E(v_p²) = Δ_p²/(4π) + Δ_q²/(2π)·E[Q(x)²]`,
//! * `E(v_q v_p) = Δ_q²/(2√2π)·E[Q(x)]`,
//!
//! and both means vanish.

use std::f64::consts::{PI, SQRT_2};

use num_traits::ToPrimitive;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::polyalg::{Rational, RationalPolynomial};

/// Covariance of the twirled displacement error (means are zero).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentSummary {
    pub e_vq2: f64,
    pub e_vp2: f64,
    pub e_vqvp: f64,
    /// Gate-induced part of `E(v_p²)` (full double sum over coefficient pairs).
    pub gate_vp2: f64,
    /// The leading-coefficient term `Δ_q²/(2π)·a_n²β_n²·E(x^{2n−4})` that
    /// dominates `gate_vp2` as the squeezing grows.
    pub leading_shear: f64,
}

/// `β_k = 2k(k−1)/√2^{k−1}`.
pub fn beta(k: u32) -> f64 {
    2.0 * k as f64 * (k as f64 - 1.0) / SQRT_2.powi(k as i32 - 1)
}

/// `E(x^k)` for `x ~ N(0, 1/(πΔ_p²))`:
/// `2^{k/2−1}(1+(−1)^k) π^{−(1+k)/2} Γ((1+k)/2) Δ_p^{−k}`.
pub fn gaussian_moment(k: u32, delta_p: f64) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let kf = k as f64;
    let log = (kf / 2.0) * 2f64.ln() - (1.0 + kf) / 2.0 * PI.ln() + ln_gamma((1.0 + kf) / 2.0)
        - kf * delta_p.ln();
    log.exp()
}

fn coefficients(p: &RationalPolynomial) -> Vec<f64> {
    p.to_f64_coefficients()
}

/// `(Δ_q, Δ_p) = (Δ/√λ, Δ√λ)`, so `λ = Δ_p/Δ_q` and `Δ = √(Δ_qΔ_p)`.
pub fn bias_split(delta: f64, lam: f64) -> (f64, f64) {
    (delta / lam.sqrt(), delta * lam.sqrt())
}

/// Closed-form moments for gate polynomial `p` at squeezing `(Δ_q, Δ_p)`.
pub fn moments(p: &RationalPolynomial, delta_q: f64, delta_p: f64) -> Result<MomentSummary> {
    if !(delta_q > 0.0 && delta_p > 0.0 && delta_q.is_finite() && delta_p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "squeezing parameters must be positive, got ({delta_q}, {delta_p})"
        )));
    }
    let a = coefficients(p);
    let n = p.degree() as u32;
    let dq2 = delta_q * delta_q;
    let mut gate = 0.0;
    let mut cross = 0.0;
    for j in 2..=n {
        let cj = a[j as usize] * beta(j);
        if cj == 0.0 {
            continue;
        }
        cross += cj * gaussian_moment(j - 2, delta_p);
        for k in 2..=n {
            let ck = a[k as usize] * beta(k);
            gate += cj * ck * gaussian_moment(j + k - 4, delta_p);
        }
    }
    let gate_vp2 = dq2 / (2.0 * PI) * gate;
    let leading_shear = if n >= 2 {
        let c = a[n as usize] * beta(n);
        dq2 / (2.0 * PI) * c * c * gaussian_moment(2 * n - 4, delta_p)
    } else {
        0.0
    };
    Ok(MomentSummary {
        e_vq2: dq2 / (4.0 * PI),
        e_vp2: delta_p * delta_p / (4.0 * PI) + gate_vp2,
        e_vqvp: dq2 / (2.0 * SQRT_2 * PI) * cross,
        gate_vp2,
        leading_shear,
    })
}

/// `a_n²`, the exact polynomial-dependent factor of the leading shear term.
pub fn leading_shear_coefficient(p: &RationalPolynomial) -> Rational {
    let a = p.leading_coefficient();
    &a * &a
}

/// Asymmetry minimising the leading-order `E(v_p²)` at `Δ_q = Δ/√λ`,
/// `Δ_p = Δ√λ`:
/// `λ = [4π(n−1)·a_n²β_n²·2^{n−3}π^{1/2−n}Γ(n−3/2) / Δ^{2n−4}]^{1/n}`.
pub fn lambda_opt_asymptotic(p: &RationalPolynomial, delta: f64) -> Result<f64> {
    let n = p.degree();
    if n < 3 {
        return Err(Error::PreconditionViolation(format!(
            "optimal bias not applicable below degree 3 (degree {n}): no shear to balance"
        )));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("Δ must be positive, got {delta}")));
    }
    let an = p.leading_coefficient().to_f64().unwrap_or(f64::NAN);
    let nf = n as f64;
    let b = beta(n as u32);
    let log_k = (an * an * b * b).ln() + (nf - 3.0) * 2f64.ln() + (0.5 - nf) * PI.ln() + ln_gamma(nf - 1.5);
    let log_l = (4.0 * PI * (nf - 1.0)).ln() + log_k - (2.0 * nf - 4.0) * delta.ln();
    Ok((log_l / nf).exp())
}
