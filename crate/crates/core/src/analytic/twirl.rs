//! The twirled error density of the minimal cubic gate and the
//! fault-tolerance fidelity lower bound built from it.
//!
//! Normal densities here follow the displacement-unit convention
//! `N(s, x) = exp(−πx²/s)/√s`, i.e. a centred normal of variance `s/(2π)`.
//! Under it the bare-envelope variances reduce to `Δ²/(4π)` and the
//! density's moments agree with [`super::moments`].

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;
use statrs::function::erf::erf;

use crate::error::{Error, Result};

/// Half-width of the correctable patch `(−1/√8, 1/√8]²`.
pub const PATCH_HALF_WIDTH: f64 = 0.353_553_390_593_273_8;

/// Terms of θ₃ and lattice sums below this magnitude are dropped.
pub const SERIES_CUTOFF: f64 = 1e-15;

/// `N(s, x) = exp(−πx²/s)/√s`.
pub fn normal(s: f64, x: f64) -> f64 {
    (-PI * x * x / s).exp() / s.sqrt()
}

/// `∫_lo^hi N(s, x) dx`.
pub fn normal_mass(s: f64, lo: f64, hi: f64) -> f64 {
    let k = (PI / s).sqrt();
    0.5 * (erf(k * hi) - erf(k * lo))
}

/// `θ₃(0, q) = 1 + 2Σ_{n≥1} q^{n²}`, truncated once a term drops below
/// [`SERIES_CUTOFF`].
pub fn theta3(q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!("θ₃ nome must lie in [0, 1), got {q}")));
    }
    let mut sum = 1.0;
    let mut n = 1u64;
    loop {
        let term = 2.0 * q.powf((n * n) as f64);
        if term < SERIES_CUTOFF {
            return Ok(sum);
        }
        sum += term;
        n += 1;
        if n > 10_000_000 {
            return Err(Error::Accuracy(format!("θ₃ series did not converge for q = {q}")));
        }
    }
}

/// `C(Δ, λ) = 2coth(Δ²)tanh(Δ²/2)·θ₃(0, e^{−πcoth(Δ²)/λ})·θ₃(0, e^{−πλcoth(Δ²)})`.
pub fn c_delta_lambda(delta: f64, lam: f64) -> Result<f64> {
    check_positive(delta, lam)?;
    let d2 = delta * delta;
    let coth = 1.0 / d2.tanh();
    Ok(2.0 * coth * (d2 / 2.0).tanh() * theta3((-PI * coth / lam).exp())? * theta3((-PI * lam * coth).exp())?)
}

fn check_positive(delta: f64, lam: f64) -> Result<()> {
    if !(delta > 0.0 && lam > 0.0 && delta.is_finite() && lam.is_finite()) {
        return Err(Error::InvalidArgument(format!("need Δ > 0 and λ > 0, got ({delta}, {lam})")));
    }
    Ok(())
}

/// Twirled error density of the minimal cubic `T` gate on a biased
/// envelope: a normal in `v_q` times a normal in `v_p` whose mean is sheared
/// by `v_q/2 − v_q²/√2` and whose width grows with `v_q²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwirledCubicDensity {
    pub delta: f64,
    pub lam: f64,
    /// `tanh(Δ²/2)`.
    pub t: f64,
}

impl TwirledCubicDensity {
    pub fn new(delta: f64, lam: f64) -> Result<Self> {
        check_positive(delta, lam)?;
        Ok(Self {
            delta,
            lam,
            t: (delta * delta / 2.0).tanh(),
        })
    }

    /// Parameter `s` of the `v_q` marginal `N(s, v_q)`: `tanh(Δ²/2)/λ`.
    pub fn q_param(&self) -> f64 {
        self.t / self.lam
    }

    /// Parameter of the conditional `v_p` normal: `v_q²/(2λt) + λt`.
    pub fn p_param(&self, v_q: f64) -> f64 {
        v_q * v_q / (2.0 * self.lam * self.t) + self.lam * self.t
    }

    /// Conditional mean of `v_p`: `v_q/2 − v_q²/√2`.
    pub fn p_mean(&self, v_q: f64) -> f64 {
        v_q / 2.0 - v_q * v_q / SQRT_2
    }

    /// Normalised density at `(v_q, v_p)`.
    pub fn density(&self, v_q: f64, v_p: f64) -> f64 {
        normal(self.q_param(), v_q) * normal(self.p_param(v_q), v_p - self.p_mean(v_q))
    }

    /// `C(Δ, λ)`; `|χ_E(v)|²/ξ_{E†E}(0) = density(v)/C`.
    pub fn normalization(&self) -> Result<f64> {
        c_delta_lambda(self.delta, self.lam)
    }

    /// `|χ_E(v)|²/ξ_{E†E}(0)`.
    pub fn chi_squared_ratio(&self, v_q: f64, v_p: f64) -> Result<f64> {
        Ok(self.density(v_q, v_p) / self.normalization()?)
    }

    /// Probability mass inside the correctable patch.
    pub fn patch_mass(&self) -> Result<f64> {
        let h = PATCH_HALF_WIDTH;
        super::quad::integrate(
            |vq| {
                let m = self.p_mean(vq);
                normal(self.q_param(), vq) * normal_mass(self.p_param(vq), -h - m, h - m)
            },
            -h,
            h,
            1e-14,
            1e-12,
        )
    }
}

/// Density of the twirled cubic-gate error at displacement `v`.
pub fn cubic_twirled_density(delta: f64, lam: f64, v: (f64, f64)) -> Result<f64> {
    Ok(TwirledCubicDensity::new(delta, lam)?.density(v.0, v.1))
}

/// Fault-tolerance lower bound on the logical average gate fidelity of the
/// minimal cubic gate at the bias `λ(Δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundResult {
    pub delta: f64,
    pub lam_of_delta: f64,
    /// Erf-product lower bound on the in-patch probability `p_E(0)`.
    pub p0_lower: f64,
    /// Upper bound `1 − p0_lower` on the total mass of the other cells.
    pub tail_upper: f64,
    pub c: f64,
    /// Lower bound on `∫|ξ^Id|² / ξ_{E†E}(0)`.
    pub ratio_lower: f64,
    pub f_lower_bound: f64,
    /// Whether `(tanh(Δ²/2)/λ)^{1/4} ≤ 1/√8`, the range where the Erf
    /// product bounds `p_E(0)`.
    pub validity: bool,
}

/// `λ(Δ) = 3^{2/5}/2^{4/5}·tanh(Δ²/2)^{−3/5}`, minimising the shear width
/// in the Erf-product bound.
pub fn ft_lambda(delta: f64) -> f64 {
    3f64.powf(0.4) / 2f64.powf(0.8) * (delta * delta / 2.0).tanh().powf(-0.6)
}

/// Largest Δ for which the bound is valid: `√(2·artanh((3/2)^{1/4}/16))`.
pub fn ft_validity_limit() -> f64 {
    (2.0 * (1.5f64.powf(0.25) / 16.0).atanh()).sqrt()
}

/// Erf-product lower bound on `p_E(0)`, tail majorisation
/// `Σ_{n≠0} p_E(√2n) ≤ 1 − p_E(0)`, the squared difference over `C(Δ, λ)`
/// (clamped at zero, where the inequality becomes vacuous), and
/// `F ≥ 2/3·ratio + 1/3`.
pub fn ft_lower_bound(delta: f64) -> Result<BoundResult> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("Δ must be positive, got {delta}")));
    }
    let lam = ft_lambda(delta);
    let t = (delta * delta / 2.0).tanh();
    let s = t / lam;
    let width = s.sqrt() / (2.0 * lam * t) + lam * t;
    let p0 = erf(PI.sqrt() / s.powf(0.25)) * erf(PI.sqrt() / (4.0 * 8f64.sqrt() * width.sqrt()));
    let tail = 1.0 - p0;
    let c = c_delta_lambda(delta, lam)?;
    let diff = ((p0 - tail) / c).max(0.0);
    let ratio = diff * diff;
    Ok(BoundResult {
        delta,
        lam_of_delta: lam,
        p0_lower: p0,
        tail_upper: tail,
        c,
        ratio_lower: ratio,
        f_lower_bound: 2.0 / 3.0 * ratio + 1.0 / 3.0,
        validity: s.powf(0.25) <= 1.0 / 8f64.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta3_matches_product_form() {
        // Jacobi triple product: θ₃(0,q) = Π (1−q^{2m})(1+q^{2m−1})².
        for q in [0.0f64, 0.05, 0.3, 0.7] {
            let mut prod = 1.0f64;
            for m in 1..400 {
                let m = m as f64;
                prod *= (1.0 - q.powf(2.0 * m)) * (1.0 + q.powf(2.0 * m - 1.0)).powi(2);
            }
            assert!((theta3(q).unwrap() - prod).abs() < 1e-13, "q={q}");
        }
        assert!(theta3(1.0).is_err());
    }

    #[test]
    fn c_tends_to_one() {
        let mut prev = f64::INFINITY;
        for d in [0.4, 0.3, 0.2, 0.1, 0.05] {
            let c = c_delta_lambda(d, ft_lambda(d)).unwrap();
            assert!(c >= 1.0 && c < prev, "Δ={d}: C={c}");
            prev = c;
        }
        assert!(prev - 1.0 < 1e-5);
    }

    #[test]
    fn validity_limit_value() {
        let lim = ft_validity_limit();
        assert!((lim - 0.372).abs() < 5e-4, "{lim}");
        assert!(ft_lower_bound(lim - 1e-9).unwrap().validity);
        assert!(!ft_lower_bound(lim + 1e-9).unwrap().validity);
    }

    #[test]
    fn shear_zero_at_origin() {
        let d = TwirledCubicDensity::new(0.2, 2.0).unwrap();
        let at0 = d.density(0.0, 0.0);
        for vp in [-0.1, -0.01, 0.01, 0.1] {
            assert!(d.density(0.0, vp) < at0);
        }
    }
}
