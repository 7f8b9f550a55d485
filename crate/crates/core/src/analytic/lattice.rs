//! Logical characteristic functions of single-mode operators on the square
//! GKP lattice, and the syndrome posterior of a thermal state.
//!
//! Conventions: `W(v) = exp(i√(2π)(v_p q − v_q p))` with
//! `W(u)W(v) = e^{−iπ u×v} W(u+v)`, `u×v = u_q v_p − u_p v_q`.  The ideal
//! code states are unit-weight combs `|j̄⟩ = Σ_s |q = (2s+j)√π⟩`, logical
//! Paulis are `σ̄_μ = W(ℓ_μ)` with `ℓ = (0,0), (1/√2,0), (1/√2,1/√2),
//! (0,1/√2)`, and stabilisers are `W(√2n)`.  An operator is expanded as
//! `A = ∫ χ(u) W(u) du` with `χ(u) = Tr[W(u)†A]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::twirl::PATCH_HALF_WIDTH;
use crate::error::{Error, Result};

/// Logical Pauli label, `σ_0..σ_3 = I, X, Y, Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LogicalPauli {
    I,
    X,
    Y,
    Z,
}

impl LogicalPauli {
    pub const ALL: [LogicalPauli; 4] = [LogicalPauli::I, LogicalPauli::X, LogicalPauli::Y, LogicalPauli::Z];

    /// Displacement `ℓ_μ` implementing the logical Pauli.
    pub fn offset(self) -> (f64, f64) {
        match self {
            LogicalPauli::I => (0.0, 0.0),
            LogicalPauli::X => (FRAC_1_SQRT_2, 0.0),
            LogicalPauli::Y => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            LogicalPauli::Z => (0.0, FRAC_1_SQRT_2),
        }
    }
}

fn cross(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

/// Whether `v` lies in the half-open correctable patch `(−1/√8, 1/√8]²`.
pub fn in_patch(v: (f64, f64)) -> bool {
    let inside = |x: f64| x > -PATCH_HALF_WIDTH && x <= PATCH_HALF_WIDTH;
    inside(v.0) && inside(v.1)
}

/// Gaussian characteristic function `χ(u) = exp(−π uᵀAu) · e^{−2πi m×u}`:
/// the operator `W(m) A₀ W(m)†` where `A₀` has the centred Gaussian `χ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianChi {
    pub a: [[f64; 2]; 2],
    pub mean: (f64, f64),
}

impl GaussianChi {
    pub fn new(a: [[f64; 2]; 2], mean: (f64, f64)) -> Result<Self> {
        let sym = (a[0][1] - a[1][0]).abs() <= 1e-14 * (a[0][0].abs() + a[1][1].abs());
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if !(sym && a[0][0] > 0.0 && det > 0.0) {
            return Err(Error::InvalidArgument(format!("χ quadratic form must be symmetric positive definite: {a:?}")));
        }
        Ok(Self { a, mean })
    }

    /// Thermal state with mean photon number `n̄`:
    /// `χ(u) = exp(−π(2n̄+1)|u|²/2)`.
    pub fn thermal(n_bar: f64) -> Result<Self> {
        if !(n_bar >= 0.0 && n_bar.is_finite()) {
            return Err(Error::InvalidArgument(format!("n̄ must be ≥ 0, got {n_bar}")));
        }
        let s = n_bar + 0.5;
        Self::new([[s, 0.0], [0.0, s]], (0.0, 0.0))
    }

    pub fn eval(&self, u: (f64, f64)) -> C64 {
        let q = self.a[0][0] * u.0 * u.0 + 2.0 * self.a[0][1] * u.0 * u.1 + self.a[1][1] * u.1 * u.1;
        C64::from_polar((-PI * q).exp(), -2.0 * PI * cross(self.mean, u))
    }

    /// Smallest eigenvalue of `A`, the slowest Gaussian decay rate.
    fn min_rate(&self) -> f64 {
        let (p, q, r) = (self.a[0][0], self.a[0][1], self.a[1][1]);
        0.5 * (p + r) - (0.25 * (p - r) * (p - r) + q * q).sqrt()
    }

    /// Lattice cutoff making every dropped term smaller than `e^{−40}`
    /// relative to `χ(0)`, for arguments within the patch plus a Pauli
    /// offset.
    pub fn default_lattice_cut(&self) -> usize {
        let reach = (40.0 / (PI * self.min_rate())).sqrt() + self.mean.0.hypot(self.mean.1);
        ((reach + 1.5) / SQRT_2).ceil() as usize + 1
    }
}

/// Normalisation of `Tr[Π_μ σ̄_μ W(√2n)]` for unit-weight comb codewords.
const COMB_NORM: f64 = 0.564_189_583_547_756_3; // 1/√π

/// Sums `phase(n)·χ(arg(n))` over `n ∈ [−cut, cut]²` and fails if the
/// outermost shell still carries weight.
fn lattice_sum(
    cut: usize,
    mut term: impl FnMut((f64, f64)) -> C64,
) -> Result<C64> {
    let c = cut as i64;
    let mut total = C64::new(0.0, 0.0);
    let mut abs_total = 0.0;
    let mut shell = 0.0f64;
    for n1 in -c..=c {
        for n2 in -c..=c {
            let t = term((n1 as f64, n2 as f64));
            total += t;
            abs_total += t.norm();
            if n1.abs() == c || n2.abs() == c {
                shell = shell.max(t.norm());
            }
        }
    }
    if !total.re.is_finite() || !total.im.is_finite() {
        return Err(Error::Numeric("lattice sum is not finite".into()));
    }
    if shell > 1e-13 * abs_total.max(f64::MIN_POSITIVE) {
        return Err(Error::Accuracy(format!(
            "lattice sum not converged at cut {cut}: boundary term {shell:.3e} vs total {abs_total:.3e}"
        )));
    }
    Ok(total)
}

/// Logical characteristic function `ξ^{σ_μ}(v) = Tr[Π_μ W(v)† A]` for `v` in
/// the patch.
///
/// Every displacement decomposes uniquely as `W(v+√2n+ℓ_μ) =
/// e^{iθ} W(v) σ̄_μ W(√2n)` with `θ = π[v×ℓ_μ + (v+ℓ_μ)×√2n]`, so
/// `ξ^{σ_μ}(v) = (1/√π) Σ_n e^{iθ} χ(v + √2n + ℓ_μ)`.
pub fn logical_char_function(
    chi: &GaussianChi,
    pauli: LogicalPauli,
    v: (f64, f64),
    lattice_cut: Option<usize>,
) -> Result<C64> {
    if !in_patch(v) {
        return Err(Error::PreconditionViolation(format!("v = {v:?} lies outside the correctable patch")));
    }
    let l = pauli.offset();
    let vl = (v.0 + l.0, v.1 + l.1);
    let cut = lattice_cut.unwrap_or_else(|| chi.default_lattice_cut());
    let sum = lattice_sum(cut, |n| {
        let s = (SQRT_2 * n.0, SQRT_2 * n.1);
        let theta = PI * (cross(v, l) + cross(vl, s));
        chi.eval((vl.0 + s.0, vl.1 + s.1)) * C64::from_polar(1.0, theta)
    })?;
    Ok(sum * COMB_NORM)
}

/// Syndrome-conditioned logical components
/// `c_μ(v) = Tr[Π_μ W(v)† A W(v)]`: the Pauli expectations of the logical
/// state left after an ideal round that finds (and undoes) displacement `v`,
/// times the outcome density.  Conjugating by `W(v)` turns the lattice sum
/// into a Fourier series, `c_μ(v) = (1/√π) Σ_n e^{iπℓ_μ×√2n} e^{2πi v×w}
/// χ(w)` with `w = √2n + ℓ_μ`; only the last phase depends on `v`, so the
/// rest is tabulated once.
#[derive(Clone, Debug)]
pub struct SyndromeSeries {
    /// Per Pauli: `(w, (1/√π)·e^{iπℓ×√2n}·χ(w))`.
    terms: [Vec<((f64, f64), C64)>; 4],
}

impl SyndromeSeries {
    pub fn new(chi: &GaussianChi, lattice_cut: Option<usize>) -> Result<Self> {
        let cut = lattice_cut.unwrap_or_else(|| chi.default_lattice_cut());
        let mut terms: [Vec<((f64, f64), C64)>; 4] = Default::default();
        for (slot, pauli) in terms.iter_mut().zip(LogicalPauli::ALL) {
            let l = pauli.offset();
            let mut list = Vec::new();
            // The convergence check is the same as for the ξ sums: evaluate
            // the worst-case |terms| at v = 0.
            lattice_sum(cut, |n| {
                let s = (SQRT_2 * n.0, SQRT_2 * n.1);
                let w = (s.0 + l.0, s.1 + l.1);
                let t = chi.eval(w) * C64::from_polar(COMB_NORM, PI * cross(l, s));
                list.push((w, t));
                t
            })?;
            *slot = list;
        }
        Ok(Self { terms })
    }

    pub fn eval(&self, v: (f64, f64)) -> Result<[C64; 4]> {
        if !in_patch(v) {
            return Err(Error::PreconditionViolation(format!("v = {v:?} lies outside the correctable patch")));
        }
        let mut out = [C64::new(0.0, 0.0); 4];
        for (slot, list) in out.iter_mut().zip(&self.terms) {
            *slot = list.iter().map(|&(w, t)| t * C64::from_polar(1.0, 2.0 * PI * cross(v, w))).sum();
        }
        Ok(out)
    }
}

/// One-shot form of [`SyndromeSeries`].
pub fn syndrome_components(chi: &GaussianChi, v: (f64, f64), lattice_cut: Option<usize>) -> Result<[C64; 4]> {
    if !in_patch(v) {
        return Err(Error::PreconditionViolation(format!("v = {v:?} lies outside the correctable patch")));
    }
    SyndromeSeries::new(chi, lattice_cut)?.eval(v)
}

/// Outcome density and conditional logical Bloch vector for one syndrome.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VacuumPosterior {
    /// Density of the syndrome `v` over the patch (integrates to 1).
    pub density: f64,
    /// `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of the conditional logical state.
    pub bloch: [f64; 3],
}

/// Posterior of the vacuum state after a noisy round of square-GKP error
/// correction: the measurement noise `tanh(Δ²/2)` turns the vacuum into a
/// thermal state with `n̄ = tanh(Δ²/2)`.
pub fn vacuum_posterior(delta: f64, v: (f64, f64)) -> Result<VacuumPosterior> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("Δ must be positive, got {delta}")));
    }
    let chi = GaussianChi::thermal((delta * delta / 2.0).tanh())?;
    posterior_from_chi(&chi, v, None)
}

/// As [`vacuum_posterior`] for a general normalised Gaussian state.
pub fn posterior_from_chi(chi: &GaussianChi, v: (f64, f64), lattice_cut: Option<usize>) -> Result<VacuumPosterior> {
    posterior_from_components(syndrome_components(chi, v, lattice_cut)?, v)
}

/// Outcome density and Bloch vector from conditioned components
/// `[c_I, c_X, c_Y, c_Z]` at syndrome `v`.
pub fn posterior_from_components(c: [C64; 4], v: (f64, f64)) -> Result<VacuumPosterior> {
    let weight = c[0].re;
    if !(weight > 0.0) {
        return Err(Error::Numeric(format!("non-positive outcome weight {weight:e} at v = {v:?}")));
    }
    // Patch area is 1/2 and ∫ c_I = χ(0)/(2√π), so the density is 2√π·c_I.
    Ok(VacuumPosterior {
        density: 2.0 * PI.sqrt() * weight,
        bloch: [c[1].re / weight, c[2].re / weight, c[3].re / weight],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_projection_is_theta_squared() {
        // ξ^I(0) for the vacuum: (1/√π)·θ₃(e^{−π})².
        let chi = GaussianChi::thermal(0.0).unwrap();
        let xi = logical_char_function(&chi, LogicalPauli::I, (0.0, 0.0), None).unwrap();
        let th = super::super::twirl::theta3((-PI).exp()).unwrap();
        assert!((xi.re - th * th / PI.sqrt()).abs() < 1e-14 && xi.im.abs() < 1e-15);
    }

    #[test]
    fn patch_is_half_open() {
        assert!(in_patch((PATCH_HALF_WIDTH, PATCH_HALF_WIDTH)));
        assert!(!in_patch((-PATCH_HALF_WIDTH, 0.0)));
        let chi = GaussianChi::thermal(0.1).unwrap();
        assert!(logical_char_function(&chi, LogicalPauli::X, (0.5, 0.0), None).is_err());
    }

    #[test]
    fn too_small_cut_is_reported() {
        let chi = GaussianChi::thermal(3.0).unwrap();
        assert!(matches!(
            logical_char_function(&chi, LogicalPauli::I, (0.1, 0.0), Some(1)),
            Err(Error::Accuracy(_))
        ));
    }

    #[test]
    fn syndrome_components_are_real() {
        let chi = GaussianChi::thermal(0.03).unwrap();
        for v in [(0.0, 0.0), (0.1, -0.2), (0.3, 0.3)] {
            for c in syndrome_components(&chi, v, None).unwrap() {
                assert!(c.im.abs() < 1e-14, "{c}");
            }
        }
    }
}
