//! Gaussian circuit algebra over `N` modes.
//!
//! Matrices act on the quadrature vector `(q_1…q_N, p_1…p_N)` in the
//! Heisenberg picture: a unitary `U` with matrix `S` satisfies
//! `U†ζU = Sζ + d`.  For a circuit that applies `U_1` then `U_2` the total
//! matrix is `S_2·S_1`.
//!
//! Gaussian displacement noise with covariance `Σ` that occurs before a
//! circuit with matrix `S` is equivalent to noise with covariance `SΣSᵀ`
//! after it.  Homodyne measurements are handled by marginalising the
//! unmeasured ancilla quadratures and conditioning (Schur complement) on the
//! measured ones.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Symplectic matrix plus displacement vector of a Gaussian unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianOp {
    pub s: DMatrix<f64>,
    pub d: DVector<f64>,
}

/// Mean and covariance of a Gaussian random displacement.
#[derive(Clone, Debug, PartialEq)]
pub struct CovState {
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
}

/// Square-code envelope strength `Δ` and asymmetry `λ`, giving the biased
/// widths `Δ_q = Δ/√λ` and `Δ_p = Δ√λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BiasParams {
    pub delta: f64,
    pub lam: f64,
}

impl BiasParams {
    pub fn new(delta: f64, lam: f64) -> Result<Self> {
        positive("delta", delta)?;
        positive("lambda", lam)?;
        Ok(Self { delta, lam })
    }
    pub fn delta_q(&self) -> f64 {
        self.delta / self.lam.sqrt()
    }
    pub fn delta_p(&self) -> f64 {
        self.delta * self.lam.sqrt()
    }
}

/// Elementary two- and single-mode Gaussian unitaries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Generator {
    /// Mixes modes `i` and `j`: `q_i → cos θ q_i − sin θ q_j`,
    /// `q_j → sin θ q_i + cos θ q_j`, and identically for `p`.
    BeamSplitter { theta: f64, i: usize, j: usize },
    /// `q_i → α q_i`, `p_i → p_i/α`.
    Squeezer { alpha: f64, i: usize },
    /// `exp(−i g q_i p_j)`: `q_j → q_j + g q_i`, `p_i → p_i − g p_j`.
    Cx { g: f64, i: usize, j: usize },
    /// `exp(i ξ p_i q_j)`: `q_i → q_i − ξ q_j`, `p_j → p_j + ξ p_i`.
    Feedforward { xi: f64, i: usize, j: usize },
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be > 0, got {x}")))
    }
}

/// `Ω = [[0, I], [−I, 0]]`.
pub fn omega(n: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        o[(k, n + k)] = 1.0;
        o[(n + k, k)] = -1.0;
    }
    o
}

/// Max-abs entry of `SᵀΩS − Ω`.
pub fn symplectic_residual(s: &DMatrix<f64>) -> f64 {
    let n = s.nrows() / 2;
    let o = omega(n);
    (s.transpose() * &o * s - o).amax()
}

impl GaussianOp {
    pub fn identity(n: usize) -> Self {
        Self {
            s: DMatrix::identity(2 * n, 2 * n),
            d: DVector::zeros(2 * n),
        }
    }

    pub fn from_matrix(s: DMatrix<f64>) -> Result<Self> {
        if s.nrows() != s.ncols() || s.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "symplectic matrix must be 2N×2N, got {}×{}",
                s.nrows(),
                s.ncols()
            )));
        }
        let n = s.nrows();
        Ok(Self {
            s,
            d: DVector::zeros(n),
        })
    }

    pub fn modes(&self) -> usize {
        self.s.nrows() / 2
    }

    pub fn is_symplectic(&self, tol: f64) -> bool {
        symplectic_residual(&self.s) <= tol
    }

    /// Heisenberg-picture inverse.
    pub fn inverse(&self) -> Self {
        // S⁻¹ = −Ω Sᵀ Ω for symplectic S.
        let o = omega(self.modes());
        let sinv = -(&o * self.s.transpose() * &o);
        let d = -(&sinv * &self.d);
        Self { s: sinv, d }
    }

    /// This operation followed by `later`.
    pub fn then(&self, later: &GaussianOp) -> Result<GaussianOp> {
        compose(&[self.clone(), later.clone()])
    }
}

/// Matrix of a single generator on `n` modes.
pub fn generator(kind: Generator, n: usize) -> Result<GaussianOp> {
    let check = |i: usize| {
        if i >= n {
            Err(Error::InvalidArgument(format!("mode index {i} out of range for {n} modes")))
        } else {
            Ok(())
        }
    };
    let pair = |i: usize, j: usize| -> Result<()> {
        check(i)?;
        check(j)?;
        if i == j {
            return Err(Error::InvalidArgument(format!(
                "two-mode generator needs distinct modes, got {i} twice"
            )));
        }
        Ok(())
    };
    let finite = |name: &str, x: f64| {
        if x.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{name} must be finite")))
        }
    };
    let mut op = GaussianOp::identity(n);
    let s = &mut op.s;
    match kind {
        Generator::BeamSplitter { theta, i, j } => {
            pair(i, j)?;
            finite("theta", theta)?;
            let (sn, c) = theta.sin_cos();
            for off in [0, n] {
                s[(off + i, off + i)] = c;
                s[(off + i, off + j)] = -sn;
                s[(off + j, off + i)] = sn;
                s[(off + j, off + j)] = c;
            }
        }
        Generator::Squeezer { alpha, i } => {
            check(i)?;
            positive("alpha", alpha)?;
            s[(i, i)] = alpha;
            s[(n + i, n + i)] = 1.0 / alpha;
        }
        Generator::Cx { g, i, j } => {
            pair(i, j)?;
            finite("g", g)?;
            s[(j, i)] = g;
            s[(n + i, n + j)] = -g;
        }
        Generator::Feedforward { xi, i, j } => {
            pair(i, j)?;
            finite("xi", xi)?;
            s[(i, j)] = -xi;
            s[(n + j, n + i)] = xi;
        }
    }
    Ok(op)
}

/// Composes operations in circuit order (first element applied first).
pub fn compose(ops: &[GaussianOp]) -> Result<GaussianOp> {
    let Some(first) = ops.first() else {
        return Err(Error::InvalidArgument("empty circuit".into()));
    };
    let n = first.modes();
    let mut acc = GaussianOp::identity(n);
    for op in ops {
        if op.modes() != n {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}-mode and {}-mode operations",
                n,
                op.modes()
            )));
        }
        acc = GaussianOp {
            d: &op.s * &acc.d + &op.d,
            s: &op.s * &acc.s,
        };
    }
    Ok(acc)
}

impl CovState {
    /// Independent isotropic noise `σ²·I` on `n` modes.
    pub fn isotropic(n: usize, variance: f64) -> Self {
        Self {
            mu: DVector::zeros(2 * n),
            sigma: DMatrix::identity(2 * n, 2 * n) * variance,
        }
    }

    /// Noise before `op` commuted to after it.
    pub fn propagate(&self, op: &GaussianOp) -> Result<CovState> {
        if op.s.nrows() != self.sigma.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "state has {} quadratures, op acts on {}",
                self.sigma.nrows(),
                op.s.nrows()
            )));
        }
        Ok(CovState {
            mu: &op.s * &self.mu + &op.d,
            sigma: &op.s * &self.sigma * op.s.transpose(),
        })
    }

    /// Marginal over the quadratures `keep` (in the given order).
    pub fn marginalize(&self, keep: &[usize]) -> Result<CovState> {
        let dim = self.sigma.nrows();
        if let Some(&bad) = keep.iter().find(|&&k| k >= dim) {
            return Err(Error::InvalidArgument(format!("quadrature index {bad} ≥ {dim}")));
        }
        Ok(CovState {
            mu: DVector::from_fn(keep.len(), |r, _| self.mu[keep[r]]),
            sigma: DMatrix::from_fn(keep.len(), keep.len(), |r, c| self.sigma[(keep[r], keep[c])]),
        })
    }
}

/// Result of conditioning on a homodyne record.
#[derive(Clone, Debug)]
pub struct Conditioned {
    /// Conditional state of the unmeasured quadratures when the outcome
    /// equals the prior mean of the measured ones.
    pub state: CovState,
    /// `Σ_DA Σ_AA⁻¹`: maps an outcome deviation to a mean shift.
    pub gain: DMatrix<f64>,
    /// Indices (into the input state) of the unmeasured quadratures.
    pub remaining: Vec<usize>,
    measured_mean: DVector<f64>,
}

impl Conditioned {
    /// Conditional mean for a given outcome on the measured quadratures.
    pub fn mean_for_outcome(&self, outcome: &DVector<f64>) -> DVector<f64> {
        &self.state.mu + &self.gain * (outcome - &self.measured_mean)
    }
}

/// Bayesian update on measured quadrature indices (Schur complement).
/// The conditional covariance does not depend on the outcome.
pub fn condition_on_homodyne(state: &CovState, measured: &[usize]) -> Result<Conditioned> {
    let dim = state.sigma.nrows();
    let mut meas = measured.to_vec();
    meas.sort_unstable();
    meas.dedup();
    if meas.is_empty() || meas.iter().any(|&m| m >= dim) {
        return Err(Error::InvalidArgument(format!(
            "measured indices {measured:?} invalid for {dim} quadratures"
        )));
    }
    let remaining: Vec<usize> = (0..dim).filter(|i| !meas.contains(i)).collect();
    let sub = |rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| state.sigma[(rows[r], cols[c])])
    };
    let s_aa = sub(&meas, &meas);
    let s_da = sub(&remaining, &meas);
    let s_dd = sub(&remaining, &remaining);
    let singular = || Error::SingularConditioning {
        indices: meas.clone(),
    };
    let chol = s_aa.clone().cholesky().ok_or_else(singular)?;
    let l = chol.l();
    let diag_max = (0..l.nrows()).map(|k| l[(k, k)]).fold(0.0f64, f64::max);
    let diag_min = (0..l.nrows()).map(|k| l[(k, k)]).fold(f64::INFINITY, f64::min);
    if !(diag_min > 1e-10 * diag_max) {
        return Err(singular());
    }
    let gain = chol.solve(&s_da.transpose()).transpose();
    let sigma_c = &s_dd - &gain * s_da.transpose();
    let sigma_c = (&sigma_c + sigma_c.transpose()) * 0.5;
    let mu_d = DVector::from_fn(remaining.len(), |r, _| state.mu[remaining[r]]);
    let mu_a = DVector::from_fn(meas.len(), |r, _| state.mu[meas[r]]);
    Ok(Conditioned {
        state: CovState { mu: mu_d, sigma: sigma_c },
        gain,
        remaining,
        measured_mean: mu_a,
    })
}

/// Parameters that rewrite the biasing circuit as a beam splitter followed
/// by squeezers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MorphingParams {
    pub xi: f64,
    pub theta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

/// `ξ = √λ/(λ+1)`, `θ = arctan √λ`, `α₁ = √(λ+1)`, `α₂ = 1/√(λ+1)`.
pub fn morphing_params(lam: f64) -> Result<MorphingParams> {
    positive("lambda", lam)?;
    let r = lam.sqrt();
    Ok(MorphingParams {
        xi: r / (lam + 1.0),
        theta: r.atan(),
        alpha1: (lam + 1.0).sqrt(),
        alpha2: 1.0 / (lam + 1.0).sqrt(),
    })
}

/// Data-mode widths after the biasing circuit with ancilla asymmetry `λ`:
/// `(Δ/√(1+λ), Δ√(1+λ))`.
pub fn biasing_update(delta: f64, lam: f64) -> Result<(f64, f64)> {
    positive("delta", delta)?;
    positive("lambda", lam)?;
    let f = (1.0 + lam).sqrt();
    Ok((delta / f, delta * f))
}

/// Largest deviation between [`biasing_update`] and the covariance obtained
/// by propagating `Δ²·I` through `exp(−i√λ q₁p₂)` and conditioning on the
/// ancilla position (Schur complement).
pub fn biasing_residual(delta: f64, lam: f64) -> Result<f64> {
    let (dq, dp) = biasing_update(delta, lam)?;
    let cx = generator(Generator::Cx { g: lam.sqrt(), i: 0, j: 1 }, 2)?;
    let state = CovState::isotropic(2, delta * delta).propagate(&cx)?;
    let marginal = state.marginalize(&[0, 2, 1])?;
    let sigma = condition_on_homodyne(&marginal, &[2])?.state.sigma;
    Ok((sigma[(0, 0)] - dq * dq)
        .abs()
        .max((sigma[(1, 1)] - dp * dp).abs())
        .max(sigma[(0, 1)].abs()))
}

/// Beam-splitter angle of one breeding round, `arctan(1/√λ)`.
pub fn breeding_angle(lam: f64) -> Result<f64> {
    if !(lam >= 1.0) || !lam.is_finite() {
        return Err(Error::InvalidArgument(format!("breeding needs λ ≥ 1, got {lam}")));
    }
    Ok((1.0 / lam.sqrt()).atan())
}

/// Left side of the rearrangement: `exp(−i g q₁p₂)` then `exp(i ξ p₁q₂)`.
pub fn cx_feedforward(g: f64, xi: f64) -> Result<GaussianOp> {
    compose(&[
        generator(Generator::Cx { g, i: 0, j: 1 }, 2)?,
        generator(Generator::Feedforward { xi, i: 0, j: 1 }, 2)?,
    ])
}

/// Right side: a beam splitter then one squeezer per mode.
pub fn beam_splitter_squeezers(theta: f64, alpha_data: f64, alpha_anc: f64) -> Result<GaussianOp> {
    compose(&[
        generator(Generator::BeamSplitter { theta, i: 0, j: 1 }, 2)?,
        generator(Generator::Squeezer { alpha: alpha_data, i: 0 }, 2)?,
        generator(Generator::Squeezer { alpha: alpha_anc, i: 1 }, 2)?,
    ])
}

/// Residual of the morphing rearrangement at asymmetry `λ`.  The squeezers
/// that divide `q` by `α` are `Squeezer(1/α)` in this module's convention.
pub fn morphing_residual(lam: f64) -> Result<f64> {
    let p = morphing_params(lam)?;
    let lhs = cx_feedforward(lam.sqrt(), p.xi)?;
    let rhs = beam_splitter_squeezers(p.theta, 1.0 / p.alpha1, 1.0 / p.alpha2)?;
    Ok((lhs.s - rhs.s).amax())
}

/// Residual of the breeding-round rearrangement at asymmetry `λ`:
/// `exp(−i q₁p₂/√λ)` then `exp(i √λ/(λ+1) p₁q₂)` equals a beam splitter at
/// `arctan(1/√λ)` followed by squeezers dividing `q` by `√((λ+1)/λ)` (data)
/// and `√(λ/(λ+1))` (ancilla).
pub fn breeding_residual(lam: f64) -> Result<f64> {
    let theta = breeding_angle(lam)?;
    let lhs = cx_feedforward(1.0 / lam.sqrt(), lam.sqrt() / (lam + 1.0))?;
    let a1 = ((lam + 1.0) / lam).sqrt();
    let a2 = (lam / (lam + 1.0)).sqrt();
    let rhs = beam_splitter_squeezers(theta, 1.0 / a1, 1.0 / a2)?;
    Ok((lhs.s - rhs.s).amax())
}

/// One named identity and its residual.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub passed: bool,
}

/// Tolerance for circuit identities (max-abs matrix entry).
pub const IDENTITY_TOL: f64 = 1e-12;
/// Relative tolerance for no-go determinants.
pub const NOGO_REL_TOL: f64 = 1e-10;

/// Asymmetries exercised by the morphing identity.
pub const MORPHING_LAMBDAS: [f64; 5] = [0.5, 1.0, 2.0, 3.0, 7.0];

/// Checks the q-Steane rewrite, the morphing rearrangement over
/// [`MORPHING_LAMBDAS`], the breeding-round rearrangement, symplectic
/// closure, and the biasing update against explicit homodyne conditioning.
pub fn identity_suite() -> Result<Vec<IdentityCheck>> {
    let mut out = Vec::new();
    let mut push = |name: String, residual: f64| {
        out.push(IdentityCheck {
            passed: residual <= IDENTITY_TOL,
            name,
            residual,
        })
    };
    let lhs = cx_feedforward(1.0, 0.5)?;
    let rhs = beam_splitter_squeezers(
        std::f64::consts::FRAC_PI_4,
        std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::SQRT_2,
    )?;
    push("q-steane-rewrite".into(), (&lhs.s - &rhs.s).amax());
    push(
        "symplectic-closure/q-steane".into(),
        symplectic_residual(&lhs.s).max(symplectic_residual(&rhs.s)),
    );
    for lam in MORPHING_LAMBDAS {
        push(format!("morphing/lambda={lam}"), morphing_residual(lam)?);
    }
    for lam in [1.0, 2.0, 3.0, 7.0] {
        push(format!("breeding/lambda={lam}"), breeding_residual(lam)?);
    }
    for (delta, lam) in [(0.1, 0.5), (0.25, 1.0), (0.3, 2.5), (0.5, 7.0)] {
        push(format!("biasing-update/delta={delta}/lambda={lam}"), biasing_residual(delta, lam)?);
    }
    Ok(out)
}

/// Propagates `Δ²·I` through `circuit` (mode 0 = data, modes 1..=n_anc =
/// ancillas), marginalises ancilla momenta, conditions on ancilla positions
/// and returns the determinant of the 2×2 data covariance.
pub fn nogo_check(circuit: &GaussianOp, n_ancilla: usize, delta: f64) -> Result<f64> {
    positive("delta", delta)?;
    let n = circuit.modes();
    if n != n_ancilla + 1 || n_ancilla == 0 {
        return Err(Error::DimensionMismatch(format!(
            "circuit has {n} modes, expected 1 data + {n_ancilla} ancillas"
        )));
    }
    let state = CovState::isotropic(n, delta * delta).propagate(circuit)?;
    // Keep q_data, p_data and the ancilla positions, in that order.
    let mut keep = vec![0, n];
    keep.extend(1..n);
    let marginal = state.marginalize(&keep)?;
    let measured: Vec<usize> = (2..2 + n_ancilla).collect();
    let cond = condition_on_homodyne(&marginal, &measured)?;
    Ok(cond.state.sigma.determinant())
}

/// Seeded random circuit: `depth` random generators on `n` modes.
pub fn random_circuit(n: usize, depth: usize, rng: &mut impl Rng) -> Result<GaussianOp> {
    let mut ops = Vec::with_capacity(depth);
    for _ in 0..depth {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n);
        if n > 1 {
            while j == i {
                j = rng.random_range(0..n);
            }
        }
        let kind = match (rng.random_range(0..4u8), n > 1) {
            (0, _) | (_, false) => Generator::Squeezer {
                alpha: rng.random_range(-0.7f64..0.7).exp(),
                i,
            },
            (1, true) => Generator::BeamSplitter {
                theta: rng.random_range(0.0..std::f64::consts::TAU),
                i,
                j,
            },
            (2, true) => Generator::Cx {
                g: rng.random_range(-1.5..1.5),
                i,
                j,
            },
            _ => Generator::Feedforward {
                xi: rng.random_range(-1.5..1.5),
                i,
                j,
            },
        };
        ops.push(generator(kind, n)?);
    }
    compose(&ops)
}

/// One sample of the no-go sweep.
#[derive(Clone, Debug, Serialize)]
pub struct NogoSample {
    pub n_ancilla: usize,
    pub determinant: f64,
    pub relative_error: f64,
}

/// Runs [`nogo_check`] on `count` seeded random circuits with 1…`max_ancilla`
/// ancillas (cycled).
pub fn nogo_sweep(count: usize, max_ancilla: usize, delta: f64, seed: u64) -> Result<Vec<NogoSample>> {
    if max_ancilla == 0 {
        return Err(Error::InvalidArgument("need at least one ancilla".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = delta.powi(4);
    (0..count)
        .map(|k| {
            let n_anc = 1 + k % max_ancilla;
            let c = random_circuit(n_anc + 1, 6 * (n_anc + 1), &mut rng)?;
            let det = nogo_check(&c, n_anc, delta)?;
            Ok(NogoSample {
                n_ancilla: n_anc,
                determinant: det,
                relative_error: (det - target).abs() / target,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn squeezer_matrix() {
        let op = generator(Generator::Squeezer { alpha: 2.0, i: 0 }, 1).unwrap();
        assert_eq!(op.s, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]));
        assert!(generator(Generator::Squeezer { alpha: 0.0, i: 0 }, 1).is_err());
        assert!(generator(Generator::Squeezer { alpha: 1.0, i: 1 }, 1).is_err());
    }

    #[test]
    fn zero_angle_beam_splitter_is_identity() {
        let op = generator(Generator::BeamSplitter { theta: 0.0, i: 0, j: 1 }, 2).unwrap();
        assert_eq!(op.s, DMatrix::identity(4, 4));
    }

    #[test]
    fn cx_rows() {
        let op = generator(Generator::Cx { g: 1.0, i: 0, j: 1 }, 2).unwrap();
        // Rows: q1, q2, p1, p2.
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[1., 0., 0., 0., 1., 1., 0., 0., 0., 0., 1., -1., 0., 0., 0., 1.],
        );
        assert_eq!(op.s, expect);
        assert!(generator(Generator::Cx { g: 1.0, i: 1, j: 1 }, 2).is_err());
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_circuit(3, 12, &mut rng).unwrap();
        let id = compose(&[a.clone(), a.inverse()]).unwrap();
        assert_abs_diff_eq!((id.s - DMatrix::identity(6, 6)).amax(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn compose_rejects_mismatch() {
        let a = GaussianOp::identity(1);
        let b = GaussianOp::identity(2);
        assert!(matches!(compose(&[a, b]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn morphing_examples() {
        let p = morphing_params(1.0).unwrap();
        assert_abs_diff_eq!(p.xi, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.theta, std::f64::consts::FRAC_PI_4, epsilon = 1e-15);
        let p = morphing_params(3.0).unwrap();
        assert_abs_diff_eq!(p.xi, 3f64.sqrt() / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.theta, std::f64::consts::FRAC_PI_3, epsilon = 1e-15);
        assert_abs_diff_eq!(p.alpha1, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.alpha2, 0.5, epsilon = 1e-15);
        assert!(morphing_params(0.0).is_err());
    }

    #[test]
    fn identity_suite_passes() {
        for c in identity_suite().unwrap() {
            assert!(c.passed, "{} residual {}", c.name, c.residual);
        }
    }

    #[test]
    fn biasing_and_breeding() {
        let (q, p) = biasing_update(0.2, 3.0).unwrap();
        assert_abs_diff_eq!(q, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(p, 0.4, epsilon = 1e-15);
        let (q, p) = biasing_update(0.3, 1e-12).unwrap();
        assert_abs_diff_eq!(q, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(p, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(breeding_angle(3.0).unwrap(), std::f64::consts::FRAC_PI_6, epsilon = 1e-15);
        assert!(breeding_angle(0.5).is_err());
    }

    #[test]
    fn biased_steane_conditioning_matches_update() {
        let (delta, lam) = (0.3, 2.5);
        let cx = generator(Generator::Cx { g: f64::sqrt(lam), i: 0, j: 1 }, 2).unwrap();
        let st = CovState::isotropic(2, delta * delta).propagate(&cx).unwrap();
        let marg = st.marginalize(&[0, 2, 1]).unwrap();
        let c = condition_on_homodyne(&marg, &[2]).unwrap();
        let (dq, dp) = biasing_update(delta, lam).unwrap();
        assert_abs_diff_eq!(c.state.sigma[(0, 0)], dq * dq, epsilon = 1e-14);
        assert_abs_diff_eq!(c.state.sigma[(1, 1)], dp * dp, epsilon = 1e-14);
        assert_abs_diff_eq!(c.state.sigma[(0, 1)], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn uncorrelated_conditioning_leaves_data_unchanged() {
        let st = CovState::isotropic(2, 0.04);
        let c = condition_on_homodyne(&st, &[1]).unwrap();
        assert_eq!(c.remaining, vec![0, 2, 3]);
        assert_abs_diff_eq!((c.state.sigma - DMatrix::identity(3, 3) * 0.04).amax(), 0.0);
    }

    #[test]
    fn singular_block_is_reported() {
        let mut st = CovState::isotropic(2, 1.0);
        st.sigma[(1, 1)] = 0.0;
        match condition_on_homodyne(&st, &[1]) {
            Err(Error::SingularConditioning { indices }) => assert_eq!(indices, vec![1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nogo_identity_and_sweep() {
        let d = 0.27;
        let det = nogo_check(&GaussianOp::identity(2), 1, d).unwrap();
        assert_abs_diff_eq!(det / d.powi(4), 1.0, epsilon = 1e-12);
        for s in nogo_sweep(40, 4, d, 11).unwrap() {
            assert!(s.relative_error < NOGO_REL_TOL, "{s:?}");
        }
    }
}
