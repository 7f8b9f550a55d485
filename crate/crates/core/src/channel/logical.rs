//! The effective logical channel of a polynomial phase gate: rectangular
//! codeword preparation, the gate, and a smeared ideal-QEC Pauli readout.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::{Arc, OnceLock};

use parking_lot::RwLock;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::cache::{CacheKey, OperatorCache};
use crate::fock::{
    codeword_pair, inner, norm_sqr, pauli_measurement_operator, FockOperator, FockVector, GkpParams, Pauli,
    PauliReadout, PhaseGateAction, Smear, TruncationPlan, C64, DEFAULT_N_CUT,
};
use crate::polyalg::table::SimulationGate;
use crate::polyalg::RationalPolynomial;

/// Largest tolerated norm loss of a codeword through the truncated gate.
pub const LEAKAGE_LIMIT: f64 = 1e-3;

/// Logical unitary a channel is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LogicalTarget {
    Identity,
    /// `diag(1, e^{2πi/2^m})`, the level-`m` diagonal gate (`m = 3` is `T`).
    Phase(u32),
}

impl LogicalTarget {
    pub fn for_gate(gate: SimulationGate) -> Self {
        gate.target_level().map_or(Self::Identity, Self::Phase)
    }

    pub fn unitary(self) -> Mat2 {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let phase = match self {
            Self::Identity => one,
            Self::Phase(m) => C64::from_polar(1.0, 2.0 * PI / 2f64.powi(m as i32)),
        };
        [[one, zero], [zero, phase]]
    }
}

/// 2×2 complex matrix, row-major.
pub type Mat2 = [[C64; 2]; 2];

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn trace(a: &Mat2) -> C64 {
    a[0][0] + a[1][1]
}

/// `[I, X, Y, Z]`.
pub fn paulis() -> [Mat2; 4] {
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    [[[l, o], [o, l]], [[o, l], [l, o]], [[o, -i], [i, o]], [[l, o], [o, -l]]]
}

/// Logical input states of the readout, in the order `|1⟩, |+⟩, |i⟩, |0⟩`.
pub const INPUT_LABELS: [&str; 4] = ["|1>", "|+>", "|i>", "|0>"];

/// Amplitudes of [`INPUT_LABELS`].
pub fn input_states() -> [[C64; 2]; 4] {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    [[o, l], [h, h], [h, C64::new(0.0, FRAC_1_SQRT_2)], [l, o]]
}

/// `α_jk` with `σ_j = Σ_k α_jk |ψ_k⟩⟨ψ_k|` for the inputs above.
const DUAL_FRAME: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 1.0],
    [-1.0, 2.0, 0.0, -1.0],
    [-1.0, 0.0, 2.0, -1.0],
    [-1.0, 0.0, 0.0, 1.0],
];

/// One logical-channel evaluation point.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelConfig {
    pub gate: RationalPolynomial,
    pub target: LogicalTarget,
    pub params: GkpParams,
    pub plan: TruncationPlan,
    /// Gaussian random displacement applied before the ideal readout, in the
    /// rectangular frame.
    pub smear: Smear,
    /// Odd-term cutoff of the Pauli readout sums.
    pub n_cut: usize,
}

impl ChannelConfig {
    /// A tabulated gate with the passive-Knill noise
    /// `Σ = tanh(Δ²/2)·diag(λ, 1/λ)` of the rectangular frame.
    pub fn for_gate(gate: SimulationGate, params: GkpParams, plan: TruncationPlan) -> Self {
        Self {
            gate: gate.polynomial(),
            target: LogicalTarget::for_gate(gate),
            smear: Smear::biased(params.delta, params.lam),
            params,
            plan,
            n_cut: DEFAULT_N_CUT,
        }
    }

    pub fn with_smear(mut self, smear: Smear) -> Self {
        self.smear = smear;
        self
    }

    pub fn without_smear(self) -> Self {
        self.with_smear(Smear::none())
    }
}

/// Response of the logical channel: `M_σ[i][j] = ⟨o_i|σ_{m,Σ}|o_j⟩` for the
/// gate outputs `o_j` of the orthonormal codewords, so that
/// `tr(σ E(ρ)) = Σ_ij M_σ[i][j] ρ[j][i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalResponse {
    pub matrices: [Mat2; 4],
    /// `1 − ‖o_j‖²` for both codewords.
    pub leakage: [f64; 2],
}

impl LogicalResponse {
    /// `tr(σ_μ E(ρ))` for a logical operator `ρ` (not necessarily a state).
    pub fn expectation_op(&self, mu: usize, rho: &Mat2) -> f64 {
        trace(&matmul(&self.matrices[mu], rho)).re
    }

    /// `tr(σ_μ E(ρ))` for the pure input `c_0|0⟩ + c_1|1⟩`.
    pub fn expectation(&self, input: [C64; 2], mu: usize) -> f64 {
        self.expectation_op(mu, &projector(input))
    }

    /// Raw readout `(tr, ⟨X⟩, ⟨Y⟩, ⟨Z⟩)` for a pure input.
    pub fn pauli_vector(&self, input: [C64; 2]) -> [f64; 4] {
        std::array::from_fn(|mu| self.expectation(input, mu))
    }

    /// Logical output `τ = ½ Σ_μ tr(σ_μ E(ρ)) σ_μ` normalised to unit trace.
    pub fn output_state(&self, input: [C64; 2]) -> Mat2 {
        let r = self.pauli_vector(input);
        let s = paulis();
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for mu in 0..4 {
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] += s[mu][i][j] * (0.5 * r[mu] / r[0]);
                }
            }
        }
        out
    }

    /// Readout table for the four standard inputs.
    pub fn readout(&self) -> LogicalReadout {
        LogicalReadout {
            pauli_expectations: input_states().map(|s| self.pauli_vector(s)),
        }
    }

    /// Average gate fidelity through the Pauli-basis formula
    /// `F = 1/3 + 1/12 Σ_j tr(U σ_j U† E(σ_j))`, with `E(σ_j)` expanded from
    /// the response directly.
    pub fn average_gate_fidelity_direct(&self, target: LogicalTarget) -> f64 {
        let u = target.unitary();
        let s = paulis();
        let mut acc = 0.0;
        for sj in &s {
            let rotated = matmul(&matmul(&u, sj), &dagger(&u));
            for (l, sl) in s.iter().enumerate() {
                acc += 0.5 * self.expectation_op(l, sj) * trace(&matmul(&rotated, sl)).re;
            }
        }
        1.0 / 3.0 + acc / 12.0
    }
}

fn projector(c: [C64; 2]) -> Mat2 {
    [[c[0] * c[0].conj(), c[0] * c[1].conj()], [c[1] * c[0].conj(), c[1] * c[1].conj()]]
}

/// `tr(σ_μ E(|ψ_k⟩⟨ψ_k|))` for the inputs `|1⟩, |+⟩, |i⟩, |0⟩` (rows) and
/// `σ = I, X, Y, Z` (columns).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogicalReadout {
    pub pauli_expectations: [[f64; 4]; 4],
}

impl LogicalReadout {
    /// Average gate fidelity from the four-state readout,
    /// `F = 1/3 + 1/12 Σ_{kℓ} tr(U V_k U† σ_ℓ)·tr(σ_ℓ E(|ψ_k⟩⟨ψ_k|))` with
    /// `V_k = Σ_j α_jk σ_j / 2`.
    pub fn average_gate_fidelity(&self, target: LogicalTarget) -> f64 {
        let u = target.unitary();
        let s = paulis();
        let mut acc = 0.0;
        for k in 0..4 {
            let mut v = [[C64::new(0.0, 0.0); 2]; 2];
            for (j, sj) in s.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        v[a][b] += sj[a][b] * (DUAL_FRAME[j][k] / 2.0);
                    }
                }
            }
            let rotated = matmul(&matmul(&u, &v), &dagger(&u));
            for (l, sl) in s.iter().enumerate() {
                acc += trace(&matmul(&rotated, sl)).re * self.pauli_expectations[k][l];
            }
        }
        1.0 / 3.0 + acc / 12.0
    }

    /// Largest `|tr(σ E(ψ))|/tr(E(ψ))` over inputs and Paulis.
    pub fn max_abs_expectation(&self) -> f64 {
        self.pauli_expectations
            .iter()
            .flat_map(|r| r[1..].iter().map(move |x| (x / r[0]).abs()))
            .fold(0.0, f64::max)
    }
}

type CodewordKey = (u64, u64, usize);
type ReadoutKey = (u64, u64, u64, usize, usize, usize);

/// Dense smeared `X, Y, Z` measurement operators at the readout dimension,
/// as stored in an [`OperatorCache`].
pub struct DenseReadout {
    ops: [Arc<FockOperator>; 3],
}

impl DenseReadout {
    /// Cache keys of the three operators for one readout configuration.
    pub fn cache_keys(config: &ChannelConfig) -> [CacheKey; 3] {
        let d = config.plan.d_out();
        let params = [
            ("lam", config.params.lam),
            ("s_q", config.smear.s_q),
            ("s_p", config.smear.s_p),
            ("n_cut", config.n_cut as f64),
            ("expand", config.plan.expand_factor as f64),
        ];
        ["pauli-x", "pauli-y", "pauli-z"].map(|kind| CacheKey::new(kind, &params, d, d))
    }

    /// Loads the operators from `cache`, building and storing missing ones.
    pub fn load_or_build(cache: &OperatorCache, config: &ChannelConfig) -> Result<Self> {
        let keys = Self::cache_keys(config);
        let build = |which: Pauli| {
            pauli_measurement_operator(
                which,
                config.params.lam,
                Some(config.smear),
                config.plan.d_out(),
                config.n_cut,
                config.plan.expand_factor,
            )
        };
        let x = cache.get_or_insert_with(&keys[0], || build(Pauli::X))?;
        let y = cache.get_or_insert_with(&keys[1], || build(Pauli::Y))?;
        let z = cache.get_or_insert_with(&keys[2], || build(Pauli::Z))?;
        Ok(Self { ops: [x, y, z] })
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    fn response(&self, outputs: [&FockVector; 2]) -> Result<[Mat2; 4]> {
        let mut m = [[[C64::new(0.0, 0.0); 2]; 2]; 4];
        for j in 0..2 {
            let images: Vec<FockVector> = self.ops.iter().map(|op| op.dot(outputs[j])).collect();
            for i in 0..2 {
                m[0][i][j] = inner(outputs[i], outputs[j]);
                for (mu, img) in images.iter().enumerate() {
                    m[mu + 1][i][j] = inner(outputs[i], img);
                }
            }
        }
        Ok(m)
    }
}

/// The readout used for one configuration.
#[derive(Clone)]
pub enum Readout {
    /// Spectral, matrix-free evaluation.
    MatrixFree(Arc<PauliReadout>),
    /// Dense operators from an operator cache.
    Dense(Arc<DenseReadout>),
}

impl Readout {
    pub fn dim(&self) -> usize {
        match self {
            Readout::MatrixFree(r) => r.dim(),
            Readout::Dense(r) => r.dim(),
        }
    }

    pub fn response(&self, outputs: [&FockVector; 2]) -> Result<[Mat2; 4]> {
        match self {
            Readout::MatrixFree(r) => r.response(outputs),
            Readout::Dense(r) => r.response(outputs),
        }
    }
}

/// Shared cache of orthonormal codewords and Pauli readouts.
///
/// Every entry is immutable once built; lookups take a read lock and
/// insertions a short write lock, so sweep workers can share one engine.
/// With an operator cache attached, readouts use dense operators loaded
/// from (or stored into) it; otherwise they are evaluated matrix-free.
#[derive(Default)]
pub struct ChannelEngine {
    codewords: RwLock<HashMap<CodewordKey, Arc<[FockVector; 2]>>>,
    readouts: RwLock<HashMap<ReadoutKey, Readout>>,
    operators: Option<Arc<OperatorCache>>,
}

fn get_or_build<K: std::hash::Hash + Eq + Copy, V: Clone>(
    map: &RwLock<HashMap<K, V>>,
    key: K,
    build: impl FnOnce() -> Result<V>,
) -> Result<V> {
    if let Some(v) = map.read().get(&key) {
        return Ok(v.clone());
    }
    let built = build()?;
    Ok(map.write().entry(key).or_insert(built).clone())
}

impl ChannelEngine {
    pub fn new() -> Self {
        Self::default()
    }

    /// An engine whose readouts go through `cache`.
    pub fn with_operator_cache(cache: Arc<OperatorCache>) -> Self {
        Self {
            operators: Some(cache),
            ..Self::default()
        }
    }

    /// Process-wide engine (matrix-free readouts).
    pub fn global() -> &'static ChannelEngine {
        static ENGINE: OnceLock<ChannelEngine> = OnceLock::new();
        ENGINE.get_or_init(ChannelEngine::new)
    }

    /// Orthonormalised codewords `|0̄⟩, |1̄⟩` at `d_init`.
    pub fn codewords(&self, params: &GkpParams, d: usize) -> Result<Arc<[FockVector; 2]>> {
        get_or_build(&self.codewords, (params.delta.to_bits(), params.lam.to_bits(), d), || {
            let pair = codeword_pair(params, d, None)?;
            Ok(Arc::new([pair.e0, pair.e1]))
        })
    }

    /// Smeared Pauli readout at the gate-output dimension.
    pub fn readout(&self, config: &ChannelConfig) -> Result<Readout> {
        let d = config.plan.d_out();
        let key = (
            config.params.lam.to_bits(),
            config.smear.s_q.to_bits(),
            config.smear.s_p.to_bits(),
            d,
            config.n_cut,
            config.plan.expand_factor,
        );
        get_or_build(&self.readouts, key, || match &self.operators {
            Some(cache) => Ok(Readout::Dense(Arc::new(DenseReadout::load_or_build(cache, config)?))),
            None => Ok(Readout::MatrixFree(Arc::new(PauliReadout::new(
                config.params.lam,
                config.smear,
                d,
                config.n_cut,
                config.plan.expand_factor,
            )?))),
        })
    }

    pub fn cached_entries(&self) -> (usize, usize) {
        (self.codewords.read().len(), self.readouts.read().len())
    }

    /// Runs both codewords through the gate and the readout.
    pub fn response(&self, config: &ChannelConfig) -> Result<LogicalResponse> {
        let words = self.codewords(&config.params, config.plan.d_init)?;
        let gate = PhaseGateAction::new(&config.gate, config.params.lam, &config.plan)?;
        let readout = self.readout(config)?;
        if gate.d_out() != readout.dim() {
            return Err(Error::DimensionMismatch(format!(
                "gate output dimension {} differs from readout dimension {}",
                gate.d_out(),
                readout.dim()
            )));
        }
        let o0 = gate.apply(&words[0])?;
        let o1 = gate.apply(&words[1])?;
        let leakage = [1.0 - norm_sqr(&o0), 1.0 - norm_sqr(&o1)];
        let worst = leakage[0].max(leakage[1]);
        if !(worst <= LEAKAGE_LIMIT) {
            return Err(Error::TruncationLeakage {
                leakage: worst,
                limit: LEAKAGE_LIMIT,
            });
        }
        let m = readout.response([&o0, &o1])?;
        for block in &m {
            for row in block {
                crate::fock::ensure_finite(row.iter(), "logical response")?;
            }
        }
        Ok(LogicalResponse { matrices: m, leakage })
    }
}

/// `tr(σ E(|ψ⟩⟨ψ|))` for one input state and Pauli `σ ∈ {I, X, Y, Z}`
/// (index 0..4).
pub fn logical_expectation(config: &ChannelConfig, input: [C64; 2], pauli: usize) -> Result<f64> {
    if pauli > 3 {
        return Err(Error::InvalidArgument(format!("Pauli index must be 0..=3, got {pauli}")));
    }
    let norm = input[0].norm_sqr() + input[1].norm_sqr();
    if !((norm - 1.0).abs() < 1e-9) {
        return Err(Error::InvalidArgument(format!("input state must be normalised, ‖ψ‖² = {norm}")));
    }
    Ok(ChannelEngine::global().response(config)?.expectation(input, pauli))
}

/// Average gate fidelity of the logical channel against its target.
pub fn average_gate_fidelity(config: &ChannelConfig) -> Result<f64> {
    Ok(ChannelEngine::global()
        .response(config)?
        .readout()
        .average_gate_fidelity(config.target))
}

/// `⟨T|E(|+⟩⟨+|)|T⟩ = 1/2 + (⟨X⟩ + ⟨Y⟩)/(2√2)`, with the readout normalised
/// to the output trace.
pub fn t_state_fidelity(config: &ChannelConfig) -> Result<f64> {
    Ok(t_state_fidelity_from(&ChannelEngine::global().response(config)?))
}

/// [`t_state_fidelity`] for a precomputed response.
pub fn t_state_fidelity_from(response: &LogicalResponse) -> f64 {
    let r = response.pauli_vector(input_states()[1]);
    0.5 + (r[1] + r[2]) / (r[0] * 2.0 * std::f64::consts::SQRT_2)
}

/// [`t_state_fidelity`] via the explicit 2×2 output state.
pub fn t_state_fidelity_reconstructed(response: &LogicalResponse) -> f64 {
    let tau = response.output_state(input_states()[1]);
    let t = [C64::new(FRAC_1_SQRT_2, 0.0), C64::from_polar(FRAC_1_SQRT_2, PI / 4.0)];
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += t[i].conj() * tau[i][j] * t[j];
        }
    }
    acc.re
}

/// Smallest eigenvalue of a Hermitian 2×2 matrix.
pub fn min_eigenvalue(a: &Mat2) -> f64 {
    let tr = 0.5 * (a[0][0].re + a[1][1].re);
    let diff = 0.5 * (a[0][0].re - a[1][1].re);
    tr - (diff * diff + a[0][1].norm_sqr()).sqrt()
}
