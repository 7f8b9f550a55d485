use std::sync::Arc;

use ndarray::{s, Array1, Array2};

use super::spectral::HermiteBasis;
use super::{expm, quadratures, FockOperator, FockVector, TruncationPlan, C64};
use crate::error::{Error, Result};
use crate::polyalg::RationalPolynomial;

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Which quadrature a diagonal function is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quadrature {
    Q,
    P,
}

/// `i^n` for the momentum frame `p = Φ q Φ†`.
fn i_pow(n: usize) -> C64 {
    match n % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// `f(Q)` truncated to `rows × cols`, where `Q` is `q` or `p` truncated at
/// the basis dimension and `weights[k] = f(x_k)`.
pub(crate) fn quadrature_function(
    basis: &HermiteBasis,
    weights: &[C64],
    which: Quadrature,
    rows: usize,
    cols: usize,
) -> Result<FockOperator> {
    if rows > basis.rows() || cols > basis.rows() || weights.len() != basis.dim {
        return Err(Error::DimensionMismatch(format!(
            "basis keeps {} rows of dimension {}, asked for {rows}×{cols} with {} weights",
            basis.rows(),
            basis.dim,
            weights.len()
        )));
    }
    let v = &basis.vectors;
    // (V_rows · diag(w)) · V_colsᵀ, done separately for real and imaginary
    // parts of the weights to stay in real arithmetic.
    let vr = v.slice(s![..rows, ..]);
    let vc = v.slice(s![..cols, ..]);
    let wr = Array1::from_iter(weights.iter().map(|w| w.re));
    let wi = Array1::from_iter(weights.iter().map(|w| w.im));
    let left_r = &vr * &wr;
    let left_i = &vr * &wi;
    let re = left_r.dot(&vc.t());
    let im = left_i.dot(&vc.t());
    let mut out = Array2::<C64>::zeros((rows, cols));
    for ((o, &a), &b) in out.iter_mut().zip(re.iter()).zip(im.iter()) {
        *o = C64::new(a, b);
    }
    if which == Quadrature::P {
        for ((r, c), z) in out.indexed_iter_mut() {
            *z *= i_pow(r) * i_pow(c).conj();
        }
    }
    Ok(out)
}

/// `exp(i·g(Q))` for a real phase function, exponentiated at `d_temp` and
/// truncated to `rows × cols`.
pub fn quadrature_phase(
    phase: impl Fn(f64) -> f64,
    which: Quadrature,
    d_temp: usize,
    rows: usize,
    cols: usize,
) -> Result<FockOperator> {
    let basis = HermiteBasis::shared(d_temp, rows.max(cols))?;
    let w: Vec<C64> = basis.nodes.iter().map(|&x| C64::from_polar(1.0, phase(x))).collect();
    quadrature_function(&basis, &w, which, rows, cols)
}

/// `W(v) = exp[i√(2π)(v_p q − v_q p)]` at dimension `d`, exponentiated at
/// `plan.d_temp(d)` with the Padé approximant.
pub fn displacement(v: (f64, f64), d: usize, plan: &TruncationPlan) -> Result<FockOperator> {
    if !(v.0.is_finite() && v.1.is_finite()) {
        return Err(Error::InvalidArgument("displacement must be finite".into()));
    }
    let d_temp = plan.d_temp(d);
    expm::expm_truncated(
        |dt| {
            let (q, p) = quadratures(dt)?;
            Ok((q * v.1 - p * v.0) * C64::new(0.0, SQRT_2PI))
        },
        d_temp,
        d,
        d,
    )
}

fn gate_phase(poly: &RationalPolynomial, lam: f64) -> impl Fn(f64) -> f64 {
    let coeffs = poly.to_f64_coefficients();
    let scale = 1.0 / (lam * std::f64::consts::PI).sqrt();
    move |x: f64| {
        let y = x * scale;
        let p = coeffs.iter().rev().fold(0.0, |acc, a| acc * y + a);
        std::f64::consts::TAU * p
    }
}

fn check_lam(lam: f64) -> Result<()> {
    if lam.is_finite() && lam > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("λ must be > 0, got {lam}")))
    }
}

/// Rectangular-code polynomial phase gate `exp(2πi P(q/√(λπ)))`, formed at
/// `d_temp = expand·d_init` and truncated to `d_out × d_init`.
pub fn poly_phase_gate(
    poly: &RationalPolynomial,
    lam: f64,
    plan: &TruncationPlan,
) -> Result<FockOperator> {
    check_lam(lam)?;
    let d_temp = plan.d_temp(plan.d_init);
    quadrature_phase(gate_phase(poly, lam), Quadrature::Q, d_temp, plan.d_out().min(d_temp), plan.d_init)
}

/// Matrix-free form of [`poly_phase_gate`]: maps `d_init` vectors to
/// `d_out` vectors in `O(d_temp·(d_init + d_out))`.
#[derive(Clone)]
pub struct PhaseGateAction {
    basis: Arc<HermiteBasis>,
    phases: Vec<C64>,
    d_init: usize,
    d_out: usize,
}

impl PhaseGateAction {
    pub fn new(poly: &RationalPolynomial, lam: f64, plan: &TruncationPlan) -> Result<Self> {
        check_lam(lam)?;
        let d_temp = plan.d_temp(plan.d_init);
        let d_out = plan.d_out().min(d_temp);
        let basis = HermiteBasis::shared(d_temp, d_out)?;
        let f = gate_phase(poly, lam);
        let phases = basis.nodes.iter().map(|&x| C64::from_polar(1.0, f(x))).collect();
        Ok(Self {
            basis,
            phases,
            d_init: plan.d_init,
            d_out,
        })
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn apply(&self, psi: &FockVector) -> Result<FockVector> {
        if psi.len() != self.d_init {
            return Err(Error::DimensionMismatch(format!(
                "gate expects a {}-dimensional input, got {}",
                self.d_init,
                psi.len()
            )));
        }
        let v = &self.basis.vectors;
        let vin = v.slice(s![..self.d_init, ..]);
        let re = Array1::from_iter(psi.iter().map(|z| z.re));
        let im = Array1::from_iter(psi.iter().map(|z| z.im));
        let ur = vin.t().dot(&re);
        let ui = vin.t().dot(&im);
        let mut wr = Array1::<f64>::zeros(ur.len());
        let mut wi = Array1::<f64>::zeros(ur.len());
        for k in 0..ur.len() {
            let z = C64::new(ur[k], ui[k]) * self.phases[k];
            wr[k] = z.re;
            wi[k] = z.im;
        }
        let vout = v.slice(s![..self.d_out, ..]);
        let or = vout.dot(&wr);
        let oi = vout.dot(&wi);
        Ok(Array1::from_iter(or.iter().zip(oi.iter()).map(|(&a, &b)| C64::new(a, b))))
    }
}

/// Convenience wrapper around [`PhaseGateAction`].
pub fn apply_poly_phase(
    poly: &RationalPolynomial,
    lam: f64,
    plan: &TruncationPlan,
    psi: &FockVector,
) -> Result<FockVector> {
    PhaseGateAction::new(poly, lam, plan)?.apply(psi)
}
