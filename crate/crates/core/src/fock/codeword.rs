use std::f64::consts::PI;

use ndarray::Array1;


use super::{inner, norm_sqr, FockVector, GkpParams, C64};
use crate::error::{Error, Result};

/// Largest total coherent-term weight (relative) that may be zeroed for
/// overflow before codeword synthesis fails.
pub const MAX_ZEROED_WEIGHT: f64 = 1e-6;

/// Terms whose lattice weight is below this (relative to the largest) are
/// skipped outright: their amplitudes are far below double precision.
const NEGLIGIBLE_LOG_WEIGHT: f64 = -60.0;

/// Unnormalised approximate codeword plus overflow diagnostics.
#[derive(Clone, Debug)]
pub struct Codeword {
    pub vector: FockVector,
    /// Coherent terms whose Fock amplitudes were non-finite and were zeroed.
    pub zeroed_terms: usize,
    /// Their lattice weight relative to the total weight.
    pub zeroed_weight: f64,
    /// Lattice cutoff actually used.
    pub lattice_cut: usize,
}

/// `|j|, |n| ≤ ceil(6·√(max(λ, 1/λ)/κ))`, `κ = 1 − e^{−2Δ²}`, so every
/// dropped lattice weight is below `e^{−9π}`.
pub fn default_lattice_cut(params: &GkpParams) -> usize {
    let stretch = params.lam.max(1.0 / params.lam);
    (6.0 * (stretch / params.kappa()).sqrt()).ceil() as usize
}

/// Approximate rectangular codeword `e^{−Δ² n̂}|bit⟩` in the Fock basis at
/// dimension `d`, as a weighted sum of coherent states.
///
/// The ideal codewords are lattice sums of displaced vacua,
/// `|0⟩ = Σ (−1)^{mn} W(m√(2λ), n/√(2λ))|vac⟩` and
/// `|1⟩ = Σ i^{2mn−n} W((2m+1)√(λ/2), n/√(2λ))|vac⟩`.  The envelope maps
/// `W(v)|vac⟩` to `e^{−π|v|²κ/2} W(e^{−Δ²}v)|vac⟩`; with the position index
/// `j` (`2m` or `2m+1`) the weight is
/// `c_{j,n} = exp(−π(j²λ + n²/λ)κ/4)`.  Amplitudes are computed in the log
/// domain so large displacements never overflow.
pub fn gkp_codeword(bit: u8, params: &GkpParams, d: usize, lattice_cut: Option<usize>) -> Result<Codeword> {
    if bit > 1 {
        return Err(Error::InvalidArgument(format!("bit must be 0 or 1, got {bit}")));
    }
    if d < 16 {
        return Err(Error::InvalidArgument(format!("dimension must be ≥ 16, got {d}")));
    }
    let cut = lattice_cut.unwrap_or_else(|| default_lattice_cut(params)) as i64;
    let (lam, kappa) = (params.lam, params.kappa());
    let shrink = (-params.delta * params.delta).exp();
    let half_ln_fact: Vec<f64> = {
        let mut v = vec![0.0f64; d];
        for k in 1..d {
            v[k] = v[k - 1] + 0.5 * (k as f64).ln();
        }
        v
    };
    let mut acc = vec![C64::new(0.0, 0.0); d];
    let mut total_weight = 0.0;
    let mut zeroed_weight = 0.0;
    let mut zeroed_terms = 0usize;
    let mut term = vec![C64::new(0.0, 0.0); d];
    for j in -cut..=cut {
        if (j - bit as i64).rem_euclid(2) != 0 {
            continue;
        }
        let m = (j - bit as i64).div_euclid(2);
        for n in -cut..=cut {
            let log_c = -PI * ((j * j) as f64 * lam + (n * n) as f64 / lam) * kappa / 4.0;
            let c = log_c.exp();
            total_weight += c;
            if log_c < NEGLIGIBLE_LOG_WEIGHT {
                continue;
            }
            // Lattice phase: (−1)^{mn} for |0⟩, i^{2mn−n} for |1⟩.
            let quarter_turns = if bit == 0 {
                2 * (m * n).rem_euclid(2)
            } else {
                (2 * m * n - n).rem_euclid(4)
            };
            let phase = quarter_turns as f64 * PI / 2.0;
            let v_q = j as f64 * (lam / 2.0).sqrt() * shrink;
            let v_p = n as f64 / (2.0 * lam).sqrt() * shrink;
            let alpha = C64::new(v_q, v_p) * PI.sqrt();
            let r2 = alpha.norm_sqr();
            let mut finite = true;
            if r2 == 0.0 {
                term.iter_mut().for_each(|t| *t = C64::new(0.0, 0.0));
                term[0] = C64::from_polar(c, phase);
            } else {
                let ln_r = r2.sqrt().ln();
                let arg = alpha.arg();
                let base = log_c - r2 / 2.0;
                for k in 0..d {
                    let la = base + k as f64 * ln_r - half_ln_fact[k];
                    let z = C64::from_polar(la.exp(), phase + k as f64 * arg);
                    if !(z.re.is_finite() && z.im.is_finite()) {
                        finite = false;
                        break;
                    }
                    term[k] = z;
                }
            }
            if finite {
                acc.iter_mut().zip(&term).for_each(|(a, t)| *a += t);
            } else {
                zeroed_terms += 1;
                zeroed_weight += c;
            }
        }
    }
    let rel = if total_weight > 0.0 { zeroed_weight / total_weight } else { 0.0 };
    if rel > MAX_ZEROED_WEIGHT {
        return Err(Error::Numeric(format!(
            "{zeroed_terms} coherent terms overflowed, weight {rel:.3e} > {MAX_ZEROED_WEIGHT:e}"
        )));
    }
    Ok(Codeword {
        vector: Array1::from(acc),
        zeroed_terms,
        zeroed_weight: rel,
        lattice_cut: cut as usize,
    })
}

/// Symmetric (Löwdin-type) orthonormalisation of a nearly orthogonal pair.
///
/// With `θ = arg⟨ψ₀|ψ₁⟩` the normalised states `|±⟩ ∝ |ψ₀⟩ ± e^{−iθ}|ψ₁⟩`
/// are orthogonal, and `e₀ = (|+⟩+|−⟩)/√2`, `e₁ = e^{iθ}(|+⟩−|−⟩)/√2`.
pub fn orthonormalize(psi0: &FockVector, psi1: &FockVector) -> Result<(FockVector, FockVector)> {
    if psi0.len() != psi1.len() {
        return Err(Error::DimensionMismatch(format!(
            "codewords have lengths {} and {}",
            psi0.len(),
            psi1.len()
        )));
    }
    let (n0, n1) = (norm_sqr(psi0).sqrt(), norm_sqr(psi1).sqrt());
    if !(n0 > 0.0 && n1 > 0.0) {
        return Err(Error::DegeneratePair("zero vector".into()));
    }
    let a = psi0 / C64::new(n0, 0.0);
    let b = psi1 / C64::new(n1, 0.0);
    let ov = inner(&a, &b);
    if ov.norm() > 1.0 - 1e-12 {
        return Err(Error::DegeneratePair(format!("|overlap| = {}", ov.norm())));
    }
    let theta = ov.arg();
    let rot = C64::from_polar(1.0, -theta);
    let normed = |v: FockVector| {
        let n = norm_sqr(&v).sqrt();
        v / C64::new(n, 0.0)
    };
    let plus = normed(&a + &(&b * rot));
    let minus = normed(&a - &(&b * rot));
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let e0 = (&plus + &minus) * s;
    let e1 = (&plus - &minus) * (s * C64::from_polar(1.0, theta));
    Ok((e0, e1))
}

/// Raw codewords, their overlap, and the orthonormalised pair.
#[derive(Clone, Debug)]
pub struct CodewordPair {
    pub raw: [Codeword; 2],
    /// `|⟨0̄|1̄⟩|` of the normalised raw codewords.
    pub raw_overlap: f64,
    pub e0: FockVector,
    pub e1: FockVector,
}


/// Builds and orthonormalises both codewords at dimension `d`.
pub fn codeword_pair(params: &GkpParams, d: usize, lattice_cut: Option<usize>) -> Result<CodewordPair> {
    let c0 = gkp_codeword(0, params, d, lattice_cut)?;
    let c1 = gkp_codeword(1, params, d, lattice_cut)?;
    let raw_overlap = inner(&c0.vector, &c1.vector).norm()
        / (norm_sqr(&c0.vector) * norm_sqr(&c1.vector)).sqrt();
    let (e0, e1) = orthonormalize(&c0.vector, &c1.vector)?;
    Ok(CodewordPair {
        raw: [c0, c1],
        raw_overlap,
        e0,
        e1,
    })
}
