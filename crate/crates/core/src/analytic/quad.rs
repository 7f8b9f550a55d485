//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_83,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Largest number of subintervals kept by [`integrate`].
pub const MAX_SUBINTERVALS: usize = 4000;

const INITIAL_PIECES: usize = 16;

struct Piece {
    lo: f64,
    hi: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// `∫_a^b f` to within `max(abs_tol, rel_tol·|I|)`, bisecting the
/// subinterval with the largest error estimate first.  Tolerances below
/// what double precision can resolve are met once the error estimate stops
/// shrinking at round-off level.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    // Start from several pieces so that a narrow peak is not missed by
    // every node of a single coarse rule.
    let mut heap = std::collections::BinaryHeap::new();
    let (mut total, mut err_total, mut abs_sum) = (0.0, 0.0, 0.0);
    let width = (b - a) / INITIAL_PIECES as f64;
    for i in 0..INITIAL_PIECES {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PIECES { b } else { lo + width };
        let (val, err) = gk15(&mut f, lo, hi);
        total += val;
        err_total += err;
        abs_sum += val.abs();
        heap.push(Piece { lo, hi, val, err });
    }
    loop {
        if !total.is_finite() {
            return Err(Error::Numeric("integrand produced a non-finite value".into()));
        }
        let tol = abs_tol.max(rel_tol * total.abs());
        let roundoff = 50.0 * f64::EPSILON * abs_sum.max(total.abs());
        if err_total <= tol.max(roundoff) {
            return Ok(total);
        }
        if heap.len() >= MAX_SUBINTERVALS {
            return Err(Error::Accuracy(format!(
                "quadrature error estimate {err_total:.3e} above tolerance {tol:.3e} after {MAX_SUBINTERVALS} subintervals"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Interval cannot be split further; accept what we have.
            return Ok(total);
        }
        let (v1, e1) = gk15(&mut f, worst.lo, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.hi);
        total += v1 + v2 - worst.val;
        err_total += e1 + e2 - worst.err;
        abs_sum += v1.abs() + v2.abs() - worst.val.abs();
        heap.push(Piece { lo: worst.lo, hi: mid, val: v1, err: e1 });
        heap.push(Piece { lo: mid, hi: worst.hi, val: v2, err: e2 });
    }
}

/// Iterated 2-D integral over a rectangle, inner variable `y`.
pub fn integrate_2d(
    f: impl Fn(f64, f64) -> f64,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    let mut failure = None;
    let outer = integrate(
        |x| match integrate(|y| f(x, y), y0, y1, abs_tol * 1e-2, rel_tol * 1e-2) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        x0,
        x1,
        abs_tol,
        rel_tol,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_gaussians() {
        let v = integrate(|x| x.powi(6) - 2.0 * x, -1.0, 2.0, 1e-14, 1e-14).unwrap();
        assert!((v - (129.0 / 7.0 - 3.0)).abs() < 1e-12);
        let g = integrate(|x| (-x * x).exp(), -12.0, 12.0, 1e-14, 1e-14).unwrap();
        assert!((g - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        let peaked = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((peaked - 2.0 * 100.0 * (100.0f64).atan()).abs() < 1e-8);
    }

    #[test]
    fn two_dimensional() {
        let v = integrate_2d(|x, y| x * y * y, (0.0, 1.0), (0.0, 3.0), 1e-12, 1e-12).unwrap();
        assert!((v - 4.5).abs() < 1e-12);
    }
}
