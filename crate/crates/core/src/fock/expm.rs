//! Dense complex matrix exponential: scaling and squaring with the
//! degree-13 Padé approximant, solved by LU with partial pivoting.

use ndarray::{Array2, Zip};

use super::{FockOperator, C64};
use crate::error::{Error, Result};

const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
/// Largest 1-norm for which the degree-13 approximant is accurate to
/// double precision without scaling.
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &FockOperator) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn add_scaled(acc: &mut FockOperator, a: &FockOperator, s: f64) {
    Zip::from(acc).and(a).for_each(|x, &y| *x += y * s);
}

/// `exp(A)` for square `A`.
pub fn expm(a: &FockOperator) -> Result<FockOperator> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expm needs a square matrix, got {}×{}",
            a.nrows(),
            a.ncols()
        )));
    }
    super::ensure_finite(a.iter(), "expm input")?;
    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = a * C64::new(0.5f64.powi(s), 0.0);
    let ident = Array2::<C64>::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let b = &B13;

    let mut inner_u = &a6 * b[13];
    add_scaled(&mut inner_u, &a4, b[11]);
    add_scaled(&mut inner_u, &a2, b[9]);
    let mut u = a6.dot(&inner_u);
    add_scaled(&mut u, &a6, b[7]);
    add_scaled(&mut u, &a4, b[5]);
    add_scaled(&mut u, &a2, b[3]);
    add_scaled(&mut u, &ident, b[1]);
    let u = a.dot(&u);

    let mut inner_v = &a6 * b[12];
    add_scaled(&mut inner_v, &a4, b[10]);
    add_scaled(&mut inner_v, &a2, b[8]);
    let mut v = a6.dot(&inner_v);
    add_scaled(&mut v, &a6, b[6]);
    add_scaled(&mut v, &a4, b[4]);
    add_scaled(&mut v, &a2, b[2]);
    add_scaled(&mut v, &ident, b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = lu_solve(q, p)?;
    for _ in 0..s {
        r = r.dot(&r);
    }
    super::ensure_finite(r.iter(), "expm result")?;
    Ok(r)
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
pub fn lu_solve(mut a: FockOperator, mut b: FockOperator) -> Result<FockOperator> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch("lu_solve shape".into()));
    }
    let m = b.ncols();
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|i| (i, a[(i, k)].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pmax == 0.0 || !pmax.is_finite() {
            return Err(Error::Numeric(format!("singular matrix in lu_solve at column {k}")));
        }
        if piv != k {
            for j in 0..n {
                a.swap((k, j), (piv, j));
            }
            for j in 0..m {
                b.swap((k, j), (piv, j));
            }
        }
        let inv = C64::new(1.0, 0.0) / a[(k, k)];
        let pivot_row: Vec<C64> = a.row(k).iter().skip(k + 1).copied().collect();
        let pivot_b: Vec<C64> = b.row(k).to_vec();
        for i in k + 1..n {
            let f = a[(i, k)] * inv;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            a[(i, k)] = f;
            let mut row = a.row_mut(i);
            for (x, &y) in row.iter_mut().skip(k + 1).zip(&pivot_row) {
                *x -= f * y;
            }
            let mut brow = b.row_mut(i);
            for (x, &y) in brow.iter_mut().zip(&pivot_b) {
                *x -= f * y;
            }
        }
    }
    // Back substitution.
    for k in (0..n).rev() {
        let inv = C64::new(1.0, 0.0) / a[(k, k)];
        let row_k: Vec<C64> = b.row(k).iter().map(|&z| z * inv).collect();
        b.row_mut(k).iter_mut().zip(&row_k).for_each(|(x, &y)| *x = y);
        for i in 0..k {
            let f = a[(i, k)];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            let mut brow = b.row_mut(i);
            for (x, &y) in brow.iter_mut().zip(&row_k) {
                *x -= f * y;
            }
        }
    }
    Ok(b)
}

/// `exp(M)` where `M` (dimension `d`) is embedded at the temporary
/// dimension `d_temp` by `generator_at`, then truncated to `rows × cols`.
pub fn expm_truncated(
    generator_at: impl Fn(usize) -> Result<FockOperator>,
    d_temp: usize,
    rows: usize,
    cols: usize,
) -> Result<FockOperator> {
    if rows > d_temp || cols > d_temp {
        return Err(Error::DimensionMismatch(format!(
            "cannot truncate {d_temp}-dimensional exponential to {rows}×{cols}"
        )));
    }
    let g = generator_at(d_temp)?;
    let e = expm(&g)?;
    Ok(e.slice(ndarray::s![..rows, ..cols]).to_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_abs(a: &FockOperator) -> f64 {
        a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_gives_identity() {
        let e = expm(&FockOperator::zeros((5, 5))).unwrap();
        assert_abs_diff_eq!(max_abs(&(e - FockOperator::eye(5))), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn diagonal_generator() {
        let d = 20;
        let phi = 0.37;
        let m = super::super::number_operator(d) * C64::new(0.0, phi);
        let e = expm(&m).unwrap();
        for n in 0..d {
            let z = C64::from_polar(1.0, phi * n as f64);
            assert_abs_diff_eq!((e[(n, n)] - z).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn inverse_of_random_hermitian_exponent() {
        let d = 64;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut h = FockOperator::zeros((d, d));
        for i in 0..d {
            for j in 0..=i {
                let z = C64::new(rng.random_range(-1.0..1.0), if i == j { 0.0 } else { rng.random_range(-1.0..1.0) });
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        let m = &h * C64::new(0.0, 1.0);
        let e = expm(&m).unwrap();
        let einv = expm(&(-&m)).unwrap();
        let prod = e.dot(&einv);
        assert!(max_abs(&(prod - FockOperator::eye(d))) < 1e-10);
    }

    #[test]
    fn matches_taylor_for_small_nilpotent() {
        // Strictly upper-triangular generator: the series terminates.
        let mut n = FockOperator::zeros((3, 3));
        n[(0, 1)] = C64::new(2.0, 0.0);
        n[(1, 2)] = C64::new(3.0, 0.0);
        let e = expm(&n).unwrap();
        assert_abs_diff_eq!(e[(0, 2)].re, 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(e[(0, 1)].re, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn rejects_non_square_and_non_finite() {
        assert!(expm(&FockOperator::zeros((2, 3))).is_err());
        let mut m = FockOperator::zeros((2, 2));
        m[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert!(expm(&m).is_err());
    }
}
