use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{factorial, frac_mod1, Rational, RationalPolynomial};
use crate::error::{Error, Result};

/// Integers `k` with `|k| ≤ VERIFY_RANGE` are checked by [`verify_gate`].
pub const VERIFY_RANGE: i64 = 50;

/// The integer-valued basis polynomial `L_n`, a product of `n` consecutive
/// shifted linear factors divided by `n!`:
///
/// * odd `n`:  `x·∏_{i=1}^{(n-1)/2} (x² − i²) / n!`
/// * even `n`: `(x + n/2)·x·∏_{i=1}^{n/2-1} (x² − i²) / n!`
pub fn basis_polynomial(n: i64) -> Result<RationalPolynomial> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!(
            "basis index must be ≥ 1, got {n}"
        )));
    }
    Ok(basis_unchecked(n as usize))
}

pub(crate) fn basis_unchecked(n: usize) -> RationalPolynomial {
    // Shifts k such that the factors are (x + k).
    let (lo, hi) = if n % 2 == 1 {
        let h = (n as i64 - 1) / 2;
        (-h, h)
    } else {
        let h = n as i64 / 2;
        (-(h - 1), h)
    };
    // Integer coefficients of ∏ (x + k), lowest degree first.
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for k in lo..=hi {
        let mut next = vec![BigInt::zero(); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] += a * BigInt::from(k);
        }
        c = next;
    }
    let nf = factorial(n);
    RationalPolynomial::new(
        c.into_iter()
            .map(|a| Rational::new(a, nf.clone()))
            .collect(),
    )
}

/// Coefficients of `P` in the `L_n` basis (index 0 is the constant term),
/// obtained by exact top-down elimination.
pub(crate) fn basis_expansion(p: &RationalPolynomial) -> Vec<Rational> {
    let mut rest = p.clone();
    let mut out = vec![Rational::zero(); p.degree() + 1];
    for j in (1..=p.degree()).rev() {
        let a = rest.coeff(j);
        if a.is_zero() {
            continue;
        }
        let c = a * Rational::from_integer(factorial(j));
        rest = &rest - &basis_unchecked(j).scale(&c);
        out[j] = c;
    }
    out[0] = rest.coeff(0);
    out
}

/// True iff `P(k) ∈ ℤ` for every integer `k`, decided exactly: `P` is
/// integer-valued precisely when all its `L_n`-basis coefficients are
/// integers.
pub fn is_integer_valued(p: &RationalPolynomial) -> bool {
    basis_expansion(p).iter().all(|c| c.is_integer())
}

/// `x^{2^{m−1}} / 2^m`, which implements `Λ_m`.
pub fn starting_representation(m: i64) -> Result<RationalPolynomial> {
    if m < 1 {
        return Err(Error::InvalidArgument(format!("level must be ≥ 1, got {m}")));
    }
    if m > 24 {
        return Err(Error::InvalidArgument(format!(
            "level {m} would need degree 2^{} — refusing",
            m - 1
        )));
    }
    let deg = 1usize << (m - 1);
    let two_m = BigInt::one() << (m as usize);
    Ok(RationalPolynomial::monomial(
        Rational::new(BigInt::one(), two_m),
        deg,
    ))
}

/// Squares a `Λ_m` representation into a `Λ_{m+1}` one: `2^{m−1}·F(x)²`.
pub fn lift_representation(f: &RationalPolynomial, m: i64) -> Result<RationalPolynomial> {
    if m < 1 || !verify_gate(f, m) {
        return Err(Error::PreconditionViolation(format!(
            "{f} does not implement Λ_{m}"
        )));
    }
    let scale = Rational::from_integer(BigInt::one() << (m as usize - 1));
    Ok((f * f).scale(&scale))
}

/// True iff `P(k) mod 1` is `0` on even `k` and `2^{-m}` on odd `k` for all
/// `|k| ≤ VERIFY_RANGE`.  Returns false for `m < 1`.
pub fn verify_gate(p: &RationalPolynomial, m: i64) -> bool {
    if m < 1 || m > 62 {
        return false;
    }
    let target = frac_mod1(&Rational::new(BigInt::one(), BigInt::one() << (m as usize)));
    (-VERIFY_RANGE..=VERIFY_RANGE).all(|k| {
        let r = frac_mod1(&p.eval_int(k));
        if k % 2 == 0 {
            r.is_zero()
        } else {
            r == target
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(pairs: &[(i64, i64)]) -> RationalPolynomial {
        RationalPolynomial::from_fractions(pairs)
    }

    #[test]
    fn low_order_basis_members() {
        assert_eq!(basis_polynomial(1).unwrap(), poly(&[(0, 1), (1, 1)]));
        assert_eq!(basis_polynomial(2).unwrap(), poly(&[(0, 1), (1, 2), (1, 2)]));
        assert_eq!(
            basis_polynomial(3).unwrap(),
            poly(&[(0, 1), (-1, 6), (0, 1), (1, 6)])
        );
        assert!(basis_polynomial(0).is_err());
        assert!(basis_polynomial(-3).is_err());
    }

    #[test]
    fn leading_coefficient_is_inverse_factorial() {
        for n in 1..=20usize {
            let l = basis_unchecked(n);
            assert_eq!(l.degree(), n);
            assert_eq!(
                l.leading_coefficient(),
                Rational::new(BigInt::one(), factorial(n))
            );
        }
    }

    #[test]
    fn odd_members_are_odd_functions() {
        for n in (1..=15usize).step_by(2) {
            let l = basis_unchecked(n);
            assert_eq!(l.reflect(), -&l);
        }
    }

    #[test]
    fn integer_valued_examples() {
        assert!(is_integer_valued(&basis_unchecked(6)));
        assert!(!is_integer_valued(&poly(&[(0, 1), (0, 1), (1, 4)])));
        let combo = &basis_unchecked(4).scale(&Rational::from_integer(5.into()))
            - &basis_unchecked(1).scale(&Rational::from_integer(2.into()));
        assert!(is_integer_valued(&combo));
        // A non-integer constant alone breaks integrality.
        assert!(!is_integer_valued(&poly(&[(1, 3)])));
    }

    #[test]
    fn starting_representations() {
        assert_eq!(starting_representation(1).unwrap(), poly(&[(0, 1), (1, 2)]));
        assert_eq!(
            starting_representation(2).unwrap(),
            poly(&[(0, 1), (0, 1), (1, 4)])
        );
        let s4 = starting_representation(4).unwrap();
        assert_eq!(s4.degree(), 8);
        assert_eq!(s4.leading_coefficient(), Rational::new(1.into(), 16.into()));
        assert!(starting_representation(0).is_err());
        for m in 1..=6 {
            assert!(verify_gate(&starting_representation(m).unwrap(), m));
        }
    }

    #[test]
    fn lifts() {
        let t3 = poly(&[(0, 1), (-1, 12), (1, 8), (1, 12)]);
        let lifted = lift_representation(&t3, 3).unwrap();
        assert_eq!(
            lifted,
            poly(&[(0, 1), (0, 1), (1, 36), (-1, 12), (1, 144), (1, 12), (1, 36)])
        );
        assert!(verify_gate(&lifted, 4));
        assert_eq!(
            lift_representation(&poly(&[(0, 1), (1, 2)]), 1).unwrap(),
            poly(&[(0, 1), (0, 1), (1, 4)])
        );
        assert_eq!(
            lift_representation(&poly(&[(0, 1), (0, 1), (1, 4)]), 2).unwrap(),
            poly(&[(0, 1), (0, 1), (0, 1), (0, 1), (1, 8)])
        );
        assert!(matches!(
            lift_representation(&basis_unchecked(3), 3),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn gate_verification() {
        assert!(verify_gate(&poly(&[(0, 1), (-1, 12), (1, 8), (1, 12)]), 3));
        assert!(!verify_gate(&basis_unchecked(3), 3));
        assert!(verify_gate(&poly(&[(0, 1), (0, 1), (1, 12), (0, 1), (-1, 48)]), 4));
        assert!(!verify_gate(&poly(&[(0, 1), (0, 1), (1, 12), (0, 1), (-1, 48)]), 3));
    }
}
