use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::basis::basis_unchecked;
use super::poly::{factorial, round_or_tie, Rational};
use crate::error::{Error, Result};

/// Polynomial in `N` variables with exact rational coefficients, stored as a
/// map from exponent tuple to coefficient.  Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiRationalPolynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiRationalPolynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    /// Build from `(exponents, numerator, denominator)` triples.
    pub fn from_terms(nvars: usize, terms: &[(&[u32], i64, i64)]) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, n, d) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch(format!(
                    "exponent tuple {e:?} has {} entries, expected {nvars}",
                    e.len()
                )));
            }
            p.add_term(e.to_vec(), Rational::new((*n).into(), (*d).into()));
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Adds `c·x^exps`, dropping the term if it cancels.
    pub fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        assert_eq!(exps.len(), self.nvars, "exponent arity");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    /// Exact evaluation at integer arguments.
    pub fn eval_int(&self, xs: &[i64]) -> Rational {
        assert_eq!(xs.len(), self.nvars);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = BigInt::one();
            for (x, k) in xs.iter().zip(e) {
                m *= BigInt::from(*x).pow(*k);
            }
            acc += c * Rational::from_integer(m);
        }
        acc
    }

    /// Coefficients rendered as `"num/den"` keyed by exponent tuple.
    pub fn to_fraction_terms(&self) -> Vec<(Vec<u32>, String)> {
        self.terms
            .iter()
            .map(|(e, c)| (e.clone(), super::poly::rational_to_string(c)))
            .collect()
    }
}

impl fmt::Debug for MultiRationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiRationalPolynomial({self})")
    }
}

impl fmt::Display for MultiRationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest total degree first.
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            let (da, db) = (a.0.iter().sum::<u32>(), b.0.iter().sum::<u32>());
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (i, (e, c)) in items.into_iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let a = c.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    if k == 1 {
                        format!("x{}", v + 1)
                    } else {
                        format!("x{}^{k}", v + 1)
                    }
                })
                .collect();
            let mono = mono.join("*");
            if mono.is_empty() {
                write!(f, "{}", a.numer())?;
            } else if a.numer().is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", a.numer())?;
            }
            if !a.denom().is_one() {
                write!(f, "/{}", a.denom())?;
            }
        }
        Ok(())
    }
}

/// A half-integer tie met during [`multivariate_reduce`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TieRecord {
    pub exponents: Vec<u32>,
    /// Multiplier actually subtracted (the one of smaller magnitude).
    pub chosen: i64,
    /// The equally valid alternative.
    pub alternative: i64,
}

/// Result of [`multivariate_reduce`].
#[derive(Clone, Debug)]
pub struct MultiReductionOutcome {
    pub polynomial: MultiRationalPolynomial,
    pub ties: Vec<TieRecord>,
}

/// `∏_i L_{d_i}(x_i)` expanded into monomials.
fn product_basis(exps: &[u32]) -> MultiRationalPolynomial {
    let factors: Vec<Vec<Rational>> = exps
        .iter()
        .map(|&d| {
            if d == 0 {
                vec![Rational::one()]
            } else {
                basis_unchecked(d as usize).coefficients().to_vec()
            }
        })
        .collect();
    let mut out = MultiRationalPolynomial::zero(exps.len());
    let mut idx = vec![0u32; exps.len()];
    loop {
        let c = idx
            .iter()
            .zip(&factors)
            .fold(Rational::one(), |acc, (&k, f)| {
                acc * f.get(k as usize).cloned().unwrap_or_else(Rational::zero)
            });
        out.add_term(idx.clone(), c);
        // Odometer increment.
        let mut v = 0;
        loop {
            if v == idx.len() {
                return out;
            }
            idx[v] += 1;
            if idx[v] <= exps[v] {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
    }
}

/// Reduces each monomial coefficient against the product basis
/// `L_{d_1}(x_1)···L_{d_N}(x_N)`, from the highest total degree downward.
/// Subtracting a product basis element only touches its own monomial and
/// monomials of lower total degree, so monomials of equal total degree are
/// independent.  Exact half-integer ties subtract the multiplier of smaller
/// magnitude and are recorded in the outcome.  The constant is dropped.
pub fn multivariate_reduce(p: &MultiRationalPolynomial) -> MultiReductionOutcome {
    let mut cur = p.clone();
    let mut ties = Vec::new();
    for total in (1..=p.total_degree()).rev() {
        let monos: Vec<Vec<u32>> = cur
            .terms
            .keys()
            .filter(|e| e.iter().sum::<u32>() == total)
            .cloned()
            .collect();
        for e in monos {
            let scale: BigInt = e.iter().map(|&d| factorial(d as usize)).product();
            let y = cur.coeff(&e) * Rational::from_integer(scale);
            let n = match round_or_tie(&y) {
                Ok(n) => n,
                Err((lo, hi)) => {
                    let (chosen, alt) = if lo.abs() <= hi.abs() { (lo, hi) } else { (hi, lo) };
                    ties.push(TieRecord {
                        exponents: e.clone(),
                        chosen: i64::try_from(&chosen).unwrap_or(i64::MAX),
                        alternative: i64::try_from(&alt).unwrap_or(i64::MAX),
                    });
                    chosen
                }
            };
            if n.is_zero() {
                continue;
            }
            let nr = Rational::from_integer(n);
            for (be, bc) in product_basis(&e).terms {
                cur.add_term(be, -(bc * &nr));
            }
        }
    }
    cur.terms.remove(&vec![0; cur.nvars]);
    MultiReductionOutcome {
        polynomial: cur,
        ties,
    }
}

/// `(x_1···x_N)^{2^{m−1}} / 2^m`, the starting representation of the
/// `N`-qubit controlled gate `C^{N−1}Λ_m`.
pub fn control_gate_start(n: i64, m: i64) -> Result<MultiRationalPolynomial> {
    if n < 1 || m < 1 || m > 24 {
        return Err(Error::InvalidArgument(format!(
            "need qubits ≥ 1 and 1 ≤ level ≤ 24, got N={n}, m={m}"
        )));
    }
    let d = 1u32 << (m - 1);
    let mut p = MultiRationalPolynomial::zero(n as usize);
    p.add_term(
        vec![d; n as usize],
        Rational::new(BigInt::one(), BigInt::one() << (m as usize)),
    );
    Ok(p)
}
