use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::basis::basis_unchecked;
use super::poly::{factorial, round_or_tie, Rational, RationalPolynomial};

/// One reduction step: `n` copies of `L_degree` were subtracted.  `boundary`
/// marks an exact half-integer remainder where the opposite choice of `n`
/// was also explored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BranchStep {
    pub degree: usize,
    #[serde(serialize_with = "ser_bigint")]
    pub multiplier: BigInt,
    pub boundary: bool,
}

fn ser_bigint<S: serde::Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// Result of [`reduce`].
#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    /// Every lexicographically minimal representative, canonical one first
    /// (the one whose signs, read from the top degree down, are
    /// nonnegative earliest).
    pub minima: Vec<RationalPolynomial>,
    /// Steps that produced `minima[0]`.
    pub branch_log: Vec<BranchStep>,
    /// Steps for every entry of `minima`, in the same order.
    pub branch_logs: Vec<Vec<BranchStep>>,
    /// True when the branch cap discarded survivors.
    pub capped: bool,
}

impl ReductionOutcome {
    pub fn canonical(&self) -> &RationalPolynomial {
        &self.minima[0]
    }

    /// More than one minimum with the same magnitude profile.
    pub fn has_ties(&self) -> bool {
        self.minima.len() > 1
    }
}

/// Outcome of [`lex_compare`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LexOrdering {
    Less,
    Greater,
    Equal,
    Incomparable,
}

/// Compares coefficient magnitudes from the highest degree downward; the
/// first strict difference decides.  Missing coefficients count as zero, so
/// a lower-degree polynomial is smaller.  Sign differences are ignored, so
/// `Incomparable` is never returned by this scan.
pub fn lex_compare(p: &RationalPolynomial, q: &RationalPolynomial) -> LexOrdering {
    match magnitude_cmp(p, q) {
        Ordering::Less => LexOrdering::Less,
        Ordering::Greater => LexOrdering::Greater,
        Ordering::Equal => LexOrdering::Equal,
    }
}

fn magnitude_cmp(p: &RationalPolynomial, q: &RationalPolynomial) -> Ordering {
    let top = p.degree().max(q.degree());
    for k in (0..=top).rev() {
        match p.coeff(k).abs().cmp(&q.coeff(k).abs()) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Orders equal-magnitude representatives: reading from the top degree,
/// the first position where the signs differ puts the nonnegative one first.
fn sign_preference(p: &RationalPolynomial, q: &RationalPolynomial) -> Ordering {
    let top = p.degree().max(q.degree());
    for k in (0..=top).rev() {
        let (a, b) = (p.coeff(k), q.coeff(k));
        match (a.is_negative(), b.is_negative()) {
            (false, true) => return Ordering::Less,
            (true, false) => return Ordering::Greater,
            _ => continue,
        }
    }
    Ordering::Equal
}

#[derive(Clone)]
struct Branch {
    poly: RationalPolynomial,
    log: Vec<BranchStep>,
}

/// Greedy coefficient reduction against the integer-valued basis.
///
/// For `j` from `deg P` down to 1 the coefficient is split as
/// `a_j = n_j/j! + r_j` with `|r_j| ≤ 1/(2·j!)` and `n_j·L_j` is subtracted.
/// Exact half-integer ties fork both choices (unless one choice is
/// `n_j = 0`, i.e. the coefficient already sits on the bound); after each degree only the
/// branches with the smallest `|a_j|` survive, which is exactly
/// lexicographic minimisation because higher coefficients are already
/// fixed.  The constant term is dropped (a global phase).
pub fn reduce(p: &RationalPolynomial) -> ReductionOutcome {
    let deg = p.degree();
    let cap: usize = if deg >= 20 { 1 << 20 } else { 1usize << deg.max(1) };
    let mut capped = false;
    let mut branches = vec![Branch {
        poly: p.clone(),
        log: Vec::new(),
    }];
    for j in (1..=deg).rev() {
        let lj = basis_unchecked(j);
        let jf = Rational::from_integer(factorial(j));
        let mut next: Vec<Branch> = Vec::with_capacity(branches.len() * 2);
        for b in &branches {
            let y = b.poly.coeff(j) * &jf;
            let choices: Vec<(BigInt, bool)> = match round_or_tie(&y) {
                Ok(n) => vec![(n, false)],
                // A coefficient already sitting on the bound is left as is.
                Err((lo, hi)) if lo.is_zero() || hi.is_zero() => vec![(BigInt::zero(), true)],
                Err((lo, hi)) => vec![(lo, true), (hi, true)],
            };
            for (n, boundary) in choices {
                let poly = if n.is_zero() {
                    b.poly.clone()
                } else {
                    &b.poly - &lj.scale(&Rational::from_integer(n.clone()))
                };
                let mut log = b.log.clone();
                log.push(BranchStep {
                    degree: j,
                    multiplier: n,
                    boundary,
                });
                next.push(Branch { poly, log });
            }
        }
        // Keep only the minimal |a_j| and deduplicate by coefficient profile.
        let best = next
            .iter()
            .map(|b| b.poly.coeff(j).abs())
            .min()
            .expect("at least one branch");
        let mut seen = HashSet::new();
        next.retain(|b| b.poly.coeff(j).abs() == best && seen.insert(b.poly.clone()));
        if next.len() > cap {
            next.truncate(cap);
            capped = true;
        }
        branches = next;
    }
    let mut out: Vec<Branch> = branches
        .into_iter()
        .map(|b| Branch {
            poly: b.poly.without_constant(),
            log: b.log,
        })
        .collect();
    let mut seen = HashSet::new();
    out.retain(|b| seen.insert(b.poly.clone()));
    out.sort_by(|a, b| sign_preference(&a.poly, &b.poly));
    let branch_logs: Vec<_> = out.iter().map(|b| b.log.clone()).collect();
    ReductionOutcome {
        branch_log: branch_logs[0].clone(),
        minima: out.into_iter().map(|b| b.poly).collect(),
        branch_logs,
        capped,
    }
}
