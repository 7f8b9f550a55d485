//! Exact rational algebra for polynomial phase gates.
//!
//! A single-mode polynomial phase gate `exp(2πi P(q/√π))` acts on the square
//! GKP code as the diagonal gate `Λ_m = diag(1, e^{2πi/2^m})` exactly when
//! `P(k) mod 1` is `0` on even integers and `2^{-m}` on odd integers.  Two
//! polynomials implement the same logical gate when their difference is
//! integer-valued, so the integer-valued basis `L_n` parametrises all
//! representations, and greedy coefficient reduction against it finds the
//! lexicographically minimal ones.
//!
//! All arithmetic is exact (`BigRational`), so boundary ties in the reduction
//! are detected exactly and both branches are explored.

mod basis;
mod multi;
mod poly;
mod reduce;
pub mod table;

pub use basis::{
    basis_polynomial, is_integer_valued, lift_representation, starting_representation,
    verify_gate, VERIFY_RANGE,
};
pub use multi::{
    control_gate_start, multivariate_reduce, MultiRationalPolynomial, MultiReductionOutcome,
    TieRecord,
};
pub use poly::{frac_mod1, parse_rational, rational_to_string, Rational, RationalPolynomial};
pub use reduce::{lex_compare, reduce, BranchStep, LexOrdering, ReductionOutcome};
