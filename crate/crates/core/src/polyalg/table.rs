//! The single-mode gate set used in the Fock-space benchmarks.

use serde::Serialize;

use super::poly::RationalPolynomial;
use crate::error::{Error, Result};

/// A polynomial phase gate `exp(2πi P(q/√π))` together with the logical
/// diagonal gate it is benchmarked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SimulationGate {
    /// `P = 0`, benchmarked against the identity.
    Identity,
    /// Minimal cubic representation of `T`.
    T3,
    /// The original cubic representation of `T`.
    TGkp,
    /// Quartic representation of `T` (twice the `√T` polynomial).
    T4,
    /// Minimal representation of `√T`.
    SqrtT,
    /// Minimal representation of `T^{1/4}`.
    FourthRootT,
    /// The `x → −x` mirror of [`SimulationGate::FourthRootT`].
    FourthRootTMirror,
    /// Minimal representation of `T^{1/8}`.
    EighthRootT,
    /// `P = 0` benchmarked against `T^{1/8}`: the trivial baseline the
    /// eighth-root gate has to beat.
    IdentityAsEighthRootT,
}

impl SimulationGate {
    pub const ALL: [SimulationGate; 9] = [
        Self::Identity,
        Self::T3,
        Self::TGkp,
        Self::T4,
        Self::SqrtT,
        Self::FourthRootT,
        Self::FourthRootTMirror,
        Self::EighthRootT,
        Self::IdentityAsEighthRootT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Identity => "I",
            Self::T3 => "T3",
            Self::TGkp => "TGKP",
            Self::T4 => "T4",
            Self::SqrtT => "sqrtT",
            Self::FourthRootT => "T4th",
            Self::FourthRootTMirror => "T4th-mirror",
            Self::EighthRootT => "T8th",
            Self::IdentityAsEighthRootT => "I-as-T8th",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|g| g.name()).collect();
                Error::InvalidArgument(format!("unknown gate {s:?}; expected one of {names:?}"))
            })
    }

    /// The polynomial `P(x)` applied at the continuous-variable level.
    pub fn polynomial(self) -> RationalPolynomial {
        let p = RationalPolynomial::from_fractions;
        match self {
            Self::Identity | Self::IdentityAsEighthRootT => RationalPolynomial::zero(),
            Self::T3 => p(&[(0, 1), (-1, 12), (1, 8), (1, 12)]),
            Self::TGkp => p(&[(0, 1), (-1, 4), (1, 8), (1, 4)]),
            Self::T4 => p(&[(0, 1), (0, 1), (1, 6), (0, 1), (-1, 24)]),
            Self::SqrtT => p(&[(0, 1), (0, 1), (1, 12), (0, 1), (-1, 48)]),
            Self::FourthRootT => p(&[(0, 1), (1, 60), (1, 24), (-1, 48), (-1, 96), (1, 240)]),
            Self::FourthRootTMirror => {
                p(&[(0, 1), (-1, 60), (1, 24), (1, 48), (-1, 96), (-1, 240)])
            }
            Self::EighthRootT => p(&[
                (0, 1),
                (0, 1),
                (17, 720),
                (0, 1),
                (-5, 576),
                (0, 1),
                (1, 1440),
            ]),
        }
    }

    /// Level `m` of the logical target `Λ_m = diag(1, e^{2πi/2^m})`; `None`
    /// for the identity.
    pub fn target_level(self) -> Option<u32> {
        match self {
            Self::Identity => None,
            Self::T3 | Self::TGkp | Self::T4 => Some(3),
            Self::SqrtT => Some(4),
            Self::FourthRootT | Self::FourthRootTMirror => Some(5),
            Self::EighthRootT | Self::IdentityAsEighthRootT => Some(6),
        }
    }

    /// Whether the continuous-variable polynomial really implements the
    /// logical target (false only for the trivial baseline).
    pub fn implements_target(self) -> bool {
        !matches!(self, Self::IdentityAsEighthRootT)
    }

    /// Whether this gate targets the logical `T` gate.
    pub fn is_t_gate(self) -> bool {
        matches!(self, Self::T3 | Self::TGkp | Self::T4)
    }

    /// Relabeling used for the Hadamard-hierarchy reading of the same
    /// polynomial, where the argument is `a†a/2` instead of `q/√π`.
    pub fn hadamard_hierarchy_label(self) -> Option<&'static str> {
        match self {
            Self::SqrtT => Some("H^(1/8) with x = a†a/2"),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{reduce, verify_gate, LexOrdering, lex_compare};
    use super::*;

    #[test]
    fn every_implementing_gate_verifies() {
        for g in SimulationGate::ALL {
            let p = g.polynomial();
            match g.target_level() {
                Some(m) if g.implements_target() => assert!(verify_gate(&p, m as i64), "{g:?}"),
                Some(m) => assert!(!verify_gate(&p, m as i64)),
                None => assert!(p.is_zero()),
            }
        }
    }

    #[test]
    fn minimal_entries_are_reduction_fixed_points() {
        for g in [
            SimulationGate::T3,
            SimulationGate::SqrtT,
            SimulationGate::FourthRootT,
            SimulationGate::FourthRootTMirror,
            SimulationGate::EighthRootT,
        ] {
            let p = g.polynomial();
            let out = reduce(&p);
            assert!(
                out.minima.iter().any(|q| lex_compare(q, &p) == LexOrdering::Equal),
                "{g:?}: {:?}",
                out.minima
            );
        }
    }

    #[test]
    fn mirror_is_reflection() {
        assert_eq!(
            SimulationGate::FourthRootT.polynomial().reflect(),
            SimulationGate::FourthRootTMirror.polynomial()
        );
    }

    #[test]
    fn names_round_trip() {
        for g in SimulationGate::ALL {
            assert_eq!(SimulationGate::from_name(g.name()).unwrap(), g);
        }
        assert!(SimulationGate::from_name("nope").is_err());
    }
}
