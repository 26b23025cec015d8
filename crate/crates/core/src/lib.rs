//! Permutation-group machinery for verifying Cayley digraph isomorphism
//! properties of elementary abelian groups at desk scale (up to 81 points).
//!
//! The crate is built around a few layers:
//!
//! * [`perm`] / [`group`] / [`blocks`] — permutations, stabilizer chains,
//!   orbits and systems of imprimitivity;
//! * [`ea`] — the regular representation of `Z_p^n`, the standard block
//!   chain, iterated wreath Sylow subgroups, and embedding of two regular
//!   copies into a common Sylow p-subgroup;
//! * [`cayley`] / [`autosearch`] / [`two_closure`] — Cayley digraphs,
//!   automorphism groups, canonical forms, orbital partitions and 2-closures;
//! * [`conjugator`] — the constructive pipeline that, given two regular
//!   elementary abelian subgroups, produces an audited certificate of a
//!   conjugating element inside the 2-closure;
//! * [`dci`] — census and campaign harnesses checking the DCI property
//!   exhaustively or by sampling.
//!
//! Composition convention used everywhere: `a.compose(&b)` is the map
//! `x -> a(b(x))` (apply `b` first), matching functional notation.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

use alloc::string::String;

pub mod autosearch;
pub mod blocks;
pub mod cayley;
pub mod conjugator;
pub mod dci;
pub mod ea;
pub mod group;
pub mod perm;
pub mod two_closure;

/// Default cap on the number of points. Everything in this crate is tuned
/// for degrees up to 81 = 3^4; the cap can be raised by callers that know
/// what they are doing (the CLI exposes `CIFORGE_POINT_CAP`).
pub const DEFAULT_POINT_CAP: usize = 81;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two permutations (or a permutation and a group) act on different point sets.
    DomainMismatch { left: usize, right: usize },
    /// An image list was not a bijection of `0..n`.
    NotBijective,
    /// Malformed text input.
    Parse(String),
    /// An operation requiring a transitive group got an intransitive one.
    NotTransitive,
    /// A block system was not invariant under the group at hand.
    NotInvariant,
    /// `p` was not prime.
    NotPrime(usize),
    /// Degree exceeds the configured point cap.
    PointCapExceeded { points: usize, cap: usize },
    /// An argument was out of range or otherwise unusable.
    Invalid(String),
    /// A search or enumeration exceeded its budget; result is inconclusive,
    /// not false.
    BudgetExceeded(String),
    /// A runtime assertion derived from the underlying theory failed. This
    /// must never fire on valid inputs; if it does, it carries the stage tag
    /// and enough detail to reproduce.
    ContractViolation { stage: &'static str, detail: String },
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::DomainMismatch { left, right } => {
                write!(f, "domain size mismatch: {left} vs {right}")
            }
            Error::NotBijective => write!(f, "image list is not a bijection"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::NotTransitive => write!(f, "group is not transitive"),
            Error::NotInvariant => write!(f, "block system is not invariant under the group"),
            Error::NotPrime(p) => write!(f, "{p} is not prime"),
            Error::PointCapExceeded { points, cap } => {
                write!(f, "{points} points exceeds the cap of {cap}")
            }
            Error::Invalid(m) => write!(f, "invalid argument: {m}"),
            Error::BudgetExceeded(m) => write!(f, "budget exceeded: {m}"),
            Error::ContractViolation { stage, detail } => {
                write!(f, "contract violation at {stage}: {detail}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub use blocks::BlockSystem;
pub use cayley::{CayleyDigraph, ConnectionSet};
pub use conjugator::{Certificate, CertificateStep, StepKind};
pub use group::PermutationGroup;
pub use perm::Perm;
pub use two_closure::OrbitalPartition;

/// Primality test for the tiny primes this crate deals with.
pub fn is_prime(p: usize) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `p^n` with overflow checking against the point cap.
pub fn checked_degree(p: usize, n: usize, cap: usize) -> Result<usize> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::Invalid(String::from("rank must be at least 1")));
    }
    let mut deg: usize = 1;
    for _ in 0..n {
        deg = deg
            .checked_mul(p)
            .ok_or(Error::PointCapExceeded { points: usize::MAX, cap })?;
        if deg > cap {
            return Err(Error::PointCapExceeded { points: deg, cap });
        }
    }
    Ok(deg)
}
