//! Reduced fractional weights and their negative continued fractions.
//!
//! A marked point carries a weight `p/q` strictly between 0 and 1.  Its
//! expansion `p/q = 1/(e1 - 1/(e2 - ...))` with all `e_i >= 2` lists the
//! self-intersections (negated) of one side of the exceptional chain that
//! resolves the point; the expansion of the complementary weight
//! `(q-p)/q` lists the other side.
//!
//! # Invariants
//! - [`Weight`] is always reduced with `0 < p < q`.
//! - Expansion entries are `>= 2`; the expansion of `p/q` has at most
//!   `q - 1` entries, with equality exactly for `p = q - 1`.
//! - [`hj_eval`] inverts [`hj_expand`].

use num_integer::Integer;
use std::fmt;
use thiserror::Error;

use crate::rational::Rat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FractionError {
    #[error("weight must satisfy 0 < p < q, got {p}/{q}")]
    InvalidWeight { p: u64, q: u64 },
    #[error("weight literal `{0}` is not of the form p/q")]
    BadLiteral(String),
    #[error("continued fraction is empty")]
    EmptyExpansion,
    #[error("continued fraction entry {0} is below 2")]
    EntryOutOfRange(u64),
    #[error("continued fraction value overflows 64-bit integers")]
    Overflow,
}

/// Reduced fraction `p/q` with `0 < p < q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    p: u64,
    q: u64,
}

impl Weight {
    /// Reduces `p/q` and checks it lies strictly between 0 and 1.
    pub fn new(p: u64, q: u64) -> Result<Self, FractionError> {
        if p == 0 || q == 0 || p >= q {
            return Err(FractionError::InvalidWeight { p, q });
        }
        let g = p.gcd(&q);
        Ok(Weight { p: p / g, q: q / g })
    }

    /// Parses a `p/q` literal.
    pub fn parse(text: &str) -> Result<Self, FractionError> {
        let bad = || FractionError::BadLiteral(text.to_string());
        let (p, q) = text.trim().split_once('/').ok_or_else(bad)?;
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        Weight::new(p, q)
    }

    pub fn numer(&self) -> u64 {
        self.p
    }

    pub fn denom(&self) -> u64 {
        self.q
    }

    /// The complementary weight `(q-p)/q`.
    pub fn complement(&self) -> Weight {
        Weight {
            p: self.q - self.p,
            q: self.q,
        }
    }

    pub fn as_rat(&self) -> Rat {
        crate::rational::rat(self.p as i64, self.q as i64)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Cross-multiplied comparison; u128 cannot overflow for u64 parts.
        (self.p as u128 * other.q as u128).cmp(&(other.p as u128 * self.q as u128))
    }
}

/// Negative continued fraction `[e1, e2, ...]`, all entries `>= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HJExpansion {
    entries: Vec<u64>,
}

impl HJExpansion {
    pub fn new(entries: Vec<u64>) -> Result<Self, FractionError> {
        if entries.is_empty() {
            return Err(FractionError::EmptyExpansion);
        }
        if let Some(&e) = entries.iter().find(|&&e| e < 2) {
            return Err(FractionError::EntryOutOfRange(e));
        }
        Ok(HJExpansion { entries })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for HJExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

/// Expands `p/q` as `1/(e1 - 1/(e2 - ...))`.
///
/// Each step takes `e = ceil(q/p)` and replaces `(p, q)` with
/// `(e*p - q, p)`; the remainder strictly decreases, so this terminates in
/// at most `q - 1` steps.
pub fn hj_expand(weight: Weight) -> HJExpansion {
    let (mut p, mut q) = (weight.p as u128, weight.q as u128);
    let mut entries = Vec::new();
    while p > 0 {
        let e = q.div_ceil(p);
        entries.push(e as u64);
        (p, q) = (e * p - q, p);
    }
    HJExpansion { entries }
}

/// Expansion of the complementary weight `(q-p)/q`.
pub fn dual_expand(weight: Weight) -> HJExpansion {
    hj_expand(weight.complement())
}

/// Evaluates `[e1, ..., en]` back to the weight `1/(e1 - 1/(e2 - ...))`.
pub fn hj_eval(entries: &[u64]) -> Result<Weight, FractionError> {
    if entries.is_empty() {
        return Err(FractionError::EmptyExpansion);
    }
    // Fold from the right: prepending e sends p/q to q/(e*q - p).
    let (mut p, mut q) = (0u128, 1u128);
    for &e in entries.iter().rev() {
        if e < 2 {
            return Err(FractionError::EntryOutOfRange(e));
        }
        let scaled = (e as u128)
            .checked_mul(q)
            .and_then(|eq| eq.checked_sub(p))
            .ok_or(FractionError::Overflow)?;
        (p, q) = (q, scaled);
    }
    if q > u64::MAX as u128 {
        return Err(FractionError::Overflow);
    }
    // Entries >= 2 keep p/q strictly between 0 and 1 and already reduced.
    Weight::new(p as u64, q as u64)
}
