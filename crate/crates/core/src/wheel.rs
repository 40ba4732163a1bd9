//! The three residue classes modulo 6 that hold every odd number.
//!
//! `SQ1 = 5 + 6n`, `SQ2 = 1 + 6n` and `SQ3 = 3 + 6n`. Every integer coprime
//! to 6 lies in exactly one of `SQ1`/`SQ2`; `SQ3` collects the odd multiples
//! of 3 and is only used when classifying zeta level-curve labels.

use std::fmt;

use crate::error::{Error, Result};

/// One of the three odd residue sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeqId {
    Sq1,
    Sq2,
    Sq3,
}

impl SeqId {
    /// First element of the sequence, which is also its residue mod 6 except for SQ2.
    pub const fn base(self) -> u64 {
        match self {
            SeqId::Sq1 => 5,
            SeqId::Sq2 => 1,
            SeqId::Sq3 => 3,
        }
    }

    pub const fn residue(self) -> u64 {
        self.base()
    }

    /// Sequence holding residue `r` (mod 6), if any.
    pub const fn from_residue(r: u64) -> Option<SeqId> {
        match r % 6 {
            5 => Some(SeqId::Sq1),
            1 => Some(SeqId::Sq2),
            3 => Some(SeqId::Sq3),
            _ => None,
        }
    }

    /// Short numeric tag used in CSV output (1, 2 or 3).
    pub const fn number(self) -> u8 {
        match self {
            SeqId::Sq1 => 1,
            SeqId::Sq2 => 2,
            SeqId::Sq3 => 3,
        }
    }

    pub const fn from_number(n: u8) -> Option<SeqId> {
        match n {
            1 => Some(SeqId::Sq1),
            2 => Some(SeqId::Sq2),
            3 => Some(SeqId::Sq3),
            _ => None,
        }
    }
}

impl fmt::Display for SeqId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SQ{}", self.number())
    }
}

/// Position `n` inside one of the sequences; its value is `base + 6n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WheelIndex {
    pub seq: SeqId,
    pub n: u64,
}

impl WheelIndex {
    pub const fn new(seq: SeqId, n: u64) -> Self {
        WheelIndex { seq, n }
    }

    pub fn value(self) -> Result<u64> {
        value_of(self)
    }
}

/// Residue of a positive integer modulo 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue6(u8);

impl Residue6 {
    pub const fn get(self) -> u8 {
        self.0
    }

    pub const fn is_coprime_to_6(self) -> bool {
        self.0 == 1 || self.0 == 5
    }

    pub const fn is_odd_multiple_of_3(self) -> bool {
        self.0 == 3
    }
}

pub fn value_of(idx: WheelIndex) -> Result<u64> {
    idx.n
        .checked_mul(6)
        .and_then(|v| v.checked_add(idx.seq.base()))
        .ok_or(Error::Overflow("wheel value exceeds 64 bits"))
}

/// Inverse of [`value_of`]; `None` for even numbers and multiples of 6 plus 2 or 4.
pub fn locate(v: u64) -> Option<WheelIndex> {
    let seq = SeqId::from_residue(v % 6)?;
    if v < seq.base() {
        return None;
    }
    Some(WheelIndex::new(seq, (v - seq.base()) / 6))
}

pub fn residue_class(v: u64) -> Residue6 {
    Residue6((v % 6) as u8)
}

/// Which of SQ1/SQ2 a stretch factor `x` must multiply to land in `host`.
///
/// Residues coprime to 6 form the group {1, 5} with 5·5 ≡ 1, so the answer is
/// unique: a host of residue `h` is reached from `x` by cofactors of residue `h·x⁻¹ = h·x`.
pub fn cofactor_seq(x: u64, host: SeqId) -> Option<SeqId> {
    let rx = x % 6;
    if !(rx == 1 || rx == 5) || host == SeqId::Sq3 {
        return None;
    }
    SeqId::from_residue((rx * host.residue()) % 6)
}

/// Exact primality by trial division; used for small checks across the crate.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    if n.is_multiple_of(3) {
        return n == 3;
    }
    let mut d = 5u64;
    while d <= n / d {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Prime factorisation in ascending order, with multiplicity.
pub fn factorize(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for p in [2u64, 3] {
        while n.is_multiple_of(p) && n > 1 {
            out.push(p);
            n /= p;
        }
    }
    let mut d = 5u64;
    while d <= n / d {
        for q in [d, d + 2] {
            while n.is_multiple_of(q) {
                out.push(q);
                n /= q;
            }
        }
        d += 6;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
