use std::fmt;

use crate::error::{domain, Error, Result};
use crate::wheel::{cofactor_seq, SeqId};

/// `SQ base-stretch`: sequence `base` stretched by `stretch`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubseqName {
    base: SeqId,
    stretch: u64,
}

impl SubseqName {
    pub fn new(base: SeqId, stretch: u64) -> Result<Self> {
        if base == SeqId::Sq3 {
            return Err(domain("sub-sequences are built on SQ1 or SQ2"));
        }
        if stretch < 5 || !(stretch % 6 == 1 || stretch % 6 == 5) {
            return Err(domain(format!("stretch factor {stretch} must be >= 5 and coprime to 6")));
        }
        Ok(SubseqName { base, stretch })
    }

    /// The sub-sequence of multiples of `stretch` that lies in `host`.
    pub fn in_host(host: SeqId, stretch: u64) -> Result<Self> {
        let base = cofactor_seq(stretch, host)
            .ok_or_else(|| domain(format!("no sub-sequence of {host} with stretch {stretch}")))?;
        SubseqName::new(base, stretch)
    }

    pub const fn base(&self) -> SeqId {
        self.base
    }

    pub const fn stretch(&self) -> u64 {
        self.stretch
    }

    /// Sequence that contains every member.
    pub fn host(&self) -> SeqId {
        SeqId::from_residue((self.stretch % 6) * self.base.residue() % 6).expect("product of units mod 6 is a unit")
    }

    /// First cofactor: 5 for SQ1-pattern, 7 for SQ2-pattern (1 is not a composite witness).
    pub const fn first_cofactor(&self) -> u64 {
        match self.base {
            SeqId::Sq1 => 5,
            _ => 7,
        }
    }

    pub fn cofactor(&self, n: u64) -> Result<u64> {
        n.checked_mul(6)
            .and_then(|v| v.checked_add(self.first_cofactor()))
            .ok_or(Error::Overflow("sub-sequence cofactor exceeds 64 bits"))
    }

    pub fn member(&self, n: u64) -> Result<u64> {
        self.cofactor(n)?.checked_mul(self.stretch).ok_or(Error::Overflow("sub-sequence member exceeds 64 bits"))
    }

    pub fn contains(&self, v: u64) -> bool {
        v.is_multiple_of(self.stretch) && {
            let c = v / self.stretch;
            c >= self.first_cofactor() && c % 6 == self.base.residue()
        }
    }

    /// `(value, cofactor)` for every member `<= limit`, ascending.
    pub fn members_up_to(&self, limit: u64) -> impl Iterator<Item = (u64, u64)> + '_ {
        let x = self.stretch;
        (0..)
            .map(move |n| self.first_cofactor() + 6 * n)
            .map_while(move |c| c.checked_mul(x).filter(|&v| v <= limit).map(|v| (v, c)))
    }
}

impl fmt::Display for SubseqName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SQ {}-{}", self.base.number(), self.stretch)
    }
}

pub fn subsequence_member(name: SubseqName, n: u64) -> Result<u64> {
    name.member(n)
}
