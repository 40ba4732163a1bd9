//! Row listings of the periodic factor tables.
//!
//! Tables 3, 4, 5 and 7 share one layout: a periodic factor `f` running along
//! a host sequence (`f x y` for every `y` that keeps `f·y` in the host), and
//! for composite `y` the "further" decompositions `f x p x (y/p)`, split again
//! while the trailing cofactor is composite.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::wheel::{cofactor_seq, factorize, is_prime, SeqId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableKind {
    /// SQ1 and SQ2 side by side with the prime factors of their composites.
    Table1,
    /// Companion factors of 5 and 7 in both sequences.
    Table3,
    /// Further sub-sequences of factor 7 in SQ1.
    Table4,
    /// Further sub-sequences of factor 11 in SQ2.
    Table5,
    /// Further sub-sequences of an arbitrary factor/host; factor 5 in SQ2 by default.
    Table7,
}

impl FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches("table") {
            "1" => Ok(TableKind::Table1),
            "3" => Ok(TableKind::Table3),
            "4" => Ok(TableKind::Table4),
            "5" => Ok(TableKind::Table5),
            "7" | "7b" | "7B" => Ok(TableKind::Table7),
            other => Err(domain(format!("unknown table kind {other:?}"))),
        }
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            TableKind::Table1 => 1,
            TableKind::Table3 => 3,
            TableKind::Table4 => 4,
            TableKind::Table5 => 5,
            TableKind::Table7 => 7,
        };
        write!(f, "table{n}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableParams {
    /// Largest running-sequence entry `y` (table 1: largest value) to list.
    pub max_entry: u64,
    /// Periodic factor; only read by table 7.
    pub factor: u64,
    /// Host sequence; only read by table 7.
    pub host: SeqId,
}

impl Default for TableParams {
    fn default() -> Self {
        TableParams { max_entry: 400, factor: 5, host: SeqId::Sq2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowRole {
    /// Table 1 row for a prime member.
    Prime,
    /// Table 1 row for a composite member, path = prime factors.
    Composite,
    /// Table 1 row for the unit 1 at the head of SQ2.
    Unit,
    /// `f x y` in the periodic column.
    Periodic,
    /// A further decomposition of a composite `y`.
    Further,
}

impl RowRole {
    pub const fn as_str(self) -> &'static str {
        match self {
            RowRole::Prime => "prime",
            RowRole::Composite => "composite",
            RowRole::Unit => "unit",
            RowRole::Periodic => "periodic",
            RowRole::Further => "further",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtlasRow {
    /// Product of `path`.
    pub value: u64,
    pub host: SeqId,
    /// Running-sequence entry `y` the row belongs to (the value itself for table 1).
    pub entry: u64,
    pub path: Vec<u64>,
    pub label: String,
    pub role: RowRole,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtlasTable {
    pub kind: TableKind,
    pub rows: Vec<AtlasRow>,
}

impl AtlasTable {
    pub fn rows_for_entry(&self, entry: u64) -> impl Iterator<Item = &AtlasRow> {
        self.rows.iter().filter(move |r| r.entry == entry)
    }
}

pub fn emit_table(kind: TableKind, params: TableParams) -> Result<AtlasTable> {
    let rows = match kind {
        TableKind::Table1 => table1(params.max_entry),
        TableKind::Table3 => {
            let mut rows = Vec::new();
            for host in [SeqId::Sq1, SeqId::Sq2] {
                for f in [5, 7] {
                    rows.extend(
                        periodic_rows(f, host, params.max_entry)?.into_iter().filter(|r| r.role == RowRole::Periodic),
                    );
                }
            }
            rows
        }
        TableKind::Table4 => periodic_rows(7, SeqId::Sq1, params.max_entry)?,
        TableKind::Table5 => periodic_rows(11, SeqId::Sq2, params.max_entry)?,
        TableKind::Table7 => periodic_rows(params.factor, params.host, params.max_entry)?,
    };
    Ok(AtlasTable { kind, rows })
}

fn table1(max_value: u64) -> Vec<AtlasRow> {
    let mut rows = Vec::new();
    let mut v = 1;
    while v <= max_value {
        for value in [v, v + 4] {
            if value > max_value {
                break;
            }
            let host = SeqId::from_residue(value % 6).expect("wheel value");
            let (path, role) = if value == 1 {
                (Vec::new(), RowRole::Unit)
            } else if is_prime(value) {
                (Vec::new(), RowRole::Prime)
            } else {
                (factorize(value), RowRole::Composite)
            };
            let label = path.iter().map(u64::to_string).collect::<Vec<_>>().join("x ");
            rows.push(AtlasRow { value, host, entry: value, path, label, role });
        }
        v += 6;
    }
    rows
}

fn further_label(prefix: &[u64], cofactor: u64) -> String {
    let mut s = String::new();
    for p in prefix {
        s.push_str(&format!("{p}x "));
    }
    s.push_str(&cofactor.to_string());
    s
}

fn smallest_prime_factor(n: u64) -> u64 {
    factorize(n).first().copied().unwrap_or(n)
}

/// Rows for factor `f` running through `host`, entries `y <= max_entry`.
fn periodic_rows(f: u64, host: SeqId, max_entry: u64) -> Result<Vec<AtlasRow>> {
    let pattern = cofactor_seq(f, host).ok_or_else(|| domain(format!("factor {f} has no sub-sequence in {host}")))?;
    let first = if pattern == SeqId::Sq1 { 5 } else { 7 };
    let mut rows = Vec::new();
    let mut y = first;
    while y <= max_entry {
        let value = f.checked_mul(y).ok_or(Error::Overflow("table value exceeds 64 bits"))?;
        rows.push(AtlasRow {
            value,
            host,
            entry: y,
            path: vec![f, y],
            label: format!("{f} x {y}"),
            role: RowRole::Periodic,
        });
        rows.extend(further_rows(f, host, y, value));
        y += 6;
    }
    Ok(rows)
}

/// Level 1: one row per distinct prime `p | y` with `y/p >= 5`. Deeper levels split
/// the trailing cofactor by its smallest prime; prefixes are kept sorted and a
/// decomposition is listed once per multiset of factors.
fn further_rows(f: u64, host: SeqId, y: u64, value: u64) -> Vec<AtlasRow> {
    let mut rows = Vec::new();
    let mut primes = factorize(y);
    primes.dedup();
    let mut level: Vec<(Vec<u64>, u64)> =
        primes.into_iter().filter(|&p| y / p >= 5).map(|p| (vec![f, p], y / p)).collect();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    while !level.is_empty() {
        let mut next = Vec::new();
        for (prefix, c) in level {
            let mut key = prefix.clone();
            key.push(c);
            key.sort_unstable();
            if !seen.insert(key) {
                continue;
            }
            let mut path = prefix.clone();
            path.push(c);
            rows.push(AtlasRow {
                value,
                host,
                entry: y,
                path,
                label: further_label(&prefix, c),
                role: RowRole::Further,
            });
            if !is_prime(c) {
                let q = smallest_prime_factor(c);
                let mut p2 = prefix.clone();
                p2.push(q);
                p2[1..].sort_unstable();
                next.push((p2, c / q));
            }
        }
        level = next;
    }
    rows
}
