//! Composite marking by undertone waves over SQ1 ∪ SQ2.
//!
//! A wave with stretch factor `x` strikes the values `x·(5 + 6n)` (branch 1,
//! `n ≥ 0`) and `x·(1 + 6n)` (branch 2, `n ≥ 1`). Every composite coprime to 6
//! is struck by at least one wave with prime `x`; the unstruck positions are the
//! primes above 3.
//!
//! [`Sieve`] is the fast path: wheel-indexed bitmaps, one per residue class,
//! processed in independent segments. [`mark_range`] produces the explicit
//! [`CompositeMark`] records used for tables and CSV export.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::wheel::{is_prime, SeqId};

/// Mark lists are kept per value only up to this limit.
pub const MARK_RETENTION_LIMIT: u64 = 1_000_000;

/// Largest limit the classical oracle accepts.
pub const ORACLE_LIMIT: u64 = 100_000_000;

pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// Cofactors `5 + 6n`, `n ≥ 0`.
    One,
    /// Cofactors `1 + 6n`, `n ≥ 1`.
    Two,
}

impl Branch {
    pub const fn number(self) -> u8 {
        match self {
            Branch::One => 1,
            Branch::Two => 2,
        }
    }

    const fn cofactor_base(self) -> u64 {
        match self {
            Branch::One => 5,
            Branch::Two => 1,
        }
    }

    const fn first_n(self) -> u64 {
        match self {
            Branch::One => 0,
            Branch::Two => 1,
        }
    }

    /// Smallest cofactor the branch produces.
    pub const fn min_cofactor(self) -> u64 {
        match self {
            Branch::One => 5,
            Branch::Two => 7,
        }
    }

    /// Branch whose cofactors carry residue `r` (mod 6).
    pub const fn for_cofactor(c: u64) -> Option<Branch> {
        match c % 6 {
            5 => Some(Branch::One),
            1 => Some(Branch::Two),
            _ => None,
        }
    }
}

/// One undertone: the progression of multiples of `x` along one branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UndertoneWave {
    x: u64,
    branch: Branch,
}

impl UndertoneWave {
    pub fn new(x: u64, branch: Branch) -> Result<Self> {
        if x < 5 || !(x % 6 == 1 || x % 6 == 5) {
            return Err(domain(format!("stretch factor {x} must be >= 5 and congruent to 1 or 5 mod 6")));
        }
        Ok(UndertoneWave { x, branch })
    }

    pub const fn x(&self) -> u64 {
        self.x
    }

    pub const fn branch(&self) -> Branch {
        self.branch
    }

    pub fn value(&self, n: u64) -> Result<u64> {
        undertone_value(*self, n)
    }
}

pub fn undertone_value(wave: UndertoneWave, n: u64) -> Result<u64> {
    if n < wave.branch.first_n() {
        return Err(domain("branch 2 starts at n = 1; x·1 is not a composite"));
    }
    n.checked_mul(6)
        .and_then(|v| v.checked_add(wave.branch.cofactor_base()))
        .and_then(|c| c.checked_mul(wave.x))
        .ok_or(Error::Overflow("undertone value exceeds 64 bits"))
}

/// A composite `value = x · cofactor` struck by wave `(x, branch)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompositeMark {
    pub value: u64,
    pub x: u64,
    pub cofactor: u64,
    pub branch: Branch,
}

impl CompositeMark {
    pub fn seq(&self) -> SeqId {
        SeqId::from_residue(self.value % 6).expect("marks lie on the wheel")
    }
}

/// Which stretch factors instantiate waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WaveSelection {
    /// Prime `x` only; sufficient to strike every composite.
    #[default]
    PrimeOnly,
    /// Every `x ∈ SQ1 ∪ SQ2 \ {1}`, including composite stretch factors.
    Full,
}

impl WaveSelection {
    fn admits(self, x: u64) -> bool {
        match self {
            WaveSelection::PrimeOnly => is_prime(x),
            WaveSelection::Full => true,
        }
    }
}

fn stretch_factors(max_x: u64) -> impl Iterator<Item = u64> {
    (0..).flat_map(|k: u64| [6 * k + 5, 6 * k + 7]).take_while(move |&x| x <= max_x)
}

/// All marks with `lo <= value <= hi`, ordered by value, then `x`, then branch.
pub fn mark_range(lo: u64, hi: u64, selection: WaveSelection) -> Result<Vec<CompositeMark>> {
    if lo < 5 {
        return Err(domain("mark_range requires lo >= 5"));
    }
    if hi < lo {
        return Ok(Vec::new());
    }
    let mut marks = Vec::new();
    for x in stretch_factors(hi / 5).filter(|&x| selection.admits(x)) {
        for branch in [Branch::One, Branch::Two] {
            // first cofactor c ≡ base (mod 6) with x·c >= lo
            let cmin = branch.min_cofactor().max(lo.div_ceil(x));
            let base = branch.cofactor_base();
            let mut c = cmin + (6 + base % 6 - cmin % 6) % 6;
            while let Some(value) = c.checked_mul(x) {
                if value > hi {
                    break;
                }
                marks.push(CompositeMark { value, x, cofactor: c, branch });
                c = match c.checked_add(6) {
                    Some(c) => c,
                    None => break,
                };
            }
        }
    }
    marks.sort_unstable_by_key(|m| (m.value, m.x, m.branch));
    Ok(marks)
}

/// Sorted, distinct values struck by waves of the given selection in `[5, limit]`.
pub fn marked_values(limit: u64, selection: WaveSelection) -> Result<Vec<u64>> {
    if limit < 5 {
        return Ok(Vec::new());
    }
    let mut v: Vec<u64> = mark_range(5, limit, selection)?.into_iter().map(|m| m.value).collect();
    v.dedup();
    Ok(v)
}

/// Mark lists keyed by value, sorted by value.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MarkTable {
    marks: Vec<CompositeMark>,
}

impl MarkTable {
    pub fn all(&self) -> &[CompositeMark] {
        &self.marks
    }

    pub fn for_value(&self, value: u64) -> &[CompositeMark] {
        let lo = self.marks.partition_point(|m| m.value < value);
        let hi = self.marks.partition_point(|m| m.value <= value);
        &self.marks[lo..hi]
    }

    pub fn is_marked(&self, value: u64) -> bool {
        !self.for_value(value).is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SieveStats {
    /// Wheel positions in `[5, limit]`.
    pub wheel_positions: u64,
    /// Wheel positions struck by at least one wave.
    pub composites: u64,
    pub segments: usize,
    pub sieving_primes: usize,
}

#[derive(Debug, Clone)]
pub struct SieveResult {
    pub limit: u64,
    pub primes: Vec<u64>,
    pub marks: Option<MarkTable>,
    pub stats: SieveStats,
    pub elapsed: Duration,
}

impl SieveResult {
    /// Equality ignoring timing.
    pub fn same_output(&self, other: &SieveResult) -> bool {
        self.limit == other.limit
            && self.primes == other.primes
            && self.marks == other.marks
            && self.stats.wheel_positions == other.stats.wheel_positions
            && self.stats.composites == other.stats.composites
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkRetention {
    /// Keep full mark lists when `limit <= MARK_RETENTION_LIMIT`.
    Auto,
    Never,
}

/// Segmented wave sieve over the two wheel sequences.
#[derive(Debug, Clone)]
pub struct Sieve {
    segment_size: usize,
    retention: MarkRetention,
    parallel: bool,
}

impl Default for Sieve {
    fn default() -> Self {
        Sieve { segment_size: DEFAULT_SEGMENT_SIZE, retention: MarkRetention::Auto, parallel: true }
    }
}

impl Sieve {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wheel positions per residue class in one segment; rounded up to a multiple of 64.
    pub fn segment_size(mut self, size: usize) -> Self {
        self.segment_size = size.max(64).div_ceil(64) * 64;
        self
    }

    pub fn retention(mut self, retention: MarkRetention) -> Self {
        self.retention = retention;
        self
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn run(&self, limit: u64) -> Result<SieveResult> {
        let start = Instant::now();
        // index of the largest wheel value ≤ limit must fit, and 6·(idx+1) + 5 must not overflow
        if limit > u64::MAX - 64 {
            return Err(Error::Overflow("sieve limit too close to 2^64"));
        }
        let mut primes: Vec<u64> = [2u64, 3].into_iter().filter(|&p| p <= limit).collect();
        let mut stats = SieveStats::default();
        if limit >= 5 {
            let layout = Layout::new(limit);
            let sieving = sieving_primes(limit)?;
            stats.sieving_primes = sieving.len();
            let waves: Vec<WaveStart> = sieving.iter().map(|&p| WaveStart::new(p)).collect();
            let seg = self.segment_size as u64;
            let nseg = layout.max_index / seg + 1;
            stats.segments = nseg as usize;
            let work = |k: u64| -> Vec<u64> {
                let lo = k * seg;
                let hi = ((k + 1) * seg).min(layout.max_index + 1);
                sieve_segment(&layout, &waves, lo, hi)
            };
            let chunks: Vec<Vec<u64>> = if self.parallel {
                (0..nseg).into_par_iter().map(work).collect()
            } else {
                (0..nseg).map(work).collect()
            };
            let mut positions = 0u64;
            let mut found = 0u64;
            for chunk in chunks {
                found += chunk.len() as u64;
                primes.extend(chunk);
            }
            for seq in [SeqId::Sq1, SeqId::Sq2] {
                if limit >= seq.base() {
                    positions += (limit - seq.base()) / 6 + 1;
                }
            }
            // value 1 is a wheel position but not in [5, limit]
            positions -= 1;
            stats.wheel_positions = positions;
            stats.composites = positions - found;
        }
        let marks = match self.retention {
            MarkRetention::Auto if (5..=MARK_RETENTION_LIMIT).contains(&limit) => {
                Some(MarkTable { marks: mark_range(5, limit, WaveSelection::PrimeOnly)? })
            }
            _ => None,
        };
        Ok(SieveResult { limit, primes, marks, stats, elapsed: start.elapsed() })
    }
}

pub fn primes_up_to(limit: u64) -> Result<SieveResult> {
    Sieve::new().run(limit)
}

/// Primes `5 <= p <= sqrt(limit)`, computed by the same wave model on a smaller range.
fn sieving_primes(limit: u64) -> Result<Vec<u64>> {
    let root = limit.isqrt();
    if root < 5 {
        return Ok(Vec::new());
    }
    let small = Sieve::new().parallel(false).retention(MarkRetention::Never).run(root)?;
    Ok(small.primes.into_iter().filter(|&p| p >= 5).collect())
}

struct Layout {
    limit: u64,
    max_index: u64,
}

impl Layout {
    fn new(limit: u64) -> Self {
        Layout { limit, max_index: (limit - 1) / 6 }
    }
}

/// Per-prime starting data: wheel index of `x²` in each sequence and the index step.
struct WaveStart {
    x: u64,
    // first index ≥ 0 in [SQ1, SQ2] whose value is a multiple of x and ≥ x²
    first: [u64; 2],
}

impl WaveStart {
    fn new(x: u64) -> Self {
        let inv6 = mod_inverse(6 % x, x);
        let first = [SeqId::Sq1, SeqId::Sq2].map(|seq| {
            let b = seq.base() % x;
            // base + 6i ≡ 0 (mod x)  ⇒  i ≡ −base·6⁻¹
            let r = (x - (b * inv6) % x) % x;
            let min_i = (x * x - seq.base()).div_ceil(6);
            if r >= min_i {
                r
            } else {
                r + (min_i - r).div_ceil(x) * x
            }
        });
        WaveStart { x, first }
    }
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}

/// Sieves wheel indices `[lo, hi)` of both sequences; returns unstruck values ≥ 5 in order.
fn sieve_segment(layout: &Layout, waves: &[WaveStart], lo: u64, hi: u64) -> Vec<u64> {
    let len = (hi - lo) as usize;
    let words = len.div_ceil(64);
    let mut bits = [vec![0u64; words], vec![0u64; words]];
    for w in waves {
        for (s, bitmap) in bits.iter_mut().enumerate() {
            let first = w.first[s];
            if first >= hi {
                continue;
            }
            let mut i = if first >= lo {
                first - lo
            } else {
                let k = (lo - first).div_ceil(w.x);
                first + k * w.x - lo
            };
            while i < len as u64 {
                bitmap[(i / 64) as usize] |= 1 << (i % 64);
                i += w.x;
            }
        }
    }
    let mut out = Vec::with_capacity(len / 4);
    for i in 0..len as u64 {
        let idx = lo + i;
        let (word, bit) = ((i / 64) as usize, i % 64);
        // SQ2 value 1 + 6i precedes SQ1 value 5 + 6i
        let v2 = 1 + 6 * idx;
        if idx > 0 && v2 <= layout.limit && bits[1][word] >> bit & 1 == 0 {
            out.push(v2);
        }
        let v1 = 5 + 6 * idx;
        if v1 <= layout.limit && bits[0][word] >> bit & 1 == 0 {
            out.push(v1);
        }
    }
    out
}

/// Classical sieve of Eratosthenes over all integers; independent of the wave model.
pub fn oracle_primes_up_to(limit: u64) -> Result<Vec<u64>> {
    if limit > ORACLE_LIMIT {
        return Err(domain(format!("oracle refuses limit {limit} above {ORACLE_LIMIT}")));
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    Ok(out)
}

/// Smallest composite in SQ1 ∪ SQ2 divisible by the prime `p`, with its cofactor.
pub fn first_occurrence(p: u64) -> Result<(u64, u64, SeqId)> {
    if p < 5 || !is_prime(p) {
        return Err(domain(format!("{p} is not a prime >= 5")));
    }
    let wave = UndertoneWave::new(p, Branch::One)?;
    let a = wave.value(0)?;
    let b = UndertoneWave::new(p, Branch::Two)?.value(1)?;
    let value = a.min(b);
    let seq = SeqId::from_residue(value % 6).expect("wave values lie on the wheel");
    Ok((value, value / p, seq))
}

/// First `count` cofactors of wave `x`, both branches merged in ascending order.
pub fn companion_sequence(x: u64, count: usize) -> Result<Vec<u64>> {
    let one = UndertoneWave::new(x, Branch::One)?;
    let two = UndertoneWave::new(x, Branch::Two)?;
    let (mut n1, mut n2) = (0u64, 1u64);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = one.value(n1)?;
        let b = two.value(n2)?;
        if a < b {
            out.push(a / x);
            n1 += 1;
        } else {
            out.push(b / x);
            n2 += 1;
        }
    }
    Ok(out)
}
