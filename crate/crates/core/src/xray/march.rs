//! Marching squares over a sampled field, chain linking and vertex polishing.

use super::grid::{sample_block, Field, GridSpec};
use crate::error::{Error, Result};
use crate::zeta::{zeta, DEFAULT_TOL};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt;

/// Every polished vertex satisfies `|Im ζ| <= CURVE_TOL` (thick) or `|Re ζ| <= CURVE_TOL` (thin).
pub const CURVE_TOL: f64 = 1e-8;

const POLISH_ITERATIONS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    /// `Im ζ = 0`
    Thick,
    /// `Re ζ = 0`
    Thin,
}

impl Parity {
    pub fn level(self, z: Complex64) -> f64 {
        match self {
            Parity::Thick => z.im,
            Parity::Thin => z.re,
        }
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            Parity::Thick => "thick",
            Parity::Thin => "thin",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where an open curve ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Left,
    Right,
    Bottom,
    Top,
    /// Next to the masked pole cell or an unresolved cell.
    Interior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelCurve {
    pub parity: Parity,
    /// `(σ, t)` vertices; open curves start at the end with the smaller σ.
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
    /// End locations of an open curve (`[start, end]`); meaningless when closed.
    pub ends: [Boundary; 2],
    pub escapes_right: bool,
    pub asym_index: Option<i64>,
    /// The grid boundary cut the curve before escape could be decided.
    pub indeterminate: bool,
    /// Line numbers of this curve's crossings of the reference line, in t order.
    pub labels: Vec<u32>,
}

impl LevelCurve {
    fn new(parity: Parity, points: Vec<(f64, f64)>, closed: bool, ends: [Boundary; 2]) -> Self {
        LevelCurve {
            parity,
            points,
            closed,
            ends,
            escapes_right: false,
            asym_index: None,
            indeterminate: false,
            labels: Vec::new(),
        }
    }

    pub fn sigma_range(&self) -> (f64, f64) {
        self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)))
    }

    pub fn t_range(&self) -> (f64, f64) {
        self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)))
    }
}

/// A spot the tracer could not resolve; numbering stops below the lowest one.
#[derive(Debug, Clone, PartialEq)]
pub struct Gap {
    pub sigma: f64,
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceResult {
    pub curves: Vec<LevelCurve>,
    pub gaps: Vec<Gap>,
}

impl TraceResult {
    pub fn lowest_gap(&self) -> Option<f64> {
        self.gaps.iter().map(|g| g.t).fold(None, |m, t| Some(m.map_or(t, |m: f64| m.min(t))))
    }
}

type Key = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    /// `(i, j) – (i+1, j)`
    H,
    /// `(i, j) – (i, j+1)`
    V,
}

fn key(i: usize, j: usize, dir: Dir) -> Key {
    ((j as u64) << 25 | (i as u64) << 1) | (dir == Dir::V) as u64
}

fn unkey(k: Key) -> (usize, usize, Dir) {
    let dir = if k & 1 == 1 { Dir::V } else { Dir::H };
    (((k >> 1) & ((1 << 24) - 1)) as usize, (k >> 25) as usize, dir)
}

/// A level crossing on a grid edge, bracketed by the two node values.
#[derive(Debug, Clone, Copy)]
struct Vertex {
    sigma: f64,
    t: f64,
    /// Edge end points along the free coordinate and their level values.
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
}

#[derive(Debug, Default)]
struct Segments {
    pairs: Vec<(Key, Key)>,
    vertices: HashMap<Key, Vertex>,
    gaps: Vec<Gap>,
}

fn positive(f: f64) -> bool {
    f >= 0.0
}

fn collect(field: &Field, parity: Parity, out: &mut Segments) -> Result<()> {
    let (nx, ny) = (field.nx(), field.ny());
    let (sig, ts) = (&field.sigmas, &field.ts);
    let off = field.row_offset;
    let level = |i: usize, j: usize| parity.level(field.at(i, j));
    let add_vertex = |out: &mut Segments, i: usize, j: usize, dir: Dir| -> Key {
        let k = key(i, j + off, dir);
        out.vertices.entry(k).or_insert_with(|| {
            let (i2, j2) = match dir {
                Dir::H => (i + 1, j),
                Dir::V => (i, j + 1),
            };
            let (fa, fb) = (level(i, j), level(i2, j2));
            let w = fa / (fa - fb);
            match dir {
                Dir::H => {
                    let (a, b) = (sig[i], sig[i2]);
                    Vertex { sigma: a + w * (b - a), t: ts[j], lo: a, hi: b, f_lo: fa, f_hi: fb }
                }
                Dir::V => {
                    let (a, b) = (ts[j], ts[j2]);
                    Vertex { sigma: sig[i], t: a + w * (b - a), lo: a, hi: b, f_lo: fa, f_hi: fb }
                }
            }
        });
        k
    };
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            if field.is_masked(i, j) {
                continue;
            }
            let s00 = positive(level(i, j));
            let s10 = positive(level(i + 1, j));
            let s01 = positive(level(i, j + 1));
            let s11 = positive(level(i + 1, j + 1));
            let bottom = (s00 != s10).then_some((i, j, Dir::H));
            let right = (s10 != s11).then(|| (i + 1, j, Dir::V));
            let top = (s01 != s11).then(|| (i, j + 1, Dir::H));
            let left = (s00 != s01).then_some((i, j, Dir::V));
            let crossed: Vec<(usize, usize, Dir)> = [bottom, right, top, left].into_iter().flatten().collect();
            match crossed.len() {
                0 => {}
                2 => {
                    let a = add_vertex(out, crossed[0].0, crossed[0].1, crossed[0].2);
                    let b = add_vertex(out, crossed[1].0, crossed[1].1, crossed[1].2);
                    out.pairs.push((a, b));
                }
                _ => {
                    let center = match field.refined_cell(i, j) {
                        Some(c) => c.center(),
                        None => {
                            let s = Complex64::new(0.5 * (sig[i] + sig[i + 1]), 0.5 * (ts[j] + ts[j + 1]));
                            zeta(s, DEFAULT_TOL)?
                        }
                    };
                    let fc = parity.level(center);
                    if fc == 0.0 || !fc.is_finite() {
                        out.gaps.push(Gap {
                            sigma: sig[i],
                            t: ts[j],
                            reason: format!("{parity} saddle cell not resolved by its midpoint"),
                        });
                        continue;
                    }
                    let (b, r, t, l) = (bottom.unwrap(), right.unwrap(), top.unwrap(), left.unwrap());
                    let pairs = if positive(fc) == s00 { [(b, r), (t, l)] } else { [(b, l), (r, t)] };
                    for (p, q) in pairs {
                        let a = add_vertex(out, p.0, p.1, p.2);
                        let c = add_vertex(out, q.0, q.1, q.2);
                        out.pairs.push((a, c));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Refines a vertex along its edge (Illinois false position) until the level is below [`CURVE_TOL`].
fn polish(parity: Parity, dir: Dir, v: &Vertex) -> Result<Option<(f64, f64)>> {
    let point = |x: f64| match dir {
        Dir::H => (x, v.t),
        Dir::V => (v.sigma, x),
    };
    let eval = |x: f64| -> Result<f64> {
        let (s, t) = point(x);
        Ok(parity.level(zeta(Complex64::new(s, t), DEFAULT_TOL)?))
    };
    let (mut a, mut b, mut fa, mut fb) = (v.lo, v.hi, v.f_lo, v.f_hi);
    if fa == 0.0 {
        return Ok(Some(point(a)));
    }
    let mut x = match dir {
        Dir::H => v.sigma,
        Dir::V => v.t,
    };
    let mut side = 0i8;
    for _ in 0..POLISH_ITERATIONS {
        let fx = eval(x)?;
        if fx.abs() <= CURVE_TOL {
            return Ok(Some(point(x)));
        }
        if positive(fx) == positive(fa) {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        let next = (a * fb - b * fa) / (fb - fa);
        x = if next.is_finite() && next > a.min(b) && next < a.max(b) { next } else { 0.5 * (a + b) };
        if (b - a).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            let fx = eval(x)?;
            return Ok((fx.abs() <= CURVE_TOL).then(|| point(x)));
        }
    }
    Ok(None)
}

fn boundary_of(k: Key, nx: usize, ny: usize, masked_or_gap: bool) -> Boundary {
    let (i, j, dir) = unkey(k);
    match dir {
        Dir::V if i == 0 => Boundary::Left,
        Dir::V if i + 1 == nx => Boundary::Right,
        Dir::H if j == 0 && !masked_or_gap => Boundary::Bottom,
        Dir::H if j + 1 == ny && !masked_or_gap => Boundary::Top,
        _ => Boundary::Interior,
    }
}

fn link(parity: Parity, segs: Segments, global: &GridSpec) -> Result<TraceResult> {
    let Segments { pairs, vertices, mut gaps } = segs;
    let mut adjacency: HashMap<Key, [usize; 2]> = HashMap::with_capacity(vertices.len());
    for (n, &(a, b)) in pairs.iter().enumerate() {
        for k in [a, b] {
            let slot = adjacency.entry(k).or_insert([usize::MAX; 2]);
            if slot[0] == usize::MAX {
                slot[0] = n;
            } else {
                slot[1] = n;
            }
        }
    }
    let other = |k: Key, seg: usize| -> Option<usize> {
        let s = adjacency[&k];
        let o = if s[0] == seg { s[1] } else { s[0] };
        (o != usize::MAX).then_some(o)
    };
    let far = |seg: usize, k: Key| if pairs[seg].0 == k { pairs[seg].1 } else { pairs[seg].0 };

    let mut used = vec![false; pairs.len()];
    let mut chains: Vec<(Vec<Key>, bool)> = Vec::new();
    for start in 0..pairs.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = pairs[start];
        let mut forward = vec![a, b];
        let mut closed = false;
        let (mut seg, mut k) = (start, b);
        while let Some(next) = other(k, seg) {
            if used[next] {
                closed = far(next, k) == a || next == start;
                break;
            }
            used[next] = true;
            k = far(next, k);
            seg = next;
            if k == a {
                closed = true;
                break;
            }
            forward.push(k);
        }
        if !closed {
            let mut backward = Vec::new();
            let (mut seg, mut k) = (start, a);
            while let Some(next) = other(k, seg) {
                if used[next] {
                    break;
                }
                used[next] = true;
                k = far(next, k);
                seg = next;
                backward.push(k);
            }
            backward.reverse();
            backward.extend(forward);
            forward = backward;
        }
        chains.push((forward, closed));
    }

    let mut keys: Vec<Key> = vertices.keys().copied().collect();
    keys.sort_unstable();
    let polished: Vec<Result<Option<(f64, f64)>>> =
        keys.par_iter().map(|k| polish(parity, unkey(*k).2, &vertices[k])).collect();
    let mut position: HashMap<Key, (f64, f64)> = HashMap::with_capacity(keys.len());
    for (k, p) in keys.iter().zip(polished) {
        let v = &vertices[k];
        match p? {
            Some(p) => {
                position.insert(*k, p);
            }
            None => {
                gaps.push(Gap {
                    sigma: v.sigma,
                    t: v.t,
                    reason: format!("{parity} vertex did not polish below tolerance"),
                });
                position.insert(*k, (v.sigma, v.t));
            }
        }
    }

    let (nx, ny) = (global.nx, global.ny);
    let mut curves = Vec::with_capacity(chains.len());
    for (chain, closed) in chains {
        let mut points: Vec<(f64, f64)> = chain.iter().map(|k| position[k]).collect();
        let mut ends = [Boundary::Interior; 2];
        if !closed {
            let has_open_neighbour = |k: Key| adjacency[&k][1] == usize::MAX;
            ends = [
                boundary_of(chain[0], nx, ny, !has_open_neighbour(chain[0])),
                boundary_of(chain[chain.len() - 1], nx, ny, !has_open_neighbour(chain[chain.len() - 1])),
            ];
            let (first, last) = (points[0], points[points.len() - 1]);
            if (last.0, last.1) < (first.0, first.1) {
                points.reverse();
                ends.swap(0, 1);
            }
        }
        if points.len() < 2 {
            continue;
        }
        // the real axis itself is a thick line; it is not one of the numbered curves
        if parity == Parity::Thick && global.t_lo == 0.0 && points.iter().all(|p| p.1 == 0.0) {
            continue;
        }
        curves.push(LevelCurve::new(parity, points, closed, ends));
    }
    gaps.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.sigma.total_cmp(&b.sigma)));
    Ok(TraceResult { curves, gaps })
}

/// Level curves of one parity over a sampled field.
pub fn trace_level_curves(field: &Field, parity: Parity) -> Result<TraceResult> {
    let mut segs = Segments::default();
    collect(field, parity, &mut segs)?;
    link(parity, segs, &field.spec)
}

/// Both families over `spec`, sampling `block_rows` rows at a time so the whole
/// field is never held in memory. Returns `(thick, thin)`.
pub fn trace_blocks(spec: &GridSpec, block_rows: usize) -> Result<(TraceResult, TraceResult)> {
    spec.validate()?;
    if spec.nx >= 1 << 23 || spec.ny >= 1 << 38 {
        return Err(Error::Domain("grid too large to index".into()));
    }
    let block_rows = block_rows.max(8);
    let mut thick = Segments::default();
    let mut thin = Segments::default();
    let mut j0 = 0;
    while j0 + 1 < spec.ny {
        let j1 = (j0 + block_rows).min(spec.ny - 1);
        let rows = j1 - j0 + 1;
        let field = sample_block(spec, j0, rows)?;
        collect(&field, Parity::Thick, &mut thick)?;
        collect(&field, Parity::Thin, &mut thin)?;
        j0 = j1;
    }
    Ok((link(Parity::Thick, thick, spec)?, link(Parity::Thin, thin, spec)?))
}
