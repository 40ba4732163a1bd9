//! Undertone: a wheel-sieve model of composites over the residue classes
//! `6n + 5` and `6n + 1`, the algebra of their stretched sub-sequences, and
//! numerical tools for the level curves of the Riemann zeta function.
//!
//! Modules, bottom up:
//!
//! * [`wheel`]: the sequences SQ1, SQ2, SQ3 and wheel positions.
//! * [`sieve`]: undertone waves, composite marks and the segmented sieve.
//! * [`atlas`]: sub-sequence names, the derivation graph, coverage and tables.
//! * [`zeta`]: ζ(s), log-Gamma, Riemann–Siegel θ, Hardy Z, zeros, phase and Argand traces.
//! * [`xray`]: level curves `Im ζ = 0` / `Re ζ = 0`, escape classification and line numbering.
//! * [`emit`]: CSV and SVG writers shared by the command-line front end.

pub mod atlas;
pub mod emit;
pub mod error;
pub mod sieve;
pub mod wheel;
pub mod xray;
pub mod zeta;

pub use error::{Error, Result};

/// Library version, echoed in report summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use num_complex::Complex64;
pub use sieve::{
    companion_sequence, first_occurrence, mark_range, oracle_primes_up_to, primes_up_to, Branch, CompositeMark, Sieve,
    SieveResult, UndertoneWave, WaveSelection,
};
pub use wheel::{locate, residue_class, value_of, Residue6, SeqId, WheelIndex};
