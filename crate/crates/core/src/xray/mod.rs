//! Level curves of ζ in a rectangle of the (σ, t) plane.
//!
//! Thick lines are `Im ζ = 0`, thin lines `Re ζ = 0`. The pipeline samples ζ
//! on a grid ([`sample_grid`]), extracts both families by marching squares
//! ([`trace_level_curves`]), decides which thick lines run off to the right
//! ([`classify_escape`]), numbers the lines by their crossings of a vertical
//! reference line ([`assign_numbers`]) and compares the result with a set of
//! published landmarks ([`xray_report`]).

mod classify;
mod grid;
mod march;
mod report;
mod svg;

pub use classify::{
    assign_numbers, classify_escape, far_height, sq_membership, EscapeClass, LabeledLine, Numbering, FAR_SIGMA,
};
pub use grid::{sample_grid, Field, GridSpec, RefinedCell};
pub use march::{trace_blocks, trace_level_curves, Boundary, Gap, LevelCurve, Parity, TraceResult, CURVE_TOL};
pub use report::{
    xray_report, xray_report_with, Horizontal, Landmark, XrayOptions, XrayReport, COVERAGE_NOTE, FAR_TOLERANCE,
    LISTED_SQ3_ESCAPING,
};
pub use svg::render_strips;
