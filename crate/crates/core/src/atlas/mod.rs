//! Stretched sub-sequences of SQ1/SQ2 and how they derive from each other.
//!
//! A sub-sequence `SQ b-X` is sequence `b` stretched by the factor `X`: its
//! members are `X·c` for cofactors `c` running through SQ`b` (without the
//! leading 1 of SQ2). The residue of `X` fixes which host sequence the members
//! land in.

mod graph;
mod name;
mod table;

pub use graph::{
    build_derivation_graph, build_graph_with_depth, coverage_check, derive_children, CoverageReport, DerivationEdge,
    DerivationGraph, DerivationNode, NodeClass,
};
pub use name::{subsequence_member, SubseqName};
pub use table::{emit_table, AtlasRow, AtlasTable, RowRole, TableKind, TableParams};
