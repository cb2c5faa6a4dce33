//! Arc diagrams of `r_k < s_k` pairs: `u`-vectors, gap classes, free and
//! isolated arcs, spanning sets and the exponent conditions they feed.

mod config;
mod exponents;
mod reduce;
mod spanning;
mod vectors;

pub use config::{
    enumerate_configurations, equivalence_classes, Endpoint, PairConfiguration,
    MAX_ENUMERATION_N,
};
pub use exponents::{convergence_exponents, ExponentMode, ExponentReport};
pub use reduce::{
    connected_components, remove_isolated_intervals, Component, IsolatedReduction, RemovalStep,
};
pub use spanning::{
    build_spanning_sets, enumerate_m_assignments, find_admissible_pair, AdmissiblePair,
    MAssignment, SpanningWitness,
};
pub use vectors::{
    classify_gaps, compute_u_vectors, find_free_variables, find_isolated_intervals,
    integer_rank, lemma_gap_sets, same_span, unit_vectors, verify_span, FreeVariables, GapKind,
    LemmaGapSets, UVector,
};
