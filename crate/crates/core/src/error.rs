//! Error type shared by every component of the crate.

use thiserror::Error;

/// Errors produced by graph construction, preprocessing, and routing.
#[derive(Debug, Error)]
pub enum Error {
    /// The unit disk graph on the given sites is not connected.
    #[error("unit disk graph is disconnected: {0} components")]
    DisconnectedGraph(usize),

    /// Site identifiers must be exactly 0..n-1 with no repeats.
    #[error("site identifiers are not a permutation of 0..{n}: offending id {id}")]
    DuplicateId { id: u32, n: usize },

    /// The stretch parameter must lie in (0, 1].
    #[error("epsilon {0} outside the accepted range (0, 1]")]
    InvalidEpsilon(f64),

    /// The additive scheme requires eps * D > 1.
    #[error("epsilon {eps} too small for diameter {diam}: need eps * D > 1")]
    EpsilonTooSmall { eps: f64, diam: f64 },

    /// Decomposition recursion exceeded its depth budget.
    #[error("decomposition depth {depth} exceeds limit {limit}")]
    DepthLimitExceeded { depth: usize, limit: usize },

    /// The planar spanner failed a verified property on this instance.
    #[error("spanner property violated: {0}")]
    SpannerPropertyViolated(String),

    /// Geometry too degenerate for the requested construction.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A routing function chose a vertex that is not a neighbor of the
    /// current vertex; this signals an internal consistency violation.
    #[error("routing at {at} chose {chose}, which is not a neighbor")]
    NotANeighbor { at: u32, chose: u32 },

    /// Labels handed to a routing function do not belong together
    /// (different schemes, different instances, or source == target).
    #[error("incompatible labels: {0}")]
    IncompatibleLabels(String),

    /// Additive routing found no portal shared by source and target.
    #[error("no common portal for {s} and {t}")]
    NoCommonPortal { s: u32, t: u32 },

    /// Hierarchical routing found no level whose target cluster contains
    /// the source.
    #[error("no common level for {s} and {t}")]
    NoCommonLevel { s: u32, t: u32 },

    /// Calibration could not reach the target stretch within its retry
    /// budget.
    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    /// An instance generator could not produce a connected graph.
    #[error("generation failed: {0}")]
    GenerationFailed(String),

    /// A simulated route exceeded the step budget.
    #[error("route {s} -> {t} did not terminate within {budget} steps")]
    NonTermination { s: u32, t: u32, budget: usize },

    /// A per-hop invariant failed during simulation.
    #[error("per-hop assertion violated: {0}")]
    AssertionViolation(String),

    /// A structural invariant failed its post-construction self check.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Malformed instance or label-store file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
