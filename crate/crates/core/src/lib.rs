//! Compact, headerless routing schemes for unit disk graphs.
//!
//! A routing scheme here is a pair of algorithms: a preprocessing step that
//! assigns every vertex a short label, and a stateless routing function
//! that, standing at a vertex with only the local port broadcast and the
//! source/target labels in hand, picks the outgoing port. The crate builds
//! this up in layers:
//!
//! - [`geometry`]: sites, the unit disk graph, shortest paths, fixed ports
//!   and the broadcast oracle.
//! - [`tree`]: exact routing on trees with `O(log^2 n)`-bit labels.
//! - [`lowdiam`]: constant-slack routing for graphs of bounded diameter
//!   via grid clustering.
//! - [`spanner`]: a planar constant-stretch spanner (restricted Delaunay).
//! - [`cover`]: sparse covers of the spanner at geometrically growing radii.
//! - [`decomp`]: balanced separator decomposition with distance-annotated
//!   portals.
//! - [`additive`]: additive-overshoot routing inside one cluster, built on
//!   the decomposition with quantized distances.
//! - [`hierarchy`]: the full scheme gluing the cover levels together, with
//!   stretch `1 + eps` after calibration.
//! - [`gen`], [`sim`], [`verify`]: instance generators, the routing
//!   simulator with per-hop invariant checks, and exhaustive structural
//!   verification used by the test suite and the CLI.

// Vertex ids double as indices throughout, and one-shot collect targets
// read better with their types spelled out than behind aliases.
#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod additive;
pub mod bits;
pub mod cover;
pub mod decomp;
pub mod error;
pub mod gen;
pub mod geometry;
pub mod hierarchy;
pub mod lowdiam;
pub mod sim;
pub mod spanner;
#[cfg(test)]
pub(crate) mod testutil;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{Broadcast, Port, PortMap, Site, UnitDiskGraph, VertexId};
