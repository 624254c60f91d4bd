//! A planar constant-stretch spanner of the unit disk graph.
//!
//! The construction keeps exactly the Delaunay edges of length at most 1:
//! a straight-line planar subgraph of the disk graph that in practice
//! stretches distances by well under the factor 4 this crate relies on.
//! Because that factor is a property of the point set, `build_spanner`
//! verifies connectivity and the 4-spanner ratio exhaustively on every
//! instance and errors out instead of silently accepting a violation.

use std::collections::HashSet;

use delaunator::{triangulate, Point};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{dijkstra, dijkstra_adj, ShortestPaths, UnitDiskGraph, VertexId};

/// Delaunay structure of a vertex subset, on global ids. Also the basis
/// for the balanced separators of the decomposition module, which needs
/// the edges longer than 1 (not part of the spanner) and the hull.
#[derive(Debug, Clone)]
pub(crate) struct RegionTriangulation {
    /// All Delaunay edges (u < v), sorted; includes edges longer than 1.
    pub edges: Vec<(VertexId, VertexId)>,
    /// Convex hull in counterclockwise order (for degenerate inputs: the
    /// collinear order).
    pub hull: Vec<VertexId>,
    /// True when the sites admitted no triangle (one or two sites, or all
    /// collinear); `edges` is then the consecutive pairs of the line.
    pub degenerate: bool,
}

/// Triangulates the sites of `region` (global vertex ids of `g`).
/// Coincident sites cannot be triangulated faithfully and are rejected.
pub(crate) fn triangulate_region(
    g: &UnitDiskGraph,
    region: &[VertexId],
) -> Result<RegionTriangulation> {
    let mut by_pos: Vec<VertexId> = region.to_vec();
    by_pos.sort_unstable_by(|&a, &b| {
        let sa = g.site(a);
        let sb = g.site(b);
        (sa.x, sa.y, a).partial_cmp(&(sb.x, sb.y, b)).unwrap()
    });
    for w in by_pos.windows(2) {
        let (a, b) = (g.site(w[0]), g.site(w[1]));
        if a.x == b.x && a.y == b.y {
            return Err(Error::DegenerateInput(format!(
                "sites {} and {} coincide at ({}, {})",
                w[0], w[1], a.x, a.y
            )));
        }
    }

    let points: Vec<Point> = region
        .iter()
        .map(|&v| {
            let s = g.site(v);
            Point { x: s.x, y: s.y }
        })
        .collect();
    let tri = triangulate(&points);

    if tri.triangles.is_empty() {
        // One or two sites, or all collinear: the spanning structure is
        // the path along the (lexicographically sorted) line.
        let edges = by_pos
            .windows(2)
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .collect();
        return Ok(RegionTriangulation {
            edges,
            hull: by_pos,
            degenerate: true,
        });
    }

    let mut set = HashSet::with_capacity(tri.triangles.len());
    for t in tri.triangles.chunks(3) {
        for &(i, j) in &[(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            let (u, v) = (region[i], region[j]);
            set.insert((u.min(v), u.max(v)));
        }
    }
    let mut edges: Vec<(VertexId, VertexId)> = set.into_iter().collect();
    edges.sort_unstable();
    let hull = tri.hull.into_iter().map(|i| region[i]).collect();
    Ok(RegionTriangulation {
        edges,
        hull,
        degenerate: false,
    })
}

/// A verified planar spanner of the unit disk graph.
#[derive(Debug, Clone)]
pub struct PlanarSpanner {
    /// Spanner edges `(u, v, weight)` with `u < v`, sorted.
    pub edges: Vec<(VertexId, VertexId, f64)>,
    /// Adjacency lists indexed by vertex id, sorted by neighbor.
    adj: Vec<Vec<(VertexId, f64)>>,
    /// Measured stretch: max over pairs of d_H / d_G.
    pub ratio: f64,
    /// Weighted diameter of the spanner (at most 4 D).
    pub diam: f64,
}

impl PlanarSpanner {
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.adj[v as usize]
    }

    pub fn adjacency(&self) -> &[Vec<(VertexId, f64)>] {
        &self.adj
    }

    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<f64> {
        let list = &self.adj[u as usize];
        list.binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| list[i].1)
    }

    /// Single-source shortest paths in the spanner, optionally truncated.
    pub fn shortest_paths(&self, source: VertexId, radius: f64) -> ShortestPaths {
        dijkstra_adj(&self.adj, source, None, radius)
    }

    /// Debug dump: one `u v w` line per edge.
    pub fn dump(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        for &(u, v, w) in &self.edges {
            let _ = writeln!(out, "{u} {v} {w}");
        }
        out
    }
}

/// Builds the spanner and verifies its contract: subgraph of the disk
/// graph, connected, and stretch ratio at most 4 (checked against
/// all-pairs shortest paths on both graphs).
pub fn build_spanner(g: &UnitDiskGraph) -> Result<PlanarSpanner> {
    let n = g.n();
    let region: Vec<VertexId> = (0..n as VertexId).collect();
    let tri = triangulate_region(g, &region)?;

    let mut edges = Vec::new();
    let mut adj: Vec<Vec<(VertexId, f64)>> = vec![Vec::new(); n];
    for &(u, v) in &tri.edges {
        // Restrict to unit-length edges; weights come from the host graph
        // so the subgraph property holds by construction.
        let Some(w) = g.edge_weight(u, v) else {
            continue;
        };
        edges.push((u, v, w));
        adj[u as usize].push((v, w));
        adj[v as usize].push((u, w));
    }
    for list in &mut adj {
        list.sort_unstable_by_key(|&(v, _)| v);
    }

    // Connectivity and exact stretch verification.
    let per_source: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|s| {
            let dh = dijkstra_adj(&adj, s as VertexId, None, f64::INFINITY);
            let dg = dijkstra(g, s as VertexId, None);
            let mut worst = 1.0f64;
            let mut ecc = 0.0f64;
            for t in 0..n {
                if t == s {
                    continue;
                }
                ecc = ecc.max(dh.dist[t]);
                if dh.dist[t].is_finite() {
                    worst = worst.max(dh.dist[t] / dg.dist[t]);
                } else {
                    worst = f64::INFINITY;
                }
            }
            (worst, ecc)
        })
        .collect();
    let ratio = per_source.iter().map(|&(r, _)| r).fold(1.0, f64::max);
    let diam = per_source.iter().map(|&(_, e)| e).fold(0.0, f64::max);
    if !ratio.is_finite() {
        return Err(Error::SpannerPropertyViolated(
            "spanner is disconnected".into(),
        ));
    }
    if ratio > 4.0 {
        return Err(Error::SpannerPropertyViolated(format!(
            "stretch ratio {ratio} exceeds 4"
        )));
    }
    Ok(PlanarSpanner {
        edges,
        adj,
        ratio,
        diam,
    })
}
