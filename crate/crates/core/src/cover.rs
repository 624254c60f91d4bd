//! Sparse covers of the planar spanner at a given radius.
//!
//! Centers form a greedy r-net over spanner distances (scanned in id
//! order); each center's cluster is the closed 2r-ball around it. Every
//! vertex's full r-ball then lies inside the cluster of the first center
//! that covers it (its "home"), clusters are connected, and each cluster's
//! induced diameter is at most 4r. How many clusters can share one vertex
//! is not bounded by this construction; the overlap is measured and
//! reported, and only influences label size.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::geometry::{dijkstra_adj, VertexId};
use crate::spanner::PlanarSpanner;

/// A cover of the spanner by overlapping low-diameter clusters.
#[derive(Debug, Clone)]
pub struct SparseCover {
    pub radius: f64,
    /// Net centers in creation (= id) order.
    pub centers: Vec<VertexId>,
    /// Cluster vertex sets aligned with `centers`, each sorted.
    pub clusters: Vec<Vec<VertexId>>,
    /// Index of the cluster guaranteed to contain each vertex's r-ball.
    pub home: Vec<usize>,
    /// Max number of clusters containing any single vertex.
    pub overlap: usize,
    /// Measured diameter constant: max induced cluster diameter over r.
    pub beta: f64,
}

impl SparseCover {
    /// Debug dump: `vertex,cluster` CSV rows for every membership.
    pub fn dump_membership(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("vertex,cluster\n");
        for (i, cluster) in self.clusters.iter().enumerate() {
            for &v in cluster {
                let _ = writeln!(out, "{v},{i}");
            }
        }
        out
    }
}

/// Builds the r-net / 2r-ball cover of the spanner.
pub fn build_cover(h: &PlanarSpanner, r: f64) -> SparseCover {
    assert!(r > 0.0, "cover radius must be positive");
    let n = h.n();
    let adj = h.adjacency();

    let mut nearest_center = vec![f64::INFINITY; n];
    let mut home = vec![usize::MAX; n];
    let mut centers = Vec::new();
    let mut clusters = Vec::new();
    for v in 0..n as VertexId {
        if nearest_center[v as usize] <= r {
            continue;
        }
        let idx = centers.len();
        centers.push(v);
        // One truncated Dijkstra yields both the r-ball (net upkeep and
        // home assignment) and the 2r-ball (the cluster).
        let sp = dijkstra_adj(adj, v, None, 2.0 * r);
        let mut members = Vec::new();
        for u in 0..n {
            let d = sp.dist[u];
            if d.is_finite() {
                members.push(u as VertexId);
                if d <= r {
                    nearest_center[u] = nearest_center[u].min(d);
                    if home[u] == usize::MAX {
                        home[u] = idx;
                    }
                }
            }
        }
        clusters.push(members);
    }
    debug_assert!(home.iter().all(|&i| i != usize::MAX));

    let mut membership = vec![0usize; n];
    for cluster in &clusters {
        for &v in cluster {
            membership[v as usize] += 1;
        }
    }
    let overlap = membership.into_iter().max().unwrap_or(0);

    // Exact induced diameter per cluster: one restricted Dijkstra per
    // member. Balls are prefix-closed under shortest paths, so every run
    // must reach the whole cluster.
    let beta = clusters
        .par_iter()
        .map(|cluster| {
            let mut mask = vec![false; n];
            for &v in cluster {
                mask[v as usize] = true;
            }
            cluster
                .par_iter()
                .map(|&s| {
                    let sp = dijkstra_adj(adj, s, Some(&mask), f64::INFINITY);
                    cluster
                        .iter()
                        .map(|&t| sp.dist[t as usize])
                        .fold(0.0, f64::max)
                })
                .reduce(|| 0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
        / r;

    SparseCover {
        radius: r,
        centers,
        clusters,
        home,
        overlap,
        beta,
    }
}

/// Per-vertex cluster membership lists (cluster indices, ascending),
/// used when assembling hierarchical labels.
pub fn membership_lists(cover: &SparseCover, n: usize) -> HashMap<VertexId, Vec<usize>> {
    let mut lists: HashMap<VertexId, Vec<usize>> = HashMap::with_capacity(n);
    for (i, cluster) in cover.clusters.iter().enumerate() {
        for &v in cluster {
            lists.entry(v).or_default().push(i);
        }
    }
    lists
}
