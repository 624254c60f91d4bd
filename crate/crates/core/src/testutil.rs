//! Helpers shared by the unit tests: tiny instance builders and
//! independent shortest-path oracles that deliberately avoid the
//! production code paths they are used to check.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Site, UnitDiskGraph, VertexId};

/// `n` sites uniform in a `side x side` square. No connectivity guarantee;
/// callers retry with another seed when construction fails.
pub fn random_sites(n: usize, side: f64, seed: u64) -> Vec<Site> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|id| Site {
            id: id as VertexId,
            x: rng.random_range(0.0..side),
            y: rng.random_range(0.0..side),
        })
        .collect()
}

/// Keeps drawing seeds until the unit disk graph is connected.
pub fn random_connected(n: usize, side: f64, seed: u64) -> UnitDiskGraph {
    for attempt in 0..200 {
        if let Ok(g) = UnitDiskGraph::build(&random_sites(n, side, seed ^ (attempt * 0x9e37_79b9)))
        {
            return g;
        }
    }
    panic!("no connected instance for n={n} side={side} seed={seed}");
}

/// `n` sites on a line with the given spacing: the path P_n when
/// `spacing <= 1 < 2 * spacing`.
pub fn line_sites(n: usize, spacing: f64) -> Vec<Site> {
    (0..n)
        .map(|id| Site {
            id: id as VertexId,
            x: id as f64 * spacing,
            y: 0.0,
        })
        .collect()
}

/// Bellman-Ford distances from `source`: an independent oracle for the
/// Dijkstra implementation.
pub fn bellman_ford(g: &UnitDiskGraph, source: VertexId) -> Vec<f64> {
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    dist[source as usize] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for u in 0..n {
            if dist[u].is_infinite() {
                continue;
            }
            for &(v, w) in g.neighbors(u as VertexId) {
                if dist[u] + w < dist[v as usize] {
                    dist[v as usize] = dist[u] + w;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}
