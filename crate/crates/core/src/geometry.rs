//! Sites in the plane, the unit disk graph they induce, shortest paths,
//! and the fixed-port broadcast primitive used by every routing function.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex identifier; always in `0..n` for an n-site instance.
pub type VertexId = u32;

/// Port number at a vertex: `0` is the vertex itself, `1..=deg(v)` address
/// the neighbors. The value `n` (the instance size) is the "not a neighbor"
/// sentinel returned by [`Broadcast::beta`].
pub type Port = u32;

/// A point site with its identifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: VertexId,
    pub x: f64,
    pub y: f64,
}

impl Site {
    pub fn dist(&self, other: &Site) -> f64 {
        self.dist2(other).sqrt()
    }

    pub fn dist2(&self, other: &Site) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Unit disk graph over a site set: vertices are sites, an edge joins two
/// sites exactly when their Euclidean distance is at most 1 (compared
/// exactly on squared distances), and every edge is weighted by that
/// distance. Constructed graphs are always connected.
#[derive(Debug, Clone)]
pub struct UnitDiskGraph {
    sites: Vec<Site>,
    /// Adjacency lists sorted by neighbor id; parallel weight = distance.
    adj: Vec<Vec<(VertexId, f64)>>,
    edge_count: usize,
}

impl UnitDiskGraph {
    /// Builds the unit disk graph. Fails if ids are not a permutation of
    /// `0..n` or the resulting graph is disconnected.
    pub fn build(sites: &[Site]) -> Result<Self> {
        let n = sites.len();
        let mut ordered: Vec<Option<Site>> = vec![None; n];
        for s in sites {
            let idx = s.id as usize;
            if idx >= n || ordered[idx].is_some() {
                return Err(Error::DuplicateId { id: s.id, n });
            }
            ordered[idx] = Some(*s);
        }
        let sites: Vec<Site> = ordered.into_iter().map(|s| s.unwrap()).collect();

        // Bucket sites into a unit grid so neighbor candidates come from the
        // 3x3 surrounding cells only.
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, s) in sites.iter().enumerate() {
            grid.entry(cell_of(s)).or_default().push(i);
        }
        let mut adj: Vec<Vec<(VertexId, f64)>> = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (i, s) in sites.iter().enumerate() {
            let (cx, cy) = cell_of(s);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(bucket) = grid.get(&(cx + dx, cy + dy)) else {
                        continue;
                    };
                    for &j in bucket {
                        if j <= i {
                            continue;
                        }
                        let d2 = s.dist2(&sites[j]);
                        if d2 <= 1.0 {
                            let w = d2.sqrt();
                            adj[i].push((j as VertexId, w));
                            adj[j].push((i as VertexId, w));
                            edge_count += 1;
                        }
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(v, _)| v);
        }

        let g = UnitDiskGraph {
            sites,
            adj,
            edge_count,
        };
        let comps = g.component_count();
        if comps != 1 {
            return Err(Error::DisconnectedGraph(comps));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.sites.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site(&self, v: VertexId) -> &Site {
        &self.sites[v as usize]
    }

    /// Neighbors of `v` with edge weights, sorted by neighbor id.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v as usize].len()
    }

    /// Weight of the edge `{u, v}`, or `None` if they are not adjacent.
    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<f64> {
        let list = &self.adj[u as usize];
        list.binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| list[i].1)
    }

    fn component_count(&self) -> usize {
        let n = self.n();
        if n == 0 {
            return 0;
        }
        let mut seen = vec![false; n];
        let mut comps = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            comps += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adj[u] {
                    if !seen[v as usize] {
                        seen[v as usize] = true;
                        stack.push(v as usize);
                    }
                }
            }
        }
        comps
    }
}

fn cell_of(s: &Site) -> (i64, i64) {
    (s.x.floor() as i64, s.y.floor() as i64)
}

/// Result of a single-source shortest-path computation. Unreachable
/// vertices (outside the restriction, or in another component of it) carry
/// `f64::INFINITY` distance and no parent.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub source: VertexId,
    pub dist: Vec<f64>,
    pub parent: Vec<Option<VertexId>>,
}

impl ShortestPaths {
    /// Path from the source to `t` as a vertex sequence, if reachable.
    pub fn path_to(&self, t: VertexId) -> Option<Vec<VertexId>> {
        if self.dist[t as usize].is_infinite() {
            return None;
        }
        let mut path = vec![t];
        let mut cur = t;
        while let Some(p) = self.parent[cur as usize] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: VertexId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want smallest distance
        // first, ties broken toward the smaller id for determinism.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source`, optionally restricted to an induced vertex
/// subset (`mask[v]` true means `v` participates). Relaxation is strict,
/// and the heap breaks distance ties by vertex id, so the parent tree is
/// deterministic for a given adjacency order.
pub fn dijkstra(g: &UnitDiskGraph, source: VertexId, mask: Option<&[bool]>) -> ShortestPaths {
    dijkstra_adj(&g.adj, source, mask, f64::INFINITY)
}

/// Dijkstra truncated at `radius`: vertices farther than `radius` from the
/// source are left unreachable.
pub fn dijkstra_bounded(
    g: &UnitDiskGraph,
    source: VertexId,
    mask: Option<&[bool]>,
    radius: f64,
) -> ShortestPaths {
    dijkstra_adj(&g.adj, source, mask, radius)
}

/// The shared Dijkstra core over explicit adjacency lists; also used for
/// shortest paths on subgraphs such as the planar spanner.
pub fn dijkstra_adj(
    adj: &[Vec<(VertexId, f64)>],
    source: VertexId,
    mask: Option<&[bool]>,
    radius: f64,
) -> ShortestPaths {
    let n = adj.len();
    debug_assert!(mask.is_none_or(|m| m.len() == n && m[source as usize]));
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapEntry { dist: d, vertex: u }) = heap.pop() {
        if done[u as usize] {
            continue;
        }
        done[u as usize] = true;
        for &(v, w) in &adj[u as usize] {
            if let Some(m) = mask {
                if !m[v as usize] {
                    continue;
                }
            }
            let nd = d + w;
            if nd < dist[v as usize] && nd <= radius {
                dist[v as usize] = nd;
                parent[v as usize] = Some(u);
                heap.push(HeapEntry {
                    dist: nd,
                    vertex: v,
                });
            }
        }
    }
    ShortestPaths {
        source,
        dist,
        parent,
    }
}

/// All-pairs shortest-path distances (and parent trees) of a graph,
/// computed by one Dijkstra per vertex in parallel. The workhorse oracle
/// for stretch measurements and exact verification.
#[derive(Debug, Clone)]
pub struct DistanceOracle {
    pub dist: Vec<Vec<f64>>,
    pub parent: Vec<Vec<Option<VertexId>>>,
}

impl DistanceOracle {
    pub fn build(g: &UnitDiskGraph) -> Self {
        use rayon::prelude::*;
        let n = g.n();
        let runs: Vec<ShortestPaths> = (0..n)
            .into_par_iter()
            .map(|s| dijkstra(g, s as VertexId, None))
            .collect();
        let mut dist = Vec::with_capacity(n);
        let mut parent = Vec::with_capacity(n);
        for run in runs {
            dist.push(run.dist);
            parent.push(run.parent);
        }
        DistanceOracle { dist, parent }
    }

    pub fn d(&self, s: VertexId, t: VertexId) -> f64 {
        self.dist[s as usize][t as usize]
    }

    /// Exact (weighted) diameter.
    pub fn diameter(&self) -> f64 {
        self.dist
            .iter()
            .flat_map(|row| row.iter().copied())
            .fold(0.0, f64::max)
    }

    /// Shortest path from `s` to `t` as a vertex sequence.
    pub fn path(&self, s: VertexId, t: VertexId) -> Vec<VertexId> {
        let mut path = vec![t];
        let mut cur = t;
        while cur != s {
            cur = self.parent[s as usize][cur as usize].expect("connected graph");
            path.push(cur);
        }
        path.reverse();
        path
    }
}

/// Exact weighted diameter of a connected unit disk graph.
pub fn diameter(g: &UnitDiskGraph) -> f64 {
    DistanceOracle::build(g).diameter()
}

/// Fixed-port assignment: at each vertex an arbitrary (here: seeded
/// pseudorandom) bijection between ports `1..=deg(v)` and neighbors.
#[derive(Debug, Clone)]
pub struct PortMap {
    /// `by_port[v][p-1]` is the neighbor of `v` behind port `p`.
    by_port: Vec<Vec<VertexId>>,
    /// Inverse: neighbor id -> port at `v`.
    by_neighbor: Vec<HashMap<VertexId, Port>>,
    n: usize,
}

impl PortMap {
    /// Deterministically shuffles every adjacency list with a stream cipher
    /// RNG so two runs with the same seed agree byte for byte.
    pub fn assign(g: &UnitDiskGraph, seed: u64) -> Self {
        let adj: Vec<Vec<VertexId>> = (0..g.n())
            .map(|v| g.neighbors(v as VertexId).iter().map(|&(u, _)| u).collect())
            .collect();
        Self::assign_adjacency(&adj, seed)
    }

    /// Port assignment over explicit adjacency lists (index = vertex id).
    /// Used directly when routing on graphs that are not disk graphs,
    /// e.g. bare trees.
    pub fn assign_adjacency(adj: &[Vec<VertexId>], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = adj.len();
        let mut by_port = Vec::with_capacity(n);
        let mut by_neighbor = Vec::with_capacity(n);
        for list in adj {
            let mut order = list.clone();
            order.shuffle(&mut rng);
            let mut inv = HashMap::with_capacity(order.len());
            for (i, &u) in order.iter().enumerate() {
                inv.insert(u, (i + 1) as Port);
            }
            by_port.push(order);
            by_neighbor.push(inv);
        }
        PortMap {
            by_port,
            by_neighbor,
            n,
        }
    }

    /// The identity port map: port `p` at `v` is its `p`-th neighbor in id
    /// order. Useful as a second assignment for invariance tests.
    pub fn identity(g: &UnitDiskGraph) -> Self {
        let n = g.n();
        let mut by_port = Vec::with_capacity(n);
        let mut by_neighbor = Vec::with_capacity(n);
        for v in 0..n {
            let order: Vec<VertexId> = g.neighbors(v as VertexId).iter().map(|&(u, _)| u).collect();
            let mut inv = HashMap::with_capacity(order.len());
            for (i, &u) in order.iter().enumerate() {
                inv.insert(u, (i + 1) as Port);
            }
            by_port.push(order);
            by_neighbor.push(inv);
        }
        PortMap {
            by_port,
            by_neighbor,
            n,
        }
    }

    /// node(v, p): the vertex reached from `v` through port `p`.
    /// Port 0 is `v` itself.
    pub fn node(&self, v: VertexId, p: Port) -> Option<VertexId> {
        if p == 0 {
            return Some(v);
        }
        self.by_port[v as usize].get(p as usize - 1).copied()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.by_port[v as usize].len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The port at `v` leading to neighbor `w`, if adjacent.
    pub fn port_to(&self, v: VertexId, w: VertexId) -> Option<Port> {
        self.by_neighbor[v as usize].get(&w).copied()
    }
}

/// The broadcast oracle available to a routing function while it sits at
/// vertex `v`: given any vertex id, it answers with the local port leading
/// there, or the sentinel `n` when the id is not a neighbor.
#[derive(Clone, Copy)]
pub struct Broadcast<'a> {
    ports: &'a PortMap,
    v: VertexId,
}

impl<'a> Broadcast<'a> {
    pub fn new(ports: &'a PortMap, v: VertexId) -> Self {
        Broadcast { ports, v }
    }

    pub fn at(&self) -> VertexId {
        self.v
    }

    /// beta_v(w): port of `w` at the current vertex, or `n` if `w` is not
    /// a neighbor (the current vertex itself included).
    pub fn beta(&self, w: VertexId) -> Port {
        match self.ports.port_to(self.v, w) {
            Some(p) => p,
            None => self.ports.n() as Port,
        }
    }

    /// Convenience: `Some(port)` only when `w` really is a neighbor.
    pub fn port_checked(&self, w: VertexId) -> Option<Port> {
        self.ports.port_to(self.v, w)
    }
}

/// Serializes sites in the instance text format: a line with `n`, then one
/// `id x y` line per site. Coordinates use the shortest decimal that round
/// trips to the same f64.
pub fn write_instance(sites: &[Site]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", sites.len());
    for s in sites {
        let _ = writeln!(out, "{} {} {}", s.id, s.x, s.y);
    }
    out
}

/// Parses the instance text format produced by [`write_instance`].
pub fn parse_instance(text: &str) -> Result<Vec<Site>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty instance".into()))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad site count: {e}")))?;
    let mut sites = Vec::with_capacity(n);
    for line in lines {
        let mut parts = line.split_whitespace();
        let id: VertexId = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("short line: {line:?}")))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad id in {line:?}: {e}")))?;
        let x: f64 = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("short line: {line:?}")))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad x in {line:?}: {e}")))?;
        let y: f64 = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("short line: {line:?}")))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad y in {line:?}: {e}")))?;
        if parts.next().is_some() {
            return Err(Error::Parse(format!("trailing tokens in {line:?}")));
        }
        sites.push(Site { id, x, y });
    }
    if sites.len() != n {
        return Err(Error::Parse(format!(
            "header says {n} sites, found {}",
            sites.len()
        )));
    }
    Ok(sites)
}

/// Orientation of the triple (a, b, c) using exact arithmetic:
/// positive for counterclockwise, negative for clockwise, zero for
/// collinear.
pub fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    robust::orient2d(
        robust::Coord { x: a.0, y: a.1 },
        robust::Coord { x: b.0, y: b.1 },
        robust::Coord { x: c.0, y: c.1 },
    )
}

/// Whether segments `ab` and `cd` properly cross: they intersect in a
/// point interior to both. Touching at an endpoint does not count.
pub fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    (o1 > 0.0) != (o2 > 0.0)
        && o1 != 0.0
        && o2 != 0.0
        && (o3 > 0.0) != (o4 > 0.0)
        && o3 != 0.0
        && o4 != 0.0
}

/// Whether segment `ab` intersects segment `cd` at all (shared endpoints
/// and collinear overlap included).
pub fn segments_touch(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if (o1 > 0.0) != (o2 > 0.0)
        && o1 != 0.0
        && o2 != 0.0
        && (o3 > 0.0) != (o4 > 0.0)
        && o3 != 0.0
        && o4 != 0.0
    {
        return true;
    }
    let on = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
        orient(p, q, r) == 0.0
            && r.0 >= p.0.min(q.0)
            && r.0 <= p.0.max(q.0)
            && r.1 >= p.1.min(q.1)
            && r.1 <= p.1.max(q.1)
    };
    on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{bellman_ford, line_sites, random_connected, random_sites};
    use proptest::prelude::*;

    /// P5: five collinear sites spaced 0.8 apart.
    fn p5() -> UnitDiskGraph {
        UnitDiskGraph::build(&line_sites(5, 0.8)).unwrap()
    }

    #[test]
    fn p5_adjacency_and_weights() {
        let g = p5();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edge_count(), 4);
        let degs: Vec<usize> = (0..5).map(|v| g.degree(v)).collect();
        assert_eq!(degs, vec![1, 2, 2, 2, 1]);
        assert_eq!(g.edge_weight(1, 2), Some(0.8));
        assert_eq!(g.edge_weight(0, 2), None); // 1.6 > 1
    }

    #[test]
    fn unit_distance_is_an_edge() {
        // Exactly 1 apart: the closed disk condition keeps the edge.
        let sites = [
            Site {
                id: 0,
                x: 0.0,
                y: 0.0,
            },
            Site {
                id: 1,
                x: 1.0,
                y: 0.0,
            },
        ];
        let g = UnitDiskGraph::build(&sites).unwrap();
        assert_eq!(g.edge_weight(0, 1), Some(1.0));
        // Nudge apart: no edge, graph disconnected.
        let sites = [
            Site {
                id: 0,
                x: 0.0,
                y: 0.0,
            },
            Site {
                id: 1,
                x: 1.0 + 1e-12,
                y: 0.0,
            },
        ];
        assert!(matches!(
            UnitDiskGraph::build(&sites),
            Err(Error::DisconnectedGraph(2))
        ));
    }

    #[test]
    fn duplicate_and_out_of_range_ids_rejected() {
        let sites = [
            Site {
                id: 0,
                x: 0.0,
                y: 0.0,
            },
            Site {
                id: 0,
                x: 0.5,
                y: 0.0,
            },
        ];
        assert!(matches!(
            UnitDiskGraph::build(&sites),
            Err(Error::DuplicateId { id: 0, .. })
        ));
        let sites = [
            Site {
                id: 0,
                x: 0.0,
                y: 0.0,
            },
            Site {
                id: 7,
                x: 0.5,
                y: 0.0,
            },
        ];
        assert!(matches!(
            UnitDiskGraph::build(&sites),
            Err(Error::DuplicateId { id: 7, .. })
        ));
    }

    #[test]
    fn dijkstra_matches_bellman_ford() {
        for seed in 0..50u64 {
            let g = random_connected(60, 4.0, seed);
            for src in [0u32, 17, 59] {
                let sp = dijkstra(&g, src, None);
                let oracle = bellman_ford(&g, src);
                for v in 0..g.n() {
                    assert!(
                        (sp.dist[v] - oracle[v]).abs() <= 1e-9,
                        "seed {seed} src {src} v {v}: {} vs {}",
                        sp.dist[v],
                        oracle[v]
                    );
                }
            }
        }
    }

    #[test]
    fn dijkstra_parents_trace_shortest_paths() {
        let g = random_connected(80, 5.0, 11);
        let sp = dijkstra(&g, 3, None);
        for t in 0..g.n() as VertexId {
            let path = sp.path_to(t).unwrap();
            assert_eq!(path[0], 3);
            assert_eq!(*path.last().unwrap(), t);
            let mut total = 0.0;
            for w in path.windows(2) {
                total += g.edge_weight(w[0], w[1]).expect("path uses graph edges");
            }
            assert!((total - sp.dist[t as usize]).abs() <= 1e-9);
        }
    }

    #[test]
    fn restricted_dijkstra_ignores_masked_vertices() {
        let g = p5();
        // Masking out the middle vertex disconnects the ends.
        let mask = vec![true, true, false, true, true];
        let sp = dijkstra(&g, 0, Some(&mask));
        assert_eq!(sp.dist[1], 0.8);
        assert!(sp.dist[2].is_infinite());
        assert!(sp.dist[3].is_infinite());
        assert!(sp.dist[4].is_infinite());
    }

    #[test]
    fn p5_diameter() {
        let g = p5();
        let d = diameter(&g);
        assert!((d - 3.2).abs() <= 1e-12);
        let oracle = DistanceOracle::build(&g);
        assert!((oracle.d(0, 4) - 3.2).abs() <= 1e-12);
        assert_eq!(oracle.d(2, 2), 0.0);
    }

    #[test]
    fn metric_properties_hold() {
        let g = random_connected(70, 4.0, 5);
        let oracle = DistanceOracle::build(&g);
        let n = g.n();
        for s in 0..n {
            for t in 0..n {
                let d = oracle.dist[s][t];
                // Symmetry and the Euclidean sandwich |st| <= d.
                assert!((d - oracle.dist[t][s]).abs() <= 1e-9);
                assert!(g.site(s as VertexId).dist(g.site(t as VertexId)) <= d + 1e-9);
            }
        }
        // D <= n - 1 since every edge weighs at most 1.
        assert!(oracle.diameter() <= (n - 1) as f64);
    }

    #[test]
    fn ports_are_deterministic_bijections() {
        let g = random_connected(50, 4.0, 2);
        let a = PortMap::assign(&g, 42);
        let b = PortMap::assign(&g, 42);
        let c = PortMap::assign(&g, 43);
        let mut differs = false;
        for v in 0..g.n() as VertexId {
            let deg = g.degree(v);
            assert_eq!(a.degree(v), deg);
            let mut seen: Vec<VertexId> =
                (1..=deg as Port).map(|p| a.node(v, p).unwrap()).collect();
            // Same seed, same assignment.
            for p in 1..=deg as Port {
                assert_eq!(a.node(v, p), b.node(v, p));
            }
            if (1..=deg as Port).any(|p| a.node(v, p) != c.node(v, p)) {
                differs = true;
            }
            // Ports 1..=deg hit each neighbor exactly once.
            seen.sort_unstable();
            let mut expected: Vec<VertexId> = g.neighbors(v).iter().map(|&(u, _)| u).collect();
            expected.sort_unstable();
            assert_eq!(seen, expected);
            assert_eq!(a.node(v, 0), Some(v));
            // Round trip through the inverse.
            for p in 1..=deg as Port {
                let w = a.node(v, p).unwrap();
                assert_eq!(a.port_to(v, w), Some(p));
            }
        }
        assert!(differs, "different seeds should reshuffle some port");
    }

    #[test]
    fn broadcast_answers_ports_and_sentinel() {
        let g = p5();
        let ports = PortMap::assign(&g, 7);
        let b = Broadcast::new(&ports, 2);
        let p1 = b.beta(1);
        let p3 = b.beta(3);
        assert!((1..=2).contains(&p1) && (1..=2).contains(&p3) && p1 != p3);
        assert_eq!(ports.node(2, p1), Some(1));
        assert_eq!(b.beta(0), 5); // not a neighbor: sentinel n
        assert_eq!(b.beta(2), 5); // self: sentinel n
        assert_eq!(b.port_checked(0), None);
    }

    #[test]
    fn instance_roundtrip_examples() {
        let sites = line_sites(5, 0.8);
        let text = write_instance(&sites);
        assert!(text.starts_with("5\n0 0 0\n"));
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, sites);
        assert!(parse_instance("2\n0 0 0\n").is_err());
        assert!(parse_instance("1\n0 0\n").is_err());
        assert!(parse_instance("").is_err());
    }

    #[test]
    fn crossing_predicates() {
        let a = (0.0, 0.0);
        let b = (2.0, 2.0);
        let c = (0.0, 2.0);
        let d = (2.0, 0.0);
        assert!(segments_cross(a, b, c, d));
        // Sharing an endpoint is not a proper crossing but does touch.
        assert!(!segments_cross(a, b, a, c));
        assert!(segments_touch(a, b, a, c));
        // Disjoint parallel segments.
        assert!(!segments_cross(a, c, d, b));
        assert!(!segments_touch(a, c, d, b));
        // Collinear overlap touches without properly crossing.
        assert!(!segments_cross(a, b, (1.0, 1.0), (3.0, 3.0)));
        assert!(segments_touch(a, b, (1.0, 1.0), (3.0, 3.0)));
    }

    proptest! {
        /// Any finite coordinates survive the text round trip exactly:
        /// the writer prints shortest-round-trip decimals.
        #[test]
        fn instance_text_roundtrip(coords in proptest::collection::vec(
            (-1e12f64..1e12, -1e12f64..1e12), 1..40)
        ) {
            let sites: Vec<Site> = coords
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| Site { id: i as VertexId, x, y })
                .collect();
            let text = write_instance(&sites);
            let back = parse_instance(&text).unwrap();
            prop_assert_eq!(back, sites);
        }

        /// The grid-bucketed edge set equals the brute-force edge set.
        #[test]
        fn bucketing_matches_brute_force(seed in 0u64..500) {
            let sites = random_sites(40, 3.0, seed);
            if let Ok(g) = UnitDiskGraph::build(&sites) {
                for i in 0..sites.len() {
                    for j in 0..sites.len() {
                        if i == j { continue; }
                        let expect = sites[i].dist2(&sites[j]) <= 1.0;
                        let got = g
                            .edge_weight(i as VertexId, j as VertexId)
                            .is_some();
                        prop_assert_eq!(expect, got);
                    }
                }
            }
        }
    }
}
