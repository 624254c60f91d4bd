//! Clustering for arbitrary-density instances and the low-diameter
//! routing scheme built on it.
//!
//! A grid of side `eps / sqrt(2)` partitions the sites; the lowest-id
//! site of each nonempty cell becomes a cluster vertex (the set `R`), so
//! every vertex sits within distance `eps` of its representative. Adding
//! one bridging edge per pair of cells joined by a disk edge yields the
//! backbone set `Z` whose induced disk graph approximates all original
//! distances up to a `1 + O(eps)` factor and `O(eps)` additive slack.
//!
//! Routing: cluster vertices store a shortest-path tree of `DG(Z)` rooted
//! at themselves, satellites embed their representative's label. A packet
//! for target `t` hops to the source's representative, climbs the tree
//! rooted at `t`'s representative (read from the target label: routing
//! stays headerless), and finishes with one direct hop, for stretch
//! `1 + 64 eps`.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::bits::{BitReader, BitWriter, LEN_BITS};
use crate::error::{Error, Result};
use crate::geometry::{dijkstra, Broadcast, Port, UnitDiskGraph, VertexId};
use crate::tree::RootedTree;

/// The cluster / backbone vertex sets of one graph (or cluster subgraph).
#[derive(Debug, Clone)]
pub struct ClusterSets {
    pub eps: f64,
    /// Cluster vertices: one lowest-id representative per nonempty grid
    /// cell, sorted.
    pub r: Vec<VertexId>,
    /// Backbone: `R` plus one bridging edge's endpoints per cell pair,
    /// sorted; `R` is a subset.
    pub z: Vec<VertexId>,
    /// Representative of each vertex's cell; identity on `R`.
    pub rep: HashMap<VertexId, VertexId>,
}

impl ClusterSets {
    pub fn rep_of(&self, v: VertexId) -> VertexId {
        self.rep[&v]
    }

    pub fn in_r(&self, v: VertexId) -> bool {
        self.r.binary_search(&v).is_ok()
    }

    pub fn in_z(&self, v: VertexId) -> bool {
        self.z.binary_search(&v).is_ok()
    }
}

fn grid_cell(x: f64, y: f64, side: f64) -> (i64, i64) {
    ((x / side).floor() as i64, (y / side).floor() as i64)
}

/// Gao-Zhang style cluster construction over the whole graph.
pub fn build_rz(g: &UnitDiskGraph, eps: f64) -> Result<ClusterSets> {
    let region: Vec<VertexId> = (0..g.n() as VertexId).collect();
    build_rz_region(g, &region, eps)
}

/// Cluster construction restricted to an induced connected subgraph.
pub(crate) fn build_rz_region(
    g: &UnitDiskGraph,
    region: &[VertexId],
    eps: f64,
) -> Result<ClusterSets> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    let side = eps / std::f64::consts::SQRT_2;

    // Lowest-id representative per nonempty cell.
    let mut cell_rep: HashMap<(i64, i64), VertexId> = HashMap::new();
    for &v in region {
        let s = g.site(v);
        let cell = grid_cell(s.x, s.y, side);
        cell_rep
            .entry(cell)
            .and_modify(|r| *r = (*r).min(v))
            .or_insert(v);
    }
    let mut rep = HashMap::with_capacity(region.len());
    for &v in region {
        let s = g.site(v);
        rep.insert(v, cell_rep[&grid_cell(s.x, s.y, side)]);
    }
    let mut r: Vec<VertexId> = cell_rep.values().copied().collect();
    r.sort_unstable();

    // One bridge per unordered pair of cells joined by a disk edge: the
    // lexicographically smallest endpoint pair.
    let in_region: HashSet<VertexId> = region.iter().copied().collect();
    let mut bridges: HashMap<((i64, i64), (i64, i64)), (VertexId, VertexId)> = HashMap::new();
    for &u in region {
        let su = g.site(u);
        let cu = grid_cell(su.x, su.y, side);
        for &(v, _) in g.neighbors(u) {
            if v <= u || !in_region.contains(&v) {
                continue;
            }
            let sv = g.site(v);
            let cv = grid_cell(sv.x, sv.y, side);
            if cu == cv {
                continue;
            }
            let (key, pair) = if cu < cv {
                ((cu, cv), (u, v))
            } else {
                ((cv, cu), (u, v))
            };
            bridges
                .entry(key)
                .and_modify(|best| {
                    if pair < *best {
                        *best = pair;
                    }
                })
                .or_insert(pair);
        }
    }
    let mut z: Vec<VertexId> = r.clone();
    for &(u, v) in bridges.values() {
        z.push(u);
        z.push(v);
    }
    z.sort_unstable();
    z.dedup();

    Ok(ClusterSets { eps, r, z, rep })
}

/// Routing label of the low-diameter scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct LowDiamLabel {
    pub self_id: VertexId,
    /// True iff this vertex is a cluster vertex (member of `R`).
    pub b: bool,
    /// Cluster vertices only: edges of the shortest-path tree of `DG(Z)`
    /// rooted at `self_id`, stored as `(u, v, parent_is_u)`, sorted.
    pub tree_edges: Vec<(VertexId, VertexId, bool)>,
    /// This vertex's representative (itself for cluster vertices).
    pub rep_id: VertexId,
    /// Satellites only: the full label of the representative.
    pub embedded: Option<Box<LowDiamLabel>>,
}

impl LowDiamLabel {
    /// The tree this label lets packets climb: the embedded
    /// representative tree for satellites, the vertex's own otherwise.
    fn routing_tree(&self) -> (&[(VertexId, VertexId, bool)], VertexId) {
        match &self.embedded {
            Some(inner) => (&inner.tree_edges, inner.self_id),
            None => (&self.tree_edges, self.self_id),
        }
    }

    /// Exact encoded size in bits.
    pub fn bit_len(&self, id_bits: u32) -> usize {
        let mut bits = id_bits as usize + 1;
        if self.b {
            bits += LEN_BITS as usize + self.tree_edges.len() * (2 * id_bits as usize + 1);
        } else {
            bits += id_bits as usize + self.embedded.as_ref().unwrap().bit_len(id_bits);
        }
        bits
    }

    pub fn encode(&self, w: &mut BitWriter, id_bits: u32) {
        w.put(self.self_id as u64, id_bits);
        w.put_bool(self.b);
        if self.b {
            w.put(self.tree_edges.len() as u64, LEN_BITS);
            for &(u, v, parent_is_u) in &self.tree_edges {
                w.put(u as u64, id_bits);
                w.put(v as u64, id_bits);
                w.put_bool(parent_is_u);
            }
        } else {
            w.put(self.rep_id as u64, id_bits);
            self.embedded.as_ref().unwrap().encode(w, id_bits);
        }
    }

    pub fn decode(r: &mut BitReader, id_bits: u32) -> Result<Self> {
        let self_id = r.get(id_bits)? as VertexId;
        let b = r.get_bool()?;
        if b {
            let len = r.get(LEN_BITS)? as usize;
            let mut tree_edges = Vec::with_capacity(len);
            for _ in 0..len {
                let u = r.get(id_bits)? as VertexId;
                let v = r.get(id_bits)? as VertexId;
                let parent_is_u = r.get_bool()?;
                tree_edges.push((u, v, parent_is_u));
            }
            Ok(LowDiamLabel {
                self_id,
                b,
                tree_edges,
                rep_id: self_id,
                embedded: None,
            })
        } else {
            let rep_id = r.get(id_bits)? as VertexId;
            let embedded = LowDiamLabel::decode(r, id_bits)?;
            if !embedded.b {
                return Err(Error::Parse(
                    "satellite label embeds another satellite label".into(),
                ));
            }
            Ok(LowDiamLabel {
                self_id,
                b,
                tree_edges: Vec::new(),
                rep_id,
                embedded: Some(Box::new(embedded)),
            })
        }
    }
}

/// The preprocessed low-diameter scheme: cluster sets plus all labels.
#[derive(Debug, Clone)]
pub struct LowDiamScheme {
    pub cluster: ClusterSets,
    pub labels: HashMap<VertexId, LowDiamLabel>,
}

/// Builds the low-diameter labels for the whole graph.
pub fn build_lowdiam_labels(g: &UnitDiskGraph, eps: f64) -> Result<LowDiamScheme> {
    let region: Vec<VertexId> = (0..g.n() as VertexId).collect();
    build_lowdiam_labels_region(g, &region, eps)
}

/// Region-restricted variant used per cluster by the hierarchical scheme.
pub(crate) fn build_lowdiam_labels_region(
    g: &UnitDiskGraph,
    region: &[VertexId],
    eps: f64,
) -> Result<LowDiamScheme> {
    let cluster = build_rz_region(g, region, eps)?;

    // Induced disk graph on Z as a vertex mask.
    let mut z_mask = vec![false; g.n()];
    for &v in &cluster.z {
        z_mask[v as usize] = true;
    }

    // One shortest-path tree of DG(Z) per cluster vertex.
    let trees: Vec<Result<Vec<(VertexId, VertexId, bool)>>> = cluster
        .r
        .par_iter()
        .map(|&root| {
            let sp = dijkstra(g, root, Some(&z_mask));
            for &v in &cluster.z {
                if sp.dist[v as usize].is_infinite() {
                    return Err(Error::InvariantViolation(format!(
                        "DG(Z) is disconnected: {v} unreachable from {root}"
                    )));
                }
            }
            let tree = RootedTree::from_parents(
                root,
                &cluster.z,
                |v| sp.parent[v as usize],
                |u, v| g.edge_weight(u, v).expect("tree edge is a graph edge"),
            )?;
            let mut edges: Vec<(VertexId, VertexId, bool)> = tree
                .edges()
                .into_iter()
                .map(|(p, c, _)| if p < c { (p, c, true) } else { (c, p, false) })
                .collect();
            edges.sort_unstable();
            Ok(edges)
        })
        .collect();

    let mut rep_labels: HashMap<VertexId, LowDiamLabel> = HashMap::new();
    for (&root, tree) in cluster.r.iter().zip(trees) {
        rep_labels.insert(
            root,
            LowDiamLabel {
                self_id: root,
                b: true,
                tree_edges: tree?,
                rep_id: root,
                embedded: None,
            },
        );
    }

    let mut labels = HashMap::with_capacity(region.len());
    for &v in region {
        let label = match rep_labels.get(&v) {
            Some(lab) => lab.clone(),
            None => {
                let rep = cluster.rep_of(v);
                let inner = rep_labels[&rep].clone();
                LowDiamLabel {
                    self_id: v,
                    b: false,
                    tree_edges: Vec::new(),
                    rep_id: rep,
                    embedded: Some(Box::new(inner)),
                }
            }
        };
        labels.insert(v, label);
    }
    Ok(LowDiamScheme { cluster, labels })
}

/// Which rule produced a hop; exposed so the simulator can check the
/// rule sequence (representative hop, tree climb, direct finish).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiamRule {
    Direct,
    TreeClimb,
    ToRep,
}

/// Per-target routing context: the parent map of the tree rooted at the
/// target's representative, parsed once from the target label. Pure
/// function of `lab_t`, so routing through it is equivalent to parsing
/// inside every [`sigma_diam`] call (covered by a test).
#[derive(Debug, Clone)]
pub struct DiamRouteCtx {
    pub target: VertexId,
    pub root: VertexId,
    parent: HashMap<VertexId, VertexId>,
}

impl DiamRouteCtx {
    pub fn new(lab_t: &LowDiamLabel) -> Self {
        let (edges, root) = lab_t.routing_tree();
        let mut parent = HashMap::with_capacity(edges.len());
        for &(u, v, parent_is_u) in edges {
            let (p, c) = if parent_is_u { (u, v) } else { (v, u) };
            parent.insert(c, p);
        }
        DiamRouteCtx {
            target: lab_t.self_id,
            root,
            parent,
        }
    }

    fn contains(&self, v: VertexId) -> bool {
        v == self.root || self.parent.contains_key(&v)
    }
}

/// Next vertex (with the rule that chose it) for a packet at `lab_s`
/// heading to the target of `ctx`, given that they are not adjacent and
/// not equal.
fn diam_next(ctx: &DiamRouteCtx, lab_s: &LowDiamLabel) -> Result<(VertexId, DiamRule)> {
    let s = lab_s.self_id;
    if ctx.contains(s) {
        // Climb the tree rooted at the target's representative. Standing
        // on the root itself means t' was not adjacent to t - impossible
        // in a well-formed construction.
        let next = ctx.parent.get(&s).copied().ok_or(Error::NotANeighbor {
            at: s,
            chose: ctx.target,
        })?;
        return Ok((next, DiamRule::TreeClimb));
    }
    Ok((lab_s.rep_id, DiamRule::ToRep))
}

/// The routing function: direct hop when adjacent, otherwise climb the
/// target cluster's tree (rule 2) or step to the own representative
/// (rule 3). Returns the chosen port and the rule, for invariant checks.
pub fn sigma_diam_explain(
    lab_s: &LowDiamLabel,
    lab_t: &LowDiamLabel,
    b: &Broadcast,
) -> Result<(Port, DiamRule)> {
    if lab_s.self_id == lab_t.self_id {
        return Err(Error::IncompatibleLabels(
            "low-diameter routing invoked with source == target".into(),
        ));
    }
    if let Some(port) = b.port_checked(lab_t.self_id) {
        return Ok((port, DiamRule::Direct));
    }
    let ctx = DiamRouteCtx::new(lab_t);
    let (next, rule) = diam_next(&ctx, lab_s)?;
    let port = b.port_checked(next).ok_or(Error::NotANeighbor {
        at: lab_s.self_id,
        chose: next,
    })?;
    Ok((port, rule))
}

/// Plain entry point: just the port.
pub fn sigma_diam(lab_s: &LowDiamLabel, lab_t: &LowDiamLabel, b: &Broadcast) -> Result<Port> {
    sigma_diam_explain(lab_s, lab_t, b).map(|(p, _)| p)
}

/// Hot-path variant reusing a parsed per-target context.
pub fn sigma_diam_with(
    ctx: &DiamRouteCtx,
    lab_s: &LowDiamLabel,
    b: &Broadcast,
) -> Result<(Port, DiamRule)> {
    if lab_s.self_id == ctx.target {
        return Err(Error::IncompatibleLabels(
            "low-diameter routing invoked with source == target".into(),
        ));
    }
    if let Some(port) = b.port_checked(ctx.target) {
        return Ok((port, DiamRule::Direct));
    }
    let (next, rule) = diam_next(ctx, lab_s)?;
    let port = b.port_checked(next).ok_or(Error::NotANeighbor {
        at: lab_s.self_id,
        chose: next,
    })?;
    Ok((port, rule))
}
