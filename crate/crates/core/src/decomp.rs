//! Portal decomposition of a unit disk graph.
//!
//! The graph (or a vertex subset of it) is split recursively by balanced
//! separators. Every recursion node keeps a small set of *portals* on its
//! separator, spaced `eps * diam` apart along shortest paths, together
//! with exact distances and shortest-path trees from each portal over the
//! node's region. Descending the tree, any vertex pair shares the portals
//! of every node whose region contains both, and the best detour through
//! a shared portal approximates the true distance to within an additive
//! term proportional to `eps * diam`.
//!
//! Separators come from the planar structure of the region: a
//! shortest-path tree of the restricted Delaunay spanner plus one closing
//! edge yields a fundamental cycle whose two sides are balanced. Unit
//! disk edges may cross such a cycle, so endpoints of crossing edges are
//! absorbed into the separator, and the split is verified before use.
//! Regions too degenerate for that machinery (collinear sites, no
//! balanced cycle) fall back to a median strip of width two, which no
//! unit disk edge can span.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    dijkstra, dijkstra_adj, dijkstra_bounded, segments_cross, UnitDiskGraph, VertexId,
};
use crate::spanner::triangulate_region;
use crate::tree::RootedTree;

/// Exact distances and the shortest-path tree from one portal over the
/// vertices of its decomposition node.
#[derive(Debug, Clone)]
pub struct PortalData {
    pub portal: VertexId,
    /// `dist[i]` is the induced-subgraph distance from the portal to the
    /// node's `vertices[i]`.
    pub dist: Vec<f64>,
    /// Shortest-path tree over the node's region, rooted at the portal.
    pub tree: RootedTree,
}

/// One region of the recursive decomposition.
#[derive(Debug, Clone)]
pub struct DecompNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: usize,
    /// Vertices of the region, sorted ascending.
    pub vertices: Vec<VertexId>,
    /// Portals of this node, sorted ascending; equal to `vertices` on
    /// leaves.
    pub portals: Vec<VertexId>,
    /// Distances and trees per portal, aligned with `portals`.
    pub portal_data: Vec<PortalData>,
    vertex_pos: HashMap<VertexId, usize>,
    child_of: HashMap<VertexId, usize>,
}

impl DecompNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertex_pos.contains_key(&v)
    }

    /// Index of `v` in `vertices` (and in every portal's `dist` array).
    pub fn position_of(&self, v: VertexId) -> Option<usize> {
        self.vertex_pos.get(&v).copied()
    }

    /// Distance from the `i`-th portal to `v` within the region.
    pub fn dist_to_portal(&self, i: usize, v: VertexId) -> f64 {
        self.portal_data[i].dist[self.vertex_pos[&v]]
    }

    /// The child node id whose region contains `v`, if any. Portals of
    /// this node belong to no child.
    pub fn child_containing(&self, v: VertexId) -> Option<usize> {
        self.child_of.get(&v).copied()
    }
}

/// Recursive balanced-separator decomposition with portals.
#[derive(Debug, Clone)]
pub struct DecompositionTree {
    pub nodes: Vec<DecompNode>,
    pub root: usize,
    pub eps: f64,
    /// Diameter of the decomposed graph, fixed for all recursion levels.
    pub diam: f64,
    /// Portal spacing along separator paths: `eps * diam`.
    pub spacing: f64,
    pub height: usize,
    pub max_portals: usize,
    /// For every vertex, the unique node that owns it as a portal.
    pub owner: HashMap<VertexId, usize>,
}

impl DecompositionTree {
    /// The root-to-owner chain of nodes whose regions contain `v`.
    pub fn chain_of(&self, v: VertexId) -> Vec<usize> {
        let mut ids = vec![self.root];
        loop {
            let node = &self.nodes[*ids.last().unwrap()];
            match node.child_of.get(&v) {
                Some(&c) => ids.push(c),
                None => break,
            }
        }
        debug_assert_eq!(*ids.last().unwrap(), self.owner[&v]);
        ids
    }

    /// The portal approximation of the distance from `s` to `t`: the
    /// cheapest two-leg detour through a portal of any node whose region
    /// contains both endpoints. Never below the true distance.
    pub fn oracle_theta(&self, s: VertexId, t: VertexId) -> f64 {
        let mut best = f64::INFINITY;
        let mut id = self.root;
        loop {
            let node = &self.nodes[id];
            let si = node.vertex_pos[&s];
            let ti = node.vertex_pos[&t];
            for pd in &node.portal_data {
                let cand = pd.dist[si] + pd.dist[ti];
                if cand < best {
                    best = cand;
                }
            }
            match (node.child_of.get(&s), node.child_of.get(&t)) {
                (Some(&a), Some(&b)) if a == b => id = a,
                _ => break,
            }
        }
        best
    }

    /// Indented text rendering, one line per node.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.dump_node(self.root, 0, &mut out);
        out
    }

    fn dump_node(&self, id: usize, indent: usize, out: &mut String) {
        let node = &self.nodes[id];
        let pad = "  ".repeat(indent);
        writeln!(
            out,
            "{pad}node {id}: |V| = {}, portals = {:?}",
            node.vertices.len(),
            node.portals
        )
        .unwrap();
        for &c in &node.children {
            self.dump_node(c, indent + 1, out);
        }
    }

    /// Exhaustive structural self-check, run at the end of every build.
    fn verify(&self, g: &UnitDiskGraph, region: &[VertexId]) -> Result<()> {
        let fail = |msg: String| Err(Error::InvariantViolation(msg));
        if self.nodes[self.root].vertices != region {
            return fail("root region does not cover the decomposed vertex set".into());
        }
        for node in &self.nodes {
            let nv = node.vertices.len();
            if nv == 0 || !node.vertices.is_sorted() {
                return fail(format!("node {}: region empty or unsorted", node.id));
            }
            if node.portals.is_empty() || !node.portals.is_sorted() {
                return fail(format!("node {}: portals empty or unsorted", node.id));
            }
            if node.is_leaf() != (node.portals == node.vertices) {
                return fail(format!(
                    "node {}: leaves and only leaves take every vertex as portal",
                    node.id
                ));
            }
            if node.portal_data.len() != node.portals.len()
                || node
                    .portal_data
                    .iter()
                    .zip(&node.portals)
                    .any(|(pd, &p)| pd.portal != p || pd.dist.len() != nv || pd.tree.len() != nv)
            {
                return fail(format!("node {}: portal data misaligned", node.id));
            }
            // portals plus child regions partition the region
            let mut rest: HashSet<VertexId> = node.vertices.iter().copied().collect();
            for &p in &node.portals {
                if !rest.remove(&p) {
                    return fail(format!("node {}: portal {p} outside the region", node.id));
                }
            }
            for &c in &node.children {
                let child = &self.nodes[c];
                if child.parent != Some(node.id) || child.depth != node.depth + 1 {
                    return fail(format!("node {c}: bad parent link"));
                }
                for &v in &child.vertices {
                    if !rest.remove(&v) {
                        return fail(format!(
                            "node {}: vertex {v} of child {c} is not a fresh region vertex",
                            node.id
                        ));
                    }
                    if node.child_of.get(&v) != Some(&c) {
                        return fail(format!("node {}: child index misses vertex {v}", node.id));
                    }
                }
            }
            if !rest.is_empty() {
                return fail(format!(
                    "node {}: {} vertices in no child and not portals",
                    node.id,
                    rest.len()
                ));
            }
            // the region must induce a connected subgraph
            let comps = components(g, &node.vertices);
            if comps.len() != 1 {
                return fail(format!(
                    "node {}: region splits into {} components",
                    node.id,
                    comps.len()
                ));
            }
        }
        for &v in region {
            if !self.owner.contains_key(&v) {
                return fail(format!("vertex {v} is a portal of no node"));
            }
        }
        Ok(())
    }
}

/// Decomposes the whole graph. `diam` must be the exact diameter of `g`;
/// it fixes the portal spacing `eps * diam` at every recursion level.
pub fn build_decomposition(g: &UnitDiskGraph, eps: f64, diam: f64) -> Result<DecompositionTree> {
    let region: Vec<VertexId> = (0..g.n() as VertexId).collect();
    build_decomposition_region(g, &region, eps, diam)
}

/// Decomposes the subgraph induced by `region`, which must be connected;
/// `diam` is the diameter of that subgraph.
pub(crate) fn build_decomposition_region(
    g: &UnitDiskGraph,
    region: &[VertexId],
    eps: f64,
    diam: f64,
) -> Result<DecompositionTree> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    if eps * diam <= 1.0 {
        return Err(Error::EpsilonTooSmall { eps, diam });
    }
    let mut region = region.to_vec();
    region.sort_unstable();
    region.dedup();
    let n = region.len();
    let ctx = BuildCtx {
        g,
        spacing: eps * diam,
        leaf_threshold: std::cmp::max(2, (1.0 / eps).ceil() as usize),
        depth_limit: (4.0 * (n as f64).log2() + 8.0).floor() as usize,
    };
    let mut nodes = Vec::new();
    let root = build_node(&ctx, &mut nodes, region.clone(), None, 0)?;
    let height = nodes.iter().map(|node| node.depth).max().unwrap();
    let max_portals = nodes.iter().map(|node| node.portals.len()).max().unwrap();
    let mut owner = HashMap::new();
    for node in &nodes {
        for &p in &node.portals {
            if owner.insert(p, node.id).is_some() {
                return Err(Error::InvariantViolation(format!(
                    "vertex {p} is a portal of more than one node"
                )));
            }
        }
    }
    let tree = DecompositionTree {
        nodes,
        root,
        eps,
        diam,
        spacing: eps * diam,
        height,
        max_portals,
        owner,
    };
    tree.verify(g, &region)?;
    Ok(tree)
}

struct BuildCtx<'a> {
    g: &'a UnitDiskGraph,
    spacing: f64,
    leaf_threshold: usize,
    depth_limit: usize,
}

/// A separator with its sampled portals; portals lie on the separator.
struct SplitPlan {
    separator: Vec<VertexId>,
    portals: Vec<VertexId>,
}

fn build_node(
    ctx: &BuildCtx,
    nodes: &mut Vec<DecompNode>,
    region: Vec<VertexId>,
    parent: Option<usize>,
    depth: usize,
) -> Result<usize> {
    if depth > ctx.depth_limit {
        return Err(Error::DepthLimitExceeded {
            depth,
            limit: ctx.depth_limit,
        });
    }
    let (portals, child_regions) = if region.len() <= ctx.leaf_threshold {
        (region.clone(), Vec::new())
    } else {
        let plan = match cycle_split(ctx.g, &region, ctx.spacing)? {
            Some(plan) => plan,
            None => median_split(ctx.g, &region, ctx.spacing),
        };
        let sep: HashSet<VertexId> = plan.separator.iter().copied().collect();
        let rest: Vec<VertexId> = region
            .iter()
            .copied()
            .filter(|v| !sep.contains(v))
            .collect();
        let mut child_regions = components(ctx.g, &rest);
        let ports: HashSet<VertexId> = plan.portals.iter().copied().collect();
        let leftover: Vec<VertexId> = plan
            .separator
            .iter()
            .copied()
            .filter(|v| !ports.contains(v))
            .collect();
        child_regions.extend(components(ctx.g, &leftover));
        (plan.portals, child_regions)
    };
    for child in &child_regions {
        if child.len() >= region.len() {
            return Err(Error::InvariantViolation(format!(
                "split produced no progress: child of size {} from region of size {}",
                child.len(),
                region.len()
            )));
        }
    }

    let id = nodes.len();
    nodes.push(DecompNode {
        id,
        parent,
        children: Vec::new(),
        depth,
        vertices: region.clone(),
        portals: portals.clone(),
        portal_data: Vec::new(),
        vertex_pos: region.iter().enumerate().map(|(i, &v)| (v, i)).collect(),
        child_of: HashMap::new(),
    });

    let mut children = Vec::new();
    let mut child_of = HashMap::new();
    for child_region in child_regions {
        let cid = build_node(ctx, nodes, child_region, Some(id), depth + 1)?;
        for &v in &nodes[cid].vertices {
            child_of.insert(v, cid);
        }
        children.push(cid);
    }

    let portal_data = portal_data(ctx.g, &region, &portals)?;
    let node = &mut nodes[id];
    node.children = children;
    node.child_of = child_of;
    node.portal_data = portal_data;
    Ok(id)
}

/// Connected components of the subgraph induced by `members` (sorted),
/// each sorted, ordered by smallest member.
fn components(g: &UnitDiskGraph, members: &[VertexId]) -> Vec<Vec<VertexId>> {
    let set: HashSet<VertexId> = members.iter().copied().collect();
    let mut seen: HashSet<VertexId> = HashSet::new();
    let mut comps = Vec::new();
    for &start in members {
        if seen.contains(&start) {
            continue;
        }
        seen.insert(start);
        let mut comp = Vec::new();
        let mut queue = vec![start];
        while let Some(u) = queue.pop() {
            comp.push(u);
            for &(v, _) in g.neighbors(u) {
                if set.contains(&v) && seen.insert(v) {
                    queue.push(v);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Attempts a balanced fundamental-cycle split. Returns `None` when the
/// region is too degenerate (collinear, spanner not spanning, no balanced
/// candidate, or separation unverifiable), signalling the median
/// fallback.
fn cycle_split(g: &UnitDiskGraph, region: &[VertexId], spacing: f64) -> Result<Option<SplitPlan>> {
    let tri = triangulate_region(g, region)?;
    if tri.degenerate {
        return Ok(None);
    }
    // restricted Delaunay spanner: triangulation edges of length <= 1
    let mut h_adj: Vec<Vec<(VertexId, f64)>> = vec![Vec::new(); g.n()];
    let mut h_edges: HashSet<(VertexId, VertexId)> = HashSet::new();
    for &(u, v) in &tri.edges {
        if let Some(w) = g.edge_weight(u, v) {
            h_adj[u as usize].push((v, w));
            h_adj[v as usize].push((u, w));
            h_edges.insert((u, v));
        }
    }
    let root = region[0];
    let sp = dijkstra_adj(&h_adj, root, None, f64::INFINITY);
    if region.iter().any(|&v| sp.dist[v as usize].is_infinite()) {
        return Ok(None);
    }
    let tree = RootedTree::from_parents(
        root,
        region,
        |v| sp.parent[v as usize],
        |a, b| g.edge_weight(a, b).unwrap(),
    )?;

    // host edges: the triangulation plus a combinatorial fan closing the
    // outer face, rooted at the lowest-id hull vertex
    let mut host: Vec<(VertexId, VertexId)> = tri.edges.clone();
    let k = tri.hull.len();
    if k > 3 {
        let start = tri
            .hull
            .iter()
            .enumerate()
            .min_by_key(|&(_, &v)| v)
            .unwrap()
            .0;
        let h0 = tri.hull[start];
        for i in 2..k - 1 {
            let hi = tri.hull[(start + i) % k];
            host.push((h0.min(hi), h0.max(hi)));
        }
    }
    host.sort_unstable();
    host.dedup();
    let tree_edges: HashSet<(VertexId, VertexId)> = tree
        .edges()
        .iter()
        .map(|&(p, c, _)| (p.min(c), p.max(c)))
        .collect();

    // candidate closing edges, real before virtual, short before long
    let mut cands: Vec<(bool, f64, VertexId, VertexId)> = host
        .iter()
        .filter(|e| !tree_edges.contains(e))
        .map(|&(u, v)| (!h_edges.contains(&(u, v)), g.site(u).dist(g.site(v)), u, v))
        .collect();
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let region_set: HashSet<VertexId> = region.iter().copied().collect();
    for &(_, _, cu, cv) in &cands {
        let cycle = tree.path_between(cu, cv);
        let cycle_set: HashSet<VertexId> = cycle.iter().copied().collect();
        let poly: Vec<(f64, f64)> = cycle
            .iter()
            .map(|&v| {
                let s = g.site(v);
                (s.x, s.y)
            })
            .collect();
        let (side, inside, outside) = classify_sides(g, &tree, region, &cycle_set, &poly);
        if 3 * inside.max(outside) > 2 * region.len() {
            continue;
        }

        // separator: the cycle plus endpoints of disk edges that cross it
        let mut sep: HashSet<VertexId> = cycle_set.clone();
        let mut segs: Vec<((f64, f64), (f64, f64))> =
            poly.windows(2).map(|w| (w[0], w[1])).collect();
        segs.push((*poly.last().unwrap(), poly[0]));
        for &u in region {
            if cycle_set.contains(&u) {
                continue;
            }
            let su = g.site(u);
            for &(v, _) in g.neighbors(u) {
                if v <= u || !region_set.contains(&v) || cycle_set.contains(&v) {
                    continue;
                }
                let sv = g.site(v);
                if segs
                    .iter()
                    .any(|&(a, b)| segments_cross((su.x, su.y), (sv.x, sv.y), a, b))
                {
                    sep.insert(u);
                    sep.insert(v);
                }
            }
        }

        // verify that the separator splits inside from outside; grow it
        // by a neighborhood layer at most twice, then give up
        let mut ok = separation_ok(g, region, &sep, &side);
        for _ in 0..2 {
            if ok {
                break;
            }
            let layer: Vec<VertexId> = sep
                .iter()
                .flat_map(|&u| g.neighbors(u).iter().map(|&(v, _)| v))
                .filter(|v| region_set.contains(v) && !sep.contains(v))
                .collect();
            sep.extend(layer);
            ok = separation_ok(g, region, &sep, &side);
        }
        if !ok {
            return Ok(None);
        }

        // portals: both cycle path halves sampled at the spacing, with
        // the closing-edge endpoints and the meeting vertex always kept
        let (p1, p2) = tree.paths_to_lca(cu, cv);
        let mut portals = Vec::new();
        for path in [&p1, &p2] {
            portals.push(path[0]);
            let mut acc = 0.0;
            for w in path.windows(2) {
                acc += g.edge_weight(w[0], w[1]).unwrap();
                if acc >= spacing {
                    portals.push(w[1]);
                    acc = 0.0;
                }
            }
            portals.push(*path.last().unwrap());
        }
        portals.sort_unstable();
        portals.dedup();

        let mut separator: Vec<VertexId> = sep.into_iter().collect();
        separator.sort_unstable();
        return Ok(Some(SplitPlan { separator, portals }));
    }
    Ok(None)
}

/// Classifies every non-cycle region vertex as inside or outside the
/// cycle polygon. Vertices inherit the side of their shortest-path-tree
/// piece, whose topmost vertex is located geometrically; pieces cannot
/// cross the tree path, so one test per piece suffices.
fn classify_sides(
    g: &UnitDiskGraph,
    tree: &RootedTree,
    region: &[VertexId],
    cycle_set: &HashSet<VertexId>,
    poly: &[(f64, f64)],
) -> (HashMap<VertexId, bool>, usize, usize) {
    let mut side: HashMap<VertexId, bool> = HashMap::new();
    let mut inside = 0;
    let mut outside = 0;
    for &v in region {
        if cycle_set.contains(&v) {
            continue;
        }
        let mut chain = vec![v];
        let mut cur = v;
        let s = loop {
            if let Some(&s) = side.get(&cur) {
                break s;
            }
            match tree.parent_id(cur) {
                Some(p) if !cycle_set.contains(&p) => {
                    chain.push(p);
                    cur = p;
                }
                _ => {
                    let st = g.site(cur);
                    break point_in_polygon((st.x, st.y), poly);
                }
            }
        };
        for u in chain {
            if side.insert(u, s).is_none() {
                if s {
                    inside += 1;
                } else {
                    outside += 1;
                }
            }
        }
    }
    (side, inside, outside)
}

/// Whether every component of the region minus the separator is purely
/// one-sided.
fn separation_ok(
    g: &UnitDiskGraph,
    region: &[VertexId],
    sep: &HashSet<VertexId>,
    side: &HashMap<VertexId, bool>,
) -> bool {
    let rest: Vec<VertexId> = region
        .iter()
        .copied()
        .filter(|v| !sep.contains(v))
        .collect();
    components(g, &rest).iter().all(|comp| {
        let first = side[&comp[0]];
        comp.iter().all(|v| side[v] == first)
    })
}

/// Even-odd point-in-polygon test with the standard half-open ray rule.
fn point_in_polygon(p: (f64, f64), poly: &[(f64, f64)]) -> bool {
    let mut inside = false;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        if (a.1 > p.1) != (b.1 > p.1) {
            let x = a.0 + (p.1 - a.1) * (b.0 - a.0) / (b.1 - a.1);
            if p.0 < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Fallback split: a strip of width two around the median coordinate of
/// the wider axis. No unit disk edge can span the strip, so removing it
/// always separates the two sides; portals are a greedy net over the
/// strip at half the portal spacing.
fn median_split(g: &UnitDiskGraph, region: &[VertexId], spacing: f64) -> SplitPlan {
    let coord = |v: VertexId, use_x: bool| {
        let s = g.site(v);
        if use_x {
            s.x
        } else {
            s.y
        }
    };
    let extent = |use_x: bool| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in region {
            lo = lo.min(coord(v, use_x));
            hi = hi.max(coord(v, use_x));
        }
        hi - lo
    };
    let use_x = extent(true) >= extent(false);
    let mut coords: Vec<f64> = region.iter().map(|&v| coord(v, use_x)).collect();
    coords.sort_by(f64::total_cmp);
    let c = coords[coords.len() / 2];
    let separator: Vec<VertexId> = region
        .iter()
        .copied()
        .filter(|&v| (coord(v, use_x) - c).abs() <= 1.0)
        .collect();
    let portals = net_portals(g, region, &separator, spacing / 2.0);
    SplitPlan { separator, portals }
}

/// Greedy net over `members` in id order: a vertex becomes a portal
/// unless an earlier portal already covers it within `radius` in the
/// induced metric of `region`.
fn net_portals(
    g: &UnitDiskGraph,
    region: &[VertexId],
    members: &[VertexId],
    radius: f64,
) -> Vec<VertexId> {
    let mut mask = vec![false; g.n()];
    for &v in region {
        mask[v as usize] = true;
    }
    let mut covered: HashSet<VertexId> = HashSet::new();
    let mut portals = Vec::new();
    for &v in members {
        if covered.contains(&v) {
            continue;
        }
        portals.push(v);
        let sp = dijkstra_bounded(g, v, Some(&mask), radius);
        for &u in members {
            if sp.dist[u as usize] <= radius {
                covered.insert(u);
            }
        }
    }
    portals
}

/// One restricted Dijkstra per portal, in parallel; every region vertex
/// must be reachable.
fn portal_data(
    g: &UnitDiskGraph,
    region: &[VertexId],
    portals: &[VertexId],
) -> Result<Vec<PortalData>> {
    let mut mask = vec![false; g.n()];
    for &v in region {
        mask[v as usize] = true;
    }
    portals
        .par_iter()
        .map(|&p| {
            let sp = dijkstra(g, p, Some(&mask));
            for &v in region {
                if sp.dist[v as usize].is_infinite() {
                    return Err(Error::InvariantViolation(format!(
                        "region vertex {v} unreachable from portal {p}"
                    )));
                }
            }
            let tree = RootedTree::from_parents(
                p,
                region,
                |v| sp.parent[v as usize],
                |a, b| g.edge_weight(a, b).unwrap(),
            )?;
            let dist = region.iter().map(|&v| sp.dist[v as usize]).collect();
            Ok(PortalData {
                portal: p,
                dist,
                tree,
            })
        })
        .collect()
}
