//! Named structural checks with replayable counterexample dumps.
//!
//! Each component of the pipeline has an exhaustive checker for the
//! properties its correctness argument relies on: the spanner's
//! planarity and stretch ratio, the cover's home containment / overlap /
//! diameter bound, the backbone distance sandwich, the decomposition's
//! partition structure and portal-estimate quality, and tree-label
//! interval consistency. Failures never abort the run; they become
//! report entries carrying a self-contained instance dump that the CLI
//! can replay.
//!
//! Comparisons between two independently accumulated shortest-path sums
//! allow an absolute slack of 1e-9 for float round-off; inequalities
//! where one side is computed over a superset of the other's paths are
//! checked exactly.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::cover::build_cover;
use crate::decomp::build_decomposition;
use crate::error::{Error, Result};
use crate::geometry::{
    dijkstra, dijkstra_adj, write_instance, DistanceOracle, UnitDiskGraph, VertexId,
};
use crate::lowdiam::build_rz;
use crate::spanner::build_spanner;
use crate::tree::{build_tree_labels, tree_next_hop, RootedTree};

/// Slack for comparing independently accumulated float path sums.
const SUM_SLACK: f64 = 1e-9;

/// Overlap budget for the sparse cover (property: constant overlap).
pub const OVERLAP_BUDGET: usize = 32;

/// Portal-estimate additive budget: theta <= d + KAPPA_THETA * eps * D.
pub const KAPPA_THETA_BUDGET: f64 = 8.0;

/// Components the verifier knows how to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Spanner,
    Cover,
    Backbone,
    Decomposition,
    TreeLabels,
}

impl Component {
    pub const ALL: [Component; 5] = [
        Component::Spanner,
        Component::Cover,
        Component::Backbone,
        Component::Decomposition,
        Component::TreeLabels,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Component::Spanner => "spanner",
            Component::Cover => "cover",
            Component::Backbone => "backbone",
            Component::Decomposition => "decomposition",
            Component::TreeLabels => "tree-labels",
        }
    }

    pub fn parse(s: &str) -> Option<Component> {
        Component::ALL.iter().copied().find(|k| k.name() == s)
    }
}

/// A replayable failure witness: the exact instance plus the offending
/// ids and measured numbers.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    /// Instance file content in the harness format (replayable via the
    /// CLI's `verify` subcommand).
    pub instance: String,
    pub detail: String,
}

/// One named property check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub violations: usize,
    /// Measured quantities, budgets, and scope of the check.
    pub details: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl Check {
    fn pass(name: &str, details: String) -> Check {
        Check {
            name: name.into(),
            passed: true,
            violations: 0,
            details,
            counterexample: None,
        }
    }

    fn fail(name: &str, violations: usize, details: String, witness: Counterexample) -> Check {
        Check {
            name: name.into(),
            passed: false,
            violations,
            details,
            counterexample: Some(witness),
        }
    }
}

/// The outcome of a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub instance: String,
    pub n: usize,
    pub eps: f64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// One line per check, for terminal output.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {} — {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.details
            ));
        }
        out
    }
}

fn witness(g: &UnitDiskGraph, detail: String) -> Counterexample {
    Counterexample {
        instance: write_instance(g.sites()),
        detail,
    }
}

/// Runs the named checks for the selected components.
pub fn verify(
    g: &UnitDiskGraph,
    eps: f64,
    components: &[Component],
    instance: &str,
) -> VerifyReport {
    let oracle = DistanceOracle::build(g);
    let mut checks = Vec::new();
    for &c in components {
        match c {
            Component::Spanner => check_spanner(g, &oracle, &mut checks),
            Component::Cover => check_cover(g, eps, &oracle, &mut checks),
            Component::Backbone => check_backbone(g, eps, &oracle, &mut checks),
            Component::Decomposition => check_decomposition(g, eps, &oracle, &mut checks),
            Component::TreeLabels => check_tree_labels(g, &mut checks),
        }
    }
    VerifyReport {
        instance: instance.into(),
        n: g.n(),
        eps,
        checks: checks.into_iter().collect(),
    }
}

/// Strict edge crossing on global ids: shared endpoints are allowed,
/// touching is not a planarity violation for straight-line subgraphs.
fn edges_cross(g: &UnitDiskGraph, a: VertexId, b: VertexId, c: VertexId, d: VertexId) -> bool {
    if a == c || a == d || b == c || b == d {
        return false;
    }
    let p = |v: VertexId| {
        let s = g.site(v);
        (s.x, s.y)
    };
    crate::geometry::segments_cross(p(a), p(b), p(c), p(d))
}

fn check_spanner(g: &UnitDiskGraph, oracle: &DistanceOracle, out: &mut Vec<Check>) {
    let h = match build_spanner(g) {
        Ok(h) => h,
        Err(e) => {
            out.push(Check::fail(
                "spanner-build",
                1,
                format!("construction failed: {e}"),
                witness(g, format!("{e}")),
            ));
            return;
        }
    };

    // Planarity: no two straight-line edges properly cross.
    let mut crossings = 0usize;
    let mut first = None;
    for (i, &(a, b, _)) in h.edges.iter().enumerate() {
        for &(c, d, _) in &h.edges[i + 1..] {
            if edges_cross(g, a, b, c, d) {
                crossings += 1;
                first.get_or_insert((a, b, c, d));
            }
        }
    }
    if crossings == 0 {
        out.push(Check::pass(
            "spanner-planar",
            format!("{} edges, no crossing pair", h.edges.len()),
        ));
    } else {
        let (a, b, c, d) = first.unwrap();
        out.push(Check::fail(
            "spanner-planar",
            crossings,
            format!("{crossings} crossing edge pairs"),
            witness(g, format!("edges ({a},{b}) and ({c},{d}) cross")),
        ));
    }

    // 4-spanner ratio and connectivity, recomputed from scratch.
    let n = g.n();
    let per_source: Vec<(f64, Option<(VertexId, VertexId)>)> = (0..n as VertexId)
        .into_par_iter()
        .map(|s| {
            let sp = dijkstra_adj(h.adjacency(), s, None, f64::INFINITY);
            let mut worst = 1.0f64;
            let mut bad = None;
            for t in 0..n as VertexId {
                if s == t {
                    continue;
                }
                let dg = oracle.d(s, t);
                let dh = sp.dist[t as usize];
                let ratio = dh / dg;
                if !ratio.is_finite() || ratio > 4.0 {
                    bad.get_or_insert((s, t));
                }
                worst = worst.max(ratio);
            }
            (worst, bad)
        })
        .collect();
    let ratio = per_source.iter().fold(1.0f64, |m, &(w, _)| m.max(w));
    match per_source.iter().find_map(|&(_, bad)| bad) {
        None => out.push(Check::pass(
            "spanner-ratio-4",
            format!("measured ratio {ratio:.6} over all pairs"),
        )),
        Some((s, t)) => out.push(Check::fail(
            "spanner-ratio-4",
            per_source.iter().filter(|&&(_, b)| b.is_some()).count(),
            format!("measured ratio {ratio:.6} exceeds 4"),
            witness(g, format!("pair ({s},{t}) stretches beyond 4")),
        )),
    }
}

/// The cover scales the hierarchical scheme would build for this
/// internal eps: 2^k for k0 <= k while 2^k < 4D.
fn cover_radii(eps: f64, diam: f64) -> Vec<f64> {
    let k0 = (8.0 / eps).log2().ceil().max(0.0) as u32;
    let k_max = if diam > 0.0 {
        k0.max((4.0 * diam).log2().ceil() as u32)
    } else {
        k0
    };
    (k0..=k_max)
        .map(|k| 2f64.powi(k as i32))
        .filter(|&r| r < 4.0 * diam)
        .collect()
}

fn check_cover(g: &UnitDiskGraph, eps: f64, oracle: &DistanceOracle, out: &mut Vec<Check>) {
    let h = match build_spanner(g) {
        Ok(h) => h,
        Err(e) => {
            out.push(Check::fail(
                "cover-build",
                1,
                format!("spanner construction failed: {e}"),
                witness(g, format!("{e}")),
            ));
            return;
        }
    };
    let radii = cover_radii(eps, oracle.diameter());
    if radii.is_empty() {
        out.push(Check::pass(
            "cover-home-containment",
            "all scales clamp to a single all-graph cluster".into(),
        ));
        out.push(Check::pass(
            "cover-overlap",
            "single cluster per scale".into(),
        ));
        out.push(Check::pass(
            "cover-diameter-beta",
            "single cluster per scale".into(),
        ));
        return;
    }

    let n = g.n();
    let mut containment_bad = 0usize;
    let mut containment_first = None;
    let mut overlap = 0usize;
    let mut beta = 0.0f64;
    let mut beta_bad = 0usize;
    let mut beta_first = None;

    for &r in &radii {
        let cover = build_cover(&h, r);
        let sets: Vec<HashSet<VertexId>> = cover
            .clusters
            .iter()
            .map(|c| c.iter().copied().collect())
            .collect();

        // Property: the home cluster contains the full spanner ball
        // B_H(v, r), checked by truncated Dijkstra per vertex.
        let bad: Vec<(VertexId, VertexId)> = (0..n as VertexId)
            .into_par_iter()
            .filter_map(|v| {
                let home = &sets[cover.home[v as usize]];
                let sp = dijkstra_adj(h.adjacency(), v, None, r);
                (0..n as VertexId)
                    .find(|&w| sp.dist[w as usize].is_finite() && !home.contains(&w))
                    .map(|w| (v, w))
            })
            .collect();
        containment_bad += bad.len();
        if let Some(&(v, w)) = bad.first() {
            containment_first.get_or_insert((r, v, w));
        }

        // Property: overlap stays constant-bounded.
        let mut count = vec![0usize; n];
        for cluster in &cover.clusters {
            for &v in cluster {
                count[v as usize] += 1;
            }
        }
        overlap = overlap.max(count.into_iter().max().unwrap_or(0));

        // Property: cluster diameters stay within beta * r, beta <= 4,
        // measured on the spanner-induced subgraph.
        for (i, cluster) in cover.clusters.iter().enumerate() {
            let mut mask = vec![false; n];
            for &v in cluster {
                mask[v as usize] = true;
            }
            let d = cluster
                .par_iter()
                .map(|&v| {
                    let sp = dijkstra_adj(h.adjacency(), v, Some(&mask), f64::INFINITY);
                    cluster
                        .iter()
                        .fold(0.0f64, |m, &w| m.max(sp.dist[w as usize]))
                })
                .reduce(|| 0.0, f64::max);
            beta = beta.max(d / r);
            if d > 4.0 * r {
                beta_bad += 1;
                beta_first.get_or_insert((r, i, d));
            }
        }
    }

    if containment_bad == 0 {
        out.push(Check::pass(
            "cover-home-containment",
            format!("exhaustive over {} scales", radii.len()),
        ));
    } else {
        let (r, v, w) = containment_first.unwrap();
        out.push(Check::fail(
            "cover-home-containment",
            containment_bad,
            format!("{containment_bad} spanner-ball vertices escape their home cluster"),
            witness(
                g,
                format!("radius {r}: vertex {w} within distance {r} of {v} but outside its home cluster"),
            ),
        ));
    }

    if overlap <= OVERLAP_BUDGET {
        out.push(Check::pass(
            "cover-overlap",
            format!("max {overlap} clusters per vertex (budget {OVERLAP_BUDGET})"),
        ));
    } else {
        out.push(Check::fail(
            "cover-overlap",
            1,
            format!("max {overlap} clusters per vertex exceeds budget {OVERLAP_BUDGET}"),
            witness(g, format!("overlap {overlap}")),
        ));
    }

    if beta_bad == 0 {
        out.push(Check::pass(
            "cover-diameter-beta",
            format!("measured beta {beta:.6} (bound 4)"),
        ));
    } else {
        let (r, i, d) = beta_first.unwrap();
        out.push(Check::fail(
            "cover-diameter-beta",
            beta_bad,
            format!("measured beta {beta:.6} exceeds 4"),
            witness(g, format!("radius {r}: cluster {i} has diameter {d}")),
        ));
    }
}

fn check_backbone(g: &UnitDiskGraph, eps: f64, oracle: &DistanceOracle, out: &mut Vec<Check>) {
    let cs = match build_rz(g, eps) {
        Ok(cs) => cs,
        Err(e) => {
            out.push(Check::fail(
                "backbone-build",
                1,
                format!("construction failed: {e}"),
                witness(g, format!("{e}")),
            ));
            return;
        }
    };
    let mut z_mask = vec![false; g.n()];
    for &v in &cs.z {
        z_mask[v as usize] = true;
    }

    // d(s,t) <= d_Z(s,t) <= (1 + 12 eps) d(s,t) + 12 eps for s,t in R.
    // The lower bound holds exactly in floats: the unrestricted Dijkstra
    // minimizes over a superset of the restricted run's paths.
    let results: Vec<(usize, Option<(VertexId, VertexId, f64, f64)>)> =
        cs.r.par_iter()
            .map(|&s| {
                let sp = dijkstra(g, s, Some(&z_mask));
                let mut bad = 0usize;
                let mut first = None;
                for &t in &cs.r {
                    let d = oracle.d(s, t);
                    let dz = sp.dist[t as usize];
                    if !(d <= dz && dz <= (1.0 + 12.0 * eps) * d + 12.0 * eps) {
                        bad += 1;
                        first.get_or_insert((s, t, d, dz));
                    }
                }
                (bad, first)
            })
            .collect();
    let bad: usize = results.iter().map(|&(b, _)| b).sum();
    if bad == 0 {
        out.push(Check::pass(
            "backbone-sandwich",
            format!("all {}^2 cluster-vertex pairs", cs.r.len()),
        ));
    } else {
        let (s, t, d, dz) = results.iter().find_map(|&(_, f)| f).unwrap();
        out.push(Check::fail(
            "backbone-sandwich",
            bad,
            format!("{bad} pairs violate the distance sandwich"),
            witness(g, format!("pair ({s},{t}): d={d}, d_Z={dz}, eps={eps}")),
        ));
    }
}

fn check_decomposition(g: &UnitDiskGraph, eps: f64, oracle: &DistanceOracle, out: &mut Vec<Check>) {
    let diam = oracle.diameter();
    let tree = match build_decomposition(g, eps, diam) {
        Ok(t) => t,
        // Below eps * D = 1 the routing scheme never builds a
        // decomposition (it dispatches to the low-diameter labels
        // instead), so there is nothing to violate at this scale.
        Err(Error::EpsilonTooSmall { .. }) => {
            let detail = format!(
                "eps {eps} with diameter {diam:.4} is in the low-diameter regime (eps * D <= 1): no decomposition exists"
            );
            out.push(Check::pass("decomposition-structure", detail.clone()));
            out.push(Check::pass("decomposition-theta", detail));
            return;
        }
        Err(e) => {
            out.push(Check::fail(
                "decomposition-build",
                1,
                format!("construction failed: {e}"),
                witness(g, format!("{e}")),
            ));
            return;
        }
    };
    let n = g.n();

    // Partition structure: regions are connected; children are disjoint,
    // avoid the parent's portals, and cover exactly the rest; small
    // regions are leaves whose portals are all their vertices; every
    // vertex is some node's portal exactly once.
    let mut problems: Vec<String> = Vec::new();
    let leaf_cap = (1.0 / eps).ceil().max(2.0) as usize;
    let mut portal_count = vec![0usize; n];
    for node in &tree.nodes {
        let set: HashSet<VertexId> = node.vertices.iter().copied().collect();
        if node.vertices.is_empty() {
            problems.push(format!("node {} has no vertices", node.id));
            continue;
        }
        let mut mask = vec![false; n];
        for &v in &node.vertices {
            mask[v as usize] = true;
        }
        let sp = dijkstra(g, node.vertices[0], Some(&mask));
        if node
            .vertices
            .iter()
            .any(|&v| !sp.dist[v as usize].is_finite())
        {
            problems.push(format!("node {} region is disconnected", node.id));
        }
        for &p in &node.portals {
            portal_count[p as usize] += 1;
            if !set.contains(&p) {
                problems.push(format!("node {} portal {p} outside its region", node.id));
            }
        }
        if node.vertices.len() <= leaf_cap && !node.is_leaf() {
            problems.push(format!(
                "node {} has {} <= {leaf_cap} vertices but children",
                node.id,
                node.vertices.len()
            ));
        }
        if node.is_leaf() && node.portals != node.vertices {
            problems.push(format!("leaf {} portals differ from its vertices", node.id));
        }
        if !node.is_leaf() {
            let portals: HashSet<VertexId> = node.portals.iter().copied().collect();
            let mut seen: HashMap<VertexId, usize> = HashMap::new();
            for &c in &node.children {
                for &v in &tree.nodes[c].vertices {
                    if portals.contains(&v) {
                        problems.push(format!(
                            "portal {v} of node {} reappears in child {c}",
                            node.id
                        ));
                    }
                    if !set.contains(&v) {
                        problems.push(format!("child {c} vertex {v} outside parent {}", node.id));
                    }
                    if let Some(prev) = seen.insert(v, c) {
                        problems.push(format!(
                            "vertex {v} in children {prev} and {c} of node {}",
                            node.id
                        ));
                    }
                }
            }
            if seen.len() + portals.len() != node.vertices.len() {
                problems.push(format!(
                    "node {}: children cover {} of {} non-portal vertices",
                    node.id,
                    seen.len(),
                    node.vertices.len() - portals.len()
                ));
            }
        }
    }
    for (v, &c) in portal_count.iter().enumerate() {
        if c != 1 {
            problems.push(format!("vertex {v} is a portal of {c} nodes"));
        }
    }
    for v in 0..n as VertexId {
        match tree.owner.get(&v) {
            Some(&node) if tree.nodes[node].portals.contains(&v) => {}
            Some(&node) => problems.push(format!("owner {node} of {v} does not list it as portal")),
            None => problems.push(format!("vertex {v} has no owner")),
        }
    }
    if problems.is_empty() {
        out.push(Check::pass(
            "decomposition-structure",
            format!(
                "{} nodes, height {}, max {} portals",
                tree.nodes.len(),
                tree.height,
                tree.max_portals
            ),
        ));
    } else {
        out.push(Check::fail(
            "decomposition-structure",
            problems.len(),
            format!("{} structural violations", problems.len()),
            witness(g, problems.join("; ")),
        ));
    }

    // Portal-estimate quality against the brute-force oracle.
    let results: Vec<(f64, usize, Option<(VertexId, VertexId, f64, f64)>)> = (0..n as VertexId)
        .into_par_iter()
        .map(|s| {
            let mut worst = 0.0f64;
            let mut bad = 0usize;
            let mut first = None;
            for t in 0..n as VertexId {
                let theta = tree.oracle_theta(s, t);
                let d = oracle.d(s, t);
                if theta < d - SUM_SLACK || theta > d + KAPPA_THETA_BUDGET * eps * diam {
                    bad += 1;
                    first.get_or_insert((s, t, theta, d));
                }
                worst = worst.max((theta - d) / (eps * diam));
            }
            (worst, bad, first)
        })
        .collect();
    let kappa_theta = results.iter().fold(0.0f64, |m, &(w, ..)| m.max(w));
    let bad: usize = results.iter().map(|&(_, b, _)| b).sum();
    if bad == 0 {
        out.push(Check::pass(
            "decomposition-theta",
            format!("measured kappa_theta {kappa_theta:.6} (budget {KAPPA_THETA_BUDGET})"),
        ));
    } else {
        let (s, t, theta, d) = results.iter().find_map(|&(_, _, f)| f).unwrap();
        out.push(Check::fail(
            "decomposition-theta",
            bad,
            format!("{bad} pairs outside [d, d + {KAPPA_THETA_BUDGET} eps D]; measured kappa_theta {kappa_theta:.6}"),
            witness(g, format!("pair ({s},{t}): theta={theta}, d={d}, eps={eps}, D={diam}")),
        ));
    }
}

fn check_tree_labels(g: &UnitDiskGraph, out: &mut Vec<Check>) {
    // Structural check on the shortest-path tree from vertex 0: label
    // intervals must reproduce exact ancestry, and the next-hop rule the
    // unique tree path.
    let sp = dijkstra(g, 0, None);
    let members: Vec<VertexId> = (0..g.n() as VertexId).collect();
    let tree = match RootedTree::from_parents(
        0,
        &members,
        |v| sp.parent[v as usize],
        |p, v| g.edge_weight(p, v).expect("tree edges are graph edges"),
    ) {
        Ok(t) => t,
        Err(e) => {
            out.push(Check::fail(
                "tree-label-build",
                1,
                format!("tree construction failed: {e}"),
                witness(g, format!("{e}")),
            ));
            return;
        }
    };
    let labels = build_tree_labels(&tree);
    let n = g.n();

    // Exact ancestry via parent chains.
    let mut ancestors: Vec<HashSet<VertexId>> = Vec::with_capacity(n);
    for v in 0..n as VertexId {
        let mut set = HashSet::new();
        let mut cur = Some(v);
        while let Some(u) = cur {
            set.insert(u);
            cur = tree.parent_id(u);
        }
        ancestors.push(set);
    }

    let mut bad = 0usize;
    let mut first = None;
    for u in 0..n as VertexId {
        for v in 0..n as VertexId {
            let by_interval = labels[&u].subtree_contains(&labels[&v]);
            let by_parents = ancestors[v as usize].contains(&u);
            if by_interval != by_parents {
                bad += 1;
                first.get_or_insert((u, v));
            }
        }
    }
    // Next-hop agreement along explicit tree paths.
    for s in 0..n as VertexId {
        for t in 0..n as VertexId {
            if s == t {
                continue;
            }
            let path = tree.path_between(s, t);
            match tree_next_hop(&labels[&s], &labels[&t]) {
                Ok(next) if next == path[1] => {}
                _ => {
                    bad += 1;
                    first.get_or_insert((s, t));
                }
            }
        }
    }
    if bad == 0 {
        out.push(Check::pass(
            "tree-label-intervals",
            format!("ancestry and next hops exact on {n} vertices"),
        ));
    } else {
        let (u, v) = first.unwrap();
        out.push(Check::fail(
            "tree-label-intervals",
            bad,
            format!("{bad} interval/next-hop disagreements"),
            witness(g, format!("pair ({u},{v}) disagrees")),
        ));
    }
}

/// Convenience wrapper: all components on a parsed instance.
pub fn verify_all(g: &UnitDiskGraph, eps: f64, instance: &str) -> Result<VerifyReport> {
    Ok(verify(g, eps, &Component::ALL, instance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, GenKind, GenParams};
    use crate::geometry::Site;
    use crate::testutil::{line_sites, random_connected};

    #[test]
    fn all_components_pass_on_a_random_instance() {
        let g = random_connected(90, 4.6, 3);
        let report = verify(&g, 0.25, &Component::ALL, "random");
        assert!(report.passed(), "failures:\n{}", report.summary());
        assert_eq!(report.checks.len(), 9);
        assert!(report.summary().lines().all(|l| l.starts_with("PASS")));
    }

    #[test]
    fn compact_instances_pass_decomposition_checks_vacuously() {
        // A short path has diameter well under 1/eps, so the scheme
        // routes it with low-diameter labels alone; the decomposition
        // checks must report that regime as clean, not as a failure.
        let g = UnitDiskGraph::build(&line_sites(5, 0.8)).unwrap();
        let report = verify(&g, 0.25, &[Component::Decomposition], "p5");
        assert!(report.passed(), "failures:\n{}", report.summary());
        assert_eq!(report.checks.len(), 2);
        for check in &report.checks {
            assert!(check.details.contains("low-diameter regime"));
        }
    }

    #[test]
    fn p5_spanner_check_is_trivially_clean() {
        let g = UnitDiskGraph::build(&line_sites(5, 0.8)).unwrap();
        let report = verify(&g, 1.0, &[Component::Spanner], "p5");
        assert!(report.passed());
        let ratio = &report.checks[1];
        assert_eq!(ratio.name, "spanner-ratio-4");
        assert!(ratio.details.contains("1.000000"));
    }

    #[test]
    fn generated_kinds_pass_structural_checks() {
        for kind in [GenKind::UniformSquare, GenKind::Snake] {
            let inst = generate(kind, 80, 5, &GenParams::default()).unwrap();
            let g = inst.graph().unwrap();
            let report = verify(&g, 0.5, &Component::ALL, &inst.name);
            assert!(report.passed(), "{}:\n{}", inst.name, report.summary());
        }
    }

    #[test]
    fn counterexamples_embed_a_replayable_instance() {
        // A deliberately broken input: coincident sites make the spanner
        // build fail, which must surface as a failed check with a
        // parseable instance dump, not an error.
        let sites = vec![
            Site {
                id: 0,
                x: 0.0,
                y: 0.0,
            },
            Site {
                id: 1,
                x: 0.0,
                y: 0.0,
            },
            Site {
                id: 2,
                x: 0.5,
                y: 0.0,
            },
        ];
        let g = UnitDiskGraph::build(&sites).unwrap();
        let report = verify(&g, 0.5, &[Component::Spanner], "broken");
        assert!(!report.passed());
        let ce = report.checks[0].counterexample.as_ref().unwrap();
        let parsed = crate::geometry::parse_instance(&ce.instance).unwrap();
        assert_eq!(parsed.len(), 3);
        assert!(report.json().contains("counterexample"));
    }

    #[test]
    fn crossing_detector_sees_a_planted_crossing() {
        let sites = vec![
            Site {
                id: 0,
                x: 0.0,
                y: 0.0,
            },
            Site {
                id: 1,
                x: 1.0,
                y: 1.0,
            },
            Site {
                id: 2,
                x: 0.0,
                y: 1.0,
            },
            Site {
                id: 3,
                x: 1.0,
                y: 0.0,
            },
        ];
        let g = UnitDiskGraph::build(&sites).unwrap();
        assert!(edges_cross(&g, 0, 1, 2, 3));
        assert!(!edges_cross(&g, 0, 1, 0, 3));
        assert!(!edges_cross(&g, 0, 2, 1, 3));
    }

    #[test]
    fn component_names_roundtrip() {
        for c in Component::ALL {
            assert_eq!(Component::parse(c.name()), Some(c));
        }
        assert_eq!(Component::parse("nonsense"), None);
    }
}
