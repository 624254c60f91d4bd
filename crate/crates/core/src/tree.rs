//! Exact routing on rooted trees with compact labels.
//!
//! Every vertex label carries its postorder interval, its parent, the head
//! of its heavy path, and one `(ancestor, next-hop)` pair per light edge on
//! its root path. Next hops are decided from the two labels alone: climb
//! toward the root while the target lies outside the current subtree,
//! otherwise descend along the exit list or the heavy child. Exit lists
//! have at most `log2(m)` entries because subtree sizes at least halve
//! across light edges, so labels take `O(log^2 n)` bits.

use std::collections::HashMap;

use crate::bits::{BitReader, BitWriter, LEN_BITS};
use crate::error::{Error, Result};
use crate::geometry::{Broadcast, Port, VertexId};

const NO_NODE: usize = usize::MAX;

/// A rooted tree over an arbitrary set of vertex ids.
#[derive(Debug, Clone)]
pub struct RootedTree {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    root: usize,
    parent: Vec<usize>,
    parent_weight: Vec<f64>,
    children: Vec<Vec<usize>>,
    depth: Vec<u32>,
}

impl RootedTree {
    /// Builds a tree from `(parent, child, weight)` edges. Fails unless the
    /// edges form a tree spanning all mentioned vertices, rooted at `root`.
    pub fn from_edges(root: VertexId, edges: &[(VertexId, VertexId, f64)]) -> Result<Self> {
        let mut ids: Vec<VertexId> = edges
            .iter()
            .flat_map(|&(p, c, _)| [p, c])
            .chain(std::iter::once(root))
            .collect();
        ids.sort_unstable();
        ids.dedup();
        let index: HashMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let m = ids.len();
        let mut parent = vec![NO_NODE; m];
        let mut parent_weight = vec![0.0; m];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); m];
        for &(p, c, w) in edges {
            let pi = index[&p];
            let ci = index[&c];
            if ci == index[&root] || parent[ci] != NO_NODE {
                return Err(Error::InvariantViolation(format!(
                    "vertex {c} has two parents or is the root"
                )));
            }
            parent[ci] = pi;
            parent_weight[ci] = w;
            children[pi].push(ci);
        }
        for list in &mut children {
            list.sort_unstable_by_key(|&c| ids[c]);
        }
        let root_idx = index[&root];
        // Depth check doubles as connectivity/acyclicity validation.
        let mut depth = vec![u32::MAX; m];
        depth[root_idx] = 0;
        let mut stack = vec![root_idx];
        let mut reached = 0;
        while let Some(u) = stack.pop() {
            reached += 1;
            for &c in &children[u] {
                depth[c] = depth[u] + 1;
                stack.push(c);
            }
        }
        if reached != m {
            return Err(Error::InvariantViolation(format!(
                "edges do not form a tree rooted at {root}: reached {reached} of {m}"
            )));
        }
        Ok(RootedTree {
            ids,
            index,
            root: root_idx,
            parent,
            parent_weight,
            children,
            depth,
        })
    }

    /// Builds the shortest-path tree described by per-vertex `parents`
    /// (as produced by Dijkstra), restricted to vertices that carry one
    /// plus the root itself.
    pub fn from_parents(
        root: VertexId,
        members: &[VertexId],
        parent_of: impl Fn(VertexId) -> Option<VertexId>,
        weight_of: impl Fn(VertexId, VertexId) -> f64,
    ) -> Result<Self> {
        let mut edges = Vec::new();
        for &v in members {
            if v == root {
                continue;
            }
            match parent_of(v) {
                Some(p) => edges.push((p, v, weight_of(p, v))),
                None => {
                    return Err(Error::InvariantViolation(format!(
                        "vertex {v} unreachable from tree root {root}"
                    )))
                }
            }
        }
        Self::from_edges(root, &edges)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn root_id(&self) -> VertexId {
        self.ids[self.root]
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    /// Vertex ids in the tree, sorted ascending.
    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn parent_id(&self, v: VertexId) -> Option<VertexId> {
        let i = *self.index.get(&v)?;
        let p = self.parent[i];
        (p != NO_NODE).then(|| self.ids[p])
    }

    /// All `(parent, child, weight)` edges, children in id order per parent,
    /// parents in id order.
    pub fn edges(&self) -> Vec<(VertexId, VertexId, f64)> {
        let mut out = Vec::with_capacity(self.len().saturating_sub(1));
        for i in 0..self.len() {
            for &c in &self.children[i] {
                out.push((self.ids[i], self.ids[c], self.parent_weight[c]));
            }
        }
        out.sort_unstable_by_key(|&(p, c, _)| (p, c));
        out
    }

    /// The two root-ward path halves from `a` and from `b`, each ending at
    /// (and including) their lowest common ancestor.
    pub fn paths_to_lca(&self, a: VertexId, b: VertexId) -> (Vec<VertexId>, Vec<VertexId>) {
        let mut ai = self.index[&a];
        let mut bi = self.index[&b];
        let mut left = vec![ai];
        let mut right = vec![bi];
        while self.depth[ai] > self.depth[bi] {
            ai = self.parent[ai];
            left.push(ai);
        }
        while self.depth[bi] > self.depth[ai] {
            bi = self.parent[bi];
            right.push(bi);
        }
        while ai != bi {
            ai = self.parent[ai];
            bi = self.parent[bi];
            left.push(ai);
            right.push(bi);
        }
        (
            left.into_iter().map(|i| self.ids[i]).collect(),
            right.into_iter().map(|i| self.ids[i]).collect(),
        )
    }

    /// The unique tree path from `a` to `b` (inclusive).
    pub fn path_between(&self, a: VertexId, b: VertexId) -> Vec<VertexId> {
        let (mut left, right) = self.paths_to_lca(a, b);
        left.extend(right.into_iter().rev().skip(1));
        left
    }

    /// Children of `v` in id order.
    pub fn children_ids(&self, v: VertexId) -> Vec<VertexId> {
        self.children[self.index[&v]]
            .iter()
            .map(|&c| self.ids[c])
            .collect()
    }

    /// Subtree size of every vertex.
    pub fn subtree_sizes(&self) -> HashMap<VertexId, usize> {
        let mut size = vec![1usize; self.len()];
        for &u in &self.postorder() {
            for &c in &self.children[u] {
                size[u] += size[c];
            }
        }
        self.ids
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, size[i]))
            .collect()
    }

    /// Iterative postorder of internal indices, children in id order.
    fn postorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        // Stack of (node, next child position).
        let mut stack = vec![(self.root, 0usize)];
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if *next < self.children[u].len() {
                let c = self.children[u][*next];
                *next += 1;
                stack.push((c, 0));
            } else {
                order.push(u);
                stack.pop();
            }
        }
        order
    }
}

/// Routing label of one tree vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeLabel {
    pub self_id: VertexId,
    /// Smallest postorder number in this vertex's subtree.
    pub low: u32,
    /// This vertex's own postorder number; the subtree is `[low, post]`.
    pub post: u32,
    pub parent: Option<VertexId>,
    pub heavy: Option<VertexId>,
    /// `(ancestor, child)` per light edge on the root path: at `ancestor`,
    /// descending toward this vertex continues at `child`.
    pub exits: Vec<(VertexId, VertexId)>,
}

impl TreeLabel {
    /// True when `other`'s vertex lies in this label's subtree.
    pub fn subtree_contains(&self, other: &TreeLabel) -> bool {
        self.low <= other.post && other.post <= self.post
    }

    /// Exact size of the encoded label in bits.
    pub fn bit_len(&self, id_bits: u32, post_bits: u32) -> usize {
        let mut bits = id_bits as usize + 2 * post_bits as usize + 2;
        if self.parent.is_some() {
            bits += id_bits as usize;
        }
        if self.heavy.is_some() {
            bits += id_bits as usize;
        }
        bits + LEN_BITS as usize + self.exits.len() * 2 * id_bits as usize
    }

    pub fn encode(&self, w: &mut BitWriter, id_bits: u32, post_bits: u32) {
        w.put(self.self_id as u64, id_bits);
        w.put(self.low as u64, post_bits);
        w.put(self.post as u64, post_bits);
        w.put_bool(self.parent.is_some());
        if let Some(p) = self.parent {
            w.put(p as u64, id_bits);
        }
        w.put_bool(self.heavy.is_some());
        if let Some(h) = self.heavy {
            w.put(h as u64, id_bits);
        }
        w.put(self.exits.len() as u64, LEN_BITS);
        for &(a, c) in &self.exits {
            w.put(a as u64, id_bits);
            w.put(c as u64, id_bits);
        }
    }

    pub fn decode(r: &mut BitReader, id_bits: u32, post_bits: u32) -> Result<Self> {
        let self_id = r.get(id_bits)? as VertexId;
        let low = r.get(post_bits)? as u32;
        let post = r.get(post_bits)? as u32;
        let parent = r
            .get_bool()?
            .then(|| r.get(id_bits))
            .transpose()?
            .map(|v| v as VertexId);
        let heavy = r
            .get_bool()?
            .then(|| r.get(id_bits))
            .transpose()?
            .map(|v| v as VertexId);
        let len = r.get(LEN_BITS)? as usize;
        let mut exits = Vec::with_capacity(len);
        for _ in 0..len {
            let a = r.get(id_bits)? as VertexId;
            let c = r.get(id_bits)? as VertexId;
            exits.push((a, c));
        }
        Ok(TreeLabel {
            self_id,
            low,
            post,
            parent,
            heavy,
            exits,
        })
    }
}

/// Computes the routing label of every tree vertex.
pub fn build_tree_labels(tree: &RootedTree) -> HashMap<VertexId, TreeLabel> {
    let m = tree.len();
    let order = tree.postorder();

    let mut size = vec![1usize; m];
    for &u in &order {
        for &c in &tree.children[u] {
            size[u] += size[c];
        }
    }
    let mut heavy = vec![NO_NODE; m];
    for u in 0..m {
        // Largest child subtree wins; id order breaks ties because the
        // children list is id-sorted and the comparison is strict.
        let mut best = NO_NODE;
        for &c in &tree.children[u] {
            if best == NO_NODE || size[c] > size[best] {
                best = c;
            }
        }
        heavy[u] = best;
    }

    let mut post = vec![0u32; m];
    let mut low = vec![u32::MAX; m];
    for (number, &u) in order.iter().enumerate() {
        post[u] = number as u32;
        low[u] = tree.children[u]
            .iter()
            .map(|&c| low[c])
            .min()
            .unwrap_or(number as u32);
    }

    let mut labels = HashMap::with_capacity(m);
    // Depth-first walk carrying the light-edge exit list of the current
    // root path; explicit push/pop markers keep the list in sync without
    // recursion.
    enum Step {
        Enter(usize),
        PushExit(VertexId, VertexId),
        PopExit,
    }
    let mut exits: Vec<(VertexId, VertexId)> = Vec::new();
    let mut stack = vec![Step::Enter(tree.root)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Enter(u) => {
                labels.insert(
                    tree.ids[u],
                    TreeLabel {
                        self_id: tree.ids[u],
                        low: low[u],
                        post: post[u],
                        parent: (tree.parent[u] != NO_NODE).then(|| tree.ids[tree.parent[u]]),
                        heavy: (heavy[u] != NO_NODE).then(|| tree.ids[heavy[u]]),
                        exits: exits.clone(),
                    },
                );
                // Children run in id order (LIFO, so push reversed); a
                // light child's exit pair is live exactly while its
                // subtree is visited.
                for &c in tree.children[u].iter().rev() {
                    let light = c != heavy[u];
                    if light {
                        stack.push(Step::PopExit);
                    }
                    stack.push(Step::Enter(c));
                    if light {
                        stack.push(Step::PushExit(tree.ids[u], tree.ids[c]));
                    }
                }
            }
            Step::PushExit(a, c) => exits.push((a, c)),
            Step::PopExit => {
                exits.pop();
            }
        }
    }
    labels
}

/// The next vertex on the unique tree path from `s` (label `lab_s`) to the
/// target (label `lab_t`). Both labels must come from the same tree and
/// differ.
pub fn tree_next_hop(lab_s: &TreeLabel, lab_t: &TreeLabel) -> Result<VertexId> {
    if lab_s.self_id == lab_t.self_id {
        return Err(Error::IncompatibleLabels(
            "tree routing invoked with source == target".into(),
        ));
    }
    if !lab_s.subtree_contains(lab_t) {
        return lab_s.parent.ok_or_else(|| {
            Error::IncompatibleLabels(format!(
                "target {} outside the tree rooted at {}",
                lab_t.self_id, lab_s.self_id
            ))
        });
    }
    // Target is strictly below s: leave through the recorded light edge if
    // the path branches off here, otherwise follow the heavy child.
    if let Some(&(_, next)) = lab_t.exits.iter().find(|&&(a, _)| a == lab_s.self_id) {
        return Ok(next);
    }
    lab_s.heavy.ok_or_else(|| {
        Error::IncompatibleLabels(format!(
            "leaf {} claims descendant {}",
            lab_s.self_id, lab_t.self_id
        ))
    })
}

/// Full routing function for the tree scheme: resolves the next hop and
/// translates it to a port through the broadcast oracle.
pub fn tree_route(lab_s: &TreeLabel, lab_t: &TreeLabel, b: &Broadcast) -> Result<Port> {
    let next = tree_next_hop(lab_s, lab_t)?;
    b.port_checked(next).ok_or(Error::NotANeighbor {
        at: lab_s.self_id,
        chose: next,
    })
}
