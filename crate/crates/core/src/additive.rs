//! Headerless routing with additive stretch proportional to `eps * D`.
//!
//! Labels are assembled from the portal decomposition: a vertex stores,
//! for every portal of every decomposition node whose region contains it,
//! the portal id, its quantized distance to the portal, and its routing
//! label in the portal's shortest-path tree. Two labels always share the
//! root's portals, so any pair can estimate its distance as the best
//! quantized two-leg detour and then route one hop along the chosen
//! portal tree. Re-evaluating at every vertex keeps the function
//! headerless: the estimate (with the portal id and the remaining tree
//! distance as tie-breakers) strictly decreases hop by hop, so routes
//! terminate without any mutable packet state.
//!
//! Distances enter labels only through the quantizer `x -> floor(x * c)`
//! with `c = n / (eps * D)`; routing never consults exact distances.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::bits::{bits_for, BitReader, BitWriter, LEN_BITS};
use crate::decomp::{build_decomposition_region, DecompositionTree};
use crate::error::{Error, Result};
use crate::geometry::{Broadcast, DistanceOracle, Port, UnitDiskGraph, VertexId};
use crate::tree::{build_tree_labels, tree_next_hop, TreeLabel};

/// Distance quantizer `x -> floor(x * c)` with `c = n / (eps * D)`.
#[derive(Debug, Clone, Copy)]
pub struct Quantizer {
    pub c: f64,
}

impl Quantizer {
    pub fn new(n: usize, eps: f64, diam: f64) -> Self {
        Quantizer {
            c: n as f64 / (eps * diam),
        }
    }

    pub fn quantize(&self, x: f64) -> u64 {
        (x * self.c).floor() as u64
    }
}

/// One label entry: the vertex as seen from one portal's tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortalEntry {
    pub p_id: VertexId,
    /// Quantized distance from the vertex to the portal within the
    /// portal's region.
    pub d_c: u64,
    /// Routing label of the vertex in the portal's shortest-path tree;
    /// also carries the postorder interval.
    pub label: TreeLabel,
}

impl PortalEntry {
    /// Left end of the vertex's postorder interval in the portal tree.
    pub fn l(&self) -> u32 {
        self.label.low
    }

    /// Own postorder number; the vertex's subtree is `[l, r]`.
    pub fn r(&self) -> u32 {
        self.label.post
    }
}

/// Routing label: one entry per portal whose region contains the vertex,
/// sorted by portal id. Portal sets of decomposition nodes are disjoint,
/// so ids never repeat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveLabel {
    pub self_id: VertexId,
    pub entries: Vec<PortalEntry>,
}

impl AdditiveLabel {
    pub fn entry_for(&self, p: VertexId) -> Option<&PortalEntry> {
        self.entries
            .binary_search_by_key(&p, |e| e.p_id)
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Exact encoded size in bits.
    pub fn bit_len(&self, id_bits: u32, post_bits: u32, dc_bits: u32) -> usize {
        id_bits as usize
            + LEN_BITS as usize
            + self
                .entries
                .iter()
                .map(|e| id_bits as usize + dc_bits as usize + e.label.bit_len(id_bits, post_bits))
                .sum::<usize>()
    }

    pub fn encode(&self, w: &mut BitWriter, id_bits: u32, post_bits: u32, dc_bits: u32) {
        w.put(self.self_id as u64, id_bits);
        w.put(self.entries.len() as u64, LEN_BITS);
        for e in &self.entries {
            w.put(e.p_id as u64, id_bits);
            w.put(e.d_c, dc_bits);
            e.label.encode(w, id_bits, post_bits);
        }
    }

    pub fn decode(r: &mut BitReader, id_bits: u32, post_bits: u32, dc_bits: u32) -> Result<Self> {
        let self_id = r.get(id_bits)? as VertexId;
        let len = r.get(LEN_BITS)? as usize;
        let mut entries = Vec::with_capacity(len);
        for _ in 0..len {
            let p_id = r.get(id_bits)? as VertexId;
            let d_c = r.get(dc_bits)?;
            let label = TreeLabel::decode(r, id_bits, post_bits)?;
            entries.push(PortalEntry { p_id, d_c, label });
        }
        Ok(AdditiveLabel { self_id, entries })
    }
}

/// The additive scheme: decomposition, quantizer, and per-vertex labels.
#[derive(Debug, Clone)]
pub struct AdditiveScheme {
    pub decomposition: DecompositionTree,
    pub quantizer: Quantizer,
    pub labels: HashMap<VertexId, AdditiveLabel>,
    /// Vertices covered by the scheme, sorted ascending.
    pub region: Vec<VertexId>,
    pub eps: f64,
    pub diam: f64,
    pub id_bits: u32,
    pub post_bits: u32,
    pub dc_bits: u32,
}

impl AdditiveScheme {
    pub fn label(&self, v: VertexId) -> &AdditiveLabel {
        &self.labels[&v]
    }

    pub fn label_bits(&self, v: VertexId) -> usize {
        self.labels[&v].bit_len(self.id_bits, self.post_bits, self.dc_bits)
    }

    pub fn max_label_bits(&self) -> usize {
        self.region
            .iter()
            .map(|&v| self.label_bits(v))
            .max()
            .unwrap_or(0)
    }
}

/// Builds the scheme for the whole graph; the quantizer and the portal
/// spacing both use the exact diameter.
pub fn build_additive(g: &UnitDiskGraph, eps: f64) -> Result<AdditiveScheme> {
    let region: Vec<VertexId> = (0..g.n() as VertexId).collect();
    let diam = DistanceOracle::build(g).diameter();
    build_additive_region(g, &region, eps, diam)
}

/// Builds the scheme for the subgraph induced by `region` with the scale
/// `diam`; full-graph and per-cluster callers pass the exact diameter of
/// the decomposed subgraph.
pub(crate) fn build_additive_region(
    g: &UnitDiskGraph,
    region: &[VertexId],
    eps: f64,
    diam: f64,
) -> Result<AdditiveScheme> {
    let decomposition = build_decomposition_region(g, region, eps, diam)?;
    let region = decomposition.nodes[decomposition.root].vertices.clone();
    let n_region = region.len();
    let quantizer = Quantizer::new(n_region, eps, diam);
    let dc_cap = (n_region as u64) * (n_region as u64);

    // tree labels per (node, portal), in parallel
    let jobs: Vec<(usize, usize)> = decomposition
        .nodes
        .iter()
        .flat_map(|node| (0..node.portals.len()).map(move |i| (node.id, i)))
        .collect();
    let labelled: Vec<(usize, usize, HashMap<VertexId, TreeLabel>)> = jobs
        .par_iter()
        .map(|&(nid, pi)| {
            let labels = build_tree_labels(&decomposition.nodes[nid].portal_data[pi].tree);
            (nid, pi, labels)
        })
        .collect();

    let mut entries: HashMap<VertexId, Vec<PortalEntry>> =
        region.iter().map(|&v| (v, Vec::new())).collect();
    for (nid, pi, tree_labels) in labelled {
        let node = &decomposition.nodes[nid];
        let pd = &node.portal_data[pi];
        for (i, &v) in node.vertices.iter().enumerate() {
            let d_c = quantizer.quantize(pd.dist[i]);
            if d_c > dc_cap {
                return Err(Error::InvariantViolation(format!(
                    "quantized distance {d_c} from {v} to portal {} exceeds n^2",
                    pd.portal
                )));
            }
            entries.get_mut(&v).unwrap().push(PortalEntry {
                p_id: pd.portal,
                d_c,
                label: tree_labels[&v].clone(),
            });
        }
    }
    let labels: HashMap<VertexId, AdditiveLabel> = entries
        .into_iter()
        .map(|(v, mut entries)| {
            entries.sort_unstable_by_key(|e| e.p_id);
            (
                v,
                AdditiveLabel {
                    self_id: v,
                    entries,
                },
            )
        })
        .collect();

    let id_bits = bits_for(g.n() as u64 - 1);
    let post_bits = bits_for(n_region as u64 - 1);
    let dc_bits = bits_for(dc_cap);
    Ok(AdditiveScheme {
        decomposition,
        quantizer,
        labels,
        region,
        eps,
        diam,
        id_bits,
        post_bits,
        dc_bits,
    })
}

/// The quantized detour estimate through one shared portal: the two
/// quantized distances are added, unless the target sits in the source's
/// subtree of the portal tree, where the root-ward legs overlap and the
/// difference counts the remaining stretch. Only these two cases exist;
/// the mirrored difference is never taken.
pub(crate) fn entry_value(es: &PortalEntry, et: &PortalEntry) -> u64 {
    if es.l() <= et.r() && et.r() <= es.r() {
        debug_assert!(et.d_c >= es.d_c);
        et.d_c - es.d_c
    } else {
        et.d_c + es.d_c
    }
}

/// Minimizes `(theta_c(s,t;p), p_id)` over the shared portals, returning
/// entry indices alongside.
fn theta_c_indexed(lab_s: &AdditiveLabel, lab_t: &AdditiveLabel) -> Result<(u64, usize, usize)> {
    let mut best: Option<(u64, VertexId, usize, usize)> = None;
    let (mut i, mut j) = (0, 0);
    while i < lab_s.entries.len() && j < lab_t.entries.len() {
        let es = &lab_s.entries[i];
        let et = &lab_t.entries[j];
        match es.p_id.cmp(&et.p_id) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let value = entry_value(es, et);
                if best.is_none_or(|(bv, bp, _, _)| (value, es.p_id) < (bv, bp)) {
                    best = Some((value, es.p_id, i, j));
                }
                i += 1;
                j += 1;
            }
        }
    }
    best.map(|(v, _, i, j)| (v, i, j))
        .ok_or(Error::NoCommonPortal {
            s: lab_s.self_id,
            t: lab_t.self_id,
        })
}

/// The quantized distance estimate and the portal realizing it.
pub fn theta_c(lab_s: &AdditiveLabel, lab_t: &AdditiveLabel) -> Result<(u64, VertexId)> {
    let (value, i, _) = theta_c_indexed(lab_s, lab_t)?;
    Ok((value, lab_s.entries[i].p_id))
}

/// The next vertex on the route from `s` toward `t`: one hop in the tree
/// of the portal minimizing `(theta_c, p_id)`.
pub fn sigma_add_next(lab_s: &AdditiveLabel, lab_t: &AdditiveLabel) -> Result<VertexId> {
    if lab_s.self_id == lab_t.self_id {
        return Err(Error::IncompatibleLabels(
            "additive routing invoked with source == target".into(),
        ));
    }
    let (_, i, j) = theta_c_indexed(lab_s, lab_t)?;
    tree_next_hop(&lab_s.entries[i].label, &lab_t.entries[j].label)
}

/// The routing function: pure in its three arguments.
pub fn sigma_add(lab_s: &AdditiveLabel, lab_t: &AdditiveLabel, b: &Broadcast) -> Result<Port> {
    let next = sigma_add_next(lab_s, lab_t)?;
    b.port_checked(next).ok_or(Error::NotANeighbor {
        at: lab_s.self_id,
        chose: next,
    })
}
