//! The full routing scheme: sparse covers at geometrically growing radii,
//! one sub-scheme per cluster, and a smallest-common-scale dispatch rule.
//!
//! Preprocessing builds the planar spanner `H`, then for every scale
//! `k` in `{k0, ..., ceil(log2(4D))}` a sparse `2^k`-cover of `H`. Each
//! cover cluster induces a connected unit disk subgraph that gets its own
//! sub-scheme: the low-diameter scheme at the base scale `k0` (and as a
//! fallback wherever the additive scheme's `eps * diam > 1` precondition
//! fails), the additive-overshoot scheme everywhere else. A vertex label
//! concatenates one tuple `(k, i, home, sublabel)` per cluster the vertex
//! belongs to, where `home` marks the one cluster per scale that is
//! guaranteed to contain the vertex's whole `2^k`-ball.
//!
//! Routing inspects only the two labels: the smallest scale `k` whose
//! home cluster of the target also contains the current vertex decides
//! which sub-scheme routes the next hop. The scale never increases along
//! a route, and within a scale the sub-scheme's own progress guarantees
//! termination.
//!
//! Stretch: routing at scale `k` overshoots by at most `O(eps * 2^k)`
//! while the dispatch rule guarantees `d(s,t) >= 2^(k-3)` above the base
//! scale, so the end-to-end stretch is `1 + O(eps)`. Calibration divides
//! the target stretch parameter by the measured constant chain so that
//! the final bound is `1 + eps_target`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::additive::{build_additive_region, sigma_add, AdditiveLabel};
use crate::bits::{bits_for, BitReader, BitWriter, LEN_BITS};
use crate::cover::build_cover;
use crate::error::{Error, Result};
use crate::geometry::{dijkstra, Broadcast, DistanceOracle, Port, UnitDiskGraph, VertexId};
use crate::lowdiam::{build_lowdiam_labels_region, sigma_diam, LowDiamLabel};
use crate::spanner::build_spanner;

/// Multiplicative stretch constant of the low-diameter scheme:
/// `delta <= (1 + 64 * eps) * d`.
pub const C_DIAM: f64 = 64.0;

/// Constants measured on a calibration suite, feeding [`calibrate`].
/// The defaults are the documented measurements of this implementation;
/// they are deliberately looser than the observed maxima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredConstants {
    /// Cluster diameter over cover radius. The cover construction takes
    /// clusters from `2r`-balls of a `4`-spanner, so `beta <= 4` holds
    /// structurally.
    pub beta: f64,
    /// Additive scheme overshoot: `delta <= d + kappa_a * eps * diam`.
    pub kappa_a: f64,
    /// Quantized one-portal estimate versus the exact one:
    /// `theta_c <= kappa_theta * theta + 1` (recorded, not part of the
    /// calibration arithmetic; `kappa_a` already absorbs it end to end).
    pub kappa_theta: f64,
}

impl MeasuredConstants {
    pub fn defaults() -> Self {
        MeasuredConstants {
            beta: 4.0,
            kappa_a: 16.0,
            kappa_theta: 8.0,
        }
    }
}

impl Default for MeasuredConstants {
    fn default() -> Self {
        Self::defaults()
    }
}

/// Result of [`calibrate`]: the total constant the target stretch is
/// divided by, and the resulting internal parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub kappa_total: f64,
    pub eps_internal: f64,
}

/// Turns the target stretch parameter into the internal one.
///
/// The per-scale overshoot bound is `delta <= d + kappa * eps * 2^k`
/// where `kappa` must dominate both the recurrence across scales
/// (`kappa >= 2 * beta * kappa_a`) and the base-scale case
/// (`kappa >= 64 * beta`). Since `d >= 2^(k-3)` at every dispatched
/// scale above the base, the multiplicative form needs another factor
/// `2^3`, and the pure base-scale case needs `64` on its own:
/// `kappa_total = max(64, 8 * kappa)`.
pub fn calibrate(eps_target: f64, measured: &MeasuredConstants) -> Result<Calibration> {
    if !(eps_target > 0.0 && eps_target <= 1.0) {
        return Err(Error::InvalidEpsilon(eps_target));
    }
    if !(measured.beta >= 1.0 && measured.kappa_a >= 1.0) {
        return Err(Error::CalibrationFailed(format!(
            "measured constants out of range: beta = {}, kappa_a = {}",
            measured.beta, measured.kappa_a
        )));
    }
    let kappa = (2.0 * measured.beta * measured.kappa_a).max(C_DIAM * measured.beta);
    let kappa_total = C_DIAM.max(8.0 * kappa);
    Ok(Calibration {
        kappa_total,
        eps_internal: eps_target / kappa_total,
    })
}

/// Parameters of one preprocessed scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    /// The stretch the scheme promises: `delta <= (1 + eps_target) * d`.
    pub eps_target: f64,
    /// The parameter handed to covers and sub-schemes after calibration.
    pub eps_internal: f64,
    /// `eps_target / eps_internal`; `1` when built with a fixed internal
    /// parameter.
    pub kappa_total: f64,
    /// Base scale `k0 = ceil(log2(8 / eps_internal))`.
    pub k0: u32,
    /// Largest scale, `max(k0, ceil(log2(4 * D)))`.
    pub k_max: u32,
    /// Exact weighted diameter of the full graph.
    pub diam: f64,
    /// Constants the calibration used (recorded for reports).
    pub constants: MeasuredConstants,
}

impl SchemeConfig {
    /// Number of scales, `|{k0, ..., k_max}|`.
    pub fn num_levels(&self) -> usize {
        (self.k_max - self.k0 + 1) as usize
    }
}

/// One cover cluster and the sub-scheme decision taken for it.
#[derive(Debug, Clone)]
pub struct ClusterInfo {
    /// Member vertices, sorted ascending.
    pub vertices: Vec<VertexId>,
    /// Exact weighted diameter of the induced unit disk subgraph.
    pub diam: f64,
    /// True when the cluster uses the low-diameter scheme: always at the
    /// base scale, and above it whenever `eps * diam <= 1` makes the
    /// additive scheme inapplicable (the recorded fallback).
    pub uses_diam_scheme: bool,
}

/// All clusters of one scale.
#[derive(Debug, Clone)]
pub struct LevelInfo {
    pub k: u32,
    /// Cover radius `2^k`.
    pub radius: f64,
    /// Home cluster index per vertex id.
    pub home: Vec<usize>,
    pub clusters: Vec<ClusterInfo>,
    /// Measured `max cluster diameter / radius` of this scale.
    pub beta: f64,
}

/// Sub-scheme label carried inside a [`TopTuple`].
#[derive(Debug, Clone, PartialEq)]
pub enum SubLabel {
    Diam(LowDiamLabel),
    Add(AdditiveLabel),
}

/// One `(k, i, home, sublabel)` entry of a vertex label.
#[derive(Debug, Clone, PartialEq)]
pub struct TopTuple {
    pub k: u32,
    /// Cluster index within scale `k`.
    pub i: u32,
    /// True iff cluster `i` is this vertex's home cluster at scale `k`:
    /// the one guaranteed to contain the vertex's whole `2^k`-ball.
    pub home: bool,
    pub label: SubLabel,
}

/// The complete routing label of one vertex: its id plus one tuple per
/// cluster containing it, sorted by `(k, i)` with exactly one home tuple
/// per scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TopLabel {
    pub self_id: VertexId,
    pub tuples: Vec<TopTuple>,
}

/// Fixed widths shared by every label of one build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelWidths {
    /// Vertex ids: `bits_for(n - 1)`.
    pub id_bits: u32,
    /// Postorder numbers inside decomposition trees.
    pub post_bits: u32,
    /// Quantized distances: `bits_for(n^2)`.
    pub dc_bits: u32,
    /// Cluster indices within a scale.
    pub i_bits: u32,
}

/// Scale values are stored in a fixed 8-bit field.
const K_BITS: u32 = 8;

impl TopTuple {
    fn bit_len(&self, w: &LabelWidths) -> usize {
        let body = match &self.label {
            SubLabel::Diam(l) => l.bit_len(w.id_bits),
            SubLabel::Add(l) => l.bit_len(w.id_bits, w.post_bits, w.dc_bits),
        };
        K_BITS as usize + w.i_bits as usize + 2 + body
    }

    fn encode(&self, out: &mut BitWriter, w: &LabelWidths) {
        out.put(self.k as u64, K_BITS);
        out.put(self.i as u64, w.i_bits);
        out.put_bool(self.home);
        match &self.label {
            SubLabel::Diam(l) => {
                out.put_bool(false);
                l.encode(out, w.id_bits);
            }
            SubLabel::Add(l) => {
                out.put_bool(true);
                l.encode(out, w.id_bits, w.post_bits, w.dc_bits);
            }
        }
    }

    fn decode(r: &mut BitReader, w: &LabelWidths) -> Result<Self> {
        let k = r.get(K_BITS)? as u32;
        let i = r.get(w.i_bits)? as u32;
        let home = r.get_bool()?;
        let is_add = r.get_bool()?;
        let label = if is_add {
            SubLabel::Add(AdditiveLabel::decode(r, w.id_bits, w.post_bits, w.dc_bits)?)
        } else {
            SubLabel::Diam(LowDiamLabel::decode(r, w.id_bits)?)
        };
        Ok(TopTuple { k, i, home, label })
    }
}

impl TopLabel {
    /// The tuple for cluster `i` at scale `k`, if the vertex is a member.
    pub fn find(&self, k: u32, i: u32) -> Option<&TopTuple> {
        self.tuples
            .binary_search_by_key(&(k, i), |t| (t.k, t.i))
            .ok()
            .map(|idx| &self.tuples[idx])
    }

    /// Home tuples in ascending scale order.
    pub fn home_tuples(&self) -> impl Iterator<Item = &TopTuple> {
        self.tuples.iter().filter(|t| t.home)
    }

    /// Exact encoded size in bits.
    pub fn bit_len(&self, w: &LabelWidths) -> usize {
        let mut bits = w.id_bits as usize + LEN_BITS as usize;
        for t in &self.tuples {
            bits += t.bit_len(w);
        }
        bits
    }

    pub fn encode(&self, out: &mut BitWriter, w: &LabelWidths) {
        out.put(self.self_id as u64, w.id_bits);
        out.put(self.tuples.len() as u64, LEN_BITS);
        for t in &self.tuples {
            t.encode(out, w);
        }
    }

    pub fn decode(r: &mut BitReader, w: &LabelWidths) -> Result<Self> {
        let self_id = r.get(w.id_bits)? as VertexId;
        let count = r.get(LEN_BITS)? as usize;
        let mut tuples = Vec::with_capacity(count);
        for _ in 0..count {
            tuples.push(TopTuple::decode(r, w)?);
        }
        Ok(TopLabel { self_id, tuples })
    }
}

/// The preprocessed scheme: per-scale cluster structure plus all labels.
#[derive(Debug, Clone)]
pub struct HierarchicalScheme {
    pub config: SchemeConfig,
    pub widths: LabelWidths,
    pub levels: Vec<LevelInfo>,
    pub labels: HashMap<VertexId, TopLabel>,
}

impl HierarchicalScheme {
    pub fn label(&self, v: VertexId) -> &TopLabel {
        &self.labels[&v]
    }

    /// Encoded size of one vertex label in bits.
    pub fn label_bits(&self, v: VertexId) -> usize {
        self.labels[&v].bit_len(&self.widths)
    }

    pub fn max_label_bits(&self) -> usize {
        self.labels
            .keys()
            .map(|&v| self.label_bits(v))
            .max()
            .unwrap_or(0)
    }

    pub fn avg_label_bits(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        let total: usize = self.labels.keys().map(|&v| self.label_bits(v)).sum();
        total as f64 / self.labels.len() as f64
    }

    /// Measured cover-diameter constant: max over scales of
    /// `max cluster diameter / radius`.
    pub fn measured_beta(&self) -> f64 {
        self.levels.iter().map(|l| l.beta).fold(0.0, f64::max)
    }

    /// Packages the labels for serialization.
    pub fn to_store(&self, port_seed: u64) -> LabelStore {
        let n = self.labels.len();
        let mut labels = Vec::with_capacity(n);
        for v in 0..n as VertexId {
            labels.push(self.labels[&v].clone());
        }
        LabelStore {
            header: StoreHeader {
                n,
                eps_target: self.config.eps_target,
                eps_internal: self.config.eps_internal,
                kappa_total: self.config.kappa_total,
                port_seed,
                widths: self.widths,
            },
            labels,
        }
    }
}

/// Preprocesses with the default measured constants.
pub fn preprocess(g: &UnitDiskGraph, eps_target: f64) -> Result<HierarchicalScheme> {
    preprocess_with(g, eps_target, &MeasuredConstants::defaults())
}

/// Preprocesses with explicit measured constants.
pub fn preprocess_with(
    g: &UnitDiskGraph,
    eps_target: f64,
    measured: &MeasuredConstants,
) -> Result<HierarchicalScheme> {
    let cal = calibrate(eps_target, measured)?;
    build_scheme(g, eps_target, cal.eps_internal, cal.kappa_total, *measured)
}

/// Preprocesses with a directly chosen internal parameter (no
/// calibration); used to exercise multi-scale behavior and to measure
/// label growth at a fixed parameter.
pub fn preprocess_fixed(g: &UnitDiskGraph, eps_internal: f64) -> Result<HierarchicalScheme> {
    if !(eps_internal > 0.0 && eps_internal <= 1.0) {
        return Err(Error::InvalidEpsilon(eps_internal));
    }
    build_scheme(
        g,
        eps_internal,
        eps_internal,
        1.0,
        MeasuredConstants::defaults(),
    )
}

fn build_scheme(
    g: &UnitDiskGraph,
    eps_target: f64,
    eps: f64,
    kappa_total: f64,
    constants: MeasuredConstants,
) -> Result<HierarchicalScheme> {
    let n = g.n();
    if n == 0 {
        return Err(Error::DegenerateInput("empty vertex set".into()));
    }
    let k0 = (8.0 / eps).log2().ceil() as u32;

    if n == 1 {
        // A single vertex never routes; keep the degenerate label anyway
        // so stores and reports stay uniform.
        let config = SchemeConfig {
            eps_target,
            eps_internal: eps,
            kappa_total,
            k0,
            k_max: k0,
            diam: 0.0,
            constants,
        };
        let widths = LabelWidths {
            id_bits: 1,
            post_bits: 1,
            dc_bits: 1,
            i_bits: 1,
        };
        let labels = HashMap::from([(
            0,
            TopLabel {
                self_id: 0,
                tuples: Vec::new(),
            },
        )]);
        return Ok(HierarchicalScheme {
            config,
            widths,
            levels: Vec::new(),
            labels,
        });
    }

    let oracle = DistanceOracle::build(g);
    let diam = oracle.diameter();
    let h = build_spanner(g)?;
    let k_max = if diam > 0.0 {
        k0.max((4.0 * diam).log2().ceil() as u32)
    } else {
        k0
    };
    assert!(k_max < (1 << K_BITS), "scale exceeds its 8-bit field");

    let all: Vec<VertexId> = (0..n as VertexId).collect();
    let mut levels = Vec::with_capacity((k_max - k0 + 1) as usize);
    let mut built_levels: Vec<Vec<BuiltCluster>> = Vec::with_capacity(levels.capacity());
    for k in k0..=k_max {
        let radius = 2f64.powi(k as i32);
        // A radius that covers the whole graph needs no cover machinery:
        // clamp to a single all-graph cluster.
        let (cluster_sets, home) = if radius >= 4.0 * diam {
            (vec![all.clone()], vec![0usize; n])
        } else {
            let cover = build_cover(&h, radius);
            (cover.clusters, cover.home)
        };
        let built: Vec<BuiltCluster> = cluster_sets
            .into_par_iter()
            .map(|vertices| build_cluster(g, vertices, k, k0, eps))
            .collect::<Result<_>>()?;
        let beta = built
            .iter()
            .map(|c| c.info.diam / radius)
            .fold(0.0, f64::max);
        levels.push(LevelInfo {
            k,
            radius,
            home,
            clusters: built.iter().map(|c| c.info.clone()).collect(),
            beta,
        });
        built_levels.push(built);
    }

    let max_clusters = levels.iter().map(|l| l.clusters.len()).max().unwrap_or(1);
    let widths = LabelWidths {
        id_bits: bits_for(n as u64 - 1),
        post_bits: bits_for(n as u64 - 1),
        dc_bits: bits_for((n as u64) * (n as u64)),
        i_bits: bits_for(max_clusters.saturating_sub(1) as u64),
    };

    let mut per_vertex: Vec<Vec<TopTuple>> = vec![Vec::new(); n];
    for (level, built) in levels.iter().zip(&built_levels) {
        for (i, cluster) in built.iter().enumerate() {
            for &v in &cluster.info.vertices {
                per_vertex[v as usize].push(TopTuple {
                    k: level.k,
                    i: i as u32,
                    home: level.home[v as usize] == i,
                    label: cluster.labels[&v].clone(),
                });
            }
        }
    }
    let mut labels = HashMap::with_capacity(n);
    for (v, tuples) in per_vertex.into_iter().enumerate() {
        debug_assert!(tuples
            .windows(2)
            .all(|w| (w[0].k, w[0].i) < (w[1].k, w[1].i)));
        for level in &levels {
            debug_assert_eq!(
                tuples.iter().filter(|t| t.k == level.k && t.home).count(),
                1,
                "vertex {v} needs exactly one home tuple at scale {}",
                level.k
            );
        }
        labels.insert(
            v as VertexId,
            TopLabel {
                self_id: v as VertexId,
                tuples,
            },
        );
    }

    Ok(HierarchicalScheme {
        config: SchemeConfig {
            eps_target,
            eps_internal: eps,
            kappa_total,
            k0,
            k_max,
            diam,
            constants,
        },
        widths,
        levels,
        labels,
    })
}

struct BuiltCluster {
    info: ClusterInfo,
    labels: HashMap<VertexId, SubLabel>,
}

fn build_cluster(
    g: &UnitDiskGraph,
    vertices: Vec<VertexId>,
    k: u32,
    k0: u32,
    eps: f64,
) -> Result<BuiltCluster> {
    let diam = induced_diameter(g, &vertices)?;
    let uses_diam_scheme = k == k0 || eps * diam <= 1.0;
    let labels: HashMap<VertexId, SubLabel> = if uses_diam_scheme {
        let scheme = build_lowdiam_labels_region(g, &vertices, eps)?;
        vertices
            .iter()
            .map(|&v| (v, SubLabel::Diam(scheme.labels[&v].clone())))
            .collect()
    } else {
        let scheme = build_additive_region(g, &vertices, eps, diam)?;
        vertices
            .iter()
            .map(|&v| (v, SubLabel::Add(scheme.label(v).clone())))
            .collect()
    };
    Ok(BuiltCluster {
        info: ClusterInfo {
            vertices,
            diam,
            uses_diam_scheme,
        },
        labels,
    })
}

/// Exact weighted diameter of the unit disk subgraph induced by
/// `members`, which must be connected (cover clusters always are: they
/// are connected in the spanner, a subgraph of the disk graph).
fn induced_diameter(g: &UnitDiskGraph, members: &[VertexId]) -> Result<f64> {
    if members.len() <= 1 {
        return Ok(0.0);
    }
    let mut mask = vec![false; g.n()];
    for &v in members {
        mask[v as usize] = true;
    }
    members
        .par_iter()
        .map(|&s| {
            let sp = dijkstra(g, s, Some(&mask));
            let mut far = 0.0f64;
            for &t in members {
                let d = sp.dist[t as usize];
                if !d.is_finite() {
                    return Err(Error::InvariantViolation(format!(
                        "cover cluster disconnected in the disk graph: {s} cannot reach {t}"
                    )));
                }
                far = far.max(d);
            }
            Ok(far)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// The scale and cluster index the routing function dispatches on: the
/// smallest `k` such that the target's home cluster at scale `k` also
/// contains the source.
pub fn dispatch_level(lab_s: &TopLabel, lab_t: &TopLabel) -> Result<(u32, u32)> {
    for t in lab_t.home_tuples() {
        if lab_s.find(t.k, t.i).is_some() {
            return Ok((t.k, t.i));
        }
    }
    Err(Error::NoCommonLevel {
        s: lab_s.self_id,
        t: lab_t.self_id,
    })
}

/// The routing function: dispatches to the sub-scheme of the smallest
/// common scale. Pure in its inputs; never inspects anything beyond the
/// two labels and the local broadcast.
pub fn sigma(lab_s: &TopLabel, lab_t: &TopLabel, b: &Broadcast) -> Result<Port> {
    if lab_s.self_id == lab_t.self_id {
        return Err(Error::IncompatibleLabels(
            "routing function invoked with source == target".into(),
        ));
    }
    let (k, i) = dispatch_level(lab_s, lab_t)?;
    let ts = lab_s.find(k, i).expect("dispatch checked membership");
    let tt = lab_t.find(k, i).expect("home tuple exists");
    match (&ts.label, &tt.label) {
        (SubLabel::Diam(s), SubLabel::Diam(t)) => sigma_diam(s, t, b),
        (SubLabel::Add(s), SubLabel::Add(t)) => sigma_add(s, t, b),
        _ => Err(Error::IncompatibleLabels(format!(
            "scale {k} cluster {i} mixes sub-scheme label kinds"
        ))),
    }
}

/// File magic of the label store ("UDRL").
pub const STORE_MAGIC: u32 = 0x5544_524c;
/// Store format version.
pub const STORE_VERSION: u16 = 1;

/// Header of a serialized label store.
#[derive(Debug, Clone, PartialEq)]
pub struct StoreHeader {
    pub n: usize,
    pub eps_target: f64,
    pub eps_internal: f64,
    pub kappa_total: f64,
    /// Seed of the port assignment the labels were built against (the
    /// labels themselves are port-independent; the seed is recorded so a
    /// run can be reproduced end to end).
    pub port_seed: u64,
    pub widths: LabelWidths,
}

/// Serialized labels: a versioned header plus one record per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelStore {
    pub header: StoreHeader,
    /// Indexed by vertex id.
    pub labels: Vec<TopLabel>,
}

impl LabelStore {
    pub fn label(&self, v: VertexId) -> &TopLabel {
        &self.labels[v as usize]
    }

    /// Encoded size of one vertex record's label body in bits.
    pub fn record_bits(&self, v: VertexId) -> usize {
        self.labels[v as usize].bit_len(&self.header.widths)
    }

    /// Serializes the store: header fields, then per vertex its id, the
    /// byte length of its canonical binary label, and the label bytes.
    pub fn encode(&self) -> Vec<u8> {
        let w = &self.header.widths;
        let mut out = BitWriter::new();
        out.put(STORE_MAGIC as u64, 32);
        out.put(STORE_VERSION as u64, 16);
        out.put(self.header.n as u64, 32);
        out.put(self.header.eps_target.to_bits(), 64);
        out.put(self.header.eps_internal.to_bits(), 64);
        out.put(self.header.kappa_total.to_bits(), 64);
        out.put(self.header.port_seed, 64);
        out.put(w.id_bits as u64, 8);
        out.put(w.post_bits as u64, 8);
        out.put(w.dc_bits as u64, 8);
        out.put(w.i_bits as u64, 8);
        let mut bytes = out.into_bytes();
        for label in &self.labels {
            let mut body = BitWriter::new();
            label.encode(&mut body, w);
            let body = body.into_bytes();
            let mut rec = BitWriter::new();
            rec.put(label.self_id as u64, 32);
            rec.put(body.len() as u64, 32);
            bytes.extend_from_slice(rec.as_bytes());
            bytes.extend_from_slice(&body);
        }
        bytes
    }

    pub fn decode(bytes: &[u8]) -> Result<LabelStore> {
        let mut r = BitReader::new(bytes);
        if r.get(32)? as u32 != STORE_MAGIC {
            return Err(Error::Parse("bad label store magic".into()));
        }
        let version = r.get(16)? as u16;
        if version != STORE_VERSION {
            return Err(Error::Parse(format!(
                "unsupported label store version {version}"
            )));
        }
        let n = r.get(32)? as usize;
        let eps_target = f64::from_bits(r.get(64)?);
        let eps_internal = f64::from_bits(r.get(64)?);
        let kappa_total = f64::from_bits(r.get(64)?);
        let port_seed = r.get(64)?;
        let widths = LabelWidths {
            id_bits: r.get(8)? as u32,
            post_bits: r.get(8)? as u32,
            dc_bits: r.get(8)? as u32,
            i_bits: r.get(8)? as u32,
        };
        let mut offset = r.position() / 8;
        let mut labels = Vec::with_capacity(n);
        for v in 0..n {
            if offset + 8 > bytes.len() {
                return Err(Error::Parse(format!("truncated record for vertex {v}")));
            }
            let mut head = BitReader::new(&bytes[offset..offset + 8]);
            let id = head.get(32)? as usize;
            let len = head.get(32)? as usize;
            offset += 8;
            if id != v {
                return Err(Error::Parse(format!(
                    "record {v} carries id {id}; store is out of order"
                )));
            }
            if offset + len > bytes.len() {
                return Err(Error::Parse(format!("truncated label for vertex {v}")));
            }
            let mut body = BitReader::new(&bytes[offset..offset + len]);
            let label = TopLabel::decode(&mut body, &widths)?;
            if label.self_id as usize != v {
                return Err(Error::Parse(format!(
                    "label body of record {v} names {}",
                    label.self_id
                )));
            }
            offset += len;
            labels.push(label);
        }
        Ok(LabelStore {
            header: StoreHeader {
                n,
                eps_target,
                eps_internal,
                kappa_total,
                port_seed,
                widths,
            },
            labels,
        })
    }
}
