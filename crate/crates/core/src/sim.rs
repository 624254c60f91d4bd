//! All-pairs routing simulation with per-hop invariant checking.
//!
//! The simulator drives a preprocessed scheme over (all or sampled)
//! ordered vertex pairs, asserting at every hop the invariants the
//! scheme's correctness argument rests on: the additive scheme's
//! progress triple, potential decrease, portal persistence and tie rule;
//! the full scheme's scale monotonicity; and spot checks of the suffix
//! property that headerless routing implies. Violations are hard errors
//! carrying the offending hop trace — never a statistic.
//!
//! Reports carry per-pair rows plus aggregates and the measured
//! constants the calibration story rests on. Serialized reports are
//! deterministic for a fixed (instance, scheme, selection): timings are
//! kept out of the encodable payload.

use std::collections::HashSet;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::additive::{entry_value, theta_c, AdditiveLabel, AdditiveScheme};
use crate::error::{Error, Result};
use crate::geometry::{Broadcast, DistanceOracle, PortMap, UnitDiskGraph, VertexId};
use crate::hierarchy::{dispatch_level, sigma, HierarchicalScheme, LabelStore, SubLabel};
use crate::lowdiam::{sigma_diam, LowDiamScheme};

/// The scheme a simulation drives.
pub enum Scheme<'a> {
    Diam(&'a LowDiamScheme),
    Add(&'a AdditiveScheme),
    Full(&'a HierarchicalScheme),
    /// The full scheme, but routing purely from deserialized labels.
    Store(&'a LabelStore),
}

impl Scheme<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Diam(_) => "lowdiam",
            Scheme::Add(_) => "additive",
            Scheme::Full(_) => "full",
            Scheme::Store(_) => "full-store",
        }
    }

    /// Number of scales (1 for the single-level schemes).
    fn levels(&self) -> usize {
        match self {
            Scheme::Full(s) => s.config.num_levels().max(1),
            Scheme::Store(_) => 16,
            _ => 1,
        }
    }

    /// The internal stretch parameter, for measured-constant reporting.
    fn eps(&self) -> f64 {
        match self {
            Scheme::Diam(s) => s.cluster.eps,
            Scheme::Add(s) => s.eps,
            Scheme::Full(s) => s.config.eps_internal,
            Scheme::Store(s) => s.header.eps_internal,
        }
    }

    fn label_bits(&self, v: VertexId, id_bits: u32) -> usize {
        match self {
            Scheme::Diam(s) => s.labels[&v].bit_len(id_bits),
            Scheme::Add(s) => s.label_bits(v),
            Scheme::Full(s) => s.label_bits(v),
            Scheme::Store(s) => s.record_bits(v),
        }
    }

    fn next_port(
        &self,
        cur: VertexId,
        t: VertexId,
        b: &Broadcast,
    ) -> Result<crate::geometry::Port> {
        match self {
            Scheme::Diam(s) => sigma_diam(&s.labels[&cur], &s.labels[&t], b),
            Scheme::Add(s) => crate::additive::sigma_add(s.label(cur), s.label(t), b),
            Scheme::Full(s) => sigma(s.label(cur), s.label(t), b),
            Scheme::Store(s) => sigma(s.label(cur), s.label(t), b),
        }
    }
}

/// Which ordered pairs to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSelection {
    All,
    Sample { m: usize, seed: u64 },
}

/// One simulated pair.
#[derive(Debug, Clone, Serialize)]
pub struct PairResult {
    pub s: VertexId,
    pub t: VertexId,
    pub d: f64,
    pub delta: f64,
    pub stretch: f64,
    pub hops: usize,
}

/// Constants measured during a run; fields stay unset when the driven
/// scheme does not expose the underlying quantity.
#[derive(Debug, Clone, Default, Serialize)]
pub struct MeasuredReport {
    /// Cover: max cluster diameter over radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Portal estimate: max (theta - d) / (eps * D).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_theta: Option<f64>,
    /// Additive scheme: max (delta - d) / (eps * D).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_a: Option<f64>,
    /// Low-diameter scheme: max (delta/d - 1) / eps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_d: Option<f64>,
    /// Full scheme: max (delta - d) / (eps * 2^k) over dispatch scales k.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_level: Option<f64>,
    /// Cover overlap: max clusters containing one vertex at one scale.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap: Option<usize>,
    /// Decomposition tree height (additive scheme).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree_height: Option<usize>,
    /// Max portals of any decomposition node (additive scheme).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_portals: Option<usize>,
}

/// The simulation outcome: per-pair rows plus aggregates.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub scheme: String,
    pub instance: String,
    pub n: usize,
    pub eps: f64,
    pub pairs_mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_seed: Option<u64>,
    pub pair_count: usize,
    pub max_stretch: f64,
    pub mean_stretch: f64,
    pub max_hops: usize,
    pub max_overshoot: f64,
    pub label_max_bits: usize,
    pub label_mean_bits: f64,
    pub label_total_bits: usize,
    pub constants: MeasuredReport,
    #[serde(skip)]
    pub pairs: Vec<PairResult>,
    /// Wall-clock seconds spent routing; excluded from serialization so
    /// reports stay byte-identical across runs.
    #[serde(skip)]
    pub route_secs: f64,
}

impl SimulationReport {
    /// Per-pair rows as CSV (deterministic row order: pair order).
    pub fn csv(&self) -> String {
        let mut out = String::from("s,t,d,delta,stretch,hops\n");
        for p in &self.pairs {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.s, p.t, p.d, p.delta, p.stretch, p.hops
            ));
        }
        out
    }

    /// Aggregates and measured constants as JSON.
    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// A fully checked route.
#[derive(Debug, Clone)]
pub struct RouteTrace {
    pub vertices: Vec<VertexId>,
    pub delta: f64,
    /// Dispatch scale of the first hop (full scheme only).
    pub first_level: Option<u32>,
}

/// State for the additive progress-triple assertions: the previous hop's
/// `(theta_c, portal, hops left in the portal tree)` plus the labels the
/// values were derived from.
struct AddProgress {
    theta: u64,
    portal: VertexId,
    tree_hops: Option<usize>,
}

fn add_triple(
    scheme: Option<&AdditiveScheme>,
    lab_cur: &AdditiveLabel,
    lab_t: &AdditiveLabel,
    t: VertexId,
) -> Result<AddProgress> {
    let cur = lab_cur.self_id;
    let (theta, portal) = theta_c(lab_cur, lab_t)?;
    // The hop distance inside the portal tree needs the preprocessed
    // tree itself; when simulating from labels alone it is skipped and
    // the remaining (theta, portal) components still certify progress.
    let tree_hops = scheme.map(|s| {
        let node = &s.decomposition.nodes[s.decomposition.owner[&portal]];
        let i = node
            .portals
            .iter()
            .position(|&q| q == portal)
            .expect("owner node lists its portal");
        node.portal_data[i].tree.path_between(cur, t).len() - 1
    });
    Ok(AddProgress {
        theta,
        portal,
        tree_hops,
    })
}

/// Asserts every additive-scheme hop invariant for the step cur -> next.
fn check_add_hop(
    scheme: Option<&AdditiveScheme>,
    lab_cur: &AdditiveLabel,
    lab_next: &AdditiveLabel,
    lab_t: &AdditiveLabel,
    t: VertexId,
    w_c: u64,
    trace: &[VertexId],
) -> Result<()> {
    let before = add_triple(scheme, lab_cur, lab_t, t)?;
    let after = add_triple(scheme, lab_next, lab_t, t)?;
    let fail = |what: &str| {
        Err(Error::AssertionViolation(format!(
            "{what} at hop {} -> {} toward {t}: theta {} -> {}, portal {} -> {}, trace {:?}",
            lab_cur.self_id,
            lab_next.self_id,
            before.theta,
            after.theta,
            before.portal,
            after.portal,
            trace
        )))
    };
    // Potential decrease: theta_c(s,t) >= theta_c(v,t) + |sv|_c.
    if before.theta < after.theta.saturating_add(w_c) {
        return fail("potential decrease violated");
    }
    // Portal persistence: the chosen portal stays available at the next
    // vertex, and its single-portal estimate decreases by the hop.
    let (pb, pa) = (
        lab_cur.entry_for(before.portal),
        lab_next.entry_for(before.portal),
    );
    match (pb, pa, lab_t.entry_for(before.portal)) {
        (Some(es), Some(ev), Some(et)) => {
            if entry_value(es, et) < entry_value(ev, et).saturating_add(w_c) {
                return fail("portal persistence violated");
            }
        }
        _ => return fail("chosen portal vanished from the next label"),
    }
    // Tie rule: when theta stalls, the portal id must not increase.
    if after.theta == before.theta && after.portal > before.portal {
        return fail("portal tie rule violated");
    }
    // Strict lexicographic decrease of the progress triple (the tree-hop
    // component needs the preprocessed tree; without it the first two
    // components must still not increase).
    match (before.tree_hops, after.tree_hops) {
        (Some(hb), Some(ha)) => {
            if (after.theta, after.portal, ha) >= (before.theta, before.portal, hb) {
                return fail("progress triple did not strictly decrease");
            }
        }
        _ => {
            if (after.theta, after.portal) > (before.theta, before.portal) {
                return fail("progress pair increased");
            }
        }
    }
    Ok(())
}

/// Routes one pair with every applicable per-hop assertion, a step
/// budget, and a final recomputation check of the travelled length.
pub fn route_checked(
    scheme: &Scheme,
    g: &UnitDiskGraph,
    ports: &PortMap,
    s: VertexId,
    t: VertexId,
    budget: usize,
) -> Result<RouteTrace> {
    if s == t {
        return Err(Error::IncompatibleLabels(
            "simulation pairs must be ordered pairs of distinct vertices".into(),
        ));
    }
    let mut vertices = vec![s];
    let mut delta = 0.0;
    let mut cur = s;
    let mut first_level = None;
    let mut prev_level: Option<(u32, u32)> = None;
    while cur != t {
        if vertices.len() > budget {
            return Err(Error::NonTermination { s, t, budget });
        }
        // Scale bookkeeping for the hierarchical schemes.
        let full_labels = match scheme {
            Scheme::Full(h) => Some((h.label(cur), h.label(t))),
            Scheme::Store(st) => Some((st.label(cur), st.label(t))),
            _ => None,
        };
        if let Some((lab_cur, lab_t)) = &full_labels {
            let (k, i) = dispatch_level(lab_cur, lab_t)?;
            if first_level.is_none() {
                first_level = Some(k);
            }
            if let Some((pk, pi)) = prev_level {
                if k > pk {
                    return Err(Error::AssertionViolation(format!(
                        "dispatch scale increased from {pk} to {k} at {cur} toward {t}, trace {vertices:?}"
                    )));
                }
                if k == pk && i != pi {
                    return Err(Error::AssertionViolation(format!(
                        "cluster changed from {pi} to {i} at fixed scale {k} at {cur} toward {t}, trace {vertices:?}"
                    )));
                }
            }
            prev_level = Some((k, i));
        }

        let b = Broadcast::new(ports, cur);
        let port = scheme.next_port(cur, t, &b)?;
        let next = ports
            .node(cur, port)
            .ok_or(Error::AssertionViolation(format!(
                "routing function returned dead port {port} at {cur} toward {t}"
            )))?;
        let w = g.edge_weight(cur, next).ok_or(Error::NotANeighbor {
            at: cur,
            chose: next,
        })?;

        // Additive progress invariants, either on the standalone scheme
        // or inside the full scheme's dispatched cluster.
        match scheme {
            Scheme::Add(a) => {
                let w_c = a.quantizer.quantize(w);
                check_add_hop(
                    Some(a),
                    a.label(cur),
                    a.label(next),
                    a.label(t),
                    t,
                    w_c,
                    &vertices,
                )?;
            }
            Scheme::Full(h) => {
                let (k, i) = prev_level.expect("set above");
                let next_lab = h.label(next);
                if let (Some(tc), Some(tn), Some(tt)) = (
                    h.label(cur).find(k, i),
                    next_lab.find(k, i),
                    h.label(t).find(k, i),
                ) {
                    if let (SubLabel::Add(lc), SubLabel::Add(ln), SubLabel::Add(lt)) =
                        (&tc.label, &tn.label, &tt.label)
                    {
                        // Cluster quantizers share the additive module's
                        // construction: c = n_cluster / (eps * diam).
                        let cluster = &h.levels[(k - h.config.k0) as usize].clusters[i as usize];
                        let q = crate::additive::Quantizer::new(
                            cluster.vertices.len(),
                            h.config.eps_internal,
                            cluster.diam,
                        );
                        check_add_hop(None, lc, ln, lt, t, q.quantize(w), &vertices)?;
                    }
                }
            }
            _ => {}
        }

        delta += w;
        vertices.push(next);
        cur = next;
    }

    // The reported length must equal an independent recomputation from
    // the recorded vertex sequence.
    let mut recomputed = 0.0;
    for pair in vertices.windows(2) {
        recomputed += g.site(pair[0]).dist(g.site(pair[1]));
    }
    if (recomputed - delta).abs() > 1e-9 * (1.0 + delta) {
        return Err(Error::AssertionViolation(format!(
            "recorded length {delta} disagrees with recomputation {recomputed} for {s} -> {t}"
        )));
    }

    Ok(RouteTrace {
        vertices,
        delta,
        first_level,
    })
}

/// Ordered pairs for a selection, deterministic in the sample seed.
pub fn select_pairs(n: usize, selection: &PairSelection) -> Vec<(VertexId, VertexId)> {
    let total = n.saturating_mul(n.saturating_sub(1));
    let all = || {
        let mut pairs = Vec::with_capacity(total);
        for s in 0..n as VertexId {
            for t in 0..n as VertexId {
                if s != t {
                    pairs.push((s, t));
                }
            }
        }
        pairs
    };
    match *selection {
        PairSelection::All => all(),
        PairSelection::Sample { m, seed } => {
            if m >= total {
                return all();
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut seen = HashSet::with_capacity(m);
            let mut pairs = Vec::with_capacity(m);
            while pairs.len() < m {
                let s = rng.random_range(0..n) as VertexId;
                let t = rng.random_range(0..n) as VertexId;
                if s != t && seen.insert((s, t)) {
                    pairs.push((s, t));
                }
            }
            pairs
        }
    }
}

/// Runs the full simulation: routes every selected pair in parallel with
/// all per-hop checks, spot-checks the suffix property, and aggregates.
pub fn simulate(
    scheme: &Scheme,
    g: &UnitDiskGraph,
    oracle: &DistanceOracle,
    ports: &PortMap,
    selection: &PairSelection,
    instance: &str,
) -> Result<SimulationReport> {
    let n = g.n();
    let pairs = select_pairs(n, selection);
    let budget = 16 * n * scheme.levels();
    let started = Instant::now();

    let traces: Vec<(PairResult, Option<u32>)> = pairs
        .par_iter()
        .map(|&(s, t)| {
            let trace = route_checked(scheme, g, ports, s, t, budget)?;
            // Suffix property spot check: rerouting from a midpoint must
            // reproduce the original tail exactly.
            if (s as usize + 31 * t as usize).is_multiple_of(16) && trace.vertices.len() > 2 {
                let mid_idx = trace.vertices.len() / 2;
                let mid = trace.vertices[mid_idx];
                let tail = route_checked(scheme, g, ports, mid, t, budget)?;
                if tail.vertices != trace.vertices[mid_idx..] {
                    return Err(Error::AssertionViolation(format!(
                        "suffix property violated for {s} -> {t} at {mid}: {:?} vs {:?}",
                        tail.vertices,
                        &trace.vertices[mid_idx..]
                    )));
                }
            }
            let d = oracle.d(s, t);
            Ok((
                PairResult {
                    s,
                    t,
                    d,
                    delta: trace.delta,
                    stretch: trace.delta / d,
                    hops: trace.vertices.len() - 1,
                },
                trace.first_level,
            ))
        })
        .collect::<Result<_>>()?;
    let route_secs = started.elapsed().as_secs_f64();

    let eps = scheme.eps();
    let mut max_stretch = 1.0f64;
    let mut stretch_sum = 0.0;
    let mut max_hops = 0usize;
    let mut max_overshoot = 0.0f64;
    let mut kappa_level = 0.0f64;
    for (p, first_level) in &traces {
        max_stretch = max_stretch.max(p.stretch);
        stretch_sum += p.stretch;
        max_hops = max_hops.max(p.hops);
        max_overshoot = max_overshoot.max(p.delta - p.d);
        if let Some(k) = first_level {
            kappa_level = kappa_level.max((p.delta - p.d) / (eps * 2f64.powi(*k as i32)));
        }
    }

    let id_bits = crate::bits::bits_for(n as u64 - 1);
    let label_bits: Vec<usize> = (0..n as VertexId)
        .map(|v| scheme.label_bits(v, id_bits))
        .collect();
    let label_total_bits: usize = label_bits.iter().sum();
    let label_max_bits = label_bits.iter().copied().max().unwrap_or(0);

    let mut constants = MeasuredReport::default();
    match scheme {
        Scheme::Diam(s) => {
            let mut kd = 0.0f64;
            for (p, _) in &traces {
                kd = kd.max((p.stretch - 1.0) / s.cluster.eps);
            }
            constants.kappa_d = Some(kd);
        }
        Scheme::Add(a) => {
            let mut ka = 0.0f64;
            let mut kt = 0.0f64;
            let denom = a.eps * a.diam;
            for (p, _) in &traces {
                ka = ka.max((p.delta - p.d) / denom);
                let theta = a.decomposition.oracle_theta(p.s, p.t);
                kt = kt.max((theta - p.d) / denom);
            }
            constants.kappa_a = Some(ka);
            constants.kappa_theta = Some(kt);
            constants.tree_height = Some(a.decomposition.height);
            constants.max_portals = Some(a.decomposition.max_portals);
        }
        Scheme::Full(h) => {
            constants.beta = Some(h.measured_beta());
            constants.kappa_level = Some(kappa_level);
            let mut overlap = 0usize;
            for level in &h.levels {
                let mut count = vec![0usize; n];
                for c in &level.clusters {
                    for &v in &c.vertices {
                        count[v as usize] += 1;
                    }
                }
                overlap = overlap.max(count.into_iter().max().unwrap_or(0));
            }
            constants.overlap = Some(overlap);
        }
        Scheme::Store(_) => {
            constants.kappa_level = Some(kappa_level);
        }
    }

    let pair_count = traces.len();
    let pairs: Vec<PairResult> = traces.into_iter().map(|(p, _)| p).collect();
    Ok(SimulationReport {
        scheme: scheme.name().into(),
        instance: instance.into(),
        n,
        eps,
        pairs_mode: match selection {
            PairSelection::All => "all".into(),
            PairSelection::Sample { m, .. } => format!("sample-{m}"),
        },
        sample_seed: match selection {
            PairSelection::All => None,
            PairSelection::Sample { seed, .. } => Some(*seed),
        },
        pair_count,
        max_stretch,
        mean_stretch: stretch_sum / pair_count.max(1) as f64,
        max_hops,
        max_overshoot,
        label_max_bits,
        label_mean_bits: label_total_bits as f64 / n.max(1) as f64,
        label_total_bits,
        constants,
        pairs,
        route_secs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::additive::build_additive;
    use crate::gen::{generate, GenKind, GenParams};
    use crate::hierarchy::{preprocess, preprocess_fixed};
    use crate::lowdiam::build_lowdiam_labels;
    use crate::testutil::random_connected;

    fn setup(n: usize, side: f64, seed: u64) -> (UnitDiskGraph, DistanceOracle, PortMap) {
        let g = random_connected(n, side, seed);
        let oracle = DistanceOracle::build(&g);
        let ports = PortMap::assign(&g, seed);
        (g, oracle, ports)
    }

    #[test]
    fn additive_simulation_checks_every_hop_and_reports() {
        let (g, oracle, ports) = setup(70, 4.2, 2);
        let scheme = build_additive(&g, 0.25).unwrap();
        let report = simulate(
            &Scheme::Add(&scheme),
            &g,
            &oracle,
            &ports,
            &PairSelection::All,
            "test",
        )
        .unwrap();
        assert_eq!(report.pair_count, 70 * 69);
        assert!(report.max_stretch >= 1.0);
        assert!(report.pairs.iter().all(|p| p.stretch >= 1.0 - 1e-12));
        let ka = report.constants.kappa_a.unwrap();
        assert!(ka <= 16.0, "kappa_a budget exceeded: {ka}");
        let kt = report.constants.kappa_theta.unwrap();
        assert!(kt <= 8.0, "kappa_theta budget exceeded: {kt}");
        assert!(report.constants.tree_height.is_some());
        assert!(report.label_max_bits >= report.label_mean_bits as usize);
    }

    #[test]
    fn lowdiam_simulation_respects_its_stretch_bound() {
        let (g, oracle, ports) = setup(80, 4.0, 5);
        let scheme = build_lowdiam_labels(&g, 0.25).unwrap();
        let report = simulate(
            &Scheme::Diam(&scheme),
            &g,
            &oracle,
            &ports,
            &PairSelection::All,
            "test",
        )
        .unwrap();
        assert!(report.max_stretch <= 1.0 + 64.0 * 0.25);
        assert!(report.constants.kappa_d.unwrap() <= 64.0);
    }

    #[test]
    fn full_simulation_collects_level_constants() {
        let (g, oracle, ports) = setup(60, 3.8, 11);
        let scheme = preprocess_fixed(&g, 0.5).unwrap();
        let report = simulate(
            &Scheme::Full(&scheme),
            &g,
            &oracle,
            &ports,
            &PairSelection::All,
            "test",
        )
        .unwrap();
        assert!(report.constants.beta.unwrap() <= 4.0 + 1e-9);
        assert!(report.constants.overlap.unwrap() >= 1);
        assert!(report.constants.kappa_level.unwrap() <= 512.0);
    }

    #[test]
    fn calibrated_full_scheme_meets_target_on_generated_instances() {
        let inst = generate(GenKind::UniformSquare, 64, 9, &GenParams::default()).unwrap();
        let g = inst.graph().unwrap();
        let oracle = DistanceOracle::build(&g);
        let ports = PortMap::assign(&g, 1);
        let scheme = preprocess(&g, 0.5).unwrap();
        let report = simulate(
            &Scheme::Full(&scheme),
            &g,
            &oracle,
            &ports,
            &PairSelection::All,
            &inst.name,
        )
        .unwrap();
        assert!(report.max_stretch <= 1.5);
    }

    #[test]
    fn sampled_selection_is_deterministic_and_bounded() {
        let a = select_pairs(50, &PairSelection::Sample { m: 200, seed: 4 });
        let b = select_pairs(50, &PairSelection::Sample { m: 200, seed: 4 });
        assert_eq!(a, b);
        assert_eq!(a.len(), 200);
        assert!(a.iter().all(|&(s, t)| s != t && s < 50 && t < 50));
        let c = select_pairs(50, &PairSelection::Sample { m: 200, seed: 5 });
        assert_ne!(a, c);
        // Oversampling clamps to all pairs.
        let d = select_pairs(10, &PairSelection::Sample { m: 1000, seed: 0 });
        assert_eq!(d.len(), 90);
    }

    #[test]
    fn store_driven_routes_match_scheme_driven_routes() {
        let (g, oracle, ports) = setup(40, 3.2, 17);
        let scheme = preprocess_fixed(&g, 0.5).unwrap();
        let store = LabelStore::decode(&scheme.to_store(0).encode()).unwrap();
        let budget = 16 * g.n() * 8;
        for s in 0..g.n() as VertexId {
            for t in 0..g.n() as VertexId {
                if s == t {
                    continue;
                }
                let a = route_checked(&Scheme::Full(&scheme), &g, &ports, s, t, budget).unwrap();
                let b = route_checked(&Scheme::Store(&store), &g, &ports, s, t, budget).unwrap();
                assert_eq!(a.vertices, b.vertices);
            }
        }
        let _ = oracle;
    }

    #[test]
    fn reports_serialize_deterministically() {
        let (g, oracle, ports) = setup(30, 2.8, 23);
        let scheme = build_additive(&g, 0.5).unwrap();
        let run = || {
            simulate(
                &Scheme::Add(&scheme),
                &g,
                &oracle,
                &ports,
                &PairSelection::Sample { m: 100, seed: 8 },
                "det",
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.json(), b.json());
        assert_eq!(a.csv(), b.csv());
        assert!(a.csv().lines().count() == 101);
        assert!(a.json().contains("\"kappa_a\""));
    }

    #[test]
    fn rejects_self_pairs_and_caps_runaway_routes() {
        let (g, _oracle, ports) = setup(20, 2.4, 29);
        let scheme = preprocess_fixed(&g, 0.5).unwrap();
        assert!(matches!(
            route_checked(&Scheme::Full(&scheme), &g, &ports, 3, 3, 100),
            Err(Error::IncompatibleLabels(_))
        ));
        // An absurdly small budget must surface as NonTermination, not
        // a silent wrong answer.
        let far = (0..g.n() as VertexId)
            .max_by(|&a, &b| {
                let d = DistanceOracle::build(&g);
                d.d(0, a).total_cmp(&d.d(0, b))
            })
            .unwrap();
        match route_checked(&Scheme::Full(&scheme), &g, &ports, 0, far, 1) {
            Err(Error::NonTermination { .. }) => {}
            Ok(trace) => assert!(trace.vertices.len() <= 2),
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn port_permutation_changes_nothing_at_the_vertex_level() {
        let (g, _oracle, _ports) = setup(45, 3.4, 31);
        let scheme = preprocess_fixed(&g, 0.5).unwrap();
        let pa = PortMap::assign(&g, 100);
        let pb = PortMap::assign(&g, 200);
        let budget = 16 * g.n() * 8;
        for &(s, t) in select_pairs(g.n(), &PairSelection::Sample { m: 300, seed: 6 }).iter() {
            let a = route_checked(&Scheme::Full(&scheme), &g, &pa, s, t, budget).unwrap();
            let b = route_checked(&Scheme::Full(&scheme), &g, &pb, s, t, budget).unwrap();
            assert_eq!(
                a.vertices, b.vertices,
                "ports leaked into routing for ({s},{t})"
            );
        }
    }
}
