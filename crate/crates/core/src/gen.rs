//! Deterministic instance generators for the simulation harness.
//!
//! Five families cover the interesting regimes: uniform density, heavy
//! clustering, near-regular grids, a serpentine corridor whose graph
//! diameter dwarfs its bounding box (stressing covers and separators),
//! and plain paths for exactness baselines. Every generator is a pure
//! function of `(kind, n, seed, params)`; kinds that rely on randomness
//! retry with a densified layout until the disk graph is connected.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Site, UnitDiskGraph, VertexId};

/// Generator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    /// `n` points uniform in a square sized for `density` points per
    /// unit area.
    UniformSquare,
    /// Gaussian blobs strung along a random walk.
    ClusteredGaussian,
    /// A near-square grid with per-point jitter.
    GridPerturbed,
    /// A serpentine corridor: long rows at a vertical gap just over the
    /// disk radius, joined by single midpoints at alternating ends.
    Snake,
    /// Evenly spaced points on a line (the path graph for spacings in
    /// `(1/2, 1]`).
    LinePath,
}

impl GenKind {
    pub const ALL: [GenKind; 5] = [
        GenKind::UniformSquare,
        GenKind::ClusteredGaussian,
        GenKind::GridPerturbed,
        GenKind::Snake,
        GenKind::LinePath,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GenKind::UniformSquare => "uniform-square",
            GenKind::ClusteredGaussian => "clustered-gaussian",
            GenKind::GridPerturbed => "grid-perturbed",
            GenKind::Snake => "snake",
            GenKind::LinePath => "line-path",
        }
    }

    pub fn parse(s: &str) -> Result<GenKind> {
        GenKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown generator kind {s:?}; expected one of {:?}",
                    GenKind::ALL.map(|k| k.name())
                ))
            })
    }
}

/// Scale parameters; the defaults produce comfortably connected
/// instances at every supported size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    /// Points per unit area (uniform square).
    pub density: f64,
    /// Consecutive-point spacing (line path, snake rows).
    pub spacing: f64,
    /// Blob count for the clustered kind; `0` picks `max(2, n / 24)`.
    pub clusters: usize,
    /// Maximum per-coordinate jitter of the perturbed grid.
    pub jitter: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            density: 4.0,
            spacing: 0.8,
            clusters: 0,
            jitter: 0.2,
        }
    }
}

/// A generated instance: the sites plus everything needed to regenerate
/// them.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub kind: GenKind,
    pub n: usize,
    pub seed: u64,
    pub params: GenParams,
    pub sites: Vec<Site>,
}

impl Instance {
    /// Builds the (connected, by construction) unit disk graph.
    pub fn graph(&self) -> Result<UnitDiskGraph> {
        UnitDiskGraph::build(&self.sites)
    }
}

/// Generates a connected instance, retrying randomized layouts with a
/// gentle densification schedule until the disk graph is connected.
pub fn generate(kind: GenKind, n: usize, seed: u64, params: &GenParams) -> Result<Instance> {
    if n < 2 {
        return Err(Error::GenerationFailed(format!(
            "need at least 2 sites, got {n}"
        )));
    }
    let budget = 200;
    for attempt in 0..budget {
        // Every retry shrinks the layout a little, so success is
        // guaranteed eventually even for unlucky seeds.
        let shrink = 1.0 / (1.0 + 0.02 * attempt as f64);
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ (attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let sites = match kind {
            GenKind::UniformSquare => {
                uniform_square(n, params.density / (shrink * shrink), &mut rng)
            }
            GenKind::ClusteredGaussian => clustered_gaussian(n, params.clusters, shrink, &mut rng),
            GenKind::GridPerturbed => grid_perturbed(n, params.jitter, shrink, &mut rng),
            GenKind::Snake => snake(n, params.spacing),
            GenKind::LinePath => line_path(n, params.spacing),
        };
        if UnitDiskGraph::build(&sites).is_ok() {
            return Ok(Instance {
                name: format!("{}-n{}-s{}", kind.name(), n, seed),
                kind,
                n,
                seed,
                params: *params,
                sites,
            });
        }
        if matches!(kind, GenKind::Snake | GenKind::LinePath) {
            // Deterministic layouts cannot be rescued by retrying.
            break;
        }
    }
    Err(Error::GenerationFailed(format!(
        "{} with n = {n}, seed = {seed} stayed disconnected after {budget} attempts",
        kind.name()
    )))
}

fn uniform_square(n: usize, density: f64, rng: &mut ChaCha8Rng) -> Vec<Site> {
    let side = (n as f64 / density).sqrt().max(f64::EPSILON);
    (0..n)
        .map(|id| Site {
            id: id as VertexId,
            x: rng.random_range(0.0..side),
            y: rng.random_range(0.0..side),
        })
        .collect()
}

/// One standard normal sample (Box-Muller).
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn clustered_gaussian(n: usize, clusters: usize, shrink: f64, rng: &mut ChaCha8Rng) -> Vec<Site> {
    let k = if clusters == 0 {
        (n / 24).max(2)
    } else {
        clusters.max(1)
    };
    // Blob centers on a random walk with sub-disk steps, so consecutive
    // blobs stay within reach of each other.
    let mut centers = Vec::with_capacity(k);
    let (mut cx, mut cy) = (0.0f64, 0.0f64);
    for _ in 0..k {
        centers.push((cx, cy));
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let step = rng.random_range(0.5..1.2) * shrink;
        cx += step * angle.cos();
        cy += step * angle.sin();
    }
    let sigma = 0.45 * shrink;
    (0..n)
        .map(|id| {
            let (bx, by) = centers[id % k];
            Site {
                id: id as VertexId,
                x: bx + sigma * normal(rng),
                y: by + sigma * normal(rng),
            }
        })
        .collect()
}

fn grid_perturbed(n: usize, jitter: f64, shrink: f64, rng: &mut ChaCha8Rng) -> Vec<Site> {
    let cols = (n as f64).sqrt().ceil() as usize;
    let pitch = 0.7 * shrink;
    let j = jitter * shrink;
    (0..n)
        .map(|id| Site {
            id: id as VertexId,
            x: (id % cols) as f64 * pitch + rng.random_range(-j..=j),
            y: (id / cols) as f64 * pitch + rng.random_range(-j..=j),
        })
        .collect()
}

fn line_path(n: usize, spacing: f64) -> Vec<Site> {
    (0..n)
        .map(|id| Site {
            id: id as VertexId,
            x: id as f64 * spacing,
            y: 0.0,
        })
        .collect()
}

/// Rows spaced `1.4` apart vertically (no edges between rows) joined at
/// alternating ends by a single midpoint `0.7` from both row ends. The
/// resulting graph is exactly a path, so the graph diameter grows with
/// `n` while the bounding box only grows with `sqrt(n)`.
fn snake(n: usize, spacing: f64) -> Vec<Site> {
    let gap = 1.4;
    // Balance the bounding box: row width ~ spacing * cols matches the
    // stacked height ~ gap * rows.
    let cols = ((gap * n as f64 / spacing).sqrt().ceil() as usize).max(2);
    let mut sites = Vec::with_capacity(n);
    let mut row = 0usize;
    while sites.len() < n {
        let y = row as f64 * gap;
        for c in 0..cols {
            if sites.len() == n {
                break;
            }
            let col = if row.is_multiple_of(2) { c } else { cols - 1 - c };
            sites.push(Site {
                id: sites.len() as VertexId,
                x: col as f64 * spacing,
                y,
            });
        }
        if sites.len() < n {
            // The turn midpoint sits at the end the row finished on.
            let x = if row.is_multiple_of(2) {
                (cols - 1) as f64 * spacing
            } else {
                0.0
            };
            sites.push(Site {
                id: sites.len() as VertexId,
                x,
                y: y + gap / 2.0,
            });
        }
        row += 1;
    }
    sites
}
