//! Command-line harness: generate instances, build label stores, route
//! single pairs, benchmark stretch over many pairs, and run structural
//! verification. Exits nonzero when any checked property fails.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use diskroute_core::additive::build_additive;
use diskroute_core::gen::{generate, GenKind, GenParams};
use diskroute_core::geometry::{parse_instance, write_instance, DistanceOracle};
use diskroute_core::hierarchy::{preprocess, preprocess_fixed, LabelStore};
use diskroute_core::lowdiam::build_lowdiam_labels;
use diskroute_core::sim::{route_checked, simulate, PairSelection, Scheme};
use diskroute_core::verify::{verify, Component};
use diskroute_core::{PortMap, UnitDiskGraph, VertexId};

#[derive(Parser)]
#[command(
    name = "diskroute",
    version,
    about = "Compact headerless routing on unit disk graphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a connected instance and write it as a site file.
    Gen {
        /// Generator kind: uniform-square, clustered-gaussian,
        /// grid-perturbed, snake, line-path.
        #[arg(long)]
        kind: String,
        /// Number of sites (at least 2).
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sites per unit area (uniform-square).
        #[arg(long, default_value_t = 4.0)]
        density: f64,
        /// Neighbor spacing (line-path, snake).
        #[arg(long, default_value_t = 0.8)]
        spacing: f64,
        /// Cluster count (clustered-gaussian; 0 picks one from n).
        #[arg(long, default_value_t = 0)]
        clusters: usize,
        /// Perturbation amplitude (grid-perturbed).
        #[arg(long, default_value_t = 0.2)]
        jitter: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Preprocess an instance into a binary label store.
    Build {
        /// Instance site file (as written by `gen`).
        instance: PathBuf,
        /// Target stretch parameter in (0, 1].
        #[arg(long, default_value_t = 0.5)]
        eps_target: f64,
        /// Treat eps-target as the internal parameter, skipping
        /// calibration (larger scales, smaller labels).
        #[arg(long)]
        fixed_internal: bool,
        /// Seed for the fixed port permutation recorded in the store.
        #[arg(long, default_value_t = 0)]
        port_seed: u64,
        /// Output store file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Route one pair from a label store and print the hop trace.
    Route {
        /// Label store file (as written by `build`).
        labels: PathBuf,
        /// The instance the store was built from.
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        s: VertexId,
        #[arg(long)]
        t: VertexId,
    },
    /// Simulate routing over many pairs and report stretch metrics.
    Bench {
        /// Instance site file.
        instance: PathBuf,
        /// Scheme to drive: full, lowdiam or additive.
        #[arg(long, default_value = "full")]
        scheme: String,
        /// Target stretch parameter; for lowdiam/additive this is the
        /// scheme parameter itself.
        #[arg(long, default_value_t = 0.5)]
        eps_target: f64,
        /// Skip calibration for the full scheme (see `build`).
        #[arg(long)]
        fixed_internal: bool,
        /// Sample size; all pairs when omitted and n <= 512, else
        /// 10000 sampled pairs.
        #[arg(long)]
        pairs: Option<usize>,
        /// Sample seed (recorded in the report).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Port permutation seed.
        #[arg(long, default_value_t = 0)]
        port_seed: u64,
        /// Write per-pair rows as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write aggregates + measured constants as JSON here; stdout
        /// when omitted.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run named structural checks; nonzero exit on any failure.
    Verify {
        /// Instance site file.
        instance: PathBuf,
        /// Comma-separated component list: spanner, cover, backbone,
        /// decomposition, tree-labels. All when omitted.
        #[arg(long, value_delimiter = ',')]
        components: Vec<String>,
        /// Stretch parameter the structures are built with.
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        /// Write the full report as JSON here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Directory for replayable counterexample dumps on failure.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
    },
}

fn load_graph(path: &Path) -> Result<UnitDiskGraph> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading instance {}", path.display()))?;
    let sites = parse_instance(&text)?;
    Ok(UnitDiskGraph::build(&sites)?)
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Gen {
            kind,
            n,
            seed,
            density,
            spacing,
            clusters,
            jitter,
            out,
        } => {
            let kind = GenKind::parse(&kind)
                .with_context(|| format!("unknown generator kind '{kind}'"))?;
            let params = GenParams {
                density,
                spacing,
                clusters,
                jitter,
            };
            let inst = generate(kind, n, seed, &params)?;
            let text = write_instance(&inst.sites);
            match out {
                Some(path) => {
                    fs::write(&path, text)
                        .with_context(|| format!("writing {}", path.display()))?;
                    eprintln!("{}: {} sites -> {}", inst.name, n, path.display());
                }
                None => print!("{text}"),
            }
        }

        Cmd::Build {
            instance,
            eps_target,
            fixed_internal,
            port_seed,
            out,
        } => {
            let g = load_graph(&instance)?;
            let scheme = if fixed_internal {
                preprocess_fixed(&g, eps_target)?
            } else {
                preprocess(&g, eps_target)?
            };
            let store = scheme.to_store(port_seed);
            let bytes = store.encode();
            fs::write(&out, &bytes).with_context(|| format!("writing {}", out.display()))?;
            println!(
                "{}",
                serde_json::json!({
                    "instance": instance_name(&instance),
                    "n": g.n(),
                    "eps_target": scheme.config.eps_target,
                    "eps_internal": scheme.config.eps_internal,
                    "levels": scheme.config.num_levels(),
                    "max_label_bits": scheme.max_label_bits(),
                    "mean_label_bits": scheme.avg_label_bits(),
                    "store_bytes": bytes.len(),
                    "out": out.display().to_string(),
                })
            );
        }

        Cmd::Route {
            labels,
            instance,
            s,
            t,
        } => {
            let g = load_graph(&instance)?;
            let bytes =
                fs::read(&labels).with_context(|| format!("reading {}", labels.display()))?;
            let store = LabelStore::decode(&bytes)?;
            if store.header.n != g.n() {
                bail!(
                    "store was built for {} vertices, instance has {}",
                    store.header.n,
                    g.n()
                );
            }
            let ports = PortMap::assign(&g, store.header.port_seed);
            let budget = 16 * g.n() * 16;
            let trace = route_checked(&Scheme::Store(&store), &g, &ports, s, t, budget)?;
            println!("hop,vertex,port,edge,total");
            let mut total = 0.0;
            println!("0,{s},,,0");
            for (i, pair) in trace.vertices.windows(2).enumerate() {
                let port = ports.port_to(pair[0], pair[1]).expect("hop along an edge");
                let w = g.edge_weight(pair[0], pair[1]).expect("hop along an edge");
                total += w;
                println!("{},{},{port},{w},{total}", i + 1, pair[1]);
            }
            eprintln!(
                "routed {} -> {} in {} hops, length {}",
                s,
                t,
                trace.vertices.len() - 1,
                trace.delta
            );
        }

        Cmd::Bench {
            instance,
            scheme,
            eps_target,
            fixed_internal,
            pairs,
            seed,
            port_seed,
            csv,
            json,
        } => {
            let g = load_graph(&instance)?;
            let oracle = DistanceOracle::build(&g);
            let ports = PortMap::assign(&g, port_seed);
            let selection = match pairs {
                Some(m) => PairSelection::Sample { m, seed },
                None if g.n() <= 512 => PairSelection::All,
                None => PairSelection::Sample { m: 10_000, seed },
            };
            let name = instance_name(&instance);
            let report = match scheme.as_str() {
                "full" => {
                    let s = if fixed_internal {
                        preprocess_fixed(&g, eps_target)?
                    } else {
                        preprocess(&g, eps_target)?
                    };
                    simulate(&Scheme::Full(&s), &g, &oracle, &ports, &selection, &name)?
                }
                "lowdiam" => {
                    let s = build_lowdiam_labels(&g, eps_target)?;
                    simulate(&Scheme::Diam(&s), &g, &oracle, &ports, &selection, &name)?
                }
                "additive" => {
                    let s = build_additive(&g, eps_target)?;
                    simulate(&Scheme::Add(&s), &g, &oracle, &ports, &selection, &name)?
                }
                other => bail!("unknown scheme '{other}' (full, lowdiam or additive)"),
            };
            if let Some(path) = csv {
                fs::write(&path, report.csv())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            match json {
                Some(path) => {
                    fs::write(&path, report.json())
                        .with_context(|| format!("writing {}", path.display()))?;
                    eprintln!(
                        "{}: {} pairs, max stretch {}, {:.2}s routing",
                        report.instance, report.pair_count, report.max_stretch, report.route_secs
                    );
                }
                None => println!("{}", report.json()),
            }
        }

        Cmd::Verify {
            instance,
            components,
            eps,
            json,
            dump_dir,
        } => {
            let g = load_graph(&instance)?;
            let selected: Vec<Component> = if components.is_empty() {
                Component::ALL.to_vec()
            } else {
                components
                    .iter()
                    .map(|s| {
                        Component::parse(s).with_context(|| format!("unknown component '{s}'"))
                    })
                    .collect::<Result<_>>()?
            };
            let report = verify(&g, eps, &selected, &instance_name(&instance));
            print!("{}", report.summary());
            if let Some(path) = json {
                fs::write(&path, report.json())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if !report.passed() {
                if let Some(dir) = dump_dir {
                    fs::create_dir_all(&dir)
                        .with_context(|| format!("creating {}", dir.display()))?;
                    for check in report.checks.iter().filter(|c| !c.passed) {
                        if let Some(ce) = &check.counterexample {
                            let base = dir.join(&check.name);
                            fs::write(base.with_extension("instance"), &ce.instance)?;
                            fs::write(base.with_extension("txt"), &ce.detail)?;
                            eprintln!(
                                "counterexample for {} -> {}",
                                check.name,
                                base.with_extension("instance").display()
                            );
                        }
                    }
                }
                eprintln!("verification failed");
                std::process::exit(1);
            }
        }
    }
    Ok(())
}
