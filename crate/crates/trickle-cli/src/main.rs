//! Command-line harness: simulation, exact rational tables, and the
//! verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 enumeration budget exceeded.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use trickle::bijections::composition_decode;
use trickle::boundary::empirical_ratios;
use trickle::engine::{replica_seed, state_to_tree, ChainModel, Trickler};
use trickle::kernels::product_martin_kernel;
use trickle::numeric::{format_rat, parse_rat, rat_to_f64};
use trickle::oracle::{exact_hit_probability, exact_tree_distribution};
use trickle::routing::RoutingChainSpec;
use trickle::substrate::{format_word, GraphKind, VertexId};
use trickle::TrickleError;

#[derive(Parser)]
#[command(name = "trickle", version, about = "Trickle-down chains: simulation, exact tables, verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Tsv,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Chain family: bst, dirichlet, rrt, crp, mallows, qbinomial,
    /// catalan, composition, quincunx
    #[arg(long)]
    family: String,
    /// Mallows parameter p (rational, e.g. 1/3)
    #[arg(long)]
    p: Option<String>,
    /// q-binomial parameter q
    #[arg(long)]
    q: Option<String>,
    /// q-binomial parameter r
    #[arg(long)]
    r: Option<String>,
    /// CRP discount alpha
    #[arg(long)]
    alpha: Option<String>,
    /// CRP strength theta
    #[arg(long)]
    theta: Option<String>,
    /// Dirichlet urn weights, comma separated rationals (e.g. "1,1")
    #[arg(long)]
    nu: Option<String>,
    /// Step law for the grid walk, comma separated rationals summing to 1
    #[arg(long)]
    walk: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate replicas of a chain and report final-state diagnostics
    Simulate {
        #[command(flatten)]
        family: FamilyArgs,
        /// Number of time steps per replica
        #[arg(long)]
        n: u64,
        /// Number of independent replicas
        #[arg(long, default_value_t = 1)]
        replicas: u64,
        /// Master seed; per-replica streams are derived stably from it
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Depth for the empirical boundary-ratio report
        #[arg(long, default_value_t = 2)]
        report_depth: usize,
        /// Also dump one record per step
        #[arg(long)]
        trajectory: bool,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
    },
    /// Exact rational tables: distributions, hitting probabilities, kernels
    Exact {
        #[command(flatten)]
        family: FamilyArgs,
        /// dist, hit, or kernel
        #[arg(long)]
        mode: String,
        /// Time for dist mode
        #[arg(long)]
        n: Option<u64>,
        /// Source tree (comma-separated vertex words) for hit/kernel
        #[arg(long)]
        s: Option<String>,
        /// Target tree for hit/kernel
        #[arg(long)]
        t: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
    },
    /// Run a verification suite: kernels, harmonicity, or statistics
    Verify {
        /// Suite name
        suite: String,
        /// Monte-Carlo sample budget for the statistics suite
        #[arg(long, default_value_t = 100_000.0)]
        budget: f64,
    },
}

fn build_model(args: &FamilyArgs) -> Result<ChainModel, TrickleError> {
    let need = |opt: &Option<String>, name: &str| {
        opt.clone().ok_or_else(|| {
            TrickleError::InvalidParameter(format!("--{name} is required for this family"))
        })
    };
    let rational_list = |s: &str| -> Result<Vec<_>, TrickleError> {
        s.split(',').map(|p| parse_rat(p.trim())).collect()
    };
    match args.family.as_str() {
        "bst" => ChainModel::new(
            GraphKind::BinaryTree,
            RoutingChainSpec::DirichletUrn {
                nu: vec![parse_rat("1")?, parse_rat("1")?],
            },
        ),
        "dirichlet" => {
            let nu = rational_list(&need(&args.nu, "nu")?)?;
            let kind = match nu.len() {
                2 => GraphKind::BinaryTree,
                k => GraphKind::HarrisUlam(Some(k as u32)),
            };
            ChainModel::new(kind, RoutingChainSpec::DirichletUrn { nu })
        }
        "rrt" => ChainModel::new(
            GraphKind::HarrisUlam(None),
            RoutingChainSpec::CrpBlocks { alpha: parse_rat("0")?, theta: parse_rat("1")? },
        ),
        "crp" => {
            let alpha = parse_rat(&need(&args.alpha, "alpha")?)?;
            let theta = parse_rat(&need(&args.theta, "theta")?)?;
            let kind = match trickle::routing::crp_block_cap(&alpha, &theta) {
                Some(m) => GraphKind::HarrisUlam(Some(m as u32)),
                None => GraphKind::HarrisUlam(None),
            };
            ChainModel::new(kind, RoutingChainSpec::CrpBlocks { alpha, theta })
        }
        "mallows" => ChainModel::new(
            GraphKind::BinaryTree,
            RoutingChainSpec::MallowsUrn { p: parse_rat(&need(&args.p, "p")?)? },
        ),
        "qbinomial" => ChainModel::new(
            GraphKind::BinaryTree,
            RoutingChainSpec::QBinomialUrn {
                q: parse_rat(&need(&args.q, "q")?)?,
                r: parse_rat(&need(&args.r, "r")?)?,
            },
        ),
        "catalan" => ChainModel::new(GraphKind::BinaryTree, RoutingChainSpec::CatalanUrn),
        "composition" => {
            ChainModel::new(GraphKind::BinaryTree, RoutingChainSpec::SingleTrailHalf)
        }
        "quincunx" | "grid" => {
            let p = match &args.walk {
                Some(s) => rational_list(s)?,
                None => vec![parse_rat("1/2")?, parse_rat("1/2")?],
            };
            ChainModel::new(GraphKind::Grid2D, RoutingChainSpec::BernoulliWalk { p })
        }
        other => Err(TrickleError::InvalidParameter(format!("unknown family {other:?}"))),
    }
}

fn exit_for(err: &TrickleError) -> ExitCode {
    match err {
        TrickleError::BudgetExceeded(_) => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, TrickleError> {
    match cli.command {
        Command::Simulate {
            family,
            n,
            replicas,
            seed,
            report_depth,
            trajectory,
            format,
        } => {
            let model = build_model(&family)?;
            simulate(model, n, replicas, seed, report_depth, trajectory, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Exact { family, mode, n, s, t, format } => {
            let model = build_model(&family)?;
            exact(model, &mode, n, s, t, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, budget } => {
            match trickle::checks::run_suite(&suite, budget as u64) {
                None => {
                    eprintln!(
                        "error: unknown suite {suite:?}; available: {}",
                        trickle::checks::suite_names().join(", ")
                    );
                    Ok(ExitCode::from(2))
                }
                Some(results) => {
                    let mut any_failed = false;
                    for r in &results {
                        let status = if r.passed { "PASS" } else { "FAIL" };
                        let detail = if r.detail.is_empty() {
                            String::new()
                        } else {
                            format!("  {}", r.detail)
                        };
                        println!("{status}  {}  ({} ms){detail}", r.name, r.millis);
                        any_failed |= !r.passed;
                    }
                    Ok(if any_failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
                }
            }
        }
    }
}

struct ReplicaReport {
    replica: u64,
    steps: Vec<trickle::engine::StepRecord>,
    tree: Option<String>,
    state_dump: Vec<(String, Vec<u64>)>,
    ratios: BTreeMap<String, String>,
    spine: String,
    frozen_half: bool,
    vertices: u64,
}

fn simulate(
    model: ChainModel,
    n: u64,
    replicas: u64,
    seed: u64,
    report_depth: usize,
    trajectory: bool,
    format: Format,
) -> Result<(), TrickleError> {
    let reports: Vec<ReplicaReport> = (0..replicas)
        .into_par_iter()
        .map(|idx| {
            let mut sim = Trickler::new(model.clone(), replica_seed(seed, idx));
            let mut steps = Vec::new();
            // track which root slots move during the second half
            let mut late_moves = [false; 2];
            let mut prev_root = sim.state.routing(&VertexId::root());
            while sim.state.time() < n {
                let rec = sim.step();
                let root = sim.state.routing(&VertexId::root());
                if rec.n > n / 2 {
                    for slot in 0..2 {
                        if root.get(slot) > prev_root.get(slot) {
                            late_moves[slot.min(1)] = true;
                        }
                    }
                }
                prev_root = root;
                if trajectory {
                    steps.push(rec);
                }
            }
            let kind = model.kind;
            let (tree, ratios, spine) = if kind.is_tree() {
                let t = state_to_tree(&kind, &sim.state).expect("tree substrate");
                let ratios = empirical_ratios(&kind, &t, report_depth)
                    .into_iter()
                    .map(|(u, r)| (format_word(&u), format_rat(&r)))
                    .collect();
                // greedy spine: follow the child with the largest subtree
                let mut spine = VertexId::root();
                while spine.depth() < report_depth.max(8) {
                    let mut best: Option<(u64, VertexId)> = None;
                    for v in kind.children(&spine).take(16) {
                        let c = t.subtree_count(&v);
                        if c > 0 && best.as_ref().map_or(true, |(b, _)| c > *b) {
                            best = Some((c, v));
                        }
                    }
                    match best {
                        Some((_, v)) => spine = v,
                        None => break,
                    }
                }
                (Some(t.serialize()), ratios, format_word(&spine))
            } else {
                (None, BTreeMap::new(), String::new())
            };
            let state_dump = sim
                .state
                .per_vertex
                .iter()
                .map(|(u, c)| (kind.format_vertex(u), c.0.clone()))
                .collect();
            ReplicaReport {
                replica: idx,
                steps,
                tree,
                state_dump,
                ratios,
                spine,
                frozen_half: !(late_moves[0] && late_moves[1]),
                vertices: sim.state.particles_fed(),
            }
        })
        .collect();

    for r in reports {
        if trajectory {
            for s in &r.steps {
                match format {
                    Format::Jsonl => println!(
                        "{}",
                        serde_json::json!({
                            "replica": r.replica,
                            "n": s.n,
                            "new_vertex": model.kind.format_vertex(&s.new_vertex),
                            "occupied_count": s.occupied_count,
                        })
                    ),
                    Format::Tsv => println!(
                        "step\t{}\t{}\t{}\t{}",
                        r.replica,
                        s.n,
                        model.kind.format_vertex(&s.new_vertex),
                        s.occupied_count
                    ),
                }
            }
        }
        match format {
            Format::Jsonl => {
                let mut obj = serde_json::json!({
                    "replica": r.replica,
                    "n": n,
                    "particles": r.vertices,
                    "ratios": r.ratios,
                    "spine": r.spine,
                    "frozen_half": r.frozen_half,
                });
                if let Some(tree) = &r.tree {
                    obj["tree"] = serde_json::json!(tree);
                } else {
                    obj["state"] = serde_json::json!(r
                        .state_dump
                        .iter()
                        .map(|(u, c)| format!(
                            "{u}:{}",
                            c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                        ))
                        .collect::<Vec<_>>());
                }
                println!("{obj}");
            }
            Format::Tsv => {
                let ratios = r
                    .ratios
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(";");
                let body = r.tree.unwrap_or_else(|| {
                    r.state_dump
                        .iter()
                        .map(|(u, c)| {
                            format!(
                                "{u}:{}",
                                c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                            )
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                });
                println!(
                    "replica\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    r.replica, n, r.vertices, body, ratios, r.spine, r.frozen_half
                );
            }
        }
    }
    Ok(())
}

fn exact(
    model: ChainModel,
    mode: &str,
    n: Option<u64>,
    s: Option<String>,
    t: Option<String>,
    format: Format,
) -> Result<(), TrickleError> {
    match mode {
        "dist" => {
            let n = n.ok_or_else(|| {
                TrickleError::InvalidParameter("--n is required for dist mode".into())
            })?;
            if model.kind.is_tree() {
                let dist = exact_tree_distribution(&model, n, None)?;
                for (tree, mass) in dist {
                    let extra = if matches!(model.spec, RoutingChainSpec::SingleTrailHalf) {
                        let word = trail_digits(&tree);
                        let comp = composition_decode(&word);
                        Some(
                            comp.0
                                .iter()
                                .map(|p| p.to_string())
                                .collect::<Vec<_>>()
                                .join("+"),
                        )
                    } else {
                        None
                    };
                    match format {
                        Format::Jsonl => {
                            let mut obj = serde_json::json!({
                                "tree": tree.serialize(),
                                "mass": format_rat(&mass),
                            });
                            if let Some(c) = extra {
                                obj["composition"] = serde_json::json!(c);
                            }
                            println!("{obj}");
                        }
                        Format::Tsv => match extra {
                            Some(c) => println!("{}\t{}\t{}", tree.serialize(), format_rat(&mass), c),
                            None => println!("{}\t{}", tree.serialize(), format_rat(&mass)),
                        },
                    }
                }
            } else {
                let dist = trickle::oracle::exact_distribution(&model, n, None)?;
                for (state, mass) in dist {
                    let cells: Vec<String> = state
                        .per_vertex
                        .iter()
                        .map(|(u, c)| {
                            format!(
                                "{}:{}",
                                model.kind.format_vertex(u),
                                c.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                            )
                        })
                        .collect();
                    match format {
                        Format::Jsonl => println!(
                            "{}",
                            serde_json::json!({"state": cells, "mass": format_rat(&mass)})
                        ),
                        Format::Tsv => println!("{}\t{}", cells.join(" "), format_rat(&mass)),
                    }
                }
            }
        }
        "hit" | "kernel" => {
            let parse_tree = |arg: Option<String>, name: &str| {
                arg.ok_or_else(|| {
                    TrickleError::InvalidParameter(format!("--{name} is required for {mode} mode"))
                })
                .and_then(|v| trickle::engine::Tree::parse(&v))
            };
            let ts = parse_tree(s, "s")?;
            let tt = parse_tree(t, "t")?;
            let x = trickle::engine::tree_to_state(&model.kind, &ts)?;
            let y = trickle::engine::tree_to_state(&model.kind, &tt)?;
            let value = if mode == "hit" {
                exact_hit_probability(&model, &x, &y, None)?
            } else {
                product_martin_kernel(&model, &x, &y)
            };
            match format {
                Format::Jsonl => println!(
                    "{}",
                    serde_json::json!({
                        "s": ts.serialize(),
                        "t": tt.serialize(),
                        "mode": mode,
                        "value": format_rat(&value),
                        "approx": rat_to_f64(&value),
                    })
                ),
                Format::Tsv => println!("{}", format_rat(&value)),
            }
        }
        other => {
            return Err(TrickleError::InvalidParameter(format!(
                "unknown mode {other:?}; expected dist, hit, or kernel"
            )))
        }
    }
    Ok(())
}

fn trail_digits(tree: &trickle::engine::Tree) -> Vec<u8> {
    // the single-trail tree is a root path; read its digits
    let mut at = VertexId::root();
    let mut out = Vec::new();
    loop {
        let mut next = None;
        for c in 0..2u32 {
            if tree.contains(&at.child(c)) {
                next = Some(at.child(c));
                out.push(c as u8);
                break;
            }
        }
        match next {
            Some(v) => at = v,
            None => return out,
        }
    }
}
