//! Command-line workbench over the switch-chain library: argument parsing,
//! graph and state file loading, and JSON artifact assembly. Every artifact
//! embeds its originating config and the crate version and contains no
//! wall-clock fields, so re-running a command with identical arguments
//! produces byte-identical output.

pub mod reproduce;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use hamswitch_core::analysis::{
    check_irreducible, enumerate_ham_cycles, enumerate_ham_paths, enumerate_states,
    enumerate_two_factors, find_ham_cycle, mixing_empirical, mixing_exact, verify_kernel,
    EmpiricalMixReport, StateGraph, DEFAULT_DENSE_CAP, DEFAULT_ENUM_CAP,
};
use hamswitch_core::error::{Error, Result};
use hamswitch_core::families::{
    build_gadget_x, build_locked_example, build_parity_example, build_random_dense,
    build_staircase, ColoredGraph,
};
use hamswitch_core::graph::{
    symmetric_difference_size, EdgeSet, Graph, HamCycle, TwoFactor,
};
use hamswitch_core::io::{read_edge_set, read_graph};
use hamswitch_core::js_chain::{
    js_state_graph, js_step, repair, AlmostTwoFactor, Deficit, JsDistance,
};
use hamswitch_core::monotone::{phi, phi1_inverse, validate_monotone};
use hamswitch_core::reconfigure::{transform_2factor, transform_ham, TransformTrace};
use hamswitch_core::switch::{run_chain, theta, ChainConfig, TargetClass};
use hamswitch_core::VERSION;

#[derive(Parser)]
#[command(
    name = "hamswitch",
    version = VERSION,
    about = "Switch Markov chains on Hamiltonian cycles and 2-factors: sampling, \
             constructive transforms, counterexample families, monotone embedding, \
             the auxiliary add/delete chain, and exact enumeration/mixing analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run the k-switch chain and record the full trajectory
    Sample(SampleArgs),
    /// Build a deterministic switch sequence between two states of a class
    Transform(TransformArgs),
    /// Generate a named graph family plus a certified-properties sidecar
    Family(FamilyArgs),
    /// Embed a 2-factor of a monotone bipartite graph into a Hamiltonian cycle
    MonotoneEmbed(MonotoneEmbedArgs),
    /// Walk or exactly analyze the add/delete chain on almost-2-factors
    Js(JsArgs),
    /// Exhaustively enumerate a state class
    Enumerate(EnumerateArgs),
    /// Build the exact k-switch state graph and check connectivity/kernel
    Stategraph(StategraphArgs),
    /// Spectral and empirical mixing analysis of the exact chain
    Mix(MixArgs),
    /// Re-run a canned verification pipeline by claim id
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ClassArg {
    #[value(name = "ham")]
    #[serde(rename = "ham")]
    Ham,
    #[value(name = "2factor")]
    #[serde(rename = "2factor")]
    TwoFactor,
}

impl From<ClassArg> for TargetClass {
    fn from(c: ClassArg) -> TargetClass {
        match c {
            ClassArg::Ham => TargetClass::HamiltonianCycles,
            ClassArg::TwoFactor => TargetClass::TwoFactors,
        }
    }
}

#[derive(Args, Serialize)]
pub struct SampleArgs {
    /// Graph file
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    /// Switch size bound (ℓ ≤ k edges out, ℓ in)
    #[arg(long)]
    pub k: usize,
    /// Target class
    #[arg(long, value_enum)]
    pub class: ClassArg,
    /// Chain steps
    #[arg(long)]
    pub steps: u64,
    /// RNG seed
    #[arg(long)]
    pub seed: u64,
    /// Average the kernel with the identity (hold with probability 1/2)
    #[arg(long)]
    pub lazy: bool,
    /// Start state edge list; default: a constructed Hamiltonian cycle
    /// (requires 2·min_degree ≥ n)
    #[arg(long, value_name = "FILE")]
    pub start: Option<PathBuf>,
    /// Trajectory JSON path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct TransformArgs {
    /// Graph file
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    /// Source state edge list
    #[arg(long, value_name = "FILE")]
    pub from: PathBuf,
    /// Target state edge list
    #[arg(long, value_name = "FILE")]
    pub to: PathBuf,
    /// Class of the two states
    #[arg(long, value_enum)]
    pub class: ClassArg,
    /// Require the graph file to declare a bipartite split (density
    /// preconditions then use the per-side bound)
    #[arg(long)]
    pub bipartite: bool,
    /// Trace JSON path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct FamilyArgs {
    #[command(subcommand)]
    pub kind: FamilyKind,
}

#[derive(Args, Serialize, Clone)]
pub struct FamilyOut {
    /// Graph file output path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Certified-properties sidecar path (default: OUT plus `.json`)
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Subcommand, Serialize, Clone)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// Blue-parity counterexample on 3m vertices (m odd): 2-switches cannot
    /// connect its two certified Hamiltonian cycles
    Parity {
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        #[serde(flatten)]
        io: FamilyOut,
    },
    /// Forced-path gadget on 3ℓ+1 vertices (ℓ odd) with exactly two
    /// Hamiltonian paths at symmetric difference 2ℓ
    Gadget {
        #[arg(long)]
        l: u32,
        #[command(flatten)]
        #[serde(flatten)]
        io: FamilyOut,
    },
    /// Split graph whose two Hamiltonian cycles are k-switch-locked (even k)
    Locked {
        #[arg(long)]
        k: u32,
        /// Vertex count (default: minimal feasible)
        #[arg(long)]
        n: Option<u32>,
        #[command(flatten)]
        #[serde(flatten)]
        io: FamilyOut,
    },
    /// Monotone staircase with 2^(n-2) Hamiltonian cycles
    Staircase {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        #[serde(flatten)]
        io: FamilyOut,
    },
    /// Seeded random graph with a minimum-degree floor
    Random {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        delta: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        bipartite: bool,
        #[command(flatten)]
        #[serde(flatten)]
        io: FamilyOut,
    },
}

impl FamilyKind {
    fn io(&self) -> &FamilyOut {
        match self {
            FamilyKind::Parity { io, .. }
            | FamilyKind::Gadget { io, .. }
            | FamilyKind::Locked { io, .. }
            | FamilyKind::Staircase { io, .. }
            | FamilyKind::Random { io, .. } => io,
        }
    }
}

#[derive(Args, Serialize)]
pub struct MonotoneEmbedArgs {
    /// Monotone bipartite graph file (must declare its split)
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    /// 2-factor edge list to embed
    #[arg(long = "two-factor", value_name = "FILE")]
    pub two_factor: PathBuf,
    /// Output Hamiltonian cycle edge list
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Embedding trace JSON (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct JsArgs {
    /// Graph file
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    /// Build the exact state graph over all almost-2-factors instead of walking
    #[arg(long, conflicts_with_all = ["steps", "seed", "start"])]
    pub exact: bool,
    /// Walk steps
    #[arg(long, required_unless_present = "exact")]
    pub steps: Option<u64>,
    /// RNG seed
    #[arg(long, required_unless_present = "exact")]
    pub seed: Option<u64>,
    /// Start state edge list; default: a constructed Hamiltonian cycle
    #[arg(long, value_name = "FILE")]
    pub start: Option<PathBuf>,
    /// State cap for exact mode
    #[arg(long, default_value_t = 200_000)]
    pub cap: usize,
    /// Report JSON path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum EnumClassArg {
    #[value(name = "ham")]
    #[serde(rename = "ham")]
    Ham,
    #[value(name = "2factor")]
    #[serde(rename = "2factor")]
    TwoFactor,
    #[value(name = "ham-path")]
    #[serde(rename = "ham-path")]
    HamPath,
    #[value(name = "almost-2factor")]
    #[serde(rename = "almost-2factor")]
    Almost2Factor,
}

#[derive(Args, Serialize)]
pub struct EnumerateArgs {
    /// Graph file
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    /// State class to enumerate
    #[arg(long, value_enum)]
    pub class: EnumClassArg,
    /// Enumeration cap (exceeding it exits 3)
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    pub cap: usize,
    /// Include the full state list in the report
    #[arg(long)]
    pub list: bool,
    /// Report JSON path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct StategraphArgs {
    /// Graph file
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    /// State class
    #[arg(long, value_enum)]
    pub class: ClassArg,
    /// Switch size bound
    #[arg(long)]
    pub k: usize,
    /// Verify the exact transition kernel (symmetry, double stochasticity,
    /// uniform stationarity, θ) in rational arithmetic
    #[arg(long)]
    pub exact_matrix: bool,
    /// Analyze the lazy kernel
    #[arg(long)]
    pub lazy: bool,
    /// Enumeration cap
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    pub cap: usize,
    /// Report JSON path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct MixArgs {
    /// Graph file
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    /// Switch size bound
    #[arg(long)]
    pub k: usize,
    /// State class
    #[arg(long, value_enum, default_value = "ham")]
    pub class: ClassArg,
    /// Total-variation thresholds, comma-separated (e.g. 0.25,0.05)
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.05")]
    pub eps: Vec<f64>,
    /// Analyze the lazy kernel
    #[arg(long)]
    pub lazy: bool,
    /// Also estimate the TV curve empirically from independent seeded chains
    #[arg(long)]
    pub empirical: bool,
    /// Trials for the empirical estimate
    #[arg(long, default_value_t = 10_000)]
    pub trials: u32,
    /// Base seed for the empirical estimate
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Step cutoff for the exact TV curve
    #[arg(long, default_value_t = 20_000)]
    pub t_max: u32,
    /// Enumeration cap
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    pub cap: usize,
    /// TV curve CSV path
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Report JSON path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct ReproduceArgs {
    /// Claim id (see `reproduce --help` for the registry)
    #[arg(value_name = "CLAIM")]
    pub claim: String,
    /// Report JSON path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// Dispatch a parsed command line. Artifact paths are taken from the
/// arguments; reports without an explicit path go to stdout.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample(a) => {
            let report = sample_report(&a)?;
            emit(&report, a.out.as_deref())
        }
        Command::Transform(a) => {
            let report = transform_report(&a)?;
            emit(&report, a.out.as_deref())
        }
        Command::Family(a) => {
            let (graph_text, report) = family_report(&a.kind)?;
            let io = a.kind.io();
            fs::write(&io.out, graph_text)?;
            let sidecar = io
                .json
                .clone()
                .unwrap_or_else(|| sidecar_path(&io.out));
            emit(&report, Some(sidecar.as_path()))?;
            println!(
                "wrote {} and {}",
                io.out.display(),
                sidecar.display()
            );
            Ok(())
        }
        Command::MonotoneEmbed(a) => {
            let (ham_text, report) = monotone_embed_report(&a)?;
            fs::write(&a.out, ham_text)?;
            emit(&report, a.trace.as_deref())
        }
        Command::Js(a) => {
            let report = js_report(&a)?;
            emit(&report, a.out.as_deref())
        }
        Command::Enumerate(a) => {
            let report = enumerate_report(&a)?;
            emit(&report, a.out.as_deref())
        }
        Command::Stategraph(a) => {
            let report = stategraph_report(&a)?;
            emit(&report, a.out.as_deref())
        }
        Command::Mix(a) => {
            let (report, csv) = mix_report(&a)?;
            if let Some(path) = &a.csv {
                fs::write(path, csv)?;
            }
            emit(&report, a.out.as_deref())
        }
        Command::Reproduce(a) => {
            let claim = reproduce::run_claim(&a.claim)?;
            let report = json!({
                "version": VERSION,
                "claim": claim.claim,
                "pass": claim.pass,
                "details": claim.details,
            });
            emit(&report, a.out.as_deref())
        }
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".json");
    PathBuf::from(s)
}

fn emit(report: &Value, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn default_start(g: &Graph, class: TargetClass, seed: u64) -> Result<EdgeSet> {
    let _ = class; // a Hamiltonian cycle is a member of both classes
    Ok(find_ham_cycle(g, seed)?.edges().clone())
}

pub fn sample_report(a: &SampleArgs) -> Result<Value> {
    let g = read_graph(&a.graph)?;
    let cfg = ChainConfig {
        k: a.k,
        target: a.class.into(),
        lazy: a.lazy,
        seed: a.seed,
    };
    let start = match &a.start {
        Some(p) => read_edge_set(p, &g)?,
        None => default_start(&g, cfg.target, a.seed)?,
    };
    let traj = run_chain(&g, &start, &cfg, a.steps)?;
    let accepted = traj.proposals.iter().filter(|p| p.accepted).count();
    Ok(json!({
        "version": VERSION,
        "config": a,
        "n": g.n(),
        "m": g.m(),
        "accepted": accepted,
        "trajectory": traj,
    }))
}

pub fn transform_report(a: &TransformArgs) -> Result<Value> {
    let g = read_graph(&a.graph)?;
    if a.bipartite && g.side_a().is_none() {
        return Err(Error::InvalidInput(
            "--bipartite given but the graph file declares no split".into(),
        ));
    }
    let from = read_edge_set(&a.from, &g)?;
    let to = read_edge_set(&a.to, &g)?;
    let diff = symmetric_difference_size(&from, &to);
    let (trace, in_class): (TransformTrace, bool) = match a.class {
        ClassArg::Ham => {
            let h1 = HamCycle::new(&g, from.clone())?;
            let h2 = HamCycle::new(&g, to.clone())?;
            let trace = transform_ham(&h1, &h2, &g)?;
            let ok = trace
                .steps
                .iter()
                .all(|s| HamCycle::new(&g, s.state.clone()).is_ok());
            (trace, ok)
        }
        ClassArg::TwoFactor => {
            let f1 = TwoFactor::new(&g, from.clone())?;
            let f2 = TwoFactor::new(&g, to.clone())?;
            let trace = transform_2factor(&f1, &f2, &g)?;
            let ok = trace
                .steps
                .iter()
                .all(|s| TwoFactor::new(&g, s.state.clone()).is_ok());
            (trace, ok)
        }
    };
    trace.replay(&g)?;
    Ok(json!({
        "version": VERSION,
        "config": a,
        "initial_diff": diff,
        "checks": {
            "steps": trace.len(),
            "length_le_diff": trace.len() <= diff,
            "max_switch_size": trace.max_switch_size(),
            "intermediates_in_class": in_class,
            "final_matches_target": *trace.final_state() == to,
            "replayed": true,
        },
        "trace": trace,
    }))
}

/// Count 4-cycles and check each carries an even number of blue edges.
/// Every 4-cycle a–x–b–y is seen twice (once per diagonal pair {a,b}).
fn four_cycle_blue_audit(cg: &ColoredGraph) -> (usize, bool) {
    let g = &cg.graph;
    let mut double_count = 0usize;
    let mut all_even = true;
    for a in 0..g.n() {
        for b in a + 1..g.n() {
            let common: Vec<u32> = g
                .neighbors(a)
                .iter()
                .copied()
                .filter(|&x| x != b && g.has_edge(x, b))
                .collect();
            for (i, &x) in common.iter().enumerate() {
                for &y in &common[i + 1..] {
                    double_count += 1;
                    let cycle = hamswitch_core::graph::edge_set([
                        hamswitch_core::graph::Edge::of(a, x),
                        hamswitch_core::graph::Edge::of(x, b),
                        hamswitch_core::graph::Edge::of(b, y),
                        hamswitch_core::graph::Edge::of(y, a),
                    ]);
                    if !cg.blue_count(&cycle).is_multiple_of(2) {
                        all_even = false;
                    }
                }
            }
        }
    }
    (double_count / 2, all_even)
}

pub fn family_report(kind: &FamilyKind) -> Result<(String, Value)> {
    let (g, props) = match kind {
        FamilyKind::Parity { m, .. } => {
            let (cg, h1, h2) = build_parity_example(*m)?;
            let (four_cycles, all_even) = four_cycle_blue_audit(&cg);
            let props = json!({
                "family": "parity",
                "m": m,
                "n": cg.graph.n(),
                "edges": cg.graph.m(),
                "min_degree": cg.graph.min_degree(),
                "blue_edges": cg.blue.len(),
                "four_cycles": four_cycles,
                "four_cycles_all_even_blue": all_even,
                "h1": { "edges": h1.edges(), "blue_count": cg.blue_count(h1.edges()) },
                "h2": { "edges": h2.edges(), "blue_count": cg.blue_count(h2.edges()) },
                "blue_parities_differ":
                    cg.blue_count(h1.edges()) % 2 != cg.blue_count(h2.edges()) % 2,
                "diff": symmetric_difference_size(h1.edges(), h2.edges()),
            });
            (cg.graph, props)
        }
        FamilyKind::Gadget { l, .. } => {
            let gx = build_gadget_x(*l)?;
            let paths = enumerate_ham_paths(&gx.graph, DEFAULT_ENUM_CAP)?;
            let diffs: Vec<usize> = paths
                .iter()
                .enumerate()
                .flat_map(|(i, p)| {
                    paths[i + 1..]
                        .iter()
                        .map(|q| symmetric_difference_size(p, q))
                        .collect::<Vec<_>>()
                })
                .collect();
            let props = json!({
                "family": "gadget",
                "l": l,
                "n": gx.graph.n(),
                "edges": gx.graph.m(),
                "forced_edges": gx.forced.len(),
                "free_cycle_length": gx.free_cycle.len(),
                "ham_paths": paths.len(),
                "ham_paths_expected": 2,
                "pairwise_diffs": diffs,
                "diff_expected": 2 * l,
            });
            (gx.graph, props)
        }
        FamilyKind::Locked { k, n, .. } => {
            let ex = build_locked_example(*k, *n)?;
            let cycles = enumerate_ham_cycles(&ex.graph, DEFAULT_ENUM_CAP)?;
            let diff = match cycles.as_slice() {
                [a, b] => Some(symmetric_difference_size(a, b)),
                _ => None,
            };
            let (_, at_k) = check_irreducible(
                &ex.graph,
                *k as usize,
                TargetClass::HamiltonianCycles,
                DEFAULT_ENUM_CAP,
            )?;
            let (_, above_k) = check_irreducible(
                &ex.graph,
                *k as usize + 1,
                TargetClass::HamiltonianCycles,
                DEFAULT_ENUM_CAP,
            )?;
            let props = json!({
                "family": "locked",
                "k": k,
                "n": ex.graph.n(),
                "edges": ex.graph.m(),
                "split_sizes": [ex.a_size, ex.b_size],
                "ham_cycles": cycles.len(),
                "diff": diff,
                "diff_expected": 2 * (k + 1),
                "disconnected_at_k": !at_k.connected,
                "component_sizes_at_k": at_k.component_sizes,
                "connected_above_k": above_k.connected,
            });
            (ex.graph, props)
        }
        FamilyKind::Staircase { n, .. } => {
            let mg = build_staircase(*n)?;
            let g = mg.graph().clone();
            let expected: Option<u64> = n
                .checked_sub(2)
                .and_then(|e| 1u64.checked_shl(e));
            let counted = if *n <= 12 {
                Some(enumerate_ham_cycles(&g, DEFAULT_ENUM_CAP)?.len() as u64)
            } else {
                None
            };
            let props = json!({
                "family": "staircase",
                "n_side": n,
                "n": g.n(),
                "edges": g.m(),
                "ham_cycles_expected": expected,
                "ham_cycles_counted": counted,
                "count_certified": counted.is_some() && counted == expected,
            });
            (g, props)
        }
        FamilyKind::Random {
            n,
            delta,
            seed,
            bipartite,
            ..
        } => {
            let g = build_random_dense(*n, *delta, *seed, *bipartite)?;
            let props = json!({
                "family": "random",
                "n": n,
                "delta": delta,
                "seed": seed,
                "bipartite": bipartite,
                "edges": g.m(),
                "min_degree": g.min_degree(),
                "floor_satisfied": g.min_degree() >= *delta as usize,
            });
            (g, props)
        }
    };
    let report = json!({
        "version": VERSION,
        "config": kind,
        "properties": props,
    });
    Ok((hamswitch_core::io::format_graph(&g), report))
}

pub fn monotone_embed_report(a: &MonotoneEmbedArgs) -> Result<(String, Value)> {
    let g = read_graph(&a.graph)?;
    let mg = validate_monotone(&g)?;
    let edges = read_edge_set(&a.two_factor, &g)?;
    let f = TwoFactor::new(&g, edges)?;
    let (ham, ps, merge_edits) = phi(&f, &mg)?;
    let ps_edges = ps.edge_set();
    let cut: Vec<_> = f.edges().difference(&ps_edges).collect();
    let glue: Vec<_> = ps_edges.difference(f.edges()).collect();
    let join_removed: Vec<_> = ps_edges.difference(ham.edges()).collect();
    let join_added: Vec<_> = ham.edges().difference(&ps_edges).collect();
    let roundtrip = phi1_inverse(&ps, &mg)?.edges() == f.edges();
    let report = json!({
        "version": VERSION,
        "config": a,
        "n_side": mg.n_side(),
        "cut_and_reroute": {
            "paths": ps.nonempty_paths(),
            "cut_edges": cut,
            "glue_edges": glue,
            "diff": symmetric_difference_size(f.edges(), &ps_edges),
            "inverse_roundtrip": roundtrip,
        },
        "join": {
            "removed_edges": join_removed,
            "added_edges": join_added,
            "merge_edits": merge_edits,
        },
        "total_edit_count": symmetric_difference_size(f.edges(), ham.edges()),
    });
    Ok((
        hamswitch_core::io::format_edge_set(ham.edges(), &g),
        report,
    ))
}

pub fn js_report(a: &JsArgs) -> Result<Value> {
    let g = read_graph(&a.graph)?;
    if a.exact {
        return js_exact_report(a, &g);
    }
    let steps = a.steps.expect("clap requires steps without --exact");
    let seed = a.seed.expect("clap requires seed without --exact");
    let start_edges = match &a.start {
        Some(p) => read_edge_set(p, &g)?,
        None => default_start(&g, TargetClass::TwoFactors, seed)?,
    };
    let start = AlmostTwoFactor::new(&g, start_edges)?;
    let mut rng = rand_seed(seed);
    let mut x = start.clone();
    let (mut complete, mut two_ones, mut one_zero, mut holds) = (0u64, 0u64, 0u64, 0u64);
    let mut distinct = std::collections::BTreeSet::new();
    distinct.insert(x.edges().clone());
    for _ in 0..steps {
        let y = js_step(&x, &g, &mut rng);
        if y.edges() == x.edges() {
            holds += 1;
        }
        match y.deficit() {
            Deficit::None => complete += 1,
            Deficit::TwoOnes { .. } => two_ones += 1,
            Deficit::OneZero { .. } => one_zero += 1,
        }
        distinct.insert(y.edges().clone());
        x = y;
    }
    let repaired = if 2 * g.min_degree() >= g.n() as usize {
        let f = repair(&x, &g)?;
        Some(json!({
            "edges": f.edges(),
            "diff": symmetric_difference_size(x.edges(), f.edges()),
        }))
    } else {
        None
    };
    Ok(json!({
        "version": VERSION,
        "config": a,
        "mode": "walk",
        "n": g.n(),
        "type1_deletion_pool": 3,
        "start": start.edges(),
        "start_deficit": start.deficit(),
        "steps": steps,
        "visits": { "complete": complete, "two_ones": two_ones, "one_zero": one_zero },
        "holds": holds,
        "distinct_states": distinct.len(),
        "final": x.edges(),
        "final_deficit": x.deficit(),
        "final_repaired": repaired,
    }))
}

fn js_exact_report(a: &JsArgs, g: &Graph) -> Result<Value> {
    let sg = js_state_graph(g, a.cap)?;
    let n = g.n() as u64;
    let two_factors = sg.states.iter().filter(|s| s.is_complete()).count();
    let min_weight = sg
        .arcs
        .iter()
        .flatten()
        .map(|&(_, w)| w)
        .min()
        .unwrap_or(0);
    let k_js = if two_factors == 0 {
        return Err(Error::Precondition("graph has no 2-factor".into()));
    } else {
        let dist = sg.distances_to_two_factors();
        match dist
            .iter()
            .position(|d| d.is_none())
        {
            Some(i) => JsDistance::Unreachable(sg.states[i].edges().clone()),
            None => JsDistance::Bounded(dist.iter().map(|d| d.unwrap()).max().unwrap_or(0)),
        }
    };
    Ok(json!({
        "version": VERSION,
        "config": a,
        "mode": "exact",
        "n": g.n(),
        "type1_deletion_pool": 3,
        "weight_unit": format!("1/(3n^2); 3n^2 = {}", 3 * n * n),
        "state_count": sg.states.len(),
        "two_factors": two_factors,
        "deficient": sg.states.len() - two_factors,
        "symmetric": sg.is_symmetric(),
        "max_degree": sg.max_degree(),
        "degree_bound": n * n * n,
        "max_row_weight": sg.max_row_weight(),
        "row_weight_bound": 3 * n * n,
        "min_arc_weight": min_weight,
        "k_js": k_js,
        "p_stability": format!("{}/{}", sg.states.len(), two_factors),
        "p_stability_bound": n * n * n,
    }))
}

fn rand_seed(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand_chacha::rand_core::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

pub fn enumerate_report(a: &EnumerateArgs) -> Result<Value> {
    let g = read_graph(&a.graph)?;
    let (states, extra): (Vec<EdgeSet>, Value) = match a.class {
        EnumClassArg::Ham => (enumerate_ham_cycles(&g, a.cap)?, Value::Null),
        EnumClassArg::HamPath => (enumerate_ham_paths(&g, a.cap)?, Value::Null),
        EnumClassArg::TwoFactor => {
            let states = enumerate_two_factors(&g, a.cap)?;
            let mut by_components = std::collections::BTreeMap::<usize, usize>::new();
            for s in &states {
                let t = TwoFactor::new(&g, s.clone()).expect("enumerated 2-factor");
                *by_components.entry(t.component_count()).or_default() += 1;
            }
            let extra = json!({ "by_components": by_components });
            (states, extra)
        }
        EnumClassArg::Almost2Factor => {
            let states = hamswitch_core::js_chain::enumerate_almost_two_factors(&g, a.cap)?;
            let mut complete = 0usize;
            let mut two_ones = 0usize;
            let mut one_zero = 0usize;
            for s in &states {
                match s.deficit() {
                    Deficit::None => complete += 1,
                    Deficit::TwoOnes { .. } => two_ones += 1,
                    Deficit::OneZero { .. } => one_zero += 1,
                }
            }
            let extra = json!({
                "by_deficit": { "complete": complete, "two_ones": two_ones, "one_zero": one_zero }
            });
            (
                states.into_iter().map(|s| s.into_edges()).collect(),
                extra,
            )
        }
    };
    let mut report = json!({
        "version": VERSION,
        "config": a,
        "n": g.n(),
        "m": g.m(),
        "count": states.len(),
    });
    if extra != Value::Null {
        report["breakdown"] = extra;
    }
    if a.list {
        report["states"] = json!(states);
    }
    Ok(report)
}

pub fn stategraph_report(a: &StategraphArgs) -> Result<Value> {
    let g = read_graph(&a.graph)?;
    let cfg = ChainConfig {
        k: a.k,
        target: a.class.into(),
        lazy: a.lazy,
        seed: 0,
    };
    let (sg, report) = check_irreducible(&g, a.k, cfg.target, a.cap)?;
    let (th, th_kind) = theta(&g, &cfg)?;
    let kernel = if a.exact_matrix {
        Some(verify_kernel(&g, &sg, &cfg)?)
    } else {
        None
    };
    Ok(json!({
        "version": VERSION,
        "config": a,
        "n": g.n(),
        "m": g.m(),
        "report": report,
        "adjacent_pairs": sg.edge_count(),
        "theta": { "value": th.to_string(), "kind": th_kind },
        "kernel": kernel,
    }))
}

/// Subsample the exact curve (keeping every τ(ε) time and the final point)
/// down to at most 64 grid points for the empirical estimator.
fn empirical_grid(report_tau: &[(f64, u32)], curve: &[(u32, f64)]) -> Vec<u32> {
    let mut grid: std::collections::BTreeSet<u32> =
        report_tau.iter().map(|&(_, t)| t).collect();
    if let Some(&(last, _)) = curve.last() {
        grid.insert(last);
    }
    let stride = (curve.len() / 60).max(1);
    for (i, &(t, _)) in curve.iter().enumerate() {
        if i % stride == 0 {
            grid.insert(t);
        }
    }
    grid.remove(&0);
    grid.into_iter().collect()
}

pub fn mix_report(a: &MixArgs) -> Result<(Value, String)> {
    let g = read_graph(&a.graph)?;
    if a.eps.is_empty() || a.eps.iter().any(|&e| !(0.0..1.0).contains(&e) || e <= 0.0) {
        return Err(Error::InvalidInput(
            "eps thresholds must lie in (0, 1)".into(),
        ));
    }
    let cfg = ChainConfig {
        k: a.k,
        target: a.class.into(),
        lazy: a.lazy,
        seed: a.seed,
    };
    let states = enumerate_states(&g, cfg.target, a.cap)?;
    let sg = StateGraph::build(&g, a.k, states.clone())?;
    let (th, th_kind) = theta(&g, &cfg)?;
    let mix = mixing_exact(&g, &sg, &cfg, &a.eps, a.t_max, DEFAULT_DENSE_CAP)?;
    let empirical: Option<EmpiricalMixReport> = if a.empirical {
        let grid = empirical_grid(&mix.tau, &mix.tv_curve);
        if grid.is_empty() {
            return Err(Error::InvalidInput(
                "exact TV curve is empty; nothing to estimate".into(),
            ));
        }
        Some(mixing_empirical(
            &g, &cfg, &states[0], &grid, a.trials, &states,
        )?)
    } else {
        None
    };
    let mut csv = String::from(if empirical.is_some() {
        "t,tv_exact,tv_empirical\n"
    } else {
        "t,tv_exact\n"
    });
    let emp_by_t: std::collections::BTreeMap<u32, f64> = empirical
        .as_ref()
        .map(|e| e.tv.iter().copied().collect())
        .unwrap_or_default();
    for &(t, tv) in &mix.tv_curve {
        match (empirical.is_some(), emp_by_t.get(&t)) {
            (false, _) => csv.push_str(&format!("{t},{tv:.6}\n")),
            (true, Some(e)) => csv.push_str(&format!("{t},{tv:.6},{e:.6}\n")),
            (true, None) => csv.push_str(&format!("{t},{tv:.6},\n")),
        }
    }
    let report = json!({
        "version": VERSION,
        "config": a,
        "n": g.n(),
        "m": g.m(),
        "theta": { "value": th.to_string(), "kind": th_kind },
        "mix": mix,
        "empirical": empirical,
    });
    Ok((report, csv))
}
