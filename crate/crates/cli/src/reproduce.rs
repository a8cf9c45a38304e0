//! Canned verification pipelines ("claims"). Each claim re-derives a
//! documented guarantee of the library from scratch on pinned instances and
//! reports pass/fail plus the measured evidence. Instance lists, seeds and
//! tolerances are constants here — not flags — so a claim means the same
//! thing on every run, and reports are byte-identical across reruns.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde_json::{json, Value};

use hamswitch_core::analysis::{
    check_irreducible, enumerate_ham_cycles, enumerate_ham_paths, enumerate_states,
    enumerate_two_factors, find_ham_cycle, ham_component_bfs, mixing_empirical, mixing_exact,
    verify_kernel, StateGraph, DEFAULT_DENSE_CAP, DEFAULT_ENUM_CAP,
};
use hamswitch_core::error::{Error, Result};
use hamswitch_core::families::{
    build_gadget_x, build_locked_example, build_parity_example, build_random_dense,
    build_staircase,
};
use hamswitch_core::graph::{symmetric_difference_size, Edge, Graph, HamCycle, TwoFactor};
use hamswitch_core::io::{write_edge_set, write_graph};
use hamswitch_core::js_chain::{js_state_graph, repair};
use hamswitch_core::monotone::{phi, phi1, phi1_inverse, quadrants, MonotoneGraph, PathSystem};
use hamswitch_core::reconfigure::{reconnect, transform_2factor, transform_ham};
use hamswitch_core::switch::{ChainConfig, TargetClass};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

// Instance and tolerance pins. Changing any of these changes what a claim
// measures, so they are compiled in rather than taken from the command line.
const RANDOM_GRAPHS: usize = 50;
const N_LOW: u32 = 28; // n ranges over [N_LOW, N_LOW + N_SPAN - 1]
const N_SPAN: u32 = 13;
const DEGREE_MARGIN: u32 = 7; // degree floor ⌈n/2⌉ + margin, so 2δ ≥ n + 14
const HAM_PAIRS: usize = 5;
const HAM_SWITCH_CAP: usize = 10; // composed switch: |x △ y| ≤ 20
const RECONNECT_TRIALS: usize = 20;
const RECONNECT_SWITCH_CAP: usize = 3;
const TWOFACTOR_PAIRS: usize = 5;
const TWOFACTOR_SWITCH_CAP: usize = 4;
const SCRAMBLE_FACTOR: u64 = 10; // 2-factor scrambling walks run 10·n steps
const SEED_BUMP_LIMIT: u64 = 50;
const PARITY_SCAN_CAP: usize = 120_000;
const JS_RANDOM_GRAPHS: usize = 200;
const JS_EXHAUSTIVE_CAP: usize = 2_000;
const JS_RANDOM_STATE_CAP: usize = 50_000;
const JS_DISTANCE_CAP: usize = 3;
const REPAIR_EDIT_CAP: usize = 3;
const EMP_TRIALS: u32 = 100_000;
const EMP_TV_SLACK: f64 = 0.03;
const EIG_TOL: f64 = 1e-9;

pub const CLAIM_IDS: [&str; 10] = [
    "random-dense-transform",
    "reconnect-bound",
    "twofactor-transform",
    "parity-locked",
    "gadget-locked",
    "monotone-pipeline",
    "staircase-count",
    "js-stability",
    "chain-algebra",
    "determinism",
];

pub struct ClaimReport {
    pub claim: String,
    pub pass: bool,
    pub details: Value,
}

pub fn run_claim(id: &str) -> Result<ClaimReport> {
    let (pass, details) = match id {
        "random-dense-transform" => claim_random_dense()?,
        "reconnect-bound" => claim_reconnect()?,
        "twofactor-transform" => claim_twofactor()?,
        "parity-locked" => claim_parity()?,
        "gadget-locked" => claim_gadget()?,
        "monotone-pipeline" => claim_monotone()?,
        "staircase-count" => claim_staircase()?,
        "js-stability" => claim_js_stability()?,
        "chain-algebra" => claim_chain_algebra()?,
        "determinism" => claim_determinism()?,
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown claim {id:?}; available: {}",
                CLAIM_IDS.join(", ")
            )))
        }
    };
    Ok(ClaimReport {
        claim: id.to_string(),
        pass,
        details,
    })
}

/// Claim instance i: a seeded random graph with n cycling over [28, 40] and
/// minimum degree floored at ⌈n/2⌉ + 7.
fn random_instance(i: usize) -> Result<Graph> {
    let n = N_LOW + (i as u32 % N_SPAN);
    build_random_dense(n, n.div_ceil(2) + DEGREE_MARGIN, i as u64, false)
}

/// Two distinct constructed Hamiltonian cycles, bumping the second seed on
/// (unlikely) collisions so the pair is deterministic.
fn distinct_cycle_pair(g: &Graph, s: u64) -> Result<(HamCycle, HamCycle)> {
    let h1 = find_ham_cycle(g, 2 * s)?;
    for bump in 0..SEED_BUMP_LIMIT {
        let h2 = find_ham_cycle(g, 2 * s + 1 + 1000 * bump)?;
        if h2.edges() != h1.edges() {
            return Ok((h1, h2));
        }
    }
    Err(Error::ConstructionFailed(
        "could not find two distinct cycles".into(),
    ))
}

/// A 2-factor scrambled away from `h` by seeded valid 2-switch moves: drop
/// two vertex-disjoint state edges, add a pair of crossing chords. Every move
/// stays inside the 2-factor class (degrees are preserved), so this generates
/// deterministic multi-cycle test states; it makes no uniformity claim — the
/// proposal is biased toward applicable moves on purpose, because uniform
/// edge-subset proposals almost never hit a valid switch at these sizes.
fn scrambled_two_factor(g: &Graph, h: &HamCycle, seed: u64) -> Result<TwoFactor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<Edge> = h.edges().iter().copied().collect();
    let mut set = h.edges().clone();
    for _ in 0..SCRAMBLE_FACTOR * g.n() as u64 {
        let i = rng.random_range(0..edges.len());
        let j = rng.random_range(0..edges.len());
        let (e, f) = (edges[i], edges[j]);
        let [a, b] = e.endpoints();
        let [c, d] = f.endpoints();
        if i == j || f.touches(a) || f.touches(b) {
            continue;
        }
        let (p, q) = if rng.random_bool(0.5) {
            (Edge::of(a, c), Edge::of(b, d))
        } else {
            (Edge::of(a, d), Edge::of(b, c))
        };
        if !g.contains(p) || !g.contains(q) || set.contains(&p) || set.contains(&q) {
            continue;
        }
        set.remove(&e);
        set.remove(&f);
        set.insert(p);
        set.insert(q);
        edges[i] = p;
        edges[j] = q;
    }
    TwoFactor::new(g, set)
}

fn claim_random_dense() -> Result<(bool, Value)> {
    let per_graph: Vec<(usize, usize, usize, Vec<String>)> = (0..RANDOM_GRAPHS)
        .into_par_iter()
        .map(|i| -> Result<(usize, usize, usize, Vec<String>)> {
            let g = random_instance(i)?;
            let mut fails = Vec::new();
            let (mut pairs, mut max_len, mut max_switch) = (0usize, 0usize, 0usize);
            for p in 0..HAM_PAIRS {
                let (h1, h2) = distinct_cycle_pair(&g, (i * HAM_PAIRS + p) as u64)?;
                let diff = symmetric_difference_size(h1.edges(), h2.edges());
                let trace = transform_ham(&h1, &h2, &g)?;
                trace.replay(&g)?;
                if trace.len() > diff {
                    fails.push(format!("graph {i} pair {p}: {} steps for diff {diff}", trace.len()));
                }
                if trace.max_switch_size() > HAM_SWITCH_CAP {
                    fails.push(format!("graph {i} pair {p}: switch size {}", trace.max_switch_size()));
                }
                if trace.final_state() != h2.edges() {
                    fails.push(format!("graph {i} pair {p}: trace missed its target"));
                }
                for st in &trace.steps {
                    HamCycle::new(&g, st.state.clone())?;
                }
                pairs += 1;
                max_len = max_len.max(trace.len());
                max_switch = max_switch.max(trace.max_switch_size());
            }
            Ok((pairs, max_len, max_switch, fails))
        })
        .collect::<Result<_>>()?;
    let pairs: usize = per_graph.iter().map(|t| t.0).sum();
    let max_len = per_graph.iter().map(|t| t.1).max().unwrap_or(0);
    let max_switch = per_graph.iter().map(|t| t.2).max().unwrap_or(0);
    let fails: Vec<String> = per_graph.into_iter().flat_map(|t| t.3).collect();
    let details = json!({
        "graphs": RANDOM_GRAPHS,
        "n_range": [N_LOW, N_LOW + N_SPAN - 1],
        "degree_floor": format!("ceil(n/2) + {DEGREE_MARGIN}"),
        "pairs_transformed": pairs,
        "max_trace_len": max_len,
        "max_switch_size": max_switch,
        "switch_size_cap": HAM_SWITCH_CAP,
        "failures": fails,
    });
    Ok((pairs == RANDOM_GRAPHS * HAM_PAIRS && fails.is_empty(), details))
}

fn claim_reconnect() -> Result<(bool, Value)> {
    let per_graph: Vec<(BTreeMap<usize, usize>, usize, Vec<String>)> = (0..RANDOM_GRAPHS)
        .into_par_iter()
        .map(|i| -> Result<(BTreeMap<usize, usize>, usize, Vec<String>)> {
            let g = random_instance(i)?;
            let h = find_ham_cycle(&g, 0x5eed ^ i as u64)?;
            let mut comps = BTreeMap::new();
            let mut max_switch = 0usize;
            let mut fails = Vec::new();
            for t in 0..RECONNECT_TRIALS {
                let f = scrambled_two_factor(&g, &h, (i * RECONNECT_TRIALS + t) as u64)?;
                let c = f.component_count();
                *comps.entry(c).or_insert(0usize) += 1;
                let before = symmetric_difference_size(f.edges(), h.edges());
                let (trace, merged) = reconnect(&f, &h, &g)?;
                trace.replay(&g)?;
                if trace.len() > c - 1 {
                    fails.push(format!("graph {i} trial {t}: {} switches for {c} cycles", trace.len()));
                }
                if trace.max_switch_size() > RECONNECT_SWITCH_CAP {
                    fails.push(format!("graph {i} trial {t}: switch size {}", trace.max_switch_size()));
                }
                if symmetric_difference_size(merged.edges(), h.edges()) > before {
                    fails.push(format!("graph {i} trial {t}: drifted away from the guide cycle"));
                }
                max_switch = max_switch.max(trace.max_switch_size());
            }
            Ok((comps, max_switch, fails))
        })
        .collect::<Result<_>>()?;
    let mut comps = BTreeMap::new();
    let mut max_switch = 0;
    let mut fails = Vec::new();
    for (c, s, f) in per_graph {
        for (k, v) in c {
            *comps.entry(k).or_insert(0usize) += v;
        }
        max_switch = max_switch.max(s);
        fails.extend(f);
    }
    let details = json!({
        "graphs": RANDOM_GRAPHS,
        "trials_per_graph": RECONNECT_TRIALS,
        "cycle_count_histogram": comps,
        "max_switch_size": max_switch,
        "switch_size_cap": RECONNECT_SWITCH_CAP,
        "failures": fails,
    });
    Ok((fails.is_empty(), details))
}

fn claim_twofactor() -> Result<(bool, Value)> {
    let per_graph: Vec<(usize, usize, Vec<String>)> = (0..RANDOM_GRAPHS)
        .into_par_iter()
        .map(|i| -> Result<(usize, usize, Vec<String>)> {
            let g = random_instance(i)?;
            let h = find_ham_cycle(&g, 0xf00d ^ i as u64)?;
            let mut fails = Vec::new();
            let (mut max_len, mut max_switch) = (0usize, 0usize);
            for p in 0..TWOFACTOR_PAIRS {
                let s = (i * TWOFACTOR_PAIRS + p) as u64;
                let f1 = scrambled_two_factor(&g, &h, 2 * s)?;
                let mut f2 = scrambled_two_factor(&g, &h, 2 * s + 1)?;
                let mut bump = 0;
                while f2.edges() == f1.edges() {
                    bump += 1;
                    if bump > SEED_BUMP_LIMIT {
                        return Err(Error::ConstructionFailed(
                            "could not find two distinct 2-factors".into(),
                        ));
                    }
                    f2 = scrambled_two_factor(&g, &h, 2 * s + 1 + 1000 * bump)?;
                }
                let diff = symmetric_difference_size(f1.edges(), f2.edges());
                let trace = transform_2factor(&f1, &f2, &g)?;
                trace.replay(&g)?;
                if trace.len() > diff {
                    fails.push(format!("graph {i} pair {p}: {} steps for diff {diff}", trace.len()));
                }
                if trace.max_switch_size() > TWOFACTOR_SWITCH_CAP {
                    fails.push(format!("graph {i} pair {p}: switch size {}", trace.max_switch_size()));
                }
                if trace.final_state() != f2.edges() {
                    fails.push(format!("graph {i} pair {p}: trace missed its target"));
                }
                for st in &trace.steps {
                    TwoFactor::new(&g, st.state.clone())?;
                }
                max_len = max_len.max(trace.len());
                max_switch = max_switch.max(trace.max_switch_size());
            }
            Ok((max_len, max_switch, fails))
        })
        .collect::<Result<_>>()?;
    let max_len = per_graph.iter().map(|t| t.0).max().unwrap_or(0);
    let max_switch = per_graph.iter().map(|t| t.1).max().unwrap_or(0);
    let fails: Vec<String> = per_graph.into_iter().flat_map(|t| t.2).collect();
    let details = json!({
        "graphs": RANDOM_GRAPHS,
        "pairs_per_graph": TWOFACTOR_PAIRS,
        "max_trace_len": max_len,
        "max_switch_size": max_switch,
        "switch_size_cap": TWOFACTOR_SWITCH_CAP,
        "failures": fails,
    });
    Ok((fails.is_empty(), details))
}

fn claim_parity() -> Result<(bool, Value)> {
    let mut fails = Vec::new();

    // m = 3 is small enough to enumerate the whole 2-switch state graph:
    // it must split, with the two certified cycles in different components.
    let (cg3, a3, b3) = build_parity_example(3)?;
    let (four3, even3) = crate::four_cycle_blue_audit(&cg3);
    if !even3 {
        fails.push("m=3: some 4-cycle carries an odd number of blue edges".to_string());
    }
    if cg3.blue_count(a3.edges()) % 2 == cg3.blue_count(b3.edges()) % 2 {
        fails.push("m=3: certified cycles have equal blue parity".to_string());
    }
    let (sg3, rep3) = check_irreducible(
        &cg3.graph,
        2,
        TargetClass::HamiltonianCycles,
        DEFAULT_ENUM_CAP,
    )?;
    if rep3.connected {
        fails.push("m=3: 2-switch state graph is connected".to_string());
    }
    match (sg3.index_of(a3.edges()), sg3.index_of(b3.edges())) {
        (Some(x), Some(y)) => {
            if sg3.component_of(x) == sg3.component_of(y) {
                fails.push("m=3: certified cycles share a component".to_string());
            }
        }
        _ => fails.push("m=3: a certified cycle is missing from the state space".to_string()),
    }

    // m = 5 is too large to enumerate. A 2-switch between Hamiltonian cycles
    // always toggles an alternating 4-cycle, so an all-4-cycles-even blue
    // audit certifies that blue parity is invariant along 2-switch moves;
    // a capped component scan around the first cycle corroborates.
    let (cg5, a5, b5) = build_parity_example(5)?;
    let (four5, even5) = crate::four_cycle_blue_audit(&cg5);
    if !even5 {
        fails.push("m=5: some 4-cycle carries an odd number of blue edges".to_string());
    }
    if cg5.blue_count(a5.edges()) % 2 == cg5.blue_count(b5.edges()) % 2 {
        fails.push("m=5: certified cycles have equal blue parity".to_string());
    }
    let scan = ham_component_bfs(&cg5.graph, a5.edges(), PARITY_SCAN_CAP)?;
    if scan.contains(&cg5.graph, b5.edges()) {
        fails.push("m=5: component scan reached the second cycle".to_string());
    }

    let details = json!({
        "m3": {
            "n": cg3.graph.n(),
            "four_cycles": four3,
            "all_four_cycles_even_blue": even3,
            "blue_parities": [cg3.blue_count(a3.edges()) % 2, cg3.blue_count(b3.edges()) % 2],
            "ham_cycles": rep3.state_count,
            "components": rep3.component_count,
            "component_sizes": rep3.component_sizes,
        },
        "m5": {
            "n": cg5.graph.n(),
            "four_cycles": four5,
            "all_four_cycles_even_blue": even5,
            "blue_parities": [cg5.blue_count(a5.edges()) % 2, cg5.blue_count(b5.edges()) % 2],
            "scan_cap": PARITY_SCAN_CAP,
            "scanned_states": scan.size(),
            "scan_complete": scan.complete,
            "second_cycle_reached": false,
        },
        "failures": fails,
    });
    Ok((fails.is_empty(), details))
}

fn claim_gadget() -> Result<(bool, Value)> {
    let mut fails = Vec::new();
    let mut gadgets = Vec::new();
    for l in [3u32, 5, 7] {
        let gx = build_gadget_x(l)?;
        let paths = enumerate_ham_paths(&gx.graph, DEFAULT_ENUM_CAP)?;
        let diff = match paths.as_slice() {
            [p, q] => Some(symmetric_difference_size(p, q)),
            _ => None,
        };
        if paths.len() != 2 {
            fails.push(format!("gadget l={l}: {} Hamiltonian paths", paths.len()));
        }
        if diff != Some(2 * l as usize) {
            fails.push(format!("gadget l={l}: path difference {diff:?}, wanted {}", 2 * l));
        }
        gadgets.push(json!({
            "l": l, "n": gx.graph.n(), "ham_paths": paths.len(), "diff": diff,
        }));
    }

    let ex = build_locked_example(4, None)?;
    let cycles = enumerate_ham_cycles(&ex.graph, DEFAULT_ENUM_CAP)?;
    let diff = match cycles.as_slice() {
        [a, b] => Some(symmetric_difference_size(a, b)),
        _ => None,
    };
    if cycles.len() != 2 {
        fails.push(format!("locked k=4: {} Hamiltonian cycles", cycles.len()));
    }
    if diff != Some(10) {
        fails.push(format!("locked k=4: cycle difference {diff:?}, wanted 10"));
    }
    let (_, at_k) = check_irreducible(&ex.graph, 4, TargetClass::HamiltonianCycles, DEFAULT_ENUM_CAP)?;
    if at_k.connected || at_k.component_sizes != vec![1, 1] {
        fails.push(format!("locked k=4: components {:?} at k=4", at_k.component_sizes));
    }
    let (_, above) = check_irreducible(&ex.graph, 5, TargetClass::HamiltonianCycles, DEFAULT_ENUM_CAP)?;
    if !above.connected {
        fails.push("locked k=4: still disconnected at k=5".to_string());
    }

    let details = json!({
        "gadgets": gadgets,
        "locked": {
            "k": ex.k,
            "n": ex.graph.n(),
            "split_sizes": [ex.a_size, ex.b_size],
            "ham_cycles": cycles.len(),
            "diff": diff,
            "component_sizes_at_k": at_k.component_sizes,
            "connected_above_k": above.connected,
        },
        "failures": fails,
    });
    Ok((fails.is_empty(), details))
}

/// Dense monotone fixture: row i sees columns [max(i-w, 1), min(i+w, n)];
/// half-dense once w ≥ ⌈n/2⌉.
fn banded(n: u32, w: u32) -> Result<MonotoneGraph> {
    let rows: Vec<(u32, u32)> = (1..=n)
        .map(|i| (i.saturating_sub(w).max(1), (i + w).min(n)))
        .collect();
    MonotoneGraph::from_intervals(&rows)
}

fn claim_monotone() -> Result<(bool, Value)> {
    let instances: Vec<(&str, MonotoneGraph, usize)> = vec![
        ("banded(4,2)", banded(4, 2)?, 25),
        ("banded(5,3)", banded(5, 3)?, 765),
        ("banded(6,3)", banded(6, 3)?, 5193),
        ("staircase(6)", build_staircase(6)?, 29),
        ("staircase(8)", build_staircase(8)?, 169),
    ];
    let mut fails = Vec::new();
    let mut rows = Vec::new();
    for (name, mg, expected) in &instances {
        let g = mg.graph();
        let fs: Vec<TwoFactor> = enumerate_two_factors(g, 10_000)?
            .into_iter()
            .map(|e| TwoFactor::new(g, e).expect("enumerated 2-factor"))
            .collect();
        if fs.len() != *expected {
            fails.push(format!("{name}: {} 2-factors, expected {expected}", fs.len()));
        }
        let systems: Vec<PathSystem> =
            fs.iter().map(|f| phi1(f, mg)).collect::<Result<_>>()?;
        let keys: BTreeSet<(Vec<u32>, Vec<u32>, Vec<u32>)> = systems
            .iter()
            .map(|ps| {
                let (a, b, r) = ps.parts();
                (a.to_vec(), b.to_vec(), r.to_vec())
            })
            .collect();
        if keys.len() != fs.len() {
            fails.push(format!("{name}: cut map is not injective"));
        }
        for (f, ps) in fs.iter().zip(&systems) {
            if phi1_inverse(ps, mg)?.edges() != f.edges() {
                fails.push(format!("{name}: inverse round trip failed"));
                break;
            }
        }
        // The full embedding (cut, then join) needs half density; the cut map
        // alone does not, so staircase instances exercise only that part.
        let mut hams = Vec::new();
        let mut max_edits = 0usize;
        let mut quadrants_complete = None;
        if mg.is_half_dense() {
            for f in &fs {
                let (h, ps, edits) = phi(f, mg)?;
                let paths = ps.nonempty_paths().len();
                if edits > 3 * paths || edits > 9 {
                    fails.push(format!("{name}: join made {edits} edits on {paths} paths"));
                }
                max_edits = max_edits.max(edits);
                hams.push(h);
            }
            let q = quadrants(mg)?;
            let complete = q.a1.iter().all(|&a| q.b1.iter().all(|&b| g.has_edge(a, b)))
                && q.a2.iter().all(|&a| q.b2.iter().all(|&b| g.has_edge(a, b)));
            if !complete {
                fails.push(format!("{name}: half-dense quadrants are not complete"));
            }
            quadrants_complete = Some(complete);
        }
        // Lipschitz bounds, all pairs: 3·d for the cut map, 3·d + 18 through
        // the full embedding.
        let ps_edges: Vec<_> = systems.iter().map(|ps| ps.edge_set()).collect();
        let violations: usize = (0..fs.len())
            .into_par_iter()
            .map(|i| {
                let mut v = 0usize;
                for j in i + 1..fs.len() {
                    let d = symmetric_difference_size(fs[i].edges(), fs[j].edges());
                    if symmetric_difference_size(&ps_edges[i], &ps_edges[j]) > 3 * d {
                        v += 1;
                    }
                    if !hams.is_empty()
                        && symmetric_difference_size(hams[i].edges(), hams[j].edges()) > 3 * d + 18
                    {
                        v += 1;
                    }
                }
                v
            })
            .sum();
        if violations > 0 {
            fails.push(format!("{name}: {violations} Lipschitz violations"));
        }
        rows.push(json!({
            "instance": name,
            "two_factors": fs.len(),
            "injective": keys.len() == fs.len(),
            "half_dense": mg.is_half_dense(),
            "max_join_edits": if mg.is_half_dense() { Some(max_edits) } else { None },
            "lipschitz_violations": violations,
            "quadrants_complete": quadrants_complete,
        }));
    }
    let details = json!({ "instances": rows, "failures": fails });
    Ok((fails.is_empty(), details))
}

fn claim_staircase() -> Result<(bool, Value)> {
    let mut fails = Vec::new();
    let mut rows = Vec::new();
    for (n, expected) in [(4u32, 4usize), (6, 16), (8, 64)] {
        let mg = build_staircase(n)?;
        let count = enumerate_ham_cycles(mg.graph(), DEFAULT_ENUM_CAP)?.len();
        if count != expected {
            fails.push(format!("staircase({n}): {count} Hamiltonian cycles, expected {expected}"));
        }
        rows.push(json!({ "n_side": n, "ham_cycles": count, "expected": expected }));
    }
    let mut tf_rows = Vec::new();
    for (n, expected) in [(6u32, 29usize), (8, 169)] {
        let mg = build_staircase(n)?;
        let count = enumerate_two_factors(mg.graph(), DEFAULT_ENUM_CAP)?.len();
        let floor: usize = (1..=n as usize / 4).product();
        if count != expected {
            fails.push(format!("staircase({n}): {count} 2-factors, expected {expected}"));
        }
        if count < floor {
            fails.push(format!("staircase({n}): 2-factor count below ({n}/4)! = {floor}"));
        }
        tf_rows.push(json!({ "n_side": n, "two_factors": count, "expected": expected, "factorial_floor": floor }));
    }
    let details = json!({
        "ham_counts": rows,
        "ham_rule": "2^(n-2)",
        "two_factor_counts": tf_rows,
        "failures": fails,
    });
    Ok((fails.is_empty(), details))
}

struct JsStats {
    states: usize,
    two_factors: usize,
    distance: usize,
    repair_gaps: usize,
    fails: Vec<String>,
}

/// All stability checks on one graph: symmetric bounded-weight state graph,
/// chain distance to the 2-factors, 3-edit repair, polynomial state ratio.
fn js_graph_checks(g: &Graph, cap: usize, tag: &str) -> Result<JsStats> {
    let sg = js_state_graph(g, cap)?;
    let n = g.n() as u64;
    let mut fails = Vec::new();
    if !sg.is_symmetric() {
        fails.push(format!("{tag}: weights are not symmetric"));
    }
    if sg.max_degree() as u64 > n * n * n {
        fails.push(format!("{tag}: state degree {}", sg.max_degree()));
    }
    if sg.max_row_weight() > 3 * n * n {
        fails.push(format!("{tag}: row weight {}", sg.max_row_weight()));
    }
    if sg.arcs.iter().flatten().any(|&(_, w)| w == 0) {
        fails.push(format!("{tag}: zero-weight arc"));
    }
    let two_factors = sg.states.iter().filter(|s| s.is_complete()).count();
    if two_factors == 0 {
        fails.push(format!("{tag}: no 2-factor"));
    }
    let mut distance = 0usize;
    for d in sg.distances_to_two_factors() {
        match d {
            Some(k) => distance = distance.max(k),
            None => {
                fails.push(format!("{tag}: some state cannot reach a 2-factor"));
                distance = usize::MAX;
                break;
            }
        }
    }
    if distance > JS_DISTANCE_CAP {
        fails.push(format!("{tag}: chain distance {distance}"));
    }
    if sg.states.len() as u64 > n * n * n * two_factors as u64 {
        fails.push(format!(
            "{tag}: {} states against {} 2-factors",
            sg.states.len(),
            two_factors
        ));
    }
    let mut repair_gaps = 0usize;
    let boundary = 2 * g.min_degree() == g.n() as usize;
    for s in &sg.states {
        if s.is_complete() {
            continue;
        }
        match repair(s, g) {
            Ok(f) => {
                if symmetric_difference_size(s.edges(), f.edges()) > REPAIR_EDIT_CAP {
                    fails.push(format!(
                        "{tag}: repair needed more than {REPAIR_EDIT_CAP} edits"
                    ));
                }
            }
            // At exact half density the 3-edit ball around a deficient state
            // can be empty; the repair search is complete, so the error
            // certifies that. Chain distance ≤ 3 is still enforced above, so
            // these states reach a 2-factor through intermediate deficient
            // states.
            Err(Error::ConstructionFailed(_)) if boundary => repair_gaps += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(JsStats {
        states: sg.states.len(),
        two_factors,
        distance,
        repair_gaps,
        fails,
    })
}

fn claim_js_stability() -> Result<(bool, Value)> {
    let mut fails = Vec::new();
    let mut exhaustive_rows = Vec::new();
    // Every graph with minimum degree ≥ ⌈n/2⌉, exhaustively for n ≤ 6.
    for n in 3u32..=6 {
        let pair_count = n * (n - 1) / 2;
        let floor = n.div_ceil(2);
        let stats: Vec<JsStats> = (0u64..1 << pair_count)
            .into_par_iter()
            .filter_map(|mask| {
                let mut edges = Vec::with_capacity(pair_count as usize);
                let mut deg = vec![0u32; n as usize];
                let mut bit = 0;
                for a in 0..n {
                    for b in a + 1..n {
                        if mask >> bit & 1 == 1 {
                            edges.push((a, b));
                            deg[a as usize] += 1;
                            deg[b as usize] += 1;
                        }
                        bit += 1;
                    }
                }
                if deg.iter().copied().min().unwrap_or(0) < floor {
                    return None;
                }
                let g = Graph::new(n, edges, None).expect("simple edge list");
                Some(js_graph_checks(&g, JS_EXHAUSTIVE_CAP, &format!("n={n} mask={mask}")))
            })
            .collect::<Result<_>>()?;
        let graphs = stats.len();
        let max_states = stats.iter().map(|s| s.states).max().unwrap_or(0);
        let max_distance = stats.iter().map(|s| s.distance).max().unwrap_or(0);
        let gap_states: usize = stats.iter().map(|s| s.repair_gaps).sum();
        for s in stats {
            fails.extend(s.fails);
        }
        exhaustive_rows.push(json!({
            "n": n,
            "graphs_with_degree_floor": graphs,
            "max_states": max_states,
            "max_chain_distance": max_distance,
            "repair_gap_states": gap_states,
        }));
    }
    // Seeded random graphs just above half density.
    let random: Vec<JsStats> = (0..JS_RANDOM_GRAPHS)
        .into_par_iter()
        .map(|i| {
            let n = 7 + (i as u32 % 2);
            let g = build_random_dense(n, 4, 0xd15e ^ i as u64, false)?;
            js_graph_checks(&g, JS_RANDOM_STATE_CAP, &format!("random {i}"))
        })
        .collect::<Result<_>>()?;
    let random_max_states = random.iter().map(|s| s.states).max().unwrap_or(0);
    let random_max_distance = random.iter().map(|s| s.distance).max().unwrap_or(0);
    let random_gap_states: usize = random.iter().map(|s| s.repair_gaps).sum();
    let max_ratio = random
        .iter()
        .map(|s| s.states.div_ceil(s.two_factors.max(1)))
        .max()
        .unwrap_or(0);
    for s in random {
        fails.extend(s.fails);
    }
    let truncated: Vec<&String> = fails.iter().take(10).collect();
    let details = json!({
        "exhaustive": exhaustive_rows,
        "random": {
            "graphs": JS_RANDOM_GRAPHS,
            "n": [7, 8],
            "degree_floor": 4,
            "max_states": random_max_states,
            "max_chain_distance": random_max_distance,
            "max_state_ratio": max_ratio,
            "repair_gap_states": random_gap_states,
        },
        "distance_cap": JS_DISTANCE_CAP,
        "repair_gap_note": "deficient states at exact half density whose 3-edit ball holds \
                            no 2-factor; the repair search is complete, so each is certified, \
                            and each still reaches a 2-factor within 3 chain moves",
        "failure_count": fails.len(),
        "failures": truncated,
    });
    Ok((fails.is_empty(), details))
}

fn claim_chain_algebra() -> Result<(bool, Value)> {
    let instances: Vec<(&str, Graph, usize)> = vec![
        ("k4", Graph::complete(4), 3),
        ("k5", Graph::complete(5), 12),
        ("k44", Graph::complete_bipartite(4), 72),
    ];
    let mut fails = Vec::new();
    let mut rows = Vec::new();
    for (tag, g, expected) in &instances {
        let cfg = ChainConfig {
            k: 2,
            target: TargetClass::HamiltonianCycles,
            lazy: true,
            seed: 0xa5,
        };
        let states = enumerate_states(g, cfg.target, DEFAULT_ENUM_CAP)?;
        if states.len() != *expected {
            fails.push(format!("{tag}: {} cycles, expected {expected}", states.len()));
        }
        let sg = StateGraph::build(g, cfg.k, states.clone())?;
        let kc = verify_kernel(g, &sg, &cfg)?;
        if !(kc.symmetric && kc.rows_sum_to_one && kc.uniform_is_stationary && kc.lazy_diagonal) {
            fails.push(format!("{tag}: kernel algebra check failed"));
        }
        let mix = mixing_exact(g, &sg, &cfg, &[0.25], 5_000, DEFAULT_DENSE_CAP)?;
        if (mix.lambda0 - 1.0).abs() > EIG_TOL {
            fails.push(format!("{tag}: top eigenvalue {}", mix.lambda0));
        }
        if !(-EIG_TOL..1.0).contains(&mix.lambda1) {
            fails.push(format!("{tag}: second eigenvalue {}", mix.lambda1));
        }
        if mix.lambda_min < -EIG_TOL {
            fails.push(format!("{tag}: lazy kernel is not PSD ({})", mix.lambda_min));
        }
        let Some(&(eps, tau)) = mix.tau.first() else {
            fails.push(format!("{tag}: chain never mixed below 1/4"));
            continue;
        };
        let (_, bound) = mix.spectral_tau_bound[0];
        if f64::from(tau) > bound + EIG_TOL {
            fails.push(format!("{tag}: measured tau {tau} above spectral bound {bound}"));
        }
        if *tag == "k4" && (tau != 20 || (mix.lambda1 - 0.95).abs() > EIG_TOL) {
            fails.push(format!("{tag}: tau {tau}, lambda1 {}", mix.lambda1));
        }
        let emp = mixing_empirical(g, &cfg, &states[0], &[tau], EMP_TRIALS, &states)?;
        let (_, tv) = emp.tv[0];
        if tv > eps + EMP_TV_SLACK {
            fails.push(format!("{tag}: empirical TV {tv:.4} at tau, allowed {}", eps + EMP_TV_SLACK));
        }
        rows.push(json!({
            "instance": tag,
            "states": states.len(),
            "lambda1": mix.lambda1,
            "spectral_gap": mix.spectral_gap,
            "tau_quarter": tau,
            "spectral_tau_bound": bound,
            "theta": kc.theta,
            "theta_attained": kc.theta_attained,
            "empirical_trials": EMP_TRIALS,
            "empirical_tv_at_tau": tv,
        }));
    }
    let details = json!({
        "instances": rows,
        "tv_slack": EMP_TV_SLACK,
        "failures": fails,
    });
    Ok((fails.is_empty(), details))
}

fn claim_determinism() -> Result<(bool, Value)> {
    let dir = tempfile::tempdir()?;
    let p = |name: &str| dir.path().join(name);

    let k4 = Graph::complete(4);
    write_graph(p("k4.graph"), &k4)?;
    let k5 = Graph::complete(5);
    write_graph(p("k5.graph"), &k5)?;
    let k16 = Graph::complete(16);
    write_graph(p("k16.graph"), &k16)?;
    let (h1, h2) = distinct_cycle_pair(&k16, 0)?;
    write_edge_set(p("h1.edges"), h1.edges(), &k16)?;
    write_edge_set(p("h2.edges"), h2.edges(), &k16)?;
    // The full embedding pipeline needs a half-dense monotone graph.
    let band = banded(6, 3)?;
    write_graph(p("band63.graph"), band.graph())?;
    let f0 = enumerate_two_factors(band.graph(), DEFAULT_ENUM_CAP)?
        .into_iter()
        .next()
        .expect("banded graph has a 2-factor");
    write_edge_set(p("band63.f"), &f0, band.graph())?;

    let text = |v: &Value| serde_json::to_string(v).expect("report serializes");
    let mut rows = Vec::new();
    let mut fails = Vec::new();
    let mut record = |name: &str, identical: bool, fails: &mut Vec<String>| {
        if !identical {
            fails.push(format!("{name} differs between reruns"));
        }
        rows.push(json!({ "instrument": name, "identical": identical }));
    };

    let kind = crate::FamilyKind::Random {
        n: 12,
        delta: 8,
        seed: 5,
        bipartite: false,
        io: crate::FamilyOut {
            out: p("r.graph"),
            json: None,
        },
    };
    let (g1, r1) = crate::family_report(&kind)?;
    let (g2, r2) = crate::family_report(&kind)?;
    record("family-random", g1 == g2 && text(&r1) == text(&r2), &mut fails);

    let args = crate::SampleArgs {
        graph: p("k5.graph"),
        k: 2,
        class: crate::ClassArg::Ham,
        steps: 400,
        seed: 11,
        lazy: true,
        start: None,
        out: None,
    };
    record(
        "sample",
        text(&crate::sample_report(&args)?) == text(&crate::sample_report(&args)?),
        &mut fails,
    );

    let args = crate::TransformArgs {
        graph: p("k16.graph"),
        from: p("h1.edges"),
        to: p("h2.edges"),
        class: crate::ClassArg::Ham,
        bipartite: false,
        out: None,
    };
    record(
        "transform",
        text(&crate::transform_report(&args)?) == text(&crate::transform_report(&args)?),
        &mut fails,
    );

    let args = crate::JsArgs {
        graph: p("k5.graph"),
        exact: false,
        steps: Some(500),
        seed: Some(3),
        start: None,
        cap: 200_000,
        out: None,
    };
    record(
        "js-walk",
        text(&crate::js_report(&args)?) == text(&crate::js_report(&args)?),
        &mut fails,
    );

    let args = crate::JsArgs {
        graph: p("k5.graph"),
        exact: true,
        steps: None,
        seed: None,
        start: None,
        cap: 200_000,
        out: None,
    };
    record(
        "js-exact",
        text(&crate::js_report(&args)?) == text(&crate::js_report(&args)?),
        &mut fails,
    );

    let args = crate::EnumerateArgs {
        graph: p("k5.graph"),
        class: crate::EnumClassArg::TwoFactor,
        cap: DEFAULT_ENUM_CAP,
        list: true,
        out: None,
    };
    record(
        "enumerate",
        text(&crate::enumerate_report(&args)?) == text(&crate::enumerate_report(&args)?),
        &mut fails,
    );

    let args = crate::StategraphArgs {
        graph: p("k5.graph"),
        class: crate::ClassArg::Ham,
        k: 2,
        exact_matrix: true,
        lazy: true,
        cap: DEFAULT_ENUM_CAP,
        out: None,
    };
    record(
        "stategraph",
        text(&crate::stategraph_report(&args)?) == text(&crate::stategraph_report(&args)?),
        &mut fails,
    );

    let args = crate::MixArgs {
        graph: p("k4.graph"),
        k: 2,
        class: crate::ClassArg::Ham,
        eps: vec![0.25],
        lazy: true,
        empirical: true,
        trials: 2_000,
        seed: 9,
        t_max: 2_000,
        cap: DEFAULT_ENUM_CAP,
        csv: None,
        out: None,
    };
    let (m1, c1) = crate::mix_report(&args)?;
    let (m2, c2) = crate::mix_report(&args)?;
    record("mix", text(&m1) == text(&m2) && c1 == c2, &mut fails);

    let args = crate::MonotoneEmbedArgs {
        graph: p("band63.graph"),
        two_factor: p("band63.f"),
        out: p("emb.edges"),
        trace: None,
    };
    let (e1, t1) = crate::monotone_embed_report(&args)?;
    let (e2, t2) = crate::monotone_embed_report(&args)?;
    record("monotone-embed", e1 == e2 && text(&t1) == text(&t2), &mut fails);

    let claim_text = |r: &ClaimReport| {
        text(&json!({ "claim": r.claim, "pass": r.pass, "details": r.details }))
    };
    let c1 = run_claim("staircase-count")?;
    let c2 = run_claim("staircase-count")?;
    record("reproduce", claim_text(&c1) == claim_text(&c2), &mut fails);

    let details = json!({ "instruments": rows, "failures": fails });
    Ok((fails.is_empty(), details))
}
