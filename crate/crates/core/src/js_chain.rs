//! Auxiliary add/delete chain on almost-2-factors.
//!
//! States are subgraphs whose degrees are ≤ 2 with total deficit ≤ 2: full
//! 2-factors, states with two degree-1 vertices, and states with one
//! degree-0 vertex. A transition picks an ordered vertex pair `(i, j)`
//! uniformly among all n² (pairs that fit no rule hold):
//!
//! - Type 0: the state is a 2-factor and `ij` one of its edges — delete it.
//! - Type 1: the state is deficient, `i` has state-degree < 2, `ij` is a
//!   graph edge outside the state, and `j` already has degree 2 — add `ij`
//!   and delete one of the three edges now at `j`, uniformly (deleting `ij`
//!   itself undoes the addition, i.e. holds).
//! - Type 2: as Type 1 but `j` has degree < 2 — just add `ij`.
//!
//! All exact probabilities are kept in units of `1/(3n²)` so Type 1 weighs 1,
//! Type 0 and Type 2 weigh 3 per ordered pair, and the chain's symmetry is an
//! integer identity. The box describing the rules reads "the degree of i in
//! G"; degree in the *state* is the only reading under which the chain stays
//! on its state space, so that is what this implements.

use std::collections::{BTreeMap, VecDeque};

use num::{BigInt, BigRational};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::enumerate_by_degree;
use crate::error::{Error, Result};
use crate::graph::{symmetric_difference_size, Edge, EdgeSet, Graph, TwoFactor};

/// Degree deficit of an almost-2-factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Deficit {
    /// A full 2-factor.
    None,
    /// Two distinct vertices of degree 1 (`kappa < lambda`).
    TwoOnes { kappa: u32, lambda: u32 },
    /// One vertex of degree 0.
    OneZero { kappa: u32 },
}

/// Subgraph with degrees ≤ 2 and total degree deficit ≤ 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlmostTwoFactor {
    edges: EdgeSet,
    deficit: Deficit,
    #[serde(skip)]
    graph_fp: u64,
}

impl AlmostTwoFactor {
    pub fn new(g: &Graph, edges: EdgeSet) -> Result<AlmostTwoFactor> {
        let mut deg = vec![0u32; g.n() as usize];
        for e in &edges {
            if !g.contains(*e) {
                return Err(Error::InvalidInput(format!(
                    "edge {e} is not in the ambient graph"
                )));
            }
            deg[e.u() as usize] += 1;
            deg[e.v() as usize] += 1;
        }
        if let Some(v) = (0..g.n()).find(|&v| deg[v as usize] > 2) {
            return Err(Error::InvalidInput(format!("vertex {v} has degree > 2")));
        }
        let ones: Vec<u32> = (0..g.n()).filter(|&v| deg[v as usize] == 1).collect();
        let zeros: Vec<u32> = (0..g.n()).filter(|&v| deg[v as usize] == 0).collect();
        let deficit = match (ones.as_slice(), zeros.as_slice()) {
            ([], []) => Deficit::None,
            ([a, b], []) => Deficit::TwoOnes {
                kappa: *a,
                lambda: *b,
            },
            ([], [a]) => Deficit::OneZero { kappa: *a },
            _ => {
                return Err(Error::InvalidInput(format!(
                    "degree deficit exceeds 2 ({} degree-1 and {} degree-0 vertices)",
                    ones.len(),
                    zeros.len()
                )))
            }
        };
        Ok(AlmostTwoFactor {
            edges,
            deficit,
            graph_fp: g.fingerprint(),
        })
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn into_edges(self) -> EdgeSet {
        self.edges
    }

    pub fn deficit(&self) -> Deficit {
        self.deficit
    }

    pub fn is_complete(&self) -> bool {
        self.deficit == Deficit::None
    }

    pub fn check_ambient(&self, g: &Graph) -> Result<()> {
        if self.graph_fp != g.fingerprint() {
            return Err(Error::InvalidInput(
                "state belongs to a different ambient graph".into(),
            ));
        }
        Ok(())
    }

    fn degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|e| e.touches(v)).count()
    }
}

/// What one ordered pair does.
enum PairRule {
    Hold,
    Type0(Edge),
    Type1 { add: Edge, pivot: u32 },
    Type2(Edge),
}

fn pair_rule(x: &AlmostTwoFactor, g: &Graph, i: u32, j: u32) -> PairRule {
    if i == j || !g.has_edge(i, j) {
        return PairRule::Hold;
    }
    let e = Edge::of(i, j);
    if x.is_complete() {
        return if x.edges.contains(&e) {
            PairRule::Type0(e)
        } else {
            PairRule::Hold
        };
    }
    if x.degree(i) >= 2 || x.edges.contains(&e) {
        return PairRule::Hold;
    }
    if x.degree(j) >= 2 {
        PairRule::Type1 { add: e, pivot: j }
    } else {
        PairRule::Type2(e)
    }
}

/// The three edges at `pivot` once `add` is in, ascending.
fn deletion_pool(x: &AlmostTwoFactor, add: Edge, pivot: u32) -> Vec<Edge> {
    let mut pool: Vec<Edge> = x
        .edges
        .iter()
        .copied()
        .filter(|e| e.touches(pivot))
        .collect();
    pool.push(add);
    pool.sort_unstable();
    debug_assert_eq!(pool.len(), 3);
    pool
}

/// One transition. Draws `i`, then `j`, then — for Type 1 — an index into the
/// sorted three-edge deletion pool.
pub fn js_step(x: &AlmostTwoFactor, g: &Graph, rng: &mut ChaCha8Rng) -> AlmostTwoFactor {
    let i = rng.random_range(0..g.n());
    let j = rng.random_range(0..g.n());
    let edges = match pair_rule(x, g, i, j) {
        PairRule::Hold => return x.clone(),
        PairRule::Type0(e) => {
            let mut y = x.edges.clone();
            y.remove(&e);
            y
        }
        PairRule::Type2(e) => {
            let mut y = x.edges.clone();
            y.insert(e);
            y
        }
        PairRule::Type1 { add, pivot } => {
            let pool = deletion_pool(x, add, pivot);
            let pick = pool[rng.random_range(0..pool.len() as u32) as usize];
            if pick == add {
                return x.clone();
            }
            let mut y = x.edges.clone();
            y.insert(add);
            y.remove(&pick);
            y
        }
    };
    AlmostTwoFactor::new(g, edges).expect("transition preserves the class")
}

/// Exact one-step neighbors of `x` with weights in units of `1/(3n²)`;
/// holds are not listed, so the weights sum to at most `3n²`.
pub fn js_neighbors(x: &AlmostTwoFactor, g: &Graph) -> BTreeMap<EdgeSet, u64> {
    let mut out: BTreeMap<EdgeSet, u64> = BTreeMap::new();
    for i in 0..g.n() {
        for j in 0..g.n() {
            match pair_rule(x, g, i, j) {
                PairRule::Hold => {}
                PairRule::Type0(e) => {
                    let mut y = x.edges.clone();
                    y.remove(&e);
                    *out.entry(y).or_default() += 3;
                }
                PairRule::Type2(e) => {
                    let mut y = x.edges.clone();
                    y.insert(e);
                    *out.entry(y).or_default() += 3;
                }
                PairRule::Type1 { add, pivot } => {
                    for del in deletion_pool(x, add, pivot) {
                        if del == add {
                            continue;
                        }
                        let mut y = x.edges.clone();
                        y.insert(add);
                        y.remove(&del);
                        *out.entry(y).or_default() += 1;
                    }
                }
            }
        }
    }
    out
}

/// Exact transition probability when `x` and `y` are adjacent (symmetric;
/// `None` for `x = y` and non-neighbors).
pub fn js_adjacent(x: &AlmostTwoFactor, y: &AlmostTwoFactor, g: &Graph) -> Option<BigRational> {
    if x.edges == y.edges {
        return None;
    }
    let w = *js_neighbors(x, g).get(&y.edges)?;
    let n = BigInt::from(g.n());
    Some(BigRational::new(BigInt::from(w), 3 * &n * &n))
}

/// Every almost-2-factor of `g`: the 2-factors first, then the one-deficit
/// states ascending by vertex, then the two-deficit states in pair order.
pub fn enumerate_almost_two_factors(g: &Graph, cap: usize) -> Result<Vec<AlmostTwoFactor>> {
    let n = g.n() as usize;
    let mut out: Vec<AlmostTwoFactor> = Vec::new();
    let push = |target: &[u32], out: &mut Vec<AlmostTwoFactor>| -> Result<()> {
        for es in enumerate_by_degree(g, target, cap)? {
            out.push(AlmostTwoFactor::new(g, es).expect("enumeration respects degrees"));
        }
        if out.len() > cap {
            return Err(Error::CapExceeded {
                cap,
                count: out.len(),
            });
        }
        Ok(())
    };
    let all_two = vec![2u32; n];
    push(&all_two, &mut out)?;
    for kappa in 0..n {
        let mut t = all_two.clone();
        t[kappa] = 0;
        push(&t, &mut out)?;
    }
    for kappa in 0..n {
        for lambda in kappa + 1..n {
            let mut t = all_two.clone();
            t[kappa] = 1;
            t[lambda] = 1;
            push(&t, &mut out)?;
        }
    }
    Ok(out)
}

/// Exact state-space graph of the chain over all almost-2-factors.
pub struct JsStateGraph {
    pub states: Vec<AlmostTwoFactor>,
    /// `arcs[i]` lists `(state index, weight in 1/(3n²) units)`, ascending.
    pub arcs: Vec<Vec<(usize, u64)>>,
    pub n: u32,
}

pub fn js_state_graph(g: &Graph, cap: usize) -> Result<JsStateGraph> {
    let states = enumerate_almost_two_factors(g, cap)?;
    let index: BTreeMap<&EdgeSet, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (&s.edges, i))
        .collect();
    let arcs = states
        .iter()
        .map(|s| {
            js_neighbors(s, g)
                .into_iter()
                .map(|(y, w)| (*index.get(&y).expect("neighbor stays in the class"), w))
                .collect()
        })
        .collect();
    Ok(JsStateGraph {
        states,
        arcs,
        n: g.n(),
    })
}

impl JsStateGraph {
    /// `P(x,y) = P(y,x)` as exact integer weights.
    pub fn is_symmetric(&self) -> bool {
        self.arcs.iter().enumerate().all(|(i, nbrs)| {
            nbrs.iter()
                .all(|&(j, w)| self.arcs[j].iter().any(|&(k, w2)| k == i && w2 == w))
        })
    }

    /// Maximum number of distinct one-step neighbors over all states.
    pub fn max_degree(&self) -> usize {
        self.arcs.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Total outgoing weight of the heaviest row, in `1/(3n²)` units; the
    /// complement to `3n²` is the hold probability.
    pub fn max_row_weight(&self) -> u64 {
        self.arcs
            .iter()
            .map(|nbrs| nbrs.iter().map(|&(_, w)| w).sum())
            .max()
            .unwrap_or(0)
    }

    /// BFS distance of every state to the nearest 2-factor (`None`: unreachable).
    pub fn distances_to_two_factors(&self) -> Vec<Option<usize>> {
        let mut dist: Vec<Option<usize>> = vec![None; self.states.len()];
        let mut queue = VecDeque::new();
        for (i, s) in self.states.iter().enumerate() {
            if s.is_complete() {
                dist[i] = Some(0);
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            let d = dist[i].unwrap();
            for &(j, _) in &self.arcs[i] {
                if dist[j].is_none() {
                    dist[j] = Some(d + 1);
                    queue.push_back(j);
                }
            }
        }
        dist
    }
}

/// Maximum chain distance from an almost-2-factor to the nearest 2-factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JsDistance {
    Bounded(usize),
    /// Some state cannot reach any 2-factor; carries a witness state.
    Unreachable(EdgeSet),
}

pub fn k_js(g: &Graph, cap: usize) -> Result<JsDistance> {
    let sg = js_state_graph(g, cap)?;
    if !sg.states.iter().any(|s| s.is_complete()) {
        return Err(Error::Precondition("graph has no 2-factor".into()));
    }
    let dist = sg.distances_to_two_factors();
    let mut k = 0usize;
    for (i, d) in dist.iter().enumerate() {
        match d {
            Some(d) => k = k.max(*d),
            None => return Ok(JsDistance::Unreachable(sg.states[i].edges.clone())),
        }
    }
    Ok(JsDistance::Bounded(k))
}

/// `|𝓕'| / |𝓕|` as an exact rational.
pub fn p_stability(g: &Graph, cap: usize) -> Result<BigRational> {
    let states = enumerate_almost_two_factors(g, cap)?;
    let full = states.iter().filter(|s| s.is_complete()).count();
    if full == 0 {
        return Err(Error::Precondition("graph has no 2-factor".into()));
    }
    Ok(BigRational::new(
        BigInt::from(states.len()),
        BigInt::from(full),
    ))
}

/// Deficit repair: searches the entire 3-edit ball around `x`. Two degree-1
/// vertices joined by an unused graph edge close in one edit; otherwise any
/// 2-factor within symmetric difference 3 has the form `x − zz⁻ + az + bz⁻`
/// with `{a, b}` the deficit vertices, and both role orders against the
/// canonical orientation enumerate every such candidate. Complete states
/// repair to themselves. Requires `2·δ ≥ n`; because the search is complete,
/// a `ConstructionFailed` error certifies that no 2-factor lies within
/// 3 edits of `x`. That can happen only at exactly `2·δ = n` — the chain
/// distance to a 2-factor is still ≤ 3 there, via intermediate deficient
/// states.
pub fn repair(x: &AlmostTwoFactor, g: &Graph) -> Result<TwoFactor> {
    x.check_ambient(g)?;
    if 2 * g.min_degree() < g.n() as usize {
        return Err(Error::Precondition(format!(
            "repair needs 2·min_degree ≥ {}, graph has min degree {}",
            g.n(),
            g.min_degree()
        )));
    }
    let (vx, vy) = match x.deficit {
        Deficit::None => {
            return Ok(TwoFactor::new(g, x.edges.clone()).expect("complete state"))
        }
        Deficit::TwoOnes { kappa, lambda } => (kappa, lambda),
        Deficit::OneZero { kappa } => (kappa, kappa),
    };
    if vx != vy {
        let direct = Edge::of(vx, vy);
        if g.contains(direct) && !x.edges.contains(&direct) {
            let mut cand = x.edges.clone();
            cand.insert(direct);
            return Ok(TwoFactor::new(g, cand).expect("one added edge restores 2-regularity"));
        }
    }
    let pred = orient_almost(x, g.n(), vx, vy);
    // The canonical orientation fixes which endpoint of a removed edge plays
    // z, so the two role orders see different candidate sets.
    for (a, b) in [(vx, vy), (vy, vx)] {
        for &z in g.neighbors(a) {
            let Some(zm) = pred[z as usize] else {
                continue;
            };
            if zm == b || !g.has_edge(b, zm) {
                continue;
            }
            let az = Edge::of(a, z);
            let bzm = Edge::of(b, zm);
            if az == bzm || x.edges.contains(&az) || x.edges.contains(&bzm) {
                continue;
            }
            let mut cand = x.edges.clone();
            assert!(cand.remove(&Edge::of(z, zm)));
            cand.insert(az);
            cand.insert(bzm);
            if let Ok(f) = TwoFactor::new(g, cand) {
                assert!(symmetric_difference_size(x.edges(), f.edges()) <= 3);
                return Ok(f);
            }
        }
    }
    Err(Error::ConstructionFailed(
        "no 2-factor within 3 edits of this state (possible only at exact half density)".into(),
    ))
}

/// Predecessor map: cycles in canonical order (smallest vertex first, toward
/// its smaller neighbor), the deficit path oriented from `vx` to `vy`. The
/// degree-0 vertex (when `vx = vy`) is on no component and has no entry.
fn orient_almost(x: &AlmostTwoFactor, n: u32, vx: u32, vy: u32) -> Vec<Option<u32>> {
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n as usize];
    for e in &x.edges {
        adj[e.u() as usize].push(e.v());
        adj[e.v() as usize].push(e.u());
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    let mut pred: Vec<Option<u32>> = vec![None; n as usize];
    let mut seen = vec![false; n as usize];
    seen[vx as usize] = true;
    if vx != vy {
        let mut prev = vx;
        let mut cur = adj[vx as usize][0];
        pred[cur as usize] = Some(vx);
        loop {
            seen[cur as usize] = true;
            if cur == vy {
                break;
            }
            let nx = *adj[cur as usize]
                .iter()
                .find(|&&u| u != prev)
                .expect("path continues to the second deficit vertex");
            pred[nx as usize] = Some(cur);
            prev = cur;
            cur = nx;
        }
    }
    for s in 0..n {
        if seen[s as usize] || adj[s as usize].is_empty() {
            continue;
        }
        let mut prev = s;
        let mut cur = adj[s as usize][0];
        pred[cur as usize] = Some(s);
        seen[s as usize] = true;
        while cur != s {
            seen[cur as usize] = true;
            let nx = *adj[cur as usize].iter().find(|&&u| u != prev).unwrap();
            pred[nx as usize] = Some(cur);
            prev = cur;
            cur = nx;
        }
    }
    pred
}
