//! Graphs and the 2-regular subgraph classes the chains walk on.
//!
//! Vertices are `0..n`. Edges are stored normalized (small endpoint first) and
//! edge sets are `BTreeSet<Edge>`, so every iteration order in the crate is
//! deterministic. A [`TwoFactor`] / [`HamCycle`] remembers a fingerprint of its
//! ambient graph; operations that take both re-check the pairing instead of
//! trusting the caller.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::{self, Deserialize, Deserializer};
use serde::ser::{Serialize, SerializeTuple, Serializer};

use crate::error::{Error, Result};

/// Undirected edge, normalized so `u() < v()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(u32, u32);

impl Edge {
    pub fn new(a: u32, b: u32) -> Result<Edge> {
        if a == b {
            return Err(Error::InvalidInput(format!("loop edge ({a},{b})")));
        }
        Ok(Edge(a.min(b), a.max(b)))
    }

    /// Panicking constructor for code paths where a loop is a bug, not input.
    pub fn of(a: u32, b: u32) -> Edge {
        Edge::new(a, b).expect("loop edge")
    }

    pub fn u(&self) -> u32 {
        self.0
    }

    pub fn v(&self) -> u32 {
        self.1
    }

    pub fn endpoints(&self) -> [u32; 2] {
        [self.0, self.1]
    }

    pub fn touches(&self, w: u32) -> bool {
        self.0 == w || self.1 == w
    }

    /// The endpoint that is not `w`; `w` must be an endpoint.
    pub fn other(&self, w: u32) -> u32 {
        debug_assert!(self.touches(w));
        if self.0 == w {
            self.1
        } else {
            self.0
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

impl Serialize for Edge {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&self.0)?;
        t.serialize_element(&self.1)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Edge, D::Error> {
        let (a, b) = <(u32, u32)>::deserialize(d)?;
        Edge::new(a, b).map_err(|e| de::Error::custom(e.to_string()))
    }
}

/// Sorted, deduplicated edge set; the state representation for all chains.
pub type EdgeSet = BTreeSet<Edge>;

pub fn edge_set<I: IntoIterator<Item = Edge>>(edges: I) -> EdgeSet {
    edges.into_iter().collect()
}

/// x △ y.
pub fn symmetric_difference(x: &EdgeSet, y: &EdgeSet) -> EdgeSet {
    x.symmetric_difference(y).copied().collect()
}

/// |x △ y| without materializing the set.
pub fn symmetric_difference_size(x: &EdgeSet, y: &EdgeSet) -> usize {
    x.symmetric_difference(y).count()
}

/// Simple undirected graph on vertices `0..n`, optionally carrying a balanced
/// bipartition (`A = 0..a`, `B = a..n`, every edge crossing).
#[derive(Debug, Clone)]
pub struct Graph {
    n: u32,
    edges: Vec<Edge>,
    adj: Vec<Vec<u32>>,
    adj_matrix: Vec<u64>,
    side_a: Option<u32>,
    fingerprint: u64,
}

impl Graph {
    pub fn new<I>(n: u32, edges: I, side_a: Option<u32>) -> Result<Graph>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut set = EdgeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({a},{b}) out of range for n={n}"
                )));
            }
            let e = Edge::new(a, b)?;
            if !set.insert(e) {
                return Err(Error::InvalidInput(format!("duplicate edge {e}")));
            }
        }
        if let Some(a) = side_a {
            if 2 * a != n {
                return Err(Error::InvalidInput(format!(
                    "bipartition must be balanced: |A|={a}, n={n}"
                )));
            }
            for e in &set {
                if (e.u() < a) == (e.v() < a) {
                    return Err(Error::InvalidInput(format!(
                        "edge {e} does not cross the bipartition (|A|={a})"
                    )));
                }
            }
        }
        let edges: Vec<Edge> = set.into_iter().collect();
        let mut adj = vec![Vec::new(); n as usize];
        let words = (n as usize * n as usize).div_ceil(64);
        let mut adj_matrix = vec![0u64; words];
        for e in &edges {
            adj[e.u() as usize].push(e.v());
            adj[e.v() as usize].push(e.u());
            for (a, b) in [(e.u(), e.v()), (e.v(), e.u())] {
                let bit = a as usize * n as usize + b as usize;
                adj_matrix[bit / 64] |= 1 << (bit % 64);
            }
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        let mut g = Graph {
            n,
            edges,
            adj,
            adj_matrix,
            side_a,
            fingerprint: 0,
        };
        g.fingerprint = g.compute_fingerprint();
        Ok(g)
    }

    /// Complete graph K_n.
    pub fn complete(n: u32) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges, None).unwrap()
    }

    /// Complete balanced bipartite graph K_{m,m} with parts `0..m` and `m..2m`.
    pub fn complete_bipartite(m: u32) -> Graph {
        let edges = (0..m).flat_map(move |u| (m..2 * m).map(move |v| (u, v)));
        Graph::new(2 * m, edges, Some(m)).unwrap()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by (min endpoint, max endpoint).
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges.iter().copied().collect()
    }

    /// Position of `e` in the sorted edge list.
    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        if a == b || a >= self.n || b >= self.n {
            return false;
        }
        let bit = a as usize * self.n as usize + b as usize;
        self.adj_matrix[bit / 64] & (1 << (bit % 64)) != 0
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.has_edge(e.u(), e.v())
    }

    /// Neighbors of `v`, ascending.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// `Some(a)` when the graph carries the balanced bipartition `A=0..a`, `B=a..n`.
    pub fn side_a(&self) -> Option<u32> {
        self.side_a
    }

    pub fn is_bipartite(&self) -> bool {
        self.side_a.is_some()
    }

    /// Per-side part size for bipartite graphs, full vertex count otherwise.
    /// Degree bounds in the bipartite variants are stated against this.
    pub fn degree_bound_base(&self) -> u32 {
        self.side_a.unwrap_or(self.n)
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    fn compute_fingerprint(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        let mut eat = |x: u64| {
            h ^= x;
            h = h.wrapping_mul(0x100000001b3);
        };
        eat(self.n as u64);
        eat(self.side_a.map_or(u64::MAX, |a| a as u64));
        for e in &self.edges {
            eat(((e.u() as u64) << 32) | e.v() as u64);
        }
        h
    }
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    NotTwoFactor,
    TwoFactor,
    HamiltonianCycle,
}

/// Classify an edge set as 2-factor / Hamiltonian cycle / neither.
/// Edges outside `g` are rejected as invalid input, not classified.
pub fn classify(g: &Graph, edges: &EdgeSet) -> Result<Classification> {
    let mut deg = vec![0u8; g.n() as usize];
    for e in edges {
        if !g.contains(*e) {
            return Err(Error::InvalidInput(format!("edge {e} not in ambient graph")));
        }
        for w in e.endpoints() {
            deg[w as usize] += 1;
            if deg[w as usize] > 2 {
                return Ok(Classification::NotTwoFactor);
            }
        }
    }
    if deg.iter().any(|&d| d != 2) {
        return Ok(Classification::NotTwoFactor);
    }
    let comps = cycle_components(g.n(), edges);
    if comps.len() == 1 {
        Ok(Classification::HamiltonianCycle)
    } else {
        Ok(Classification::TwoFactor)
    }
}

/// Components of a 2-regular spanning edge set, each a closed vertex walk.
/// Canonical: a component starts at its smallest vertex and runs toward that
/// vertex's smaller neighbor; components are ordered by starting vertex.
fn cycle_components(n: u32, edges: &EdgeSet) -> Vec<Vec<u32>> {
    let mut nbrs: Vec<[u32; 2]> = vec![[u32::MAX; 2]; n as usize];
    for e in edges {
        for (a, b) in [(e.u(), e.v()), (e.v(), e.u())] {
            let slot = &mut nbrs[a as usize];
            if slot[0] == u32::MAX {
                slot[0] = b;
            } else {
                debug_assert_eq!(slot[1], u32::MAX);
                slot[1] = b;
            }
        }
    }
    for s in &mut nbrs {
        s.sort_unstable();
    }
    let mut seen = vec![false; n as usize];
    let mut comps = Vec::new();
    for v0 in 0..n {
        if seen[v0 as usize] {
            continue;
        }
        let mut comp = vec![v0];
        seen[v0 as usize] = true;
        let mut prev = v0;
        let mut cur = nbrs[v0 as usize][0];
        while cur != v0 {
            seen[cur as usize] = true;
            comp.push(cur);
            let [a, b] = nbrs[cur as usize];
            let next = if a == prev { b } else { a };
            prev = cur;
            cur = next;
        }
        comps.push(comp);
    }
    comps
}

/// 2-regular spanning subgraph of a fixed ambient graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoFactor {
    edges: EdgeSet,
    components: Vec<Vec<u32>>,
    graph_fp: u64,
}

impl TwoFactor {
    pub fn new(g: &Graph, edges: EdgeSet) -> Result<TwoFactor> {
        match classify(g, &edges)? {
            Classification::NotTwoFactor => Err(Error::InvalidInput(
                "edge set is not a 2-factor of the ambient graph".into(),
            )),
            _ => Ok(TwoFactor {
                components: cycle_components(g.n(), &edges),
                edges,
                graph_fp: g.fingerprint(),
            }),
        }
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn into_edges(self) -> EdgeSet {
        self.edges
    }

    /// Cycles in canonical order; lengths sum to n.
    pub fn components(&self) -> &[Vec<u32>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn is_hamiltonian(&self) -> bool {
        self.components.len() == 1
    }

    /// Check this state belongs to `g`; ops taking a pair call this first.
    pub fn check_ambient(&self, g: &Graph) -> Result<()> {
        if self.graph_fp != g.fingerprint() {
            return Err(Error::InvalidInput(
                "state belongs to a different ambient graph".into(),
            ));
        }
        Ok(())
    }

    /// The two cycle-neighbors of `v`, ascending.
    pub fn factor_neighbors(&self, v: u32) -> [u32; 2] {
        let comp = self
            .components
            .iter()
            .find(|c| c.contains(&v))
            .expect("vertex not covered by 2-factor");
        let i = comp.iter().position(|&x| x == v).unwrap();
        let len = comp.len();
        let mut pair = [comp[(i + 1) % len], comp[(i + len - 1) % len]];
        pair.sort_unstable();
        pair
    }
}

/// Hamiltonian cycle: a connected 2-factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamCycle {
    factor: TwoFactor,
}

impl HamCycle {
    pub fn new(g: &Graph, edges: EdgeSet) -> Result<HamCycle> {
        let factor = TwoFactor::new(g, edges)?;
        if !factor.is_hamiltonian() {
            return Err(Error::InvalidInput(format!(
                "edge set is a 2-factor with {} components, not a Hamiltonian cycle",
                factor.component_count()
            )));
        }
        Ok(HamCycle { factor })
    }

    /// Build from a cyclic vertex order (closing edge implied).
    pub fn from_order(g: &Graph, order: &[u32]) -> Result<HamCycle> {
        if order.len() != g.n() as usize {
            return Err(Error::InvalidInput(format!(
                "order has {} vertices, graph has {}",
                order.len(),
                g.n()
            )));
        }
        let mut edges = EdgeSet::new();
        for i in 0..order.len() {
            let e = Edge::new(order[i], order[(i + 1) % order.len()])?;
            if !g.contains(e) {
                return Err(Error::InvalidInput(format!("edge {e} not in ambient graph")));
            }
            edges.insert(e);
        }
        HamCycle::new(g, edges)
    }

    pub fn edges(&self) -> &EdgeSet {
        self.factor.edges()
    }

    pub fn as_two_factor(&self) -> &TwoFactor {
        &self.factor
    }

    pub fn into_two_factor(self) -> TwoFactor {
        self.factor
    }

    /// Canonical cyclic vertex order (starts at 0, toward 0's smaller neighbor).
    pub fn order(&self) -> &[u32] {
        &self.factor.components()[0]
    }

    pub fn check_ambient(&self, g: &Graph) -> Result<()> {
        self.factor.check_ambient(g)
    }
}

/// Which of the two input states a difference edge came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }
}

/// Closed alternating walk in a symmetric difference. `edges[i]` joins
/// `vertices[i]` and `vertices[(i+1) % len]`; sides alternate starting with
/// [`Side::First`]; a vertex appears at most twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingCircuit {
    pub vertices: Vec<u32>,
    pub edges: Vec<(Edge, Side)>,
}

impl AlternatingCircuit {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges.iter().map(|(e, _)| *e).collect()
    }

    fn validate(&self) {
        let len = self.edges.len();
        assert_eq!(self.vertices.len(), len);
        assert!(len >= 4 && len.is_multiple_of(2), "alternating circuit length {len}");
        let mut seen = EdgeSet::new();
        for i in 0..len {
            let (e, side) = self.edges[i];
            assert!(seen.insert(e), "repeated edge {e}");
            let expect = if i % 2 == 0 { Side::First } else { Side::Second };
            assert_eq!(side, expect, "sides do not alternate at {i}");
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % len]);
            assert_eq!(e, Edge::of(a, b), "edge {e} does not join {a},{b}");
        }
    }
}

/// Decompose `x △ y` into alternating circuits, canonically: repeatedly start
/// at the lowest vertex with unused difference edges, leave along the unused
/// first-side edge with the lowest neighbor, and thereafter always leave along
/// an unused edge of the side opposite the arrival edge, lowest neighbor first.
/// A circuit closes when no opposite-side edge remains, which the per-vertex
/// side balance forces to happen at its start vertex.
///
/// Requires every vertex to touch equally many first-side and second-side
/// difference edges (automatic when x and y are 2-factors of one graph).
pub fn decompose_alternating(x: &EdgeSet, y: &EdgeSet) -> Result<Vec<AlternatingCircuit>> {
    #[derive(Clone)]
    struct Inc {
        nbr: u32,
        side: Side,
        used: bool,
    }

    let max_v = x
        .iter()
        .chain(y.iter())
        .map(|e| e.v())
        .max()
        .map_or(0, |v| v as usize + 1);
    let mut inc: Vec<Vec<Inc>> = vec![Vec::new(); max_v];
    let mut add = |e: &Edge, side: Side| {
        for w in e.endpoints() {
            inc[w as usize].push(Inc {
                nbr: e.other(w),
                side,
                used: false,
            });
        }
    };
    for e in x.difference(y) {
        add(e, Side::First);
    }
    for e in y.difference(x) {
        add(e, Side::Second);
    }
    for (v, l) in inc.iter_mut().enumerate() {
        l.sort_unstable_by_key(|i| i.nbr);
        let firsts = l.iter().filter(|i| i.side == Side::First).count();
        if 2 * firsts != l.len() {
            return Err(Error::InvalidInput(format!(
                "vertex {v} has unbalanced difference degrees; inputs are not 2-factors of one graph"
            )));
        }
    }

    // Take the lowest-neighbor unused edge of `side` at `v`, if any.
    let take = |inc: &mut [Vec<Inc>], v: u32, side: Side| -> Option<u32> {
        let slot = inc[v as usize]
            .iter_mut()
            .find(|i| !i.used && i.side == side)?;
        slot.used = true;
        let nbr = slot.nbr;
        let back = inc[nbr as usize]
            .iter_mut()
            .find(|i| !i.used && i.side == side && i.nbr == v)
            .expect("mirrored incidence entry");
        back.used = true;
        Some(nbr)
    };

    let mut circuits = Vec::new();
    for v0 in 0..max_v as u32 {
        while inc[v0 as usize].iter().any(|i| !i.used) {
            let mut vertices = vec![v0];
            let mut edges = Vec::new();
            let mut side = Side::First;
            let mut cur = take(&mut inc, v0, side).expect("balanced start vertex");
            edges.push((Edge::of(v0, cur), side));
            loop {
                side = side.flip();
                match take(&mut inc, cur, side) {
                    Some(next) => {
                        vertices.push(cur);
                        edges.push((Edge::of(cur, next), side));
                        cur = next;
                    }
                    None => {
                        assert_eq!(cur, v0, "alternating traversal stalled off its start");
                        break;
                    }
                }
            }
            let circuit = AlternatingCircuit { vertices, edges };
            circuit.validate();
            circuits.push(circuit);
        }
    }
    Ok(circuits)
}
