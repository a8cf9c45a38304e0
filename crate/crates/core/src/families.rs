//! Constructed graph families with certified properties: the parity obstruction
//! showing 2-switches are not irreducible at density 2n/3 − 1, the forced-path
//! gadget and the locked two-cycle instances built from it, the staircase
//! monotone family, and seeded random dense instances.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeSet, Graph, HamCycle};
use crate::monotone::MonotoneGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

/// A graph with a distinguished blue edge set whose intersection parity is
/// invariant under small switches.
#[derive(Debug, Clone)]
pub struct ColoredGraph {
    pub graph: Graph,
    pub blue: EdgeSet,
}

impl ColoredGraph {
    pub fn blue_count(&self, edges: &EdgeSet) -> usize {
        edges.iter().filter(|e| self.blue.contains(e)).count()
    }

    pub fn blue_parity(&self, edges: &EdgeSet) -> Parity {
        if self.blue_count(edges).is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Three blocks of size m (m odd): cliques on the outer blocks, complete
/// bipartite joins to the middle block, blue = edges touching the first
/// block. Every 4-cycle carries an even number of blue edges, so 2-switches
/// preserve blue parity, yet the returned Hamiltonian cycles have blue
/// counts m+1 and 2m−1 — one even, one odd. Minimum degree is 2n/3 − 1.
pub fn build_parity_example(m: u32) -> Result<(ColoredGraph, HamCycle, HamCycle)> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "block size must be odd and at least 3, got {m}"
        )));
    }
    // 1-based block accessors over 0-based vertices.
    let a = |i: u32| i - 1;
    let b = |i: u32| m + i - 1;
    let c = |i: u32| 2 * m + i - 1;
    let n = 3 * m;
    let mut edges = Vec::new();
    for i in 1..=m {
        for j in i + 1..=m {
            edges.push((a(i), a(j)));
            edges.push((c(i), c(j)));
        }
        for j in 1..=m {
            edges.push((a(i), b(j)));
            edges.push((c(i), b(j)));
        }
    }
    let graph = Graph::new(n, edges, None)?;
    let blue: EdgeSet = graph
        .edges()
        .iter()
        .copied()
        .filter(|e| e.u() < m)
        .collect();
    let colored = ColoredGraph { graph, blue };

    let mut h1 = vec![b(1)];
    h1.extend((1..=m).map(a));
    h1.push(b(m));
    for i in 1..=m - 2 {
        h1.push(c(i));
        h1.push(b(i + 1));
    }
    h1.push(c(m - 1));
    h1.push(c(m));

    let mut h2 = vec![b(1)];
    h2.extend((1..=m).map(c));
    h2.push(b(m));
    for i in 1..=m - 2 {
        h2.push(a(i));
        h2.push(b(i + 1));
    }
    h2.push(a(m - 1));
    h2.push(a(m));

    let h1 = HamCycle::from_order(&colored.graph, &h1)?;
    let h2 = HamCycle::from_order(&colored.graph, &h2)?;
    debug_assert_eq!(colored.blue_count(h1.edges()), m as usize + 1);
    debug_assert_eq!(colored.blue_count(h2.edges()), 2 * m as usize - 1);
    Ok((colored, h1, h2))
}

/// The forced-path gadget on 3ℓ+1 vertices (ℓ odd): a path spine plus a
/// sparse chord layer. Degree-1 ends and degree-2 interior anchors force 2ℓ
/// spine edges into every Hamiltonian path; the remaining edges form a
/// single 2ℓ-cycle, so there are exactly two Hamiltonian paths — one per
/// perfect matching of that cycle — at symmetric difference 2ℓ.
#[derive(Debug, Clone)]
pub struct GadgetX {
    pub graph: Graph,
    pub spine: EdgeSet,
    pub chords: EdgeSet,
    pub forced: EdgeSet,
    /// The free cycle E ∖ forced in traversal order.
    pub free_cycle: Vec<u32>,
}

pub fn build_gadget_x(l: u32) -> Result<GadgetX> {
    if l < 3 || l.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "gadget parameter must be odd and at least 3, got {l}"
        )));
    }
    let n = 3 * l + 1;
    // 1-based construction rules over 0-based vertex ids.
    let spine: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    let mut chords: Vec<(u32, u32)> = Vec::new();
    let mut j = 2;
    while j <= n - 5 {
        chords.push((j - 1, j + 3));
        j += 3;
    }
    chords.push((2, n - 3));
    let graph = Graph::new(
        n,
        spine.iter().chain(chords.iter()).copied(),
        None,
    )?;
    let spine: EdgeSet = spine.into_iter().map(|(u, v)| Edge::of(u, v)).collect();
    let chords: EdgeSet = chords.into_iter().map(|(u, v)| Edge::of(u, v)).collect();

    let mut forced = EdgeSet::new();
    forced.insert(Edge::of(0, 1));
    forced.insert(Edge::of(n - 2, n - 1));
    let mut i = 4;
    while i <= n - 3 {
        forced.insert(Edge::of(i - 2, i - 1));
        forced.insert(Edge::of(i - 1, i));
        i += 3;
    }
    assert_eq!(forced.len(), 2 * l as usize);

    // The complement must be one cycle on 2ℓ vertices.
    let free: EdgeSet = graph
        .edges()
        .iter()
        .copied()
        .filter(|e| !forced.contains(e))
        .collect();
    assert_eq!(free.len(), 2 * l as usize);
    let mut adj: std::collections::BTreeMap<u32, Vec<u32>> = std::collections::BTreeMap::new();
    for e in &free {
        adj.entry(e.u()).or_default().push(e.v());
        adj.entry(e.v()).or_default().push(e.u());
    }
    assert!(adj.values().all(|v| v.len() == 2), "free edges must be 2-regular");
    let start = *adj.keys().next().unwrap();
    let mut free_cycle = vec![start];
    let mut prev = start;
    let mut cur = adj[&start][0].min(adj[&start][1]);
    while cur != start {
        free_cycle.push(cur);
        let nx = &adj[&cur];
        let nxt = if nx[0] == prev { nx[1] } else { nx[0] };
        prev = cur;
        cur = nxt;
    }
    assert_eq!(free_cycle.len(), 2 * l as usize, "free edges must form one cycle");

    Ok(GadgetX {
        graph,
        spine,
        chords,
        forced,
        free_cycle,
    })
}

impl GadgetX {
    /// The two Hamiltonian paths: forced edges plus one of the two perfect
    /// matchings of the free cycle.
    pub fn ham_paths(&self) -> [EdgeSet; 2] {
        let cyc = &self.free_cycle;
        let len = cyc.len();
        let mut out = [self.forced.clone(), self.forced.clone()];
        for start in [0usize, 1usize] {
            let mut i = start;
            while i < len {
                out[start].insert(Edge::of(cyc[i], cyc[(i + 1) % len]));
                i += 2;
            }
        }
        out
    }
}

/// A locked instance for even k: embed the gadget with ℓ = k+1 into part A
/// of a split graph A ∪ B with B independent and A×B complete. Part sizes
/// make every Hamiltonian cycle induce a Hamiltonian path on the gadget, so
/// the cycles pair up at symmetric difference 2(k+1) > 2k and the k-switch
/// chain cannot move between matchings.
#[derive(Debug, Clone)]
pub struct LockedExample {
    pub graph: Graph,
    pub gadget: GadgetX,
    pub k: u32,
    pub a_size: u32,
    pub b_size: u32,
}

pub fn build_locked_example(k: u32, n: Option<u32>) -> Result<LockedExample> {
    if k < 4 || !k.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "locked construction needs even k >= 4, got {k}"
        )));
    }
    let l = k + 1;
    let r = 3 * l + 1;
    let n = n.unwrap_or(r + 1);
    if n < r + 1 {
        return Err(Error::Precondition(format!(
            "need at least {} vertices for k = {k}, got {n}",
            r + 1
        )));
    }
    if (n + r).is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "vertex count must have opposite parity to {r}, got {n}"
        )));
    }
    let a_size = (n + r - 1) / 2;
    let b_size = n - a_size;
    let gadget = build_gadget_x(l)?;
    let mut edges: Vec<(u32, u32)> = gadget
        .graph
        .edges()
        .iter()
        .map(|e| (e.u(), e.v()))
        .collect();
    for a in 0..a_size {
        for b in a_size..n {
            edges.push((a, b));
        }
    }
    let graph = Graph::new(n, edges, None)?;
    Ok(LockedExample {
        graph,
        gadget,
        k,
        a_size,
        b_size,
    })
}

/// The staircase monotone graph: row i covers columns 1..min(i+1, n).
pub fn build_staircase(n: u32) -> Result<MonotoneGraph> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "staircase side must be even and at least 4, got {n}"
        )));
    }
    let rows: Vec<(u32, u32)> = (1..=n).map(|i| (1, (i + 1).min(n))).collect();
    MonotoneGraph::from_intervals(&rows)
}

/// Seeded random graph with minimum degree at least `delta`: start from the
/// complete (or complete balanced bipartite) graph and delete a uniformly
/// shuffled edge sequence greedily subject to the degree floor.
pub fn build_random_dense(n: u32, delta: u32, seed: u64, bipartite: bool) -> Result<Graph> {
    let base = if bipartite {
        if !n.is_multiple_of(2) || n == 0 {
            return Err(Error::Precondition(format!(
                "bipartite instances need even positive n, got {n}"
            )));
        }
        if delta > n / 2 {
            return Err(Error::Precondition(format!(
                "degree floor {delta} exceeds side size {}",
                n / 2
            )));
        }
        Graph::complete_bipartite(n / 2)
    } else {
        if n == 0 || delta >= n {
            return Err(Error::Precondition(format!(
                "degree floor {delta} infeasible on {n} vertices"
            )));
        }
        Graph::complete(n)
    };
    let mut order: Vec<Edge> = base.edges().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut deg: Vec<u32> = (0..n).map(|v| base.degree(v) as u32).collect();
    let mut kept: EdgeSet = base.edge_set();
    for e in order {
        if deg[e.u() as usize] > delta && deg[e.v() as usize] > delta {
            kept.remove(&e);
            deg[e.u() as usize] -= 1;
            deg[e.v() as usize] -= 1;
        }
    }
    Graph::new(n, kept.iter().map(|e| (e.u(), e.v())), base.side_a())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{
        check_irreducible, enumerate_ham_cycles, enumerate_ham_paths, DEFAULT_ENUM_CAP,
    };
    use crate::graph::{decompose_alternating, symmetric_difference_size};
    use crate::switch::TargetClass;

    #[test]
    fn parity_example_shape() {
        let (cg, h1, h2) = build_parity_example(3).unwrap();
        assert_eq!(cg.graph.n(), 9);
        assert_eq!(cg.graph.min_degree(), 5); // 2n/3 − 1
        assert_eq!(cg.blue_count(h1.edges()), 4);
        assert_eq!(cg.blue_count(h2.edges()), 5);
        assert_eq!(cg.blue_parity(h1.edges()), Parity::Even);
        assert_eq!(cg.blue_parity(h2.edges()), Parity::Odd);
        assert!(build_parity_example(4).is_err());
        assert!(build_parity_example(1).is_err());
    }

    #[test]
    fn parity_four_cycles_have_even_blue_count() {
        for m in [3u32, 5] {
            let (cg, _, _) = build_parity_example(m).unwrap();
            let n = cg.graph.n();
            // All 4-cycles u-v-w-x via ordered representative u < v,w,x.
            for u in 0..n {
                for &v in cg.graph.neighbors(u) {
                    for &w in cg.graph.neighbors(v) {
                        if w == u {
                            continue;
                        }
                        for &x in cg.graph.neighbors(w) {
                            if x == v || x == u || !cg.graph.has_edge(x, u) {
                                continue;
                            }
                            let cyc: EdgeSet = [
                                Edge::of(u, v),
                                Edge::of(v, w),
                                Edge::of(w, x),
                                Edge::of(x, u),
                            ]
                            .into_iter()
                            .collect();
                            assert_eq!(cg.blue_count(&cyc) % 2, 0, "odd 4-cycle {u}-{v}-{w}-{x}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn parity_splits_the_2_switch_chain() {
        let (cg, h1, h2) = build_parity_example(3).unwrap();
        let diff = symmetric_difference_size(h1.edges(), h2.edges());
        assert_eq!(diff, 14);
        let circuits = decompose_alternating(h1.edges(), h2.edges()).unwrap();
        let total: usize = circuits.iter().map(|c| c.edges.len()).sum();
        assert_eq!(total, diff);

        let (sg, _) =
            check_irreducible(&cg.graph, 2, TargetClass::HamiltonianCycles, DEFAULT_ENUM_CAP)
                .unwrap();
        assert!(sg.component_count() >= 2);
        let i1 = sg.index_of(h1.edges()).unwrap();
        let i2 = sg.index_of(h2.edges()).unwrap();
        assert_ne!(sg.component_of(i1), sg.component_of(i2));
        // Blue parity is constant on every component.
        let mut comp_parity: std::collections::HashMap<u32, Parity> = Default::default();
        for (idx, st) in sg.states().iter().enumerate() {
            let p = cg.blue_parity(st);
            let c = sg.component_of(idx);
            assert_eq!(*comp_parity.entry(c).or_insert(p), p);
        }
        // Large enough switches reconnect the two cycles.
        let (big, _) = check_irreducible(
            &cg.graph,
            diff / 2,
            TargetClass::HamiltonianCycles,
            DEFAULT_ENUM_CAP,
        )
        .unwrap();
        let j1 = big.index_of(h1.edges()).unwrap();
        let j2 = big.index_of(h2.edges()).unwrap();
        assert_eq!(big.component_of(j1), big.component_of(j2));
    }

    #[test]
    fn gadget_has_exactly_two_ham_paths() {
        for l in [3u32, 5, 7] {
            let gx = build_gadget_x(l).unwrap();
            let n = gx.graph.n();
            assert_eq!(n, 3 * l + 1);
            assert_eq!(gx.graph.degree(0), 1);
            assert_eq!(gx.graph.degree(n - 1), 1);
            assert_eq!(gx.free_cycle.len(), 2 * l as usize);
            let built = gx.ham_paths();
            let found = enumerate_ham_paths(&gx.graph, DEFAULT_ENUM_CAP).unwrap();
            assert_eq!(found.len(), 2, "l={l}");
            assert!(found.contains(&built[0]) && found.contains(&built[1]));
            assert_eq!(
                symmetric_difference_size(&built[0], &built[1]),
                2 * l as usize
            );
            for p in &built {
                assert!(gx.forced.iter().all(|e| p.contains(e)));
            }
        }
        assert!(build_gadget_x(4).is_err());
    }

    #[test]
    fn gadget_chords_match_fixed_rule() {
        let gx = build_gadget_x(5).unwrap();
        let expect: EdgeSet = [(1, 5), (4, 8), (7, 11), (10, 14), (2, 13)]
            .into_iter()
            .map(|(u, v)| Edge::of(u, v))
            .collect();
        assert_eq!(gx.chords, expect);
    }

    #[test]
    fn locked_example_freezes_k4() {
        let le = build_locked_example(4, None).unwrap();
        assert_eq!((le.graph.n(), le.a_size, le.b_size), (17, 16, 1));
        let cycles = enumerate_ham_cycles(&le.graph, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(cycles.len(), 2);
        assert_eq!(symmetric_difference_size(&cycles[0], &cycles[1]), 10);
        // Restriction to the gadget is one of its two Hamiltonian paths.
        let r = 3 * (le.k + 1) + 1;
        let paths = le.gadget.ham_paths();
        for cyc in &cycles {
            let inner: EdgeSet = cyc.iter().copied().filter(|e| e.v() < r).collect();
            assert!(inner == paths[0] || inner == paths[1]);
        }
        let (sg4, _) =
            check_irreducible(&le.graph, 4, TargetClass::HamiltonianCycles, DEFAULT_ENUM_CAP)
                .unwrap();
        assert_eq!(sg4.component_sizes(), vec![1, 1]);
        let (sg5, _) =
            check_irreducible(&le.graph, 5, TargetClass::HamiltonianCycles, DEFAULT_ENUM_CAP)
                .unwrap();
        assert!(sg5.is_connected());
    }

    #[test]
    fn locked_example_wider_split() {
        let le = build_locked_example(4, Some(19)).unwrap();
        assert_eq!((le.a_size, le.b_size), (17, 2));
        let cycles = enumerate_ham_cycles(&le.graph, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(cycles.len(), 4);
        let (sg, _) =
            check_irreducible(&le.graph, 4, TargetClass::HamiltonianCycles, DEFAULT_ENUM_CAP)
                .unwrap();
        assert_eq!(sg.component_sizes(), vec![2, 2]);
        assert!(build_locked_example(4, Some(18)).is_err());
        assert!(build_locked_example(4, Some(15)).is_err());
        assert!(build_locked_example(3, None).is_err());
    }

    #[test]
    fn staircase_counts_double_per_size() {
        for (n, expect) in [(4u32, 4usize), (6, 16), (8, 64)] {
            let mg = build_staircase(n).unwrap();
            let count = enumerate_ham_cycles(mg.graph(), DEFAULT_ENUM_CAP)
                .unwrap()
                .len();
            assert_eq!(count, expect, "staircase n={n}");
        }
        assert!(build_staircase(5).is_err());
        assert!(build_staircase(2).is_err());
    }

    #[test]
    fn random_dense_respects_floor_and_seed() {
        let g1 = build_random_dense(12, 7, 11, false).unwrap();
        let g2 = build_random_dense(12, 7, 11, false).unwrap();
        let g3 = build_random_dense(12, 7, 12, false).unwrap();
        assert!(g1.min_degree() >= 7);
        assert_eq!(g1.edge_set(), g2.edge_set());
        assert_ne!(g1.edge_set(), g3.edge_set());
        let b = build_random_dense(12, 4, 5, true).unwrap();
        assert_eq!(b.side_a(), Some(6));
        assert!(b.min_degree() >= 4);
        assert!(build_random_dense(10, 10, 0, false).is_err());
        assert!(build_random_dense(11, 3, 0, true).is_err());
    }
}
