//! Monotone bipartite graphs and the 2-factor → Hamiltonian-cycle embedding.
//!
//! A balanced bipartite graph (sides A = 0..n, B = n..2n under the given
//! labeling) is monotone when every row of its bipartite adjacency matrix is
//! a nonempty contiguous interval [r_i, t_i] and both interval sequences are
//! non-decreasing. On half-dense monotone graphs the four "quadrants" split
//! at ⌈n/2⌉ yields complete bipartite corners, which drives an injective map
//! φ1 from 2-factors to systems of three covering paths, and a completion φ2
//! (path joining) producing a Hamiltonian cycle within 9 edge edits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeSet, Graph, HamCycle, TwoFactor};

/// A validated monotone graph: the graph plus its interval form and the
/// ⌈n/2⌉ split position used by the quadrant decomposition.
#[derive(Debug, Clone)]
pub struct MonotoneGraph {
    graph: Graph,
    n: usize,
    h: usize,
    /// 1-based column intervals per row: row i (vertex i-1) covers [r_i, t_i].
    rows: Vec<(u32, u32)>,
}

/// Check the interval conditions under the labeling as given; this does not
/// search for a monotone reordering.
pub fn validate_monotone(g: &Graph) -> Result<MonotoneGraph> {
    let Some(a) = g.side_a() else {
        return Err(Error::Precondition(
            "monotone graphs must be bipartite with equal marked parts".into(),
        ));
    };
    let n = a as usize;
    let mut rows = Vec::with_capacity(n);
    for i in 0..a {
        let nbrs = g.neighbors(i);
        if nbrs.is_empty() {
            return Err(Error::InvalidInput(format!("row {} is empty", i + 1)));
        }
        let first = nbrs[0] - a;
        let last = nbrs[nbrs.len() - 1] - a;
        if (last - first + 1) as usize != nbrs.len() {
            return Err(Error::InvalidInput(format!(
                "row {} is not a contiguous interval",
                i + 1
            )));
        }
        if let Some(&(pr, pt)) = rows.last() {
            if first + 1 < pr || last + 1 < pt {
                return Err(Error::InvalidInput(format!(
                    "row intervals decrease at row {}",
                    i + 1
                )));
            }
        }
        rows.push((first + 1, last + 1));
    }
    // Column contiguity follows from the row conditions; emptiness does not.
    for j in a..g.n() {
        if g.neighbors(j).is_empty() {
            return Err(Error::InvalidInput(format!("column {} is empty", j - a + 1)));
        }
    }
    Ok(MonotoneGraph {
        graph: g.clone(),
        n,
        h: n.div_ceil(2),
        rows,
    })
}

impl MonotoneGraph {
    /// Build the graph from 1-based row intervals and validate it.
    pub fn from_intervals(rows: &[(u32, u32)]) -> Result<MonotoneGraph> {
        let n = rows.len() as u32;
        let mut edges = Vec::new();
        for (i, &(r, t)) in rows.iter().enumerate() {
            if r < 1 || t > n || r > t {
                return Err(Error::InvalidInput(format!(
                    "row {} interval ({r},{t}) out of range",
                    i + 1
                )));
            }
            for j in r..=t {
                edges.push((i as u32, n + j - 1));
            }
        }
        validate_monotone(&Graph::new(2 * n, edges, Some(n))?)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n_side(&self) -> usize {
        self.n
    }

    /// The quadrant split position ⌈n/2⌉.
    pub fn split(&self) -> usize {
        self.h
    }

    /// 1-based (r_i, t_i) intervals.
    pub fn intervals(&self) -> &[(u32, u32)] {
        &self.rows
    }

    pub fn is_a(&self, v: u32) -> bool {
        (v as usize) < self.n
    }

    /// Position of `v` in its side's wrap ordering
    /// a_{h+1} < … < a_n < a_1 < … < a_h (same shape for B).
    pub fn rank(&self, v: u32) -> usize {
        let i = v as usize % self.n;
        if i >= self.h {
            i - self.h
        } else {
            i + (self.n - self.h)
        }
    }

    pub fn in_a1(&self, v: u32) -> bool {
        self.is_a(v) && (v as usize) < self.h
    }

    pub fn in_b1(&self, v: u32) -> bool {
        !self.is_a(v) && (v as usize - self.n) < self.h
    }

    /// Every vertex has degree at least ⌈n/2⌉.
    pub fn is_half_dense(&self) -> bool {
        self.graph.min_degree() >= self.h
    }
}

/// The four vertex groups of the quadrant decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct Quadrants {
    pub a1: Vec<u32>,
    pub a2: Vec<u32>,
    pub b1: Vec<u32>,
    pub b2: Vec<u32>,
}

/// Split both sides at ⌈n/2⌉. Requires half-density; under it, both corner
/// subgraphs G[A1 ∪ B1] and G[A2 ∪ B2] are provably complete bipartite, and
/// this is asserted.
pub fn quadrants(mg: &MonotoneGraph) -> Result<Quadrants> {
    if !mg.is_half_dense() {
        return Err(Error::Precondition(format!(
            "quadrant completeness needs min degree >= {}, graph has {}",
            mg.split(),
            mg.graph().min_degree()
        )));
    }
    let (n, h) = (mg.n_side() as u32, mg.split() as u32);
    let q = Quadrants {
        a1: (0..h).collect(),
        a2: (h..n).collect(),
        b1: (n..n + h).collect(),
        b2: (n + h..2 * n).collect(),
    };
    for &a in &q.a1 {
        for &b in &q.b1 {
            assert!(mg.graph().has_edge(a, b), "G[A1 ∪ B1] misses {a}-{b}");
        }
    }
    for &a in &q.a2 {
        for &b in &q.b2 {
            assert!(mg.graph().has_edge(a, b), "G[A2 ∪ B2] misses {a}-{b}");
        }
    }
    Ok(q)
}

/// Three vertex-disjoint paths covering all of V, labeled by which corner
/// group their constituent cycles came from. Paths are stored from the
/// endpoint the recovery scan starts at: the A-endpoint for `pa1`/`rest`,
/// the B-endpoint for `pb1`. Empty paths are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathSystem {
    pa1: Vec<u32>,
    pb1: Vec<u32>,
    rest: Vec<u32>,
}

impl PathSystem {
    pub fn new(mg: &MonotoneGraph, pa1: Vec<u32>, pb1: Vec<u32>, rest: Vec<u32>) -> Result<PathSystem> {
        let ps = PathSystem { pa1, pb1, rest };
        ps.validate(mg)?;
        Ok(ps)
    }

    pub fn parts(&self) -> (&[u32], &[u32], &[u32]) {
        (&self.pa1, &self.pb1, &self.rest)
    }

    pub fn nonempty_paths(&self) -> Vec<Vec<u32>> {
        [&self.pa1, &self.pb1, &self.rest]
            .into_iter()
            .filter(|p| !p.is_empty())
            .cloned()
            .collect()
    }

    pub fn edge_set(&self) -> EdgeSet {
        [&self.pa1, &self.pb1, &self.rest]
            .into_iter()
            .flat_map(|p| p.windows(2).map(|w| Edge::of(w[0], w[1])))
            .collect()
    }

    fn validate(&self, mg: &MonotoneGraph) -> Result<()> {
        let g = mg.graph();
        let mut seen = vec![false; g.n() as usize];
        for p in [&self.pa1, &self.pb1, &self.rest] {
            for &v in p {
                if v >= g.n() || seen[v as usize] {
                    return Err(Error::InvalidInput(format!(
                        "path system repeats or exceeds vertex {v}"
                    )));
                }
                seen[v as usize] = true;
            }
            for w in p.windows(2) {
                if !g.has_edge(w[0], w[1]) {
                    return Err(Error::InvalidInput(format!(
                        "path step {}-{} is not an edge",
                        w[0], w[1]
                    )));
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidInput("path system does not cover all vertices".into()));
        }
        if let Some(&v) = self
            .rest
            .iter()
            .find(|&&v| mg.in_a1(v) || mg.in_b1(v))
        {
            return Err(Error::InvalidInput(format!(
                "corner path contains {v} outside A2 ∪ B2"
            )));
        }
        if !self.pb1.is_empty() {
            if let Some(&v) = self.pb1.iter().find(|&&v| mg.in_a1(v)) {
                return Err(Error::InvalidInput(format!(
                    "B1-group path contains A1 vertex {v}"
                )));
            }
            if !self.pb1.iter().any(|&v| mg.in_b1(v)) {
                return Err(Error::InvalidInput(
                    "B1-group path has no vertex in B1".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Which corner group a cycle belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Group {
    A1,
    B1,
    Rest,
}

fn classify_cycle(mg: &MonotoneGraph, cycle: &[u32]) -> (Group, u32, u32) {
    let a_top = cycle
        .iter()
        .copied()
        .filter(|&v| mg.is_a(v))
        .max_by_key(|&v| mg.rank(v))
        .expect("bipartite cycle has A vertices");
    let b_top = cycle
        .iter()
        .copied()
        .filter(|&v| !mg.is_a(v))
        .max_by_key(|&v| mg.rank(v))
        .expect("bipartite cycle has B vertices");
    let group = if mg.in_a1(a_top) {
        Group::A1
    } else if mg.in_b1(b_top) {
        Group::B1
    } else {
        Group::Rest
    };
    (group, a_top, b_top)
}

/// Cut the cycle at its leader's chosen edge and lay it out leader-first.
/// The cut neighbor is the one earlier in the other side's wrap ordering,
/// which makes φ1 a function.
fn cut_cycle(mg: &MonotoneGraph, cycle: &[u32], leader: u32) -> Vec<u32> {
    let len = cycle.len();
    let p = cycle.iter().position(|&v| v == leader).unwrap();
    let prev = cycle[(p + len - 1) % len];
    let next = cycle[(p + 1) % len];
    let forward_end = mg.rank(next) > mg.rank(prev);
    // Walk away from the cut neighbor so the sequence ends on it.
    let mut seq = Vec::with_capacity(len);
    for step in 0..len {
        let idx = if forward_end {
            (p + step) % len
        } else {
            (p + len - step) % len
        };
        seq.push(cycle[idx]);
    }
    seq
}

/// Order cycles by leader rank, cut each, and glue consecutive pieces.
fn glue_group(
    mg: &MonotoneGraph,
    mut cut: Vec<(usize, Vec<u32>)>, // (leader rank, leader-first sequence)
) -> Result<Vec<u32>> {
    cut.sort_by_key(|&(rank, _)| rank);
    let mut out: Vec<u32> = Vec::new();
    for (_, seq) in cut {
        if let Some(&tail) = out.last() {
            if !mg.graph().has_edge(tail, seq[0]) {
                return Err(Error::ConstructionFailed(format!(
                    "glue edge {}-{} missing; input outside guaranteed regime",
                    tail, seq[0]
                )));
            }
        }
        out.extend(seq);
    }
    Ok(out)
}

/// The injective map from 2-factors to covering 3-path systems: group the
/// cycles by corner, cut each at its highest-ordered leader, and chain each
/// group ordered by leader rank. Gluing edges are guaranteed on half-dense
/// monotone graphs; their absence is reported as a construction failure
/// rather than checked up front, so mildly sparse instances still work when
/// the edges happen to exist.
pub fn phi1(f: &TwoFactor, mg: &MonotoneGraph) -> Result<PathSystem> {
    f.check_ambient(mg.graph())?;
    let mut groups: [Vec<(usize, Vec<u32>)>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for cycle in f.components() {
        let (group, a_top, b_top) = classify_cycle(mg, cycle);
        let (slot, leader) = match group {
            Group::A1 => (0, a_top),
            Group::B1 => (1, b_top),
            Group::Rest => (2, a_top),
        };
        groups[slot].push((mg.rank(leader), cut_cycle(mg, cycle, leader)));
    }
    let [ga1, gb1, grest] = groups;
    PathSystem::new(
        mg,
        glue_group(mg, ga1)?,
        glue_group(mg, gb1)?,
        glue_group(mg, grest)?,
    )
}

/// Split a glued group path back into its constituent cycles: each new
/// constituent starts at the first vertex of the scan side ordered above the
/// current leader, and each piece is closed by re-adding its cut edge.
fn recover_group(mg: &MonotoneGraph, seq: &[u32], scan_a: bool, out: &mut EdgeSet) -> Result<()> {
    if seq.is_empty() {
        return Ok(());
    }
    if mg.is_a(seq[0]) != scan_a {
        return Err(Error::Reconstruction(format!(
            "group path starts at {} on the wrong side",
            seq[0]
        )));
    }
    let mut start = 0usize;
    let mut top = mg.rank(seq[0]);
    let mut close = |piece: &[u32]| -> Result<()> {
        let (first, last) = (piece[0], piece[piece.len() - 1]);
        if piece.len() < 4 || !mg.graph().has_edge(first, last) {
            return Err(Error::Reconstruction(format!(
                "recovered piece {first}..{last} cannot be closed into a cycle"
            )));
        }
        out.extend(piece.windows(2).map(|w| Edge::of(w[0], w[1])));
        out.insert(Edge::of(first, last));
        Ok(())
    };
    for pos in 1..seq.len() {
        let v = seq[pos];
        if mg.is_a(v) == scan_a && mg.rank(v) > top {
            close(&seq[start..pos])?;
            start = pos;
            top = mg.rank(v);
        }
    }
    close(&seq[start..])
}

/// Exact left inverse of φ1. Inputs outside the image fail with a
/// reconstruction error: either a recovered piece cannot be closed, or the
/// re-applied forward map disagrees with the input.
pub fn phi1_inverse(ps: &PathSystem, mg: &MonotoneGraph) -> Result<TwoFactor> {
    ps.validate(mg)?;
    let mut edges = EdgeSet::new();
    recover_group(mg, &ps.pa1, true, &mut edges)?;
    recover_group(mg, &ps.pb1, false, &mut edges)?;
    recover_group(mg, &ps.rest, true, &mut edges)?;
    let f = TwoFactor::new(mg.graph(), edges)
        .map_err(|e| Error::Reconstruction(format!("recovered edge set is not a 2-factor: {e}")))?;
    let redo = phi1(&f, mg)?;
    if &redo != ps {
        return Err(Error::Reconstruction(
            "path system is not in the image of the forward map".into(),
        ));
    }
    Ok(f)
}

fn path_edges(paths: &[Vec<u32>]) -> EdgeSet {
    paths
        .iter()
        .flat_map(|p| p.windows(2).map(|w| Edge::of(w[0], w[1])))
        .collect()
}

/// One oriented arrangement of the two paths about to be merged.
struct Arrangement {
    j: usize,
    flip0: bool,
    flipj: bool,
}

fn oriented(path: &[u32], flip: bool) -> Vec<u32> {
    if flip {
        path.iter().rev().copied().collect()
    } else {
        path.to_vec()
    }
}

/// Join vertex-disjoint covering paths into a Hamiltonian cycle, modifying
/// at most 3 edges per merge and 3 for the final closure (≤ 3k total).
///
/// Merging follows the inductive argument: first try to chain an endpoint
/// adjacency directly (1 edit); otherwise pick z in N(x1)⁻ ∩ N(y2) — whose
/// existence the density precondition guarantees — and splice (3 edits). In
/// bipartite mode the pair is arranged so x1 and y2 lie in different parts,
/// which keeps both neighborhoods in one part for the counting argument.
pub fn join_paths(g: &Graph, paths: &[Vec<u32>], bipartite: bool) -> Result<(HamCycle, usize)> {
    let n = g.n() as usize;
    if bipartite {
        let Some(a) = g.side_a() else {
            return Err(Error::Precondition(
                "bipartite joining needs a bipartition marker".into(),
            ));
        };
        if 2 * g.min_degree() < a as usize {
            return Err(Error::Precondition(format!(
                "bipartite joining needs min degree >= {}/2, graph has {}",
                a,
                g.min_degree()
            )));
        }
    } else if 2 * g.min_degree() < g.n() as usize + 1 {
        return Err(Error::Precondition(format!(
            "joining needs min degree > {}/2, graph has {}",
            g.n(),
            g.min_degree()
        )));
    }
    let mut seen = vec![false; n];
    for p in paths {
        if p.is_empty() {
            return Err(Error::InvalidInput("empty path in path system".into()));
        }
        for &v in p {
            if v >= g.n() || seen[v as usize] {
                return Err(Error::InvalidInput(format!(
                    "paths repeat or exceed vertex {v}"
                )));
            }
            seen[v as usize] = true;
        }
        for w in p.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(Error::InvalidInput(format!(
                    "path step {}-{} is not an edge",
                    w[0], w[1]
                )));
            }
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::InvalidInput("paths do not cover all vertices".into()));
    }
    let input_edges = path_edges(paths);
    let k_input = paths.len();
    let is_a = |v: u32| g.side_a().map(|a| v < a).unwrap_or(false);

    let mut paths: Vec<Vec<u32>> = paths.to_vec();
    while paths.len() > 1 {
        let before = path_edges(&paths);
        // Endpoint adjacency: x1 against every other endpoint.
        let x1 = paths[0][0];
        let mut merged = None;
        'adj: for (j, path) in paths.iter().enumerate().skip(1) {
            for flip in [false, true] {
                let end = if flip { *path.last().unwrap() } else { path[0] };
                if g.has_edge(x1, end) {
                    merged = Some((j, flip));
                    break 'adj;
                }
            }
        }
        if let Some((j, flip)) = merged {
            let mut new = oriented(&paths[0], true);
            new.extend(oriented(&paths[j], flip));
            paths[0] = new;
            paths.remove(j);
        } else {
            splice_merge(g, &mut paths, bipartite, &is_a)?;
        }
        let after = path_edges(&paths);
        let step_edits = crate::graph::symmetric_difference_size(&before, &after);
        assert!(step_edits <= 3, "merge modified {step_edits} edges");
    }
    // Closure.
    let p = &paths[0];
    let (x, y) = (p[0], *p.last().unwrap());
    let mut cycle_edges = path_edges(&paths);
    if p.len() < 3 {
        return Err(Error::InvalidInput("cannot close a path on fewer than 3 vertices".into()));
    }
    if g.has_edge(x, y) {
        cycle_edges.insert(Edge::of(x, y));
    } else {
        let pos: std::collections::HashMap<u32, usize> =
            p.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut z_best: Option<usize> = None;
        for &v in g.neighbors(x) {
            let i = pos[&v];
            if i >= 1 && g.has_edge(p[i - 1], y) && z_best.is_none_or(|b| p[i - 1] < p[b]) {
                z_best = Some(i - 1);
            }
        }
        let Some(zi) = z_best else {
            return Err(Error::ConstructionFailed(
                "no closure pivot found; input outside guaranteed regime".into(),
            ));
        };
        cycle_edges.remove(&Edge::of(p[zi], p[zi + 1]));
        cycle_edges.insert(Edge::of(p[zi], y));
        cycle_edges.insert(Edge::of(p[zi + 1], x));
    }
    let ham = HamCycle::new(g, cycle_edges)?;
    let edits = crate::graph::symmetric_difference_size(&input_edges, &ham.edges().clone());
    assert!(edits <= 3 * k_input, "joining made {edits} edits on {k_input} paths");
    Ok((ham, edits))
}

/// The 3-edit merge: choose the partner path (bipartite endpoint discipline
/// if requested), find the smallest pivot z ∈ N(x1)⁻ ∩ N(y2), and splice.
/// Falls back to other partner arrangements before giving up.
fn splice_merge(
    g: &Graph,
    paths: &mut Vec<Vec<u32>>,
    bipartite: bool,
    is_a: &dyn Fn(u32) -> bool,
) -> Result<()> {
    let mut arrangements = Vec::new();
    for j in 1..paths.len() {
        for (flip0, flipj) in [(false, false), (false, true), (true, false), (true, true)] {
            let x1 = if flip0 {
                *paths[0].last().unwrap()
            } else {
                paths[0][0]
            };
            let y2 = if flipj {
                paths[j][0]
            } else {
                *paths[j].last().unwrap()
            };
            if bipartite && is_a(x1) == is_a(y2) {
                continue;
            }
            arrangements.push(Arrangement { j, flip0, flipj });
        }
    }
    if arrangements.is_empty() {
        return Err(Error::ConstructionFailed(
            "no endpoint arrangement satisfies the bipartite discipline".into(),
        ));
    }
    for arr in arrangements {
        let p0 = oriented(&paths[0], arr.flip0);
        let pj = oriented(&paths[arr.j], arr.flipj);
        let x1 = p0[0];
        let y2 = *pj.last().unwrap();
        // Locate every vertex in the current arrangement.
        let mut loc = vec![(usize::MAX, usize::MAX); g.n() as usize];
        let view = |i: usize| -> &[u32] {
            if i == 0 {
                &p0
            } else if i == arr.j {
                &pj
            } else {
                &paths[i]
            }
        };
        for i in 0..paths.len() {
            for (pos, &v) in view(i).iter().enumerate() {
                loc[v as usize] = (i, pos);
            }
        }
        let mut best: Option<(u32, usize, usize)> = None; // (z, path, pos of z)
        for &v in g.neighbors(x1) {
            let (pi, pos) = loc[v as usize];
            if pos >= 1 {
                let z = view(pi)[pos - 1];
                if g.has_edge(z, y2) && best.is_none_or(|(b, _, _)| z < b) {
                    best = Some((z, pi, pos - 1));
                }
            }
        }
        let Some((_, zi, zpos)) = best else {
            continue;
        };
        if zi == 0 {
            // y1 …reversed… z⁺ | x1 … z | y2 …reversed… x2
            let mut new: Vec<u32> = p0[zpos + 1..].iter().rev().copied().collect();
            new.extend(&p0[..=zpos]);
            new.extend(pj.iter().rev());
            paths[0] = new;
            paths.remove(arr.j);
        } else if zi == arr.j {
            // y1 …reversed… x1 | z⁺ … y2 | z …reversed… x2
            let mut new: Vec<u32> = p0.iter().rev().copied().collect();
            new.extend(&pj[zpos + 1..]);
            new.extend(pj[..=zpos].iter().rev());
            paths[0] = new;
            paths.remove(arr.j);
        } else {
            // y1 …reversed… x1 | z⁺ … y_i   and   x_i … z | y2 …reversed… x2
            let pi = paths[zi].clone();
            let mut first: Vec<u32> = p0.iter().rev().copied().collect();
            first.extend(&pi[zpos + 1..]);
            let mut second: Vec<u32> = pi[..=zpos].to_vec();
            second.extend(pj.iter().rev());
            paths[0] = first;
            paths[zi] = second;
            paths.remove(arr.j);
        }
        return Ok(());
    }
    Err(Error::ConstructionFailed(
        "no splice pivot found; input outside guaranteed regime".into(),
    ))
}

/// The full embedding φ = φ2 ∘ φ1: 2-factor to path system to Hamiltonian
/// cycle; returns the intermediate system and the joining edit count.
pub fn phi(f: &TwoFactor, mg: &MonotoneGraph) -> Result<(HamCycle, PathSystem, usize)> {
    let ps = phi1(f, mg)?;
    let (ham, edits) = join_paths(mg.graph(), &ps.nonempty_paths(), true)?;
    Ok((ham, ps, edits))
}
