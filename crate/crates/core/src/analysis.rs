//! Exact analysis at desk scale: enumerate the state space, build the
//! switch-adjacency state graph, verify the transition kernel in exact
//! rational arithmetic, and measure mixing both spectrally and empirically.
//!
//! Everything here is capped: enumeration and BFS refuse to grow past
//! explicit limits instead of silently taking hours.

use std::collections::{HashMap, HashSet, VecDeque};

use nalgebra::DMatrix;
use num::{BigRational, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{classify, Classification, Edge, EdgeSet, Graph, HamCycle};
use crate::switch::{prob_for_diff, theta, ChainConfig, FastChain, TargetClass};

pub const DEFAULT_ENUM_CAP: usize = 20_000;
pub const DEFAULT_BFS_CAP: usize = 1_000_000;
pub const DEFAULT_DENSE_CAP: usize = 2_000;

fn cap_error(cap: usize) -> Error {
    // `count` is a lower bound: enumeration stops at the first overflow.
    Error::CapExceeded {
        cap,
        count: cap + 1,
    }
}

/// All Hamiltonian cycles of `g` as edge sets, each counted once
/// (paths grow from vertex 0; orientation fixed by second < last vertex).
pub fn enumerate_ham_cycles(g: &Graph, cap: usize) -> Result<Vec<EdgeSet>> {
    let n = g.n() as usize;
    if n < 3 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(n);
    let mut used = vec![false; n];
    path.push(0u32);
    used[0] = true;
    fn extend(
        g: &Graph,
        path: &mut Vec<u32>,
        used: &mut [bool],
        out: &mut Vec<EdgeSet>,
        cap: usize,
    ) -> Result<()> {
        let n = g.n() as usize;
        if path.len() == n {
            let last = *path.last().unwrap();
            if path[1] < last && g.has_edge(last, 0) {
                if out.len() == cap {
                    return Err(cap_error(cap));
                }
                out.push(
                    path.windows(2)
                        .map(|w| Edge::of(w[0], w[1]))
                        .chain(std::iter::once(Edge::of(last, 0)))
                        .collect(),
                );
            }
            return Ok(());
        }
        let cur = *path.last().unwrap();
        for &w in g.neighbors(cur) {
            if !used[w as usize] {
                used[w as usize] = true;
                path.push(w);
                extend(g, path, used, out, cap)?;
                path.pop();
                used[w as usize] = false;
            }
        }
        Ok(())
    }
    extend(g, &mut path, &mut used, &mut out, cap)?;
    out.sort();
    Ok(out)
}

/// All spanning subgraphs with the given degree at every vertex (entries 0,
/// 1 or 2). The smallest deficient vertex is completed first, which visits
/// each subgraph exactly once.
pub fn enumerate_by_degree(g: &Graph, target: &[u32], cap: usize) -> Result<Vec<EdgeSet>> {
    if target.len() != g.n() as usize {
        return Err(Error::InvalidInput(format!(
            "degree target has {} entries for {} vertices",
            target.len(),
            g.n()
        )));
    }
    if let Some(bad) = target.iter().find(|&&d| d > 2) {
        return Err(Error::InvalidInput(format!(
            "degree targets above 2 are not 2-factor-like (got {bad})"
        )));
    }
    let n = g.n() as usize;
    let mut deg = vec![0u32; n];
    let mut chosen: Vec<Edge> = Vec::new();
    let mut out = Vec::new();

    fn fill(
        g: &Graph,
        target: &[u32],
        deg: &mut [u32],
        chosen: &mut Vec<Edge>,
        out: &mut Vec<EdgeSet>,
        cap: usize,
    ) -> Result<()> {
        let v = match (0..g.n()).find(|&v| deg[v as usize] < target[v as usize]) {
            None => {
                if out.len() == cap {
                    return Err(cap_error(cap));
                }
                out.push(chosen.iter().copied().collect());
                return Ok(());
            }
            Some(v) => v,
        };
        let need = (target[v as usize] - deg[v as usize]) as usize;
        // v is the smallest deficient vertex, so every viable partner is > v.
        let cand: Vec<u32> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| w > v && deg[w as usize] < target[w as usize])
            .collect();
        if cand.len() < need {
            return Ok(());
        }
        let pick = |ws: &[u32],
                        deg: &mut [u32],
                        chosen: &mut Vec<Edge>,
                        out: &mut Vec<EdgeSet>|
         -> Result<()> {
            for &w in ws {
                deg[v as usize] += 1;
                deg[w as usize] += 1;
                chosen.push(Edge::of(v, w));
            }
            fill(g, target, deg, chosen, out, cap)?;
            for &w in ws {
                deg[v as usize] -= 1;
                deg[w as usize] -= 1;
                chosen.pop();
            }
            Ok(())
        };
        if need == 1 {
            for &w in &cand {
                pick(&[w], deg, chosen, out)?;
            }
        } else {
            for i in 0..cand.len() {
                for j in i + 1..cand.len() {
                    pick(&[cand[i], cand[j]], deg, chosen, out)?;
                }
            }
        }
        Ok(())
    }
    fill(g, target, &mut deg, &mut chosen, &mut out, cap)?;
    out.sort();
    Ok(out)
}

/// All 2-factors (Hamiltonian cycles included).
pub fn enumerate_two_factors(g: &Graph, cap: usize) -> Result<Vec<EdgeSet>> {
    enumerate_by_degree(g, &vec![2; g.n() as usize], cap)
}

/// State space of the chosen target class.
pub fn enumerate_states(g: &Graph, target: TargetClass, cap: usize) -> Result<Vec<EdgeSet>> {
    match target {
        TargetClass::HamiltonianCycles => enumerate_ham_cycles(g, cap),
        TargetClass::TwoFactors => enumerate_two_factors(g, cap),
    }
}

/// All Hamiltonian paths, each once (recorded from its smaller endpoint).
pub fn enumerate_ham_paths(g: &Graph, cap: usize) -> Result<Vec<EdgeSet>> {
    let n = g.n() as usize;
    if n < 2 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut path = Vec::with_capacity(n);
    fn extend(
        g: &Graph,
        path: &mut Vec<u32>,
        used: &mut [bool],
        out: &mut Vec<EdgeSet>,
        cap: usize,
    ) -> Result<()> {
        if path.len() == g.n() as usize {
            if path[0] < *path.last().unwrap() {
                if out.len() == cap {
                    return Err(cap_error(cap));
                }
                out.push(path.windows(2).map(|w| Edge::of(w[0], w[1])).collect());
            }
            return Ok(());
        }
        let cur = *path.last().unwrap();
        for &w in g.neighbors(cur) {
            if !used[w as usize] {
                used[w as usize] = true;
                path.push(w);
                extend(g, path, used, out, cap)?;
                path.pop();
                used[w as usize] = false;
            }
        }
        Ok(())
    }
    for s in 0..g.n() {
        used[s as usize] = true;
        path.push(s);
        extend(g, &mut path, &mut used, &mut out, cap)?;
        path.pop();
        used[s as usize] = false;
    }
    out.sort();
    Ok(out)
}

/// The k-switch state graph: states joined when 0 < |x △ y| ≤ 2k.
pub struct StateGraph {
    k: usize,
    states: Vec<EdgeSet>,
    /// (neighbor index, |x △ y|)
    adj: Vec<Vec<(u32, u8)>>,
    comp: Vec<u32>,
    comp_count: usize,
}

impl StateGraph {
    pub fn build(g: &Graph, k: usize, mut states: Vec<EdgeSet>) -> Result<StateGraph> {
        if k == 0 {
            return Err(Error::Precondition("switch size bound k must be >= 1".into()));
        }
        states.sort();
        states.dedup();
        for s in &states {
            if classify(g, s)? == Classification::NotTwoFactor {
                return Err(Error::InvalidInput(
                    "state graph vertex is not 2-regular spanning".into(),
                ));
            }
        }
        let words = g.m().div_ceil(64);
        let bits: Vec<Vec<u64>> = states
            .iter()
            .map(|s| {
                let mut b = vec![0u64; words];
                for e in s {
                    let i = g.edge_index(*e).expect("state edge in ambient graph");
                    b[i / 64] |= 1 << (i % 64);
                }
                b
            })
            .collect();
        let s = states.len();
        let mut adj = vec![Vec::new(); s];
        for i in 0..s {
            for j in i + 1..s {
                let d: u32 = bits[i]
                    .iter()
                    .zip(&bits[j])
                    .map(|(a, b)| (a ^ b).count_ones())
                    .sum();
                if d as usize <= 2 * k {
                    adj[i].push((j as u32, d as u8));
                    adj[j].push((i as u32, d as u8));
                }
            }
        }
        // Components by BFS.
        let mut comp = vec![u32::MAX; s];
        let mut comp_count = 0;
        for start in 0..s {
            if comp[start] != u32::MAX {
                continue;
            }
            let id = comp_count as u32;
            comp_count += 1;
            let mut q = VecDeque::from([start]);
            comp[start] = id;
            while let Some(x) = q.pop_front() {
                for &(y, _) in &adj[x] {
                    if comp[y as usize] == u32::MAX {
                        comp[y as usize] = id;
                        q.push_back(y as usize);
                    }
                }
            }
        }
        Ok(StateGraph {
            k,
            states,
            adj,
            comp,
            comp_count,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn states(&self) -> &[EdgeSet] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn neighbors(&self, i: usize) -> &[(u32, u8)] {
        &self.adj[i]
    }

    pub fn index_of(&self, state: &EdgeSet) -> Option<usize> {
        self.states.binary_search(state).ok()
    }

    pub fn component_of(&self, i: usize) -> u32 {
        self.comp[i]
    }

    pub fn component_count(&self) -> usize {
        self.comp_count
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.comp_count];
        for &c in &self.comp {
            sizes[c as usize] += 1;
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    pub fn is_connected(&self) -> bool {
        self.comp_count <= 1
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IrreducibilityReport {
    pub k: usize,
    pub state_count: usize,
    pub component_count: usize,
    /// Descending.
    pub component_sizes: Vec<usize>,
    pub connected: bool,
}

/// Enumerate the full state space and test k-switch connectivity.
pub fn check_irreducible(
    g: &Graph,
    k: usize,
    target: TargetClass,
    cap: usize,
) -> Result<(StateGraph, IrreducibilityReport)> {
    let states = enumerate_states(g, target, cap)?;
    let sg = StateGraph::build(g, k, states)?;
    let report = IrreducibilityReport {
        k,
        state_count: sg.state_count(),
        component_count: sg.component_count(),
        component_sizes: sg.component_sizes(),
        connected: sg.is_connected(),
    };
    Ok((sg, report))
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelChecks {
    pub state_count: usize,
    pub symmetric: bool,
    pub rows_sum_to_one: bool,
    pub uniform_is_stationary: bool,
    /// Every diagonal entry is at least 1/2 (claimed only for lazy chains).
    pub lazy_diagonal: bool,
    /// Smallest positive off-diagonal entry, exact, as "p/q".
    pub min_positive: Option<String>,
    /// The guaranteed lower bound θ and whether some transition attains it.
    pub theta: String,
    pub theta_attained: bool,
}

/// Verify the exact kernel on a state graph: symmetry, stochasticity, the
/// uniform distribution as stationary law, and θ as a true lower bound on
/// positive transition probabilities. All arithmetic is exact.
pub fn verify_kernel(g: &Graph, sg: &StateGraph, cfg: &ChainConfig) -> Result<KernelChecks> {
    cfg.validate()?;
    if cfg.k != sg.k() {
        return Err(Error::InvalidInput(format!(
            "state graph was built for k={}, config has k={}",
            sg.k(),
            cfg.k
        )));
    }
    let s = sg.state_count();
    let one = BigRational::from_integer(1.into());
    let half = BigRational::new(1.into(), 2.into());
    let mut col_sums = vec![BigRational::zero(); s];
    let mut rows_ok = true;
    let mut lazy_diag_ok = true;
    let mut min_positive: Option<BigRational> = None;
    // The kernel depends on (i,j) only through |x_i △ x_j|, so P is symmetric
    // exactly when the adjacency structure is mirrored.
    let mut symmetric = true;
    for i in 0..s {
        let mut row = BigRational::zero();
        for &(j, d) in sg.neighbors(i) {
            if !sg.neighbors(j as usize).contains(&(i as u32, d)) {
                symmetric = false;
            }
            let p = prob_for_diff(g, cfg, d as usize)
                .expect("state graph edges have switchable differences");
            if min_positive.as_ref().is_none_or(|m| p < *m) {
                min_positive = Some(p.clone());
            }
            col_sums[j as usize] += &p;
            row += p;
        }
        if row > one {
            rows_ok = false;
        }
        let diag = &one - &row;
        if cfg.lazy && diag < half {
            lazy_diag_ok = false;
        }
        col_sums[i] += diag;
    }
    // Row sums are 1 by construction of the diagonal; the real content is
    // that columns also sum to 1, which pins the uniform law as stationary.
    let uniform = col_sums.iter().all(|c| *c == one);
    let (th, _bound) = theta(g, cfg)?;
    if let Some(m) = &min_positive {
        if *m < th {
            return Err(Error::InvalidInput(format!(
                "transition below the claimed lower bound θ: {m} < {th}"
            )));
        }
    }
    Ok(KernelChecks {
        state_count: s,
        symmetric,
        rows_sum_to_one: rows_ok,
        uniform_is_stationary: uniform,
        lazy_diagonal: !cfg.lazy || lazy_diag_ok,
        theta_attained: min_positive.as_ref().is_some_and(|m| *m == th),
        min_positive: min_positive.map(|m| m.to_string()),
        theta: th.to_string(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MixReport {
    pub state_count: usize,
    pub lazy: bool,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda_min: f64,
    pub spectral_gap: f64,
    /// (ε, first t with worst-start total variation below ε)
    pub tau: Vec<(f64, u32)>,
    /// (ε, (ln|Ω| + ln 1/ε) / (1 − λ*)) with λ* = max(λ1, |λ_min|)
    pub spectral_tau_bound: Vec<(f64, f64)>,
    /// (t, worst-start total variation), every step until the last ε crossed
    pub tv_curve: Vec<(u32, f64)>,
}

/// Dense spectral + total-variation analysis of the exact kernel.
///
/// Mathematically guaranteed facts are asserted here: the top eigenvalue is
/// 1, a lazy kernel is positive semidefinite, and lazy worst-start total
/// variation is non-increasing in t (up to 1e-12 of float slack).
pub fn mixing_exact(
    g: &Graph,
    sg: &StateGraph,
    cfg: &ChainConfig,
    eps: &[f64],
    t_max: u32,
    dense_cap: usize,
) -> Result<MixReport> {
    cfg.validate()?;
    if cfg.k != sg.k() {
        return Err(Error::InvalidInput(format!(
            "state graph was built for k={}, config has k={}",
            sg.k(),
            cfg.k
        )));
    }
    if eps.is_empty() || eps.iter().any(|&e| !(0.0 < e && e < 1.0)) {
        return Err(Error::InvalidInput("ε values must lie in (0,1)".into()));
    }
    let s = sg.state_count();
    if s == 0 {
        return Err(Error::InvalidInput("empty state space".into()));
    }
    if s > dense_cap {
        return Err(Error::CapExceeded {
            cap: dense_cap,
            count: s,
        });
    }
    let mut p = DMatrix::<f64>::zeros(s, s);
    for i in 0..s {
        let mut row = 0.0;
        for &(j, d) in sg.neighbors(i) {
            let v = prob_for_diff(g, cfg, d as usize)
                .expect("state graph edges have switchable differences")
                .to_f64()
                .expect("small rational fits f64");
            p[(i, j as usize)] = v;
            row += v;
        }
        p[(i, i)] = 1.0 - row;
    }
    let eig = p.clone().symmetric_eigen();
    let mut lambdas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let lambda0 = lambdas[0];
    let lambda1 = if s > 1 { lambdas[1] } else { f64::NEG_INFINITY };
    let lambda_min = *lambdas.last().unwrap();
    assert!(
        (lambda0 - 1.0).abs() <= 1e-9,
        "top eigenvalue {lambda0} is not 1"
    );
    if cfg.lazy {
        assert!(
            lambda_min >= -1e-9,
            "lazy kernel has negative eigenvalue {lambda_min}"
        );
    }
    let lambda_star = lambda1.max(lambda_min.abs());
    let bound = |e: f64| ((s as f64).ln() + (1.0 / e).ln()) / (1.0 - lambda_star);

    let mut sorted_eps: Vec<f64> = eps.to_vec();
    sorted_eps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let uniform = 1.0 / s as f64;
    let mut dist = DMatrix::<f64>::identity(s, s);
    let mut tau: Vec<(f64, u32)> = Vec::new();
    let mut tv_curve = Vec::new();
    let mut next_eps = 0usize;
    let mut prev_tv = f64::INFINITY;
    for t in 1..=t_max {
        dist = &dist * &p;
        let tv = (0..s)
            .map(|i| 0.5 * (0..s).map(|j| (dist[(i, j)] - uniform).abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        tv_curve.push((t, tv));
        if cfg.lazy {
            assert!(
                tv <= prev_tv + 1e-12,
                "lazy worst-start total variation increased at t={t}: {prev_tv} -> {tv}"
            );
        }
        prev_tv = tv;
        while next_eps < sorted_eps.len() && tv < sorted_eps[next_eps] {
            tau.push((sorted_eps[next_eps], t));
            next_eps += 1;
        }
        if next_eps == sorted_eps.len() {
            break;
        }
    }
    if next_eps < sorted_eps.len() {
        return Err(Error::CapExceeded {
            cap: t_max as usize,
            count: t_max as usize + 1,
        });
    }
    Ok(MixReport {
        state_count: s,
        lazy: cfg.lazy,
        lambda0,
        lambda1,
        lambda_min,
        spectral_gap: 1.0 - lambda1,
        tau,
        spectral_tau_bound: sorted_eps.iter().map(|&e| (e, bound(e))).collect(),
        tv_curve,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalMixReport {
    pub state_count: usize,
    pub trials: u32,
    pub base_seed: u64,
    /// (t, estimated total variation from `trials` independent runs)
    pub tv: Vec<(u32, f64)>,
}

/// Estimate worst-start total variation by running `trials` independent
/// chains from `start` and comparing visit frequencies at each grid time
/// against the uniform law on `states`. Trial i uses the seed
/// `cfg.seed ^ (i · 0x9E3779B97F4A7C15)`, so the estimate is independent of
/// scheduling order.
pub fn mixing_empirical(
    g: &Graph,
    cfg: &ChainConfig,
    start: &EdgeSet,
    grid: &[u32],
    trials: u32,
    states: &[EdgeSet],
) -> Result<EmpiricalMixReport> {
    cfg.validate()?;
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] == 0 {
        return Err(Error::InvalidInput(
            "time grid must be strictly increasing and positive".into(),
        ));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    let mut sorted: Vec<EdgeSet> = states.to_vec();
    sorted.sort();
    sorted.dedup();
    let s = sorted.len();
    if s == 0 {
        return Err(Error::InvalidInput("empty state list".into()));
    }
    let snapshots: Vec<Vec<u32>> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<Vec<u32>> {
            let mut chain = FastChain::new(g, cfg, start)?;
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            let mut idxs = Vec::with_capacity(grid.len());
            let mut t = 0u32;
            for &stop in grid {
                while t < stop {
                    chain.step(&mut rng, false);
                    t += 1;
                }
                let state = chain.state();
                let i = sorted.binary_search(&state).map_err(|_| {
                    Error::InvalidInput("chain reached a state missing from the list".into())
                })?;
                idxs.push(i as u32);
            }
            Ok(idxs)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = vec![vec![0u64; s]; grid.len()];
    for row in &snapshots {
        for (gi, &si) in row.iter().enumerate() {
            counts[gi][si as usize] += 1;
        }
    }
    let n = trials as f64;
    let tv = grid
        .iter()
        .zip(&counts)
        .map(|(&t, c)| {
            let d = 0.5
                * c.iter()
                    .map(|&x| (x as f64 / n - 1.0 / s as f64).abs())
                    .sum::<f64>();
            (t, d)
        })
        .collect();
    Ok(EmpiricalMixReport {
        state_count: s,
        trials,
        base_seed: cfg.seed,
        tv,
    })
}

/// A scan of one 2-switch connected component of Hamiltonian cycles.
pub struct ComponentScan {
    keys: HashSet<Vec<u16>>,
    pub complete: bool,
}

impl ComponentScan {
    pub fn size(&self) -> usize {
        self.keys.len()
    }

    pub fn contains(&self, g: &Graph, state: &EdgeSet) -> bool {
        match encode(g, state) {
            Some(k) => self.keys.contains(&k),
            None => false,
        }
    }
}

fn encode(g: &Graph, state: &EdgeSet) -> Option<Vec<u16>> {
    let mut key: Vec<u16> = Vec::with_capacity(state.len());
    for e in state {
        key.push(g.edge_index(*e)? as u16);
    }
    key.sort_unstable();
    Some(key)
}

/// BFS over the 2-switch component of `start` among Hamiltonian cycles,
/// generating neighbors directly: drop two non-adjacent cycle edges and
/// re-close with the unique reversal chords (when the graph has them). Stops
/// at `cap` visited states; `complete` is false when the frontier was still
/// growing. This reaches exactly the k=2 component without enumerating the
/// whole space first.
pub fn ham_component_bfs(g: &Graph, start: &EdgeSet, cap: usize) -> Result<ComponentScan> {
    if classify(g, start)? != Classification::HamiltonianCycle {
        return Err(Error::InvalidInput("scan start is not a Hamiltonian cycle".into()));
    }
    let n = g.n() as usize;
    let start_key = encode(g, start).expect("classified state edges are ambient");
    let mut keys = HashSet::new();
    keys.insert(start_key.clone());
    let mut queue = VecDeque::from([start_key]);
    let mut complete = true;
    while let Some(key) = queue.pop_front() {
        // Decode to a vertex order.
        let mut nbr = vec![[u32::MAX; 2]; n];
        for &ei in &key {
            let e = g.edges()[ei as usize];
            for w in e.endpoints() {
                let slot = &mut nbr[w as usize];
                if slot[0] == u32::MAX {
                    slot[0] = e.other(w);
                } else {
                    slot[1] = e.other(w);
                }
            }
        }
        let mut order = Vec::with_capacity(n);
        order.push(0u32);
        let mut prev = u32::MAX;
        let mut cur = 0u32;
        while order.len() < n {
            let [a, b] = nbr[cur as usize];
            let next = if a == prev { b } else { a };
            order.push(next);
            prev = cur;
            cur = next;
        }
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (order[i], order[(i + 1) % n]);
                let (c, d) = (order[j], order[(j + 1) % n]);
                if !g.has_edge(a, c) || !g.has_edge(b, d) {
                    continue;
                }
                let drop1 = g.edge_index(Edge::of(a, b)).unwrap() as u16;
                let drop2 = g.edge_index(Edge::of(c, d)).unwrap() as u16;
                let add1 = g.edge_index(Edge::of(a, c)).unwrap() as u16;
                let add2 = g.edge_index(Edge::of(b, d)).unwrap() as u16;
                let mut next: Vec<u16> = key
                    .iter()
                    .copied()
                    .filter(|&e| e != drop1 && e != drop2)
                    .chain([add1, add2])
                    .collect();
                next.sort_unstable();
                if !keys.contains(&next) {
                    if keys.len() == cap {
                        complete = false;
                        queue.clear();
                        break;
                    }
                    keys.insert(next.clone());
                    queue.push_back(next);
                }
            }
            if !complete {
                break;
            }
        }
    }
    Ok(ComponentScan { keys, complete })
}

/// Chi-square statistic of observed visit counts against the uniform law.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Visit counts over `states` of independent chain endpoints at time `t`.
pub fn endpoint_counts(
    g: &Graph,
    cfg: &ChainConfig,
    start: &EdgeSet,
    t: u32,
    trials: u32,
    states: &[EdgeSet],
) -> Result<Vec<u64>> {
    let mut sorted = states.to_vec();
    sorted.sort();
    sorted.dedup();
    let counts: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<usize> {
            let mut chain = FastChain::new(g, cfg, start)?;
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            for _ in 0..t {
                chain.step(&mut rng, false);
            }
            sorted
                .binary_search(&chain.state())
                .map_err(|_| Error::InvalidInput("chain reached a state missing from the list".into()))
        })
        .try_fold(
            || vec![0u64; sorted.len()],
            |mut acc, idx| -> Result<Vec<u64>> {
                acc[idx?] += 1;
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0u64; sorted.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;
    Ok(counts)
}

/// Seeded constructive Hamiltonian cycle search, guaranteed on graphs with
/// `2·min_degree ≥ n`: grow a path greedily, close maximal paths into cycles
/// through a crossing edge pair (which the degree sum pins down by
/// pigeonhole), and reopen non-spanning cycles through an outside
/// attachment. Coverage grows every round, so this ends within n rounds.
/// The seed permutes all tie-breaks; different seeds reach different cycles.
pub fn find_ham_cycle(g: &Graph, seed: u64) -> Result<HamCycle> {
    let n = g.n();
    if n < 3 {
        return Err(Error::Precondition("need at least three vertices".into()));
    }
    if 2 * g.min_degree() < n as usize {
        return Err(Error::Precondition(format!(
            "guaranteed search needs 2·min_degree ≥ {n}, graph has min degree {}",
            g.min_degree()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<u32> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut rank = vec![0u32; n as usize];
    for (i, &v) in perm.iter().enumerate() {
        rank[v as usize] = i as u32;
    }
    let pick = |v: u32, on_path: &[bool]| -> Option<u32> {
        g.neighbors(v)
            .iter()
            .copied()
            .filter(|&w| !on_path[w as usize])
            .min_by_key(|&w| rank[w as usize])
    };
    let mut on_path = vec![false; n as usize];
    let mut path = vec![perm[0]];
    on_path[perm[0] as usize] = true;
    loop {
        // extend at the tail, flipping to the head when the tail is stuck
        loop {
            let tail = *path.last().unwrap();
            if let Some(w) = pick(tail, &on_path) {
                path.push(w);
                on_path[w as usize] = true;
            } else if pick(path[0], &on_path).is_some() {
                path.reverse();
            } else {
                break;
            }
        }
        // both endpoints have all neighbors on the path; close it: directly,
        // or via i with path[i] ~ tail and path[i+1] ~ head, which exists
        // because deg(head) + deg(tail) ≥ n exceeds the candidate slots
        let t = path.len() - 1;
        let (head, tail) = (path[0], path[t]);
        if !g.has_edge(head, tail) {
            let i = (0..t)
                .find(|&i| g.has_edge(path[i], tail) && g.has_edge(path[i + 1], head))
                .expect("degree sum forces a crossing pair on a maximal path");
            path[i + 1..].reverse();
        }
        if path.len() == n as usize {
            return HamCycle::from_order(g, &path);
        }
        // the cycle covers ≥ δ+1 ≥ n/2 + 1 vertices, so every outside vertex
        // has a neighbor on it; attach one and reopen into a longer path
        let u = (0..n)
            .filter(|&u| !on_path[u as usize])
            .filter(|&u| g.neighbors(u).iter().any(|&w| on_path[w as usize]))
            .min_by_key(|&u| rank[u as usize])
            .expect("outside vertices see the cycle at this density");
        let w = g
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&w| on_path[w as usize])
            .min_by_key(|&w| rank[w as usize])
            .unwrap();
        let p = path.iter().position(|&v| v == w).unwrap();
        path.rotate_left(p);
        path.reverse();
        path.push(u);
        on_path[u as usize] = true;
    }
}

/// Histogram of pairwise symmetric-difference sizes over a state list,
/// keyed by |x △ y|.
pub fn diff_histogram(states: &[EdgeSet]) -> HashMap<usize, u64> {
    let mut hist = HashMap::new();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let d = crate::graph::symmetric_difference_size(&states[i], &states[j]);
            *hist.entry(d).or_insert(0) += 1;
        }
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, target: TargetClass, lazy: bool, seed: u64) -> ChainConfig {
        ChainConfig {
            k,
            target,
            lazy,
            seed,
        }
    }

    #[test]
    fn hamiltonian_cycle_counts_on_complete_graphs() {
        // (n-1)!/2 for K_n.
        for (n, want) in [(4, 3), (5, 12), (6, 60), (7, 360), (8, 2520)] {
            let g = Graph::complete(n);
            let found = enumerate_ham_cycles(&g, DEFAULT_ENUM_CAP).unwrap();
            assert_eq!(found.len(), want, "K{n}");
            for h in &found {
                assert_eq!(classify(&g, h).unwrap(), Classification::HamiltonianCycle);
            }
        }
        let kb = Graph::complete_bipartite(4);
        assert_eq!(enumerate_ham_cycles(&kb, DEFAULT_ENUM_CAP).unwrap().len(), 72);
    }

    #[test]
    fn two_factor_counts_on_complete_graphs() {
        // K6: 60 hamiltonian + 10 triangle pairs; K7: 360 + C(7,3)·1·3;
        // K8: 2520 + 672 + 315.
        for (n, want) in [(6, 70), (7, 465), (8, 3507)] {
            let g = Graph::complete(n);
            let found = enumerate_two_factors(&g, DEFAULT_ENUM_CAP).unwrap();
            assert_eq!(found.len(), want, "K{n}");
        }
        let g = Graph::complete(6);
        let hams = enumerate_ham_cycles(&g, DEFAULT_ENUM_CAP).unwrap();
        let tfs = enumerate_two_factors(&g, DEFAULT_ENUM_CAP).unwrap();
        for h in &hams {
            assert!(tfs.binary_search(h).is_ok(), "2-factors include each cycle");
        }
    }

    #[test]
    fn degree_targeted_enumeration() {
        let g = Graph::complete(4);
        // Degree 0 at vertex 0 forces the triangle on {1,2,3}.
        let one_zero = enumerate_by_degree(&g, &[0, 2, 2, 2], 100).unwrap();
        assert_eq!(one_zero.len(), 1);
        assert_eq!(one_zero[0].len(), 3);
        // Endpoints 0 and 1: the two orientations of a spanning path.
        let two_ones = enumerate_by_degree(&g, &[1, 1, 2, 2], 100).unwrap();
        assert_eq!(two_ones.len(), 2);
        assert!(enumerate_by_degree(&g, &[3, 2, 2, 2], 100).is_err());
        assert!(enumerate_by_degree(&g, &[2, 2], 100).is_err());
    }

    #[test]
    fn ham_path_count_k4() {
        // 4!/2 orderings.
        let g = Graph::complete(4);
        assert_eq!(enumerate_ham_paths(&g, 100).unwrap().len(), 12);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let g = Graph::complete(8);
        match enumerate_ham_cycles(&g, 100) {
            Err(Error::CapExceeded { cap: 100, .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn k4_state_graph_is_a_triangle() {
        let g = Graph::complete(4);
        let (sg, rep) = check_irreducible(&g, 2, TargetClass::HamiltonianCycles, 100).unwrap();
        assert_eq!(rep.state_count, 3);
        assert!(rep.connected);
        assert_eq!(sg.edge_count(), 3);
        for i in 0..3 {
            assert_eq!(sg.neighbors(i).len(), 2);
            assert!(sg.neighbors(i).iter().all(|&(_, d)| d == 4));
        }
    }

    #[test]
    fn single_switches_never_move() {
        // |x △ y| = 2 would need one edge swapped for another on the same
        // endpoints; k=1 therefore strands every state.
        let g = Graph::complete(6);
        let (_, rep) = check_irreducible(&g, 1, TargetClass::TwoFactors, 1000).unwrap();
        assert_eq!(rep.state_count, 70);
        assert_eq!(rep.component_count, 70);
    }

    #[test]
    fn kernel_checks_k4() {
        let g = Graph::complete(4);
        let c = cfg(2, TargetClass::HamiltonianCycles, true, 0);
        let (sg, _) = check_irreducible(&g, 2, TargetClass::HamiltonianCycles, 100).unwrap();
        let checks = verify_kernel(&g, &sg, &c).unwrap();
        assert!(checks.symmetric);
        assert!(checks.rows_sum_to_one);
        assert!(checks.uniform_is_stationary);
        assert!(checks.lazy_diagonal);
        assert_eq!(checks.min_positive.as_deref(), Some("1/60"));
        assert_eq!(checks.theta, "1/60");
        assert!(checks.theta_attained);
    }

    #[test]
    fn spectral_mixing_k4_matches_closed_form() {
        // Lazy k=2 kernel on K4's three cycles: P = (57/60)I + (1/60)J,
        // eigenvalues {1, 0.95, 0.95}; worst-start TV is (2/3)(0.95)^t.
        let g = Graph::complete(4);
        let c = cfg(2, TargetClass::HamiltonianCycles, true, 0);
        let (sg, _) = check_irreducible(&g, 2, TargetClass::HamiltonianCycles, 100).unwrap();
        let rep = mixing_exact(&g, &sg, &c, &[0.25, 0.1], 10_000, DEFAULT_DENSE_CAP).unwrap();
        assert!((rep.lambda1 - 0.95).abs() < 1e-9);
        assert!((rep.spectral_gap - 0.05).abs() < 1e-9);
        let tau25 = rep.tau.iter().find(|(e, _)| *e == 0.25).unwrap().1;
        assert_eq!(tau25, 20);
        for (t, tv) in &rep.tv_curve {
            let closed = (2.0 / 3.0) * 0.95f64.powi(*t as i32);
            assert!((tv - closed).abs() < 1e-9, "t={t}");
        }
        // The spectral bound dominates the measured time.
        for ((e, t), (e2, b)) in rep.tau.iter().zip(&rep.spectral_tau_bound) {
            assert_eq!(e, e2);
            assert!((*t as f64) <= b.ceil(), "tau {t} exceeds bound {b}");
        }
    }

    #[test]
    fn mixing_iteration_cap_errors() {
        let g = Graph::complete(4);
        let c = cfg(2, TargetClass::HamiltonianCycles, true, 0);
        let (sg, _) = check_irreducible(&g, 2, TargetClass::HamiltonianCycles, 100).unwrap();
        assert!(matches!(
            mixing_exact(&g, &sg, &c, &[0.001], 5, DEFAULT_DENSE_CAP),
            Err(Error::CapExceeded { cap: 5, .. })
        ));
    }

    #[test]
    fn empirical_mixing_k4_converges() {
        let g = Graph::complete(4);
        let c = cfg(2, TargetClass::HamiltonianCycles, true, 7);
        let states = enumerate_ham_cycles(&g, 100).unwrap();
        let start = states[0].clone();
        let rep = mixing_empirical(&g, &c, &start, &[5, 60], 20_000, &states).unwrap();
        let tv5 = rep.tv[0].1;
        let tv60 = rep.tv[1].1;
        // Closed form: (2/3)(0.95)^t ≈ 0.516 at t=5, 0.031 at t=60.
        assert!(tv5 > 0.35, "tv(5) = {tv5}");
        assert!(tv60 < 0.08, "tv(60) = {tv60}");
        // Deterministic given the seed.
        let rep2 = mixing_empirical(&g, &c, &start, &[5, 60], 20_000, &states).unwrap();
        assert_eq!(rep.tv, rep2.tv);
    }

    #[test]
    fn endpoint_chi_square_consistent_with_uniform() {
        let g = Graph::complete(4);
        let c = cfg(2, TargetClass::HamiltonianCycles, true, 11);
        let states = enumerate_ham_cycles(&g, 100).unwrap();
        let counts = endpoint_counts(&g, &c, &states[0], 300, 30_000, &states).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), 30_000);
        // 2 degrees of freedom; 13.82 is the 0.1% point.
        assert!(chi_square_uniform(&counts) < 13.82);
    }

    #[test]
    fn component_scan_covers_k5() {
        let g = Graph::complete(5);
        let start = HamCycle::from_order(&g, &[0, 1, 2, 3, 4]).unwrap();
        let scan = ham_component_bfs(&g, start.edges(), DEFAULT_BFS_CAP).unwrap();
        assert!(scan.complete);
        assert_eq!(scan.size(), 12);
        let other = HamCycle::from_order(&g, &[0, 2, 4, 1, 3]).unwrap();
        assert!(scan.contains(&g, other.edges()));
        let scan_capped = ham_component_bfs(&g, start.edges(), 5).unwrap();
        assert!(!scan_capped.complete);
        assert_eq!(scan_capped.size(), 5);
    }

    #[test]
    fn diff_histogram_k4() {
        let states = enumerate_ham_cycles(&Graph::complete(4), 100).unwrap();
        let hist = diff_histogram(&states);
        assert_eq!(hist.get(&4), Some(&3));
        assert_eq!(hist.len(), 1);
    }

    #[test]
    fn cycle_search_succeeds_across_the_dense_regime() {
        // constructor of HamCycle validates the result; variety across seeds
        let g = Graph::complete(12);
        let mut distinct = HashSet::new();
        for seed in 0..6 {
            distinct.insert(find_ham_cycle(&g, seed).unwrap().edges().clone());
        }
        assert!(distinct.len() >= 3);

        for n in [30, 35, 40] {
            let delta = n / 2 + 7;
            for seed in 0..3 {
                let g = crate::families::build_random_dense(n, delta, seed, false).unwrap();
                let h = find_ham_cycle(&g, 1000 + seed).unwrap();
                assert_eq!(h.edges().len(), n as usize);
            }
        }
        // bipartite boundary case
        let g = Graph::complete_bipartite(10);
        find_ham_cycle(&g, 7).unwrap();
        // exactly one cycle to find
        let c4 = Graph::new(4, [(0u32, 1u32), (1, 2), (2, 3), (3, 0)], None).unwrap();
        assert_eq!(find_ham_cycle(&c4, 0).unwrap().edges(), &c4.edge_set());
    }

    #[test]
    fn cycle_search_requires_dirac_density() {
        let path = Graph::new(4, [(0u32, 1u32), (1, 2), (2, 3)], None).unwrap();
        assert!(matches!(
            find_ham_cycle(&path, 0),
            Err(Error::Precondition(_))
        ));
    }
}
