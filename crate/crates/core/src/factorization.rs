//! Ranks of conformal-block bundles from fusion data, by degeneration at nodes.
//!
//! [`RankEngine::rank`] applies the non-separating step
//! `R(g, S) = Σ_W R(g−1, S ∪ {W, W′})` until genus zero, then splits off two
//! insertions at a time down to three-point multiplicities. Unstable queries
//! are routed by inserting vacua: `R(0, {a, b}) = N(a, b, V)`, `R(0, {a}) = N(a, V, V)`,
//! `R(0, ∅) = N(V, V, V)` and `R(1, ∅) = R(1, {V})`.
//!
//! [`StableGraph`] and [`rank_via_graph`] evaluate a fixed degeneration: the sum over
//! edge labelings of the product of vertex ranks. [`invariance_check`] compares
//! random full degenerations with the recursion.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use parking_lot::Mutex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::FusionRing;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorizationError {
    #[error("label index {0} out of range")]
    Label(usize),
    #[error("vertex {vertex} is unstable (genus {genus}, valence {valence})")]
    UnstableVertex { vertex: usize, genus: u32, valence: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("edge endpoint {0} out of range")]
    Endpoint(usize),
}

/// Genus and inserted labels, as ring indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RankQuery {
    pub genus: u32,
    pub insertions: Vec<usize>,
}

impl RankQuery {
    pub fn new(genus: u32, insertions: Vec<usize>) -> Self {
        RankQuery { genus, insertions }
    }

    pub fn is_stable(&self) -> bool {
        2 * self.genus as i64 - 2 + self.insertions.len() as i64 > 0
    }
}

type MemoKey = (u32, Vec<usize>);

/// Memoized rank recursion over one fusion ring. The memo is the only shared
/// mutable state; concurrent writers insert identical values.
pub struct RankEngine {
    ring: FusionRing,
    memo: Mutex<HashMap<MemoKey, BigUint>>,
    parallel: bool,
}

impl RankEngine {
    pub fn new(ring: FusionRing) -> Self {
        RankEngine { ring, memo: Mutex::new(HashMap::new()), parallel: true }
    }

    /// Single-threaded engine; results are identical to the parallel one.
    pub fn sequential(ring: FusionRing) -> Self {
        RankEngine { parallel: false, ..Self::new(ring) }
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn memo_len(&self) -> usize {
        self.memo.lock().len()
    }

    fn check(&self, labels: &[usize]) -> Result<(), FactorizationError> {
        match labels.iter().find(|&&l| l >= self.ring.len()) {
            Some(&l) => Err(FactorizationError::Label(l)),
            None => Ok(()),
        }
    }

    pub fn rank_query(&self, q: &RankQuery) -> Result<BigUint, FactorizationError> {
        self.rank(q.genus, &q.insertions)
    }

    pub fn rank(&self, genus: u32, insertions: &[usize]) -> Result<BigUint, FactorizationError> {
        self.check(insertions)?;
        let mut key = insertions.to_vec();
        key.sort_unstable();
        Ok(self.rank_sorted(genus, key))
    }

    fn rank_sorted(&self, genus: u32, labels: Vec<usize>) -> BigUint {
        let v = self.ring.vacuum();
        let n = |a, b, c| BigUint::from(self.ring.n(a, b, c));
        if genus == 0 && labels.len() <= 3 {
            return match labels[..] {
                [] => n(v, v, v),
                [a] => n(a, v, v),
                [a, b] => n(a, b, v),
                [a, b, c] => n(a, b, c),
                _ => unreachable!(),
            };
        }
        let key = (genus, labels);
        if let Some(hit) = self.memo.lock().get(&key) {
            return hit.clone();
        }
        let (genus, labels) = key;
        let value = if genus == 1 && labels.is_empty() {
            self.rank_sorted(1, vec![v])
        } else if genus == 0 {
            let (a, b) = (labels[0], labels[1]);
            let rest = &labels[2..];
            let term = |w: usize| {
                let m = self.ring.n(a, b, w);
                if m == 0 {
                    return BigUint::zero();
                }
                let mut s = rest.to_vec();
                s.push(self.ring.dual(w));
                s.sort_unstable();
                self.rank_sorted(0, s) * m
            };
            self.sum_over_labels(term)
        } else {
            let term = |w: usize| {
                let mut s = labels.clone();
                s.push(w);
                s.push(self.ring.dual(w));
                s.sort_unstable();
                self.rank_sorted(genus - 1, s)
            };
            self.sum_over_labels(term)
        };
        self.memo.lock().insert((genus, labels), value.clone());
        value
    }

    fn sum_over_labels<F: Fn(usize) -> BigUint + Sync + Send>(&self, f: F) -> BigUint {
        if self.parallel && self.ring.len() > 2 {
            (0..self.ring.len()).into_par_iter().map(f).reduce(BigUint::zero, |a, b| a + b)
        } else {
            (0..self.ring.len()).map(f).fold(BigUint::zero(), |a, b| a + b)
        }
    }

    /// `Σ_W R(g₁, S₁ ∪ {W}) · R(g₂, S₂ ∪ {W′})`.
    pub fn rank_separating(&self, g1: u32, s1: &[usize], g2: u32, s2: &[usize]) -> Result<BigUint, FactorizationError> {
        self.check(s1)?;
        self.check(s2)?;
        let mut total = BigUint::zero();
        for w in 0..self.ring.len() {
            let mut a = s1.to_vec();
            a.push(w);
            let mut b = s2.to_vec();
            b.push(self.ring.dual(w));
            total += self.rank(g1, &a)? * self.rank(g2, &b)?;
        }
        Ok(total)
    }

    /// Product over connected components.
    pub fn rank_disconnected(&self, components: &[RankQuery]) -> Result<BigUint, FactorizationError> {
        components.iter().try_fold(BigUint::one(), |acc, q| Ok(acc * self.rank_query(q)?))
    }

    /// Answers a batch of queries, in parallel unless the engine is sequential.
    pub fn rank_batch(&self, queries: &[RankQuery]) -> Vec<Result<BigUint, FactorizationError>> {
        if self.parallel {
            queries.par_iter().map(|q| self.rank_query(q)).collect()
        } else {
            queries.iter().map(|q| self.rank_query(q)).collect()
        }
    }
}

/// Dual graph of a stable pointed curve. Legs are ordered marked points, each with a label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StableGraph {
    pub genera: Vec<u32>,
    pub edges: Vec<(usize, usize)>,
    pub legs: Vec<(usize, usize)>,
}

impl StableGraph {
    /// One smooth component.
    pub fn smooth(genus: u32, labels: &[usize]) -> Self {
        StableGraph { genera: vec![genus], edges: Vec::new(), legs: labels.iter().map(|&l| (0, l)).collect() }
    }

    /// Trivalent genus-`g` graph without legs: a chain of `g − 1` beads, each two vertices joined
    /// by a double edge, closed into a cycle. For `g = 1` it is a self-loop with one vacuum leg.
    pub fn necklace(genus: u32, vacuum: usize) -> Self {
        assert!(genus >= 1, "necklace needs positive genus");
        if genus == 1 {
            return StableGraph { genera: vec![0], edges: vec![(0, 0)], legs: vec![(0, vacuum)] };
        }
        let beads = (genus - 1) as usize;
        let mut edges = Vec::new();
        for i in 0..beads {
            let (u, w) = (2 * i, 2 * i + 1);
            edges.push((u, w));
            edges.push((u, w));
            edges.push((w, (2 * i + 2) % (2 * beads)));
        }
        StableGraph { genera: vec![0; 2 * beads], edges, legs: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.genera.len()
    }

    pub fn valence(&self, v: usize) -> usize {
        let e: usize = self.edges.iter().map(|&(a, b)| usize::from(a == v) + usize::from(b == v)).sum();
        e + self.legs.iter().filter(|&&(x, _)| x == v).count()
    }

    /// Arithmetic genus `h¹ + Σ g_v`.
    pub fn genus(&self) -> u32 {
        let h1 = self.edges.len() as i64 - self.vertex_count() as i64 + 1;
        (h1 + self.genera.iter().map(|&g| g as i64).sum::<i64>()) as u32
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn validate(&self) -> Result<(), FactorizationError> {
        let n = self.vertex_count();
        for &(a, b) in &self.edges {
            if a >= n || b >= n {
                return Err(FactorizationError::Endpoint(a.max(b)));
            }
        }
        for &(v, _) in &self.legs {
            if v >= n {
                return Err(FactorizationError::Endpoint(v));
            }
        }
        for v in 0..n {
            let valence = self.valence(v);
            if 2 * self.genera[v] as i64 - 2 + valence as i64 <= 0 {
                return Err(FactorizationError::UnstableVertex { vertex: v, genus: self.genera[v], valence });
            }
        }
        if !self.is_connected() {
            return Err(FactorizationError::Disconnected);
        }
        Ok(())
    }

    /// Whether every vertex has genus zero and valence three.
    pub fn is_trivalent(&self) -> bool {
        (0..self.vertex_count()).all(|v| self.genera[v] == 0 && self.valence(v) == 3)
    }

    /// Canonical representative under vertex relabeling (legs keep their order).
    pub fn canonical(&self) -> StableGraph {
        let n = self.vertex_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best: Option<StableGraph> = None;
        loop {
            let candidate = self.relabel(&perm);
            if best.as_ref().is_none_or(|b| candidate < *b) {
                best = Some(candidate);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.expect("at least one permutation")
    }

    fn relabel(&self, perm: &[usize]) -> StableGraph {
        let mut genera = vec![0; perm.len()];
        for (v, &p) in perm.iter().enumerate() {
            genera[p] = self.genera[v];
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        let legs = self.legs.iter().map(|&(v, l)| (perm[v], l)).collect();
        StableGraph { genera, edges, legs }
    }

    /// Half-edges at `v`: `Leg(i)` or `Edge(e, side)`.
    fn half_edges(&self, v: usize) -> Vec<HalfEdge> {
        let mut out: Vec<HalfEdge> =
            self.legs.iter().enumerate().filter(|(_, &(x, _))| x == v).map(|(i, _)| HalfEdge::Leg(i)).collect();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if a == v {
                out.push(HalfEdge::Edge(e, 0));
            }
            if b == v {
                out.push(HalfEdge::Edge(e, 1));
            }
        }
        out
    }

    /// Replaces vertex `v` by a genus-one-lower vertex with a self-loop.
    fn degenerate_loop(&self, v: usize) -> StableGraph {
        let mut g = self.clone();
        g.genera[v] -= 1;
        g.edges.push((v, v));
        g
    }

    /// Splits `v` into `v` (genus `g1`, keeping the half-edges in `side`) and a new vertex
    /// carrying the rest, joined by a new edge.
    fn degenerate_split(&self, v: usize, g1: u32, side: &[HalfEdge]) -> StableGraph {
        let mut g = self.clone();
        let w = g.genera.len();
        g.genera.push(self.genera[v] - g1);
        g.genera[v] = g1;
        for h in self.half_edges(v) {
            if side.contains(&h) {
                continue;
            }
            match h {
                HalfEdge::Leg(i) => g.legs[i].0 = w,
                HalfEdge::Edge(e, 0) => g.edges[e].0 = w,
                HalfEdge::Edge(e, _) => g.edges[e].1 = w,
            }
        }
        g.edges.push((v, w));
        g
    }

    /// All graphs obtained by one degeneration at one vertex.
    pub fn degenerations(&self) -> Vec<StableGraph> {
        let mut out = Vec::new();
        for v in 0..self.vertex_count() {
            out.extend(self.degenerations_at(v));
        }
        out
    }

    fn degenerations_at(&self, v: usize) -> Vec<StableGraph> {
        let mut out = Vec::new();
        if self.genera[v] >= 1 {
            out.push(self.degenerate_loop(v));
        }
        let halves = self.half_edges(v);
        let gv = self.genera[v];
        for mask in 0..(1u64 << halves.len()) {
            let side: Vec<HalfEdge> =
                halves.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, h)| *h).collect();
            let rest = halves.len() - side.len();
            for g1 in 0..=gv {
                let stable1 = 2 * g1 as i64 - 2 + side.len() as i64 + 1 > 0;
                let stable2 = 2 * (gv - g1) as i64 - 2 + rest as i64 + 1 > 0;
                if stable1 && stable2 {
                    out.push(self.degenerate_split(v, g1, &side));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HalfEdge {
    Leg(usize),
    Edge(usize, u8),
}

impl fmt::Display for StableGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "genera={:?} edges={:?} legs={:?}", self.genera, self.edges, self.legs)
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Stable queries are returned unchanged; unstable ones get vacuum legs as in [`RankEngine::rank`].
pub fn stabilize(genus: u32, labels: &[usize], vacuum: usize) -> Vec<usize> {
    let mut out = labels.to_vec();
    while 2 * genus as i64 - 2 + out.len() as i64 <= 0 {
        out.push(vacuum);
    }
    out
}

/// Every stable graph of genus `g` with the given legs, up to isomorphism.
pub fn enumerate_graphs(genus: u32, labels: &[usize]) -> Vec<StableGraph> {
    let start = StableGraph::smooth(genus, labels).canonical();
    let mut seen: BTreeSet<StableGraph> = BTreeSet::new();
    let mut frontier = vec![start.clone()];
    seen.insert(start);
    while let Some(g) = frontier.pop() {
        for d in g.degenerations() {
            let c = d.canonical();
            if seen.insert(c.clone()) {
                frontier.push(c);
            }
        }
    }
    seen.into_iter().collect()
}

/// `Σ` over edge labelings `e ↦ W` (half-edges get `W` and `W′`) of `Π_v R(g_v, labels at v)`.
pub fn rank_via_graph(graph: &StableGraph, engine: &RankEngine) -> Result<BigUint, FactorizationError> {
    let single_smooth = graph.vertex_count() == 1 && graph.edges.is_empty();
    if single_smooth {
        let labels: Vec<usize> = graph.legs.iter().map(|&(_, l)| l).collect();
        return engine.rank(graph.genera[0], &labels);
    }
    graph.validate()?;
    let ring = engine.ring();
    for &(_, l) in &graph.legs {
        if l >= ring.len() {
            return Err(FactorizationError::Label(l));
        }
    }
    let n = graph.vertex_count();
    // Vertices are evaluated as soon as their last incident edge is labeled.
    let mut last = vec![None; n];
    for (e, &(a, b)) in graph.edges.iter().enumerate() {
        last[a] = Some(e);
        last[b] = Some(e);
    }
    let mut base: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(v, l) in &graph.legs {
        base[v].push(l);
    }
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); graph.edges.len()];
    let mut head = BigUint::one();
    for v in 0..n {
        match last[v] {
            Some(e) => ready[e].push(v),
            None => head *= engine.rank(graph.genera[v], &base[v])?,
        }
    }
    if head.is_zero() {
        return Ok(head);
    }
    let mut assigned: Vec<Vec<usize>> = base;
    let sum = labeling_sum(graph, engine, 0, &mut assigned, &ready)?;
    Ok(head * sum)
}

fn labeling_sum(
    graph: &StableGraph,
    engine: &RankEngine,
    e: usize,
    assigned: &mut [Vec<usize>],
    ready: &[Vec<usize>],
) -> Result<BigUint, FactorizationError> {
    if e == graph.edges.len() {
        return Ok(BigUint::one());
    }
    let ring = engine.ring();
    let (a, b) = graph.edges[e];
    let mut total = BigUint::zero();
    for w in 0..ring.len() {
        assigned[a].push(w);
        assigned[b].push(ring.dual(w));
        let mut factor = BigUint::one();
        for &v in &ready[e] {
            factor *= engine.rank(graph.genera[v], &assigned[v])?;
            if factor.is_zero() {
                break;
            }
        }
        if !factor.is_zero() {
            total += factor * labeling_sum(graph, engine, e + 1, assigned, ready)?;
        }
        assigned[b].pop();
        assigned[a].pop();
    }
    Ok(total)
}

/// Degenerates the smooth curve at random until every component is a genus-zero
/// three-pointed sphere.
pub fn random_full_degeneration(genus: u32, labels: &[usize], rng: &mut impl Rng) -> StableGraph {
    let mut g = StableGraph::smooth(genus, labels);
    loop {
        let open: Vec<usize> =
            (0..g.vertex_count()).filter(|&v| g.genera[v] > 0 || g.valence(v) > 3).collect();
        let Some(&v) = open.choose(rng) else { return g };
        let options = g.degenerations_at(v);
        g = options.choose(rng).expect("non-trivalent vertex degenerates").clone();
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trial {
    pub graph: StableGraph,
    pub rank: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub query: RankQuery,
    pub recursion: String,
    pub trials: Vec<Trial>,
    pub agree: bool,
}

impl InvarianceReport {
    /// Trials whose value differs from the recursion.
    pub fn witnesses(&self) -> impl Iterator<Item = &Trial> {
        self.trials.iter().filter(move |t| t.rank != self.recursion)
    }
}

/// Evaluates `trials` random full degenerations and compares them with the recursion.
/// Trial `t` draws from a generator seeded by `(seed, t)`, so reports are reproducible.
pub fn invariance_check(
    engine: &RankEngine,
    query: &RankQuery,
    trials: usize,
    seed: u64,
) -> Result<InvarianceReport, FactorizationError> {
    let recursion = engine.rank_query(query)?;
    let labels = stabilize(query.genus, &query.insertions, engine.ring().vacuum());
    let run = |t: usize| -> Result<Trial, FactorizationError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(t as u64));
        let graph = random_full_degeneration(query.genus, &labels, &mut rng);
        let rank = rank_via_graph(&graph, engine)?;
        Ok(Trial { graph, rank: rank.to_string() })
    };
    let trials: Vec<Trial> = if engine.parallel {
        (0..trials).into_par_iter().map(run).collect::<Result<_, _>>()?
    } else {
        (0..trials).map(run).collect::<Result<_, _>>()?
    };
    let recursion = recursion.to_string();
    let agree = trials.iter().all(|t| t.rank == recursion);
    Ok(InvarianceReport { query: query.clone(), recursion, trials, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lattice_catalog, minimal_model, nonassociative_control};

    #[test]
    fn spec_examples() {
        let lattice1 = RankEngine::new(lattice_catalog(1).unwrap().ring);
        assert_eq!(lattice1.rank(2, &[]).unwrap(), BigUint::from(4u32));
        assert_eq!(lattice1.rank(1, &[]).unwrap(), BigUint::from(2u32));
        let ly = minimal_model(2, 5).unwrap().ring;
        let x = ly.index("X").unwrap();
        let engine = RankEngine::new(ly);
        assert_eq!(engine.rank(0, &[x; 4]).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn graphs_and_necklaces() {
        let engine = RankEngine::new(lattice_catalog(1).unwrap().ring);
        let loop_graph = StableGraph { genera: vec![0], edges: vec![(0, 0)], legs: vec![(0, 0)] };
        assert_eq!(rank_via_graph(&loop_graph, &engine).unwrap(), BigUint::from(2u32));
        for g in 1..=4 {
            let neck = StableGraph::necklace(g, 0);
            assert!(neck.is_trivalent());
            assert_eq!(neck.genus(), g);
            assert!(neck.validate().is_ok());
        }
        let bad = StableGraph { genera: vec![0, 0], edges: vec![(0, 1)], legs: vec![(0, 0), (1, 0)] };
        assert!(matches!(rank_via_graph(&bad, &engine), Err(FactorizationError::UnstableVertex { .. })));
    }

    #[test]
    fn enumeration_counts() {
        // M̄_{0,4} has one smooth and three boundary graphs; M̄_{1,1} has two.
        assert_eq!(enumerate_graphs(0, &[0, 1, 2, 3]).len(), 4);
        assert_eq!(enumerate_graphs(1, &[0]).len(), 2);
        assert_eq!(enumerate_graphs(2, &[]).len(), 7);
    }

    #[test]
    fn control_ring_disagrees() {
        let engine = RankEngine::new(nonassociative_control().ring);
        let q = RankQuery::new(0, vec![0, 1, 0, 1]);
        let report = invariance_check(&engine, &q, 12, 0).unwrap();
        assert!(!report.agree);
        assert!(report.witnesses().count() > 0);
    }

    #[test]
    fn sequential_matches_parallel() {
        let ring = crate::catalog::affine_sl2(3).unwrap().ring;
        let a = RankEngine::new(ring.clone());
        let b = RankEngine::sequential(ring);
        for g in 0..=3 {
            assert_eq!(a.rank(g, &[1, 1]).unwrap(), b.rank(g, &[1, 1]).unwrap());
        }
    }
}
