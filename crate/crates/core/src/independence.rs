//! Exact maximum (weight) independent sets.
//!
//! Both solvers search for a maximum clique of the complement graph with
//! bit-parallel candidate sets. Candidates are greedily partitioned into
//! cliques of the original graph; an independent set meets each such class
//! at most once, which gives the pruning bound. Branching visits candidates
//! from the highest color class downwards, so for a fixed input the search
//! and its witness are fully deterministic.
//!
//! Confusion graphs get an additional symmetry-aware entry point,
//! [`confusion_independence`]: vertex transitivity lets the search fix the
//! all-zero tuple, and permutations of the values inside each block that
//! fix the blocks already used by the partial solution let whole orbits of
//! candidates be handled by one representative. Each coset of the subgroup
//! of tuples supported on a set of blocks induces a copy of the confusion
//! graph on those blocks, so a second bound counts candidates per coset,
//! capped by the (recursively computed) independence number of that copy.

use std::collections::{BTreeMap, HashMap};
use std::ops::Add;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::confusion::ConfusionGraph;
use crate::error::{Error, Result};
use crate::graph::{BlockLengths, UndirectedGraph};
use crate::limits::{Budget, Limits};
use crate::Rational;

/// Default cap on vertices handed to the exact solvers.
pub const DEFAULT_MAX_SEARCH_VERTICES: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceCertificate {
    pub alpha: usize,
    /// Vertex indices in ascending order.
    pub witness: Vec<usize>,
    pub nodes_explored: u64,
}

/// `true` iff no two members of `s` are adjacent.
pub fn is_independent(g: &UndirectedGraph, s: &[usize]) -> Result<bool> {
    let n = g.vertex_count();
    if let Some(&v) = s.iter().find(|&&v| v >= n) {
        return Err(Error::invalid(format!("vertex {v} out of range 0..{n}")));
    }
    Ok(s.iter()
        .enumerate()
        .all(|(i, &u)| s[i + 1..].iter().all(|&v| u == v || !g.has_edge(u, v))))
}

fn check_search_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    if n > DEFAULT_MAX_SEARCH_VERTICES {
        return Err(Error::cap(
            "search vertex count",
            DEFAULT_MAX_SEARCH_VERTICES as u64,
            n as u64,
        ));
    }
    Ok(())
}

/// Exact independence number with a witness.
pub fn max_independent_set(g: &UndirectedGraph, limits: &Limits) -> Result<IndependenceCertificate> {
    check_search_size(g.vertex_count())?;
    let space = SearchSpace::complement_of(g);
    let mut search = CliqueSearch::new(&space, limits.budget(), 0);
    let all = space.all();
    search.expand(&all)?;
    Ok(search.certificate())
}

/// Candidate universe: the complement adjacency in a renumbered vertex
/// order, flattened to `n * words` machine words.
struct SearchSpace {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    /// Internal index to original vertex.
    original: Vec<usize>,
}

impl SearchSpace {
    fn complement_of(g: &UndirectedGraph) -> Self {
        let n = g.vertex_count();
        let order = degeneracy_order(n, |u, v| u != v && !g.has_edge(u, v));
        Self::build(n, &order, |u, v| u != v && !g.has_edge(u, v))
    }

    fn build(n: usize, order: &[usize], adjacent: impl Fn(usize, usize) -> bool) -> Self {
        let words = n.div_ceil(64);
        let mut adj = vec![0u64; n * words];
        for (a, &u) in order.iter().enumerate() {
            let row = &mut adj[a * words..(a + 1) * words];
            for (b, &v) in order.iter().enumerate() {
                if adjacent(u, v) {
                    row[b >> 6] |= 1 << (b & 63);
                }
            }
        }
        SearchSpace {
            n,
            words,
            adj,
            original: order.to_vec(),
        }
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    fn all(&self) -> Vec<u64> {
        let mut p = vec![!0u64; self.words];
        let rem = self.n % 64;
        if rem != 0 {
            p[self.words - 1] = (1 << rem) - 1;
        }
        p
    }
}

/// Vertices sorted so that the densest core (in `adjacent`) comes first.
fn degeneracy_order(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let nbrs: Vec<Vec<usize>> = (0..n)
        .map(|u| (0..n).filter(|&v| adjacent(u, v)).collect())
        .collect();
    let mut degree: Vec<usize> = nbrs.iter().map(Vec::len).collect();
    let mut removed = vec![false; n];
    let mut peeled = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], v))
            .expect("vertices remain");
        removed[v] = true;
        peeled.push(v);
        for &u in &nbrs[v] {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    peeled.reverse();
    peeled
}

#[inline]
fn first_bit(set: &[u64]) -> Option<usize> {
    set.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

#[inline]
fn is_empty(set: &[u64]) -> bool {
    set.iter().all(|&w| w == 0)
}

#[inline]
fn count(set: &[u64]) -> usize {
    set.iter().map(|w| w.count_ones() as usize).sum()
}

fn ones(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            }
        })
    })
}

/// Unweighted maximum clique search in the complement.
struct CliqueSearch<'a> {
    space: &'a SearchSpace,
    budget: Budget,
    best: usize,
    best_set: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    /// Shared incumbent size when several searches run side by side.
    shared: Option<&'a AtomicUsize>,
}

impl<'a> CliqueSearch<'a> {
    fn new(space: &'a SearchSpace, budget: Budget, initial_best: usize) -> Self {
        CliqueSearch {
            space,
            budget,
            best: initial_best,
            best_set: Vec::new(),
            current: Vec::new(),
            nodes: 0,
            shared: None,
        }
    }

    fn incumbent(&self) -> usize {
        match self.shared {
            Some(s) => self.best.max(s.load(Ordering::Relaxed)),
            None => self.best,
        }
    }

    fn record(&mut self) {
        if self.current.len() > self.best {
            self.best = self.current.len();
            self.best_set = self.current.clone();
            if let Some(s) = self.shared {
                s.fetch_max(self.best, Ordering::Relaxed);
            }
        }
    }

    /// Greedy partition of `p` into classes that are independent in the
    /// complement. Only vertices whose class index can still beat the
    /// incumbent are returned, in class order.
    fn color_sort(&self, p: &[u64], min_color: usize) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::new();
        let mut colors = Vec::new();
        let mut uncolored = p.to_vec();
        let mut q = vec![0u64; p.len()];
        let mut k = 0;
        while !is_empty(&uncolored) {
            k += 1;
            q.copy_from_slice(&uncolored);
            while let Some(v) = first_bit(&q) {
                uncolored[v >> 6] &= !(1 << (v & 63));
                q[v >> 6] &= !(1 << (v & 63));
                for (a, b) in q.iter_mut().zip(self.space.row(v)) {
                    *a &= !b;
                }
                if k >= min_color {
                    order.push(v);
                    colors.push(k);
                }
            }
        }
        (order, colors)
    }

    /// Size of the greedy class partition of `p`.
    fn color_bound(&self, p: &[u64]) -> usize {
        let mut uncolored = p.to_vec();
        let mut q = vec![0u64; p.len()];
        let mut k = 0;
        while !is_empty(&uncolored) {
            k += 1;
            q.copy_from_slice(&uncolored);
            while let Some(v) = first_bit(&q) {
                uncolored[v >> 6] &= !(1 << (v & 63));
                q[v >> 6] &= !(1 << (v & 63));
                for (a, b) in q.iter_mut().zip(self.space.row(v)) {
                    *a &= !b;
                }
            }
        }
        k
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes & 1023 == 0 {
            self.budget.check("independence search")?;
        }
        Ok(())
    }

    fn expand(&mut self, p: &[u64]) -> Result<()> {
        self.tick()?;
        if is_empty(p) {
            self.record();
            return Ok(());
        }
        let incumbent = self.incumbent();
        let min_color = (incumbent + 1).saturating_sub(self.current.len()).max(1);
        let (order, colors) = self.color_sort(p, min_color);
        let mut p = p.to_vec();
        let mut next = vec![0u64; p.len()];
        for i in (0..order.len()).rev() {
            if self.current.len() + colors[i] <= self.incumbent() {
                return Ok(());
            }
            let v = order[i];
            self.current.push(v);
            for ((n, a), b) in next.iter_mut().zip(&p).zip(self.space.row(v)) {
                *n = a & b;
            }
            if is_empty(&next) {
                self.record();
            } else {
                let sub = next.clone();
                self.expand(&sub)?;
            }
            self.current.pop();
            p[v >> 6] &= !(1 << (v & 63));
        }
        Ok(())
    }

    fn certificate(&self) -> IndependenceCertificate {
        let mut witness: Vec<usize> = self
            .best_set
            .iter()
            .map(|&v| self.space.original[v])
            .collect();
        witness.sort_unstable();
        IndependenceCertificate {
            alpha: self.best,
            witness,
            nodes_explored: self.nodes,
        }
    }
}

/// Exact independence number of a confusion graph, using its symmetry.
///
/// With `limits.threads > 1` the orbit subproblems below the root are
/// distributed over a thread pool; `alpha` is unaffected, but the witness
/// is only reproducible single-threaded.
pub fn confusion_independence(cg: &ConfusionGraph, limits: &Limits) -> Result<IndependenceCertificate> {
    solve_confusion(cg, limits, &mut HashMap::new())
}

/// `memo` maps block lengths to already known independence numbers of the
/// same base graph.
fn solve_confusion(
    cg: &ConfusionGraph,
    limits: &Limits,
    memo: &mut HashMap<Vec<u32>, usize>,
) -> Result<IndependenceCertificate> {
    let size = cg.vertex_count();
    if size > DEFAULT_MAX_SEARCH_VERTICES as u64 {
        return Err(Error::cap(
            "search vertex count",
            DEFAULT_MAX_SEARCH_VERTICES as u64,
            size,
        ));
    }
    let n = size as usize;
    if n == 1 {
        return Ok(IndependenceCertificate {
            alpha: 1,
            witness: vec![0],
            nodes_explored: 1,
        });
    }
    // Internal numbering: non-neighbors of 0 first, in degeneracy order of
    // the complement restricted to them.
    let non_adjacent = |u: usize, v: usize| u != v && !cg.adjacent(u as u64, v as u64);
    let order = degeneracy_order(n, non_adjacent);
    let space = SearchSpace::build(n, &order, non_adjacent);
    let position: Vec<usize> = {
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        pos
    };
    let symmetry = BlockSymmetry::new(cg);
    let cosets = CosetBound::new(cg, &space, limits, memo)?;
    let budget = limits.budget();

    let root = position[0];
    let mut candidates = space.row(root).to_vec();
    // Greedy incumbent: first-fit over the internal order.
    let greedy = {
        let mut chosen = vec![root];
        let mut p = candidates.clone();
        while let Some(v) = first_bit(&p) {
            chosen.push(v);
            for (a, b) in p.iter_mut().zip(space.row(v)) {
                *a &= b;
            }
        }
        chosen
    };

    let state = OrbitSearch {
        space: &space,
        symmetry: &symmetry,
        cosets: &cosets,
        budget,
        best: AtomicUsize::new(greedy.len()),
        best_set: Mutex::new(greedy),
        nodes: AtomicUsize::new(0),
    };
    let top = state.root_orbits(&candidates);
    let threads = limits.threads.max(1);
    if threads == 1 {
        let mut excluded = vec![0u64; space.words];
        for orbit in &top {
            let mut remaining = candidates.clone();
            for (a, b) in remaining.iter_mut().zip(&excluded) {
                *a &= !b;
            }
            state.branch(&[root], &remaining, orbit)?;
            for &v in orbit {
                excluded[v >> 6] |= 1 << (v & 63);
            }
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        let jobs: Vec<(Vec<u64>, &Vec<usize>)> = top
            .iter()
            .scan(vec![0u64; space.words], |excluded, orbit| {
                let mut remaining = candidates.clone();
                for (a, b) in remaining.iter_mut().zip(excluded.iter()) {
                    *a &= !b;
                }
                for &v in orbit {
                    excluded[v >> 6] |= 1 << (v & 63);
                }
                Some((remaining, orbit))
            })
            .collect();
        pool.install(|| {
            jobs.par_iter()
                .try_for_each(|(remaining, orbit)| state.branch(&[root], remaining, orbit))
        })?;
    }
    candidates.clear();

    let mut witness: Vec<usize> = state
        .best_set
        .into_inner()
        .expect("no poisoned lock")
        .into_iter()
        .map(|v| space.original[v])
        .collect();
    witness.sort_unstable();
    let alpha = state.best.into_inner();
    memo.insert(cg.block_lengths().as_slice().to_vec(), alpha);
    Ok(IndependenceCertificate {
        alpha,
        witness,
        nodes_explored: state.nodes.into_inner() as u64,
    })
}

/// Per-block value permutations of a confusion graph, plus the node
/// automorphisms of the base graph that preserve block lengths (used only
/// at the root, where the stabilizer of the zero tuple contains them).
struct BlockSymmetry {
    n: usize,
    shifts: Vec<u32>,
    masks: Vec<u64>,
    node_automorphisms: Vec<Vec<usize>>,
}

impl BlockSymmetry {
    fn new(cg: &ConfusionGraph) -> Self {
        let n = cg.n();
        let masks: Vec<u64> = (0..n).map(|j| cg.block_mask(j)).collect();
        let shifts = masks
            .iter()
            .map(|m| if *m == 0 { 0 } else { m.trailing_zeros() })
            .collect();
        BlockSymmetry {
            n,
            shifts,
            masks,
            node_automorphisms: node_automorphisms(cg),
        }
    }

    #[inline]
    fn block(&self, x: u64, j: usize) -> u64 {
        (x & self.masks[j]) >> self.shifts[j]
    }

    /// Support pattern of `x` canonicalized under the node automorphisms.
    fn root_key(&self, x: u64) -> u64 {
        let support: Vec<bool> = (0..self.n).map(|j| self.block(x, j) != 0).collect();
        self.node_automorphisms
            .iter()
            .map(|perm| {
                (0..self.n).fold(0u64, |acc, j| acc << 1 | support[perm[j]] as u64)
            })
            .min()
            .unwrap_or(0)
    }
}

/// Permutations `π` of the base nodes with `A_{π(j)} = π(A_j)` and
/// `t_{π(j)} = t_j`. Brute force for up to 8 nodes, identity beyond.
fn node_automorphisms(cg: &ConfusionGraph) -> Vec<Vec<usize>> {
    let n = cg.n();
    let identity: Vec<usize> = (0..n).collect();
    if n > 8 {
        return vec![identity];
    }
    let g = cg.base();
    let t = cg.block_lengths();
    let mut out = Vec::new();
    let mut perm = identity.clone();
    loop {
        let ok = (0..n).all(|j| t.get(perm[j]) == t.get(j))
            && g.edges().all(|(i, j)| g.has_edge(perm[i], perm[j]));
        if ok {
            out.push(perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

struct OrbitSearch<'a> {
    space: &'a SearchSpace,
    symmetry: &'a BlockSymmetry,
    cosets: &'a CosetBound,
    budget: Budget,
    best: AtomicUsize,
    best_set: Mutex<Vec<usize>>,
    nodes: AtomicUsize,
}

impl OrbitSearch<'_> {
    fn tuple(&self, v: usize) -> u64 {
        self.space.original[v] as u64
    }

    fn root_orbits(&self, candidates: &[u64]) -> Vec<Vec<usize>> {
        let mut orbits: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for v in ones(candidates) {
            orbits
                .entry(self.symmetry.root_key(self.tuple(v)))
                .or_default()
                .push(v);
        }
        sort_orbits(orbits.into_values().collect())
    }

    /// Orbits of `p` under the value permutations fixing every block value
    /// used by `chosen`.
    fn orbits(&self, chosen: &[usize], p: &[u64]) -> Vec<Vec<usize>> {
        let sym = self.symmetry;
        let fixed: Vec<Vec<u64>> = (0..sym.n)
            .map(|j| {
                let mut vals: Vec<u64> = chosen.iter().map(|&v| sym.block(self.tuple(v), j)).collect();
                vals.sort_unstable();
                vals.dedup();
                vals
            })
            .collect();
        let mut orbits: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
        for v in ones(p) {
            let x = self.tuple(v);
            let key: Vec<u64> = (0..sym.n)
                .map(|j| {
                    let b = sym.block(x, j);
                    if fixed[j].binary_search(&b).is_ok() {
                        b
                    } else {
                        u64::MAX
                    }
                })
                .collect();
            orbits.entry(key).or_default().push(v);
        }
        sort_orbits(orbits.into_values().collect())
    }

    /// Explores all independent sets containing `chosen` and a member of
    /// `orbit`, drawn from `remaining` (which contains `orbit`).
    fn branch(&self, chosen: &[usize], remaining: &[u64], orbit: &[usize]) -> Result<()> {
        let rep = orbit[0];
        let mut next_chosen = chosen.to_vec();
        next_chosen.push(rep);
        let p: Vec<u64> = remaining
            .iter()
            .zip(self.space.row(rep))
            .map(|(a, b)| a & b)
            .collect();
        self.expand(&next_chosen, &p)
    }

    fn record(&self, set: Vec<usize>) {
        let mut guard = self.best_set.lock().expect("no poisoned lock");
        if set.len() > guard.len() {
            self.best.fetch_max(set.len(), Ordering::Relaxed);
            *guard = set;
        }
    }

    fn expand(&self, chosen: &[usize], p: &[u64]) -> Result<()> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) & 255 == 0 {
            self.budget.check("independence search")?;
        }
        if is_empty(p) {
            if chosen.len() > self.best.load(Ordering::Relaxed) {
                self.record(chosen.to_vec());
            }
            return Ok(());
        }
        let mut plain = CliqueSearch::new(self.space, self.budget, 0);
        plain.shared = Some(&self.best);
        if chosen.len() + plain.color_bound(p) <= self.best.load(Ordering::Relaxed)
            || self.cosets.bound(chosen, p) <= self.best.load(Ordering::Relaxed)
        {
            return Ok(());
        }
        let orbits = self.orbits(chosen, p);
        if orbits.len() == count(p) {
            // No symmetry left: plain branch and bound.
            plain.current = chosen.to_vec();
            plain.best = self.best.load(Ordering::Relaxed);
            let result = plain.expand(p);
            self.nodes.fetch_add(plain.nodes as usize, Ordering::Relaxed);
            if plain.best_set.len() > chosen.len() {
                self.record(plain.best_set);
            }
            return result;
        }
        let mut remaining = p.to_vec();
        for orbit in &orbits {
            let best = self.best.load(Ordering::Relaxed);
            if chosen.len() + plain.color_bound(&remaining) <= best || self.cosets.bound(chosen, &remaining) <= best {
                break;
            }
            self.branch(chosen, &remaining, orbit)?;
            for &v in orbit {
                remaining[v >> 6] &= !(1 << (v & 63));
            }
        }
        Ok(())
    }
}

/// Block subgroups used for the coset bound.
const MAX_COSET_GROUPS: usize = 4;
/// Subsets of blocks are enumerated only for base graphs this small.
const MAX_COSET_NODES: usize = 6;

/// Per-coset capacity bounds for a set of block subgroups `H_B`.
struct CosetBound {
    /// Coset index of every internal vertex, and the capacity of each coset.
    groups: Vec<(Vec<u32>, usize)>,
    coset_counts: Vec<usize>,
}

impl CosetBound {
    fn new(
        cg: &ConfusionGraph,
        space: &SearchSpace,
        limits: &Limits,
        memo: &mut HashMap<Vec<u32>, usize>,
    ) -> Result<Self> {
        let n = cg.n();
        let t = cg.block_lengths().as_slice();
        let active: Vec<usize> = (0..n).filter(|&j| t[j] > 0).collect();
        let mut candidates: Vec<(u64, usize, Vec<u32>)> = Vec::new();
        if n <= MAX_COSET_NODES && active.len() >= 2 {
            for subset in 1..(1u32 << active.len()) - 1 {
                let mut sub = vec![0u32; n];
                for (k, &j) in active.iter().enumerate() {
                    if subset >> k & 1 == 1 {
                        sub[j] = t[j];
                    }
                }
                let alpha = match memo.get(&sub) {
                    Some(&a) => a,
                    None => {
                        let sub_cg = ConfusionGraph::new(cg.base(), &BlockLengths::new(sub.clone()), limits)?;
                        solve_confusion(&sub_cg, limits, memo)?.alpha
                    }
                };
                let bits: u32 = sub.iter().sum();
                if alpha < 1 << bits {
                    candidates.push((alpha as u64, bits as usize, sub));
                }
            }
        }
        // Smallest density alpha / |H| first; ties favour smaller subgroups.
        candidates.sort_by(|a, b| (a.0 << b.1).cmp(&(b.0 << a.1)).then(a.1.cmp(&b.1)));
        let groups: Vec<(Vec<u32>, usize)> = candidates
            .into_iter()
            .take(MAX_COSET_GROUPS)
            .map(|(alpha, _, sub)| {
                let outside = (0..n)
                    .filter(|&j| sub[j] == 0)
                    .fold(0u64, |m, j| m | cg.block_mask(j));
                let mut index: BTreeMap<u64, u32> = BTreeMap::new();
                let ids = space
                    .original
                    .iter()
                    .map(|&x| {
                        let next = index.len() as u32;
                        *index.entry(x as u64 & outside).or_insert(next)
                    })
                    .collect();
                (ids, alpha as usize)
            })
            .collect();
        let coset_counts = groups.iter().map(|(ids, _)| ids.iter().max().map_or(0, |m| *m as usize + 1)).collect();
        Ok(CosetBound { groups, coset_counts })
    }

    /// Upper bound on an independent set inside `chosen ∪ p`.
    fn bound(&self, chosen: &[usize], p: &[u64]) -> usize {
        let mut best = usize::MAX;
        for ((ids, cap), &cosets) in self.groups.iter().zip(&self.coset_counts) {
            let mut counts = vec![0usize; cosets];
            let mut total = 0;
            for v in chosen.iter().copied().chain(ones(p)) {
                let c = &mut counts[ids[v] as usize];
                if *c < *cap {
                    *c += 1;
                    total += 1;
                }
            }
            best = best.min(total);
        }
        best
    }
}

/// Larger orbits first, ties by smallest member.
fn sort_orbits(mut orbits: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for o in &mut orbits {
        o.sort_unstable();
    }
    orbits.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    orbits
}

/// Exact maximum-weight independent set for nonnegative rational weights.
pub fn max_weight_independent_set(
    g: &UndirectedGraph,
    weights: &[Rational],
    limits: &Limits,
) -> Result<(Rational, Vec<usize>)> {
    let n = g.vertex_count();
    if weights.len() != n {
        return Err(Error::LengthMismatch {
            what: "weights",
            expected: n,
            actual: weights.len(),
        });
    }
    if weights.iter().any(|w| w.is_negative()) {
        return Err(Error::invalid("weights must be nonnegative"));
    }
    let scale = weights
        .iter()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let scaled: Vec<BigUint> = weights
        .iter()
        .map(|w| {
            (w.numer() * (&scale / w.denom()))
                .to_biguint()
                .expect("nonnegative")
        })
        .collect();
    match heaviest_independent_set(g, &scaled, None, &limits.budget())? {
        Some((w, set)) => Ok((Rational::new(BigInt::from(w), scale), set)),
        None => Ok((Rational::zero(), Vec::new())),
    }
}

/// Maximum-weight independent set if its weight exceeds `floor` (or is
/// positive when `floor` is `None`); `None` proves no such set exists.
pub(crate) fn heaviest_independent_set(
    g: &UndirectedGraph,
    weights: &[BigUint],
    floor: Option<&BigUint>,
    budget: &Budget,
) -> Result<Option<(BigUint, Vec<usize>)>> {
    check_search_size(g.vertex_count())?;
    let total: BigUint = weights.iter().sum();
    if let Some(total) = total.to_u128() {
        let w: Vec<u128> = weights.iter().map(|x| x.to_u128().expect("fits")).collect();
        let floor = floor.map(|f| f.to_u128().unwrap_or(u128::MAX));
        Ok(weighted_search(g, &w, floor.unwrap_or(0), budget)?
            .filter(|_| total > 0)
            .map(|(best, set)| (BigUint::from(best), set)))
    } else {
        let floor = floor.cloned().unwrap_or_default();
        weighted_search(g, weights, floor, budget)
    }
}

fn weighted_search<W>(
    g: &UndirectedGraph,
    weights: &[W],
    floor: W,
    budget: &Budget,
) -> Result<Option<(W, Vec<usize>)>>
where
    W: Clone + Ord + Zero + Add<Output = W>,
{
    // Zero-weight vertices never improve a set; leave them out and
    // visit heavy vertices first.
    let mut keep: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| !weights[v].is_zero())
        .collect();
    keep.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    if keep.is_empty() {
        return Ok(None);
    }
    let m = keep.len();
    let space = SearchSpace::build(m, &keep, |u, v| u != v && !g.has_edge(u, v));
    let local: Vec<W> = keep.iter().map(|&v| weights[v].clone()).collect();
    let mut search = WeightedSearch {
        space: &space,
        weights: &local,
        budget: *budget,
        best: floor,
        best_set: None,
        current: Vec::new(),
        nodes: 0,
    };
    search.expand(&space.all(), W::zero())?;
    Ok(search.best_set.map(|set| {
        let mut set: Vec<usize> = set.into_iter().map(|v| keep[v]).collect();
        set.sort_unstable();
        (search.best, set)
    }))
}

struct WeightedSearch<'a, W> {
    space: &'a SearchSpace,
    weights: &'a [W],
    budget: Budget,
    best: W,
    best_set: Option<Vec<usize>>,
    current: Vec<usize>,
    nodes: u64,
}

impl<W> WeightedSearch<'_, W>
where
    W: Clone + Ord + Zero + Add<Output = W>,
{
    /// Class partition with cumulative bounds: the sum of the heaviest
    /// member of every class up to and including the vertex's own.
    fn color_sort(&self, p: &[u64]) -> (Vec<usize>, Vec<W>) {
        let mut order = Vec::new();
        let mut bounds = Vec::new();
        let mut uncolored = p.to_vec();
        let mut q = vec![0u64; p.len()];
        let mut cumulative = W::zero();
        while !is_empty(&uncolored) {
            q.copy_from_slice(&uncolored);
            let start = order.len();
            let mut heaviest = W::zero();
            while let Some(v) = first_bit(&q) {
                uncolored[v >> 6] &= !(1 << (v & 63));
                q[v >> 6] &= !(1 << (v & 63));
                for (a, b) in q.iter_mut().zip(self.space.row(v)) {
                    *a &= !b;
                }
                if self.weights[v] > heaviest {
                    heaviest = self.weights[v].clone();
                }
                order.push(v);
            }
            cumulative = cumulative + heaviest;
            bounds.extend(std::iter::repeat_n(cumulative.clone(), order.len() - start));
        }
        (order, bounds)
    }

    fn expand(&mut self, p: &[u64], weight: W) -> Result<()> {
        self.nodes += 1;
        if self.nodes & 1023 == 0 {
            self.budget.check("weighted independence search")?;
        }
        let (order, bounds) = self.color_sort(p);
        let mut p = p.to_vec();
        let mut next = vec![0u64; p.len()];
        for i in (0..order.len()).rev() {
            if weight.clone() + bounds[i].clone() <= self.best {
                return Ok(());
            }
            let v = order[i];
            self.current.push(v);
            let with_v = weight.clone() + self.weights[v].clone();
            for ((n, a), b) in next.iter_mut().zip(&p).zip(self.space.row(v)) {
                *n = a & b;
            }
            if with_v > self.best {
                self.best = with_v.clone();
                self.best_set = Some(self.current.clone());
            }
            if !is_empty(&next) {
                let sub = next.clone();
                self.expand(&sub, with_v)?;
            }
            self.current.pop();
            p[v >> 6] &= !(1 << (v & 63));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{BlockLengths, SideInformationGraph};

    fn three_node_confusion() -> ConfusionGraph {
        let g = SideInformationGraph::from_in_sets(vec![vec![1, 2], vec![0], vec![0, 1]]).unwrap();
        ConfusionGraph::new(&g, &BlockLengths::new(vec![1, 1, 1]), &Limits::default()).unwrap()
    }

    fn cube() -> ConfusionGraph {
        ConfusionGraph::new(
            &SideInformationGraph::complete(3),
            &BlockLengths::new(vec![1, 1, 1]),
            &Limits::default(),
        )
        .unwrap()
    }

    fn brute_alpha(g: &UndirectedGraph) -> usize {
        let n = g.vertex_count();
        (0u32..1 << n)
            .filter(|&mask| {
                let s: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                is_independent(g, &s).unwrap()
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn three_node_alpha_is_two() {
        let limits = Limits::default();
        let cg = three_node_confusion();
        let explicit = cg.to_explicit(&limits).unwrap();
        assert_eq!(brute_alpha(&explicit), 2);
        let cert = max_independent_set(&explicit, &limits).unwrap();
        assert_eq!(cert.alpha, 2);
        assert!(is_independent(&explicit, &cert.witness).unwrap());
        let sym = confusion_independence(&cg, &limits).unwrap();
        assert_eq!(sym.alpha, 2);
        assert!(is_independent(&explicit, &sym.witness).unwrap());
    }

    #[test]
    fn complete_graph_alpha_is_one() {
        for m in 1..6 {
            let cert = max_independent_set(&UndirectedGraph::complete(m), &Limits::default()).unwrap();
            assert_eq!(cert.alpha, 1);
        }
    }

    #[test]
    fn cube_alpha_is_even_weight_code() {
        let limits = Limits::default();
        let cg = cube();
        let cert = confusion_independence(&cg, &limits).unwrap();
        assert_eq!(cert.alpha, 4);
        let explicit = cg.to_explicit(&limits).unwrap();
        let plain = max_independent_set(&explicit, &limits).unwrap();
        assert_eq!(plain.alpha, 4);
        // The only maximum independent sets of Q_3 are the two parity classes.
        let parity = plain.witness[0].count_ones() % 2;
        assert!(plain.witness.iter().all(|v| v.count_ones() % 2 == parity));
    }

    #[test]
    fn independence_checks() {
        let cg = three_node_confusion();
        let g = cg.to_explicit(&Limits::default()).unwrap();
        assert!(is_independent(&g, &[]).unwrap());
        assert!(is_independent(&g, &[3]).unwrap());
        assert!(!is_independent(&g, &[0b000, 0b100]).unwrap());
        assert!(is_independent(&g, &[0b000, 0b111]).unwrap());
        assert!(is_independent(&g, &[8]).is_err());
    }

    #[test]
    fn weighted_examples() {
        let limits = Limits::default();
        let c5 = UndirectedGraph::cycle(5);
        let ones = vec![Rational::one(); 5];
        let (w, set) = max_weight_independent_set(&c5, &ones, &limits).unwrap();
        assert_eq!(w, Rational::from_integer(2.into()));
        assert!(is_independent(&c5, &set).unwrap());

        let mut single = vec![Rational::zero(); 5];
        single[3] = Rational::new(3.into(), 7.into());
        let (w, set) = max_weight_independent_set(&c5, &single, &limits).unwrap();
        assert_eq!(w, single[3]);
        assert_eq!(set, vec![3]);

        let cube = cube().to_explicit(&limits).unwrap();
        let (w, _) = max_weight_independent_set(&cube, &vec![Rational::one(); 8], &limits).unwrap();
        assert_eq!(w, Rational::from_integer(4.into()));
    }

    #[test]
    fn timeout_is_reported_as_incomplete() {
        let limits = Limits {
            timeout: Some(std::time::Duration::ZERO),
            ..Limits::default()
        };
        let g = UndirectedGraph::random(120, 0.1, 5);
        assert!(matches!(
            max_independent_set(&g, &limits),
            Err(Error::Incomplete(_))
        ));
    }

    #[test]
    fn node_automorphisms_of_cycle() {
        let cg = ConfusionGraph::new(
            &SideInformationGraph::bidirected_cycle(5),
            &BlockLengths::uniform(5, 1),
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(node_automorphisms(&cg).len(), 10);
    }
}
