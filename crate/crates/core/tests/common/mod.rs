//! Brute-force oracles and generators shared by the integration tests.
#![allow(dead_code)]

use confdual::graph::{BlockLengths, SideInformationGraph, UndirectedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Adjacency rows as bit masks; at most 64 vertices.
pub fn masks(g: &UndirectedGraph) -> Vec<u64> {
    let n = g.vertex_count();
    assert!(n <= 64);
    (0..n)
        .map(|u| (0..n).filter(|&v| g.has_edge(u, v)).fold(0, |m, v| m | 1 << v))
        .collect()
}

/// `α` by enumerating every vertex subset (at most 24 vertices).
pub fn brute_alpha(g: &UndirectedGraph) -> usize {
    let n = g.vertex_count();
    assert!(n <= 24);
    let adj = masks(g);
    // independent[s] for s built from s without its top bit.
    let mut independent = vec![false; 1 << n];
    independent[0] = true;
    let mut best = 0;
    for s in 1usize..1 << n {
        let top = usize::BITS - 1 - s.leading_zeros();
        let rest = s & !(1 << top);
        independent[s] = independent[rest] && adj[top as usize] & rest as u64 == 0;
        if independent[s] {
            best = best.max(s.count_ones() as usize);
        }
    }
    best
}

/// Direct confusability: some node `j` sees identical blocks in `A_j` but
/// a different block at `j`.
pub fn confusable_by_definition(g: &SideInformationGraph, x: &[u64], z: &[u64]) -> bool {
    (0..g.n()).any(|j| x[j] != z[j] && g.in_set(j).iter().all(|&i| x[i] == z[i]))
}

pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize) -> SideInformationGraph {
    let p = rng.gen_range(0.2..0.9);
    SideInformationGraph::random(n, p, rng.gen())
}

pub fn random_undirected(rng: &mut ChaCha8Rng, max_n: usize) -> UndirectedGraph {
    let n = rng.gen_range(1..=max_n);
    let p = rng.gen_range(0.1..0.9);
    UndirectedGraph::random(n, p, rng.gen())
}

/// Block lengths with `t_j ≥ 1` and `Σt` in `lo..=hi`.
pub fn random_t(rng: &mut ChaCha8Rng, n: usize, lo: u32, hi: u32) -> BlockLengths {
    let total = rng.gen_range(lo.max(n as u32)..=hi);
    let mut t = vec![1u32; n];
    for _ in n as u32..total {
        t[rng.gen_range(0..n)] += 1;
    }
    BlockLengths::new(t)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest winning set over all guessing strategies at `t = (1,...,1)`,
/// enumerating every combination of guess tables from the definitions.
pub fn brute_force_max_win(g: &SideInformationGraph) -> usize {
    let n = g.n();
    let widths: Vec<usize> = (0..n).map(|j| g.in_set(j).len()).collect();
    let table_bits: usize = widths.iter().map(|&w| 1 << w).sum();
    assert!(table_bits <= 20, "too many strategies");
    let tuples: Vec<Vec<u64>> = (0..1u64 << n).map(|x| (0..n).map(|j| x >> j & 1).collect()).collect();
    // observation[x][j]: index of what player j sees in tuple x.
    let observation: Vec<Vec<usize>> = tuples
        .iter()
        .map(|x| {
            (0..n)
                .map(|j| g.in_set(j).iter().enumerate().fold(0, |acc, (k, &i)| acc | (x[i] as usize) << k))
                .collect()
        })
        .collect();
    let offsets: Vec<usize> = widths
        .iter()
        .scan(0, |acc, &w| {
            let start = *acc;
            *acc += 1 << w;
            Some(start)
        })
        .collect();
    (0..1u64 << table_bits)
        .map(|tables| {
            tuples
                .iter()
                .zip(&observation)
                .filter(|(x, obs)| (0..n).all(|j| tables >> (offsets[j] + obs[j]) & 1 == x[j]))
                .count()
        })
        .max()
        .unwrap()
}
