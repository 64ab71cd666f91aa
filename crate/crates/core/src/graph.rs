//! Directed side-information graphs, explicit undirected graphs and the
//! disjunctive product.
//!
//! Nodes are 0-indexed in memory. The text format and every user-facing
//! rendering use 1-indexed nodes.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::limits::Limits;

/// A directed graph on `n` nodes where an edge `i -> j` means node `j`
/// observes node `i`. `in_sets[j]` is the sorted in-neighborhood of `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SideInformationGraph {
    in_sets: Vec<Vec<usize>>,
}

impl SideInformationGraph {
    /// Graph with `n` nodes and no edges.
    pub fn edgeless(n: usize) -> Self {
        SideInformationGraph {
            in_sets: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from 0-indexed directed edges `(from, to)`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::edgeless(n);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    /// Builds a graph from 0-indexed in-neighborhoods.
    pub fn from_in_sets(in_sets: Vec<Vec<usize>>) -> Result<Self> {
        let n = in_sets.len();
        let mut g = Self::edgeless(n);
        for (j, set) in in_sets.into_iter().enumerate() {
            for i in set {
                g.add_edge(i, j)?;
            }
        }
        Ok(g)
    }

    /// Every ordered pair is an edge.
    pub fn complete(n: usize) -> Self {
        SideInformationGraph {
            in_sets: (0..n)
                .map(|j| (0..n).filter(|&i| i != j).collect())
                .collect(),
        }
    }

    /// The bidirected cycle `1 - 2 - ... - n - 1`.
    pub fn bidirected_cycle(n: usize) -> Self {
        let mut g = Self::edgeless(n);
        for j in 0..n {
            let next = (j + 1) % n;
            if next != j {
                g.add_edge(j, next).expect("cycle edges are valid");
                g.add_edge(next, j).expect("cycle edges are valid");
            }
        }
        g
    }

    /// Each ordered pair `(i, j)`, `i != j`, is an edge independently with
    /// probability `p`. The same seed always yields the same graph.
    pub fn random(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = p.clamp(0.0, 1.0);
        let mut g = Self::edgeless(n);
        for j in 0..n {
            for i in 0..n {
                if i != j && rng.gen_bool(p) {
                    g.in_sets[j].push(i);
                }
            }
        }
        g
    }

    /// Inserts edge `i -> j`. Duplicates are ignored.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        let n = self.n();
        if i >= n || j >= n {
            return Err(Error::invalid(format!(
                "edge {} -> {} out of range for n = {n}",
                i + 1,
                j + 1
            )));
        }
        if i == j {
            return Err(Error::invalid(format!("self-loop at node {}", i + 1)));
        }
        if let Err(pos) = self.in_sets[j].binary_search(&i) {
            self.in_sets[j].insert(pos, i);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.in_sets.len()
    }

    /// In-neighborhood `A_j`, sorted ascending.
    pub fn in_set(&self, j: usize) -> &[usize] {
        &self.in_sets[j]
    }

    pub fn in_sets(&self) -> &[Vec<usize>] {
        &self.in_sets
    }

    pub fn edge_count(&self) -> usize {
        self.in_sets.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.in_sets[j].binary_search(&i).is_ok()
    }

    /// Directed edges `(from, to)` ordered by receiver then sender.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.in_sets
            .iter()
            .enumerate()
            .flat_map(|(j, set)| set.iter().map(move |&i| (i, j)))
    }

    /// Parses the line-oriented graph format:
    ///
    /// ```text
    /// # comment
    /// n 3
    /// e 2 1
    /// ```
    ///
    /// `e i j` declares the edge `i -> j` with 1-indexed nodes.
    pub fn parse(text: &str) -> Result<Self> {
        let mut graph: Option<SideInformationGraph> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r').trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "n" => {
                    if graph.is_some() {
                        return Err(err("duplicate `n` line".into()));
                    }
                    if fields.len() != 2 {
                        return Err(err("expected `n <count>`".into()));
                    }
                    let n: usize = fields[1]
                        .parse()
                        .map_err(|_| err(format!("bad node count {:?}", fields[1])))?;
                    if n == 0 {
                        return Err(err("node count must be positive".into()));
                    }
                    graph = Some(Self::edgeless(n));
                }
                "e" => {
                    let g = graph
                        .as_mut()
                        .ok_or_else(|| err("edge before `n` line".into()))?;
                    if fields.len() != 3 {
                        return Err(err("expected `e <i> <j>`".into()));
                    }
                    let mut ends = [0usize; 2];
                    for (k, f) in fields[1..].iter().enumerate() {
                        let v: usize = f
                            .parse()
                            .map_err(|_| err(format!("bad node index {f:?}")))?;
                        if v == 0 || v > g.n() {
                            return Err(err(format!("node index {v} out of range 1..={}", g.n())));
                        }
                        ends[k] = v - 1;
                    }
                    if ends[0] == ends[1] {
                        return Err(err(format!("self-loop at node {}", ends[0] + 1)));
                    }
                    g.add_edge(ends[0], ends[1]).map_err(|e| err(e.to_string()))?;
                }
                other => return Err(err(format!("unknown directive {other:?}"))),
            }
        }
        graph.ok_or(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing `n` line".into(),
        })
    }

    /// Renders the graph in the text format accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n());
        for (i, j) in self.edges() {
            writeln!(out, "e {} {}", i + 1, j + 1).unwrap();
        }
        out
    }
}

/// A simple undirected graph stored as bit-set adjacency rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    rows: Vec<BitSet>,
}

impl UndirectedGraph {
    pub fn edgeless(n: usize) -> Self {
        UndirectedGraph {
            rows: vec![BitSet::new(n); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::edgeless(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::edgeless(n);
        if n >= 3 {
            for u in 0..n {
                g.add_edge(u, (u + 1) % n);
            }
        } else if n == 2 {
            g.add_edge(0, 1);
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::edgeless(n);
        for (u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::invalid(format!("bad undirected edge ({u}, {v})")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// G(n, p) with a seeded generator.
    pub fn random(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = p.clamp(0.0, 1.0);
        let mut g = Self::edgeless(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub(crate) fn from_rows(rows: Vec<BitSet>) -> Self {
        UndirectedGraph { rows }
    }

    /// Adds `u ~ v`; loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.rows[u].insert(v);
            self.rows[v].insert(u);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &BitSet {
        &self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn complement(&self) -> Self {
        let n = self.vertex_count();
        let rows = (0..n)
            .map(|u| {
                let mut row = BitSet::full(n);
                row.difference_with(&self.rows[u]);
                row.remove(u);
                row
            })
            .collect();
        UndirectedGraph { rows }
    }

    /// Disjunctive (co-normal) product: `(u1, u2) ~ (v1, v2)` iff `u1 ~ v1`
    /// or `u2 ~ v2`. Pair `(u1, u2)` becomes vertex `u1 * |V(other)| + u2`.
    pub fn disjunctive_product(&self, other: &Self, limits: &Limits) -> Result<Self> {
        let (n1, n2) = (self.vertex_count(), other.vertex_count());
        if n1 == 0 || n2 == 0 {
            return Err(Error::invalid("disjunctive product of an empty graph"));
        }
        let n = (n1 as u64) * (n2 as u64);
        limits.check_explicit(n)?;
        let n = n as usize;
        let mut rows = vec![BitSet::new(n); n];
        for u1 in 0..n1 {
            for u2 in 0..n2 {
                let row = &mut rows[u1 * n2 + u2];
                for v1 in 0..n1 {
                    let first = self.has_edge(u1, v1);
                    for v2 in 0..n2 {
                        if first || other.has_edge(u2, v2) {
                            row.insert(v1 * n2 + v2);
                        }
                    }
                }
            }
        }
        Ok(UndirectedGraph { rows })
    }

    /// Lexicographic product with the complete graph `K_b` (each vertex
    /// blown up into a `b`-clique). Proper colorings of the result are
    /// exactly the `b`-fold colorings of `self`.
    pub fn blow_up(&self, b: usize) -> Self {
        let n = self.vertex_count();
        let mut g = Self::edgeless(n * b);
        for u in 0..n {
            for i in 0..b {
                for j in i + 1..b {
                    g.add_edge(u * b + i, u * b + j);
                }
            }
        }
        for (u, v) in self.edges() {
            for i in 0..b {
                for j in 0..b {
                    g.add_edge(u * b + i, v * b + j);
                }
            }
        }
        g
    }

    /// Text dump: `n <count>` followed by `u <a> <b>` lines, 1-indexed.
    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.vertex_count());
        for (u, v) in self.edges() {
            writeln!(out, "u {} {}", u + 1, v + 1).unwrap();
        }
        out
    }
}

/// Bits per node, `t = (t_1, ..., t_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlockLengths(Vec<u32>);

impl BlockLengths {
    pub fn new(t: Vec<u32>) -> Self {
        BlockLengths(t)
    }

    /// `t = (value, ..., value)` of length `n`.
    pub fn uniform(n: usize, value: u32) -> Self {
        BlockLengths(vec![value; n])
    }

    /// Parses `"1,2,0"`.
    pub fn parse(text: &str) -> Result<Self> {
        text.split(',')
            .map(|f| {
                f.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::invalid(format!("bad block length {f:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(BlockLengths)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    /// Checks `len == n` and the total-bit cap.
    pub fn validate(&self, n: usize, limits: &Limits) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::LengthMismatch {
                what: "block lengths",
                expected: n,
                actual: self.0.len(),
            });
        }
        limits.check_bits(self.total())
    }

    /// `self <= other` componentwise.
    pub fn le(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// All `s` with `0 <= s <= self` componentwise, in lexicographic order.
    pub fn below(&self) -> Vec<BlockLengths> {
        let mut out = vec![Vec::with_capacity(self.0.len())];
        for &m in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=m).map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(BlockLengths).collect()
    }
}

impl std::fmt::Display for BlockLengths {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE_NODE: &str = "n 3\ne 2 1\ne 3 1\ne 1 2\ne 1 3\ne 2 3\n";

    #[test]
    fn parses_three_node_example() {
        let g = SideInformationGraph::parse(THREE_NODE).unwrap();
        assert_eq!(g.in_set(0), &[1, 2]);
        assert_eq!(g.in_set(1), &[0]);
        assert_eq!(g.in_set(2), &[0, 1]);
    }

    #[test]
    fn parses_single_node() {
        let g = SideInformationGraph::parse("n 1").unwrap();
        assert_eq!(g.n(), 1);
        assert!(g.in_set(0).is_empty());
    }

    #[test]
    fn rejects_self_loop_with_line_number() {
        let err = SideInformationGraph::parse("n 2\ne 1 1").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn parse_errors() {
        for (text, line) in [
            ("e 1 2\nn 2", 1),
            ("n 2\ne 1 3", 2),
            ("# c\nn 2\ne 1", 3),
            ("n 2\nx 1 2", 2),
            ("n two", 1),
            ("", 1),
        ] {
            match SideInformationGraph::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn tolerates_crlf_comments_and_duplicates() {
        let g = SideInformationGraph::parse("# hi\r\nn 2\r\ne 1 2\r\ne 1 2\r\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn text_round_trip() {
        let g = SideInformationGraph::parse(THREE_NODE).unwrap();
        assert_eq!(SideInformationGraph::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn random_digraph_extremes_and_determinism() {
        assert_eq!(SideInformationGraph::random(3, 0.0, 11).edge_count(), 0);
        assert_eq!(
            SideInformationGraph::random(3, 1.0, 11),
            SideInformationGraph::complete(3)
        );
        assert_eq!(
            SideInformationGraph::random(5, 0.5, 7),
            SideInformationGraph::random(5, 0.5, 7)
        );
    }

    #[test]
    fn product_of_k2_is_k4() {
        let k2 = UndirectedGraph::complete(2);
        let p = k2.disjunctive_product(&k2, &Limits::default()).unwrap();
        assert_eq!(p, UndirectedGraph::complete(4));
    }

    #[test]
    fn product_of_edgeless_is_edgeless() {
        let e = UndirectedGraph::edgeless(2);
        let p = e.disjunctive_product(&e, &Limits::default()).unwrap();
        assert_eq!(p.vertex_count(), 4);
        assert_eq!(p.edge_count(), 0);
    }

    #[test]
    fn product_respects_cap() {
        let limits = Limits {
            max_explicit_vertices: 9,
            ..Limits::default()
        };
        let g = UndirectedGraph::cycle(5);
        assert!(matches!(
            g.disjunctive_product(&UndirectedGraph::complete(2), &limits),
            Err(Error::CapExceeded { .. })
        ));
    }

    /// Non-edges of the product are pairs of non-edges (or equal vertices)
    /// in both coordinates: `N^2 - 2|E| - n = (n1^2 - 2|E1|)(n2^2 - 2|E2|) - n`.
    #[test]
    fn product_edge_count_formula() {
        let limits = Limits::default();
        for seed in 0..40 {
            let n1 = 1 + seed as usize % 6;
            let n2 = 1 + (seed as usize * 7 + 3) % 6;
            let g1 = UndirectedGraph::random(n1, 0.4, seed);
            let g2 = UndirectedGraph::random(n2, 0.6, seed + 100);
            let p = g1.disjunctive_product(&g2, &limits).unwrap();
            let (e1, e2) = (g1.edge_count() as i64, g2.edge_count() as i64);
            let (a, b) = (n1 as i64, n2 as i64);
            let non_adj = (a * a - 2 * e1) * (b * b - 2 * e2);
            let expected = (a * a * b * b - non_adj) / 2;
            assert_eq!(p.edge_count() as i64, expected);
        }
    }

    #[test]
    fn product_commutes_up_to_coordinate_swap() {
        let limits = Limits::default();
        let g1 = UndirectedGraph::random(4, 0.5, 3);
        let g2 = UndirectedGraph::random(3, 0.5, 4);
        let p = g1.disjunctive_product(&g2, &limits).unwrap();
        let q = g2.disjunctive_product(&g1, &limits).unwrap();
        let swap = |v: usize| (v % 3) * 4 + v / 3;
        for (u, v) in p.edges() {
            assert!(q.has_edge(swap(u), swap(v)));
        }
        assert_eq!(p.edge_count(), q.edge_count());
    }

    #[test]
    fn block_lengths_enumeration() {
        let t = BlockLengths::new(vec![1, 0, 2]);
        let all = t.below();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0].as_slice(), &[0, 0, 0]);
        assert_eq!(all[5].as_slice(), &[1, 0, 2]);
        assert!(all.iter().all(|s| s.le(&t)));
    }
}
