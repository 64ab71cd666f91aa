//! Fractional chromatic number by column generation, exact chromatic
//! number, and b-fold coloring bounds.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::confusion::ConfusionGraph;
use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;
use crate::independence::{confusion_independence, heaviest_independent_set, is_independent};
use crate::limits::{Budget, Limits};
use crate::lp::{certify_basis, FloatPackingLp, PackingLp};
use crate::Rational;

/// A fractional cover of the vertices by weighted independent sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalColoring {
    pub columns: Vec<(Vec<usize>, Rational)>,
    pub value: Rational,
}

impl FractionalColoring {
    /// Every column independent, positive weight, and every vertex covered
    /// with total weight at least 1.
    pub fn is_feasible(&self, g: &UndirectedGraph) -> bool {
        let mut cover = vec![Rational::zero(); g.vertex_count()];
        for (set, w) in &self.columns {
            if !w.is_positive() || !is_independent(g, set).unwrap_or(false) {
                return false;
            }
            for &v in set {
                cover[v] += w;
            }
        }
        let total: Rational = self.columns.iter().map(|(_, w)| w).sum();
        total == self.value && cover.iter().all(|c| *c >= Rational::one())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChromaticResult {
    pub chi_f: Rational,
    pub coloring: FractionalColoring,
    /// Vertex weights with `Σ = chi_f` and weight at most 1 on every
    /// independent set.
    pub optimality_proof: Vec<Rational>,
    pub pricing_rounds: usize,
    pub pivots: u64,
}

impl ChromaticResult {
    /// Re-checks both certificates exactly; dual feasibility is checked
    /// with an independent maximum-weight search.
    pub fn verify(&self, g: &UndirectedGraph, limits: &Limits) -> Result<bool> {
        if !self.coloring.is_feasible(g) || self.coloring.value != self.chi_f {
            return Ok(false);
        }
        if self.optimality_proof.iter().any(|y| y.is_negative()) || self.optimality_proof.iter().sum::<Rational>() != self.chi_f {
            return Ok(false);
        }
        let (heaviest, _) = crate::independence::max_weight_independent_set(g, &self.optimality_proof, limits)?;
        Ok(heaviest <= Rational::one())
    }
}

/// Improving columns added per pricing round.
const COLUMNS_PER_ROUND: usize = 8;
/// Floating-point pivots allowed per restricted solve before falling back
/// to exact arithmetic.
const FLOAT_PIVOT_LIMIT: u64 = 200_000;
/// Pivot budget for a warm-started solve over `rows` pool columns.
fn incremental_limit(rows: usize) -> u64 {
    1000 + 20 * rows as u64
}
/// Fixed-point scale for pricing floating-point weights.
const FLOAT_SCALE: f64 = (1u64 << 40) as f64;

/// Exact `χ_f` with primal and dual certificates.
///
/// The restricted LP starts from the greedy color classes (each extended to
/// a maximal independent set). Each round prices the vertex weights of the
/// current optimum with a maximum-weight independent set; sets of weight
/// above 1 enter the pool. Rounds run in floating point until pricing comes
/// up empty; the final basis is then solved and priced exactly, and a
/// failed certification continues in exact arithmetic.
pub fn fractional_chromatic_lp(g: &UndirectedGraph, limits: &Limits) -> Result<ChromaticResult> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    if n > limits.max_lp_vertices {
        return Err(Error::cap("LP vertex count", limits.max_lp_vertices as u64, n as u64));
    }
    let budget = limits.budget();
    let mut pool: Vec<Vec<usize>> = greedy_classes(g)
        .into_iter()
        .map(|class| extend_to_maximal(g, class))
        .collect();
    let mut float = FloatPackingLp::new(n);
    for set in &pool {
        float.add_row(set);
    }
    let mut rounds = 0;
    let mut pivots = 0;
    let certified = loop {
        budget.check("fractional chromatic LP")?;
        rounds += 1;
        if float.solve(incremental_limit(pool.len())).is_none() {
            // Warm starts after new rows can stall in the dual phase, where
            // a cold primal solve of the same pool is quick.
            pivots += float.pivots();
            float = FloatPackingLp::new(n);
            for set in &pool {
                float.add_row(set);
            }
        }
        if float.solve(FLOAT_PIVOT_LIMIT) != Some(true) {
            break None;
        }
        let threshold = BigUint::from((FLOAT_SCALE * (1.0 + 1e-4)) as u128);
        let found = add_improving_sets(g, &mut to_fixed(&float.solution()), &threshold, &budget, &mut pool, |s| float.add_row(s))?;
        if found > 0 {
            continue;
        }
        let Some((y, x)) = certify_basis(n, &pool, &float.basis()) else {
            break None;
        };
        let (mut weights, threshold) = scale_to_integers(&y);
        let found = add_improving_sets(g, &mut weights, &threshold, &budget, &mut pool, |s| float.add_row(s))?;
        if found == 0 {
            break Some((y, x));
        }
    };
    pivots += float.pivots();
    let (y, x) = match certified {
        Some(yx) => yx,
        None => {
            let mut lp = PackingLp::new(n);
            for set in &pool {
                lp.add_row(set);
            }
            loop {
                budget.check("fractional chromatic LP")?;
                rounds += 1;
                let bounded = lp.solve();
                debug_assert!(bounded, "every vertex lies in some pool column");
                let (mut weights, threshold) = scale_to_integers(&lp.solution());
                if add_improving_sets(g, &mut weights, &threshold, &budget, &mut pool, |s| lp.add_row(s))? == 0 {
                    break;
                }
            }
            pivots += lp.pivots();
            (lp.solution(), lp.row_duals())
        }
    };
    let chi_f: Rational = y.iter().sum();
    let columns: Vec<(Vec<usize>, Rational)> = pool
        .into_iter()
        .zip(x)
        .filter(|(_, w)| w.is_positive())
        .collect();
    debug_assert_eq!(columns.iter().map(|(_, w)| w).sum::<Rational>(), chi_f);
    Ok(ChromaticResult {
        coloring: FractionalColoring {
            columns,
            value: chi_f.clone(),
        },
        chi_f,
        optimality_proof: y,
        pricing_rounds: rounds,
        pivots,
    })
}

/// Adds up to [`COLUMNS_PER_ROUND`] independent sets heavier than
/// `threshold`, each priced with the vertices of the previous ones zeroed.
/// The first search sees the true weights, so a zero count proves that no
/// improving set exists.
fn add_improving_sets(
    g: &UndirectedGraph,
    weights: &mut [BigUint],
    threshold: &BigUint,
    budget: &Budget,
    pool: &mut Vec<Vec<usize>>,
    mut add_row: impl FnMut(&[usize]),
) -> Result<usize> {
    let mut added = 0;
    while added < COLUMNS_PER_ROUND {
        let Some((_, set)) = heaviest_independent_set(g, weights, Some(threshold), budget)? else {
            break;
        };
        for &v in &set {
            weights[v] = BigUint::zero();
        }
        let set = extend_to_maximal(g, set);
        add_row(&set);
        pool.push(set);
        added += 1;
    }
    Ok(added)
}

fn to_fixed(y: &[f64]) -> Vec<BigUint> {
    y.iter()
        .map(|&v| BigUint::from((v.max(0.0) * FLOAT_SCALE).round() as u128))
        .collect()
}

/// Integer weights proportional to `y`, with the scale factor.
fn scale_to_integers(y: &[Rational]) -> (Vec<BigUint>, BigUint) {
    let scale = y
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let weights = y
        .iter()
        .map(|v| {
            (v.numer() * (&scale / v.denom()))
                .to_biguint()
                .expect("primal values are nonnegative")
        })
        .collect();
    (weights, scale.to_biguint().expect("positive scale"))
}

/// `χ_f = |V| / α` for a (vertex-transitive) confusion graph.
pub fn fractional_chromatic_transitive(cg: &ConfusionGraph, limits: &Limits) -> Result<Rational> {
    let alpha = confusion_independence(cg, limits)?.alpha;
    Ok(Rational::new(
        BigInt::from(cg.vertex_count()),
        BigInt::from(alpha),
    ))
}

/// Sequential first-fit classes in vertex order.
fn greedy_classes(g: &UndirectedGraph) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..g.vertex_count() {
        match classes
            .iter_mut()
            .find(|c| c.iter().all(|&u| !g.has_edge(u, v)))
        {
            Some(c) => c.push(v),
            None => classes.push(vec![v]),
        }
    }
    classes
}

fn extend_to_maximal(g: &UndirectedGraph, mut set: Vec<usize>) -> Vec<usize> {
    for v in 0..g.vertex_count() {
        if !set.contains(&v) && set.iter().all(|&u| !g.has_edge(u, v)) {
            set.push(v);
        }
    }
    set.sort_unstable();
    set
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coloring {
    /// Color of each vertex, `0..count`.
    pub colors: Vec<usize>,
    pub count: usize,
}

impl Coloring {
    pub fn is_proper(&self, g: &UndirectedGraph) -> bool {
        self.colors.len() == g.vertex_count()
            && self.colors.iter().all(|&c| c < self.count)
            && g.edges().all(|(u, v)| self.colors[u] != self.colors[v])
    }
}

/// Exact chromatic number with an optimal coloring (DSATUR branch and
/// bound).
pub fn chromatic_number(g: &UndirectedGraph, limits: &Limits) -> Result<Coloring> {
    chromatic_number_with_bound(g, 1, limits)
}

/// As [`chromatic_number`], stopping as soon as a coloring meets
/// `lower_bound` (which must be a valid lower bound on `χ`).
pub fn chromatic_number_with_bound(
    g: &UndirectedGraph,
    lower_bound: usize,
    limits: &Limits,
) -> Result<Coloring> {
    let n = g.vertex_count();
    if n > limits.max_coloring_vertices {
        return Err(Error::cap(
            "coloring vertex count",
            limits.max_coloring_vertices as u64,
            n as u64,
        ));
    }
    if n == 0 {
        return Ok(Coloring {
            colors: Vec::new(),
            count: 0,
        });
    }
    let initial = dsatur_greedy(g);
    let lower = lower_bound.max(greedy_clique(g).len());
    if initial.count <= lower {
        return Ok(initial);
    }
    let mut search = ColoringSearch {
        g,
        budget: limits.budget(),
        lower,
        best: initial,
        colors: vec![usize::MAX; n],
        nodes: 0,
    };
    let mut forbidden = vec![vec![0u32; 0]; n];
    for f in &mut forbidden {
        *f = vec![0; search.best.count];
    }
    search.branch(0, 0, &mut forbidden)?;
    Ok(search.best)
}

/// DSATUR heuristic: always color the most saturated vertex next.
fn dsatur_greedy(g: &UndirectedGraph) -> Coloring {
    let n = g.vertex_count();
    let mut colors = vec![usize::MAX; n];
    let mut count = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| colors[v] == usize::MAX)
            .max_by_key(|&v| {
                let mut seen: Vec<usize> = g.neighbors(v).iter().map(|u| colors[u]).filter(|&c| c != usize::MAX).collect();
                seen.sort_unstable();
                seen.dedup();
                (seen.len(), g.degree(v), std::cmp::Reverse(v))
            })
            .expect("uncolored vertex");
        let c = (0..)
            .find(|&c| g.neighbors(v).iter().all(|u| colors[u] != c))
            .expect("some color is free");
        colors[v] = c;
        count = count.max(c + 1);
    }
    Coloring { colors, count }
}

fn greedy_clique(g: &UndirectedGraph) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    for start in 0..g.vertex_count().min(64) {
        let mut clique = vec![start];
        let mut cand: Vec<usize> = g.neighbors(start).iter().collect();
        while !cand.is_empty() {
            let v = *cand
                .iter()
                .max_by_key(|&&v| (cand.iter().filter(|&&u| g.has_edge(u, v)).count(), std::cmp::Reverse(v)))
                .expect("nonempty");
            clique.push(v);
            cand.retain(|&u| u != v && g.has_edge(u, v));
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

struct ColoringSearch<'a> {
    g: &'a UndirectedGraph,
    budget: Budget,
    lower: usize,
    best: Coloring,
    colors: Vec<usize>,
    nodes: u64,
}

impl ColoringSearch<'_> {
    /// `forbidden[v][c]` counts colored neighbors of `v` with color `c`.
    fn branch(&mut self, colored: usize, used: usize, forbidden: &mut [Vec<u32>]) -> Result<bool> {
        self.nodes += 1;
        if self.nodes & 1023 == 0 {
            self.budget.check("chromatic number search")?;
        }
        let n = self.g.vertex_count();
        if colored == n {
            self.best = Coloring {
                colors: self.colors.clone(),
                count: used,
            };
            return Ok(self.best.count <= self.lower);
        }
        let limit = self.best.count;
        // Most saturated uncolored vertex; ties by degree then index.
        let v = (0..n)
            .filter(|&v| self.colors[v] == usize::MAX)
            .max_by_key(|&v| {
                let sat = forbidden[v][..used].iter().filter(|&&k| k > 0).count();
                (sat, self.g.degree(v), std::cmp::Reverse(v))
            })
            .expect("uncolored vertex remains");
        let options = (used + 1).min(limit - 1);
        for c in 0..options {
            if c < used && forbidden[v][c] > 0 {
                continue;
            }
            if c.max(used.saturating_sub(1)) + 1 >= self.best.count {
                break;
            }
            self.colors[v] = c;
            for u in self.g.neighbors(v).iter() {
                forbidden[u][c] += 1;
            }
            let done = self.branch(colored + 1, used.max(c + 1), forbidden)?;
            for u in self.g.neighbors(v).iter() {
                forbidden[u][c] -= 1;
            }
            self.colors[v] = usize::MAX;
            if done {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Upper bound on the b-fold chromatic number `χ^(b)`: exact on graphs
/// with at most 32 vertices (a proper coloring of the graph with every
/// vertex blown up into a `b`-clique), DSATUR otherwise.
pub fn b_fold_chromatic_upper(g: &UndirectedGraph, b: usize, limits: &Limits) -> Result<usize> {
    if b == 0 {
        return Err(Error::invalid("b must be positive"));
    }
    let blown = g.blow_up(b);
    if g.vertex_count() <= 32 {
        let relaxed = Limits {
            max_coloring_vertices: limits.max_coloring_vertices.max(blown.vertex_count()),
            ..limits.clone()
        };
        let lower = if b == 1 { 1 } else { b * greedy_clique(g).len() };
        Ok(chromatic_number_with_bound(&blown, lower, &relaxed)?.count)
    } else {
        Ok(dsatur_greedy(&blown).count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{BlockLengths, SideInformationGraph};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn three_node_confusion() -> ConfusionGraph {
        let g = SideInformationGraph::from_in_sets(vec![vec![1, 2], vec![0], vec![0, 1]]).unwrap();
        ConfusionGraph::new(&g, &BlockLengths::new(vec![1, 1, 1]), &Limits::default()).unwrap()
    }

    /// All independent sets of a small graph.
    fn independent_sets(g: &UndirectedGraph) -> Vec<Vec<usize>> {
        let n = g.vertex_count();
        (1u32..1 << n)
            .map(|m| (0..n).filter(|&v| m >> v & 1 == 1).collect::<Vec<_>>())
            .filter(|s| is_independent(g, s).unwrap())
            .collect()
    }

    #[test]
    fn five_cycle_against_full_lp() {
        let limits = Limits::default();
        let c5 = UndirectedGraph::cycle(5);
        let res = fractional_chromatic_lp(&c5, &limits).unwrap();
        assert_eq!(res.chi_f, r(5, 2));
        assert!(res.verify(&c5, &limits).unwrap());
        // Oracle: the LP over every independent set at once.
        let mut full = PackingLp::new(5);
        for s in independent_sets(&c5) {
            full.add_row(&s);
        }
        assert!(full.solve());
        assert_eq!(full.value(), r(5, 2));
    }

    #[test]
    fn complete_graphs() {
        let limits = Limits::default();
        for m in 1..6 {
            let k = UndirectedGraph::complete(m);
            let res = fractional_chromatic_lp(&k, &limits).unwrap();
            assert_eq!(res.chi_f, r(m as i64, 1));
            assert_eq!(chromatic_number(&k, &limits).unwrap().count, m);
            assert_eq!(b_fold_chromatic_upper(&k, 2, &limits).unwrap(), 2 * m);
        }
    }

    #[test]
    fn three_node_confusion_graph_values() {
        let limits = Limits::default();
        let cg = three_node_confusion();
        let g = cg.to_explicit(&limits).unwrap();
        let res = fractional_chromatic_lp(&g, &limits).unwrap();
        assert_eq!(res.chi_f, r(4, 1));
        assert!(res.verify(&g, &limits).unwrap());
        assert_eq!(fractional_chromatic_transitive(&cg, &limits).unwrap(), r(4, 1));
        let coloring = chromatic_number(&g, &limits).unwrap();
        assert_eq!(coloring.count, 4);
        assert!(coloring.is_proper(&g));
    }

    #[test]
    fn transitive_shortcut_small_cases() {
        let limits = Limits::default();
        let cube = ConfusionGraph::new(
            &SideInformationGraph::complete(3),
            &BlockLengths::uniform(3, 1),
            &limits,
        )
        .unwrap();
        assert_eq!(fractional_chromatic_transitive(&cube, &limits).unwrap(), r(2, 1));
        let k2 = ConfusionGraph::new(&SideInformationGraph::edgeless(1), &BlockLengths::uniform(1, 1), &limits)
            .unwrap();
        assert_eq!(fractional_chromatic_transitive(&k2, &limits).unwrap(), r(2, 1));
    }

    #[test]
    fn chromatic_number_of_odd_cycle() {
        let limits = Limits::default();
        let c5 = UndirectedGraph::cycle(5);
        let col = chromatic_number(&c5, &limits).unwrap();
        assert_eq!(col.count, 3);
        assert!(col.is_proper(&c5));
    }

    #[test]
    fn b_fold_bounds() {
        let limits = Limits::default();
        let c5 = UndirectedGraph::cycle(5);
        assert_eq!(b_fold_chromatic_upper(&c5, 2, &limits).unwrap(), 5);
        assert_eq!(b_fold_chromatic_upper(&c5, 1, &limits).unwrap(), 3);
        let g = UndirectedGraph::random(7, 0.5, 9);
        assert_eq!(
            b_fold_chromatic_upper(&g, 1, &limits).unwrap(),
            chromatic_number(&g, &limits).unwrap().count
        );
    }

    #[test]
    fn sandwich_on_random_graphs() {
        let limits = Limits::default();
        for seed in 0..15 {
            let g = UndirectedGraph::random(5 + seed as usize % 5, 0.45, seed);
            let chi_f = fractional_chromatic_lp(&g, &limits).unwrap();
            assert!(chi_f.verify(&g, &limits).unwrap());
            let chi = chromatic_number(&g, &limits).unwrap();
            assert!(chi.is_proper(&g));
            assert!(chi_f.chi_f <= r(chi.count as i64, 1));
            for b in 1..=3 {
                let upper = b_fold_chromatic_upper(&g, b, &limits).unwrap();
                assert!(chi_f.chi_f <= r(upper as i64, b as i64));
            }
        }
    }
}
