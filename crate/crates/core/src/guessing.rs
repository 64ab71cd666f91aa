//! Guessing games on side-information graphs.
//!
//! Player `j` sees the blocks `x(A_j)` and guesses its own block `x_j` with
//! a table `h_j`. The winning set `W` is where every guess is right; it is
//! always an independent set of `Γ_t`, and a maximum independent set gives
//! an optimal strategy.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coding::{check_independent, external_in_sets, hex, internal_graph, parse_hex};
use crate::confusion::TupleLayout;
use crate::error::{Error, Result};
use crate::graph::{BlockLengths, SideInformationGraph};
use crate::limits::Limits;
use crate::rates::{
    describe_t_range, finish, int, select, serialize_rational, BoundDirection, Candidate, LogForm, PointCache,
    Quantity, RateBound,
};
use crate::Rational;

/// A strategy with its exhaustively computed winning set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessingStrategy {
    layout: TupleLayout,
    /// `h_j` keyed by observation; observations not listed guess all zeros.
    pub guess_tables: Vec<BTreeMap<u64, u64>>,
    /// `W`, ascending.
    pub winning_set: Vec<u64>,
    pub p_win: Rational,
    pub p_rand: Rational,
}

/// Monte Carlo estimate of `P_win` for tuple spaces too large to scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledEvaluation {
    pub samples: u64,
    pub wins: u64,
    pub seed: u64,
    pub estimate: f64,
    /// Half-width of the normal-approximation 95% interval.
    pub radius95: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Evaluation {
    Exact(Box<GuessingStrategy>),
    Sampled(SampledEvaluation),
}

/// How to evaluate a strategy whose tuple space exceeds the explicit cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sampling {
    pub samples: u64,
    pub seed: u64,
}

fn guess(tables: &[BTreeMap<u64, u64>], j: usize, observation: u64) -> u64 {
    tables[j].get(&observation).copied().unwrap_or(0)
}

fn wins(layout: &TupleLayout, tables: &[BTreeMap<u64, u64>], x: u64) -> bool {
    (0..layout.n()).all(|j| guess(tables, j, layout.observation(x, j)) == layout.block(x, j))
}

fn check_tables(layout: &TupleLayout, tables: &[BTreeMap<u64, u64>]) -> Result<()> {
    if tables.len() != layout.n() {
        return Err(Error::LengthMismatch {
            what: "guess tables",
            expected: layout.n(),
            actual: tables.len(),
        });
    }
    for (j, table) in tables.iter().enumerate() {
        let obs_bits = layout.observation_bits(j);
        let block_bits = layout.block_lengths().get(j);
        for (&o, &b) in table {
            if obs_bits < 64 && o >> obs_bits != 0 || block_bits < 64 && b >> block_bits != 0 {
                return Err(Error::invalid(format!(
                    "entry {o:x} -> {b:x} of player {} does not fit its {obs_bits}-bit observation or {block_bits}-bit block",
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

impl GuessingStrategy {
    /// Evaluates `tables` over every tuple.
    pub fn new(
        g: &SideInformationGraph,
        t: &BlockLengths,
        guess_tables: Vec<BTreeMap<u64, u64>>,
        limits: &Limits,
    ) -> Result<Self> {
        let layout = TupleLayout::new(g, t, limits)?;
        limits.check_explicit(layout.vertex_count())?;
        check_tables(&layout, &guess_tables)?;
        let size = layout.vertex_count();
        let winning_set: Vec<u64> = if limits.threads > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(limits.threads)
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
            pool.install(|| {
                (0..size)
                    .into_par_iter()
                    .filter(|&x| wins(&layout, &guess_tables, x))
                    .collect()
            })
        } else {
            (0..size).filter(|&x| wins(&layout, &guess_tables, x)).collect()
        };
        let p_rand = Rational::new(BigInt::one(), BigInt::one() << layout.total_bits());
        let p_win = &p_rand * int(winning_set.len());
        Ok(GuessingStrategy {
            layout,
            guess_tables,
            winning_set,
            p_win,
            p_rand,
        })
    }

    pub fn layout(&self) -> &TupleLayout {
        &self.layout
    }

    pub fn block_lengths(&self) -> &BlockLengths {
        self.layout.block_lengths()
    }

    /// `h_j(observation)`.
    pub fn guess(&self, j: usize, observation: u64) -> u64 {
        guess(&self.guess_tables, j, observation)
    }

    /// The guessing numbers of this strategy.
    pub fn numbers(&self) -> Result<GuessingResult> {
        guessing_numbers(self)
    }

    pub fn to_document(&self) -> StrategyDocument {
        StrategyDocument {
            kind: "guessing".into(),
            graph: external_in_sets(self.layout.base()),
            t: self.layout.block_lengths().clone(),
            guess_tables: self
                .guess_tables
                .iter()
                .map(|table| table.iter().map(|(&o, &b)| (hex(o), hex(b))).collect())
                .collect(),
        }
    }

    pub fn from_document(doc: &StrategyDocument, limits: &Limits) -> Result<Self> {
        if doc.kind != "guessing" {
            return Err(Error::invalid(format!("expected a guessing strategy, found {:?}", doc.kind)));
        }
        let g = internal_graph(&doc.graph)?;
        let tables = doc
            .guess_tables
            .iter()
            .map(|table| {
                table
                    .iter()
                    .map(|(o, b)| Ok((parse_hex(o)?, parse_hex(b)?)))
                    .collect::<Result<BTreeMap<_, _>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        GuessingStrategy::new(&g, &doc.t, tables, limits)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }

    pub fn from_json(text: &str, limits: &Limits) -> Result<Self> {
        let doc: StrategyDocument =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("strategy JSON: {e}")))?;
        Self::from_document(&doc, limits)
    }
}

/// JSON form of a strategy: per-player tables from hex observations to hex
/// guesses. Players are 1-indexed in `graph`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyDocument {
    pub kind: String,
    pub graph: Vec<Vec<usize>>,
    pub t: BlockLengths,
    pub guess_tables: Vec<BTreeMap<String, String>>,
}

/// Exhaustive evaluation within the explicit cap, sampling beyond it when
/// `sampling` is given.
pub fn evaluate_strategy(
    g: &SideInformationGraph,
    t: &BlockLengths,
    guess_tables: Vec<BTreeMap<u64, u64>>,
    sampling: Option<Sampling>,
    limits: &Limits,
) -> Result<Evaluation> {
    match GuessingStrategy::new(g, t, guess_tables.clone(), limits) {
        Ok(s) => Ok(Evaluation::Exact(Box::new(s))),
        Err(Error::CapExceeded { .. }) if sampling.is_some() => {
            let sampling = sampling.expect("checked");
            // Packing still needs the tuple to fit a machine word.
            let wide = Limits {
                max_total_bits: 62,
                ..limits.clone()
            };
            let layout = TupleLayout::new(g, t, &wide)?;
            check_tables(&layout, &guess_tables)?;
            Ok(Evaluation::Sampled(sample(&layout, &guess_tables, sampling)))
        }
        Err(e) => Err(e),
    }
}

fn sample(layout: &TupleLayout, tables: &[BTreeMap<u64, u64>], sampling: Sampling) -> SampledEvaluation {
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let size = layout.vertex_count();
    let wins = (0..sampling.samples)
        .filter(|_| wins(layout, tables, rng.gen_range(0..size)))
        .count() as u64;
    let n = sampling.samples.max(1) as f64;
    let estimate = wins as f64 / n;
    SampledEvaluation {
        samples: sampling.samples,
        wins,
        seed: sampling.seed,
        estimate,
        radius95: 1.96 * (estimate * (1.0 - estimate) / n).sqrt(),
    }
}

/// Guessing strategy that decodes as if the tuple were in `s`: `h_j` maps
/// the observation of each member of `s` to its block, and guesses all
/// zeros elsewhere. `W ⊇ s`.
pub fn strategy_from_independent_set(
    g: &SideInformationGraph,
    t: &BlockLengths,
    s: &[u64],
    limits: &Limits,
) -> Result<GuessingStrategy> {
    let layout = TupleLayout::new(g, t, limits)?;
    let set = check_independent(&layout, s)?;
    if set.is_empty() {
        return Err(Error::invalid("independent set is empty"));
    }
    let tables = (0..layout.n())
        .map(|j| {
            set.iter()
                .map(|&x| (layout.observation(x, j), layout.block(x, j)))
                .filter(|&(_, b)| b != 0)
                .collect()
        })
        .collect();
    GuessingStrategy::new(g, t, tables, limits)
}

/// Guessing numbers of one strategy, in base `s = 2^{Σt/n}`.
#[derive(Clone, Debug, Serialize)]
pub struct GuessingResult {
    pub n: usize,
    pub total_bits: u32,
    pub winning: usize,
    /// `k = (n/Σt)·log2 |W|`; `None` when `W` is empty (`k = −∞`).
    pub k: Option<LogForm>,
    /// `k' = (n/Σt)·log2(2^{Σt}/|W|)`, infinite when `W` is empty.
    pub k_complement: LogForm,
    /// `k + k' = n` exactly.
    pub sums_to_n: bool,
}

pub fn guessing_numbers(strategy: &GuessingStrategy) -> Result<GuessingResult> {
    let layout = strategy.layout();
    let total = layout.total_bits();
    if total == 0 {
        return Err(Error::invalid("guessing numbers need at least one bit"));
    }
    let n = layout.n();
    let coef = int(n as u64) / int(total);
    let w = strategy.winning_set.len();
    let space = int(BigInt::one() << total);
    if w == 0 {
        return Ok(GuessingResult {
            n,
            total_bits: total,
            winning: 0,
            k: None,
            k_complement: LogForm::infinity(),
            sums_to_n: true,
        });
    }
    let k = LogForm::times_log(coef.clone(), int(w));
    let k_complement = LogForm::times_log(coef.clone(), &space / int(w));
    Ok(GuessingResult {
        n,
        total_bits: total,
        winning: w,
        sums_to_n: sums_to(&k, &k_complement, &int(n as u64)),
        k: Some(k),
        k_complement,
    })
}

/// `a + b = target` for two forms `c·log2 p`, `c·log2 q` sharing `c`, as
/// `p·q = 2^{target/c}`.
fn sums_to(a: &LogForm, b: &LogForm, target: &Rational) -> bool {
    match (a, b) {
        (LogForm::TimesLog { coef: c, base: p }, LogForm::TimesLog { coef: d, base: q }) if c == d && !c.is_zero() => {
            let e = target / c;
            match e.is_integer().then(|| e.to_integer().to_u32()).flatten() {
                Some(e) => p * q == int(BigInt::one() << e),
                None => false,
            }
        }
        _ => false,
    }
}

/// `k(G) ≥ max_t (n/Σt)·log2 α(Γ_t)` over `t_enum`.
pub fn optimal_guessing_bound(g: &SideInformationGraph, t_enum: &[BlockLengths], limits: &Limits) -> Result<RateBound> {
    let mut cache = PointCache::new(g, limits);
    optimal_guessing_bound_cached(&mut cache, t_enum)
}

pub fn optimal_guessing_bound_cached(cache: &mut PointCache, t_enum: &[BlockLengths]) -> Result<RateBound> {
    let mut best = None;
    for t in t_enum.iter().filter(|t| t.total() > 0) {
        let point = cache.get(t)?.clone();
        let value = LogForm::times_log(int(t.len() as u64) / int(point.total()), int(point.alpha));
        select(&mut best, Candidate { value, r: None, point }, BoundDirection::Lower);
    }
    Ok(finish(
        best,
        Quantity::GuessingNumber,
        BoundDirection::Lower,
        describe_t_range(t_enum),
        Vec::new(),
    ))
}

/// Per-`t` link between guessing numbers and sum rates.
#[derive(Clone, Debug, Serialize)]
pub struct GuessingSumCheck {
    pub t: BlockLengths,
    pub alpha: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub chi_f: Rational,
    /// `(n/Σt)·log2 α`
    pub k_bound: LogForm,
    /// `n / (Σt / log2 α)`
    pub n_over_r_sum: LogForm,
    /// `n − k_bound`
    pub k_complement_bound: LogForm,
    /// `n / (Σt / log2 χ_f)`
    pub n_over_c_sum: LogForm,
    /// `None` when `α = 1`, where the rate side is infinite.
    pub holds: Option<bool>,
}

/// Checks `k = n/R_sum` and `k' = n/C_sum` at a single `t`.
pub fn guessing_sum_check(g: &SideInformationGraph, t: &BlockLengths, limits: &Limits) -> Result<GuessingSumCheck> {
    let mut cache = PointCache::new(g, limits);
    guessing_sum_check_cached(&mut cache, t)
}

pub fn guessing_sum_check_cached(cache: &mut PointCache, t: &BlockLengths) -> Result<GuessingSumCheck> {
    if t.total() == 0 {
        return Err(Error::invalid("the check needs at least one bit"));
    }
    let point = cache.get(t)?.clone();
    let n = int(t.len() as u64);
    let total = int(point.total());
    let coef = &n / &total;
    let k_bound = LogForm::times_log(coef.clone(), int(point.alpha));
    let k_complement_bound = LogForm::times_log(coef, int(BigInt::one() << point.total()) / int(point.alpha));
    let n_over_r_sum = point.per_log_alpha(total.clone()).recip().scaled(&n);
    let n_over_c_sum = point.per_log_chi(total).recip().scaled(&n);
    let holds = (point.alpha > 1).then(|| {
        k_bound.exact_eq(&n_over_r_sum)
            && k_complement_bound.exact_eq(&n_over_c_sum)
            && sums_to(&k_bound, &k_complement_bound, &n)
    });
    Ok(GuessingSumCheck {
        t: t.clone(),
        alpha: point.alpha,
        chi_f: point.chi_f.clone(),
        k_bound,
        n_over_r_sum,
        k_complement_bound,
        n_over_c_sum,
        holds,
    })
}
