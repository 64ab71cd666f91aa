//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints a PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use confdual::coding::{index_code_from_coloring, storage_code_from_independent_set, Counterexample};
use confdual::confusion::ConfusionGraph;
use confdual::fracchrom::{chromatic_number, fractional_chromatic_lp, fractional_chromatic_transitive};
use confdual::graph::{BlockLengths, SideInformationGraph, UndirectedGraph};
use confdual::guessing::{strategy_from_independent_set, guessing_sum_check_cached};
use confdual::independence::confusion_independence;
use confdual::limits::Limits;
use confdual::rates::{
    capacity_lower_bound_cached, least_scale, storage_rate_upper_bound_cached, sum_capacity_bounds_cached,
    complementarity, t_range_up_to, LogForm, PointCache, Quantity, WeightVector,
};
use confdual::Rational;
use num_bigint::BigInt;
use rand::Rng;

use common::{brute_alpha, brute_force_max_win, confusable_by_definition, random_digraph, random_t, random_undirected, rng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn lim() -> Limits {
    Limits::default()
}

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

fn int(a: u64) -> Rational {
    Rational::from_integer(a.into())
}

fn pow2(k: u32) -> Rational {
    Rational::from_integer(BigInt::from(1) << k)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn three_node() -> SideInformationGraph {
    SideInformationGraph::from_in_sets(vec![vec![1, 2], vec![0], vec![0, 1]]).unwrap()
}

fn exact(v: &LogForm) -> Option<Rational> {
    v.as_rational()
}

fn three_node_reconstruction() -> Outcome {
    let g = three_node();
    let t = BlockLengths::uniform(3, 1);
    let cg = ConfusionGraph::new(&g, &t, &lim()).map_err(err)?;
    ensure!(cg.vertex_count() == 8, "vertices {}", cg.vertex_count());
    ensure!(cg.degree() == 4, "degree {}", cg.degree());
    ensure!(cg.edge_count() == 16, "edges {}", cg.edge_count());
    let diffs: BTreeSet<String> = cg.confusable_diffs().iter().map(|&d| cg.format_tuple(d)).collect();
    let expected: BTreeSet<String> = ["100", "010", "011", "001"].map(String::from).into();
    ensure!(diffs == expected, "difference set {diffs:?}");
    // Oracle: each of the 7 nonzero differences, tested from the definition.
    let oracle: BTreeSet<String> = (1..8u64)
        .filter(|&d| confusable_by_definition(&g, &cg.unpack(0), &cg.unpack(d)))
        .map(|d| cg.format_tuple(d))
        .collect();
    ensure!(oracle == expected, "oracle difference set {oracle:?}");
    let explicit = cg.to_explicit(&lim()).map_err(err)?;
    let alpha = confusion_independence(&cg, &lim()).map_err(err)?.alpha;
    ensure!(alpha == 2 && brute_alpha(&explicit) == 2, "alpha {alpha}");
    let lp = fractional_chromatic_lp(&explicit, &lim()).map_err(err)?;
    let ratio = fractional_chromatic_transitive(&cg, &lim()).map_err(err)?;
    ensure!(lp.chi_f == int(4) && ratio == int(4), "chi_f LP {} ratio {ratio}", lp.chi_f);
    ensure!(lp.verify(&explicit, &lim()).map_err(err)?, "LP certificate rejected");
    Ok("8 vertices, degree 4, 16 edges, alpha 2, chi_f 4".into())
}

fn lp_times_alpha() -> Outcome {
    let mut rng = rng(2024);
    let mut worst = Duration::ZERO;
    let count = 24;
    for i in 0..count {
        let n = rng.gen_range(2..=4);
        let g = random_digraph(&mut rng, n);
        let t = random_t(&mut rng, n, 4, 10);
        let start = Instant::now();
        let cg = ConfusionGraph::new(&g, &t, &lim()).map_err(err)?;
        let lp = fractional_chromatic_lp(&cg.to_explicit(&lim()).map_err(err)?, &lim()).map_err(err)?;
        let alpha = confusion_independence(&cg, &lim()).map_err(err)?.alpha;
        worst = worst.max(start.elapsed());
        ensure!(
            &lp.chi_f * int(alpha as u64) == pow2(t.total()),
            "instance {i}: {:?} t={t}: chi_f {} * alpha {alpha} != 2^{}",
            g.in_sets(),
            lp.chi_f,
            t.total()
        );
    }
    Ok(format!("{count} instances, n <= 4, 4 <= sum t <= 10, slowest {worst:.2?}"))
}

fn product_multiplicativity() -> Outcome {
    let c5k2 = UndirectedGraph::cycle(5).disjunctive_product(&UndirectedGraph::complete(2), &lim()).map_err(err)?;
    let v = fractional_chromatic_lp(&c5k2, &lim()).map_err(err)?.chi_f;
    ensure!(v == int(5), "chi_f(C5*K2) = {v}");
    let mut rng = rng(7);
    let count = 12;
    for i in 0..count {
        let a = random_undirected(&mut rng, 6);
        let b = random_undirected(&mut rng, 6);
        let p = a.disjunctive_product(&b, &lim()).map_err(err)?;
        let fa = fractional_chromatic_lp(&a, &lim()).map_err(err)?.chi_f;
        let fb = fractional_chromatic_lp(&b, &lim()).map_err(err)?.chi_f;
        let fp = fractional_chromatic_lp(&p, &lim()).map_err(err)?.chi_f;
        ensure!(fp == &fa * &fb, "pair {i}: {fp} != {fa} * {fb}");
    }
    Ok(format!("C5*K2 = 5 and {count} random pairs"))
}

fn monotonicity() -> Outcome {
    let mut rng = rng(31);
    let count = 24;
    for i in 0..count {
        let n = rng.gen_range(2..=4);
        let g = random_digraph(&mut rng, n);
        let t = random_t(&mut rng, n, 2, 10);
        let s = BlockLengths::new(t.as_slice().iter().map(|&tj| rng.gen_range(0..=tj)).collect());
        let point = |b: &BlockLengths| -> Result<(usize, Rational), String> {
            let cg = ConfusionGraph::new(&g, b, &lim()).map_err(err)?;
            let alpha = confusion_independence(&cg, &lim()).map_err(err)?.alpha;
            Ok((alpha, pow2(b.total()) / int(alpha as u64)))
        };
        let (alpha_s, chi_s) = point(&s)?;
        let (alpha_t, chi_t) = point(&t)?;
        ensure!(chi_s <= chi_t, "pair {i}: chi_f {chi_s} at {s} exceeds {chi_t} at {t}");
        ensure!(
            alpha_t <= alpha_s << (t.total() - s.total()),
            "pair {i}: alpha {alpha_t} at {t} exceeds 2^{} * {alpha_s}",
            t.total() - s.total()
        );
    }
    Ok(format!("{count} pairs s <= t with sum t <= 10"))
}

fn complementarity_directions() -> Outcome {
    let limits = lim();
    let mut rng = rng(55);
    let choices = [q(0, 1), q(1, 2), q(1, 1), q(3, 2), q(2, 1)];
    let mut checked = 0;
    let mut unbounded = 0;
    while checked < 24 {
        let n = rng.gen_range(2..=4);
        let g = random_digraph(&mut rng, n);
        let lambda: Vec<Rational> = (0..n).map(|_| choices[rng.gen_range(0..choices.len())].clone()).collect();
        let lambda = WeightVector::new(lambda).map_err(err)?;
        if lambda.is_zero() {
            continue;
        }
        let base = least_scale(&lambda);
        let r = base * rng.gen_range(1..=2u64);
        if lambda.scale(r).is_none_or(|t| t.total() > 10) {
            continue;
        }
        let mut cache = PointCache::new(&g, &limits);
        let cl = capacity_lower_bound_cached(&mut cache, &lambda, &[r]).map_err(err)?;
        let rl = storage_rate_upper_bound_cached(&mut cache, &lambda, &[r]).map_err(err)?;
        if rl.witness.is_none() {
            // α = 1: 1/R = 0, so 1/C must equal Σλ.
            ensure!(exact(&cl.value.recip()) == Some(lambda.sum()), "1/C {} != sum {} with alpha 1", cl.value.recip(), lambda.sum());
            unbounded += 1;
        } else {
            let c = complementarity(&cl, &rl, &lambda).map_err(err)?;
            ensure!(c.matched && c.exact == Some(true), "{:?} lambda {lambda} r {r}: {:?}", g.in_sets(), c);
            checked += 1;
        }
    }
    // Symmetric weights: 1/C_sym = n − 1/R_sym.
    for g in [three_node(), SideInformationGraph::complete(3), SideInformationGraph::bidirected_cycle(5)] {
        let ones = WeightVector::ones(g.n());
        // C5 at r = 2 is the pentagon benchmark below.
        let r_max = if g.n() == 5 { 1 } else { 2 };
        for r in 1..=r_max {
            let mut cache = PointCache::new(&g, &limits);
            let cl = capacity_lower_bound_cached(&mut cache, &ones, &[r]).map_err(err)?;
            let rl = storage_rate_upper_bound_cached(&mut cache, &ones, &[r]).map_err(err)?;
            ensure!(cl.quantity == Quantity::SymmetricCapacity, "quantity {:?}", cl.quantity);
            let c = complementarity(&cl, &rl, &ones).map_err(err)?;
            ensure!(c.exact == Some(true), "symmetric case {:?} r {r}", g.in_sets());
        }
    }
    Ok(format!("{checked} random directions with alpha > 1, {unbounded} more with alpha 1, plus symmetric weights"))
}

fn sum_and_guessing() -> Outcome {
    let limits = lim();
    let graphs = [
        three_node(),
        SideInformationGraph::complete(3),
        SideInformationGraph::bidirected_cycle(4),
        SideInformationGraph::random(4, 0.5, 9),
    ];
    let mut points = 0;
    for g in &graphs {
        let t_max = BlockLengths::uniform(g.n(), 2);
        let t_enum = t_range_up_to(&t_max, &limits);
        let mut cache = PointCache::new(g, &limits);
        let sums = sum_capacity_bounds_cached(&mut cache, &t_enum).map_err(err)?;
        ensure!(sums.all_identities_hold, "sum identity fails on {:?}", g.in_sets());
        for t in &t_enum {
            let c = guessing_sum_check_cached(&mut cache, t).map_err(err)?;
            ensure!(c.holds != Some(false), "guessing identity fails at {t} on {:?}", g.in_sets());
            points += 1;
        }
    }
    let g = three_node();
    let t = BlockLengths::uniform(3, 1);
    let mut cache = PointCache::new(&g, &limits);
    let sums = sum_capacity_bounds_cached(&mut cache, std::slice::from_ref(&t)).map_err(err)?;
    let check = guessing_sum_check_cached(&mut cache, &t).map_err(err)?;
    let got = (
        exact(&sums.c_sum.value),
        exact(&sums.r_sum.value),
        exact(&check.k_bound),
        exact(&check.k_complement_bound),
    );
    let want = (Some(q(3, 2)), Some(int(3)), Some(int(1)), Some(int(2)));
    ensure!(got == want, "reference values {got:?}");
    ensure!(exact(&check.n_over_r_sum) == Some(int(1)) && exact(&check.n_over_c_sum) == Some(int(2)), "n/R_sum or n/C_sum");
    Ok(format!("{points} (G, t) points; C_sum >= 3/2, R_sum <= 3, k >= 1, k' <= 2"))
}

fn pentagon() -> Outcome {
    let limits = lim();
    let g = SideInformationGraph::bidirected_cycle(5);
    let ones = WeightVector::ones(5);
    let start = Instant::now();
    let mut cache = PointCache::new(&g, &limits);
    let cl = capacity_lower_bound_cached(&mut cache, &ones, &[2]).map_err(err)?;
    let elapsed = start.elapsed();
    let w = cl.witness.as_ref().ok_or("no witness")?;
    ensure!(w.alpha == 32, "alpha {}", w.alpha);
    ensure!(exact(&cl.value) == Some(q(2, 5)), "C_sym >= {}", cl.value);
    let beta = cl.reciprocal(Quantity::BroadcastRate);
    ensure!(exact(&beta.value) == Some(q(5, 2)), "beta <= {}", beta.value);
    ensure!(elapsed < Duration::from_secs(600), "took {elapsed:.2?}");
    Ok(format!("alpha 32, C_sym >= 2/5, beta <= 5/2 in {elapsed:.2?}"))
}

fn code_round_trips() -> Outcome {
    let g = three_node();
    let t = BlockLengths::uniform(3, 1);
    let cg = ConfusionGraph::new(&g, &t, &lim()).map_err(err)?;
    let coloring = chromatic_number(&cg.to_explicit(&lim()).map_err(err)?, &lim()).map_err(err)?;
    let mut index = index_code_from_coloring(&g, &t, &coloring, &lim()).map_err(err)?;
    let report = index.verify();
    ensure!(index.r == 2 && report.passed && report.checked == 24, "index code r {} {report:?}", index.r);

    let k3 = SideInformationGraph::complete(3);
    let even: Vec<u64> = (0..8u64).filter(|x| x.count_ones() % 2 == 0).collect();
    let mut storage = storage_code_from_independent_set(&k3, &t, &even, &lim()).map_err(err)?;
    ensure!(storage.r == 2 && storage.verify().passed, "parity code");
    for m in 0..4 {
        for j in 0..3 {
            let rec = storage.simulate_failure(m, j).map_err(err)?;
            ensure!(rec.ok, "failure of node {} in message {m}", j + 1);
        }
    }

    // Fault injection: flip one decoder output, swap one codeword, and
    // corrupt one recovery entry in a saved code.
    let clean = storage.to_json();
    let (&key, &block) = index.decoders[0].iter().next().ok_or("empty decoder")?;
    index.decoders[0].insert(key, block ^ 1);
    let bad = index.verify();
    ensure!(!bad.passed && matches!(bad.counterexample, Some(Counterexample::Decode { .. })), "{bad:?}");
    storage.codebook[1] = 0b001;
    let bad = storage.verify();
    ensure!(!bad.passed && matches!(bad.counterexample, Some(Counterexample::ConfusablePair { .. })), "{bad:?}");
    let corrupted = clean.replacen("\"1\": \"1\"", "\"1\": \"0\"", 1);
    ensure!(corrupted != clean, "no recovery entry to corrupt");
    let reloaded = confdual::coding::StorageCode::from_json(&corrupted, &lim()).map_err(err)?;
    let bad = reloaded.verify();
    ensure!(matches!(bad.counterexample, Some(Counterexample::Recovery { .. })), "{bad:?}");
    Ok("index r=2 over 8 inputs, parity storage r=2 over 12 failures, 3 faults caught".into())
}

fn guessing_oracle() -> Outcome {
    let mut graphs = 0;
    for n in 1..=3usize {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        for mask in 0..1u32 << pairs.len() {
            let mut g = SideInformationGraph::edgeless(n);
            for (k, &(i, j)) in pairs.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    g.add_edge(i, j).map_err(err)?;
                }
            }
            let t = BlockLengths::uniform(n, 1);
            let cg = ConfusionGraph::new(&g, &t, &lim()).map_err(err)?;
            let cert = confusion_independence(&cg, &lim()).map_err(err)?;
            let best = brute_force_max_win(&g);
            ensure!(best == cert.alpha, "{:?}: best |W| {best} vs alpha {}", g.in_sets(), cert.alpha);
            let s: Vec<u64> = cert.witness.iter().map(|&v| v as u64).collect();
            let strategy = strategy_from_independent_set(&g, &t, &s, &lim()).map_err(err)?;
            ensure!(strategy.winning_set.len() == best, "{:?}: strategy wins {}", g.in_sets(), strategy.winning_set.len());
            graphs += 1;
        }
    }
    let k3 = SideInformationGraph::complete(3);
    let t = BlockLengths::uniform(3, 1);
    let cg = ConfusionGraph::new(&k3, &t, &lim()).map_err(err)?;
    let s: Vec<u64> = confusion_independence(&cg, &lim()).map_err(err)?.witness.iter().map(|&v| v as u64).collect();
    let numbers = strategy_from_independent_set(&k3, &t, &s, &lim()).map_err(err)?.numbers().map_err(err)?;
    ensure!(numbers.k.as_ref().and_then(LogForm::as_rational) == Some(int(2)), "k(K3) = {:?}", numbers.k);
    Ok(format!("{graphs} labelled graphs with n <= 3; K3 gives k = 2"))
}

fn strip_timing(stdout: &[u8]) -> Result<String, String> {
    let mut v: serde_json::Value = serde_json::from_slice(stdout).map_err(err)?;
    v.as_object_mut().ok_or("report is not an object")?.remove("timing");
    serde_json::to_string_pretty(&v).map_err(err)
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_confdual");
    let dir = env!("CARGO_MANIFEST_DIR");
    let runs: [&[&str]; 7] = [
        &["alpha", "--graph", "tests/data/c5.g", "--t", "1,2,1,2,1"],
        &["chromatic", "--graph", "tests/data/three_node.g", "--t", "2,1,2"],
        &["capacity", "--graph", "tests/data/three_node.g", "--lambda", "1,1/2,1", "--r-max", "4"],
        &["duality", "--graph", "tests/data/k3.g", "--lambda", "1,1,1", "--r-max", "2"],
        &["sum", "--graph", "tests/data/three_node.g", "--t-max", "2,2,2"],
        &["guess", "--graph", "tests/data/c5.g", "--t", "1,1,1,1,1", "--dump"],
        &["codegen", "--graph", "tests/data/three_node.g", "--t", "1,2,1", "--kind", "storage", "--dump"],
    ];
    for args in runs {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(bin)
                .args(args)
                .args(["--threads", "1", "--seed", "7"])
                .current_dir(dir)
                .output()
                .map_err(err)?;
            ensure!(out.status.code() == Some(0), "{args:?} exited {:?}", out.status.code());
            outputs.push(strip_timing(&out.stdout)?);
        }
        ensure!(outputs[0] == outputs[1], "{args:?} differs between runs");
    }
    Ok(format!("{} subcommands byte-identical across two runs", runs.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("confusion graph reconstruction", three_node_reconstruction),
        ("LP chi_f times alpha equals 2^sum(t)", lp_times_alpha),
        ("disjunctive products multiply chi_f", product_multiplicativity),
        ("monotonicity in t", monotonicity),
        ("capacity/storage complementarity", complementarity_directions),
        ("sum rates and guessing numbers", sum_and_guessing),
        ("pentagon benchmark", pentagon),
        ("code round trips", code_round_trips),
        ("guessing oracle", guessing_oracle),
        ("deterministic reports", determinism),
    ];
    // Sequential, so every reported time is single-threaded wall clock.
    let results: Vec<(Outcome, Duration)> = criteria
        .iter()
        .map(|&(_, f)| {
            let start = Instant::now();
            let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
            (outcome, start.elapsed())
        })
        .collect();
    let mut failures = 0;
    for (i, ((name, _), (outcome, elapsed))) in criteria.iter().zip(&results).enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
