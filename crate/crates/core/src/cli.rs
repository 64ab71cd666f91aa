//! Command-line front end. Every subcommand builds a [`Report`], printed as
//! JSON or text; the exit code is 0 on success, 1 when a computed identity
//! or verification fails and 2 on usage, input or cap errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::coding::{index_code_from_coloring, storage_code_from_independent_set, Code, StorageCode};
use crate::confusion::ConfusionGraph;
use crate::error::{Error, Result};
use crate::fracchrom::{chromatic_number, fractional_chromatic_lp, fractional_chromatic_transitive};
use crate::graph::{BlockLengths, SideInformationGraph};
use crate::guessing::{
    evaluate_strategy, optimal_guessing_bound_cached, strategy_from_independent_set, guessing_sum_check_cached,
    Evaluation, GuessingStrategy, Sampling,
};
use crate::independence::confusion_independence;
use crate::limits::Limits;
use crate::rates::{
    capacity_lower_bound_cached, duality_identity_check, least_scale, r_range_up_to, storage_rate_upper_bound_cached,
    sum_capacity_bounds_cached, t_range_up_to, complementarity, weighted_sum_bounds, PointCache,
    Quantity, RateBound, WeightVector,
};
use crate::Rational;

pub const SCHEMA_VERSION: &str = "1";

/// `auto` runs the LP only up to this many confusion-graph vertices.
const AUTO_LP_VERTICES: u64 = 256;

#[derive(Parser, Debug)]
#[command(name = "confdual", version, about = "Confusion graphs, index coding and storage rate bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Side-information graph file (`n <count>` then `e <i> <j>` lines)
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Cap on total confusion-graph bits (default from CONFDUAL_MAX_BITS or 20)
    #[arg(long, global = true)]
    pub max_bits: Option<u32>,
    /// Wall-clock budget per exact solve, in seconds
    #[arg(long, global = true)]
    pub timeout: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Include full tables and vertex lists in the report
    #[arg(long, global = true)]
    pub dump: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// LP when the confusion graph is small, transitivity otherwise
    Auto,
    Lp,
    Transitive,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeKind {
    Index,
    Storage,
    Guessing,
}

#[derive(Args, Debug, Clone)]
pub struct Scale {
    /// Direction λ, e.g. `1,1/2,0`
    #[arg(long)]
    pub lambda: String,
    /// A single scaling r (default: the least r making rλ integral)
    #[arg(long, conflicts_with = "r_max")]
    pub r: Option<u64>,
    /// Scan r = 1..=R
    #[arg(long)]
    pub r_max: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Confusion graph statistics
    Confusion {
        #[arg(long)]
        t: String,
    },
    /// Independence number of the confusion graph
    Alpha {
        #[arg(long)]
        t: String,
    },
    /// Fractional chromatic number of the confusion graph
    Chromatic {
        #[arg(long)]
        t: String,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Lower bound on the index-coding capacity along λ
    Capacity {
        #[command(flatten)]
        scale: Scale,
    },
    /// Upper bound on the storage rate along λ
    StorageRate {
        #[command(flatten)]
        scale: Scale,
    },
    /// χ_f·α = 2^Σt and the capacity/rate complementarity along λ
    Duality {
        #[command(flatten)]
        scale: Scale,
    },
    /// Sum capacity, sum rate and guessing-number bounds over t ≤ t-max
    Sum {
        #[arg(long, required_unless_present = "t")]
        t_max: Option<String>,
        /// A single t instead of a range
        #[arg(long, conflicts_with = "t_max")]
        t: Option<String>,
        /// Weights μ for weighted sums
        #[arg(long)]
        mu: Option<String>,
    },
    /// Evaluate a guessing strategy (optimal by default)
    Guess {
        #[arg(long)]
        t: String,
        /// Strategy JSON file; defaults to one built from a maximum independent set
        #[arg(long)]
        strategy: Option<PathBuf>,
        /// Sample this many tuples when the tuple space exceeds the cap
        #[arg(long)]
        samples: Option<u64>,
        /// Write the strategy JSON here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an index code, storage code or guessing strategy
    Codegen {
        #[arg(long)]
        t: String,
        #[arg(long, value_enum)]
        kind: CodeKind,
        /// Write the code JSON here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustively verify a code or strategy JSON file
    Verify {
        #[arg(long)]
        code: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Confusion { .. } => "confusion",
            Command::Alpha { .. } => "alpha",
            Command::Chromatic { .. } => "chromatic",
            Command::Capacity { .. } => "capacity",
            Command::StorageRate { .. } => "storage-rate",
            Command::Duality { .. } => "duality",
            Command::Sum { .. } => "sum",
            Command::Guess { .. } => "guess",
            Command::Codegen { .. } => "codegen",
            Command::Verify { .. } => "verify",
        }
    }
}

/// A command's result: exact values in `result`, human summary in `lines`.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub lines: Vec<String>,
    /// False when a checked identity or verification failed.
    pub ok: bool,
    pub elapsed: Duration,
}

impl Report {
    /// The JSON document; `timing` is the only field that varies between
    /// identical runs.
    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "ok": self.ok,
            "result": self.result,
            "timing": { "elapsed_ms": self.elapsed.as_secs_f64() * 1e3 },
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }
}

/// Output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let name = cli.command.name();
    match execute(&cli) {
        Ok(report) => Outcome {
            code: report.exit_code(),
            stdout: match cli.common.format {
                Format::Json => serde_json::to_string_pretty(&report.to_json()).expect("serializable") + "\n",
                Format::Text => report.to_text(),
            },
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {name}: {e}\n"),
        },
    }
}

/// Entry point for the binary.
pub fn main() -> std::process::ExitCode {
    let outcome = run(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    std::process::ExitCode::from(outcome.code as u8)
}

fn limits(common: &Common) -> Result<Limits> {
    let mut limits = Limits::from_env()?;
    if let Some(bits) = common.max_bits {
        limits.max_total_bits = bits;
    }
    if let Some(secs) = common.timeout {
        if !(secs > 0.0 && secs.is_finite()) {
            return Err(Error::invalid("--timeout must be positive"));
        }
        limits.timeout = Some(Duration::from_secs_f64(secs));
    }
    if common.threads == 0 {
        return Err(Error::invalid("--threads must be positive"));
    }
    limits.threads = common.threads;
    Ok(limits)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

fn load_graph(common: &Common) -> Result<SideInformationGraph> {
    let path = common.graph.as_deref().ok_or_else(|| Error::invalid("--graph is required"))?;
    SideInformationGraph::parse(&read(path)?)
}

fn block_lengths(text: &str, g: &SideInformationGraph, limits: &Limits) -> Result<BlockLengths> {
    let t = BlockLengths::parse(text)?;
    t.validate(g.n(), limits)?;
    Ok(t)
}

fn r_range(scale: &Scale, lambda: &WeightVector) -> Result<Vec<u64>> {
    match (scale.r, scale.r_max) {
        (Some(0), _) | (_, Some(0)) => Err(Error::invalid("r must be positive")),
        (Some(r), _) => Ok(vec![r]),
        (None, Some(m)) => Ok(r_range_up_to(m)),
        (None, None) => Ok(vec![least_scale(lambda)]),
    }
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn tuples(layout_fmt: impl Fn(u64) -> String, xs: &[u64]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::String(layout_fmt(x))).collect())
}

pub fn execute(cli: &Cli) -> Result<Report> {
    let start = Instant::now();
    let common = &cli.common;
    let limits = limits(common)?;
    let mut config = Map::new();
    if let Some(g) = &common.graph {
        config.insert("graph".into(), json!(g.display().to_string()));
    }
    config.insert("max_bits".into(), json!(limits.max_total_bits));
    config.insert("threads".into(), json!(limits.threads));
    config.insert("seed".into(), json!(common.seed));
    let (result, lines, ok) = match &cli.command {
        Command::Confusion { t } => cmd_confusion(common, t, &limits, &mut config)?,
        Command::Alpha { t } => cmd_alpha(common, t, &limits, &mut config)?,
        Command::Chromatic { t, method } => cmd_chromatic(common, t, *method, &limits, &mut config)?,
        Command::Capacity { scale } => cmd_directional(common, scale, false, &limits, &mut config)?,
        Command::StorageRate { scale } => cmd_directional(common, scale, true, &limits, &mut config)?,
        Command::Duality { scale } => cmd_duality(common, scale, &limits, &mut config)?,
        Command::Sum { t_max, t, mu } => cmd_sum(common, t_max.as_deref(), t.as_deref(), mu.as_deref(), &limits, &mut config)?,
        Command::Guess { t, strategy, samples, out } => {
            cmd_guess(common, t, strategy.as_deref(), *samples, out.as_deref(), &limits, &mut config)?
        }
        Command::Codegen { t, kind, out } => cmd_codegen(common, t, *kind, out.as_deref(), &limits, &mut config)?,
        Command::Verify { code } => cmd_verify(common, code, &limits, &mut config)?,
    };
    Ok(Report {
        command: cli.command.name(),
        config: Value::Object(config),
        result,
        lines,
        ok,
        elapsed: start.elapsed(),
    })
}

type Outputs = (Value, Vec<String>, bool);

fn cmd_confusion(common: &Common, t: &str, limits: &Limits, config: &mut Map<String, Value>) -> Result<Outputs> {
    let g = load_graph(common)?;
    let t = block_lengths(t, &g, limits)?;
    config.insert("t".into(), json!(t.to_string()));
    let cg = ConfusionGraph::new(&g, &t, limits)?;
    let layout = cg.layout();
    let mut result = json!({
        "vertices": cg.vertex_count(),
        "degree": cg.degree(),
        "edges": cg.edge_count(),
        "confusable_diff_count": cg.confusable_diffs().len(),
        "confusable_diffs": tuples(|x| layout.format_tuple(x), cg.confusable_diffs()),
    });
    if common.dump {
        let edges: Vec<Value> = cg
            .all_pairs()
            .into_iter()
            .map(|(a, b)| json!([layout.format_tuple(a), layout.format_tuple(b)]))
            .collect();
        result["explicit_edges"] = Value::Array(edges);
    }
    let lines = vec![
        format!("vertices={} degree={} edges={}", cg.vertex_count(), cg.degree(), cg.edge_count()),
        format!(
            "confusable differences ({}): {}",
            cg.confusable_diffs().len(),
            cg.confusable_diffs().iter().map(|&d| layout.format_tuple(d)).collect::<Vec<_>>().join(" ")
        ),
    ];
    Ok((result, lines, true))
}

fn cmd_alpha(common: &Common, t: &str, limits: &Limits, config: &mut Map<String, Value>) -> Result<Outputs> {
    let g = load_graph(common)?;
    let t = block_lengths(t, &g, limits)?;
    config.insert("t".into(), json!(t.to_string()));
    let cg = ConfusionGraph::new(&g, &t, limits)?;
    let cert = confusion_independence(&cg, limits)?;
    let witness: Vec<u64> = cert.witness.iter().map(|&v| v as u64).collect();
    let result = json!({
        "alpha": cert.alpha,
        "witness": tuples(|x| cg.format_tuple(x), &witness),
        "nodes_explored": cert.nodes_explored,
    });
    let lines = vec![format!("alpha={}", cert.alpha), format!("witness: {}", witness.iter().map(|&x| cg.format_tuple(x)).collect::<Vec<_>>().join(" "))];
    Ok((result, lines, true))
}

fn cmd_chromatic(common: &Common, t: &str, method: Method, limits: &Limits, config: &mut Map<String, Value>) -> Result<Outputs> {
    let g = load_graph(common)?;
    let t = block_lengths(t, &g, limits)?;
    config.insert("t".into(), json!(t.to_string()));
    config.insert("method".into(), json!(format!("{method:?}").to_lowercase()));
    let cg = ConfusionGraph::new(&g, &t, limits)?;
    let use_lp = match method {
        Method::Auto => cg.vertex_count() <= AUTO_LP_VERTICES,
        Method::Lp => true,
        Method::Transitive => false,
    };
    let transitive = fractional_chromatic_transitive(&cg, limits)?;
    let mut result = json!({ "chi_f_transitive": transitive.to_string() });
    let mut lines = vec![format!("chi_f={transitive} (2^{}/alpha)", t.total())];
    let mut ok = true;
    if use_lp {
        let lp = fractional_chromatic_lp(&cg.to_explicit(limits)?, limits)?;
        ok = lp.chi_f == transitive;
        result["chi_f_lp"] = json!(lp.chi_f.to_string());
        result["pricing_rounds"] = json!(lp.pricing_rounds);
        result["independent_sets_in_support"] = json!(lp.coloring.columns.len());
        lines.push(format!("chi_f={} (LP, {} pricing rounds)", lp.chi_f, lp.pricing_rounds));
    }
    result["agree"] = json!(ok);
    Ok((result, lines, ok))
}

fn bound_json(bound: &RateBound, format_tuple: &dyn Fn(&BlockLengths, u64) -> String) -> Value {
    let mut v = value(bound);
    if let Some(w) = &bound.witness {
        v["witness"]["witness"] = Value::Array(w.witness.iter().map(|&x| json!(format_tuple(&w.t, x))).collect());
    }
    v
}

/// Formats a packed tuple of `t` as bit strings separated by `|`.
fn tuple_formatter<'a>(g: &'a SideInformationGraph, limits: &Limits) -> impl Fn(&BlockLengths, u64) -> String + 'a {
    let limits = limits.clone();
    move |t: &BlockLengths, x: u64| match crate::confusion::TupleLayout::new(g, t, &limits) {
        Ok(layout) => layout.format_tuple(x),
        Err(_) => format!("{x:x}"),
    }
}

fn describe(bound: &RateBound) -> String {
    let name = match bound.quantity {
        Quantity::Capacity => "C",
        Quantity::StorageRate => "R",
        Quantity::SymmetricCapacity => "C_sym",
        Quantity::SymmetricRate => "R_sym",
        Quantity::BroadcastRate => "beta",
        Quantity::SumCapacity => "C_sum",
        Quantity::SumRate => "R_sum",
        Quantity::WeightedSumCapacity => "C_mu",
        Quantity::WeightedSumRate => "R_mu",
        Quantity::GuessingNumber => "k",
        Quantity::ComplementaryGuessingNumber => "k'",
    };
    let op = match bound.direction {
        crate::rates::BoundDirection::Lower => ">=",
        crate::rates::BoundDirection::Upper => "<=",
    };
    let at = match (&bound.witness, bound.r) {
        (Some(w), Some(r)) => format!(" at r={r}, t={}", w.t),
        (Some(w), None) => format!(" at t={}", w.t),
        _ => String::new(),
    };
    format!("{name}{op}{}{at}", bound.value)
}

fn cmd_directional(
    common: &Common,
    scale: &Scale,
    storage: bool,
    limits: &Limits,
    config: &mut Map<String, Value>,
) -> Result<Outputs> {
    let g = load_graph(common)?;
    let lambda = WeightVector::parse(&scale.lambda)?;
    lambda.check_direction(g.n())?;
    let rs = r_range(scale, &lambda)?;
    config.insert("lambda".into(), json!(lambda.to_string()));
    config.insert("r".into(), json!(rs));
    let mut cache = PointCache::new(&g, limits);
    let bound = if storage {
        storage_rate_upper_bound_cached(&mut cache, &lambda, &rs)?
    } else {
        capacity_lower_bound_cached(&mut cache, &lambda, &rs)?
    };
    let fmt = tuple_formatter(&g, limits);
    let mut result = json!({ "bound": bound_json(&bound, &fmt) });
    let mut lines = vec![describe(&bound)];
    if bound.quantity == Quantity::SymmetricCapacity {
        let beta = bound.reciprocal(Quantity::BroadcastRate);
        lines.push(describe(&beta));
        result["broadcast_rate"] = bound_json(&beta, &fmt);
    }
    Ok((result, lines, true))
}

fn cmd_duality(common: &Common, scale: &Scale, limits: &Limits, config: &mut Map<String, Value>) -> Result<Outputs> {
    let g = load_graph(common)?;
    let lambda = WeightVector::parse(&scale.lambda)?;
    lambda.check_direction(g.n())?;
    let rs = r_range(scale, &lambda)?;
    config.insert("lambda".into(), json!(lambda.to_string()));
    config.insert("r".into(), json!(rs));
    let mut cache = PointCache::new(&g, limits);
    let fmt = tuple_formatter(&g, limits);
    let mut ok = true;
    let mut per_r = Vec::new();
    let mut lines = Vec::new();
    for &r in &rs {
        if lambda.scale(r).is_none() {
            continue;
        }
        let check = duality_identity_check(&g, &lambda, r, limits)?;
        let cl = capacity_lower_bound_cached(&mut cache, &lambda, &[r])?;
        let rl = storage_rate_upper_bound_cached(&mut cache, &lambda, &[r])?;
        ok &= check.holds;
        let mut entry = json!({
            "r": r,
            "product_identity": value(&check),
            "capacity": bound_json(&cl, &fmt),
            "storage_rate": bound_json(&rl, &fmt),
        });
        lines.push(format!(
            "r={r} t={}: chi_f(LP)={} alpha={} product 2^{}: {}",
            check.t, check.chi_f_lp, check.alpha, check.total_bits, check.holds
        ));
        if rl.witness.is_some() {
            let c = complementarity(&cl, &rl, &lambda)?;
            ok &= c.exact != Some(false);
            lines.push(format!(
                "1/C={}, Σλ−1/R={}, exact: {}",
                c.lhs,
                c.rhs.as_ref().map_or("-".into(), ToString::to_string),
                c.exact.map_or("-".into(), |e| e.to_string())
            ));
            entry["complementarity"] = value(&c);
        } else {
            lines.push(format!("1/C={}, R unbounded (alpha=1)", cl.value.recip()));
            entry["complementarity"] = Value::Null;
        }
        per_r.push(entry);
    }
    if per_r.is_empty() {
        return Err(Error::NoAdmissibleScale);
    }
    Ok((json!({ "per_r": per_r, "all_hold": ok }), lines, ok))
}

fn cmd_sum(
    common: &Common,
    t_max: Option<&str>,
    t: Option<&str>,
    mu: Option<&str>,
    limits: &Limits,
    config: &mut Map<String, Value>,
) -> Result<Outputs> {
    let g = load_graph(common)?;
    let t_enum = match (t_max, t) {
        (Some(m), _) => {
            let m = block_lengths(m, &g, limits)?;
            config.insert("t_max".into(), json!(m.to_string()));
            t_range_up_to(&m, limits)
        }
        (None, Some(t)) => {
            let t = block_lengths(t, &g, limits)?;
            config.insert("t".into(), json!(t.to_string()));
            vec![t]
        }
        (None, None) => return Err(Error::invalid("--t-max or --t is required")),
    };
    if t_enum.iter().all(|t| t.total() == 0) {
        return Err(Error::invalid("no t with a positive bit count"));
    }
    let fmt = tuple_formatter(&g, limits);
    let mut cache = PointCache::new(&g, limits);
    let sums = sum_capacity_bounds_cached(&mut cache, &t_enum)?;
    let k = optimal_guessing_bound_cached(&mut cache, &t_enum)?;
    let n = Rational::from_integer(g.n().into());
    let k_complement = RateBound {
        quantity: Quantity::ComplementaryGuessingNumber,
        direction: crate::rates::BoundDirection::Upper,
        value: sums.c_sum.value.recip().scaled(&n),
        ..sums.c_sum.clone()
    };
    let mut checks = Vec::new();
    let mut ok = sums.all_identities_hold;
    for t in t_enum.iter().filter(|t| t.total() > 0) {
        let c = guessing_sum_check_cached(&mut cache, t)?;
        ok &= c.holds != Some(false);
        checks.push(value(&c));
    }
    let mut lines = vec![describe(&sums.c_sum), describe(&sums.r_sum), describe(&k), describe(&k_complement)];
    lines.push(format!("1/C_sum + 1/R_sum - 1 = {}", sums.sum_residual));
    let mut result = json!({
        "c_sum": bound_json(&sums.c_sum, &fmt),
        "r_sum": bound_json(&sums.r_sum, &fmt),
        "sum_identity_residual": value(&sums.sum_residual),
        "points": value(&sums.points),
        "guessing_number": bound_json(&k, &fmt),
        "complementary_guessing_number": bound_json(&k_complement, &fmt),
        "guessing_checks": checks,
    });
    if let Some(mu) = mu {
        let mu = WeightVector::parse(mu)?;
        config.insert("mu".into(), json!(mu.to_string()));
        let w = weighted_sum_bounds(&g, &mu, &t_enum, limits)?;
        lines.push(describe(&w.capacity));
        lines.push(describe(&w.rate));
        result["weighted"] = json!({
            "capacity": bound_json(&w.capacity, &fmt),
            "rate": bound_json(&w.rate, &fmt),
        });
    }
    lines.push(format!("identities hold: {ok}"));
    result["all_hold"] = json!(ok);
    Ok((result, lines, ok))
}

fn strategy_report(strategy: &GuessingStrategy, dump: bool) -> Result<(Value, Vec<String>)> {
    let layout = strategy.layout();
    let numbers = strategy.numbers()?;
    let mut v = json!({
        "winning": strategy.winning_set.len(),
        "p_win": strategy.p_win.to_string(),
        "p_rand": strategy.p_rand.to_string(),
        "numbers": value(&numbers),
    });
    if dump {
        v["winning_set"] = tuples(|x| layout.format_tuple(x), &strategy.winning_set);
        v["strategy"] = value(&strategy.to_document());
    }
    let k = numbers.k.as_ref().map_or("-inf".into(), ToString::to_string);
    let lines = vec![
        format!("|W|={} p_win={} p_rand={}", strategy.winning_set.len(), strategy.p_win, strategy.p_rand),
        format!("k={k} k'={}", numbers.k_complement),
    ];
    Ok((v, lines))
}

fn cmd_guess(
    common: &Common,
    t: &str,
    strategy: Option<&Path>,
    samples: Option<u64>,
    out: Option<&Path>,
    limits: &Limits,
    config: &mut Map<String, Value>,
) -> Result<Outputs> {
    let g = load_graph(common)?;
    let t = BlockLengths::parse(t)?;
    config.insert("t".into(), json!(t.to_string()));
    let tables = match strategy {
        Some(path) => {
            config.insert("strategy".into(), json!(path.display().to_string()));
            let doc: crate::guessing::StrategyDocument = serde_json::from_str(&read(path)?)
                .map_err(|e| Error::invalid(format!("strategy JSON: {e}")))?;
            if doc.t != t || crate::coding::internal_graph(&doc.graph)? != g {
                return Err(Error::invalid("strategy was built for a different graph or t"));
            }
            doc.guess_tables
                .iter()
                .map(|table| {
                    table
                        .iter()
                        .map(|(o, b)| Ok((crate::coding::parse_hex(o)?, crate::coding::parse_hex(b)?)))
                        .collect::<Result<_>>()
                })
                .collect::<Result<Vec<_>>>()?
        }
        None => {
            t.validate(g.n(), limits)?;
            let cg = ConfusionGraph::new(&g, &t, limits)?;
            let cert = confusion_independence(&cg, limits)?;
            let s: Vec<u64> = cert.witness.iter().map(|&v| v as u64).collect();
            strategy_from_independent_set(&g, &t, &s, limits)?.guess_tables
        }
    };
    if let Some(n) = samples {
        config.insert("samples".into(), json!(n));
    }
    let sampling = samples.map(|samples| Sampling { samples, seed: common.seed });
    match evaluate_strategy(&g, &t, tables, sampling, limits)? {
        Evaluation::Exact(s) => {
            if let Some(path) = out {
                write(path, &s.to_json())?;
            }
            let (mut v, lines) = strategy_report(&s, common.dump)?;
            v["mode"] = json!("exhaustive");
            Ok((v, lines, true))
        }
        Evaluation::Sampled(est) => {
            let lines = vec![format!(
                "p_win≈{:.6} ± {:.6} (95%, {} samples, seed {})",
                est.estimate, est.radius95, est.samples, est.seed
            )];
            let mut v = value(&est);
            v["mode"] = json!("sampled");
            Ok((v, lines, true))
        }
    }
}

fn storage_failures(code: &StorageCode) -> Result<(u64, u64)> {
    let mut ok = 0;
    let mut total = 0;
    for m in 0..code.codebook.len() {
        for j in 0..code.layout().n() {
            total += 1;
            if code.simulate_failure(m, j)?.ok {
                ok += 1;
            }
        }
    }
    Ok((ok, total))
}

fn cmd_codegen(
    common: &Common,
    t: &str,
    kind: CodeKind,
    out: Option<&Path>,
    limits: &Limits,
    config: &mut Map<String, Value>,
) -> Result<Outputs> {
    let g = load_graph(common)?;
    let t = block_lengths(t, &g, limits)?;
    config.insert("t".into(), json!(t.to_string()));
    config.insert("kind".into(), json!(format!("{kind:?}").to_lowercase()));
    let cg = ConfusionGraph::new(&g, &t, limits)?;
    let (json_text, mut result, mut lines, ok) = match kind {
        CodeKind::Index => {
            let coloring = chromatic_number(&cg.to_explicit(limits)?, limits)?;
            let code = index_code_from_coloring(&g, &t, &coloring, limits)?;
            let report = code.verify();
            let lines = vec![
                format!("index code: r={} from a {}-coloring", code.r, coloring.count),
                format!("verified: {} ({} checks)", report.passed, report.checked),
            ];
            let v = json!({ "r": code.r, "colors": coloring.count, "verify": value(&report) });
            (code.to_json(), v, lines, report.passed)
        }
        CodeKind::Storage => {
            let cert = confusion_independence(&cg, limits)?;
            let s: Vec<u64> = cert.witness.iter().map(|&v| v as u64).collect();
            let code = storage_code_from_independent_set(&g, &t, &s, limits)?;
            let report = code.verify();
            let (recovered, total) = storage_failures(&code)?;
            let lines = vec![
                format!("storage code: r={} from an independent set of size {}", code.r, cert.alpha),
                format!("verified: {} ({} checks)", report.passed, report.checked),
                format!("single failures recovered: {recovered}/{total}"),
            ];
            let v = json!({
                "r": code.r,
                "alpha": cert.alpha,
                "verify": value(&report),
                "failures_recovered": recovered,
                "failures_simulated": total,
            });
            let ok = report.passed && recovered == total;
            (code.to_json(), v, lines, ok)
        }
        CodeKind::Guessing => {
            let cert = confusion_independence(&cg, limits)?;
            let s: Vec<u64> = cert.witness.iter().map(|&v| v as u64).collect();
            let strategy = strategy_from_independent_set(&g, &t, &s, limits)?;
            let (v, lines) = strategy_report(&strategy, false)?;
            let ok = strategy.winning_set.len() >= cert.alpha;
            (strategy.to_json(), v, lines, ok)
        }
    };
    match out {
        Some(path) => {
            write(path, &json_text)?;
            lines.push(format!("written to {}", path.display()));
        }
        None if common.dump => {
            result["code"] = serde_json::from_str(&json_text).expect("valid JSON");
        }
        None => {}
    }
    Ok((result, lines, ok))
}

fn cmd_verify(common: &Common, path: &Path, limits: &Limits, config: &mut Map<String, Value>) -> Result<Outputs> {
    config.insert("code".into(), json!(path.display().to_string()));
    let text = read(path)?;
    let kind = serde_json::from_str::<Value>(&text)
        .ok()
        .and_then(|v| v.get("kind").and_then(Value::as_str).map(str::to_owned));
    if kind.as_deref() == Some("guessing") {
        let strategy = GuessingStrategy::from_json(&text, limits)?;
        let (mut v, mut lines) = strategy_report(&strategy, common.dump)?;
        let layout = strategy.layout();
        let independent = crate::coding::check_independent(layout, &strategy.winning_set).is_ok();
        v["winning_set_independent"] = json!(independent);
        lines.push(format!("winning set independent: {independent}"));
        return Ok((v, lines, independent));
    }
    let code = Code::from_json(&text, limits)?;
    let report = code.verify();
    let mut result = json!({ "kind": kind, "verify": value(&report) });
    let mut lines = vec![format!("verified: {} ({} checks)", report.passed, report.checked)];
    if let Some(c) = &report.counterexample {
        lines.push(format!("counterexample: {}", serde_json::to_string(c).expect("serializable")));
    }
    let mut ok = report.passed;
    if let (Code::Storage(code), true) = (&code, report.passed) {
        let (recovered, total) = storage_failures(code)?;
        result["failures_recovered"] = json!(recovered);
        result["failures_simulated"] = json!(total);
        lines.push(format!("single failures recovered: {recovered}/{total}"));
        ok &= recovered == total;
    }
    Ok((result, lines, ok))
}
