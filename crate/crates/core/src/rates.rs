//! Certified one-sided bounds on index-coding capacity, storage rates and
//! their sum and weighted-sum variants, with the complementarity checks
//! tying them together.
//!
//! Every bound is witnessed by a block-length tuple `t`. With `α = α(Γ_t)`
//! and `χ_f = 2^{Σt} / α`, the index-coding corner point at `t` is
//! `t_j / log2 χ_f` and the storage corner point is `t_j / log2 α`. Values
//! are kept as [`LogForm`]s and compared exactly.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::confusion::ConfusionGraph;
use crate::error::{Error, Result};
use crate::fracchrom::fractional_chromatic_lp;
use crate::graph::{BlockLengths, SideInformationGraph};
use crate::independence::confusion_independence;
use crate::limits::Limits;
use crate::Rational;

/// Nonnegative rational weights, one per node (a direction `λ` or the
/// weights `μ` of a weighted sum).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector(Vec<Rational>);

impl WeightVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.iter().any(|x| x.is_negative()) {
            return Err(Error::invalid("weights must be nonnegative"));
        }
        Ok(WeightVector(entries))
    }

    pub fn ones(n: usize) -> Self {
        WeightVector(vec![Rational::one(); n])
    }

    /// Parses `"1,1/2,0"`.
    pub fn parse(text: &str) -> Result<Self> {
        let entries = text
            .split(',')
            .map(|f| parse_rational(f.trim()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    fn check_len(&self, n: usize, what: &'static str) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::LengthMismatch {
                what,
                expected: n,
                actual: self.0.len(),
            });
        }
        Ok(())
    }

    pub fn check_direction(&self, n: usize) -> Result<()> {
        self.check_len(n, "direction")?;
        if self.is_zero() {
            return Err(Error::invalid("direction must have a positive entry"));
        }
        Ok(())
    }

    /// `r · self` when every entry becomes an integer.
    pub fn scale(&self, r: u64) -> Option<BlockLengths> {
        let r = Rational::from_integer(BigInt::from(r));
        self.0
            .iter()
            .map(|x| {
                let v = x * &r;
                if v.is_integer() {
                    v.to_integer().to_u32()
                } else {
                    None
                }
            })
            .collect::<Option<Vec<u32>>>()
            .map(BlockLengths::new)
    }

    /// `Σ_i self_i · t_i`.
    pub fn dot(&self, t: &BlockLengths) -> Rational {
        self.0
            .iter()
            .zip(t.as_slice())
            .map(|(w, &ti)| w * BigInt::from(ti))
            .sum()
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Parses `"3"` or `"3/4"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::invalid(format!("bad rational {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// An exact real of the form `coef / log2(base)` or `coef · log2(base)`.
///
/// `base ≥ 1` and `coef ≥ 0` throughout. A quotient with `base = 1` and a
/// positive coefficient is `+∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LogForm {
    PerLog { coef: Rational, base: Rational },
    TimesLog { coef: Rational, base: Rational },
}

impl LogForm {
    pub fn per_log(coef: Rational, base: Rational) -> Self {
        debug_assert!(!coef.is_negative() && base >= Rational::one());
        LogForm::PerLog { coef, base }
    }

    pub fn times_log(coef: Rational, base: Rational) -> Self {
        debug_assert!(!coef.is_negative() && base >= Rational::one());
        LogForm::TimesLog { coef, base }
    }

    pub fn zero() -> Self {
        LogForm::times_log(Rational::zero(), Rational::one())
    }

    pub fn infinity() -> Self {
        LogForm::per_log(Rational::one(), Rational::one())
    }

    fn parts(&self) -> (&Rational, &Rational) {
        match self {
            LogForm::PerLog { coef, base } | LogForm::TimesLog { coef, base } => (coef, base),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, LogForm::PerLog { coef, base } if base.is_one() && coef.is_positive())
    }

    pub fn is_zero(&self) -> bool {
        let (coef, base) = self.parts();
        coef.is_zero() || matches!(self, LogForm::TimesLog { .. }) && base.is_one()
    }

    /// `1 / self`.
    pub fn recip(&self) -> Self {
        match self {
            LogForm::PerLog { coef, base } if !coef.is_zero() => LogForm::TimesLog {
                coef: coef.recip(),
                base: base.clone(),
            },
            LogForm::TimesLog { coef, base } if !coef.is_zero() && !base.is_one() => LogForm::PerLog {
                coef: coef.recip(),
                base: base.clone(),
            },
            _ if self.is_infinite() => LogForm::zero(),
            _ => LogForm::infinity(),
        }
    }

    /// `c · self` for `c ≥ 0`.
    pub fn scaled(&self, c: &Rational) -> Self {
        match self {
            LogForm::PerLog { coef, base } => LogForm::per_log(coef * c, base.clone()),
            LogForm::TimesLog { coef, base } => LogForm::times_log(coef * c, base.clone()),
        }
    }

    /// The value as a rational, when `base` is a power of two (or the value
    /// is zero).
    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        let (coef, base) = self.parts();
        let e = exact_log2(base)?;
        match self {
            LogForm::PerLog { .. } if e.is_zero() => None,
            LogForm::PerLog { .. } => Some(coef / int(e)),
            LogForm::TimesLog { .. } => Some(coef * int(e)),
        }
    }

    /// Floating-point display hint; never used to decide anything.
    pub fn to_f64(&self) -> f64 {
        if self.is_infinite() {
            return f64::INFINITY;
        }
        if self.is_zero() {
            return 0.0;
        }
        let (coef, base) = self.parts();
        let c = coef.to_f64().unwrap_or(f64::NAN);
        match self {
            LogForm::PerLog { .. } => c / log2_approx(base),
            LogForm::TimesLog { .. } => c * log2_approx(base),
        }
    }

    /// A rational enclosure `[lo, hi]` of the value; `None` when infinite.
    pub fn enclosure(&self) -> Option<(Rational, Rational)> {
        if let Some(v) = self.as_rational() {
            return Some((v.clone(), v));
        }
        if self.is_infinite() {
            return None;
        }
        let (coef, base) = self.parts();
        let (llo, lhi) = log2_enclosure(base);
        Some(match self {
            LogForm::PerLog { .. } => (coef / lhi, coef / llo),
            LogForm::TimesLog { .. } => (coef * llo, coef * lhi),
        })
    }

    /// Exact comparison between forms of the same shape.
    ///
    /// `a / log p` against `b / log q` is decided as `q^a` against `p^b`,
    /// and `a · log p` against `b · log q` as `p^a` against `q^b`.
    pub fn exact_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => return Some(Ordering::Equal),
            (true, false) => return Some(Ordering::Greater),
            (false, true) => return Some(Ordering::Less),
            _ => {}
        }
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Some(Ordering::Equal),
            (true, false) => return Some(Ordering::Less),
            (false, true) => return Some(Ordering::Greater),
            _ => {}
        }
        match (self, other) {
            (LogForm::PerLog { coef: a, base: p }, LogForm::PerLog { coef: b, base: q }) => Some(power_cmp(q, a, p, b)),
            (LogForm::TimesLog { coef: a, base: p }, LogForm::TimesLog { coef: b, base: q }) => {
                Some(power_cmp(p, a, q, b))
            }
            _ => None,
        }
    }

    pub fn exact_eq(&self, other: &Self) -> bool {
        self.exact_cmp(other) == Some(Ordering::Equal)
    }
}

impl fmt::Display for LogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            return write!(f, "inf");
        }
        if let Some(v) = self.as_rational() {
            return write!(f, "{v}");
        }
        match self {
            LogForm::PerLog { coef, base } => write!(f, "{coef}/log2({base})"),
            LogForm::TimesLog { coef, base } if coef.is_one() => write!(f, "log2({base})"),
            LogForm::TimesLog { coef, base } => write!(f, "{coef}*log2({base})"),
        }
    }
}

impl Serialize for LogForm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let (coef, base) = self.parts();
        let mut s = serializer.serialize_struct("LogForm", 5)?;
        s.serialize_field("exact", &self.to_string())?;
        s.serialize_field(
            "form",
            match self {
                LogForm::PerLog { .. } => "coef/log2(base)",
                LogForm::TimesLog { .. } => "coef*log2(base)",
            },
        )?;
        s.serialize_field("coef", &coef.to_string())?;
        s.serialize_field("base", &base.to_string())?;
        let approx = self.to_f64();
        s.serialize_field("approx", &approx.is_finite().then_some(approx))?;
        s.end()
    }
}

/// `e` with `r = 2^e`, if any.
fn exact_log2(r: &Rational) -> Option<i64> {
    let power = |x: &BigInt| -> Option<i64> {
        let b = x.magnitude();
        let tz = b.trailing_zeros()?;
        (b >> tz).is_one().then_some(tz as i64)
    };
    if !r.is_positive() {
        return None;
    }
    Some(power(r.numer())? - power(r.denom())?)
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("small enough").log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("64 bits").log2() + shift as f64
}

fn log2_approx(r: &Rational) -> f64 {
    log2_big(r.numer().magnitude()) - log2_big(r.denom().magnitude())
}

/// Rational bounds around `log2(r)`, widened well past the floating-point
/// error of [`log2_approx`].
fn log2_enclosure(r: &Rational) -> (Rational, Rational) {
    let approx = log2_approx(r);
    let slack = 1e-9 * (1.0 + approx.abs());
    let lo = Rational::from_float((approx - slack).max(0.0)).expect("finite");
    let hi = Rational::from_float(approx + slack).expect("finite");
    // A positive lower bound keeps quotients finite; log2(r) ≥ log2(1 + 1/d) > 1/(2d) for r > 1.
    let floor = Rational::new(BigInt::one(), r.denom() * BigInt::from(2));
    (if lo.is_zero() { floor } else { lo }, hi)
}

/// Compares `p^a` with `q^b` for `p, q > 0` and rational `a, b ≥ 0`.
fn power_cmp(p: &Rational, a: &Rational, q: &Rational, b: &Rational) -> Ordering {
    // Raise both sides to the power a.den · b.den to clear denominators.
    let ea = a.numer() * b.denom();
    let eb = b.numer() * a.denom();
    let ea = ea.to_u32().expect("exponent fits in u32");
    let eb = eb.to_u32().expect("exponent fits in u32");
    let lhs = p.numer().pow(ea) * q.denom().pow(eb);
    let rhs = q.numer().pow(eb) * p.denom().pow(ea);
    lhs.cmp(&rhs)
}

/// `α(Γ_t)` and `χ_f(Γ_t) = 2^{Σt} / α(Γ_t)` at one block-length tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfusionPoint {
    pub t: BlockLengths,
    pub alpha: usize,
    #[serde(serialize_with = "crate::rates::serialize_rational")]
    pub chi_f: Rational,
    /// A maximum independent set of `Γ_t`, as packed tuples.
    pub witness: Vec<u64>,
}

impl ConfusionPoint {
    pub fn compute(g: &SideInformationGraph, t: &BlockLengths, limits: &Limits) -> Result<Self> {
        let cg = ConfusionGraph::new(g, t, limits)?;
        let cert = confusion_independence(&cg, limits)?;
        let chi_f = Rational::new(BigInt::one() << t.total(), BigInt::from(cert.alpha));
        Ok(ConfusionPoint {
            t: t.clone(),
            alpha: cert.alpha,
            chi_f,
            witness: cert.witness.iter().map(|&v| v as u64).collect(),
        })
    }

    pub fn total(&self) -> u32 {
        self.t.total()
    }

    fn alpha_rational(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.alpha))
    }

    /// `c / log2 χ_f`.
    pub fn per_log_chi(&self, c: Rational) -> LogForm {
        LogForm::per_log(c, self.chi_f.clone())
    }

    /// `c / log2 α`; infinite when `α = 1`.
    pub fn per_log_alpha(&self, c: Rational) -> LogForm {
        LogForm::per_log(c, self.alpha_rational())
    }

    /// The index-coding corner point `(t_j / log2 χ_f)_j`.
    pub fn capacity_point(&self) -> Vec<LogForm> {
        self.t
            .as_slice()
            .iter()
            .map(|&tj| self.per_log_chi(int(tj)))
            .collect()
    }

    /// The storage corner point `(t_j / log2 α)_j`, absent when `α = 1`.
    pub fn storage_point(&self) -> Option<Vec<LogForm>> {
        (self.alpha > 1).then(|| {
            self.t
                .as_slice()
                .iter()
                .map(|&tj| self.per_log_alpha(int(tj)))
                .collect()
        })
    }

    /// `χ_f · α = 2^{Σt}`; true by construction here, so this only matters
    /// for points whose `χ_f` came from elsewhere.
    pub fn product_identity(&self) -> bool {
        &self.chi_f * self.alpha_rational() == Rational::from_integer(BigInt::one() << self.total())
    }
}

pub(crate) fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub(crate) fn int(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

/// Memoized [`ConfusionPoint`]s for one graph.
pub struct PointCache<'a> {
    g: &'a SideInformationGraph,
    limits: &'a Limits,
    points: BTreeMap<BlockLengths, ConfusionPoint>,
}

impl<'a> PointCache<'a> {
    pub fn new(g: &'a SideInformationGraph, limits: &'a Limits) -> Self {
        PointCache {
            g,
            limits,
            points: BTreeMap::new(),
        }
    }

    pub fn get(&mut self, t: &BlockLengths) -> Result<&ConfusionPoint> {
        if !self.points.contains_key(t) {
            t.validate(self.g.n(), self.limits)?;
            let point = ConfusionPoint::compute(self.g, t, self.limits)?;
            self.points.insert(t.clone(), point);
        }
        Ok(&self.points[t])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `C(λ)`
    Capacity,
    /// `R(λ)`
    StorageRate,
    SymmetricCapacity,
    SymmetricRate,
    /// `β = 1 / C_sym`
    BroadcastRate,
    SumCapacity,
    SumRate,
    /// `C̄(μ)`
    WeightedSumCapacity,
    /// `R̄(μ)`
    WeightedSumRate,
    /// `k(G)`
    GuessingNumber,
    /// `k'(G)`
    ComplementaryGuessingNumber,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    Lower,
    Upper,
}

/// A certified one-sided bound together with the point achieving it.
#[derive(Clone, Debug, Serialize)]
pub struct RateBound {
    pub quantity: Quantity,
    pub direction: BoundDirection,
    pub value: LogForm,
    /// Scaling `r` behind a directional bound (`t = rλ`).
    pub r: Option<u64>,
    /// `None` only when nothing finite was found (an infinite upper bound).
    pub witness: Option<ConfusionPoint>,
    pub exhausted_range: String,
    /// Candidates with `α = 1`, which contribute nothing to a storage bound.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<BlockLengths>,
}

impl RateBound {
    /// The bound on `1 / quantity` in the opposite direction.
    pub fn reciprocal(&self, quantity: Quantity) -> RateBound {
        RateBound {
            quantity,
            direction: match self.direction {
                BoundDirection::Lower => BoundDirection::Upper,
                BoundDirection::Upper => BoundDirection::Lower,
            },
            value: self.value.recip(),
            ..self.clone()
        }
    }
}

pub(crate) struct Candidate {
    pub(crate) value: LogForm,
    pub(crate) r: Option<u64>,
    pub(crate) point: ConfusionPoint,
}

/// Keeps the best candidate: larger values for lower bounds, smaller for
/// upper bounds, the first one seen on ties.
pub(crate) fn select(best: &mut Option<Candidate>, cand: Candidate, direction: BoundDirection) {
    let better = match best {
        None => true,
        Some(b) => {
            let ord = cand.value.exact_cmp(&b.value).expect("candidates share a shape");
            match direction {
                BoundDirection::Lower => ord == Ordering::Greater,
                BoundDirection::Upper => ord == Ordering::Less,
            }
        }
    };
    if better {
        *best = Some(cand);
    }
}

pub(crate) fn finish(
    best: Option<Candidate>,
    quantity: Quantity,
    direction: BoundDirection,
    range: String,
    skipped: Vec<BlockLengths>,
) -> RateBound {
    match best {
        Some(c) => RateBound {
            quantity,
            direction,
            value: c.value,
            r: c.r,
            witness: Some(c.point),
            exhausted_range: range,
            skipped,
        },
        None => RateBound {
            quantity,
            direction,
            value: match direction {
                BoundDirection::Lower => LogForm::zero(),
                BoundDirection::Upper => LogForm::infinity(),
            },
            r: None,
            witness: None,
            exhausted_range: range,
            skipped,
        },
    }
}

fn describe_r_range(r_range: &[u64]) -> String {
    let parts: Vec<String> = r_range.iter().map(u64::to_string).collect();
    format!("r in {{{}}}", parts.join(","))
}

pub(crate) fn describe_t_range(t_enum: &[BlockLengths]) -> String {
    match t_enum {
        [] => "no t".into(),
        [t] => format!("t = {t}"),
        [first, .., last] => format!("{} tuples t from {first} to {last}", t_enum.len()),
    }
}

fn symmetric(lambda: &WeightVector) -> bool {
    lambda.entries().windows(2).all(|w| w[0] == w[1])
}

/// The admissible `(r, rλ)` pairs: `rλ` integral and within the bit cap.
fn admissible(g: &SideInformationGraph, lambda: &WeightVector, r_range: &[u64], limits: &Limits) -> Result<Vec<(u64, BlockLengths)>> {
    lambda.check_direction(g.n())?;
    let mut out = Vec::new();
    for &r in r_range {
        if r == 0 {
            continue;
        }
        if let Some(t) = lambda.scale(r) {
            t.validate(g.n(), limits)?;
            out.push((r, t));
        }
    }
    if out.is_empty() {
        return Err(Error::NoAdmissibleScale);
    }
    Ok(out)
}

/// `C(λ) ≥ max_r r / log2 χ_f(Γ_{rλ})` over the admissible `r` in range.
pub fn capacity_lower_bound(
    g: &SideInformationGraph,
    lambda: &WeightVector,
    r_range: &[u64],
    limits: &Limits,
) -> Result<RateBound> {
    let mut cache = PointCache::new(g, limits);
    capacity_lower_bound_cached(&mut cache, lambda, r_range)
}

pub fn capacity_lower_bound_cached(cache: &mut PointCache, lambda: &WeightVector, r_range: &[u64]) -> Result<RateBound> {
    let mut best = None;
    for (r, t) in admissible(cache.g, lambda, r_range, cache.limits)? {
        let point = cache.get(&t)?.clone();
        let value = point.per_log_chi(int(r));
        select(&mut best, Candidate { value, r: Some(r), point }, BoundDirection::Lower);
    }
    let quantity = if symmetric(lambda) {
        Quantity::SymmetricCapacity
    } else {
        Quantity::Capacity
    };
    Ok(finish(best, quantity, BoundDirection::Lower, describe_r_range(r_range), Vec::new()))
}

/// `R(λ) ≤ min_r r / log2 α(Γ_{rλ})`; `r` with `α = 1` are skipped, and
/// the bound is `+∞` when every admissible `r` is.
pub fn storage_rate_upper_bound(
    g: &SideInformationGraph,
    lambda: &WeightVector,
    r_range: &[u64],
    limits: &Limits,
) -> Result<RateBound> {
    let mut cache = PointCache::new(g, limits);
    storage_rate_upper_bound_cached(&mut cache, lambda, r_range)
}

pub fn storage_rate_upper_bound_cached(cache: &mut PointCache, lambda: &WeightVector, r_range: &[u64]) -> Result<RateBound> {
    let mut best = None;
    let mut skipped = Vec::new();
    for (r, t) in admissible(cache.g, lambda, r_range, cache.limits)? {
        let point = cache.get(&t)?.clone();
        if point.alpha == 1 {
            skipped.push(t);
            continue;
        }
        let value = point.per_log_alpha(int(r));
        select(&mut best, Candidate { value, r: Some(r), point }, BoundDirection::Upper);
    }
    let quantity = if symmetric(lambda) {
        Quantity::SymmetricRate
    } else {
        Quantity::StorageRate
    };
    Ok(finish(best, quantity, BoundDirection::Upper, describe_r_range(r_range), skipped))
}

/// `χ_f(Γ_{rλ}) · α(Γ_{rλ}) = 2^{Σ rλ_i}`, with `χ_f` from the LP rather
/// than the transitivity shortcut.
#[derive(Clone, Debug, Serialize)]
pub struct DualityCheck {
    pub t: BlockLengths,
    #[serde(serialize_with = "serialize_rational")]
    pub chi_f_lp: Rational,
    pub alpha: usize,
    pub total_bits: u32,
    pub holds: bool,
}

pub fn duality_identity_check(
    g: &SideInformationGraph,
    lambda: &WeightVector,
    r: u64,
    limits: &Limits,
) -> Result<DualityCheck> {
    let (_, t) = admissible(g, lambda, &[r], limits)?.remove(0);
    duality_identity_at(g, &t, limits)
}

pub fn duality_identity_at(g: &SideInformationGraph, t: &BlockLengths, limits: &Limits) -> Result<DualityCheck> {
    t.validate(g.n(), limits)?;
    let cg = ConfusionGraph::new(g, t, limits)?;
    let alpha = confusion_independence(&cg, limits)?.alpha;
    let explicit = cg.to_explicit(limits)?;
    let chi_f_lp = fractional_chromatic_lp(&explicit, limits)?.chi_f;
    let holds = &chi_f_lp * int(alpha) == int(BigInt::one() << t.total());
    Ok(DualityCheck {
        t: t.clone(),
        chi_f_lp,
        alpha,
        total_bits: t.total(),
        holds,
    })
}

/// A rational interval `[lo, hi]`; unbounded above when `hi` is `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    #[serde(serialize_with = "serialize_rational")]
    pub lo: Rational,
    #[serde(serialize_with = "serialize_optional_rational")]
    pub hi: Option<Rational>,
}

fn serialize_optional_rational<S: serde::Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl Interval {
    pub fn point(v: Rational) -> Self {
        Interval {
            lo: v.clone(),
            hi: Some(v),
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && self.hi.as_ref().is_none_or(|h| !h.is_negative())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.hi {
            Some(h) if *h == self.lo => write!(f, "{h}"),
            Some(h) => write!(f, "[{}, {h}]", self.lo),
            None => write!(f, "[{}, inf)", self.lo),
        }
    }
}

/// Encloses `a + b - c`, where `a` and `b` are finite.
fn residual(a: &LogForm, b: &LogForm, c: &Rational) -> Interval {
    match (a.enclosure(), b.enclosure()) {
        (Some((alo, ahi)), Some((blo, bhi))) => Interval {
            lo: alo + blo - c,
            hi: Some(ahi + bhi - c),
        },
        _ => Interval {
            lo: Rational::zero(),
            hi: None,
        },
    }
}

/// Both sides of `1/C = Σλ − 1/R` for a capacity and a storage bound.
#[derive(Clone, Debug, Serialize)]
pub struct Complementarity {
    /// Whether both bounds come from the same `t`.
    pub matched: bool,
    /// `1/C`
    pub lhs: LogForm,
    /// `Σλ − 1/R` when matched; otherwise `None` (the difference of two
    /// logarithms of unrelated bases has no single log-form).
    pub rhs: Option<LogForm>,
    /// Exact verdict, only for matched witnesses.
    pub exact: Option<bool>,
    /// `1/C + 1/R − Σλ`.
    pub residual: Interval,
    /// `(1/C) / Σλ` and `1 − (1/R) / Σλ`, which do not depend on how `λ`
    /// is scaled.
    pub normalized: (LogForm, Option<LogForm>),
}

/// Checks `1/C(λ) = Σλ − 1/R(λ)` on a pair of bounds.
///
/// With a common witness `t = rλ`, `1/C = log2 χ_f / r` and
/// `Σλ − 1/R = log2(2^{Σt} / α) / r`, so the identity is exact. With
/// different witnesses only the enclosing interval of the gap is reported.
pub fn complementarity(cl: &RateBound, rl: &RateBound, lambda: &WeightVector) -> Result<Complementarity> {
    let (Some(cw), Some(rw)) = (&cl.witness, &rl.witness) else {
        return Err(Error::invalid("both bounds need a finite witness"));
    };
    lambda.check_len(cw.t.len(), "direction")?;
    let sum = lambda.sum();
    if sum.is_zero() {
        return Err(Error::invalid("direction must have a positive entry"));
    }
    for (bound, w) in [(cl, cw), (rl, rw)] {
        let r = bound.r.ok_or_else(|| Error::invalid("bound carries no scaling r"))?;
        if lambda.scale(r).as_ref() != Some(&w.t) {
            return Err(Error::invalid(format!("witness {} is not r·λ for r = {r} and λ = {lambda}", w.t)));
        }
    }
    let lhs = cl.value.recip();
    let inv_r = rl.value.recip();
    let residual_iv = residual(&lhs, &inv_r, &sum);
    let matched = cw.t == rw.t;
    let (rhs, exact) = if matched {
        let r = int(cl.r.expect("checked above"));
        let rhs = LogForm::times_log(r.recip(), Rational::from_integer(BigInt::one() << cw.total()) / int(rw.alpha));
        let exact = lhs.exact_eq(&rhs);
        (Some(rhs), Some(exact))
    } else {
        (None, None)
    };
    let residual = if exact == Some(true) {
        Interval::point(Rational::zero())
    } else {
        residual_iv
    };
    let normalized = (
        lhs.scaled(&sum.recip()),
        rhs.as_ref().map(|v| v.scaled(&sum.recip())),
    );
    Ok(Complementarity {
        matched,
        lhs,
        rhs,
        exact,
        residual,
        normalized,
    })
}

/// The achievable sum-rate points at one `t`.
#[derive(Clone, Debug, Serialize)]
pub struct SumPoint {
    pub t: BlockLengths,
    pub alpha: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub chi_f: Rational,
    /// `Σt / log2 χ_f`
    pub c_sum: LogForm,
    /// `Σt / log2 α`, infinite when `α = 1`.
    pub r_sum: LogForm,
    /// `1 / c_sum = 1 − 1 / r_sum` exactly.
    pub identity: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SumBounds {
    pub c_sum: RateBound,
    pub r_sum: RateBound,
    /// `1/C_sum + 1/R_sum − 1` for the two best bounds.
    pub sum_residual: Interval,
    pub points: Vec<SumPoint>,
    pub all_identities_hold: bool,
}

/// `C_sum ≥ max_t Σt / log2 χ_f(Γ_t)` and `R_sum ≤ min_t Σt / log2 α(Γ_t)`
/// over `t_enum` (tuples with `Σt = 0` are ignored), checking
/// `1/C_sum = 1 − 1/R_sum` at every point.
pub fn sum_capacity_bounds(g: &SideInformationGraph, t_enum: &[BlockLengths], limits: &Limits) -> Result<SumBounds> {
    let mut cache = PointCache::new(g, limits);
    sum_capacity_bounds_cached(&mut cache, t_enum)
}

pub fn sum_capacity_bounds_cached(cache: &mut PointCache, t_enum: &[BlockLengths]) -> Result<SumBounds> {
    let mut best_c = None;
    let mut best_r = None;
    let mut skipped = Vec::new();
    let mut points = Vec::new();
    for t in t_enum.iter().filter(|t| t.total() > 0) {
        let point = cache.get(t)?.clone();
        let total = int(point.total());
        let c_sum = point.per_log_chi(total.clone());
        let r_sum = point.per_log_alpha(total);
        // 1/c_sum = log2 χ_f / Σt and 1 − 1/r_sum = log2(2^{Σt}/α) / Σt.
        let rhs = LogForm::times_log(
            int(point.total()).recip(),
            int(BigInt::one() << point.total()) / int(point.alpha),
        );
        let identity = c_sum.recip().exact_eq(&rhs);
        points.push(SumPoint {
            t: t.clone(),
            alpha: point.alpha,
            chi_f: point.chi_f.clone(),
            c_sum: c_sum.clone(),
            r_sum: r_sum.clone(),
            identity,
        });
        select(&mut best_c, Candidate { value: c_sum, r: None, point: point.clone() }, BoundDirection::Lower);
        if point.alpha == 1 {
            skipped.push(t.clone());
        } else {
            select(&mut best_r, Candidate { value: r_sum, r: None, point }, BoundDirection::Upper);
        }
    }
    let range = describe_t_range(t_enum);
    let c_sum = finish(best_c, Quantity::SumCapacity, BoundDirection::Lower, range.clone(), Vec::new());
    let r_sum = finish(best_r, Quantity::SumRate, BoundDirection::Upper, range, skipped);
    let sum_residual = if c_sum.witness.is_some() && r_sum.witness.is_some() {
        residual(&c_sum.value.recip(), &r_sum.value.recip(), &Rational::one())
    } else {
        Interval {
            lo: Rational::zero(),
            hi: None,
        }
    };
    let sum_residual = if c_sum.witness.as_ref().map(|w| &w.t) == r_sum.witness.as_ref().map(|w| &w.t)
        && points.iter().all(|p| p.identity)
        && c_sum.witness.is_some()
    {
        Interval::point(Rational::zero())
    } else {
        sum_residual
    };
    let all_identities_hold = points.iter().all(|p| p.identity);
    Ok(SumBounds {
        c_sum,
        r_sum,
        sum_residual,
        points,
        all_identities_hold,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightedSumBounds {
    pub capacity: RateBound,
    pub rate: RateBound,
}

/// `C̄(μ) ≥ max_t Σμ_i t_i / log2 χ_f(Γ_t)` and
/// `R̄(μ) ≤ min_{t: α > 1} Σμ_i t_i / log2 α(Γ_t)`.
pub fn weighted_sum_bounds(
    g: &SideInformationGraph,
    mu: &WeightVector,
    t_enum: &[BlockLengths],
    limits: &Limits,
) -> Result<WeightedSumBounds> {
    mu.check_len(g.n(), "weights")?;
    let mut cache = PointCache::new(g, limits);
    let mut best_c = None;
    let mut best_r = None;
    let mut skipped = Vec::new();
    for t in t_enum.iter().filter(|t| t.total() > 0) {
        let point = cache.get(t)?.clone();
        let weight = mu.dot(t);
        let c = point.per_log_chi(weight.clone());
        select(&mut best_c, Candidate { value: c, r: None, point: point.clone() }, BoundDirection::Lower);
        if point.alpha == 1 {
            skipped.push(t.clone());
            continue;
        }
        let r = point.per_log_alpha(weight);
        select(&mut best_r, Candidate { value: r, r: None, point }, BoundDirection::Upper);
    }
    let range = describe_t_range(t_enum);
    Ok(WeightedSumBounds {
        capacity: finish(best_c, Quantity::WeightedSumCapacity, BoundDirection::Lower, range.clone(), Vec::new()),
        rate: finish(best_r, Quantity::WeightedSumRate, BoundDirection::Upper, range, skipped),
    })
}

/// Corner points of the two regions at one `t`.
#[derive(Clone, Debug, Serialize)]
pub struct RegionPoint {
    pub t: BlockLengths,
    pub alpha: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub chi_f: Rational,
    pub capacity: Vec<LogForm>,
    /// Absent when `α = 1`.
    pub storage: Option<Vec<LogForm>>,
}

/// Corner points for every nonzero `t ≤ t_max`, in lexicographic order.
pub fn region_sample(g: &SideInformationGraph, t_max: &BlockLengths, limits: &Limits) -> Result<Vec<RegionPoint>> {
    t_max.validate(g.n(), limits)?;
    let mut cache = PointCache::new(g, limits);
    t_max
        .below()
        .into_iter()
        .filter(|t| t.total() > 0)
        .map(|t| {
            let point = cache.get(&t)?;
            Ok(RegionPoint {
                t,
                alpha: point.alpha,
                chi_f: point.chi_f.clone(),
                capacity: point.capacity_point(),
                storage: point.storage_point(),
            })
        })
        .collect()
}

/// `1, ..., r_max`.
pub fn r_range_up_to(r_max: u64) -> Vec<u64> {
    (1..=r_max).collect()
}

/// Nonzero `t ≤ t_max` within the bit cap, in lexicographic order.
pub fn t_range_up_to(t_max: &BlockLengths, limits: &Limits) -> Vec<BlockLengths> {
    t_max
        .below()
        .into_iter()
        .filter(|t| t.total() > 0 && t.total() <= limits.max_total_bits)
        .collect()
}

/// Smallest `r ≥ 1` making `rλ` integral.
pub fn least_scale(lambda: &WeightVector) -> u64 {
    lambda
        .entries()
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
        .to_u64()
        .expect("denominators fit in u64")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn three_node() -> SideInformationGraph {
        SideInformationGraph::from_in_sets(vec![vec![1, 2], vec![0], vec![0, 1]]).unwrap()
    }

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn parses_weights() {
        let w = WeightVector::parse("1, 1/2,0,6/4").unwrap();
        assert_eq!(w.entries(), &[q(1, 1), q(1, 2), q(0, 1), q(3, 2)]);
        assert!(WeightVector::parse("-1").is_err());
        assert!(WeightVector::parse("1/0").is_err());
        assert!(WeightVector::parse("x").is_err());
        assert_eq!(least_scale(&w), 2);
        assert_eq!(w.scale(1), None);
        assert_eq!(w.scale(4), Some(BlockLengths::new(vec![4, 2, 0, 6])));
    }

    #[test]
    fn log_forms_compare_exactly() {
        // 1/log2 3 < 1/log2 2 = 1 and 2/log2 3 > 1.
        let a = LogForm::per_log(q(1, 1), q(3, 1));
        let one = LogForm::per_log(q(1, 1), q(2, 1));
        let b = LogForm::per_log(q(2, 1), q(3, 1));
        assert_eq!(a.exact_cmp(&one), Some(Ordering::Less));
        assert_eq!(b.exact_cmp(&one), Some(Ordering::Greater));
        // 5/log2 8 = 5/3 and 10/log2 64 = 5/3 agree.
        let c = LogForm::per_log(q(5, 1), q(8, 1));
        let d = LogForm::per_log(q(10, 1), q(64, 1));
        assert!(c.exact_eq(&d));
        assert_eq!(c.as_rational(), Some(q(5, 3)));
        // log2(5/2) against half of log2(25/4).
        let e = LogForm::times_log(q(1, 1), q(5, 2));
        let f = LogForm::times_log(q(1, 2), q(25, 4));
        assert!(e.exact_eq(&f));
        assert!(LogForm::infinity().exact_cmp(&b) == Some(Ordering::Greater));
        assert!(LogForm::per_log(q(1, 1), q(1, 1)).is_infinite());
        assert_eq!(a.exact_cmp(&e), None);
    }

    #[test]
    fn log_form_display_and_enclosure() {
        assert_eq!(LogForm::per_log(q(3, 1), q(4, 1)).to_string(), "3/2");
        assert_eq!(LogForm::per_log(q(1, 1), q(3, 1)).to_string(), "1/log2(3)");
        assert_eq!(LogForm::times_log(q(1, 1), q(5, 2)).to_string(), "log2(5/2)");
        assert_eq!(LogForm::infinity().to_string(), "inf");
        let v = LogForm::per_log(q(1, 1), q(3, 1));
        let (lo, hi) = v.enclosure().unwrap();
        let x = 1.0 / 3f64.log2();
        assert!(lo.to_f64().unwrap() <= x && x <= hi.to_f64().unwrap());
        assert!(lo < hi);
    }

    #[test]
    fn reciprocal_round_trips() {
        let v = LogForm::per_log(q(2, 1), q(7, 3));
        assert!(v.recip().recip().exact_eq(&v));
        assert!(LogForm::infinity().recip().is_zero());
        assert!(LogForm::zero().recip().is_infinite());
    }

    #[test]
    fn three_node_symmetric_bounds() {
        let g = three_node();
        let ones = WeightVector::ones(3);
        let c = capacity_lower_bound(&g, &ones, &[1], &lim()).unwrap();
        assert_eq!(c.quantity, Quantity::SymmetricCapacity);
        assert_eq!(c.value.as_rational(), Some(q(1, 2)));
        let r = storage_rate_upper_bound(&g, &ones, &[1], &lim()).unwrap();
        assert_eq!(r.value.as_rational(), Some(q(1, 1)));
        let report = complementarity(&c, &r, &ones).unwrap();
        assert!(report.matched);
        assert_eq!(report.exact, Some(true));
        assert_eq!(report.lhs.as_rational(), Some(q(2, 1)));
        assert_eq!(report.rhs.unwrap().as_rational(), Some(q(2, 1)));
        let beta = c.reciprocal(Quantity::BroadcastRate);
        assert_eq!(beta.direction, BoundDirection::Upper);
        assert_eq!(beta.value.as_rational(), Some(q(2, 1)));
    }

    #[test]
    fn complete_graph_bounds() {
        let g = SideInformationGraph::complete(3);
        let ones = WeightVector::ones(3);
        let c = capacity_lower_bound(&g, &ones, &[1], &lim()).unwrap();
        assert_eq!(c.value.as_rational(), Some(q(1, 1)));
        let r = storage_rate_upper_bound(&g, &ones, &[1], &lim()).unwrap();
        assert_eq!(r.value.as_rational(), Some(q(1, 2)));
        let report = complementarity(&c, &r, &ones).unwrap();
        assert_eq!(report.exact, Some(true));
        assert_eq!(report.lhs.as_rational(), Some(q(1, 1)));
    }

    #[test]
    fn edgeless_storage_is_infinite() {
        let g = SideInformationGraph::edgeless(2);
        let ones = WeightVector::ones(2);
        let r = storage_rate_upper_bound(&g, &ones, &[1, 2, 3], &lim()).unwrap();
        assert!(r.value.is_infinite());
        assert!(r.witness.is_none());
        assert_eq!(r.skipped.len(), 3);
    }

    #[test]
    fn zero_direction_entries_pin_blocks() {
        let g = three_node();
        let lambda = WeightVector::parse("1,0,1").unwrap();
        let c = capacity_lower_bound(&g, &lambda, &[1, 2], &lim()).unwrap();
        let t = &c.witness.as_ref().unwrap().t;
        assert_eq!(t.get(1), 0);
        assert_eq!(c.quantity, Quantity::Capacity);
    }

    #[test]
    fn fractional_directions_need_admissible_r() {
        let g = three_node();
        let lambda = WeightVector::parse("1/2,1/2,1/2").unwrap();
        assert_eq!(
            capacity_lower_bound(&g, &lambda, &[1, 3], &lim()).unwrap_err(),
            Error::NoAdmissibleScale
        );
        let c = capacity_lower_bound(&g, &lambda, &[1, 2], &lim()).unwrap();
        assert_eq!(c.r, Some(2));
        // Same t = (1,1,1) as λ = 1, r = 1, so C(λ/2) = 2 C(λ).
        assert_eq!(c.value.as_rational(), Some(q(1, 1)));
        assert!(capacity_lower_bound(&g, &WeightVector::parse("0,0,0").unwrap(), &[1], &lim()).is_err());
    }

    #[test]
    fn scaled_directions_normalize_identically() {
        let g = three_node();
        let ones = WeightVector::ones(3);
        let twos = WeightVector::parse("2,2,2").unwrap();
        let a = complementarity(
            &capacity_lower_bound(&g, &ones, &[2], &lim()).unwrap(),
            &storage_rate_upper_bound(&g, &ones, &[2], &lim()).unwrap(),
            &ones,
        )
        .unwrap();
        let b = complementarity(
            &capacity_lower_bound(&g, &twos, &[1], &lim()).unwrap(),
            &storage_rate_upper_bound(&g, &twos, &[1], &lim()).unwrap(),
            &twos,
        )
        .unwrap();
        assert!(a.normalized.0.exact_eq(&b.normalized.0));
        assert!(a.normalized.1.unwrap().exact_eq(&b.normalized.1.unwrap()));
    }

    #[test]
    fn unmatched_witnesses_report_an_interval() {
        let g = three_node();
        let ones = WeightVector::ones(3);
        let c = capacity_lower_bound(&g, &ones, &[1], &lim()).unwrap();
        let r = storage_rate_upper_bound(&g, &ones, &[2], &lim()).unwrap();
        let report = complementarity(&c, &r, &ones).unwrap();
        assert!(!report.matched);
        assert_eq!(report.exact, None);
        assert!(report.residual.hi.is_some());
    }

    #[test]
    fn duality_identity_examples() {
        for g in [three_node(), SideInformationGraph::complete(3), SideInformationGraph::edgeless(1)] {
            let ones = WeightVector::ones(g.n());
            let check = duality_identity_check(&g, &ones, 1, &lim()).unwrap();
            assert!(check.holds, "{check:?}");
        }
        let check = duality_identity_check(&three_node(), &WeightVector::ones(3), 1, &lim()).unwrap();
        assert_eq!(check.chi_f_lp, q(4, 1));
        assert_eq!(check.alpha, 2);
    }

    #[test]
    fn sum_bounds_examples() {
        let t = [BlockLengths::new(vec![1, 1, 1])];
        let s = sum_capacity_bounds(&three_node(), &t, &lim()).unwrap();
        assert_eq!(s.c_sum.value.as_rational(), Some(q(3, 2)));
        assert_eq!(s.r_sum.value.as_rational(), Some(q(3, 1)));
        assert!(s.all_identities_hold);
        assert!(s.sum_residual.contains_zero());
        let s = sum_capacity_bounds(&SideInformationGraph::complete(3), &t, &lim()).unwrap();
        assert_eq!(s.c_sum.value.as_rational(), Some(q(3, 1)));
        assert_eq!(s.r_sum.value.as_rational(), Some(q(3, 2)));
        let single = sum_capacity_bounds(&SideInformationGraph::edgeless(1), &[BlockLengths::new(vec![1])], &lim()).unwrap();
        assert_eq!(single.c_sum.value.as_rational(), Some(q(1, 1)));
        assert!(single.r_sum.value.is_infinite());
    }

    #[test]
    fn weighted_sums() {
        let g = three_node();
        let t = [BlockLengths::new(vec![1, 1, 1])];
        let ones = weighted_sum_bounds(&g, &WeightVector::ones(3), &t, &lim()).unwrap();
        let sums = sum_capacity_bounds(&g, &t, &lim()).unwrap();
        assert!(ones.capacity.value.exact_eq(&sums.c_sum.value));
        assert!(ones.rate.value.exact_eq(&sums.r_sum.value));
        let e1 = weighted_sum_bounds(&g, &WeightVector::parse("1,0,0").unwrap(), &t, &lim()).unwrap();
        assert_eq!(e1.capacity.value.as_rational(), Some(q(1, 2)));
        let zero = weighted_sum_bounds(&g, &WeightVector::parse("0,0,0").unwrap(), &t, &lim()).unwrap();
        assert!(zero.capacity.value.is_zero());
        assert!(zero.rate.value.is_zero());
    }

    #[test]
    fn region_corners() {
        let pts = region_sample(&three_node(), &BlockLengths::new(vec![1, 1, 1]), &lim()).unwrap();
        assert_eq!(pts.len(), 7);
        let top = pts.iter().find(|p| p.t.as_slice() == [1, 1, 1]).unwrap();
        let cap: Vec<_> = top.capacity.iter().map(|v| v.as_rational().unwrap()).collect();
        assert_eq!(cap, vec![q(1, 2); 3]);
        let st: Vec<_> = top.storage.as_ref().unwrap().iter().map(|v| v.as_rational().unwrap()).collect();
        assert_eq!(st, vec![q(1, 1); 3]);
        let partial = pts.iter().find(|p| p.t.as_slice() == [1, 0, 0]).unwrap();
        assert!(partial.capacity[1].is_zero());

        let k3 = region_sample(&SideInformationGraph::complete(3), &BlockLengths::new(vec![1, 1, 1]), &lim()).unwrap();
        let top = k3.last().unwrap();
        assert!(top.capacity.iter().all(|v| v.as_rational() == Some(q(1, 1))));
        assert!(top.storage.as_ref().unwrap().iter().all(|v| v.as_rational() == Some(q(1, 2))));
    }

    #[test]
    fn capacity_improves_along_multiples() {
        for (g, rs) in [(three_node(), vec![1, 2, 4]), (SideInformationGraph::bidirected_cycle(4), vec![1, 2])] {
            let ones = WeightVector::ones(g.n());
            let bounds: Vec<LogForm> = rs
                .iter()
                .map(|&r| capacity_lower_bound(&g, &ones, &[r], &lim()).unwrap().value)
                .collect();
            for w in bounds.windows(2) {
                assert_ne!(w[1].exact_cmp(&w[0]), Some(Ordering::Less));
            }
        }
    }
}
