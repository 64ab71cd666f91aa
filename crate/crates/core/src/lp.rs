//! Simplex for packing LPs
//!
//! ```text
//! maximize  Σ_v y_v   subject to   Σ_{v ∈ S_i} y_v ≤ 1  (each row S_i),   y ≥ 0
//! ```
//!
//! which is the dual of the fractional set-cover LP over the row sets.
//!
//! One condensed tableau implementation (one column per nonbasic variable)
//! runs over three entry types: `f64` for fast guidance, and exact
//! `Ratio<i64>` with checked arithmetic that is rebuilt over big rationals
//! on the first overflow. Rows can be appended at any time; the tableau
//! then stays dual feasible and is repaired with dual simplex pivots. Both
//! phases pick the most violated row or column, switching to Bland's
//! lowest-index rule across degenerate pivots.
//!
//! A basis found in floating point is certified with [`certify_basis`],
//! which re-solves it exactly and checks both feasibilities.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_integer::Integer;
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Rational;

type Small = Ratio<i64>;

/// Arithmetic failed to fit the entry type.
#[derive(Debug)]
struct Overflow;

trait Entry: Clone {
    fn nil() -> Self;
    fn unit() -> Self;
    fn sign(&self) -> Ordering;
    fn compare(&self, other: &Self) -> Ordering;
    fn neg(&self) -> Self;
    fn try_mul(&self, other: &Self) -> Result<Self, Overflow>;
    fn try_sub(&self, other: &Self) -> Result<Self, Overflow>;
    fn try_div(&self, other: &Self) -> Result<Self, Overflow>;

    /// Too small to pivot on safely.
    fn is_weak(&self) -> bool {
        false
    }

    fn is_nil(&self) -> bool {
        self.sign() == Ordering::Equal
    }
    fn is_neg(&self) -> bool {
        self.sign() == Ordering::Less
    }
    fn is_pos(&self) -> bool {
        self.sign() == Ordering::Greater
    }
}

impl Entry for Small {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn sign(&self) -> Ordering {
        self.numer().cmp(&0)
    }
    fn compare(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn try_mul(&self, other: &Self) -> Result<Self, Overflow> {
        self.checked_mul(other).ok_or(Overflow)
    }
    fn try_sub(&self, other: &Self) -> Result<Self, Overflow> {
        self.checked_sub(other).ok_or(Overflow)
    }
    fn try_div(&self, other: &Self) -> Result<Self, Overflow> {
        self.checked_div(other).ok_or(Overflow)
    }
}

impl Entry for Rational {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn sign(&self) -> Ordering {
        if self.is_negative() {
            Ordering::Less
        } else if self.is_zero() {
            Ordering::Equal
        } else {
            Ordering::Greater
        }
    }
    fn compare(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn try_mul(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self * other)
    }
    fn try_sub(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self - other)
    }
    fn try_div(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self / other)
    }
}

/// Magnitudes below this count as zero in floating point.
const EPS: f64 = 1e-9;
/// Smallest floating-point pivot element accepted.
const PIVOT_TOL: f64 = 1e-7;

impl Entry for f64 {
    fn nil() -> Self {
        0.0
    }
    fn unit() -> Self {
        1.0
    }
    fn sign(&self) -> Ordering {
        if *self > EPS {
            Ordering::Greater
        } else if *self < -EPS {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn compare(&self, other: &Self) -> Ordering {
        if (self - other).abs() <= EPS * (1.0 + self.abs().max(other.abs())) {
            Ordering::Equal
        } else {
            self.total_cmp(other)
        }
    }
    fn neg(&self) -> Self {
        -self
    }
    fn try_mul(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self * other)
    }
    fn try_sub(&self, other: &Self) -> Result<Self, Overflow> {
        let d = self - other;
        Ok(if d.abs() < EPS * 1e-3 { 0.0 } else { d })
    }
    fn try_div(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self / other)
    }
    fn is_weak(&self) -> bool {
        self.abs() < PIVOT_TOL
    }
}

/// Rows read `basic + Σ_j a_j · nonbasic_j = rhs`, with the right-hand side
/// stored in the last column; the objective row reads
/// `z + Σ_j d_j · nonbasic_j = value`.
#[derive(Clone, Debug)]
struct Tableau<T> {
    vars: usize,
    rows: Vec<Vec<T>>,
    objective: Vec<T>,
    /// Variable of each row (structural `< vars`, the slack of row `i` is
    /// `vars + i`).
    basic: Vec<usize>,
    /// Variable of each column.
    nonbasic: Vec<usize>,
    /// Set after a degenerate pivot: choices then follow Bland's rule until
    /// the objective moves again.
    degenerate: bool,
}

enum Step {
    /// Pivot position and whether the pivot is degenerate.
    Pivot(usize, usize, bool),
    Optimal,
    Unbounded,
    /// Only pivots below the float tolerance remain.
    Stalled,
}

impl<T: Entry> Tableau<T> {
    fn new(vars: usize) -> Self {
        Self::with_costs(vec![T::unit(); vars])
    }

    /// Objective `Σ_v costs[v] · y_v`.
    fn with_costs(costs: Vec<T>) -> Self {
        let vars = costs.len();
        let mut objective: Vec<T> = costs.iter().map(Entry::neg).collect();
        objective.push(T::nil());
        Tableau {
            vars,
            rows: Vec::new(),
            objective,
            basic: Vec::new(),
            nonbasic: (0..vars).collect(),
            degenerate: false,
        }
    }

    fn add_row(&mut self, members: &[usize]) -> Result<(), Overflow> {
        self.add_row_with_rhs(members, T::unit())
    }

    fn add_row_with_rhs(&mut self, members: &[usize], rhs: T) -> Result<(), Overflow> {
        let mut marks = vec![false; self.vars];
        for &v in members {
            marks[v] = true;
        }
        let mut row = vec![T::nil(); self.vars + 1];
        for (j, &v) in self.nonbasic.iter().enumerate() {
            if v < self.vars && marks[v] {
                row[j] = T::unit();
            }
        }
        row[self.vars] = rhs;
        for (i, &b) in self.basic.iter().enumerate() {
            if b < self.vars && marks[b] {
                for (x, a) in row.iter_mut().zip(&self.rows[i]) {
                    if !a.is_nil() {
                        *x = x.try_sub(a)?;
                    }
                }
            }
        }
        self.basic.push(self.vars + self.rows.len());
        self.rows.push(row);
        Ok(())
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<(), Overflow> {
        let mut pivot_row = std::mem::take(&mut self.rows[r]);
        let p = pivot_row[c].clone();
        let mut support = Vec::new();
        for (j, x) in pivot_row.iter_mut().enumerate() {
            if j != c && !x.is_nil() {
                *x = x.try_div(&p)?;
                support.push(j);
            }
        }
        let update = |row: &mut Vec<T>| -> Result<(), Overflow> {
            if row[c].is_nil() {
                return Ok(());
            }
            let f = row[c].clone();
            for &j in &support {
                row[j] = row[j].try_sub(&f.try_mul(&pivot_row[j])?)?;
            }
            row[c] = f.try_div(&p)?.neg();
            Ok(())
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                update(row)?;
            }
        }
        update(&mut self.objective)?;
        pivot_row[c] = T::unit().try_div(&p)?;
        self.rows[r] = pivot_row;
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[c]);
        Ok(())
    }

    fn next_step(&self) -> Result<Step, Overflow> {
        let rhs = self.vars;
        // Dual simplex while some basic variable is negative; reduced costs
        // stay nonnegative throughout.
        let infeasible = (0..self.rows.len()).filter(|&i| self.rows[i][rhs].is_neg());
        let leaving = if self.degenerate {
            infeasible.min_by_key(|&i| self.basic[i])
        } else {
            infeasible.min_by(|&i, &k| {
                self.rows[i][rhs]
                    .compare(&self.rows[k][rhs])
                    .then(self.basic[i].cmp(&self.basic[k]))
            })
        };
        if let Some(r) = leaving {
            let row = &self.rows[r];
            let mut best: Option<(usize, T)> = None;
            let mut skipped = false;
            for j in 0..rhs {
                if !row[j].is_neg() {
                    continue;
                }
                if row[j].is_weak() {
                    skipped = true;
                    continue;
                }
                // Minimize z_j / |a_rj|.
                let ratio = self.objective[j].try_div(&row[j].neg())?;
                let better = match &best {
                    None => true,
                    Some((k, q)) => match ratio.compare(q) {
                        Ordering::Less => true,
                        Ordering::Equal => self.tie_break(self.nonbasic[j], self.nonbasic[*k], &row[j], &row[*k]),
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((j, ratio));
                }
            }
            return Ok(match best {
                Some((c, ratio)) => Step::Pivot(r, c, ratio.is_nil()),
                None if skipped => Step::Stalled,
                None => unreachable!("packing LPs are always feasible"),
            });
        }
        let negative = (0..rhs).filter(|&j| self.objective[j].is_neg());
        let entering = if self.degenerate {
            negative.min_by_key(|&j| self.nonbasic[j])
        } else {
            negative.min_by(|&j, &k| {
                self.objective[j]
                    .compare(&self.objective[k])
                    .then(self.nonbasic[j].cmp(&self.nonbasic[k]))
            })
        };
        let Some(c) = entering else {
            return Ok(Step::Optimal);
        };
        let mut best: Option<(usize, T)> = None;
        let mut skipped = false;
        for (i, row) in self.rows.iter().enumerate() {
            if !row[c].is_pos() {
                continue;
            }
            if row[c].is_weak() {
                skipped = true;
                continue;
            }
            let ratio = row[rhs].try_div(&row[c])?;
            let better = match &best {
                None => true,
                Some((k, q)) => match ratio.compare(q) {
                    Ordering::Less => true,
                    Ordering::Equal => self.tie_break(self.basic[i], self.basic[*k], &row[c].neg(), &self.rows[*k][c].neg()),
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((i, ratio));
            }
        }
        Ok(match best {
            Some((r, ratio)) => Step::Pivot(r, c, ratio.is_nil()),
            None if skipped => Step::Stalled,
            None => Step::Unbounded,
        })
    }

    /// Whether a ratio-test candidate should replace the incumbent on a tie:
    /// the lower index under Bland's rule, otherwise the larger pivot
    /// magnitude. Pivots arrive negated, so the smaller value is larger.
    fn tie_break(&self, candidate: usize, incumbent: usize, candidate_neg: &T, incumbent_neg: &T) -> bool {
        if self.degenerate {
            return candidate < incumbent;
        }
        match candidate_neg.compare(incumbent_neg) {
            Ordering::Less => true,
            Ordering::Equal => candidate < incumbent,
            Ordering::Greater => false,
        }
    }

    /// Runs to optimality; `Ok(Some(false))` means unbounded and `Ok(None)`
    /// that `limit` pivots were spent first.
    fn solve(&mut self, pivots: &mut u64, limit: u64) -> Result<Option<bool>, Overflow> {
        let start = *pivots;
        loop {
            if *pivots - start >= limit {
                return Ok(None);
            }
            match self.next_step()? {
                Step::Pivot(r, c, degenerate) => {
                    self.degenerate = degenerate;
                    self.pivot(r, c)?;
                }
                Step::Optimal => return Ok(Some(true)),
                Step::Unbounded => return Ok(Some(false)),
                Step::Stalled => return Ok(None),
            }
            *pivots += 1;
        }
    }

    fn solution(&self) -> Vec<T> {
        let mut y = vec![T::nil(); self.vars];
        for (row, &b) in self.rows.iter().zip(&self.basic) {
            if b < self.vars {
                y[b] = row[self.vars].clone();
            }
        }
        y
    }

    fn row_duals(&self) -> Vec<T> {
        let mut duals = vec![T::nil(); self.rows.len()];
        for (j, &v) in self.nonbasic.iter().enumerate() {
            if v >= self.vars {
                duals[v - self.vars] = self.objective[j].clone();
            }
        }
        duals
    }

    fn value(&self) -> T {
        self.objective[self.vars].clone()
    }

    /// Basic structural variables and rows with nonbasic slack.
    fn basis(&self) -> Basis {
        let mut vertices: Vec<usize> = self.basic.iter().copied().filter(|&b| b < self.vars).collect();
        let mut tight: Vec<usize> = self
            .nonbasic
            .iter()
            .filter(|&&v| v >= self.vars)
            .map(|&v| v - self.vars)
            .collect();
        vertices.sort_unstable();
        tight.sort_unstable();
        Basis { vertices, tight }
    }
}

fn small_to_rational(x: &Small) -> Rational {
    Rational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

/// A simplex basis of a packing LP, described by its basic structural
/// variables and the rows whose slack is nonbasic (equally many).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub vertices: Vec<usize>,
    pub tight: Vec<usize>,
}

#[derive(Clone, Debug)]
enum Inner {
    Small(Tableau<Small>),
    Big(Tableau<Rational>),
}

/// Exact packing LP.
#[derive(Clone, Debug)]
pub struct PackingLp {
    vars: usize,
    sets: Vec<Vec<usize>>,
    inner: Inner,
    pivots: u64,
}

impl PackingLp {
    pub fn new(vars: usize) -> Self {
        PackingLp {
            vars,
            sets: Vec::new(),
            inner: Inner::Small(Tableau::new(vars)),
            pivots: 0,
        }
    }

    pub fn row_count(&self) -> usize {
        self.sets.len()
    }

    pub fn pivots(&self) -> u64 {
        self.pivots
    }

    /// Whether the tableau has moved to big rationals.
    pub fn is_big(&self) -> bool {
        matches!(self.inner, Inner::Big(_))
    }

    /// Appends the constraint `Σ_{v ∈ members} y_v ≤ 1`.
    pub fn add_row(&mut self, members: &[usize]) {
        self.sets.push(members.to_vec());
        match &mut self.inner {
            Inner::Small(t) => {
                if t.add_row(members).is_err() {
                    self.promote();
                }
            }
            Inner::Big(t) => t.add_row(members).expect("big rationals do not overflow"),
        }
    }

    /// Rebuilds the tableau over big rationals from the recorded rows.
    fn promote(&mut self) {
        let mut t = Tableau::new(self.vars);
        for s in &self.sets {
            t.add_row(s).expect("big rationals do not overflow");
        }
        self.inner = Inner::Big(t);
    }

    /// Restores primal feasibility after row additions (dual simplex), then
    /// optimality (primal simplex). Returns `false` if the LP is unbounded.
    pub fn solve(&mut self) -> bool {
        if let Inner::Small(t) = &mut self.inner {
            match t.solve(&mut self.pivots, u64::MAX) {
                Ok(bounded) => return bounded.expect("no pivot limit"),
                Err(Overflow) => self.promote(),
            }
        }
        match &mut self.inner {
            Inner::Big(t) => t
                .solve(&mut self.pivots, u64::MAX)
                .expect("big rationals do not overflow")
                .expect("no pivot limit"),
            Inner::Small(_) => unreachable!("promoted above"),
        }
    }

    /// Optimal `y` of the current tableau.
    pub fn solution(&self) -> Vec<Rational> {
        match &self.inner {
            Inner::Small(t) => t.solution().iter().map(small_to_rational).collect(),
            Inner::Big(t) => t.solution(),
        }
    }

    /// Dual values, one per row: the weights of the covering LP.
    pub fn row_duals(&self) -> Vec<Rational> {
        match &self.inner {
            Inner::Small(t) => t.row_duals().iter().map(small_to_rational).collect(),
            Inner::Big(t) => t.row_duals(),
        }
    }

    pub fn value(&self) -> Rational {
        match &self.inner {
            Inner::Small(t) => small_to_rational(&t.value()),
            Inner::Big(t) => t.value(),
        }
    }

    pub fn basis(&self) -> Basis {
        match &self.inner {
            Inner::Small(t) => t.basis(),
            Inner::Big(t) => t.basis(),
        }
    }
}

/// Floating-point packing LP, used to find a basis worth certifying.
///
/// Costs and right-hand sides carry tiny fixed perturbations so that ties
/// (and the stalling they cause) practically never occur; the basis is
/// then certified against the unperturbed LP.
#[derive(Clone, Debug)]
pub struct FloatPackingLp {
    tableau: Tableau<f64>,
    noise: ChaCha8Rng,
    pivots: u64,
}

const PERTURBATION: f64 = 1e-6;

impl FloatPackingLp {
    pub fn new(vars: usize) -> Self {
        let mut noise = ChaCha8Rng::seed_from_u64(0);
        let costs = (0..vars)
            .map(|_| 1.0 + PERTURBATION * noise.gen::<f64>())
            .collect();
        FloatPackingLp {
            tableau: Tableau::with_costs(costs),
            noise,
            pivots: 0,
        }
    }

    pub fn pivots(&self) -> u64 {
        self.pivots
    }

    pub fn add_row(&mut self, members: &[usize]) {
        let rhs = 1.0 + PERTURBATION * self.noise.gen::<f64>();
        self.tableau
            .add_row_with_rhs(members, rhs)
            .expect("floats do not overflow");
    }

    /// `Some(bounded)`, or `None` once `limit` pivots are spent.
    pub fn solve(&mut self, limit: u64) -> Option<bool> {
        self.tableau
            .solve(&mut self.pivots, limit)
            .expect("floats do not overflow")
    }

    pub fn solution(&self) -> Vec<f64> {
        self.tableau.solution()
    }

    pub fn value(&self) -> f64 {
        self.tableau.value()
    }

    pub fn basis(&self) -> Basis {
        self.tableau.basis()
    }
}

/// Exact primal and dual solutions at a basis, if it is optimal.
///
/// Solves `Σ_{v ∈ S_r, v basic} y_v = 1` over the tight rows and its
/// transpose `Σ_{r tight, v ∈ S_r} x_r = 1` over the basic vertices, then
/// checks `y ≥ 0`, every row `Σ_{S} y ≤ 1`, `x ≥ 0`, every vertex covered
/// with `Σ x ≥ 1`, and `Σ y = Σ x`. Returns `(y, x)` with one `x` entry per
/// row.
///
/// The systems are first solved modulo a few word-sized primes and lifted
/// by rational reconstruction; rational elimination only runs when that
/// guess fails the checks.
pub fn certify_basis(vars: usize, sets: &[Vec<usize>], basis: &Basis) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let k = basis.vertices.len();
    if basis.tight.len() != k {
        return None;
    }
    let mut position = vec![usize::MAX; vars];
    for (b, &v) in basis.vertices.iter().enumerate() {
        position[v] = b;
    }
    let mut matrix = vec![vec![false; k]; k];
    for (a, &r) in basis.tight.iter().enumerate() {
        for &v in &sets[r] {
            if position[v] != usize::MAX {
                matrix[a][position[v]] = true;
            }
        }
    }
    let transpose: Vec<Vec<bool>> = (0..k).map(|b| (0..k).map(|a| matrix[a][b]).collect()).collect();

    if let Some(found) = modular_unit_system(&matrix)
        .zip(modular_unit_system(&transpose))
        .and_then(|(y, x)| check_certificate(vars, sets, basis, &y, &x))
    {
        return Some(found);
    }
    let y_basic = solve_unit_system(&matrix)?;
    let x_tight = solve_unit_system(&transpose)?;
    check_certificate(vars, sets, basis, &y_basic, &x_tight)
}

fn check_certificate(
    vars: usize,
    sets: &[Vec<usize>],
    basis: &Basis,
    y_basic: &[Rational],
    x_tight: &[Rational],
) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let mut y = vec![Rational::zero(); vars];
    for (b, &v) in basis.vertices.iter().enumerate() {
        y[v] = y_basic[b].clone();
    }
    let mut x = vec![Rational::zero(); sets.len()];
    for (a, &r) in basis.tight.iter().enumerate() {
        x[r] = x_tight[a].clone();
    }
    if y.iter().any(|v| v.is_negative()) || x.iter().any(|v| v.is_negative()) {
        return None;
    }
    let one = Rational::one();
    if sets.iter().any(|s| s.iter().map(|&v| &y[v]).sum::<Rational>() > one) {
        return None;
    }
    let mut cover = vec![Rational::zero(); vars];
    for (s, w) in sets.iter().zip(&x) {
        if !w.is_zero() {
            for &v in s {
                cover[v] += w;
            }
        }
    }
    if cover.iter().any(|c| *c < one) {
        return None;
    }
    if y.iter().sum::<Rational>() != x.iter().sum::<Rational>() {
        return None;
    }
    Some((y, x))
}

const PRIMES: [u64; 6] = [
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
    4611686018427387751,
    4611686018427387737,
];

/// Guesses the rational solution of `M z = 1` from its residues modulo
/// [`PRIMES`], returning the first reconstruction that satisfies the system.
fn modular_unit_system(m: &[Vec<bool>]) -> Option<Vec<Rational>> {
    let k = m.len();
    let mut residues: Vec<BigInt> = vec![BigInt::zero(); k];
    let mut modulus = BigInt::one();
    for &p in &PRIMES {
        let Some(z) = solve_mod(m, p) else { continue };
        let pb = BigInt::from(p);
        // CRT: r' = r + modulus * ((z - r) * modulus^{-1} mod p)
        let inv = BigInt::from(pow_mod((&modulus % &pb).try_into().ok()?, p - 2, p));
        for (r, &zi) in residues.iter_mut().zip(&z) {
            let t = ((BigInt::from(zi) - &*r) * &inv).mod_floor(&pb);
            *r += &modulus * t;
        }
        modulus *= pb;
        let candidate: Option<Vec<Rational>> = residues.iter().map(|r| reconstruct(r, &modulus)).collect();
        if let Some(z) = candidate {
            if satisfies_unit_system(m, &z) {
                return Some(z);
            }
        }
    }
    None
}

fn satisfies_unit_system(m: &[Vec<bool>], z: &[Rational]) -> bool {
    m.iter().all(|row| row.iter().zip(z).filter(|(b, _)| **b).map(|(_, v)| v).sum::<Rational>().is_one())
}

/// Smallest `r/s` with `r ≡ u s (mod m)` and `|r|, s ≤ √(m/2)`.
fn reconstruct(u: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.clone());
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        (r0, r1, s0, s1) = (r1, r2, s1, s2);
    }
    if s1.is_zero() || s1.abs() > bound {
        return None;
    }
    Some(Rational::new(r1, s1))
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Gauss-Jordan for `M z = 1` over `Z/p`; `None` if singular mod `p`.
fn solve_mod(m: &[Vec<bool>], p: u64) -> Option<Vec<u64>> {
    let k = m.len();
    let mut a: Vec<Vec<u64>> = m.iter().map(|row| row.iter().map(|&b| b as u64).chain([1]).collect()).collect();
    for col in 0..k {
        let piv = (col..k).find(|&i| a[i][col] != 0)?;
        a.swap(col, piv);
        let mut pivot_row = std::mem::take(&mut a[col]);
        let inv = pow_mod(pivot_row[col], p - 2, p);
        let support: Vec<usize> = (col..=k).filter(|&j| pivot_row[j] != 0).collect();
        for &j in &support {
            pivot_row[j] = mul_mod(pivot_row[j], inv, p);
        }
        for (i, row) in a.iter_mut().enumerate() {
            let f = if i == col { 0 } else { row[col] };
            if f == 0 {
                continue;
            }
            for &j in &support {
                row[j] = (row[j] + p - mul_mod(f, pivot_row[j], p)) % p;
            }
        }
        a[col] = pivot_row;
    }
    Some((0..k).map(|i| a[i][k]).collect())
}

/// Solves `M z = 1` exactly for a square 0/1 matrix; `None` if singular.
fn solve_unit_system(m: &[Vec<bool>]) -> Option<Vec<Rational>> {
    match eliminate::<Small>(m) {
        Ok(z) => z.map(|z| z.iter().map(small_to_rational).collect()),
        Err(Overflow) => eliminate::<Rational>(m).expect("big rationals do not overflow"),
    }
}

fn eliminate<T: Entry>(m: &[Vec<bool>]) -> Result<Option<Vec<T>>, Overflow> {
    let k = m.len();
    let mut a: Vec<Vec<T>> = m
        .iter()
        .map(|row| {
            let mut r: Vec<T> = row.iter().map(|&b| if b { T::unit() } else { T::nil() }).collect();
            r.push(T::unit());
            r
        })
        .collect();
    for col in 0..k {
        let Some(p) = (col..k).find(|&i| !a[i][col].is_nil()) else {
            return Ok(None);
        };
        a.swap(col, p);
        let pivot_row = std::mem::take(&mut a[col]);
        let pivot = pivot_row[col].clone();
        let support: Vec<usize> = (col..=k).filter(|&j| !pivot_row[j].is_nil()).collect();
        for (i, row) in a.iter_mut().enumerate() {
            if i == col || row[col].is_nil() {
                continue;
            }
            let f = row[col].try_div(&pivot)?;
            for &j in &support {
                row[j] = row[j].try_sub(&f.try_mul(&pivot_row[j])?)?;
            }
        }
        a[col] = pivot_row;
    }
    (0..k).map(|i| a[i][k].try_div(&a[i][i])).collect::<Result<Vec<T>, Overflow>>().map(Some)
}
