//! Partitions, Gel'fand-Zetlin patterns, Young-Yamanouchi paths and the
//! exact integer formulas built on them.
//!
//! Partitions are stored trimmed (no trailing zeros). The total order on
//! partitions is the derived lexicographic order on the trimmed parts, which
//! agrees with lexicographic order on zero-padded tuples; enumeration lists
//! are returned in *descending* order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Validates weak decrease and trims trailing zeros.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not weakly decreasing")));
        }
        let mut parts = parts;
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// The one-row partition `(n)`; empty for `n = 0`.
    pub fn row(n: u32) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Partition(vec![n])
        }
    }

    /// The one-column partition `(1^n)`.
    pub fn column(n: usize) -> Self {
        Partition(vec![1; n])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.len()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Part `i` (0-based), zero past the last row.
    pub fn get(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn padded(&self, d: usize) -> Vec<u32> {
        (0..d.max(self.rows())).map(|i| self.get(i)).collect()
    }

    /// `λ̃_i = λ_i + d − i` (1-based `i`), for `i = 1..d`.
    pub fn shifted(&self, d: usize) -> Vec<i64> {
        (0..d).map(|i| self.get(i) as i64 + (d - 1 - i) as i64).collect()
    }

    /// Adds a box to row `row` (0-based) if the result is a partition.
    pub fn with_box_added(&self, row: usize) -> Option<Partition> {
        if row > self.rows() || (row > 0 && self.get(row - 1) == self.get(row)) {
            return None;
        }
        let mut parts = self.padded(row + 1);
        parts[row] += 1;
        Some(Partition(parts))
    }

    /// Removes a box from row `row` (0-based) if the result is a partition.
    pub fn with_box_removed(&self, row: usize) -> Option<Partition> {
        if row >= self.rows() || self.get(row) == self.get(row + 1) {
            return None;
        }
        let mut parts = self.0.clone();
        parts[row] -= 1;
        Partition::new(parts).ok()
    }

    /// Normalized shape `λ / n` padded to `d` entries.
    pub fn normalized(&self, d: usize) -> Vec<f64> {
        let n = self.size() as f64;
        self.padded(d).iter().map(|&x| x as f64 / n).collect()
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// A weight (or classical type): `d` nonnegative entries in any order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight(pub Vec<u32>);

impl Weight {
    pub fn n(&self) -> u32 {
        self.0.iter().sum()
    }
    pub fn d(&self) -> usize {
        self.0.len()
    }
    /// `μ ≺ λ`: partial sums of the sorted weight never exceed those of `λ`.
    pub fn majorized_by(&self, lambda: &Partition) -> bool {
        let mut w = self.0.clone();
        w.sort_unstable_by(|a, b| b.cmp(a));
        if w.iter().sum::<u32>() != lambda.size() {
            return false;
        }
        let (mut a, mut b) = (0u32, 0u32);
        for (i, x) in w.iter().enumerate() {
            a += x;
            b += lambda.get(i);
            if a > b {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

/// A Gel'fand-Zetlin pattern `q_1 ≾ q_2 ≾ … ≾ q_d = λ`, with `q_j` having at
/// most `j` rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GZPattern {
    pub chain: Vec<Partition>,
}

impl GZPattern {
    pub fn d(&self) -> usize {
        self.chain.len()
    }

    pub fn top(&self) -> &Partition {
        self.chain.last().expect("GZ pattern has at least one level")
    }

    /// Entry `j` is `|q_j| − |q_{j−1}|`.
    pub fn weight(&self) -> Weight {
        let mut prev = 0;
        Weight(
            self.chain
                .iter()
                .map(|q| {
                    let s = q.size();
                    let w = s - prev;
                    prev = s;
                    w
                })
                .collect(),
        )
    }

    /// The pattern of the `d − 1` lower levels.
    pub fn lower(&self) -> GZPattern {
        GZPattern { chain: self.chain[..self.chain.len() - 1].to_vec() }
    }

    pub fn is_valid(&self) -> bool {
        self.chain.iter().enumerate().all(|(j, q)| q.rows() <= j + 1)
            && self.chain.windows(2).all(|w| interlaces(&w[0], &w[1]))
    }

    /// The basis vector `|i⟩` of the defining irrep (1-based `i`).
    pub fn defining(i: usize, d: usize) -> GZPattern {
        GZPattern { chain: (1..=d).map(|k| if k >= i { Partition::row(1) } else { Partition::empty() }).collect() }
    }
}

impl fmt::Display for GZPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.chain.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(";"))
    }
}

impl FromStr for GZPattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let chain = s.split(';').map(Partition::from_str).collect::<Result<Vec<_>>>()?;
        let p = GZPattern { chain };
        if !p.is_valid() {
            return Err(Error::Parse(format!("{s:?} is not a GZ pattern")));
        }
        Ok(p)
    }
}

/// A Young-Yamanouchi path `p_1 = (1), …, p_n = λ`, one box added per step.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct YYPath {
    pub chain: Vec<Partition>,
}

impl YYPath {
    pub fn shape(&self) -> &Partition {
        self.chain.last().expect("YY path is nonempty")
    }

    pub fn is_valid(&self) -> bool {
        !self.chain.is_empty()
            && self.chain[0] == Partition::row(1)
            && self.chain.windows(2).all(|w| remove_box(&w[1]).contains(&w[0]))
    }

    /// Row (0-based) in which each box was added, i.e. the record `j_k − 1`.
    pub fn rows_added(&self) -> Vec<usize> {
        let mut out = vec![0];
        for w in self.chain.windows(2) {
            let r = (0..w[1].rows()).find(|&i| w[1].get(i) != w[0].get(i)).expect("one box added");
            out.push(r);
        }
        out
    }

    /// Builds a path from the rows (0-based) in which successive boxes land.
    pub fn from_rows(rows: &[usize]) -> Result<YYPath> {
        let mut cur = Partition::empty();
        let mut chain = Vec::with_capacity(rows.len());
        for &r in rows {
            cur = cur
                .with_box_added(r)
                .ok_or_else(|| Error::InvalidPartition(format!("cannot add box in row {r} to {cur}")))?;
            chain.push(cur.clone());
        }
        Ok(YYPath { chain })
    }
}

impl fmt::Display for YYPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.chain.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(";"))
    }
}

impl FromStr for YYPath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let chain = s.split(';').map(Partition::from_str).collect::<Result<Vec<_>>>()?;
        let p = YYPath { chain };
        if !p.is_valid() {
            return Err(Error::Parse(format!("{s:?} is not a YY path")));
        }
        Ok(p)
    }
}

/// All partitions of `n` with at most `d` rows, lexicographically descending.
pub fn enumerate_partitions(d: usize, n: u32) -> Vec<Partition> {
    fn rec(rem: u32, max: u32, rows_left: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if rows_left == 0 {
            return;
        }
        for p in (1..=max.min(rem)).rev() {
            cur.push(p);
            rec(rem - p, p, rows_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        if n == 0 {
            out.push(Partition::empty());
        }
        return out;
    }
    rec(n, n, d, &mut Vec::new(), &mut out);
    out
}

/// All weights with `d` entries summing to `n`, lexicographically descending.
pub fn enumerate_weights(d: usize, n: u32) -> Vec<Weight> {
    fn rec(rem: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Weight>) {
        if left == 1 {
            cur.push(rem);
            out.push(Weight(cur.clone()));
            cur.pop();
            return;
        }
        for x in (0..=rem).rev() {
            cur.push(x);
            rec(rem - x, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(n, d, &mut Vec::new(), &mut out);
    }
    out
}

fn check_rows(lambda: &Partition, d: usize) -> Result<()> {
    if lambda.rows() > d {
        return Err(Error::TooManyRows { lambda: lambda.to_string(), d });
    }
    Ok(())
}

/// Exponent vector over primes; used to evaluate ratios of factorials exactly.
#[derive(Default)]
struct Factored(BTreeMap<u64, i64>);

impl Factored {
    fn mul_int(&mut self, mut x: u64, sign: i64) {
        let mut p = 2;
        while p * p <= x {
            while x.is_multiple_of(p) {
                *self.0.entry(p).or_default() += sign;
                x /= p;
            }
            p += 1;
        }
        if x > 1 {
            *self.0.entry(x).or_default() += sign;
        }
    }
    fn mul_factorial(&mut self, n: u64, sign: i64) {
        for k in 2..=n {
            self.mul_int(k, sign);
        }
    }
    fn eval(&self, what: &'static str) -> Result<u128> {
        let mut acc: u128 = 1;
        for (&p, &e) in &self.0 {
            if e < 0 {
                return Err(Error::Overflow(what));
            }
            for _ in 0..e {
                acc = acc.checked_mul(p as u128).ok_or(Error::Overflow(what))?;
            }
        }
        Ok(acc)
    }
    fn log2(&self) -> f64 {
        self.0.iter().map(|(&p, &e)| e as f64 * (p as f64).log2()).sum()
    }
}

/// Dimension of the `U(d)` irrep `Q_λ^d`:
/// `∏_{i<j}(λ̃_i − λ̃_j) / ∏_{m=1}^{d−1} m!`.
pub fn dim_q(lambda: &Partition, d: usize) -> Result<u128> {
    dim_q_factored(lambda, d)?.eval("dim_q")
}

/// `log₂ dim Q_λ^d`, usable where `dim_q` overflows.
pub fn dim_q_log2(lambda: &Partition, d: usize) -> Result<f64> {
    Ok(dim_q_factored(lambda, d)?.log2())
}

fn dim_q_factored(lambda: &Partition, d: usize) -> Result<Factored> {
    check_rows(lambda, d)?;
    let t = lambda.shifted(d);
    let mut f = Factored::default();
    for i in 0..d {
        for j in i + 1..d {
            f.mul_int((t[i] - t[j]) as u64, 1);
        }
    }
    for m in 1..d {
        f.mul_factorial(m as u64, -1);
    }
    Ok(f)
}

/// Dimension of the `S_n` irrep `P_λ`: `n! ∏_{i<j}(λ̃_i − λ̃_j) / ∏_i λ̃_i!`.
pub fn dim_p(lambda: &Partition) -> Result<u128> {
    dim_p_factored(lambda).eval("dim_p")
}

/// `log₂ dim P_λ`, usable where `dim_p` overflows.
pub fn dim_p_log2(lambda: &Partition) -> f64 {
    dim_p_factored(lambda).log2()
}

fn dim_p_factored(lambda: &Partition) -> Factored {
    let d = lambda.rows();
    let t = lambda.shifted(d);
    let mut f = Factored::default();
    f.mul_factorial(lambda.size() as u64, 1);
    for i in 0..d {
        for j in i + 1..d {
            f.mul_int((t[i] - t[j]) as u64, 1);
        }
        f.mul_factorial(t[i] as u64, -1);
    }
    f
}

/// `n! / ∏ parts_i!`, computed by prime-exponent cancellation.
pub fn multinomial(parts: &[u32]) -> Result<u128> {
    let mut f = Factored::default();
    f.mul_factorial(parts.iter().map(|&x| x as u64).sum(), 1);
    for &p in parts {
        f.mul_factorial(p as u64, -1);
    }
    f.eval("multinomial")
}

/// All `μ` with at most `rows` rows interlacing `λ` (so `λ_i ≥ μ_i ≥ λ_{i+1}`),
/// lexicographically descending.
pub fn interlacing_below(lambda: &Partition, rows: usize) -> Vec<Partition> {
    fn rec(lambda: &Partition, i: usize, rows: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if i == rows {
            out.push(Partition::new(cur.clone()).expect("interlacing parts decrease"));
            return;
        }
        for x in (lambda.get(i + 1)..=lambda.get(i)).rev() {
            cur.push(x);
            rec(lambda, i + 1, rows, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if lambda.rows() > rows + 1 {
        return out;
    }
    // Rows of μ past the rows of λ are forced to zero.
    rec(lambda, 0, rows.min(lambda.rows()), &mut Vec::new(), &mut out);
    out
}

/// Interlacing test `μ ≾ λ`: `λ_1 ≥ μ_1 ≥ λ_2 ≥ μ_2 ≥ …`.
pub fn interlaces(mu: &Partition, lambda: &Partition) -> bool {
    let m = mu.rows().max(lambda.rows());
    (0..m).all(|i| lambda.get(i) >= mu.get(i) && mu.get(i) >= lambda.get(i + 1))
}

/// GZ patterns of shape `λ` for `U(d)`, lexicographically descending in
/// `(q_{d−1}, q_{d−2}, …, q_1)`. For `λ = (1)` this lists `|1⟩, …, |d⟩`.
pub fn enumerate_gz(lambda: &Partition, d: usize) -> Result<Vec<GZPattern>> {
    check_rows(lambda, d)?;
    fn rec(lambda: &Partition, d: usize) -> Vec<Vec<Partition>> {
        if d == 1 || lambda.is_empty() {
            return vec![vec![lambda.clone(); d]];
        }
        let mut out = Vec::new();
        for mu in interlacing_below(lambda, d - 1) {
            for mut lower in rec(&mu, d - 1) {
                lower.push(lambda.clone());
                out.push(lower);
            }
        }
        out
    }
    if d == 0 {
        return Ok(vec![]);
    }
    Ok(rec(lambda, d).into_iter().map(|chain| GZPattern { chain }).collect())
}

/// Number of GZ patterns of shape `λ` and weight `μ`.
pub fn kostka(lambda: &Partition, mu: &Weight) -> Result<u64> {
    if lambda.size() != mu.n() {
        return Err(Error::SizeMismatch(format!("|{lambda}| != |{mu}|")));
    }
    let d = mu.d();
    if lambda.rows() > d {
        return Ok(0);
    }
    fn rec(lambda: &Partition, mu: &[u32], memo: &mut HashMap<(Partition, usize), u64>) -> u64 {
        let d = mu.len();
        if d == 1 {
            return u64::from(lambda.size() == mu[0] && lambda.rows() <= 1);
        }
        if let Some(&v) = memo.get(&(lambda.clone(), d)) {
            return v;
        }
        let target = lambda.size() - mu[d - 1].min(lambda.size());
        let mut total = 0;
        if lambda.size() >= mu[d - 1] {
            for nu in interlacing_below(lambda, d - 1) {
                if nu.size() == target {
                    total += rec(&nu, &mu[..d - 1], memo);
                }
            }
        }
        memo.insert((lambda.clone(), d), total);
        total
    }
    Ok(rec(lambda, &mu.0, &mut HashMap::new()))
}

/// Schur polynomial evaluator at a fixed point `r`, using the branching rule
/// `s_λ(r_1..r_d) = Σ_{μ≾λ} r_d^{|λ|−|μ|} s_μ(r_1..r_{d−1})`. The memo is
/// shared across calls, so tabulating every `λ ⊢ n` is cheap. Works for any
/// commutative semiring type (`f64`, exact rationals, ...).
pub struct SchurEvaluator<T> {
    r: Vec<T>,
    memo: HashMap<(Partition, usize), T>,
}

impl<T> SchurEvaluator<T>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    pub fn new(r: Vec<T>) -> Self {
        SchurEvaluator { r, memo: HashMap::new() }
    }

    pub fn eval(&mut self, lambda: &Partition) -> T {
        let d = self.r.len();
        self.rec(lambda, d)
    }

    fn pow(x: &T, k: u32) -> T {
        let mut acc = T::one();
        for _ in 0..k {
            acc = acc * x.clone();
        }
        acc
    }

    fn rec(&mut self, lambda: &Partition, d: usize) -> T {
        if lambda.rows() > d {
            return T::zero();
        }
        if d == 0 {
            return if lambda.is_empty() { T::one() } else { T::zero() };
        }
        if d == 1 {
            return Self::pow(&self.r[0], lambda.size());
        }
        if let Some(v) = self.memo.get(&(lambda.clone(), d)) {
            return v.clone();
        }
        let mut total = T::zero();
        let rd = self.r[d - 1].clone();
        for mu in interlacing_below(lambda, d - 1) {
            let k = lambda.size() - mu.size();
            total = total + Self::pow(&rd, k) * self.rec(&mu, d - 1);
        }
        self.memo.insert((lambda.clone(), d), total.clone());
        total
    }
}

/// Schur polynomial `s_λ(r) = Σ_μ K_{λμ} r^μ` for a single `λ`.
pub fn schur_poly_generic<T>(lambda: &Partition, r: &[T]) -> T
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    SchurEvaluator::new(r.to_vec()).eval(lambda)
}

/// Schur polynomial at a nonnegative real vector.
pub fn schur_poly(lambda: &Partition, r: &[f64]) -> Result<f64> {
    if let Some(&x) = r.iter().find(|&&x| x < 0.0) {
        return Err(Error::NegativeProbability(x));
    }
    Ok(schur_poly_generic(lambda, r))
}

/// Partitions obtained by adding one box, at most `d` rows, ordered by row.
pub fn add_box(lambda: &Partition, d: usize) -> Vec<Partition> {
    (0..d).filter_map(|r| lambda.with_box_added(r)).collect()
}

/// Partitions obtained by removing one box, ordered by row.
pub fn remove_box(lambda: &Partition) -> Vec<Partition> {
    (0..lambda.rows()).filter_map(|r| lambda.with_box_removed(r)).collect()
}

/// YY paths of shape `λ` in index order (`yy_index` = position + 1).
/// Paths start at `(1)`, so the empty partition has none.
pub fn enumerate_yy(lambda: &Partition) -> Vec<YYPath> {
    if lambda.is_empty() {
        return vec![];
    }
    if *lambda == Partition::row(1) {
        return vec![YYPath { chain: vec![lambda.clone()] }];
    }
    let mut preds = remove_box(lambda);
    preds.sort();
    let mut out = Vec::new();
    for mu in preds {
        for mut p in enumerate_yy(&mu) {
            p.chain.push(lambda.clone());
            out.push(p);
        }
    }
    out
}

/// `f_n(p) = 1 + Σ_{k=2}^{n} Σ_{μ ∈ p_k − □, μ < p_{k−1}} dim P_μ`, 1-based.
pub fn yy_index(p: &YYPath) -> Result<usize> {
    if !p.is_valid() {
        return Err(Error::Parse(format!("{p} is not a YY path")));
    }
    let mut idx = 1usize;
    for k in 1..p.chain.len() {
        for mu in remove_box(&p.chain[k]) {
            if mu < p.chain[k - 1] {
                idx += dim_p(&mu)? as usize;
            }
        }
    }
    Ok(idx)
}

/// Inverse of [`yy_index`].
pub fn yy_unindex(lambda: &Partition, k: usize) -> Result<YYPath> {
    let max = if lambda.is_empty() { 0 } else { dim_p(lambda)? as usize };
    if k == 0 || k > max {
        return Err(Error::OutOfRange { index: k, max });
    }
    let mut chain = vec![lambda.clone()];
    let mut cur = lambda.clone();
    let mut rem = k - 1;
    while cur.size() > 1 {
        let mut preds = remove_box(&cur);
        preds.sort();
        let mut next = None;
        for mu in preds {
            let dm = dim_p(&mu)? as usize;
            if rem < dm {
                next = Some(mu);
                break;
            }
            rem -= dm;
        }
        cur = next.expect("rank within range");
        chain.push(cur.clone());
    }
    chain.reverse();
    Ok(YYPath { chain })
}

/// Shannon entropy in bits.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// Relative entropy `D(p‖q)` in bits; `+∞` if `p` is not supported in `q`.
pub fn relative_entropy(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            acc += a * (a / b).log2();
        }
    }
    acc
}
