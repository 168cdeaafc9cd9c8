//! Permutations of `[n]` and irreducible characters of `S_n`.
//!
//! Characters are computed with the Murnaghan-Nakayama rule on beta-sets and
//! share no code with the Clebsch-Gordan machinery, so they can serve as an
//! independent oracle.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::combinatorics::Partition;
use crate::error::{Error, Result};

/// A permutation in 0-based one-line notation: `s.0[k] = s(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::Parse(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Permutation(images))
    }

    /// Adjacent transposition swapping `k` and `k + 1` (0-based).
    pub fn adjacent(n: usize, k: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(k, k + 1);
        Permutation(v)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, k: usize) -> usize {
        self.0[k]
    }

    /// `(self ∘ other)(k) = self(other(k))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&k| self.0[k]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (k, &v) in self.0.iter().enumerate() {
            inv[v] = k;
        }
        Permutation(inv)
    }

    pub fn cycle_type(&self) -> Partition {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut lens = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.0[k];
                len += 1;
            }
            lens.push(len);
        }
        lens.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(lens).expect("sorted cycle lengths")
    }

    pub fn sign(&self) -> i64 {
        let ct = self.cycle_type();
        let even = ct.parts().iter().map(|&l| (l - 1) as usize).sum::<usize>() % 2 == 0;
        if even {
            1
        } else {
            -1
        }
    }

    /// Rank in lexicographic order of one-line notation (Lehmer code).
    pub fn rank(&self) -> usize {
        let n = self.n();
        let mut r = 0;
        for i in 0..n {
            let smaller = self.0[i + 1..].iter().filter(|&&x| x < self.0[i]).count();
            r = r * (n - i) + smaller;
        }
        r
    }

    pub fn unrank(n: usize, mut r: usize) -> Permutation {
        let mut digits = vec![0; n];
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = r % base;
            r /= base;
        }
        let mut pool: Vec<usize> = (0..n).collect();
        Permutation(digits.into_iter().map(|k| pool.remove(k)).collect())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "[{}]", s.join(" "))
    }
}

/// All permutations of `[n]` in lexicographic order of one-line notation.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    (0..factorial(n)).map(|r| Permutation::unrank(n, r)).collect()
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Size of the conjugacy class with cycle type `mu`: `n! / ∏ i^{m_i} m_i!`.
pub fn class_size(mu: &Partition) -> u128 {
    let n = mu.size() as u128;
    let mut num: u128 = (1..=n).product();
    let mut counts: HashMap<u32, u32> = HashMap::new();
    for &p in mu.parts() {
        *counts.entry(p).or_default() += 1;
    }
    for (&i, &m) in &counts {
        num /= (i as u128).pow(m) * (1..=m as u128).product::<u128>();
    }
    num
}

fn cache() -> &'static Mutex<HashMap<(Partition, Partition), i64>> {
    static CACHE: OnceLock<Mutex<HashMap<(Partition, Partition), i64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `χ_λ(μ)`: irreducible character of `S_n` at cycle type `μ`.
pub fn character(lambda: &Partition, mu: &Partition) -> Result<i64> {
    if lambda.size() != mu.size() {
        return Err(Error::SizeMismatch(format!("|{lambda}| != |{mu}|")));
    }
    Ok(mn(lambda, mu))
}

fn mn(lambda: &Partition, mu: &Partition) -> i64 {
    if mu.is_empty() {
        return 1;
    }
    let key = (lambda.clone(), mu.clone());
    if let Some(&v) = cache().lock().expect("character cache").get(&key) {
        return v;
    }
    // Strip a rim hook of length k = largest cycle; on a beta-set this is
    // moving one bead from b to b − k, with sign (−1)^{beads jumped}.
    let k = mu.get(0) as i64;
    let rest = Partition::new(mu.parts()[1..].to_vec()).expect("tail of a partition");
    let m = lambda.rows();
    let beta: Vec<i64> = (0..m).map(|i| lambda.get(i) as i64 + (m - 1 - i) as i64).collect();
    let mut total = 0;
    for (i, &b) in beta.iter().enumerate() {
        let t = b - k;
        if t < 0 || beta.contains(&t) {
            continue;
        }
        let jumped = beta.iter().filter(|&&x| x > t && x < b).count();
        let mut nb = beta.clone();
        nb[i] = t;
        nb.sort_unstable_by(|a, b| b.cmp(a));
        let parts: Vec<u32> = nb.iter().enumerate().map(|(j, &x)| (x - (m - 1 - j) as i64) as u32).collect();
        let shape = Partition::new(parts).expect("beta-set yields a partition");
        let sign = if jumped % 2 == 0 { 1 } else { -1 };
        total += sign * mn(&shape, &rest);
    }
    cache().lock().expect("character cache").insert(key, total);
    total
}
