//! Reduced Wigner coefficients and the recursive `U(d)` Clebsch-Gordan
//! transform `Q_λ ⊗ ℂ^d → ⊕_j Q_{λ+e_j}`.
//!
//! The CG transform on `|q⟩|i⟩` splits `q` into its top level `μ = λ`, the
//! next level `μ'` and the remaining `d − 2` levels. For `i < d` the
//! `U(d−1)` transform is applied to the lower pattern, producing branches
//! `μ' + e_{j'}`; `i = d` is relabelled `j' = 0` and leaves the lower pattern
//! alone. The `d × d` matrix `T̂_{j,j'}` then routes each branch to the output
//! irreps `μ + e_j`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::combinatorics::{dim_q, enumerate_gz, interlaces, GZPattern, Partition};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DenseOperator, C64};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedWignerQuery {
    pub mu: Partition,
    /// Output row, `1..=d`.
    pub j: usize,
    pub mu_prime: Partition,
    /// Input branch, `0..=d−1`; `0` stands for the relabelled `i = d` input.
    pub j_prime: usize,
}

/// A reduced Wigner coefficient, or the marker that the selection rules
/// forbid the transition (kept distinct from a formula value of zero).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coefficient {
    Forbidden,
    Value(f64),
}

impl Coefficient {
    pub fn value(self) -> f64 {
        match self {
            Coefficient::Forbidden => 0.0,
            Coefficient::Value(v) => v,
        }
    }
}

fn add_unit(p: &Partition, j: usize, rows: usize) -> Option<Partition> {
    if j == 0 {
        return Some(p.clone());
    }
    p.with_box_added(j - 1).filter(|q| q.rows() <= rows)
}

/// Whether the query passes all selection rules.
pub fn allowed(q: &ReducedWignerQuery, d: usize) -> bool {
    if d == 0 || q.j == 0 || q.j > d || q.j_prime >= d.max(1) {
        return false;
    }
    if q.mu.rows() > d || q.mu_prime.rows() > d - 1 || !interlaces(&q.mu_prime, &q.mu) {
        return false;
    }
    let (Some(out), Some(out_prime)) = (add_unit(&q.mu, q.j, d), add_unit(&q.mu_prime, q.j_prime, d - 1)) else {
        return false;
    };
    interlaces(&out_prime, &out)
}

/// Sign attached to the square root. `j' = 0` is treated as `j' = d`, and the
/// sign is `+1` when `j' ≥ j`, `−1` otherwise.
fn sign(j: usize, j_prime: usize, d: usize) -> f64 {
    let jp = if j_prime == 0 { d } else { j_prime };
    if jp >= j {
        1.0
    } else {
        -1.0
    }
}

/// Closed-form reduced Wigner coefficient `T̂^{μ,j,μ',j'}` for `U(d)`.
pub fn reduced_wigner(q: &ReducedWignerQuery, d: usize) -> Coefficient {
    if !allowed(q, d) {
        return Coefficient::Forbidden;
    }
    let m = q.mu.shifted(d);
    let mp = q.mu_prime.shifted(d - 1);
    let j = q.j - 1;
    let mut num = 1.0f64;
    let mut den = 1.0f64;
    if q.j_prime == 0 {
        for &s in &mp {
            num *= (m[j] - s) as f64;
        }
        for (s, &ms) in m.iter().enumerate() {
            if s != j {
                den *= (m[j] - ms) as f64;
            }
        }
    } else {
        let jp = q.j_prime - 1;
        for (s, &ms) in mp.iter().enumerate() {
            if s != jp {
                num *= (m[j] - ms) as f64;
            }
        }
        for (t, &mt) in m.iter().enumerate() {
            if t != j {
                num *= (mp[jp] - mt + 1) as f64;
                den *= (m[j] - mt) as f64;
            }
        }
        for (t, &mt) in mp.iter().enumerate() {
            if t != jp {
                den *= (mp[jp] - mt + 1) as f64;
            }
        }
    }
    let ratio = num / den;
    debug_assert!(ratio >= -1e-12, "negative radicand {ratio} for {q:?}");
    Coefficient::Value(sign(q.j, q.j_prime, d) * ratio.max(0.0).sqrt())
}

/// The `d × d` matrix `[T̂]_{j,j'}` for fixed `μ` and branch record `μ''`,
/// where column `j'` reads `μ' = μ'' − e_{j'}` (and `μ' = μ''` for `j' = 0`).
/// Forbidden entries are zero; on the allowed rows and columns the matrix is
/// orthogonal.
pub fn that_matrix(mu: &Partition, mu_pp: &Partition, d: usize) -> Result<DenseOperator> {
    let mut m = CMatrix::zeros(d, d);
    let mut any = false;
    for jp in 0..d {
        let mu_prime = if jp == 0 { Some(mu_pp.clone()) } else { mu_pp.with_box_removed(jp - 1) };
        let Some(mu_prime) = mu_prime else { continue };
        for j in 1..=d {
            let q = ReducedWignerQuery { mu: mu.clone(), j, mu_prime: mu_prime.clone(), j_prime: jp };
            if let Coefficient::Value(v) = reduced_wigner(&q, d) {
                m[(j - 1, jp)] = C64::new(v, 0.0);
                any = true;
            }
        }
    }
    if !any {
        return Err(Error::NoConsistentBranch(format!("mu={mu} mu''={mu_pp} d={d}")));
    }
    let rows = (1..=d).map(|j| format!("j={j}")).collect();
    let cols = (0..d).map(|j| format!("j'={j}")).collect();
    DenseOperator::new(m, rows, cols)
}

/// One output term of the CG transform: `(j, q', coefficient)` with `q'` a
/// pattern of shape `λ + e_j`.
pub type CgTerm = (usize, GZPattern, f64);

type CgCache = Mutex<HashMap<(GZPattern, usize), Arc<Vec<CgTerm>>>>;

fn cg_cache() -> &'static CgCache {
    static CACHE: OnceLock<CgCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `U_CG |q⟩|i⟩` for a pattern `q` with `d = q.d()` levels and `i ∈ 1..=d`.
pub fn cg_apply(q: &GZPattern, i: usize) -> Arc<Vec<CgTerm>> {
    let key = (q.clone(), i);
    if let Some(v) = cg_cache().lock().expect("cg cache").get(&key) {
        return v.clone();
    }
    let out = Arc::new(cg_compute(q, i));
    cg_cache().lock().expect("cg cache").insert(key, out.clone());
    out
}

fn cg_compute(q: &GZPattern, i: usize) -> Vec<CgTerm> {
    let d = q.d();
    let mu = q.top();
    if d == 1 {
        let top = mu.with_box_added(0).expect("first row always grows");
        return vec![(1, GZPattern { chain: vec![top] }, 1.0)];
    }
    let rest = q.lower();
    let mu_prime = rest.top().clone();
    let sub: Vec<(usize, GZPattern, f64)> =
        if i < d { cg_apply(&rest, i).iter().cloned().collect() } else { vec![(0, rest, 1.0)] };
    let mut out = Vec::new();
    for (jp, lower, c) in sub {
        for j in 1..=d {
            let query = ReducedWignerQuery { mu: mu.clone(), j, mu_prime: mu_prime.clone(), j_prime: jp };
            if let Coefficient::Value(t) = reduced_wigner(&query, d) {
                if t == 0.0 {
                    continue;
                }
                let mut chain = lower.chain.clone();
                chain.push(mu.with_box_added(j - 1).expect("allowed branch"));
                out.push((j, GZPattern { chain }, t * c));
            }
        }
    }
    out
}

/// Dense CG block `U_CG^{λ,(1)}` with its basis labels.
#[derive(Clone, Debug)]
pub struct CGBlock {
    pub lambda: Partition,
    pub d: usize,
    /// Input basis `(q, i)`: `q` in `enumerate_gz` order, then `i = 1..=d`.
    pub inputs: Vec<(GZPattern, usize)>,
    /// Output basis `(j, q')`: `j` ascending over valid rows, `q'` in
    /// `enumerate_gz(λ + e_j)` order.
    pub outputs: Vec<(usize, GZPattern)>,
    pub operator: DenseOperator,
}

pub fn cg_block(lambda: &Partition, d: usize) -> Result<CGBlock> {
    let gz = enumerate_gz(lambda, d)?;
    let inputs: Vec<(GZPattern, usize)> = gz.iter().flat_map(|q| (1..=d).map(move |i| (q.clone(), i))).collect();
    let mut outputs = Vec::new();
    for j in 1..=d {
        if let Some(l2) = lambda.with_box_added(j - 1).filter(|p| p.rows() <= d) {
            for q in enumerate_gz(&l2, d)? {
                outputs.push((j, q));
            }
        }
    }
    let index: HashMap<&GZPattern, usize> = outputs.iter().enumerate().map(|(k, (_, q))| (q, k)).collect();
    let mut m = CMatrix::zeros(outputs.len(), inputs.len());
    for (col, (q, i)) in inputs.iter().enumerate() {
        for (_, qp, c) in cg_apply(q, *i).iter() {
            m[(index[qp], col)] += C64::new(*c, 0.0);
        }
    }
    let expected = d as u128 * dim_q(lambda, d)?;
    debug_assert_eq!(outputs.len() as u128, expected);
    let rows = outputs.iter().map(|(j, q)| format!("j={j}|{q}")).collect();
    let cols = inputs.iter().map(|(q, i)| format!("{q}|i={i}")).collect();
    Ok(CGBlock { lambda: lambda.clone(), d, inputs, outputs, operator: DenseOperator::new(m, rows, cols)? })
}
