//! Dense complex matrices with basis labels, tensor-power helpers on
//! `(ℂ^d)^{⊗n}`, and a small row-sparse real matrix for the Schur transform.
//!
//! Computational basis index of `|i_1 … i_n⟩` is `Σ_k i_k d^{n−k}` (first
//! qudit most significant). Permutations act as
//! `P(s)|i_1 … i_n⟩ = |i_{s⁻¹(1)} … i_{s⁻¹(n)}⟩`, i.e. the qudit at position
//! `k` moves to position `s(k)`, so `P(s)P(t) = P(s∘t)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::characters::Permutation;
use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Complex matrix carrying explicit row/column basis labels.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    pub matrix: CMatrix,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl DenseOperator {
    pub fn new(matrix: CMatrix, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        if row_labels.len() != matrix.nrows() || col_labels.len() != matrix.ncols() {
            return Err(Error::SizeMismatch(format!(
                "{}x{} matrix with {} row and {} column labels",
                matrix.nrows(),
                matrix.ncols(),
                row_labels.len(),
                col_labels.len()
            )));
        }
        Ok(DenseOperator { matrix, row_labels, col_labels })
    }

    /// Labels rows and columns by their integer index.
    pub fn unlabeled(matrix: CMatrix) -> Self {
        let row_labels = (0..matrix.nrows()).map(|i| i.to_string()).collect();
        let col_labels = (0..matrix.ncols()).map(|i| i.to_string()).collect();
        DenseOperator { matrix, row_labels, col_labels }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }
}

/// Row-sparse real matrix; each row holds `(column, value)` pairs sorted by column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseRows {
    pub ncols: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseRows {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> RMatrix {
        let mut m = RMatrix::zeros(self.nrows(), self.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] = v;
            }
        }
        m
    }

    pub fn row_dense(&self, r: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.ncols];
        for &(c, x) in &self.rows[r] {
            v[c] = C64::new(x, 0.0);
        }
        v
    }

    /// `self · v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.rows.iter().map(|row| row.iter().map(|&(c, x)| v[c] * x).sum()).collect()
    }

    /// `selfᵀ · w`.
    pub fn apply_transpose(&self, w: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.ncols];
        for (row, &a) in self.rows.iter().zip(w) {
            if a == ZERO {
                continue;
            }
            for &(c, x) in row {
                out[c] += a * x;
            }
        }
        out
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max |M†M − I|`.
pub fn isometry_residual(m: &CMatrix) -> f64 {
    let g = m.adjoint() * m;
    max_abs_diff(&g, &CMatrix::identity(g.nrows(), g.ncols()))
}

/// `max(|M†M − I|, |MM† − I|)` for square `M`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let h = m * m.adjoint();
    isometry_residual(m).max(max_abs_diff(&h, &CMatrix::identity(h.nrows(), h.ncols())))
}

/// Checks unitarity exactly for `d ≤ 128`. Above that it uses a randomized
/// probe test (`U†Uv = v` and `UU†v = v` on fixed pseudo-random vectors),
/// which costs `O(d²)` instead of `O(d³)`.
pub fn check_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    let r = if u.nrows() <= 128 || u.nrows() != u.ncols() { unitarity_residual(u) } else { probe_unitarity(u, 3) };
    if r > tol {
        return Err(Error::NotUnitary(r));
    }
    Ok(())
}

fn probe_unitarity(u: &CMatrix, probes: u64) -> f64 {
    let d = u.nrows();
    let mut worst = 0.0f64;
    for k in 0..probes {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed ^ k);
        let v = nalgebra::DVector::from_vec(random_state(d, &mut rng));
        let a = u.adjoint() * (u * &v) - &v;
        let b = u * (u.adjoint() * &v) - &v;
        worst = worst.max(a.camax()).max(b.camax());
    }
    worst
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn check_normalized(v: &[C64], tol: f64) -> Result<()> {
    let nv = norm(v);
    if (nv - 1.0).abs() > tol {
        return Err(Error::NotNormalized(nv));
    }
    Ok(())
}

/// Base-`d` digits of `idx`, most significant first.
pub fn digits(mut idx: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = idx % d;
        idx /= d;
    }
    out
}

pub fn from_digits(digs: &[usize], d: usize) -> usize {
    digs.iter().fold(0, |acc, &x| acc * d + x)
}

/// Table `t` with `P(s)|x⟩ = |t[x]⟩` on `(ℂ^d)^{⊗n}`.
pub fn permutation_table(s: &Permutation, d: usize) -> Vec<usize> {
    let n = s.n();
    let dim = d.pow(n as u32);
    let mut out = vec![0; dim];
    let mut dst = vec![0; n];
    for (x, slot) in out.iter_mut().enumerate() {
        let src = digits(x, d, n);
        for k in 0..n {
            dst[s.apply(k)] = src[k];
        }
        *slot = from_digits(&dst, d);
    }
    out
}

/// Dense permutation operator `P(s)`.
pub fn permutation_operator(s: &Permutation, d: usize) -> CMatrix {
    let t = permutation_table(s, d);
    let mut m = CMatrix::zeros(t.len(), t.len());
    for (x, &y) in t.iter().enumerate() {
        m[(y, x)] = ONE;
    }
    m
}

/// Applies `u` (d×d) to tensor factor `k` (0-based) of `v` in place.
pub fn apply_local(u: &CMatrix, n: usize, k: usize, v: &mut [C64]) {
    let d = u.nrows();
    let stride = d.pow((n - 1 - k) as u32);
    let block = stride * d;
    let mut buf = vec![ZERO; d];
    for base in (0..v.len()).step_by(block) {
        for off in 0..stride {
            for (i, b) in buf.iter_mut().enumerate() {
                *b = v[base + off + i * stride];
            }
            for i in 0..d {
                let mut acc = ZERO;
                for (j, b) in buf.iter().enumerate() {
                    acc += u[(i, j)] * b;
                }
                v[base + off + i * stride] = acc;
            }
        }
    }
}

/// `U^{⊗n} v` in place.
pub fn apply_tensor_power(u: &CMatrix, n: usize, v: &mut [C64]) {
    for k in 0..n {
        apply_local(u, n, k, v);
    }
}

/// Dense `U^{⊗n}`.
pub fn tensor_power(u: &CMatrix, n: usize) -> CMatrix {
    let mut m = CMatrix::identity(1, 1);
    for _ in 0..n {
        m = kron(&m, u);
    }
    m
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary via QR of a complex Ginibre matrix with phase fix.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let z = r[(j, j)];
        let ph = if z.norm() > 0.0 { z / z.norm() } else { ONE };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// A random unitary that is cheap for large `d`: random phases times a few
/// random Householder reflections. Not Haar distributed.
pub fn householder_unitary<R: Rng + ?Sized>(d: usize, reflections: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| {
        C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
    }));
    for _ in 0..reflections {
        let v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
        let nv = norm(&v);
        let v = nalgebra::DVector::from_iterator(d, v.into_iter().map(|z| z / nv));
        // (I − 2vv†) m
        let w = v.adjoint() * &m;
        m -= (&v * w) * C64::new(2.0, 0.0);
    }
    m
}

/// Random unitary: Haar for `d ≤ 64`, Householder products above.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    if d <= 64 {
        haar_unitary(d, rng)
    } else {
        householder_unitary(d, 4, rng)
    }
}

/// Uniformly random pure state of dimension `dim`.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let nv = norm(&v);
    v.into_iter().map(|z| z / nv).collect()
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        v.swap(i, j);
    }
    Permutation(v)
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::all_permutations;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn permutation_operator_is_homomorphism() {
        for s in all_permutations(3) {
            for t in all_permutations(3) {
                let lhs = permutation_operator(&s, 2) * permutation_operator(&t, 2);
                let rhs = permutation_operator(&s.compose(&t), 2);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn permutation_moves_qudit_k_to_s_k() {
        // s = cycle 0→1→2→0 on |i_1 i_2 i_3⟩ = |0 1 2⟩ gives |2 0 1⟩.
        let s = Permutation(vec![1, 2, 0]);
        let t = permutation_table(&s, 3);
        assert_eq!(t[from_digits(&[0, 1, 2], 3)], from_digits(&[2, 0, 1], 3));
    }

    #[test]
    fn tensor_power_matches_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = haar_unitary(3, &mut rng);
        let v = random_state(27, &mut rng);
        let mut w = v.clone();
        apply_tensor_power(&u, 3, &mut w);
        let dense = tensor_power(&u, 3) * nalgebra::DVector::from_vec(v);
        for (a, b) in w.iter().zip(dense.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(unitarity_residual(&haar_unitary(5, &mut rng)) < 1e-12);
        assert!(unitarity_residual(&householder_unitary(80, 4, &mut rng)) < 1e-12);
    }
}
