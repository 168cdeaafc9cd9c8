//! Irrep matrices extracted from the Schur transform and numerical checks of
//! `U_Sch Q(U) P(s) U_Sch† = ⊕_λ q_λ(U) ⊗ p_λ(s)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::characters::{all_permutations, Permutation};
use crate::combinatorics::{enumerate_gz, multinomial, Partition};
use crate::error::{Error, Result};
use crate::linalg::{
    apply_tensor_power, check_unitary, digits, from_digits, permutation_table, CMatrix, DenseOperator, RMatrix, C64,
    ZERO,
};
use crate::schur_transform::{schur_columns, LambdaBlock, SchurLabelCodec, SchurTransform};

fn block_rows<'a>(st: &'a SchurTransform, lambda: &Partition) -> Result<&'a LambdaBlock> {
    st.codec.block(lambda)
}

fn dot_sparse(v: &[(usize, f64)], w: &[C64]) -> C64 {
    v.iter().map(|&(x, a)| w[x] * a).sum()
}

/// `q_λ(U)`, read off at `p = 1`.
pub fn rep_matrix_q(st: &SchurTransform, lambda: &Partition, u: &CMatrix) -> Result<DenseOperator> {
    if u.nrows() != st.d || u.ncols() != st.d {
        return Err(Error::SizeMismatch(format!("{}x{} matrix for d = {}", u.nrows(), u.ncols(), st.d)));
    }
    check_unitary(u, 1e-8)?;
    let b = block_rows(st, lambda)?;
    let m = q_matrix(st, b, u);
    let labels: Vec<String> = b.gz.iter().map(|g| g.to_string()).collect();
    DenseOperator::new(m, labels.clone(), labels)
}

fn q_matrix(st: &SchurTransform, b: &LambdaBlock, u: &CMatrix) -> CMatrix {
    let rows: Vec<usize> = (0..b.dim_q).map(|q| b.row(q, 1)).collect();
    let identity: Vec<usize> = (0..st.dim()).collect();
    sandwich(st, &rows, &rows, u, &identity)
}

/// `[S Q(U) P Sᵀ]_{r,c}` for the listed rows and columns of `S`, where `P`
/// is the basis permutation `table`. Picks the cheaper of dense propagation
/// of each column and direct entry-by-entry expansion over sparse rows.
fn sandwich(st: &SchurTransform, left: &[usize], right: &[usize], u: &CMatrix, table: &[usize]) -> CMatrix {
    let (d, n, dim) = (st.d, st.n, st.dim());
    let rows = &st.matrix.rows;
    let nnz_l: usize = left.iter().map(|&r| rows[r].len()).sum();
    let nnz_r: usize = right.iter().map(|&r| rows[r].len()).sum();
    let cost_dense = right.len() as f64 * ((n * d * dim) as f64 + nnz_l as f64);
    let cost_direct = n as f64 * nnz_l as f64 * nnz_r as f64;
    let mut m = CMatrix::zeros(left.len(), right.len());
    if cost_dense <= cost_direct {
        let mut z = vec![ZERO; dim];
        for (jc, &c) in right.iter().enumerate() {
            z.iter_mut().for_each(|v| *v = ZERO);
            for &(y, b) in &rows[c] {
                z[table[y]] = C64::new(b, 0.0);
            }
            apply_tensor_power(u, n, &mut z);
            for (ir, &r) in left.iter().enumerate() {
                m[(ir, jc)] = dot_sparse(&rows[r], &z);
            }
        }
    } else {
        let all: Vec<Vec<usize>> = (0..dim).map(|x| digits(x, d, n)).collect();
        for (ir, &r) in left.iter().enumerate() {
            let lx: Vec<(&[usize], f64)> = rows[r].iter().map(|&(x, a)| (all[x].as_slice(), a)).collect();
            for (jc, &c) in right.iter().enumerate() {
                let mut acc = ZERO;
                for &(y, b) in &rows[c] {
                    let ty = &all[table[y]];
                    for &(xd, a) in &lx {
                        let mut e = C64::new(a * b, 0.0);
                        for k in 0..n {
                            e *= u[(xd[k], ty[k])];
                        }
                        acc += e;
                    }
                }
                m[(ir, jc)] = acc;
            }
        }
    }
    m
}

/// `p_λ(s)`, read off at `q = 0`. Real orthogonal.
pub fn rep_matrix_p(st: &SchurTransform, lambda: &Partition, s: &Permutation) -> Result<RMatrix> {
    if s.n() != st.n {
        return Err(Error::SizeMismatch(format!("permutation of {} for n = {}", s.n(), st.n)));
    }
    let b = block_rows(st, lambda)?;
    let table = permutation_table(s, st.d);
    let rows: Vec<&Vec<(usize, f64)>> = (1..=b.dim_p).map(|p| &st.matrix.rows[b.row(0, p)]).collect();
    Ok(p_matrix_from_rows(&rows, &table, st.dim()))
}

fn p_matrix_from_rows(rows: &[&Vec<(usize, f64)>], table: &[usize], dim: usize) -> RMatrix {
    let k = rows.len();
    let mut m = RMatrix::zeros(k, k);
    let mut moved = vec![0.0; dim];
    for (p, row) in rows.iter().enumerate() {
        for &(x, a) in row.iter() {
            moved[table[x]] = a;
        }
        for (pp, rowp) in rows.iter().enumerate() {
            m[(pp, p)] = rowp.iter().map(|&(y, c)| c * moved[y]).sum();
        }
        for &(x, _) in row.iter() {
            moved[table[x]] = 0.0;
        }
    }
    m
}

/// The YY-basis irrep `p_λ` of `S_n` as produced by the Schur transform,
/// tabulated on every permutation (indexed by lexicographic rank).
#[derive(Clone, Debug)]
pub struct SnIrrep {
    pub lambda: Partition,
    pub dim: usize,
    pub matrices: Vec<RMatrix>,
}

impl SnIrrep {
    pub fn get(&self, s: &Permutation) -> &RMatrix {
        &self.matrices[s.rank()]
    }
}

/// Extracts `p_λ` for all of `S_n` using only the weight-`λ` columns of the
/// Schur transform on `d = max(rows(λ), 1)` qudits (or a larger `d`).
pub fn sn_irrep_with_d(lambda: &Partition, d: usize) -> Result<SnIrrep> {
    let n = lambda.size() as usize;
    if n == 0 || d < lambda.rows() {
        return Err(Error::InvalidPartition(format!("{lambda} with d = {d}")));
    }
    let codec = SchurLabelCodec::new(d, n)?;
    let b = codec.block(lambda)?.clone();
    let weight = lambda.padded(d);
    let cols = weight_columns(&weight, d);
    let expect = multinomial(&weight)? as usize;
    debug_assert_eq!(cols.len(), expect);
    let entries = schur_columns(&codec, &cols);
    // Highest-weight pattern is the first in enumerate_gz order.
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); b.dim_p];
    for (&x, col) in cols.iter().zip(&entries) {
        for &(r, a) in col {
            if r >= b.row(0, 1) && r <= b.row(0, b.dim_p) {
                rows[r - b.row(0, 1)].push((x, a));
            }
        }
    }
    let dim = codec.d.pow(n as u32);
    let refs: Vec<&Vec<(usize, f64)>> = rows.iter().collect();
    let matrices = all_permutations(n)
        .iter()
        .map(|s| {
            let table = sparse_table(s, d, &cols, dim);
            p_matrix_from_rows(&refs, &table, dim)
        })
        .collect();
    Ok(SnIrrep { lambda: lambda.clone(), dim: b.dim_p, matrices })
}

pub fn sn_irrep(lambda: &Partition) -> Result<SnIrrep> {
    sn_irrep_with_d(lambda, lambda.rows().max(1))
}

/// Permutation table that is only valid on the listed columns (others map to 0).
fn sparse_table(s: &Permutation, d: usize, cols: &[usize], dim: usize) -> Vec<usize> {
    let n = s.n();
    let mut t = vec![0; dim];
    let mut dst = vec![0; n];
    for &x in cols {
        let src = crate::linalg::digits(x, d, n);
        for k in 0..n {
            dst[s.apply(k)] = src[k];
        }
        t[x] = from_digits(&dst, d);
    }
    t
}

/// Computational basis indices whose symbol counts equal `weight`.
pub fn weight_columns(weight: &[u32], d: usize) -> Vec<usize> {
    let n: u32 = weight.iter().sum();
    let mut out = Vec::new();
    fn rec(left: &mut Vec<u32>, d: usize, acc: usize, rem: u32, out: &mut Vec<usize>) {
        if rem == 0 {
            out.push(acc);
            return;
        }
        for sym in 0..d {
            if left[sym] > 0 {
                left[sym] -= 1;
                rec(left, d, acc * d + sym, rem - 1, out);
                left[sym] += 1;
            }
        }
    }
    let mut left: Vec<u32> = (0..d).map(|i| weight.get(i).copied().unwrap_or(0)).collect();
    rec(&mut left, d, 0, n, &mut out);
    out
}

/// Per-`λ` diagonal block of `U_Sch Q(U)P(s) U_Sch†` and its factorization residual.
#[derive(Clone, Debug, Serialize)]
pub struct IrrepBlock {
    pub lambda: Partition,
    pub dim_q: usize,
    pub dim_p: usize,
    #[serde(skip)]
    pub block: CMatrix,
    /// `max |block − q_λ(U) ⊗ p_λ(s)|`.
    pub factorization_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IrrepBlockReport {
    pub d: usize,
    pub n: usize,
    pub blocks: Vec<IrrepBlock>,
    /// Largest entry outside the `λ`-diagonal blocks.
    pub leakage: f64,
    pub max_factorization_residual: f64,
    pub passed: bool,
}

/// Conjugates `Q(U)P(s)` by the Schur transform and checks the block form.
pub fn verify_block_diagonal(st: &SchurTransform, u: &CMatrix, s: &Permutation, tol: f64) -> Result<IrrepBlockReport> {
    check_unitary(u, 1e-8)?;
    let table = permutation_table(s, st.d);
    let all: Vec<usize> = (0..st.dim()).collect();
    let full = sandwich(st, &all, &all, u, &table);
    let mut diag: Vec<CMatrix> = Vec::with_capacity(st.codec.blocks.len());
    let mut leakage = 0.0f64;
    for b in &st.codec.blocks {
        diag.push(full.view((b.offset, b.offset), (b.len(), b.len())).into_owned());
        for c in (0..b.offset).chain(b.offset + b.len()..st.dim()) {
            for r in b.offset..b.offset + b.len() {
                leakage = leakage.max(full[(r, c)].norm_sqr());
            }
        }
    }
    let mut blocks = Vec::new();
    let mut worst = 0.0f64;
    for (b, m) in st.codec.blocks.iter().zip(diag) {
        let q = q_matrix(st, b, u);
        let p = rep_matrix_p(st, &b.lambda, s)?;
        let mut res = 0.0f64;
        for j in 0..b.len() {
            for i in 0..b.len() {
                let want = q[(i / b.dim_p, j / b.dim_p)] * p[(i % b.dim_p, j % b.dim_p)];
                res = res.max((m[(i, j)] - want).norm_sqr());
            }
        }
        let res = res.sqrt();
        worst = worst.max(res);
        blocks.push(IrrepBlock {
            lambda: b.lambda.clone(),
            dim_q: b.dim_q,
            dim_p: b.dim_p,
            block: m,
            factorization_residual: res,
        });
    }
    let leakage = leakage.sqrt();
    Ok(IrrepBlockReport {
        d: st.d,
        n: st.n,
        blocks,
        leakage,
        max_factorization_residual: worst,
        passed: leakage < tol && worst < tol.max(1e-9),
    })
}

/// The `λ` block of `U_Sch ρ^{⊗n} U_Sch†` in factored form.
#[derive(Clone, Debug, Serialize)]
pub struct RhoBlock {
    pub lambda: Partition,
    /// `q_λ(ρ)`, read at `p = p' = 1`.
    #[serde(skip)]
    pub q_block: CMatrix,
    /// Normalized partial trace of the block over the `Q_λ` register.
    #[serde(skip)]
    pub p_state: CMatrix,
    /// `tr q_λ(ρ)`; the isotypic weight `tr Π_λ ρ^{⊗n}` is `dim_p` times this.
    pub trace: f64,
    /// `max |block − q_λ(ρ) ⊗ I|`.
    pub factorization_residual: f64,
    /// `max |p_state − I / dim_p|` (zero when the block vanishes).
    pub p_mixedness_residual: f64,
}

/// Checks Hermiticity, unit trace and positivity of a density matrix and
/// returns its eigenvalues in descending order.
pub fn density_spectrum(rho: &CMatrix) -> Result<Vec<f64>> {
    let d = rho.nrows();
    if rho.ncols() != d {
        return Err(Error::NotDensity("not square".into()));
    }
    let herm = crate::linalg::max_abs_diff(rho, &rho.adjoint());
    if herm > 1e-10 {
        return Err(Error::NotDensity(format!("not Hermitian ({herm:.2e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(Error::NotDensity(format!("trace {tr}")));
    }
    let eig = SymmetricEigen::new(rho.clone());
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    if ev.last().is_some_and(|&x| x < -1e-10) {
        return Err(Error::NotDensity(format!("negative eigenvalue {}", ev.last().unwrap())));
    }
    Ok(ev.into_iter().map(|x| x.max(0.0)).collect())
}

/// Decomposes `ρ^{⊗n}` in the Schur basis, one block per `λ`.
pub fn rho_blocks(st: &SchurTransform, rho: &CMatrix) -> Result<Vec<RhoBlock>> {
    if rho.nrows() != st.d {
        return Err(Error::SizeMismatch(format!("{}x{} density for d = {}", rho.nrows(), rho.ncols(), st.d)));
    }
    density_spectrum(rho)?;
    let mut out = Vec::new();
    for b in &st.codec.blocks {
        let len = b.len();
        let mut m = CMatrix::zeros(len, len);
        for c in 0..len {
            let mut w = st.matrix.row_dense(b.offset + c);
            apply_tensor_power(rho, st.n, &mut w);
            for r in 0..len {
                m[(r, c)] = dot_sparse(&st.matrix.rows[b.offset + r], &w);
            }
        }
        let q_block = CMatrix::from_fn(b.dim_q, b.dim_q, |i, j| m[(i * b.dim_p, j * b.dim_p)]);
        let mut fact = 0.0f64;
        for (r, c) in (0..len).flat_map(|r| (0..len).map(move |c| (r, c))) {
            let want = if r % b.dim_p == c % b.dim_p { q_block[(r / b.dim_p, c / b.dim_p)] } else { ZERO };
            fact = fact.max((m[(r, c)] - want).norm());
        }
        let mut p_state = CMatrix::zeros(b.dim_p, b.dim_p);
        for q in 0..b.dim_q {
            for (i, j) in (0..b.dim_p).flat_map(|i| (0..b.dim_p).map(move |j| (i, j))) {
                p_state[(i, j)] += m[(q * b.dim_p + i, q * b.dim_p + j)];
            }
        }
        let total = p_state.trace().re;
        let mut mixed = 0.0;
        if total > 1e-300 {
            p_state /= C64::new(total, 0.0);
            let target = CMatrix::identity(b.dim_p, b.dim_p) / C64::new(b.dim_p as f64, 0.0);
            mixed = crate::linalg::max_abs_diff(&p_state, &target);
        }
        out.push(RhoBlock {
            lambda: b.lambda.clone(),
            trace: q_block.trace().re,
            q_block,
            p_state,
            factorization_residual: fact,
            p_mixedness_residual: mixed,
        });
    }
    Ok(out)
}

/// Eigenvalues predicted for `q_λ(ρ)`: `r^μ` with multiplicity `K_{λμ}`,
/// descending, obtained by listing GZ pattern weights.
pub fn predicted_q_spectrum(lambda: &Partition, r: &[f64]) -> Result<Vec<f64>> {
    let mut ev: Vec<f64> = enumerate_gz(lambda, r.len())?
        .iter()
        .map(|g| g.weight().0.iter().zip(r).map(|(&e, &x)| x.powi(e as i32)).product())
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// Hermitian eigenvalues, descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

pub fn real_orthogonality_residual(m: &RMatrix) -> f64 {
    let g = m.transpose() * m;
    (g - DMatrix::<f64>::identity(m.nrows(), m.ncols())).iter().map(|x| x.abs()).fold(0.0, f64::max)
}
