//! The `S_n` quantum Fourier transform obtained from the Schur transform, and
//! generalized phase estimation, both as dense simulations.
//!
//! `ℂ[S_n]` is embedded in `(ℂⁿ)^{⊗n}` by `|s⟩ ↦ |s(1)…s(n)⟩`. On that
//! weight-`(1,…,1)` subspace, `Q(π)` for a permutation matrix `π` acts as
//! left multiplication `L(π)` and `P(s)` as right multiplication `R(s)`, so
//! the Schur transform block-diagonalizes the regular representation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::characters::{all_permutations, factorial, Permutation};
use crate::combinatorics::{dim_p, enumerate_partitions, yy_index, Partition, YYPath};
use crate::duality_checks::sn_irrep;
use crate::error::{Error, Result};
use crate::linalg::{check_normalized, inner, norm, permutation_table, CMatrix, DenseOperator, RMatrix, C64, ZERO};
use crate::schur_transform::{schur_columns, SchurLabelCodec, SchurTransform, DEFAULT_DENSE_CAP};

/// Largest `n` for which the transform is built.
pub const MAX_QFT_N: usize = 5;

/// A vector in `ℂ[S_n]`, indexed by lexicographic rank.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupAlgebraState {
    pub n: usize,
    pub amplitudes: Vec<C64>,
}

impl GroupAlgebraState {
    pub fn basis(s: &Permutation) -> Self {
        let mut amplitudes = vec![ZERO; factorial(s.n())];
        amplitudes[s.rank()] = C64::new(1.0, 0.0);
        GroupAlgebraState { n: s.n(), amplitudes }
    }

    /// `L(g)|s⟩ = |g∘s⟩`.
    pub fn left(&self, g: &Permutation) -> Self {
        self.permuted(|s| g.compose(s))
    }

    /// `R(g)|s⟩ = |s∘g⁻¹⟩`.
    pub fn right(&self, g: &Permutation) -> Self {
        let gi = g.inverse();
        self.permuted(|s| s.compose(&gi))
    }

    fn permuted(&self, f: impl Fn(&Permutation) -> Permutation) -> Self {
        let mut amplitudes = vec![ZERO; self.amplitudes.len()];
        for (k, a) in self.amplitudes.iter().enumerate() {
            amplitudes[f(&Permutation::unrank(self.n, k)).rank()] = *a;
        }
        GroupAlgebraState { n: self.n, amplitudes }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FourierBlock {
    pub lambda: Partition,
    pub offset: usize,
    pub dim: usize,
    /// `√(dim P_λ / n!)`.
    pub scale: f64,
}

impl FourierBlock {
    /// Row of `|λ, a, b⟩` (0-based `a`, `b`).
    pub fn row(&self, a: usize, b: usize) -> usize {
        self.offset + a * self.dim + b
    }
}

/// Rows are grouped by `λ` (in `enumerate_partitions` order); inside a block
/// row `a·dim + b` carries the left index `a` and the right index `b`.
#[derive(Clone, Debug, Serialize)]
pub struct FourierBlockLayout {
    pub n: usize,
    pub blocks: Vec<FourierBlock>,
}

impl FourierBlockLayout {
    pub fn new(n: usize) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut offset = 0;
        let nf = factorial(n) as f64;
        for lambda in enumerate_partitions(n, n as u32) {
            let dim = dim_p(&lambda)? as usize;
            blocks.push(FourierBlock { lambda, offset, dim, scale: (dim as f64 / nf).sqrt() });
            offset += dim * dim;
        }
        Ok(FourierBlockLayout { n, blocks })
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn owner(&self, row: usize) -> usize {
        self.blocks.iter().rposition(|b| b.offset <= row).expect("row inside layout")
    }

    pub fn labels(&self) -> Vec<String> {
        self.blocks
            .iter()
            .flat_map(|b| (0..b.dim * b.dim).map(move |k| format!("{}|{}|{}", b.lambda, k / b.dim + 1, k % b.dim + 1)))
            .collect()
    }
}

/// The Fourier transform on `ℂ[S_n]` read off the Schur transform.
#[derive(Clone, Debug)]
pub struct SnQft {
    pub layout: FourierBlockLayout,
    /// Columns indexed by permutation rank.
    pub matrix: RMatrix,
    /// Diagonal sign per row that turns the left action into `p_λ`; empty
    /// until [`SnQft::align`] is called.
    pub phases: Vec<f64>,
}

pub fn sn_qft_from_schur(n: usize) -> Result<SnQft> {
    if n == 0 || n > MAX_QFT_N {
        return Err(Error::Unsupported(format!("S_n Fourier transform needs 1 ≤ n ≤ {MAX_QFT_N}, got {n}")));
    }
    let layout = FourierBlockLayout::new(n)?;
    let codec = SchurLabelCodec::new(n, n)?;
    let perms = all_permutations(n);
    let cols: Vec<usize> = perms.iter().map(|s| crate::linalg::from_digits(&s.0, n)).collect();
    let entries = schur_columns(&codec, &cols);
    let by_lambda: BTreeMap<&Partition, &FourierBlock> = layout.blocks.iter().map(|b| (&b.lambda, b)).collect();
    let mut matrix = RMatrix::zeros(layout.len(), perms.len());
    for (c, col) in entries.iter().enumerate() {
        for &(r, amp) in col {
            let label = codec.label(r);
            let lb = codec.block(&label.lambda)?;
            let q = &lb.gz[label.q];
            let a = yy_index(&YYPath { chain: q.chain.clone() })? - 1;
            let fb = by_lambda[&label.lambda];
            matrix[(fb.row(a, label.p - 1), c)] = amp;
        }
    }
    Ok(SnQft { layout, matrix, phases: Vec::new() })
}

impl SnQft {
    pub fn n(&self) -> usize {
        self.layout.n
    }

    pub fn to_operator(&self) -> DenseOperator {
        let cols = all_permutations(self.n()).iter().map(|s| s.to_string()).collect();
        DenseOperator {
            matrix: self.aligned_matrix().map(|x| C64::new(x, 0.0)),
            row_labels: self.layout.labels(),
            col_labels: cols,
        }
    }

    /// `F`, with the alignment signs applied when available.
    pub fn aligned_matrix(&self) -> RMatrix {
        let mut m = self.matrix.clone();
        for (r, &ph) in self.phases.iter().enumerate() {
            m.row_mut(r).scale_mut(ph);
        }
        m
    }

    /// `F L(s₁) R(s₂) Fᵀ` for the raw (unaligned) transform.
    pub fn conjugate(&self, s1: &Permutation, s2: &Permutation) -> RMatrix {
        conjugate_regular(&self.matrix, s1, s2)
    }

    /// Solves once for the diagonal signs `D_λ` with
    /// `(left block of F L(s) Fᵀ) = D_λ p_λ(s) D_λ` on adjacent transpositions,
    /// and freezes them in [`SnQft::phases`].
    pub fn align(&mut self) -> Result<Vec<(Partition, Vec<f64>)>> {
        let n = self.n();
        let mut phases = vec![1.0; self.layout.len()];
        let mut out = Vec::new();
        for b in &self.layout.blocks {
            let irrep = sn_irrep(&b.lambda)?;
            let mut dvec: Vec<Option<f64>> = vec![None; b.dim];
            dvec[0] = Some(1.0);
            let gens: Vec<(RMatrix, RMatrix)> = (0..n.saturating_sub(1))
                .map(|k| {
                    let s = Permutation::adjacent(n, k);
                    (left_block(&self.matrix, b, &s), irrep.get(&s).clone())
                })
                .collect();
            let mut changed = true;
            while changed {
                changed = false;
                for (q, p) in &gens {
                    for i in 0..b.dim {
                        let Some(di) = dvec[i] else { continue };
                        for j in 0..b.dim {
                            if dvec[j].is_none() && p[(i, j)].abs() > 1e-9 {
                                dvec[j] = Some(q[(i, j)] / (di * p[(i, j)]));
                                changed = true;
                            }
                        }
                    }
                }
            }
            let dvec: Vec<f64> = dvec
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::NoConsistentBranch(format!("phase alignment for {}", b.lambda)))?;
            if let Some(bad) = dvec.iter().find(|x| (x.abs() - 1.0).abs() > 1e-8) {
                return Err(Error::NoConsistentBranch(format!("non-unit phase {bad} for {}", b.lambda)));
            }
            for a in 0..b.dim {
                for c in 0..b.dim {
                    phases[b.row(a, c)] = dvec[a];
                }
            }
            out.push((b.lambda.clone(), dvec));
        }
        self.phases = phases;
        Ok(out)
    }
}

fn conjugate_regular(f: &RMatrix, s1: &Permutation, s2: &Permutation) -> RMatrix {
    let n = s1.n();
    let s2i = s2.inverse();
    let m = f.ncols();
    // Column t of F·L(s₁)R(s₂) is column s₁∘t∘s₂⁻¹ of F.
    let target: Vec<usize> = (0..m).map(|t| s1.compose(&Permutation::unrank(n, t)).compose(&s2i).rank()).collect();
    let mut g = RMatrix::zeros(f.nrows(), m);
    for (t, &c) in target.iter().enumerate() {
        g.set_column(t, &f.column(c));
    }
    g * f.transpose()
}

/// Left factor of the `λ` block of `F L(s) Fᵀ`, read at right index 0.
fn left_block(f: &RMatrix, b: &FourierBlock, s: &Permutation) -> RMatrix {
    let c = conjugate_regular(f, s, &Permutation::identity(s.n()));
    RMatrix::from_fn(b.dim, b.dim, |a, a2| c[(b.row(a, 0), b.row(a2, 0))])
}

#[derive(Clone, Debug, Serialize)]
pub struct FourierPairCheck {
    pub s1: String,
    pub s2: String,
    pub leakage: f64,
    /// `max |block − p_λ(s₁) ⊗ p_λ(s₂)|` after the frozen alignment.
    pub aligned_residual: f64,
    /// Same, without the alignment; nonzero values are the phase freedom.
    pub raw_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FourierReport {
    pub n: usize,
    pub unitarity_residual: f64,
    pub block_dims: Vec<(Partition, usize)>,
    pub phases: Vec<(Partition, Vec<f64>)>,
    pub pairs: Vec<FourierPairCheck>,
    pub max_leakage: f64,
    pub max_aligned_residual: f64,
    /// True when every pair matched without any phase correction.
    pub exact_match: bool,
    pub passed: bool,
}

/// Checks `F L(s₁) R(s₂) Fᵀ = ⊕_λ p_λ(s₁) ⊗ p_λ(s₂)*` on the given pairs
/// (`p_λ` is real, so `p* = p`).
pub fn verify_fourier(n: usize, pairs: &[(Permutation, Permutation)], tol: f64) -> Result<FourierReport> {
    let mut qft = sn_qft_from_schur(n)?;
    let phases = qft.align()?;
    let irreps = qft.layout.blocks.iter().map(|b| sn_irrep(&b.lambda)).collect::<Result<Vec<_>>>()?;
    let aligned = qft.aligned_matrix();
    let mut checks = Vec::new();
    for (s1, s2) in pairs {
        let raw = qft.conjugate(s1, s2);
        let al = conjugate_regular(&aligned, s1, s2);
        let mut leak = 0.0f64;
        let mut res_al = 0.0f64;
        let mut res_raw = 0.0f64;
        for r in 0..al.nrows() {
            let br = qft.layout.owner(r);
            for c in 0..al.ncols() {
                if qft.layout.owner(c) != br {
                    leak = leak.max(al[(r, c)].abs()).max(raw[(r, c)].abs());
                    continue;
                }
                let b = &qft.layout.blocks[br];
                let (i, j) = (r - b.offset, c - b.offset);
                let want = irreps[br].get(s1)[(i / b.dim, j / b.dim)] * irreps[br].get(s2)[(i % b.dim, j % b.dim)];
                res_al = res_al.max((al[(r, c)] - want).abs());
                res_raw = res_raw.max((raw[(r, c)] - want).abs());
            }
        }
        checks.push(FourierPairCheck {
            s1: s1.to_string(),
            s2: s2.to_string(),
            leakage: leak,
            aligned_residual: res_al,
            raw_residual: res_raw,
        });
    }
    let unitarity = crate::linalg::max_abs(
        &(&aligned * aligned.transpose() - RMatrix::identity(aligned.nrows(), aligned.nrows()))
            .map(|x| C64::new(x, 0.0)),
    );
    let max_leakage = checks.iter().map(|c| c.leakage).fold(0.0, f64::max);
    let max_res = checks.iter().map(|c| c.aligned_residual).fold(0.0, f64::max);
    Ok(FourierReport {
        n,
        unitarity_residual: unitarity,
        block_dims: qft.layout.blocks.iter().map(|b| (b.lambda.clone(), b.dim)).collect(),
        phases,
        exact_match: checks.iter().all(|c| c.raw_residual < tol.max(1e-9)),
        passed: unitarity < tol && max_leakage < tol && max_res < tol.max(1e-9),
        pairs: checks,
        max_leakage,
        max_aligned_residual: max_res,
    })
}

/// `√(dim P_λ / n!) p_λ(g)_{ab}` with rows in the [`FourierBlockLayout`] order.
pub fn explicit_qft(n: usize) -> Result<RMatrix> {
    let layout = FourierBlockLayout::new(n)?;
    let perms = all_permutations(n);
    let mut m = RMatrix::zeros(layout.len(), perms.len());
    for b in &layout.blocks {
        let irrep = sn_irrep(&b.lambda)?;
        for (c, g) in perms.iter().enumerate() {
            let p = irrep.get(g);
            for a in 0..b.dim {
                for k in 0..b.dim {
                    m[(b.row(a, k), c)] = b.scale * p[(a, k)];
                }
            }
        }
    }
    Ok(m)
}

/// `max_r min_{|φ|=1} ‖a_r − φ b_r‖_∞` for real matrices (so `φ = ±1`).
pub fn row_phase_distance(a: &RMatrix, b: &RMatrix) -> f64 {
    (0..a.nrows())
        .map(|r| {
            let ra = a.row(r);
            let rb = b.row(r);
            let plus = (ra - rb).abs().max();
            let minus = (ra + rb).abs().max();
            plus.min(minus)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct GpeOutcome {
    pub lambda: Partition,
    pub probability: f64,
    /// Overlap of the ancilla with the trivial-irrep state after `Ĉ†`.
    pub ancilla_fidelity: f64,
    /// System state after uncomputation, normalized.
    #[serde(skip)]
    pub post_state: Vec<C64>,
}

/// `ℂ[S_n] ⊗ (ℂᵈ)^{⊗n}` as `n!` rows of length `dⁿ`.
type Joint = Vec<Vec<C64>>;

struct Gpe {
    d: usize,
    n: usize,
    qft: SnQft,
    tables: Vec<Vec<usize>>,
}

impl Gpe {
    fn new(d: usize, n: usize, cap: usize) -> Result<Self> {
        let dn = d.checked_pow(n as u32).ok_or(Error::Overflow("d^n"))?;
        let size = dn.saturating_mul(factorial(n.min(20)));
        if n > MAX_QFT_N || size > cap {
            return Err(Error::CapExceeded { dim: size, cap });
        }
        let mut qft = sn_qft_from_schur(n)?;
        qft.align()?;
        let tables = all_permutations(n).iter().map(|s| permutation_table(s, d)).collect();
        Ok(Gpe { d, n, qft, tables })
    }

    fn fourier(&self, x: &Joint, inverse: bool) -> Joint {
        let f = self.qft.aligned_matrix();
        let m = f.nrows();
        let width = x[0].len();
        let mut out = vec![vec![ZERO; width]; m];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, src) in x.iter().enumerate() {
                let w = if inverse { f[(c, r)] } else { f[(r, c)] };
                if w != 0.0 {
                    for (o, s) in row.iter_mut().zip(src) {
                        *o += s * w;
                    }
                }
            }
        }
        out
    }

    /// `|s⟩|v⟩ ↦ |s⟩ P(s)^{±1}|v⟩`.
    fn controlled_p(&self, x: &Joint, inverse: bool) -> Joint {
        x.iter()
            .zip(&self.tables)
            .map(|(v, t)| {
                let mut w = vec![ZERO; v.len()];
                for (i, &a) in v.iter().enumerate() {
                    if inverse {
                        w[i] = v[t[i]];
                    } else {
                        w[t[i]] = a;
                    }
                }
                w
            })
            .collect()
    }

    /// `Ĉ = (F ⊗ I) C_P (F† ⊗ I)`.
    fn c_hat(&self, x: &Joint, dagger: bool) -> Joint {
        let y = self.fourier(x, true);
        let y = self.controlled_p(&y, dagger);
        self.fourier(&y, false)
    }

    fn start(&self, state: &[C64]) -> Joint {
        let mut x = vec![vec![ZERO; state.len()]; self.qft.layout.len()];
        x[0] = state.to_vec();
        x
    }
}

fn block_mass(x: &Joint, b: &FourierBlock) -> f64 {
    x[b.offset..b.offset + b.dim * b.dim].iter().flatten().map(|z| z.norm_sqr()).sum()
}

/// Generalized phase estimation: `Ĉ` on `|triv⟩ ⊗ ψ`, measure `λ` on the
/// ancilla, then undo with `Ĉ†`.
pub fn gpe_measure(state: &[C64], d: usize, n: usize) -> Result<Vec<GpeOutcome>> {
    gpe_measure_with_cap(state, d, n, DEFAULT_DENSE_CAP)
}

pub fn gpe_measure_with_cap(state: &[C64], d: usize, n: usize, cap: usize) -> Result<Vec<GpeOutcome>> {
    let g = Gpe::new(d, n, cap)?;
    if state.len() != g.d.pow(g.n as u32) {
        return Err(Error::SizeMismatch(format!("state of length {} for d^n = {}", state.len(), d.pow(n as u32))));
    }
    check_normalized(state, 1e-8)?;
    let after = g.c_hat(&g.start(state), false);
    let mut out = Vec::new();
    for b in g.qft.layout.blocks.iter().filter(|b| b.lambda.rows() <= d) {
        let prob = block_mass(&after, b);
        let mut proj: Joint = vec![vec![ZERO; state.len()]; after.len()];
        let rows = b.offset..b.offset + b.dim * b.dim;
        proj[rows.clone()].clone_from_slice(&after[rows]);
        let back = g.c_hat(&proj, true);
        let (fid, post) = if prob > 1e-14 {
            let anc = norm(&back[0]).powi(2) / prob;
            let s = 1.0 / prob.sqrt();
            (anc, back[0].iter().map(|z| z * s).collect())
        } else {
            (1.0, vec![ZERO; state.len()])
        };
        out.push(GpeOutcome { lambda: b.lambda.clone(), probability: prob, ancilla_fidelity: fid, post_state: post });
    }
    Ok(out)
}

/// One outcome `x` of an instrument with operators `A_λ^{(x)}` on `P_λ`.
#[derive(Clone, Debug)]
pub struct InstrumentOutcome {
    pub x: usize,
    pub probability: f64,
    /// Unnormalized system state `Σ_λ (I ⊗ A_λ^{(x)})_λ ψ` after uncomputation.
    pub state: Vec<C64>,
    pub ancilla_residual: f64,
}

fn check_instrument(ops: &[Vec<CMatrix>], dims: &[(Partition, usize)]) -> Result<()> {
    for (k, (lambda, dim)) in dims.iter().enumerate() {
        let mut acc = CMatrix::zeros(*dim, *dim);
        for family in ops {
            let a = family.get(k).ok_or_else(|| Error::SizeMismatch(format!("missing operator for {lambda}")))?;
            if a.nrows() != *dim || a.ncols() != *dim {
                return Err(Error::SizeMismatch(format!("operator for {lambda} must be {dim}x{dim}")));
            }
            acc += a.adjoint() * a;
        }
        let res = crate::linalg::max_abs_diff(&acc, &CMatrix::identity(*dim, *dim));
        if res > 1e-8 {
            return Err(Error::InvalidInstrument { lambda: lambda.to_string(), residual: res });
        }
    }
    Ok(())
}

/// Runs the instrument `{A^{(x)}}` through GPE: after `Ĉ`, `A_λ^{(x)}` acts on
/// the right index of the ancilla's `λ` block, then `Ĉ†` is applied.
/// `ops[x][k]` is the operator for the `k`-th partition of `n` (in
/// `enumerate_partitions(n, n)` order, restricted to at most `d` rows).
pub fn gpe_instrument(ops: &[Vec<CMatrix>], state: &[C64], d: usize, n: usize) -> Result<Vec<InstrumentOutcome>> {
    let g = Gpe::new(d, n, DEFAULT_DENSE_CAP)?;
    check_normalized(state, 1e-8)?;
    let blocks: Vec<&FourierBlock> = g.qft.layout.blocks.iter().filter(|b| b.lambda.rows() <= d).collect();
    let dims: Vec<(Partition, usize)> = blocks.iter().map(|b| (b.lambda.clone(), b.dim)).collect();
    check_instrument(ops, &dims)?;
    let after = g.c_hat(&g.start(state), false);
    let mut out = Vec::new();
    for (x, family) in ops.iter().enumerate() {
        let mut y: Joint = vec![vec![ZERO; state.len()]; after.len()];
        for (b, a) in blocks.iter().zip(family) {
            for left in 0..b.dim {
                for i in 0..b.dim {
                    for j in 0..b.dim {
                        let c = a[(i, j)];
                        if c == ZERO {
                            continue;
                        }
                        let (dst, src) = (b.row(left, i), b.row(left, j));
                        for k in 0..state.len() {
                            let v = after[src][k] * c;
                            y[dst][k] += v;
                        }
                    }
                }
            }
        }
        let back = g.c_hat(&y, true);
        let total: f64 = back.iter().flatten().map(|z| z.norm_sqr()).sum();
        let on_triv = norm(&back[0]).powi(2);
        out.push(InstrumentOutcome {
            x,
            probability: total,
            state: back[0].clone(),
            ancilla_residual: (total - on_triv).abs(),
        });
    }
    Ok(out)
}

/// The same instrument applied directly in the Schur basis:
/// `U_Sch† (Σ_λ I_{Q_λ} ⊗ A_λ^{(x)}) U_Sch ψ`.
pub fn schur_route_instrument(st: &SchurTransform, ops: &[Vec<CMatrix>], state: &[C64]) -> Result<Vec<Vec<C64>>> {
    let dims: Vec<(Partition, usize)> = st.codec.blocks.iter().map(|b| (b.lambda.clone(), b.dim_p)).collect();
    check_instrument(ops, &dims)?;
    let amps = st.apply(state);
    Ok(ops
        .iter()
        .map(|family| {
            let mut y = vec![ZERO; amps.len()];
            for (b, a) in st.codec.blocks.iter().zip(family) {
                for q in 0..b.dim_q {
                    for i in 0..b.dim_p {
                        y[b.row(q, i + 1)] = (0..b.dim_p).map(|j| a[(i, j)] * amps[b.row(q, j + 1)]).sum();
                    }
                }
            }
            st.apply_inverse(&y)
        })
        .collect())
}

/// Fidelity `|⟨a|b⟩|²` between normalized vectors.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    inner(a, b).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_state, random_unitary, tensor_power};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qft_trivial_sizes() {
        let q = sn_qft_from_schur(1).unwrap();
        assert_eq!(q.matrix, RMatrix::identity(1, 1));
        let q = sn_qft_from_schur(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(row_phase_distance(&q.matrix, &RMatrix::from_row_slice(2, 2, &[h, h, h, -h])) < 1e-12);
        assert!(sn_qft_from_schur(6).is_err());
    }

    #[test]
    fn qft_matches_explicit_formula() {
        for n in 2..=4 {
            let mut q = sn_qft_from_schur(n).unwrap();
            q.align().unwrap();
            let e = explicit_qft(n).unwrap();
            assert!(row_phase_distance(&q.aligned_matrix(), &e) < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn fourier_identity_pair_and_block_sizes() {
        let e = Permutation::identity(3);
        let rep = verify_fourier(3, &[(e.clone(), e)], 1e-10).unwrap();
        assert!(rep.passed && rep.exact_match);
        assert_eq!(rep.block_dims.iter().map(|(_, d)| d * d).sum::<usize>(), 6);
    }

    #[test]
    fn group_algebra_actions() {
        let s = Permutation::new(vec![1, 2, 0]).unwrap();
        let g = Permutation::new(vec![1, 0, 2]).unwrap();
        let v = GroupAlgebraState::basis(&s);
        assert_eq!(v.left(&g), GroupAlgebraState::basis(&g.compose(&s)));
        assert_eq!(v.right(&g), GroupAlgebraState::basis(&s.compose(&g.inverse())));
    }

    #[test]
    fn gpe_symmetric_input() {
        let mut v = vec![ZERO; 8];
        v[0] = C64::new(1.0, 0.0);
        let out = gpe_measure(&v, 2, 3).unwrap();
        assert!((out[0].probability - 1.0).abs() < 1e-12);
        assert!((out[0].ancilla_fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gpe_post_state_is_projected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_state(8, &mut rng);
        let out = gpe_measure(&psi, 2, 3).unwrap();
        let st = SchurTransform::new(2, 3).unwrap();
        for o in &out {
            let proj = st.isotypic_projector(&o.lambda).unwrap();
            let v = &proj * nalgebra::DVector::from_vec(psi.clone());
            let p = v.norm_squared();
            assert!((o.probability - p).abs() < 1e-10);
            if p > 1e-12 {
                let w: Vec<C64> = v.iter().map(|z| z / p.sqrt()).collect();
                assert!((fidelity(&w, &o.post_state) - 1.0).abs() < 1e-10);
                assert!((o.ancilla_fidelity - 1.0).abs() < 1e-12);
            }
        }
        let u = random_unitary(2, &mut rng);
        let rotated: Vec<C64> = (tensor_power(&u, 3) * nalgebra::DVector::from_vec(psi)).iter().copied().collect();
        for (a, b) in out.iter().zip(gpe_measure(&rotated, 2, 3).unwrap()) {
            assert!((a.probability - b.probability).abs() < 1e-10);
        }
    }

    #[test]
    fn instrument_identity_and_cross_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random_state(8, &mut rng);
        let st = SchurTransform::new(2, 3).unwrap();
        let dims: Vec<usize> = st.codec.blocks.iter().map(|b| b.dim_p).collect();
        // Complete basis measurement on each P_λ: outcome x projects onto basis vector x.
        let maxd = *dims.iter().max().unwrap();
        let ops: Vec<Vec<CMatrix>> = (0..maxd)
            .map(|x| {
                dims.iter()
                    .map(|&dp| {
                        let mut m = CMatrix::zeros(dp, dp);
                        if x < dp {
                            m[(x, x)] = C64::new(1.0, 0.0);
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        let gpe = gpe_instrument(&ops, &psi, 2, 3).unwrap();
        let direct = schur_route_instrument(&st, &ops, &psi).unwrap();
        for (g, s) in gpe.iter().zip(&direct) {
            assert!((g.probability - norm(s).powi(2)).abs() < 1e-10);
            let diff: f64 = g.state.iter().zip(s).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-9, "{diff}");
            assert!(g.ancilla_residual < 1e-10);
        }
        let ident: Vec<Vec<CMatrix>> = vec![dims.iter().map(|&dp| CMatrix::identity(dp, dp)).collect()];
        let out = gpe_instrument(&ident, &psi, 2, 3).unwrap();
        assert!((out[0].probability - 1.0).abs() < 1e-12);
        let bad: Vec<Vec<CMatrix>> =
            vec![dims.iter().map(|&dp| CMatrix::identity(dp, dp) * C64::new(0.5, 0.0)).collect()];
        assert!(matches!(gpe_instrument(&bad, &psi, 2, 3), Err(Error::InvalidInstrument { .. })));
    }
}
