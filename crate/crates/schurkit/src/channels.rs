//! Kronecker coefficients, `S_n`-invariant tripartite vectors and the normal
//! form of `U_N^{⊗n}` for small qubit channels.
//!
//! Every `p_λ` here is the real orthogonal irrep read off the Schur
//! transform, so the invariant bases live in the same `P_λ` basis that the
//! Schur transform's permutation register uses.

use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::characters::{character, class_size, factorial};
use crate::combinatorics::{enumerate_partitions, Partition};
use crate::duality_checks::{sn_irrep, SnIrrep};
use crate::error::{Error, Result};
use crate::linalg::{digits, isometry_residual, kron, to_complex, CMatrix, RMatrix, C64, ZERO};
use crate::schur_transform::SchurTransform;

/// Largest `n` accepted by [`invariant_basis`].
pub const MAX_INVARIANT_N: u32 = 5;

fn check_same_size(ps: &[&Partition]) -> Result<u32> {
    let n = ps[0].size();
    if let Some(p) = ps.iter().find(|p| p.size() != n) {
        return Err(Error::SizeMismatch(format!("|{}| != |{}|", ps[0], p)));
    }
    Ok(n)
}

/// `g_{abc} = (1/n!) Σ_s χ_a(s) χ_b(s) χ_c(s)`, summed over cycle types.
pub fn kronecker(a: &Partition, b: &Partition, c: &Partition) -> Result<u64> {
    let n = check_same_size(&[a, b, c])?;
    if n > 20 {
        return Err(Error::Unsupported(format!("Kronecker coefficients need n ≤ 20, got {n}")));
    }
    let mut total: i128 = 0;
    for mu in enumerate_partitions(n as usize, n) {
        let chi = character(a, &mu)? as i128 * character(b, &mu)? as i128 * character(c, &mu)? as i128;
        total += class_size(&mu) as i128 * chi;
    }
    let nf = factorial(n as usize) as i128;
    debug_assert_eq!(total % nf, 0);
    u64::try_from(total / nf).map_err(|_| Error::Overflow("kronecker"))
}

/// `Φ_λ = (1/√dim) Σ_p |p, p⟩`, indexed `p·dim + p'`.
pub fn phi_lambda(lambda: &Partition) -> Result<Vec<f64>> {
    let dim = crate::combinatorics::dim_p(lambda)? as usize;
    let mut v = vec![0.0; dim * dim];
    let s = 1.0 / (dim as f64).sqrt();
    for p in 0..dim {
        v[p * dim + p] = s;
    }
    Ok(v)
}

/// `max_s |(⊗_k p_k(s)) v − v|` for a vector on `⊗_k P_{λ_k}`.
pub fn invariance_residual(irreps: &[&SnIrrep], v: &[f64]) -> f64 {
    let count = irreps[0].matrices.len();
    (0..count)
        .map(|k| {
            let m = irreps.iter().skip(1).fold(irreps[0].matrices[k].clone(), |acc, ir| acc.kronecker(&ir.matrices[k]));
            let w = &m * RMatrix::from_column_slice(v.len(), 1, v);
            w.iter().zip(v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// `(1/n!) Σ_s p_a(s) ⊗ p_b(s) ⊗ p_c(s)`.
fn averaging_projector(irreps: &[&SnIrrep]) -> RMatrix {
    let count = irreps[0].matrices.len();
    let dim: usize = irreps.iter().map(|i| i.dim).product();
    let mut acc = RMatrix::zeros(dim, dim);
    for k in 0..count {
        acc += irreps.iter().skip(1).fold(irreps[0].matrices[k].clone(), |m, ir| m.kronecker(&ir.matrices[k]));
    }
    acc / count as f64
}

/// An orthonormal basis of `(P_a ⊗ P_b ⊗ P_c)^{S_n}`, in the basis order
/// `(p_a·dim_b + p_b)·dim_c + p_c`.
///
/// The count is the number of unit eigenvalues of the averaging projector.
/// The vectors are fixed deterministically by projecting `e_0, e_1, …` and
/// orthonormalizing in that order (so the `V` coefficients below depend on
/// this choice).
pub fn invariant_basis(a: &Partition, b: &Partition, c: &Partition) -> Result<Vec<Vec<f64>>> {
    let n = check_same_size(&[a, b, c])?;
    if n == 0 || n > MAX_INVARIANT_N {
        return Err(Error::Unsupported(format!("invariant bases need 1 ≤ n ≤ {MAX_INVARIANT_N}, got {n}")));
    }
    let irreps = [sn_irrep(a)?, sn_irrep(b)?, sn_irrep(c)?];
    let refs: Vec<&SnIrrep> = irreps.iter().collect();
    Ok(invariant_basis_from(&refs))
}

fn invariant_basis_from(irreps: &[&SnIrrep]) -> Vec<Vec<f64>> {
    let proj = averaging_projector(irreps);
    let dim = proj.nrows();
    let eig = SymmetricEigen::new(proj.clone());
    let count = eig.eigenvalues.iter().filter(|&&x| x > 0.5).count();
    let mut basis: Vec<nalgebra::DVector<f64>> = Vec::new();
    for k in 0..dim {
        if basis.len() == count {
            break;
        }
        let mut v = proj.column(k).into_owned();
        for u in &basis {
            v -= u * u.dot(&v);
        }
        let nv = v.norm();
        if nv > 1e-6 {
            basis.push(v / nv);
        }
    }
    basis.into_iter().map(|v| v.iter().copied().collect()).collect()
}

/// `W_α |p_A⟩ = √D_A (⟨p_A| ⊗ I)|α⟩` as a `(dim_B·dim_E) × D_A` matrix.
pub fn w_alpha(alpha: &[f64], dim_a: usize) -> RMatrix {
    let rest = alpha.len() / dim_a;
    let s = (dim_a as f64).sqrt();
    RMatrix::from_fn(rest, dim_a, |be, a| s * alpha[a * rest + be])
}

/// `(⟨Φ_λ|^{AA'} ⊗ I)(|p_A⟩^A |α⟩^{A'BE})`, contracted explicitly.
pub fn teleport(alpha: &[f64], dim_a: usize, p_a: usize) -> Vec<f64> {
    let phi = (0..dim_a * dim_a).map(|k| if k / dim_a == k % dim_a { 1.0 / (dim_a as f64).sqrt() } else { 0.0 });
    let phi: Vec<f64> = phi.collect();
    let rest = alpha.len() / dim_a;
    let mut out = vec![0.0; rest];
    for a in 0..dim_a {
        for a2 in 0..dim_a {
            let bra = phi[a * dim_a + a2];
            if bra == 0.0 || a != p_a {
                continue;
            }
            for (be, o) in out.iter_mut().enumerate() {
                *o += bra * alpha[a2 * rest + be];
            }
        }
    }
    out
}

/// An isometry `A → B ⊗ E`, output index `b·d_E + e`.
#[derive(Clone, Debug)]
pub struct ChannelIsometry {
    pub d_a: usize,
    pub d_b: usize,
    pub d_e: usize,
    pub matrix: CMatrix,
}

impl ChannelIsometry {
    pub fn new(d_b: usize, d_e: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != d_b * d_e {
            return Err(Error::SizeMismatch(format!("{} rows for d_B·d_E = {}", matrix.nrows(), d_b * d_e)));
        }
        let res = isometry_residual(&matrix);
        if res > 1e-9 {
            return Err(Error::NotIsometry(res));
        }
        Ok(ChannelIsometry { d_a: matrix.ncols(), d_b, d_e, matrix })
    }

    pub fn identity(d: usize) -> Self {
        ChannelIsometry { d_a: d, d_b: d, d_e: 1, matrix: CMatrix::identity(d, d) }
    }

    /// `|a⟩ ↦ |a⟩_B (√(1−p)|0⟩ + (−1)^a √p |1⟩)_E`.
    pub fn dephasing(p: f64) -> Self {
        let (c, s) = ((1.0 - p).sqrt(), p.sqrt());
        let mut m = CMatrix::zeros(4, 2);
        m[(0, 0)] = C64::new(c, 0.0);
        m[(1, 0)] = C64::new(s, 0.0);
        m[(2, 1)] = C64::new(c, 0.0);
        m[(3, 1)] = C64::new(-s, 0.0);
        ChannelIsometry { d_a: 2, d_b: 2, d_e: 2, matrix: m }
    }

    /// `U^{⊗n}` with the output reordered to `B^{⊗n} ⊗ E^{⊗n}`.
    pub fn tensor_power(&self, n: usize) -> CMatrix {
        let be = self.d_b * self.d_e;
        let mut raw = CMatrix::identity(1, 1);
        for _ in 0..n {
            raw = kron(&raw, &self.matrix);
        }
        let dbn = self.d_b.pow(n as u32);
        let den = self.d_e.pow(n as u32);
        let mut out = CMatrix::zeros(dbn * den, raw.ncols());
        for r in 0..raw.nrows() {
            let pairs = digits(r, be, n);
            let (mut b, mut e) = (0, 0);
            for x in pairs {
                b = b * self.d_b + x / self.d_e;
                e = e * self.d_e + x % self.d_e;
            }
            out.set_row(b * den + e, &raw.row(r));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalFormEntry {
    pub lambda_a: Partition,
    pub q_a: usize,
    pub lambda_b: Partition,
    pub lambda_e: Partition,
    pub q_b: usize,
    pub q_e: usize,
    pub alpha: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelNormalForm {
    pub n: usize,
    pub entries: Vec<NormalFormEntry>,
    /// `max |U^{⊗n} − rebuilt|` after reconstruction from `V` and `W_α`.
    pub reconstruction_residual: f64,
    /// `max |Σ V* V − δ|` over pairs of input labels `(λ_A, q_A)`.
    pub isometry_residual: f64,
    /// Largest entry of `U_Sch U^{⊗n} U_Sch†` outside triples with `g > 0`.
    pub off_support: f64,
    pub kronecker: Vec<(Partition, Partition, Partition, u64)>,
}

struct Triple {
    a: usize,
    b: usize,
    e: usize,
    basis: Vec<RMatrix>,
}

/// Conjugates `U^{⊗n}` by Schur transforms on `A`, `B` and `E` and expands
/// each `(λ_A, q_A) → (λ_B, λ_E, q_B, q_E)` block on `W_α`.
pub fn channel_normal_form(u: &ChannelIsometry, n: usize) -> Result<ChannelNormalForm> {
    if n == 0 || n > 3 {
        return Err(Error::Unsupported(format!("channel normal form needs 1 ≤ n ≤ 3, got {n}")));
    }
    let res = isometry_residual(&u.matrix);
    if res > 1e-9 {
        return Err(Error::NotIsometry(res));
    }
    let sa = SchurTransform::new(u.d_a, n)?;
    let sb = SchurTransform::new(u.d_b, n)?;
    let se = SchurTransform::new(u.d_e, n)?;
    let m = u.tensor_power(n);
    let sbe = kron(&to_complex(&sb.matrix.to_dense()), &to_complex(&se.matrix.to_dense()));
    let sa_dense = to_complex(&sa.matrix.to_dense());
    let t = &sbe * &m * sa_dense.transpose();
    let den = se.dim();

    let mut irreps: BTreeMap<Partition, SnIrrep> = BTreeMap::new();
    for st in [&sa, &sb, &se] {
        for b in &st.codec.blocks {
            if !irreps.contains_key(&b.lambda) {
                irreps.insert(b.lambda.clone(), sn_irrep(&b.lambda)?);
            }
        }
    }
    let mut triples = Vec::new();
    let mut kron_table = Vec::new();
    for (ia, ba) in sa.codec.blocks.iter().enumerate() {
        for (ib, bb) in sb.codec.blocks.iter().enumerate() {
            for (ie, be) in se.codec.blocks.iter().enumerate() {
                let refs = [&irreps[&ba.lambda], &irreps[&bb.lambda], &irreps[&be.lambda]];
                let basis = invariant_basis_from(&refs);
                kron_table.push((ba.lambda.clone(), bb.lambda.clone(), be.lambda.clone(), basis.len() as u64));
                let basis = basis.iter().map(|v| w_alpha(v, ba.dim_p)).collect();
                triples.push(Triple { a: ia, b: ib, e: ie, basis });
            }
        }
    }

    let mut entries = Vec::new();
    let mut rebuilt = CMatrix::zeros(t.nrows(), t.ncols());
    let mut off_support = 0.0f64;
    // Columns of the isometry relation: one per (λ_A, q_A).
    let mut vcols: BTreeMap<(usize, usize), Vec<C64>> = BTreeMap::new();
    for tr in &triples {
        let (ba, bb, be) = (&sa.codec.blocks[tr.a], &sb.codec.blocks[tr.b], &se.codec.blocks[tr.e]);
        let row = |qb: usize, qe: usize, pb: usize, pe: usize| bb.row(qb, pb + 1) * den + be.row(qe, pe + 1);
        for qa in 0..ba.dim_q {
            for qb in 0..bb.dim_q {
                for qe in 0..be.dim_q {
                    let x = CMatrix::from_fn(bb.dim_p * be.dim_p, ba.dim_p, |r, pa| {
                        t[(row(qb, qe, r / be.dim_p, r % be.dim_p), ba.row(qa, pa + 1))]
                    });
                    let mut approx = CMatrix::zeros(x.nrows(), x.ncols());
                    for (k, w) in tr.basis.iter().enumerate() {
                        let wc = to_complex(w);
                        let v: C64 = wc.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum::<C64>() / ba.dim_p as f64;
                        approx += wc * v;
                        vcols.entry((tr.a, qa)).or_default().push(v);
                        entries.push(NormalFormEntry {
                            lambda_a: ba.lambda.clone(),
                            q_a: qa,
                            lambda_b: bb.lambda.clone(),
                            lambda_e: be.lambda.clone(),
                            q_b: qb,
                            q_e: qe,
                            alpha: k,
                            re: v.re,
                            im: v.im,
                        });
                    }
                    if tr.basis.is_empty() {
                        off_support = off_support.max(crate::linalg::max_abs(&x));
                    }
                    for r in 0..x.nrows() {
                        for pa in 0..ba.dim_p {
                            rebuilt[(row(qb, qe, r / be.dim_p, r % be.dim_p), ba.row(qa, pa + 1))] = approx[(r, pa)];
                        }
                    }
                }
            }
        }
    }
    let back = sbe.adjoint() * rebuilt * sa_dense;
    let reconstruction = crate::linalg::max_abs_diff(&back, &m);
    let keys: Vec<(usize, usize)> = vcols.keys().copied().collect();
    let mut iso = 0.0f64;
    for (i, ki) in keys.iter().enumerate() {
        for kj in &keys[i..] {
            // Coefficient vectors for different λ_A live on different triples, so
            // their overlap is identically zero.
            let g: C64 =
                if ki.0 == kj.0 { vcols[ki].iter().zip(&vcols[kj]).map(|(a, b)| a.conj() * b).sum() } else { ZERO };
            let want = if ki == kj { 1.0 } else { 0.0 };
            iso = iso.max((g - C64::new(want, 0.0)).norm());
        }
    }
    Ok(ChannelNormalForm {
        n,
        entries,
        reconstruction_residual: reconstruction,
        isometry_residual: iso,
        off_support,
        kronecker: kron_table,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TypicalTriple {
    pub lambda_a: Partition,
    pub lambda_b: Partition,
    pub lambda_e: Partition,
    /// Largest `tr(Π_A ⊗ Π_B ⊗ Π_E) ψ^{⊗n}` over the input grid.
    pub max_mass: f64,
}

/// The input-state grid: Bloch radii `{0, 1/3, 2/3, 1}`, polar angles
/// `{0, π/4, …, π}` and azimuths `{0, π/2, π, 3π/2}`.
pub fn bloch_grid() -> Vec<CMatrix> {
    let mut out = Vec::new();
    for ri in 0..4 {
        let r = ri as f64 / 3.0;
        for ti in 0..5 {
            let th = ti as f64 * std::f64::consts::FRAC_PI_4;
            for pi in 0..4 {
                let ph = pi as f64 * std::f64::consts::FRAC_PI_2;
                let (x, y, z) = (r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos());
                out.push(CMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        C64::new((1.0 + z) / 2.0, 0.0),
                        C64::new(x / 2.0, -y / 2.0),
                        C64::new(x / 2.0, y / 2.0),
                        C64::new((1.0 - z) / 2.0, 0.0),
                    ],
                ));
            }
        }
    }
    out
}

/// Triple masses for the purified output `(I ⊗ U)|Φ_ρ⟩` of one input `ρ`.
pub fn triple_masses(
    u: &ChannelIsometry,
    rho: &CMatrix,
    n: usize,
) -> Result<Vec<(Partition, Partition, Partition, f64)>> {
    let eig = SymmetricEigen::new(rho.clone());
    let sqrt = &eig.eigenvectors
        * CMatrix::from_diagonal(&eig.eigenvalues.map(|x| C64::new(x.max(0.0).sqrt(), 0.0)))
        * eig.eigenvectors.adjoint();
    let da = u.d_a;
    // ψ^{A BE} with coefficient [a, be] = Σ_j √ρ[j, a] U[be, j].
    let coef = sqrt.transpose() * u.matrix.transpose();
    let dbe = u.d_b * u.d_e;
    let one = CMatrix::from_fn(da * dbe, 1, |k, _| coef[(k / dbe, k % dbe)]);
    let local = ChannelIsometry { d_a: 1, d_b: da * u.d_b, d_e: u.d_e, matrix: one };
    // Each copy is a vector on (A B) ⊗ E; regroup A^n B^n E^n.
    let v = local.tensor_power(n);
    let (dan, dbn, den) = (da.pow(n as u32), u.d_b.pow(n as u32), u.d_e.pow(n as u32));
    let mut psi = vec![ZERO; dan * dbn * den];
    for (k, z) in v.column(0).iter().enumerate() {
        let (ab, e) = (k / den, k % den);
        let pairs = digits(ab, da * u.d_b, n);
        let (mut a, mut b) = (0, 0);
        for x in pairs {
            a = a * da + x / u.d_b;
            b = b * u.d_b + x % u.d_b;
        }
        psi[(a * dbn + b) * den + e] = *z;
    }
    let (sa, sb, se) = (SchurTransform::new(da, n)?, SchurTransform::new(u.d_b, n)?, SchurTransform::new(u.d_e, n)?);
    // Apply the three Schur transforms factor by factor.
    let mut x = psi;
    x = apply_factor(&sa, &x, 1, dbn * den);
    x = apply_factor(&sb, &x, dan, den);
    x = apply_factor(&se, &x, dan * dbn, 1);
    let mut out = Vec::new();
    for ba in &sa.codec.blocks {
        for bb in &sb.codec.blocks {
            for be in &se.codec.blocks {
                let mut mass = 0.0;
                for ra in ba.offset..ba.offset + ba.len() {
                    for rb in bb.offset..bb.offset + bb.len() {
                        for re in be.offset..be.offset + be.len() {
                            mass += x[(ra * dbn + rb) * den + re].norm_sqr();
                        }
                    }
                }
                out.push((ba.lambda.clone(), bb.lambda.clone(), be.lambda.clone(), mass));
            }
        }
    }
    Ok(out)
}

/// Applies `st` to the middle factor of a vector shaped `outer × dim × inner`.
fn apply_factor(st: &SchurTransform, v: &[C64], outer: usize, inner: usize) -> Vec<C64> {
    let dim = st.dim();
    let mut out = vec![ZERO; v.len()];
    let mut buf = vec![ZERO; dim];
    for o in 0..outer {
        for i in 0..inner {
            for (k, b) in buf.iter_mut().enumerate() {
                *b = v[(o * dim + k) * inner + i];
            }
            for (k, z) in st.apply(&buf).into_iter().enumerate() {
                out[(o * dim + k) * inner + i] = z;
            }
        }
    }
    out
}

/// Triples `(λ_A, λ_B, λ_E)` reaching mass `≥ ε` for some grid input.
pub fn typical_triples(u: &ChannelIsometry, n: usize, eps: f64) -> Result<Vec<TypicalTriple>> {
    if n == 0 || n > 3 || u.d_a != 2 || u.d_b > 2 || u.d_e > 2 {
        return Err(Error::Unsupported("typical triples need n ≤ 3 and qubit systems".into()));
    }
    let mut best: BTreeMap<(Partition, Partition, Partition), f64> = BTreeMap::new();
    for rho in bloch_grid() {
        for (a, b, e, m) in triple_masses(u, &rho, n)? {
            let slot = best.entry((a, b, e)).or_insert(0.0);
            *slot = slot.max(m);
        }
    }
    Ok(best
        .into_iter()
        .filter(|(_, m)| *m >= eps)
        .map(|((lambda_a, lambda_b, lambda_e), max_mass)| TypicalTriple { lambda_a, lambda_b, lambda_e, max_mass })
        .collect())
}
