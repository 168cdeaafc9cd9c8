//! The Schur transform on `(ℂ^d)^{⊗n}` built by cascading CG transforms.
//!
//! Qudit `k` is fed into the CG transform of the running irrep for
//! `k = 2..n`; the record of rows in which boxes were added is a YY path, and
//! its `yy_index` becomes the `p` label. Rows of the transform are ordered by
//! the codec: `λ` in `enumerate_partitions` order (lexicographically
//! descending), then `q` in `enumerate_gz` order, then `p` in `yy_index`
//! order. The transform is real, so it is stored as a row-sparse real matrix.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::characters::{all_permutations, character, factorial};
use crate::combinatorics::{dim_p, dim_q, enumerate_gz, enumerate_partitions, yy_index, GZPattern, Partition, YYPath};
use crate::error::{Error, Result};
use crate::linalg::{check_normalized, digits, permutation_table, CMatrix, DenseOperator, SparseRows, C64, ZERO};
use crate::wigner::cg_apply;

/// Default cap on `d^n` for dense constructions.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// A Schur basis label: irrep `λ`, GZ index `q` (0-based, `enumerate_gz`
/// order) and YY index `p` (1-based, `yy_index`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SchurLabel {
    pub lambda: Partition,
    pub q: usize,
    pub p: usize,
}

impl fmt::Display for SchurLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|q={}|p={}", self.lambda, self.q, self.p)
    }
}

/// Per-`λ` layout inside the codec.
#[derive(Clone, Debug)]
pub struct LambdaBlock {
    pub lambda: Partition,
    pub offset: usize,
    pub dim_q: usize,
    pub dim_p: usize,
    pub gz: Vec<GZPattern>,
    gz_index: HashMap<GZPattern, usize>,
}

impl LambdaBlock {
    pub fn len(&self) -> usize {
        self.dim_q * self.dim_p
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn gz_index(&self, q: &GZPattern) -> Option<usize> {
        self.gz_index.get(q).copied()
    }

    /// Row of `(q, p)` (0-based `q`, 1-based `p`).
    pub fn row(&self, q: usize, p: usize) -> usize {
        self.offset + q * self.dim_p + (p - 1)
    }
}

/// Ordering and packing of Schur labels.
///
/// The compact layout has exactly `d^n` rows. The padded layout used by a
/// register implementation has `|I_{d,n}| · max dim_q · max dim_p` rows with
/// `λ`, `q`, `p` in separate fields; [`SchurLabelCodec::padded_index`] maps
/// between the two.
#[derive(Clone, Debug)]
pub struct SchurLabelCodec {
    pub d: usize,
    pub n: usize,
    pub blocks: Vec<LambdaBlock>,
    labels: Vec<SchurLabel>,
    block_of: HashMap<Partition, usize>,
}

impl SchurLabelCodec {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::Unsupported(format!("d={d}, n={n}: need d, n ≥ 1")));
        }
        let mut blocks = Vec::new();
        let mut labels = Vec::new();
        let mut offset = 0;
        for lambda in enumerate_partitions(d, n as u32) {
            let gz = enumerate_gz(&lambda, d)?;
            let dq = dim_q(&lambda, d)? as usize;
            let dp = dim_p(&lambda)? as usize;
            debug_assert_eq!(gz.len(), dq);
            for q in 0..dq {
                for p in 1..=dp {
                    labels.push(SchurLabel { lambda: lambda.clone(), q, p });
                }
            }
            let gz_index = gz.iter().enumerate().map(|(k, g)| (g.clone(), k)).collect();
            blocks.push(LambdaBlock { lambda, offset, dim_q: dq, dim_p: dp, gz, gz_index });
            offset += dq * dp;
        }
        let block_of = blocks.iter().enumerate().map(|(k, b)| (b.lambda.clone(), k)).collect();
        Ok(SchurLabelCodec { d, n, blocks, labels, block_of })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[SchurLabel] {
        &self.labels
    }

    pub fn label(&self, row: usize) -> &SchurLabel {
        &self.labels[row]
    }

    pub fn block(&self, lambda: &Partition) -> Result<&LambdaBlock> {
        self.block_of
            .get(lambda)
            .map(|&k| &self.blocks[k])
            .ok_or_else(|| Error::InvalidPartition(format!("{lambda} is not in I_{{{},{}}}", self.d, self.n)))
    }

    pub fn index(&self, label: &SchurLabel) -> Result<usize> {
        let b = self.block(&label.lambda)?;
        if label.q >= b.dim_q || label.p == 0 || label.p > b.dim_p {
            return Err(Error::OutOfRange { index: label.p, max: b.dim_p });
        }
        Ok(b.row(label.q, label.p))
    }

    pub fn max_dim_q(&self) -> usize {
        self.blocks.iter().map(|b| b.dim_q).max().unwrap_or(0)
    }

    pub fn max_dim_p(&self) -> usize {
        self.blocks.iter().map(|b| b.dim_p).max().unwrap_or(0)
    }

    pub fn padded_len(&self) -> usize {
        self.blocks.len() * self.max_dim_q() * self.max_dim_p()
    }

    /// Index of a label in the padded register `(λ-index, q, p − 1)`.
    pub fn padded_index(&self, label: &SchurLabel) -> Result<usize> {
        self.index(label)?;
        let k = self.block_of[&label.lambda];
        Ok((k * self.max_dim_q() + label.q) * self.max_dim_p() + label.p - 1)
    }
}

/// Granularity of a Schur-basis measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Lambda,
    LambdaQ,
    Full,
}

/// Outcome key of a Schur-basis measurement; unused fields are `None`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Outcome {
    pub lambda: Partition,
    pub q: Option<usize>,
    pub p: Option<usize>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lambda)?;
        if let Some(q) = self.q {
            write!(f, "|q={q}")?;
        }
        if let Some(p) = self.p {
            write!(f, "|p={p}")?;
        }
        Ok(())
    }
}

type Branch = (Vec<u8>, GZPattern);

/// Runs the CG cascade on the computational basis string `digs` (0-based
/// symbols) and returns `(row, amplitude)` pairs.
fn cascade_column(codec: &SchurLabelCodec, digs: &[usize], paths: &mut HashMap<Vec<u8>, usize>) -> Vec<(usize, f64)> {
    let d = codec.d;
    let mut state: HashMap<Branch, f64> = HashMap::new();
    state.insert((vec![0u8], GZPattern::defining(digs[0] + 1, d)), 1.0);
    for &x in &digs[1..] {
        let mut next: HashMap<Branch, f64> = HashMap::with_capacity(state.len() * 2);
        for ((rec, q), amp) in state {
            for (j, qp, c) in cg_apply(&q, x + 1).iter() {
                let mut r = rec.clone();
                r.push((*j - 1) as u8);
                *next.entry((r, qp.clone())).or_insert(0.0) += amp * c;
            }
        }
        state = next;
    }
    let mut out = Vec::with_capacity(state.len());
    for ((rec, q), amp) in state {
        if amp.abs() < 1e-14 {
            continue;
        }
        let block = codec.block(q.top()).expect("cascade stays inside I_{d,n}");
        let p = *paths.entry(rec).or_insert_with_key(|rec| {
            let rows: Vec<usize> = rec.iter().map(|&r| r as usize).collect();
            yy_index(&YYPath::from_rows(&rows).expect("valid record")).expect("valid path")
        });
        let qi = block.gz_index(&q).expect("pattern of the block");
        out.push((block.row(qi, p), amp));
    }
    out.sort_by_key(|e| e.0);
    out
}

/// Schur transform columns for a subset of computational basis states.
/// Returns, per requested column, its nonzero `(row, amplitude)` entries.
pub fn schur_columns(codec: &SchurLabelCodec, cols: &[usize]) -> Vec<Vec<(usize, f64)>> {
    let mut paths = HashMap::new();
    cols.iter().map(|&x| cascade_column(codec, &digits(x, codec.d, codec.n), &mut paths)).collect()
}

/// The Schur transform `U_Sch` for fixed `(d, n)` together with its codec.
#[derive(Clone, Debug)]
pub struct SchurTransform {
    pub d: usize,
    pub n: usize,
    pub codec: SchurLabelCodec,
    /// `d^n × d^n` real orthogonal matrix, rows in codec order.
    pub matrix: SparseRows,
}

impl SchurTransform {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        Self::with_cap(d, n, DEFAULT_DENSE_CAP)
    }

    pub fn with_cap(d: usize, n: usize, cap: usize) -> Result<Self> {
        let dim = dimension(d, n)
            .filter(|&x| x <= cap)
            .ok_or(Error::CapExceeded { dim: dimension(d, n).unwrap_or(usize::MAX), cap })?;
        let codec = SchurLabelCodec::new(d, n)?;
        let mut rows = vec![Vec::new(); dim];
        let mut paths = HashMap::new();
        for x in 0..dim {
            for (r, a) in cascade_column(&codec, &digits(x, d, n), &mut paths) {
                rows[r].push((x, a));
            }
        }
        Ok(SchurTransform { d, n, codec, matrix: SparseRows { ncols: dim, rows } })
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols
    }

    /// Dense complex copy with Schur labels on rows and basis strings on columns.
    pub fn to_dense(&self) -> DenseOperator {
        let m = self.matrix.to_dense().map(|x| C64::new(x, 0.0));
        let rows = self.codec.labels().iter().map(|l| l.to_string()).collect();
        let cols = (0..self.dim()).map(|x| basis_label(x, self.d, self.n)).collect();
        DenseOperator { matrix: m, row_labels: rows, col_labels: cols }
    }

    /// The transform embedded in the padded register; unused rows are zero.
    pub fn to_padded(&self) -> Result<DenseOperator> {
        let mut m = CMatrix::zeros(self.codec.padded_len(), self.dim());
        let mut labels = vec![String::from("unused"); self.codec.padded_len()];
        for (r, row) in self.matrix.rows.iter().enumerate() {
            let label = self.codec.label(r);
            let pr = self.codec.padded_index(label)?;
            labels[pr] = label.to_string();
            for &(c, v) in row {
                m[(pr, c)] = C64::new(v, 0.0);
            }
        }
        let cols = (0..self.dim()).map(|x| basis_label(x, self.d, self.n)).collect();
        DenseOperator::new(m, labels, cols)
    }

    /// `U_Sch ψ`.
    pub fn apply(&self, state: &[C64]) -> Vec<C64> {
        self.matrix.apply(state)
    }

    /// `U_Sch† φ`.
    pub fn apply_inverse(&self, schur_state: &[C64]) -> Vec<C64> {
        self.matrix.apply_transpose(schur_state)
    }

    /// Schur basis vector `|λ, q, p⟩` in the computational basis.
    pub fn basis_vector(&self, label: &SchurLabel) -> Result<Vec<C64>> {
        Ok(self.matrix.row_dense(self.codec.index(label)?))
    }

    /// Probabilities of measuring the Schur labels of `state`.
    pub fn measure(&self, state: &[C64], granularity: Granularity) -> Result<Vec<(Outcome, f64)>> {
        if state.len() != self.dim() {
            return Err(Error::SizeMismatch(format!("state of length {} for d^n = {}", state.len(), self.dim())));
        }
        check_normalized(state, 1e-8)?;
        let amps = self.apply(state);
        let mut out = Vec::new();
        for b in &self.codec.blocks {
            let probs = |q: usize, p: usize| amps[b.row(q, p)].norm_sqr();
            match granularity {
                Granularity::Lambda => {
                    let s =
                        (0..b.dim_q).flat_map(|q| (1..=b.dim_p).map(move |p| (q, p))).map(|(q, p)| probs(q, p)).sum();
                    out.push((Outcome { lambda: b.lambda.clone(), q: None, p: None }, s));
                }
                Granularity::LambdaQ => {
                    for q in 0..b.dim_q {
                        let s = (1..=b.dim_p).map(|p| probs(q, p)).sum();
                        out.push((Outcome { lambda: b.lambda.clone(), q: Some(q), p: None }, s));
                    }
                }
                Granularity::Full => {
                    for q in 0..b.dim_q {
                        for p in 1..=b.dim_p {
                            out.push((Outcome { lambda: b.lambda.clone(), q: Some(q), p: Some(p) }, probs(q, p)));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `U_Sch† (Σ_{rows of λ} |r⟩⟨r|) U_Sch` as a dense matrix.
    pub fn isotypic_projector(&self, lambda: &Partition) -> Result<CMatrix> {
        let b = self.codec.block(lambda)?;
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for r in b.offset..b.offset + b.len() {
            let row = &self.matrix.rows[r];
            for &(i, a) in row {
                for &(j, c) in row {
                    m[(i, j)] += C64::new(a * c, 0.0);
                }
            }
        }
        Ok(m)
    }

    /// Encodes `p_state ∈ P_λ` into the decoherence-free subsystem at fixed `q`.
    pub fn dfs_encode(&self, lambda: &Partition, q: &GZPattern, p_state: &[C64]) -> Result<Vec<C64>> {
        let b = self.codec.block(lambda)?;
        let qi = b.gz_index(q).ok_or_else(|| Error::Parse(format!("{q} is not a pattern of {lambda}")))?;
        if p_state.len() != b.dim_p {
            return Err(Error::SizeMismatch(format!("p state of length {} for dim P = {}", p_state.len(), b.dim_p)));
        }
        let mut schur = vec![ZERO; self.dim()];
        for (k, &a) in p_state.iter().enumerate() {
            schur[b.row(qi, k + 1)] = a;
        }
        Ok(self.apply_inverse(&schur))
    }

    /// Reads back the `P_λ` amplitudes at fixed `q`.
    pub fn dfs_decode(&self, lambda: &Partition, q: &GZPattern, state: &[C64]) -> Result<Vec<C64>> {
        let b = self.codec.block(lambda)?;
        let qi = b.gz_index(q).ok_or_else(|| Error::Parse(format!("{q} is not a pattern of {lambda}")))?;
        if state.len() != self.dim() {
            return Err(Error::SizeMismatch(format!("state of length {} for d^n = {}", state.len(), self.dim())));
        }
        Ok((1..=b.dim_p).map(|p| self.matrix.rows[b.row(qi, p)].iter().map(|&(c, v)| state[c] * v).sum()).collect())
    }
}

pub fn dimension(d: usize, n: usize) -> Option<usize> {
    d.checked_pow(n as u32)
}

/// `"i_1 i_2 … i_n"` with 0-based symbols.
pub fn basis_label(x: usize, d: usize, n: usize) -> String {
    digits(x, d, n).iter().map(|v| v.to_string()).collect::<Vec<_>>().join("")
}

/// `Π_λ = (dim P_λ / n!) Σ_s χ_λ(s) P(s)`, from Murnaghan-Nakayama characters.
pub fn central_projector_oracle(lambda: &Partition, d: usize, n: usize) -> Result<DenseOperator> {
    if lambda.size() as usize != n || lambda.rows() > d {
        return Err(Error::InvalidPartition(format!("{lambda} is not in I_{{{d},{n}}}")));
    }
    let dim = dimension(d, n).ok_or(Error::Overflow("d^n"))?;
    let scale = dim_p(lambda)? as f64 / factorial(n) as f64;
    let mut m = CMatrix::zeros(dim, dim);
    for s in all_permutations(n) {
        let chi = character(lambda, &s.cycle_type())? as f64;
        if chi == 0.0 {
            continue;
        }
        for (x, y) in permutation_table(&s, d).into_iter().enumerate() {
            m[(y, x)] += C64::new(scale * chi, 0.0);
        }
    }
    Ok(DenseOperator::unlabeled(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn orthogonality_residual(st: &SchurTransform) -> f64 {
        let m = st.matrix.to_dense();
        let g = m.transpose() * &m;
        let id = nalgebra::DMatrix::<f64>::identity(st.dim(), st.dim());
        (g - id).iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    #[test]
    fn small_transforms_are_orthogonal() {
        for (d, n) in [(1, 3), (2, 1), (2, 2), (2, 3), (2, 5), (3, 3), (4, 2), (3, 4)] {
            let st = SchurTransform::new(d, n).unwrap();
            assert_eq!(st.codec.len(), st.dim());
            assert!(orthogonality_residual(&st) < 1e-12, "d={d} n={n}");
        }
    }

    #[test]
    fn single_qudit_is_identity() {
        let st = SchurTransform::new(3, 1).unwrap();
        assert_eq!(st.matrix.to_dense(), nalgebra::DMatrix::<f64>::identity(3, 3));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(SchurTransform::with_cap(2, 5, 16), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn codec_round_trip_and_padding() {
        let st = SchurTransform::new(3, 3).unwrap();
        let c = &st.codec;
        let mut seen = std::collections::HashSet::new();
        for (r, l) in c.labels().iter().enumerate() {
            assert_eq!(c.index(l).unwrap(), r);
            assert!(seen.insert(c.padded_index(l).unwrap()));
        }
        assert!(c.padded_len() >= c.len());
        let padded = st.to_padded().unwrap();
        let nonzero_rows =
            (0..padded.matrix.nrows()).filter(|&r| (0..st.dim()).any(|x| padded.matrix[(r, x)].norm() > 0.0)).count();
        assert_eq!(nonzero_rows, st.dim());
    }

    #[test]
    fn oracle_matches_schur_projectors() {
        for d in 1..=3 {
            for n in 1..=3 {
                let st = SchurTransform::new(d, n).unwrap();
                for b in &st.codec.blocks {
                    let a = st.isotypic_projector(&b.lambda).unwrap();
                    let o = central_projector_oracle(&b.lambda, d, n).unwrap();
                    assert!(max_abs_diff(&a, &o.matrix) < 1e-10, "{} d={d} n={n}", b.lambda);
                }
            }
        }
    }

    #[test]
    fn measure_singlet_and_product() {
        let st = SchurTransform::new(2, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = vec![ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO];
        let m = st.measure(&singlet, Granularity::Lambda).unwrap();
        assert_eq!(m[1].0.lambda, p(&[1, 1]));
        assert!((m[1].1 - 1.0).abs() < 1e-12);
        let mut zero = vec![ZERO; 4];
        zero[0] = C64::new(1.0, 0.0);
        let m = st.measure(&zero, Granularity::Full).unwrap();
        assert!((m[0].1 - 1.0).abs() < 1e-12);
        assert!(st.measure(&[ZERO; 4], Granularity::Lambda).is_err());
    }

    #[test]
    fn dfs_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let st = SchurTransform::new(2, 4).unwrap();
        for b in &st.codec.blocks {
            let psi = random_state(b.dim_p, &mut rng);
            for q in &b.gz {
                let enc = st.dfs_encode(&b.lambda, q, &psi).unwrap();
                let dec = st.dfs_decode(&b.lambda, q, &enc).unwrap();
                for (a, c) in psi.iter().zip(&dec) {
                    assert!((a - c).norm() < 1e-12);
                }
            }
        }
        assert!(st.dfs_encode(&p(&[4]), &st.codec.blocks[0].gz[0], &[ZERO, ZERO]).is_err());
    }
}
