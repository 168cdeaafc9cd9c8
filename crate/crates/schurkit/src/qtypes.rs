//! Classical and quantum method of types.
//!
//! Two evaluation paths: the polynomial path uses
//! `tr Π_λ ρ^{⊗n} = dim P_λ · s_λ(r)` and never builds `d^n`-dimensional
//! objects; the dense path (entanglement concentration) works on explicit
//! state vectors. Logarithms and exponentials are base 2. Bounds that are
//! vacuous at the given `n` are reported as [`BoundStatus::Trivial`].

use nalgebra::SVD;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combinatorics::{
    dim_p, dim_p_log2, dim_q_log2, entropy, enumerate_partitions, multinomial, relative_entropy, Partition,
    SchurEvaluator, Weight,
};
use crate::error::{Error, Result};
use crate::linalg::{kron, to_complex, CMatrix, C64};
use crate::schur_transform::{SchurTransform, DEFAULT_DENSE_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Holds,
    Violated,
    /// The bound is vacuous at this size (e.g. a lower bound ≤ 0).
    Trivial,
}

impl BoundStatus {
    pub fn ok(self) -> bool {
        self != BoundStatus::Violated
    }

    fn of(holds: bool) -> Self {
        if holds {
            BoundStatus::Holds
        } else {
            BoundStatus::Violated
        }
    }
}

/// Relative slack allowed when comparing floating-point quantities to bounds.
const BOUND_SLACK: f64 = 1e-12;

fn check_distribution(p: &[f64]) -> Result<()> {
    if let Some(&x) = p.iter().find(|&&x| x < 0.0) {
        return Err(Error::NegativeProbability(x));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(s));
    }
    Ok(())
}

fn sorted_desc(r: &[f64]) -> Vec<f64> {
    let mut v = r.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `η(ε) = −ε log ε` for `ε ≤ 1/e`, capped at `(log e)/e` beyond.
pub fn eta(eps: f64) -> f64 {
    let e = std::f64::consts::E;
    if eps <= 0.0 {
        0.0
    } else if eps <= 1.0 / e {
        -eps * eps.log2()
    } else {
        std::f64::consts::LOG2_E / e
    }
}

/// A classical type class `T_t` for strings of length `n` over `d` letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeClass {
    pub t: Weight,
}

impl TypeClass {
    pub fn n(&self) -> u32 {
        self.t.n()
    }
    pub fn d(&self) -> usize {
        self.t.d()
    }
    pub fn size(&self) -> Result<u128> {
        multinomial(&self.t.0)
    }
    pub fn empirical(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.t.0.iter().map(|&x| x as f64 / n).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeBounds {
    pub t: Weight,
    /// `|T_t|`.
    pub size: u128,
    /// `P^{⊗n}(T_t)`.
    pub mass: f64,
    pub entropy: f64,
    pub divergence: f64,
    /// `(n+1)^{−d} 2^{nH(t̄)}`.
    pub size_lower: f64,
    /// `2^{nH(t̄)}`.
    pub size_upper: f64,
    /// `(n+1)^{−d} 2^{−nD(t̄‖P)}`.
    pub mass_lower: f64,
    /// `2^{−nD(t̄‖P)}`.
    pub mass_upper: f64,
    pub status: BoundStatus,
}

pub fn classical_type_bounds(t: &Weight, prob: &[f64]) -> Result<TypeBounds> {
    check_distribution(prob)?;
    if t.d() != prob.len() {
        return Err(Error::SizeMismatch(format!("type of length {} for distribution of length {}", t.d(), prob.len())));
    }
    let tc = TypeClass { t: t.clone() };
    let n = tc.n() as f64;
    let d = tc.d() as i32;
    let size = tc.size()?;
    let tbar = tc.empirical();
    let h = entropy(&tbar);
    let div = relative_entropy(&tbar, prob);
    let per_string: f64 = t.0.iter().zip(prob).map(|(&k, &x)| x.powi(k as i32)).product();
    let mass = size as f64 * per_string;
    let poly = (n + 1.0).powi(-d);
    let size_upper = (n * h).exp2();
    let size_lower = poly * size_upper;
    let mass_upper = (-n * div).exp2();
    let mass_lower = poly * mass_upper;
    let sz = size as f64;
    let holds = sz >= size_lower * (1.0 - BOUND_SLACK)
        && sz <= size_upper * (1.0 + BOUND_SLACK)
        && mass >= mass_lower * (1.0 - BOUND_SLACK)
        && mass <= mass_upper * (1.0 + BOUND_SLACK);
    Ok(TypeBounds {
        t: t.clone(),
        size,
        mass,
        entropy: h,
        divergence: div,
        size_lower,
        size_upper,
        mass_lower,
        mass_upper,
        status: BoundStatus::of(holds),
    })
}

/// Exact distribution of the Schur-measurement outcome `λ` on `ρ^{⊗n}` with
/// spectrum `r`: `Pr[λ] = dim P_λ · s_λ(r)`, in `enumerate_partitions` order.
pub fn spectrum_distribution(r: &[f64], n: u32) -> Result<Vec<(Partition, f64)>> {
    check_distribution(r)?;
    let mut ev = SchurEvaluator::new(sorted_desc(r));
    enumerate_partitions(r.len(), n)
        .into_iter()
        .map(|l| {
            let s = ev.eval(&l);
            let w = if s > 0.0 { (dim_p_log2(&l) + s.log2()).exp2() } else { 0.0 };
            Ok((l, w))
        })
        .collect()
}

/// `Σ_λ dim P_λ · s_λ(r)` in exact rational arithmetic.
pub fn total_mass_exact(r: &[BigRational], n: u32) -> Result<BigRational> {
    let mut ev = SchurEvaluator::new(r.to_vec());
    let mut total = BigRational::from_integer(BigInt::from(0));
    for l in enumerate_partitions(r.len(), n) {
        let dp = BigInt::from(dim_p(&l)?);
        total += BigRational::from_integer(dp) * ev.eval(&l);
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct TypicalMass {
    pub n: u32,
    pub delta: f64,
    /// `tr Π_{r,δ} ρ^{⊗n}` with `Π` summing `Π_λ` over `‖λ̄ − r‖₁ ≤ δ`.
    pub mass: f64,
    /// `1 − (n+d)^{d(d+1)/2} 2^{−nδ²/2}`.
    pub lower_bound: f64,
    pub status: BoundStatus,
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn typical_mass(r: &[f64], n: u32, delta: f64) -> Result<TypicalMass> {
    if delta <= 0.0 {
        return Err(Error::Unsupported(format!("delta must be positive, got {delta}")));
    }
    let rs = sorted_desc(r);
    let d = r.len();
    let mass = spectrum_distribution(&rs, n)?
        .into_iter()
        .filter(|(l, _)| l1_distance(&l.normalized(d), &rs) <= delta + 1e-12)
        .map(|(_, w)| w)
        .sum::<f64>();
    let lower = 1.0 - poly_factor(n, d, (d * (d + 1)) as f64 / 2.0) * (-(n as f64) * delta * delta / 2.0).exp2();
    let status = if lower <= 0.0 { BoundStatus::Trivial } else { BoundStatus::of(mass >= lower - BOUND_SLACK) };
    Ok(TypicalMass { n, delta, mass, lower_bound: lower, status })
}

/// `(n + d)^e`.
fn poly_factor(n: u32, d: usize, e: f64) -> f64 {
    ((n as usize + d) as f64).powf(e)
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceBound {
    pub lambda: Partition,
    /// `tr Π_λ ρ^{⊗n} = dim P_λ · s_λ(r)`.
    pub value: f64,
    pub divergence: f64,
    /// `2^{−nD(λ̄‖r)} (n+d)^{−d(d+1)/2}`.
    pub lower: f64,
    /// `2^{−nD(λ̄‖r)} (n+d)^{d(d−1)/2}`.
    pub upper: f64,
    pub status: BoundStatus,
}

/// Checks the two-sided bound on `tr Π_λ ρ^{⊗n}` for spectrum `r`
/// (sorted into nonincreasing order first).
pub fn trace_bound_check(lambda: &Partition, r: &[f64], n: u32, d: usize) -> Result<TraceBound> {
    check_distribution(r)?;
    if r.len() != d || lambda.rows() > d || lambda.size() != n {
        return Err(Error::InvalidPartition(format!("{lambda} is not in I_{{{d},{n}}} for r of length {}", r.len())));
    }
    let rs = sorted_desc(r);
    let s = SchurEvaluator::new(rs.clone()).eval(lambda);
    let value = if s > 0.0 { (dim_p_log2(lambda) + s.log2()).exp2() } else { 0.0 };
    let div = relative_entropy(&lambda.normalized(d), &rs);
    let base = (-(n as f64) * div).exp2();
    let df = d as f64;
    let lower = base * poly_factor(n, d, -df * (df + 1.0) / 2.0);
    let upper = base * poly_factor(n, d, df * (df - 1.0) / 2.0);
    let holds = value >= lower * (1.0 - 1e-9) && value <= upper * (1.0 + 1e-9);
    Ok(TraceBound { lambda: lambda.clone(), value, divergence: div, lower, upper, status: BoundStatus::of(holds) })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumEstimateTrial {
    pub lambda: Partition,
    pub estimate: Vec<f64>,
    pub l1_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FailureRate {
    pub delta: f64,
    /// Fraction of trials with `‖λ̄ − r‖₁ > δ`.
    pub empirical: f64,
    /// Exact probability of the same event.
    pub exact: f64,
    /// `min(1, (n+d)^{d(d+1)/2} 2^{−nδ²/2})`.
    pub bound: f64,
    /// Standard error of `empirical`.
    pub sigma: f64,
    pub status: BoundStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumEstimate {
    pub r: Vec<f64>,
    pub n: u32,
    pub seed: u64,
    pub distribution: Vec<(Partition, f64)>,
    pub trials: Vec<SpectrumEstimateTrial>,
    pub failure: Vec<FailureRate>,
}

/// Samples `λ` from the exact Schur-measurement distribution `trials` times
/// and reports failure rates on the `deltas` grid.
pub fn spectrum_estimate(r: &[f64], n: u32, trials: usize, seed: u64, deltas: &[f64]) -> Result<SpectrumEstimate> {
    let rs = sorted_desc(r);
    let d = r.len();
    let dist = spectrum_distribution(&rs, n)?;
    let weights: Vec<f64> = dist.iter().map(|(_, w)| w.max(0.0)).collect();
    let sampler = WeightedIndex::new(&weights).map_err(|e| Error::Unsupported(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let errors: Vec<f64> = dist.iter().map(|(l, _)| l1_distance(&l.normalized(d), &rs)).collect();
    let samples: Vec<usize> = (0..trials).map(|_| sampler.sample(&mut rng)).collect();
    let trial_log = samples
        .iter()
        .map(|&k| SpectrumEstimateTrial {
            lambda: dist[k].0.clone(),
            estimate: dist[k].0.normalized(d),
            l1_error: errors[k],
        })
        .collect();
    let tf = trials.max(1) as f64;
    let failure = deltas
        .iter()
        .map(|&delta| {
            let fails = samples.iter().filter(|&&k| errors[k] > delta + 1e-12).count() as f64;
            let empirical = fails / tf;
            let exact: f64 = dist.iter().zip(&errors).filter(|(_, &e)| e > delta + 1e-12).map(|((_, w), _)| w).sum();
            let raw = poly_factor(n, d, (d * (d + 1)) as f64 / 2.0) * (-(n as f64) * delta * delta / 2.0).exp2();
            let sigma = (empirical * (1.0 - empirical) / tf).sqrt().max(1.0 / tf);
            let status =
                if raw >= 1.0 { BoundStatus::Trivial } else { BoundStatus::of(empirical <= raw + 3.0 * sigma) };
            FailureRate { delta, empirical, exact, bound: raw.min(1.0), sigma, status }
        })
        .collect();
    Ok(SpectrumEstimate { r: rs, n, seed, distribution: dist, trials: trial_log, failure })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationBranch {
    pub lambda: Partition,
    /// `|c_λ|²` from the simulated measurement.
    pub probability: f64,
    /// `tr Π_λ ρ^{⊗n}` from the Schur-polynomial path.
    pub predicted: f64,
    pub dim_p: usize,
    /// Schmidt coefficients of the normalized `P_λ ⊗ P_λ` state.
    pub schmidt: Vec<f64>,
    /// `max |σ_i − 1/√dim_p|`.
    pub schmidt_residual: f64,
    /// Second singular value of the `(Q_A Q_B) : (P_A P_B)` split; zero when
    /// the branch state is a product across that cut.
    pub product_residual: f64,
    /// Ebits left in the `P` registers: `log dim_p`.
    pub ebits: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub branches: Vec<ConcentrationBranch>,
    /// Total probability of outcomes with `λ_A ≠ λ_B`.
    pub mismatch_mass: f64,
    pub max_schmidt_residual: f64,
    pub verified: bool,
}

/// Applies `U_Sch ⊗ U_Sch` to `ψ^{⊗n}` for a bipartite pure state with
/// coefficient matrix `psi` (`ψ = Σ psi[a,b] |a⟩|b⟩`).
pub fn concentrate(psi: &CMatrix, n: usize) -> Result<ConcentrationReport> {
    concentrate_with_cap(psi, n, DEFAULT_DENSE_CAP)
}

pub fn concentrate_with_cap(psi: &CMatrix, n: usize, cap: usize) -> Result<ConcentrationReport> {
    let d = psi.nrows();
    if psi.ncols() != d {
        return Err(Error::SizeMismatch("coefficient matrix must be square".into()));
    }
    let nrm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if (nrm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(nrm.sqrt()));
    }
    let dn = d.checked_pow(n as u32).ok_or(Error::Overflow("d^n"))?;
    if dn.saturating_mul(dn) > cap {
        return Err(Error::CapExceeded { dim: dn * dn, cap });
    }
    let st = SchurTransform::with_cap(d, n, cap)?;
    let mut big = CMatrix::identity(1, 1);
    for _ in 0..n {
        big = kron(&big, psi);
    }
    let s = to_complex(&st.matrix.to_dense());
    let phi = &s * big * s.transpose();
    let rho = psi * psi.adjoint();
    let spectrum = crate::duality_checks::density_spectrum(&rho)?;
    let predicted = spectrum_distribution(&spectrum, n as u32)?;
    let blocks = &st.codec.blocks;
    let mut mismatch = 0.0;
    for (a, ba) in blocks.iter().enumerate() {
        for (b, bb) in blocks.iter().enumerate() {
            if a != b {
                mismatch +=
                    phi.view((ba.offset, bb.offset), (ba.len(), bb.len())).iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
    }
    let mut branches = Vec::new();
    let mut worst = 0.0f64;
    for (b, (_, pred)) in blocks.iter().zip(&predicted) {
        let blk = phi.view((b.offset, b.offset), (b.len(), b.len())).into_owned();
        let prob: f64 = blk.iter().map(|z| z.norm_sqr()).sum();
        let dp = b.dim_p;
        let mut branch = ConcentrationBranch {
            lambda: b.lambda.clone(),
            probability: prob,
            predicted: *pred,
            dim_p: dp,
            schmidt: Vec::new(),
            schmidt_residual: 0.0,
            product_residual: 0.0,
            ebits: (dp as f64).log2(),
        };
        if prob > 1e-14 {
            let dq = b.dim_q;
            let x = CMatrix::from_fn(dq * dq, dp * dp, |row, col| {
                let (qa, qb) = (row / dq, row % dq);
                let (pa, pb) = (col / dp, col % dp);
                blk[(qa * dp + pa, qb * dp + pb)] / C64::new(prob.sqrt(), 0.0)
            });
            let svd = SVD::new(x, false, true);
            let (k, top) = argmax(svd.singular_values.as_slice());
            branch.product_residual =
                svd.singular_values.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| *v).fold(0.0, f64::max);
            let vt = svd.v_t.expect("requested right singular vectors");
            let m = CMatrix::from_fn(dp, dp, |pa, pb| vt[(k, pa * dp + pb)].conj());
            let _ = top;
            let mut sv: Vec<f64> = SVD::new(m, false, false).singular_values.iter().copied().collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            let target = 1.0 / (dp as f64).sqrt();
            branch.schmidt_residual = sv.iter().map(|v| (v - target).abs()).fold(0.0, f64::max);
            branch.schmidt = sv;
            worst = worst.max(branch.schmidt_residual).max(branch.product_residual);
        }
        branches.push(branch);
    }
    let agree = branches.iter().all(|b| (b.probability - b.predicted).abs() < 1e-9);
    Ok(ConcentrationReport {
        n,
        branches,
        mismatch_mass: mismatch,
        max_schmidt_residual: worst,
        verified: mismatch < 1e-12 && worst < 1e-8 && agree,
    })
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter().copied().enumerate().fold((0, f64::MIN), |acc, (i, x)| if x > acc.1 { (i, x) } else { acc })
}

#[derive(Clone, Debug, Serialize)]
pub struct Compression {
    pub n: u32,
    pub rate: f64,
    /// `R_n = R − d(d+1) log(n+d) / (2n)`.
    pub rate_n: f64,
    /// `nR`.
    pub qubits: f64,
    /// `tr Π_R ρ^{⊗n}`.
    pub kept_mass: f64,
    pub error_mass: f64,
    /// `tr Π_R = Σ_{kept λ} dim Q · dim P`.
    pub projector_dim: f64,
    /// `2^{nR}`.
    pub dim_bound: f64,
    pub dim_status: BoundStatus,
    /// `min D(λ̄‖r)` over grid points with `H(λ̄) > R_n` (`+∞` if none).
    pub min_divergence: f64,
    /// `(n+d)^{d(d+1)/2} 2^{−n·min D}`.
    pub error_bound: f64,
    pub error_status: BoundStatus,
}

/// Universal compression at rate `R`: keeps `λ` with `H(λ̄) ≤ R_n`.
pub fn compress_rate(r: &[f64], n: u32, rate: f64) -> Result<Compression> {
    if rate <= 0.0 {
        return Err(Error::Unsupported(format!("rate must be positive, got {rate}")));
    }
    let rs = sorted_desc(r);
    let d = r.len();
    let df = d as f64;
    let nf = n as f64;
    let rate_n = rate - df * (df + 1.0) / 2.0 * ((n as usize + d) as f64).log2() / nf;
    let mut kept = 0.0;
    let mut err = 0.0;
    let mut pdim = 0.0;
    let mut min_div = f64::INFINITY;
    for (l, w) in spectrum_distribution(&rs, n)? {
        let lbar = l.normalized(d);
        if entropy(&lbar) <= rate_n + 1e-12 {
            kept += w;
            pdim += (dim_q_log2(&l, d)? + dim_p_log2(&l)).exp2();
        } else {
            err += w;
            min_div = min_div.min(relative_entropy(&lbar, &rs));
        }
    }
    let dim_bound = (nf * rate).exp2();
    let error_bound =
        if min_div.is_infinite() { 0.0 } else { poly_factor(n, d, df * (df + 1.0) / 2.0) * (-nf * min_div).exp2() };
    let error_status = if error_bound >= 1.0 {
        BoundStatus::Trivial
    } else {
        BoundStatus::of(err <= error_bound * (1.0 + 1e-9) + 1e-15)
    };
    Ok(Compression {
        n,
        rate,
        rate_n,
        qubits: nf * rate,
        kept_mass: kept,
        error_mass: err,
        projector_dim: pdim,
        dim_bound,
        dim_status: BoundStatus::of(pdim <= dim_bound * (1.0 + 1e-12)),
        min_divergence: min_div,
        error_bound,
        error_status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::enumerate_weights;
    use num_traits::One;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn type_bounds_examples() {
        let b = classical_type_bounds(&Weight(vec![3, 1]), &[0.5, 0.5]).unwrap();
        assert_eq!(b.size, 4);
        assert!((b.mass - 0.25).abs() < 1e-15);
        let b = classical_type_bounds(&Weight(vec![2, 2, 2]), &[1.0 / 3.0; 3]).unwrap();
        assert!((b.mass - b.size as f64 / 729.0).abs() < 1e-15);
        assert!(classical_type_bounds(&Weight(vec![1, 1]), &[0.7, 0.7]).is_err());
    }

    #[test]
    fn type_bounds_sweep() {
        for d in 1..=3 {
            let prob: Vec<f64> = match d {
                1 => vec![1.0],
                2 => vec![0.8, 0.2],
                _ => vec![0.5, 0.3, 0.2],
            };
            for n in 1..=12 {
                for t in enumerate_weights(d, n) {
                    assert_eq!(classical_type_bounds(&t, &prob).unwrap().status, BoundStatus::Holds, "{t}");
                }
            }
        }
    }

    #[test]
    fn typical_mass_examples() {
        assert!((typical_mass(&[0.3, 0.7], 6, 2.0).unwrap().mass - 1.0).abs() < 1e-12);
        // n=2, r=(½,½): λ=(2) has ‖λ̄ − r‖₁ = 1, λ=(1,1) has 0.
        let m = typical_mass(&[0.5, 0.5], 2, 0.6).unwrap();
        assert!((m.mass - 0.25).abs() < 1e-15);
        assert_eq!(m.status, BoundStatus::Trivial);
    }

    #[test]
    fn trace_bound_examples() {
        let t = trace_bound_check(&p(&[5]), &[1.0, 0.0], 5, 2).unwrap();
        assert!((t.value - 1.0).abs() < 1e-15 && t.divergence == 0.0);
        let t = trace_bound_check(&p(&[1, 1]), &[0.5, 0.5], 2, 2).unwrap();
        assert!((t.value - 0.25).abs() < 1e-15);
        assert_eq!(t.status, BoundStatus::Holds);
    }

    #[test]
    fn exact_total_mass_is_one() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let sixth = BigRational::new(BigInt::from(1), BigInt::from(6));
        for n in [1, 7, 30] {
            assert!(total_mass_exact(&[third.clone(), half.clone(), sixth.clone()], n).unwrap().is_one());
            assert!(total_mass_exact(&[half.clone(), half.clone()], n).unwrap().is_one());
        }
    }

    #[test]
    fn spectrum_distribution_small_table() {
        let dist = spectrum_distribution(&[0.5, 0.5], 4).unwrap();
        // dim_p · s_λ(½,½): (4) → 1·5/16, (3,1) → 3·3/16, (2,2) → 2·1/16.
        let want = [5.0 / 16.0, 9.0 / 16.0, 2.0 / 16.0];
        for ((_, w), v) in dist.iter().zip(want) {
            assert!((w - v).abs() < 1e-15);
        }
        let pure = spectrum_estimate(&[1.0, 0.0], 7, 100, 1, &[0.1]).unwrap();
        assert!(pure.trials.iter().all(|t| t.lambda == p(&[7]) && t.l1_error == 0.0));
    }

    #[test]
    fn spectrum_estimate_reproducible() {
        let a = spectrum_estimate(&[0.7, 0.3], 8, 500, 9, &[0.3]).unwrap();
        let b = spectrum_estimate(&[0.7, 0.3], 8, 500, 9, &[0.3]).unwrap();
        assert_eq!(a.failure[0].empirical, b.failure[0].empirical);
    }

    #[test]
    fn concentration_maximally_entangled() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)],
        );
        let rep = concentrate(&psi, 2).unwrap();
        assert!((rep.branches[0].probability - 0.75).abs() < 1e-12);
        assert!((rep.branches[1].probability - 0.25).abs() < 1e-12);
        assert!(rep.verified);
        let prod = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        );
        let rep = concentrate(&prod, 3).unwrap();
        assert!((rep.branches[0].probability - 1.0).abs() < 1e-12);
        assert_eq!(rep.branches[0].ebits, 0.0);
        assert!(concentrate_with_cap(&psi, 4, 64).is_err());
    }

    #[test]
    fn compression_examples() {
        let c = compress_rate(&[0.5, 0.5], 200, 1.5).unwrap();
        assert!((c.kept_mass - 1.0).abs() < 1e-9);
        let errs: Vec<f64> =
            [20, 40, 80].iter().map(|&n| compress_rate(&[0.9, 0.1], n, 0.8).unwrap().error_mass).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        for n in [20, 40, 80] {
            let c = compress_rate(&[0.9, 0.1], n, 0.8).unwrap();
            assert!(c.dim_status.ok() && c.error_status.ok());
        }
    }

    #[test]
    fn eta_is_capped() {
        assert_eq!(eta(0.0), 0.0);
        assert!((eta(0.5) - std::f64::consts::LOG2_E / std::f64::consts::E).abs() < 1e-15);
        assert!((eta(0.25) - 0.5).abs() < 1e-15);
    }
}
