use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schurkit::characters::Permutation;
use schurkit::combinatorics::{
    dim_p, dim_q, enumerate_gz, enumerate_partitions, enumerate_weights, enumerate_yy, kostka, multinomial, yy_index,
    yy_unindex,
};
use schurkit::duality_checks::{density_spectrum, hermitian_eigenvalues, rep_matrix_q, rho_blocks};
use schurkit::linalg::{
    max_abs_diff, norm, permutation_operator, random_state, random_unitary, unitarity_residual, CMatrix, C64,
};
use schurkit::qtypes::{spectrum_distribution, total_mass_exact, trace_bound_check, BoundStatus};
use schurkit::schur_transform::Granularity;
use schurkit::sn_fourier::gpe_measure;
use schurkit::wigner::cg_block;
use schurkit::{Partition, SchurTransform};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Probability vector of length `d` from positive raw weights.
fn simplex(raw: &[f64]) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

fn pick(d: usize, n: u32, k: usize) -> Partition {
    let all = enumerate_partitions(d, n);
    all[k % all.len()].clone()
}

/// `V diag(r) V†` for a random unitary `V`.
fn rotated_density(r: &[f64], seed: u64) -> CMatrix {
    let v = random_unitary(r.len(), &mut rng(seed));
    let diag = CMatrix::from_fn(r.len(), r.len(), |i, j| if i == j { C64::new(r[i], 0.0) } else { C64::new(0.0, 0.0) });
    &v * diag * v.adjoint()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partitions_are_valid_and_ordered(d in 1usize..=4, n in 0u32..=9) {
        let ps = enumerate_partitions(d, n);
        for p in &ps {
            prop_assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(p.parts().iter().all(|&x| x > 0));
            prop_assert_eq!(p.size(), n);
            prop_assert!(p.rows() <= d);
        }
        prop_assert!(ps.windows(2).all(|w| w[0].parts() > w[1].parts()));
    }

    #[test]
    fn partition_text_round_trip(raw in proptest::collection::vec(1u32..9, 0..6)) {
        let mut v = raw;
        v.sort_unstable_by(|a, b| b.cmp(a));
        let p = Partition::new(v).unwrap();
        prop_assert_eq!(p.to_string().parse::<Partition>().unwrap(), p);
    }

    #[test]
    fn dimensions_account_for_the_whole_space(d in 1usize..=4, n in 0u32..=6) {
        let total: u128 = enumerate_partitions(d, n).iter().map(|l| dim_q(l, d).unwrap() * dim_p(l).unwrap()).sum();
        prop_assert_eq!(total, (d as u128).pow(n));
    }

    #[test]
    fn kostka_numbers_sum_to_dim_q(d in 1usize..=3, n in 0u32..=6, k in 0usize..64) {
        let l = pick(d, n, k);
        let sum: u64 = enumerate_weights(d, n).iter().map(|w| kostka(&l, w).unwrap()).sum();
        prop_assert_eq!(sum as u128, dim_q(&l, d).unwrap());
        prop_assert_eq!(enumerate_gz(&l, d).unwrap().len() as u128, dim_q(&l, d).unwrap());
        if n > 0 {
            prop_assert_eq!(enumerate_yy(&l).len() as u128, dim_p(&l).unwrap());
        }
    }

    #[test]
    fn dimension_bounds_hold(d in 1usize..=3, n in 1u32..=10, k in 0usize..64) {
        let l = pick(d, n, k);
        let poly = ((n as usize + d) as f64).powf((d * (d - 1)) as f64 / 2.0);
        let (q, p) = (dim_q(&l, d).unwrap() as f64, dim_p(&l).unwrap() as f64);
        let m = multinomial(l.parts()).unwrap() as f64;
        prop_assert!(q <= poly);
        prop_assert!(m / poly <= p && p <= m);
    }

    #[test]
    fn yy_index_round_trip(n in 1u32..=7, k in 0usize..64, j in 0usize..1000) {
        let l = pick(n as usize, n, k);
        let paths = enumerate_yy(&l);
        let path = &paths[j % paths.len()];
        let idx = yy_index(path).unwrap();
        prop_assert!((1..=paths.len()).contains(&idx));
        prop_assert_eq!(&yy_unindex(&l, idx).unwrap(), path);
    }

    #[test]
    fn schur_mass_sums_to_one_in_floats(d in 1usize..=3, n in 1u32..=30, raw in proptest::collection::vec(0.05f64..1.0, 3)) {
        let r = simplex(&raw[..d]);
        let total: f64 = spectrum_distribution(&r, n).unwrap().iter().map(|(_, w)| w).sum();
        prop_assert!((total - 1.0).abs() < 1e-12, "drift {}", total - 1.0);
    }

    #[test]
    fn trace_sandwich_holds(n in 1u32..=20, a in 0.5f64..0.99, k in 0usize..64) {
        let r = [a, 1.0 - a];
        let l = pick(2, n, k);
        let b = trace_bound_check(&l, &r, n, 2).unwrap();
        prop_assert_eq!(b.status, BoundStatus::Holds);
    }

    #[test]
    fn permutation_rank_and_group_laws(n in 1usize..=5, a in 0usize..120, b in 0usize..120) {
        let f = (1..=n).product::<usize>();
        let (s, t) = (Permutation::unrank(n, a % f), Permutation::unrank(n, b % f));
        prop_assert_eq!(s.rank(), a % f);
        prop_assert_eq!(s.compose(&s.inverse()), Permutation::identity(n));
        let lhs = permutation_operator(&s.compose(&t), 2);
        let rhs = permutation_operator(&s, 2) * permutation_operator(&t, 2);
        prop_assert!(max_abs_diff(&lhs, &rhs) == 0.0);
        prop_assert_eq!(s.compose(&t).sign(), s.sign() * t.sign());
    }

    #[test]
    fn cg_blocks_are_unitary(d in 1usize..=3, n in 0u32..=4, k in 0usize..64) {
        let l = pick(d, n, k);
        let b = cg_block(&l, d).unwrap();
        prop_assert!(unitarity_residual(&b.operator.matrix) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn schur_transform_is_an_isometry_on_states(d in 2usize..=4, n in 1usize..=3, seed in any::<u64>()) {
        let st = SchurTransform::new(d, n).unwrap();
        let x = random_state(st.dim(), &mut rng(seed));
        let y = st.apply(&x);
        prop_assert!((norm(&y) - 1.0).abs() < 1e-12);
        let back = st.apply_inverse(&y);
        let err = back.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn q_rep_is_a_homomorphism(d in 2usize..=3, n in 1u32..=3, k in 0usize..64, seed in any::<u64>()) {
        let l = pick(d, n, k);
        let st = SchurTransform::new(d, n as usize).unwrap();
        let mut g = rng(seed);
        let (u, v) = (random_unitary(d, &mut g), random_unitary(d, &mut g));
        let quv = rep_matrix_q(&st, &l, &(&u * &v)).unwrap().matrix;
        let prod = rep_matrix_q(&st, &l, &u).unwrap().matrix * rep_matrix_q(&st, &l, &v).unwrap().matrix;
        prop_assert!(max_abs_diff(&quv, &prod) < 1e-9);
    }

    #[test]
    fn rho_blocks_carry_unit_mass_and_highest_weight(d in 2usize..=3, n in 1usize..=3, raw in proptest::collection::vec(0.05f64..1.0, 3), seed in any::<u64>()) {
        let r = simplex(&raw[..d]);
        let rho = rotated_density(&r, seed);
        let spec = density_spectrum(&rho).unwrap();
        let st = SchurTransform::new(d, n).unwrap();
        let mut total = 0.0;
        for b in rho_blocks(&st, &rho).unwrap() {
            total += b.trace * dim_p(&b.lambda).unwrap() as f64;
            let top = hermitian_eigenvalues(&b.q_block)[0];
            let want: f64 = b.lambda.padded(d).iter().zip(&spec).map(|(&e, &x)| x.powi(e as i32)).product();
            prop_assert!((top - want).abs() < 1e-10, "{}: {} vs {}", b.lambda, top, want);
        }
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn polynomial_path_matches_dense_blocks(n in 1u32..=5, a in 0.5f64..0.99, seed in any::<u64>()) {
        let r = [a, 1.0 - a];
        let rho = rotated_density(&r, seed);
        let st = SchurTransform::new(2, n as usize).unwrap();
        let dense = rho_blocks(&st, &rho).unwrap();
        let poly = spectrum_distribution(&r, n).unwrap();
        prop_assert_eq!(dense.len(), poly.len());
        for (b, (l, w)) in dense.iter().zip(&poly) {
            prop_assert_eq!(&b.lambda, l);
            prop_assert!((b.trace * dim_p(l).unwrap() as f64 - w).abs() < 1e-9);
        }
    }

    #[test]
    fn measurement_marginal_matches_schur_polynomials(n in 1usize..=4, a in 0.5f64..0.99, seed in any::<u64>()) {
        // ρ^{⊗n} as the ensemble of product eigenvectors |v_{x_1} … v_{x_n}⟩ with weight r^x.
        let r = [a, 1.0 - a];
        let v = random_unitary(2, &mut rng(seed));
        let st = SchurTransform::new(2, n).unwrap();
        let mut marginal = vec![0.0; st.codec.blocks.len()];
        for x in 0..(1usize << n) {
            let bits: Vec<usize> = (0..n).map(|k| (x >> (n - 1 - k)) & 1).collect();
            let weight: f64 = bits.iter().map(|&b| r[b]).product();
            let mut psi = vec![C64::new(1.0, 0.0)];
            for &b in &bits {
                let col = [v[(0, b)], v[(1, b)]];
                psi = psi.iter().flat_map(|&p| col.map(|c| p * c)).collect();
            }
            for (k, (_, pr)) in st.measure(&psi, Granularity::Lambda).unwrap().into_iter().enumerate() {
                marginal[k] += weight * pr;
            }
        }
        for (m, (_, w)) in marginal.iter().zip(spectrum_distribution(&r, n as u32).unwrap()) {
            prop_assert!((m - w).abs() < 1e-9);
        }
    }

    #[test]
    fn gpe_uncomputes_the_ancilla(n in 1usize..=3, seed in any::<u64>()) {
        let st = SchurTransform::new(2, n).unwrap();
        let psi = random_state(st.dim(), &mut rng(seed));
        let oracle = st.measure(&psi, Granularity::Lambda).unwrap();
        for o in gpe_measure(&psi, 2, n).unwrap() {
            let want = oracle.iter().find(|(k, _)| k.lambda == o.lambda).unwrap().1;
            prop_assert!((o.probability - want).abs() < 1e-10);
            if o.probability > 1e-9 {
                prop_assert!(o.ancilla_fidelity >= 1.0 - 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn schur_mass_is_exactly_one(d in 1usize..=3, n in 1u32..=30, raw in proptest::collection::vec(1i64..20, 3)) {
        let den: i64 = raw[..d].iter().sum();
        let r: Vec<BigRational> = raw[..d].iter().map(|&x| BigRational::new(BigInt::from(x), BigInt::from(den))).collect();
        prop_assert_eq!(total_mass_exact(&r, n).unwrap(), BigRational::from_integer(BigInt::from(1)));
    }
}
