use schurkit::channels::{channel_normal_form, invariant_basis, kronecker, teleport, w_alpha, ChannelIsometry};
use schurkit::characters::factorial;
use schurkit::combinatorics::{dim_p, enumerate_partitions};
use schurkit::linalg::{to_complex, unitarity_residual, CMatrix, C64};
use schurkit::sn_fourier::{explicit_qft, row_phase_distance, sn_qft_from_schur, MAX_QFT_N};
use schurkit::SchurTransform;

#[test]
fn qft_is_unitary_up_to_five() {
    for n in 1..=MAX_QFT_N {
        let q = sn_qft_from_schur(n).unwrap();
        assert!(unitarity_residual(&to_complex(&q.matrix)) < 1e-10, "n = {n}");
        let sizes: usize = q.layout.blocks.iter().map(|b| b.dim * b.dim).sum();
        assert_eq!(sizes, factorial(n));
    }
}

#[test]
fn aligned_qft_matches_explicit_formula_at_five() {
    let mut q = sn_qft_from_schur(5).unwrap();
    q.align().unwrap();
    assert!(row_phase_distance(&q.aligned_matrix(), &explicit_qft(5).unwrap()) < 1e-10);
}

/// `⟨b_1…b_n, e_1…e_n| U^{⊗n} |a_1…a_n⟩ = ∏_k U[(b_k, e_k), a_k]`, built
/// entry by entry.
fn tensor_power_oracle(u: &ChannelIsometry, n: usize) -> CMatrix {
    let (da, db, de) = (u.d_a, u.d_b, u.d_e);
    let digits = |mut x: usize, base: usize| {
        let mut v = vec![0; n];
        for k in (0..n).rev() {
            v[k] = x % base;
            x /= base;
        }
        v
    };
    let dbn = db.pow(n as u32);
    CMatrix::from_fn(dbn * de.pow(n as u32), da.pow(n as u32), |r, c| {
        let (b, e, a) = (digits(r / de.pow(n as u32), db), digits(r % de.pow(n as u32), de), digits(c, da));
        (0..n).map(|k| u.matrix[(b[k] * de + e[k], a[k])]).product()
    })
}

#[test]
fn dephasing_coefficients_match_dense_conjugation() {
    let u = ChannelIsometry::dephasing(0.3);
    for n in 1..=3 {
        let nf = channel_normal_form(&u, n).unwrap();
        let sa = SchurTransform::new(2, n).unwrap().to_dense().matrix;
        let sb = sa.clone();
        let se = sa.clone();
        let st = SchurTransform::new(2, n).unwrap();
        let m = tensor_power_oracle(&u, n);
        let dim = 2usize.pow(n as u32);
        let mut checked = 0;
        for e in &nf.entries {
            let (ba, bb, be) = (
                st.codec.block(&e.lambda_a).unwrap(),
                st.codec.block(&e.lambda_b).unwrap(),
                st.codec.block(&e.lambda_e).unwrap(),
            );
            let alpha = &invariant_basis(&e.lambda_a, &e.lambda_b, &e.lambda_e).unwrap()[e.alpha];
            let w = w_alpha(alpha, ba.dim_p);
            let mut v = C64::new(0.0, 0.0);
            for pa in 0..ba.dim_p {
                let ra = ba.row(e.q_a, pa + 1);
                for pb in 0..bb.dim_p {
                    let rb = bb.row(e.q_b, pb + 1);
                    for pe in 0..be.dim_p {
                        let re = be.row(e.q_e, pe + 1);
                        let mut x = C64::new(0.0, 0.0);
                        for bi in 0..dim {
                            for ei in 0..dim {
                                let left = sb[(rb, bi)] * se[(re, ei)];
                                if left == C64::new(0.0, 0.0) {
                                    continue;
                                }
                                for ai in 0..dim {
                                    x += left * m[(bi * dim + ei, ai)] * sa[(ra, ai)].conj();
                                }
                            }
                        }
                        v += x * w[(pb * be.dim_p + pe, pa)];
                    }
                }
            }
            v /= ba.dim_p as f64;
            assert!((v - C64::new(e.re, e.im)).norm() < 1e-10, "n = {n}: {e:?} vs {v}");
            checked += 1;
        }
        assert!(checked > 0);
        assert!(nf.reconstruction_residual < 1e-9 && nf.isometry_residual < 1e-9);
    }
}

#[test]
fn teleportation_identity_on_every_triple() {
    for n in 1..=3u32 {
        let ps = enumerate_partitions(n as usize, n);
        for a in &ps {
            for b in &ps {
                for c in &ps {
                    let basis = invariant_basis(a, b, c).unwrap();
                    assert_eq!(basis.len() as u64, kronecker(a, b, c).unwrap());
                    let da = dim_p(a).unwrap() as usize;
                    for alpha in &basis {
                        let w = w_alpha(alpha, da);
                        for pa in 0..da {
                            let t = teleport(alpha, da, pa);
                            for (x, y) in t.iter().zip(w.column(pa).iter()) {
                                assert!((x - y / da as f64).abs() < 1e-12, "{a} {b} {c}");
                            }
                        }
                    }
                }
            }
        }
    }
}
