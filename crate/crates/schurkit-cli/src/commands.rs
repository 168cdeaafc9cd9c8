//! Subcommand implementations. Each returns a [`Report`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schurkit::channels::{channel_normal_form, ChannelIsometry};
use schurkit::characters::{all_permutations, Permutation};
use schurkit::combinatorics::{dim_p, dim_q, enumerate_partitions, enumerate_weights, kostka};
use schurkit::duality_checks::{
    density_spectrum, hermitian_eigenvalues, predicted_q_spectrum, rho_blocks, verify_block_diagonal,
};
use schurkit::linalg::{random_permutation, random_state, random_unitary, CMatrix, C64};
use schurkit::qtypes::{
    classical_type_bounds, compress_rate, concentrate_with_cap, spectrum_estimate, trace_bound_check, typical_mass,
    BoundStatus,
};
use schurkit::schur_transform::{dimension, Granularity};
use schurkit::sn_fourier::{gpe_measure_with_cap, sn_qft_from_schur, verify_fourier};
use schurkit::wigner::cg_block;
use schurkit::{Partition, SchurTransform};
use serde::Deserialize;
use serde_json::json;

use crate::output::{num, read_column, read_matrix, MatrixDocument, Report, Table};
use crate::{CliError, Command, DN};

pub fn run(cmd: &Command, cap: usize) -> Result<Report, CliError> {
    match cmd {
        Command::Dims(dn) => dims(dn),
        Command::Kostka { d, lambda } => kostka_table(*d, lambda),
        Command::Schur(dn) => schur(dn, cap),
        Command::Cg { d, lambda } => cg(*d, lambda),
        Command::Verify { dn, trials, tol, seed } => verify(dn, *trials, *tol, *seed, cap),
        Command::Rho { n, r, state, tol } => rho(*n, r.as_ref().map(|p| p.0.as_slice()), state.as_deref(), *tol, cap),
        Command::Spectrum { r, n, trials, seed, delta } => spectrum(&r.0, *n, *trials, *seed, &delta.0),
        Command::Concentrate { n, state, d, seed } => concentrate(*n, state.as_deref(), *d, *seed, cap),
        Command::Compress { r, n, rate } => compress(&r.0, *n, *rate),
        Command::Typebounds { r, n, delta } => typebounds(&r.0, *n, *delta),
        Command::Qft { n, tol } => qft(*n, *tol),
        Command::Gpe { dn, state, seed, tol } => gpe(dn, state.as_deref(), *seed, *tol, cap),
        Command::Channel { spec, n, tol } => channel(spec, *n, *tol),
    }
}

fn padded(lambda: &Partition, d: usize) -> String {
    let parts: Vec<String> = lambda.padded(d).iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn to_u64(x: u128, what: &'static str) -> Result<u64, CliError> {
    u64::try_from(x).map_err(|_| CliError::Compute(schurkit::Error::Overflow(what)))
}

fn status_str(s: BoundStatus) -> &'static str {
    match s {
        BoundStatus::Holds => "holds",
        BoundStatus::Violated => "violated",
        BoundStatus::Trivial => "trivial",
    }
}

fn check_cap(d: usize, n: usize, cap: usize) -> Result<usize, CliError> {
    match dimension(d, n) {
        Some(dim) if dim <= cap => Ok(dim),
        Some(dim) => Err(schurkit::Error::CapExceeded { dim, cap }.into()),
        None => Err(schurkit::Error::Overflow("d^n").into()),
    }
}

fn dims(dn: &DN) -> Result<Report, CliError> {
    if dn.d == 0 {
        return Err(CliError::Input("d must be positive".into()));
    }
    let mut t = Table::new(&["lambda", "dim_q", "dim_p"]);
    let mut rows = Vec::new();
    let mut total: u128 = 0;
    for l in enumerate_partitions(dn.d, dn.n as u32) {
        let (q, p) = (dim_q(&l, dn.d)?, dim_p(&l)?);
        total =
            q.checked_mul(p).and_then(|x| total.checked_add(x)).ok_or(schurkit::Error::Overflow("Σ dim_q·dim_p"))?;
        t.push(vec![padded(&l, dn.d), q.to_string(), p.to_string()]);
        rows.push(json!({"lambda": l, "dim_q": to_u64(q, "dim_q")?, "dim_p": to_u64(p, "dim_p")?}));
    }
    let json = json!({"command": "dims", "d": dn.d, "n": dn.n, "total": to_u64(total, "d^n")?, "irreps": rows});
    Ok(Report { json, table: t, violated: false })
}

fn kostka_table(d: usize, lambda: &Partition) -> Result<Report, CliError> {
    let dq = dim_q(lambda, d)?;
    let mut t = Table::new(&["weight", "kostka"]);
    let mut rows = Vec::new();
    let mut sum: u128 = 0;
    for w in enumerate_weights(d, lambda.size()) {
        let k = kostka(lambda, &w)?;
        sum += k as u128;
        t.push(vec![w.to_string(), k.to_string()]);
        rows.push(json!({"weight": w.0, "kostka": k}));
    }
    let json = json!({
        "command": "kostka",
        "d": d,
        "lambda": lambda,
        "dim_q": to_u64(dq, "dim_q")?,
        "weights": rows,
    });
    Ok(Report { json, table: t, violated: sum != dq })
}

fn schur(dn: &DN, cap: usize) -> Result<Report, CliError> {
    check_cap(dn.d, dn.n, cap)?;
    let st = SchurTransform::with_cap(dn.d, dn.n, cap)?;
    let doc = MatrixDocument::from_operator(&st.to_dense());
    let codec: Vec<String> = st.codec.labels().iter().map(|l| l.to_string()).collect();
    let table = doc.table();
    let json = json!({"command": "schur", "d": dn.d, "n": dn.n, "codec": codec, "matrix": doc});
    Ok(Report { json, table, violated: false })
}

fn cg(d: usize, lambda: &Partition) -> Result<Report, CliError> {
    let block = cg_block(lambda, d)?;
    let doc = MatrixDocument::from_operator(&block.operator);
    let table = doc.table();
    let json = json!({"command": "cg", "d": d, "lambda": lambda, "matrix": doc});
    Ok(Report { json, table, violated: false })
}

fn verify(dn: &DN, trials: usize, tol: f64, seed: u64, cap: usize) -> Result<Report, CliError> {
    check_cap(dn.d, dn.n, cap)?;
    let st = SchurTransform::with_cap(dn.d, dn.n, cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new(&["trial", "permutation", "leakage", "residual", "passed"]);
    let mut rows = Vec::new();
    let (mut leak, mut res, mut all) = (0.0f64, 0.0f64, true);
    for k in 0..trials {
        let u = random_unitary(dn.d, &mut rng);
        let s = random_permutation(dn.n, &mut rng);
        let r = verify_block_diagonal(&st, &u, &s, tol)?;
        leak = leak.max(r.leakage);
        res = res.max(r.max_factorization_residual);
        all &= r.passed;
        t.push(vec![
            k.to_string(),
            s.to_string(),
            num(r.leakage),
            num(r.max_factorization_residual),
            r.passed.to_string(),
        ]);
        rows.push(json!({
            "permutation": s.0,
            "leakage": r.leakage,
            "residual": r.max_factorization_residual,
            "passed": r.passed,
        }));
    }
    let json = json!({
        "command": "verify",
        "d": dn.d,
        "n": dn.n,
        "seed": seed,
        "tol": tol,
        "max_leakage": leak,
        "max_residual": res,
        "passed": all,
        "trials": rows,
    });
    Ok(Report { json, table: t, violated: !all })
}

fn rho(n: usize, r: Option<&[f64]>, state: Option<&std::path::Path>, tol: f64, cap: usize) -> Result<Report, CliError> {
    let rho = match (r, state) {
        (Some(r), _) => CMatrix::from_diagonal(&r.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>().into()),
        (None, Some(p)) => read_matrix(p)?.to_matrix()?,
        (None, None) => return Err(CliError::Input("one of --r or --state is required".into())),
    };
    let d = rho.nrows();
    check_cap(d, n, cap)?;
    let spectrum = density_spectrum(&rho)?;
    let st = SchurTransform::with_cap(d, n, cap)?;
    let mut t = Table::new(&[
        "lambda",
        "trace",
        "weight",
        "factorization_residual",
        "p_mixedness_residual",
        "q_spectrum_residual",
    ]);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for b in rho_blocks(&st, &rho)? {
        let predicted = predicted_q_spectrum(&b.lambda, &spectrum)?;
        let got = hermitian_eigenvalues(&b.q_block);
        let spec_res = predicted.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let weight = b.trace * dim_p(&b.lambda)? as f64;
        worst = worst.max(b.factorization_residual).max(b.p_mixedness_residual).max(spec_res);
        t.push(vec![
            padded(&b.lambda, d),
            num(b.trace),
            num(weight),
            num(b.factorization_residual),
            num(b.p_mixedness_residual),
            num(spec_res),
        ]);
        rows.push(json!({
            "lambda": b.lambda,
            "trace": b.trace,
            "weight": weight,
            "q_spectrum": got,
            "predicted_q_spectrum": predicted,
            "factorization_residual": b.factorization_residual,
            "p_mixedness_residual": b.p_mixedness_residual,
        }));
    }
    let json = json!({"command": "rho", "d": d, "n": n, "spectrum": spectrum, "max_residual": worst, "blocks": rows});
    Ok(Report { json, table: t, violated: worst > tol })
}

fn spectrum(r: &[f64], n: u32, trials: usize, seed: u64, deltas: &[f64]) -> Result<Report, CliError> {
    let est = spectrum_estimate(r, n, trials, seed, deltas)?;
    let mut t = Table::new(&["trial", "lambda", "estimate", "l1_error"]);
    for (k, tr) in est.trials.iter().enumerate() {
        let e: Vec<String> = tr.estimate.iter().map(|x| format!("{x}")).collect();
        t.push(vec![k.to_string(), padded(&tr.lambda, r.len()), e.join(";"), num(tr.l1_error)]);
    }
    let violated = est.failure.iter().any(|f| f.status == BoundStatus::Violated);
    let dist: Vec<_> = est.distribution.iter().map(|(l, p)| json!({"lambda": l, "probability": p})).collect();
    let failure: Vec<_> = est
        .failure
        .iter()
        .map(|f| {
            json!({
                "delta": f.delta,
                "empirical": f.empirical,
                "exact": f.exact,
                "bound": f.bound,
                "sigma": f.sigma,
                "status": status_str(f.status),
            })
        })
        .collect();
    let json = json!({
        "command": "spectrum",
        "r": est.r,
        "n": n,
        "trials": trials,
        "seed": seed,
        "distribution": dist,
        "failure": failure,
    });
    Ok(Report { json, table: t, violated })
}

fn concentrate(n: usize, state: Option<&std::path::Path>, d: usize, seed: u64, cap: usize) -> Result<Report, CliError> {
    let v = match state {
        Some(p) => read_column(p)?,
        None => random_state(d * d, &mut ChaCha8Rng::seed_from_u64(seed)),
    };
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() || d == 0 {
        return Err(CliError::Input(format!("state of length {} is not on d×d", v.len())));
    }
    let psi = CMatrix::from_fn(d, d, |a, b| v[a * d + b]);
    let rep = concentrate_with_cap(&psi, n, cap)?;
    let mut t =
        Table::new(&["lambda", "probability", "predicted", "dim_p", "ebits", "schmidt_residual", "product_residual"]);
    for b in &rep.branches {
        t.push(vec![
            padded(&b.lambda, d),
            num(b.probability),
            num(b.predicted),
            b.dim_p.to_string(),
            num(b.ebits),
            num(b.schmidt_residual),
            num(b.product_residual),
        ]);
    }
    let mut json = serde_json::to_value(&rep).map_err(|e| CliError::Output(e.to_string()))?;
    json["command"] = json!("concentrate");
    json["d"] = json!(d);
    Ok(Report { json, table: t, violated: !rep.verified })
}

fn compress(r: &[f64], n: u32, rate: f64) -> Result<Report, CliError> {
    let c = compress_rate(r, n, rate)?;
    let mut t = Table::new(&[
        "n",
        "rate",
        "rate_n",
        "kept_mass",
        "error_mass",
        "projector_dim",
        "dim_bound",
        "error_bound",
        "dim_status",
        "error_status",
    ]);
    t.push(vec![
        n.to_string(),
        num(c.rate),
        num(c.rate_n),
        num(c.kept_mass),
        num(c.error_mass),
        num(c.projector_dim),
        num(c.dim_bound),
        num(c.error_bound),
        status_str(c.dim_status).into(),
        status_str(c.error_status).into(),
    ]);
    let violated = c.dim_status == BoundStatus::Violated || c.error_status == BoundStatus::Violated;
    let json = json!({
        "command": "compress",
        "r": r,
        "n": n,
        "rate": c.rate,
        "rate_n": c.rate_n,
        "qubits": c.qubits,
        "kept_mass": c.kept_mass,
        "error_mass": c.error_mass,
        "projector_dim": c.projector_dim,
        "dim_bound": c.dim_bound,
        "dim_status": status_str(c.dim_status),
        "min_divergence": finite(c.min_divergence),
        "error_bound": finite(c.error_bound),
        "error_status": status_str(c.error_status),
    });
    Ok(Report { json, table: t, violated })
}

fn finite(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

fn typebounds(r: &[f64], n: u32, delta: f64) -> Result<Report, CliError> {
    let d = r.len();
    let mut t = Table::new(&["kind", "label", "value", "lower", "upper", "status"]);
    let mut violated = false;
    let mut trace = Vec::new();
    for l in enumerate_partitions(d, n) {
        let b = trace_bound_check(&l, r, n, d)?;
        violated |= b.status == BoundStatus::Violated;
        t.push(vec![
            "trace".into(),
            padded(&l, d),
            num(b.value),
            num(b.lower),
            num(b.upper),
            status_str(b.status).into(),
        ]);
        trace.push(json!({
            "lambda": l,
            "value": b.value,
            "divergence": b.divergence,
            "lower": b.lower,
            "upper": b.upper,
            "status": status_str(b.status),
        }));
    }
    let tm = typical_mass(r, n, delta)?;
    violated |= tm.status == BoundStatus::Violated;
    t.push(vec![
        "typical".into(),
        format!("delta={delta}"),
        num(tm.mass),
        num(tm.lower_bound),
        "1".into(),
        status_str(tm.status).into(),
    ]);
    let mut types = Vec::new();
    for w in enumerate_weights(d, n) {
        let b = classical_type_bounds(&w, r)?;
        violated |= b.status == BoundStatus::Violated;
        t.push(vec![
            "type".into(),
            w.to_string(),
            num(b.mass),
            num(b.mass_lower),
            num(b.mass_upper),
            status_str(b.status).into(),
        ]);
        types.push(json!({
            "type": w.0,
            "size": to_u64(b.size, "type class size")?,
            "mass": b.mass,
            "size_lower": b.size_lower,
            "size_upper": b.size_upper,
            "mass_lower": b.mass_lower,
            "mass_upper": b.mass_upper,
            "status": status_str(b.status),
        }));
    }
    let json = json!({
        "command": "typebounds",
        "r": r,
        "n": n,
        "trace": trace,
        "typical": {"delta": delta, "mass": tm.mass, "lower_bound": tm.lower_bound, "status": status_str(tm.status)},
        "types": types,
    });
    Ok(Report { json, table: t, violated })
}

fn qft(n: usize, tol: f64) -> Result<Report, CliError> {
    let perms = all_permutations(n);
    let pairs: Vec<(Permutation, Permutation)> = if n <= 3 {
        perms.iter().flat_map(|a| perms.iter().map(move |b| (a.clone(), b.clone()))).collect()
    } else {
        let gens: Vec<Permutation> =
            std::iter::once(Permutation::identity(n)).chain((0..n - 1).map(|k| Permutation::adjacent(n, k))).collect();
        gens.iter().flat_map(|a| gens.iter().map(move |b| (a.clone(), b.clone()))).collect()
    };
    let rep = verify_fourier(n, &pairs, tol)?;
    let mut q = sn_qft_from_schur(n)?;
    q.align()?;
    let doc = MatrixDocument::from_operator(&q.to_operator());
    let mut t = Table::new(&["s1", "s2", "leakage", "aligned_residual", "raw_residual"]);
    for p in &rep.pairs {
        t.push(vec![p.s1.clone(), p.s2.clone(), num(p.leakage), num(p.aligned_residual), num(p.raw_residual)]);
    }
    let mut json = serde_json::to_value(&rep).map_err(|e| CliError::Output(e.to_string()))?;
    json["command"] = json!("qft");
    json["matrix"] = serde_json::to_value(&doc).map_err(|e| CliError::Output(e.to_string()))?;
    Ok(Report { json, table: t, violated: !rep.passed })
}

fn gpe(dn: &DN, state: Option<&std::path::Path>, seed: u64, tol: f64, cap: usize) -> Result<Report, CliError> {
    let dim = check_cap(dn.d, dn.n, cap)?;
    let v = match state {
        Some(p) => read_column(p)?,
        None => random_state(dim, &mut ChaCha8Rng::seed_from_u64(seed)),
    };
    let outcomes = gpe_measure_with_cap(&v, dn.d, dn.n, cap)?;
    let st = SchurTransform::with_cap(dn.d, dn.n, cap)?;
    let oracle = st.measure(&v, Granularity::Lambda)?;
    let mut t = Table::new(&["lambda", "probability", "oracle", "ancilla_fidelity"]);
    let mut rows = Vec::new();
    let mut dev = 0.0f64;
    for o in &outcomes {
        let want = oracle.iter().find(|(k, _)| k.lambda == o.lambda).map_or(0.0, |(_, p)| *p);
        dev = dev.max((o.probability - want).abs());
        t.push(vec![padded(&o.lambda, dn.d), num(o.probability), num(want), num(o.ancilla_fidelity)]);
        rows.push(json!({
            "lambda": o.lambda,
            "probability": o.probability,
            "oracle": want,
            "ancilla_fidelity": o.ancilla_fidelity,
        }));
    }
    let json = json!({"command": "gpe", "d": dn.d, "n": dn.n, "max_deviation": dev, "outcomes": rows});
    Ok(Report { json, table: t, violated: dev > tol })
}

#[derive(Deserialize)]
struct ChannelSpec {
    d_b: usize,
    d_e: usize,
    isometry: MatrixDocument,
}

fn channel(spec: &std::path::Path, n: usize, tol: f64) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(spec).map_err(|e| CliError::Input(format!("{}: {e}", spec.display())))?;
    let cs: ChannelSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", spec.display())))?;
    let u = ChannelIsometry::new(cs.d_b, cs.d_e, cs.isometry.to_matrix()?)?;
    let nf = channel_normal_form(&u, n)?;
    let mut t = Table::new(&["lambda_a", "q_a", "lambda_b", "lambda_e", "q_b", "q_e", "alpha", "re", "im"]);
    for e in &nf.entries {
        t.push(vec![
            padded(&e.lambda_a, u.d_a),
            e.q_a.to_string(),
            padded(&e.lambda_b, u.d_b),
            padded(&e.lambda_e, u.d_e),
            e.q_b.to_string(),
            e.q_e.to_string(),
            e.alpha.to_string(),
            num(e.re),
            num(e.im),
        ]);
    }
    let violated = nf.reconstruction_residual > tol || nf.isometry_residual > tol;
    let mut json = serde_json::to_value(&nf).map_err(|e| CliError::Output(e.to_string()))?;
    json["command"] = json!("channel");
    json["d_a"] = json!(u.d_a);
    json["d_b"] = json!(u.d_b);
    json["d_e"] = json!(u.d_e);
    Ok(Report { json, table: t, violated })
}
