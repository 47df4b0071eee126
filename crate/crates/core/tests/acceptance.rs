//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use factorcert::certificates::{
    induced_channel_direct_sum, induced_channel_matrix, verify_matrix_factorization, verify_mixture_cert,
    FactorizationUnitary, MixtureTerm, RationalMixtureCert,
};
use factorcert::channels::{
    choi_distance, dephasing, depolarizing, mixture_channel, tensor_channels, weyl_mixture, QuantumChannel,
};
use factorcert::constructions::zoo::{zoo, ZooName};
use factorcert::constructions::{collapse_direct_sum, commuting_kraus_factorization, lift_rational_mixture};
use factorcert::free_group::FreeGroupWitness;
use factorcert::io::{emit_document, parse_document, Document, Report};
use factorcert::linalg::{lcm_reduce, normalized_trace, partial_trace_right, ComplexMatrix, Rational};
use factorcert::sampling::{gaussian_matrix, random_direct_sum_cert, random_product_mixture, random_weights, seeded};
use factorcert::{Limits, Result};
use num_integer::Integer;
use rand::Rng;

const BIN: &str = env!("CARGO_BIN_EXE_factorcert");
const TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = Box<dyn FnOnce() -> Result<Outcome>>;

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn timed(limit: Duration, f: impl FnOnce() -> Result<Outcome>) -> Result<Outcome> {
    let start = Instant::now();
    let mut o = f()?;
    let elapsed = start.elapsed();
    o.pass &= elapsed <= limit;
    o.detail = format!("{}; {:.2}s (limit {}s)", o.detail, elapsed.as_secs_f64(), limit.as_secs());
    Ok(o)
}

fn criterion_1() -> Result<Outcome> {
    let limits = Limits::default();
    let mut rng = seeded(1);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..100 {
        let (n, k, d) = (rng.random_range(2..=3), rng.random_range(2..=3), rng.random_range(1..=4));
        let cert = random_product_mixture(n, k, d, 12, &mut rng)?;
        let (report, recovered) = verify_mixture_cert(&cert, TOL, &limits)?;
        let lifted = lift_rational_mixture(&cert, TOL, &limits)?;
        let FactorizationUnitary::BlockRepeated { base_k, blocks } = lifted.unitary() else {
            failures += 1;
            continue;
        };
        let l = lcm_reduce(&cert.coefficients(), limits.max_lcm)?.common_denominator;
        let sum: u64 = blocks.iter().map(|b| b.multiplicity).sum();
        let exact = blocks
            .iter()
            .zip(cert.terms())
            .all(|(b, t)| Rational::new(b.multiplicity as i128, l as i128).map(|r| r == t.coefficient).unwrap_or(false));
        let check = verify_matrix_factorization(&lifted, &recovered, TOL)?;
        worst = worst.max(check.max_error);
        if !(report.verdict && *base_k == k && sum == l && exact && check.verdict && check.max_error <= 1e-9) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("100 instances, {failures} failures, worst matrix-unit error {worst:.2e}"))
}

fn criterion_2() -> Result<Outcome> {
    let limits = Limits::default();
    let mut rng = seeded(2);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..50 {
        let n = rng.random_range(2..=3);
        let d = rng.random_range(1..=3);
        let sizes: Vec<usize> = (0..d).map(|_| rng.random_range(1..=3)).collect();
        let cert = random_direct_sum_cert(n, &sizes, 12, &mut rng)?;
        let before = induced_channel_direct_sum(&cert, TOL)?;
        let collapsed = collapse_direct_sum(&cert, TOL, &limits)?;
        let k = sizes.iter().fold(1usize, |a, &s| a.lcm(&s));
        let l = lcm_reduce(cert.space().weights(), limits.max_lcm)?.common_denominator as usize;
        let after = induced_channel_matrix(&collapsed, TOL)?;
        let dist = choi_distance(&before, &after)?;
        worst = worst.max(dist);
        if collapsed.ancilla_dim() != k * l || dist > 1e-9 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("50 instances, {failures} failures, worst Choi distance {worst:.2e}"))
}

fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
}

fn criterion_3() -> Result<Outcome> {
    let limits = Limits::default();
    let t = dephasing(2)?;
    let half: Rational = "1/2".parse()?;
    let mixture = RationalMixtureCert::new(
        2,
        1,
        vec![
            MixtureTerm { coefficient: half, unitary: ComplexMatrix::identity(2) },
            MixtureTerm { coefficient: half, unitary: sigma_z() },
        ],
    )?;
    let lifted = lift_rational_mixture(&mixture, TOL, &limits)?;
    let route_a = verify_matrix_factorization(&lifted, &t, TOL)?;
    let units = [ComplexMatrix::unit(2, 0, 0), ComplexMatrix::unit(2, 1, 1)];
    let spin = commuting_kraus_factorization(&units, TOL, &limits)?;
    let route_b = verify_matrix_factorization(&spin, &t, TOL)?;
    let witness = FreeGroupWitness::diagonal(2)?;
    let route_c = witness.check(&t, TOL)?;

    let channels = [
        induced_channel_matrix(&lifted, TOL)?,
        induced_channel_matrix(&spin, TOL)?,
        witness.induced_channel()?,
    ];
    let mut pairwise = 0.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            pairwise = pairwise.max(choi_distance(&channels[i], &channels[j])?);
        }
    }
    let pass = lifted.ancilla_dim() == 2
        && route_a.verdict
        && spin.ancilla_dim() == 4
        && route_b.verdict
        && route_c.verdict()
        && pairwise <= 1e-10;
    outcome(
        pass,
        format!(
            "lift M_2⊗M_{} err {:.1e}, spin M_2⊗M_{} err {:.1e}, free group {}, pairwise Choi {:.1e}",
            lifted.ancilla_dim(),
            route_a.max_error,
            spin.ancilla_dim(),
            route_b.max_error,
            route_c.verdict(),
            pairwise
        ),
    )
}

fn criterion_4() -> Result<Outcome> {
    let limits = Limits::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for d in 2..=4 {
        let e = zoo(ZooName::Dephasing(d), TOL, &limits)?;
        let lift = verify_matrix_factorization(&e.lift, &e.channel, TOL)?;
        let spin_cert = e.spin.as_ref().expect("dephasing has a spin certificate");
        let spin = verify_matrix_factorization(spin_cert, &e.channel, TOL)?;
        let fg = e.witness.as_ref().expect("dephasing has a witness").check(&e.channel, 1e-12)?;
        let ok = lift.verdict
            && e.lift.ancilla_dim() == d
            && spin.verdict
            && spin_cert.ancilla_dim() == 1 << d
            && fg.verdict()
            && fg.unitarity_residual <= 1e-12
            && fg.factorization_distance <= 1e-12;
        pass &= ok;
        parts.push(format!("d={d}:{}", if ok { "ok" } else { "fail" }));
    }
    outcome(pass, parts.join(" "))
}

fn criterion_5() -> Result<Outcome> {
    let limits = Limits::default();
    let mut worst_weyl = 0.0f64;
    for k in 1..=4 {
        let (c, u) = weyl_mixture(k)?;
        worst_weyl = worst_weyl.max(choi_distance(&mixture_channel(&c, &u, TOL)?, &depolarizing(k)?)?);
    }
    let mut worst_tensor = 0.0f64;
    for k in 1..=3 {
        for l in 1..=3 {
            let product = tensor_channels(&depolarizing(k)?, &depolarizing(l)?, &limits)?;
            worst_tensor = worst_tensor.max(choi_distance(&product, &depolarizing(k * l)?)?);
        }
    }
    outcome(
        worst_weyl <= 1e-10 && worst_tensor <= 1e-10,
        format!("Weyl mixture {worst_weyl:.1e}, S_k⊗S_l vs S_kl {worst_tensor:.1e}"),
    )
}

fn cli(args: &[&str], stdin: &str) -> (i32, String) {
    use std::io::Write;
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().expect("stdin").write_all(stdin.as_bytes()).expect("write stdin");
    let out = child.wait_with_output().expect("binary finishes");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn mixture_doc(n: usize, k: usize, coefficient: &str, u: ComplexMatrix) -> Result<String> {
    let term = MixtureTerm { coefficient: coefficient.parse()?, unitary: u };
    Ok(emit_document(&Document::MixtureCert(RationalMixtureCert::new(n, k, vec![term])?)))
}

fn report_verdict(text: &str) -> Option<Report> {
    match parse_document(text) {
        Ok(Document::Report(r)) => Some(r),
        _ => None,
    }
}

fn criterion_6() -> Result<Outcome> {
    let (code_i, out_i) = cli(&["verify-mixture", "-"], &mixture_doc(2, 2, "1", ComplexMatrix::identity(4))?);
    let i_ok = code_i == 1
        && report_verdict(&out_i).is_some_and(|r| !r.verdict && r.notes.iter().any(|n| n.contains("hypothesis failure")));

    let non_unital = QuantumChannel::new(2, vec![ComplexMatrix::unit(2, 0, 0), ComplexMatrix::unit(2, 0, 1)])?;
    let (code_ii, out_ii) = cli(&["verify-channel", "-"], &emit_document(&Document::Channel(non_unital)));
    let ii_ok = code_ii == 1 && report_verdict(&out_ii).is_some_and(|r| !r.verdict);

    let (code_sum, _) = cli(&["verify-mixture", "-"], &mixture_doc(2, 1, "2/3", ComplexMatrix::identity(2))?);
    let (code_unit, _) = cli(
        &["verify-mixture", "-"],
        &mixture_doc(2, 1, "1", ComplexMatrix::unit(2, 0, 0))?,
    );
    let iii_ok = code_sum == 2 && code_unit == 2;
    outcome(
        i_ok && ii_ok && iii_ok,
        format!(
            "(i) exit {code_i}, (ii) exit {code_ii}, (iii) coefficient sum exit {code_sum}, non-unitary exit {code_unit}"
        ),
    )
}

fn document_corpus() -> Result<Vec<Document>> {
    let limits = Limits::default();
    let mut docs = Vec::new();
    for name in [ZooName::M2Example, ZooName::Dephasing(3), ZooName::Depolarizing(2)] {
        let e = zoo(name, TOL, &limits)?;
        docs.push(Document::Channel(e.channel));
        docs.push(Document::MixtureCert(e.mixture));
        docs.push(Document::MatrixCert(e.lift.to_dense(&limits)?));
        docs.push(Document::MatrixCert(e.lift));
        if let Some(s) = e.spin {
            docs.push(Document::MatrixCert(s));
        }
        if let Some(w) = e.witness {
            docs.push(Document::FgWitness(w));
        }
    }
    let mut rng = seeded(7);
    let ds = random_direct_sum_cert(2, &[1, 2, 3], 12, &mut rng)?;
    docs.push(Document::Channel(induced_channel_direct_sum(&ds, TOL)?));
    docs.push(Document::DirectSumCert(ds));
    docs.push(Document::MixtureCert(random_product_mixture(2, 2, 3, 12, &mut rng)?));
    docs.push(Document::Report(Report {
        check: "matrix-factorization".into(),
        verdict: false,
        max_error: 0.1 + 0.2,
        failing_index: Some(vec![1, 0]),
        tol: TOL,
        notes: vec!["quoted \"note\" with unicode ⊗".into()],
    }));
    let w = "g1 g2^-1 g3".parse()?;
    docs.push(Document::FgWitness(FreeGroupWitness::new(2, vec![(gaussian_matrix(2, 2, &mut rng), w)])?));
    Ok(docs)
}

fn criterion_7() -> Result<Outcome> {
    let mut rng = seeded(8);
    let mut worst_trace = 0.0f64;
    for _ in 0..200 {
        let (n, k) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let a = gaussian_matrix(n * k, n * k, &mut rng);
        let lhs = normalized_trace(&partial_trace_right(&a, n, k)?)?;
        worst_trace = worst_trace.max((lhs - normalized_trace(&a)?).norm());
    }

    let mut lcm_ok = true;
    for _ in 0..100 {
        let count = rng.random_range(1..=6);
        let c = random_weights(count, 12, &mut rng);
        let e = lcm_reduce(&c, 1_000_000)?;
        let l = e.common_denominator as i128;
        lcm_ok &= e.multiplicities.iter().sum::<u64>() as i128 == l;
        for (ci, m) in c.iter().zip(&e.multiplicities) {
            lcm_ok &= Rational::new(*m as i128, l)? == *ci;
        }
    }

    let corpus = document_corpus()?;
    let mut kinds: Vec<&str> = corpus.iter().map(Document::kind).collect();
    kinds.sort_unstable();
    kinds.dedup();
    let mut round_trip_ok = kinds.len() == 6;
    for doc in &corpus {
        let text = emit_document(doc);
        let parsed = parse_document(&text)?;
        let again = emit_document(&parsed);
        round_trip_ok &= parsed == *doc && again == text && parse_document(&again)? == parsed;
    }
    outcome(
        worst_trace <= 1e-12 && lcm_ok && round_trip_ok,
        format!(
            "ptrace worst {worst_trace:.1e}, lcm exact {lcm_ok}, {} documents over {} kinds round-trip {round_trip_ok}",
            corpus.len(),
            kinds.len()
        ),
    )
}

fn main() -> ExitCode {
    let limit = Duration::from_secs(60);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 mixture lift round-trip", Box::new(move || timed(limit, criterion_1))),
        ("2 direct-sum collapse pipeline", Box::new(move || timed(limit, criterion_2))),
        ("3 dephasing on M_2, three routes", Box::new(criterion_3)),
        ("4 diagonal channels d=2..4", Box::new(criterion_4)),
        ("5 depolarizing identities", Box::new(criterion_5)),
        ("6 negative suite", Box::new(criterion_6)),
        ("7 numerics hygiene", Box::new(criterion_7)),
    ];
    let mut all = true;
    for (name, run) in criteria {
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        println!("criterion {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
