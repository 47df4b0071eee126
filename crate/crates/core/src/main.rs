//! factorcert: verify, build and transform factorization certificates for quantum channels.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;

use factorcert::certificates::{
    verify_direct_sum_factorization, verify_matrix_factorization, verify_mixture_cert, FactorizationReport,
};
use factorcert::channels::QuantumChannel;
use factorcert::constructions::zoo::{zoo, ZooName};
use factorcert::constructions::{collapse_direct_sum, lift_rational_mixture};
use factorcert::io::{emit_document, parse_document, Document, Report};
use factorcert::sampling::{random_direct_sum_cert, random_product_mixture, seeded};
use factorcert::{Error, Limits, Result};

#[derive(Parser)]
#[command(
    name = "factorcert",
    version,
    about = "Verify and construct exact factorizations of quantum channels",
    after_help = "EXIT CODES:\n\
                  \n  0  verified or constructed\
                  \n  1  refuted (valid input, property fails)\
                  \n  2  malformed or inconsistent input\
                  \n  3  resource bound exceeded\
                  \n\nEXAMPLES:\n\
                  \n  factorcert zoo emit paper-m2-example | factorcert verify-channel -\
                  \n  factorcert zoo emit dephasing-2 --part mixture -o mix.json\
                  \n  factorcert lift mix.json -o lift.json\
                  \n  factorcert verify-factorization --channel ch.json --cert lift.json"
)]
struct Cli {
    /// Verification tolerance (Frobenius norm)
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Largest matrix dimension that may be materialized
    #[arg(long, global = true, default_value_t = 4096)]
    max_dim: usize,
    /// Largest common denominator of rational coefficients
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_lcm: u64,
    /// Seed for randomized subcommands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check complete positivity, unitality and trace preservation of a channel
    VerifyChannel {
        /// Channel document, `-` for stdin
        file: String,
    },
    /// Check that a rational mixture is of the form T ⊗ S_k
    VerifyMixture { file: String },
    /// Check a matrix-algebra factorization certificate against a channel
    VerifyFactorization {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        cert: String,
    },
    /// Check a direct-sum factorization certificate against a channel
    VerifyDirectSum {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        cert: String,
    },
    /// Turn a rational mixture certificate into a matrix-algebra factorization
    Lift {
        file: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Collapse a direct-sum factorization into a single matrix algebra
    Collapse {
        file: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Symbolic check of a factorization through a free group algebra
    FgCheck {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        witness: String,
    },
    /// Example channels and their certificates
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
    /// Randomized lift and collapse round-trips
    SelfTest {
        /// Number of instances of each kind
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

#[derive(Subcommand)]
enum ZooAction {
    /// List entry names
    List,
    /// Emit one document of an entry
    Emit {
        /// dephasing-<d>, depolarizing-<k> or paper-m2-example
        name: String,
        #[arg(long, value_enum, default_value_t = Part::Channel)]
        part: Part,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Part {
    Channel,
    Mixture,
    Lift,
    Spin,
    Witness,
}

enum Outcome {
    Verified,
    Refuted,
}

fn read_input(path: &str) -> Result<String> {
    let mut text = String::new();
    let res = if path == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(PathBuf::from(path)).map(|t| text = t)
    };
    res.map_err(|e| Error::Schema(format!("cannot read `{path}`: {e}")))?;
    Ok(text)
}

fn write_output(path: &str, text: &str) -> Result<()> {
    let res = if path == "-" {
        io::stdout().write_all(text.as_bytes())
    } else {
        fs::write(path, text)
    };
    res.map_err(|e| Error::Schema(format!("cannot write `{path}`: {e}")))
}

fn read_document(path: &str) -> Result<Document> {
    parse_document(&read_input(path)?).map_err(|e| match e {
        Error::Syntax { offset, message } => Error::Syntax {
            offset,
            message: format!("{path}: {message}"),
        },
        other => other,
    })
}

fn wrong_kind(path: &str, doc: &Document, expected: &str) -> Error {
    Error::Schema(format!("{path}: expected a {expected} document, found {}", doc.kind()))
}

fn read_channel(path: &str) -> Result<QuantumChannel> {
    match read_document(path)? {
        Document::Channel(c) => Ok(c),
        other => Err(wrong_kind(path, &other, "channel")),
    }
}

fn emit_report(report: Report) -> Result<Outcome> {
    let verdict = report.verdict;
    write_output("-", &emit_document(&Document::Report(report)))?;
    Ok(if verdict { Outcome::Verified } else { Outcome::Refuted })
}

fn factorization_report(check: &str, r: &FactorizationReport) -> Report {
    Report {
        check: check.into(),
        verdict: r.verdict,
        max_error: r.max_error,
        failing_index: r.failing_index.map(|(p, q)| vec![p, q]),
        tol: r.tol,
        notes: vec![
            format!("unitarity_error = {:e}", r.unitarity_error),
            format!("choi_distance = {:e}", r.choi_distance),
            format!("worst matrix unit = E_{},{}", r.worst_index.0, r.worst_index.1),
        ],
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let tol = cli.tol;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::Domain(format!("tolerance must be finite and nonnegative, got {tol}")));
    }
    let limits = Limits {
        max_dim: cli.max_dim,
        max_lcm: cli.max_lcm,
    };
    match cli.command {
        Command::VerifyChannel { file } => {
            let c = read_channel(&file)?.check(tol);
            emit_report(Report {
                check: "channel".into(),
                verdict: c.verdict(),
                max_error: c.max_error(),
                failing_index: None,
                tol,
                notes: vec![
                    format!("completely_positive = {}", c.completely_positive),
                    format!("unital_error = {:e}", c.unital_error),
                    format!("trace_error = {:e}", c.trace_error),
                ],
            })
        }
        Command::VerifyMixture { file } => {
            let cert = match read_document(&file)? {
                Document::MixtureCert(m) => m,
                other => return Err(wrong_kind(&file, &other, "mixture-cert")),
            };
            let (r, _) = verify_mixture_cert(&cert, tol, &limits)?;
            let mut notes = vec![format!("distance to T ⊗ S_{} = {:e}", cert.k(), r.distance)];
            if !r.verdict {
                notes.push(Error::HypothesisFailure { distance: r.distance }.to_string());
                eprintln!("refuted: {}", notes[1]);
            }
            emit_report(Report {
                check: "mixture".into(),
                verdict: r.verdict,
                max_error: r.distance,
                failing_index: None,
                tol,
                notes,
            })
        }
        Command::VerifyFactorization { channel, cert } => {
            let t = read_channel(&channel)?;
            let cert = match read_document(&cert)? {
                Document::MatrixCert(c) => c,
                other => return Err(wrong_kind(&cert, &other, "matrix-cert")),
            };
            let r = verify_matrix_factorization(&cert, &t, tol)?;
            emit_report(factorization_report("matrix-factorization", &r))
        }
        Command::VerifyDirectSum { channel, cert } => {
            let t = read_channel(&channel)?;
            let cert = match read_document(&cert)? {
                Document::DirectSumCert(c) => c,
                other => return Err(wrong_kind(&cert, &other, "direct-sum-cert")),
            };
            let r = verify_direct_sum_factorization(&cert, &t, tol)?;
            emit_report(factorization_report("direct-sum-factorization", &r))
        }
        Command::Lift { file, output } => {
            let cert = match read_document(&file)? {
                Document::MixtureCert(m) => m,
                other => return Err(wrong_kind(&file, &other, "mixture-cert")),
            };
            let lifted = lift_rational_mixture(&cert, tol, &limits)?;
            write_output(&output, &emit_document(&Document::MatrixCert(lifted)))?;
            Ok(Outcome::Verified)
        }
        Command::Collapse { file, output } => {
            let cert = match read_document(&file)? {
                Document::DirectSumCert(c) => c,
                other => return Err(wrong_kind(&file, &other, "direct-sum-cert")),
            };
            let collapsed = collapse_direct_sum(&cert, tol, &limits)?;
            write_output(&output, &emit_document(&Document::MatrixCert(collapsed)))?;
            Ok(Outcome::Verified)
        }
        Command::FgCheck { channel, witness } => {
            let t = read_channel(&channel)?;
            let w = match read_document(&witness)? {
                Document::FgWitness(w) => w,
                other => return Err(wrong_kind(&witness, &other, "fg-witness")),
            };
            let r = w.check(&t, tol)?;
            let mut notes = vec![
                format!("unitary = {}", r.unitary),
                format!("unitarity_residual = {:e}", r.unitarity_residual),
                format!("factorizes = {}", r.factorizes),
                format!("factorization_distance = {:e}", r.factorization_distance),
            ];
            if let Some(word) = &r.offending_word {
                notes.push(format!("offending word = {word}"));
            }
            emit_report(Report {
                check: "free-group".into(),
                verdict: r.verdict(),
                max_error: r.unitarity_residual.max(r.factorization_distance),
                failing_index: None,
                tol,
                notes,
            })
        }
        Command::Zoo { action: ZooAction::List } => {
            let mut text = String::new();
            for name in ZooName::LISTING {
                text.push_str(name);
                text.push('\n');
            }
            write_output("-", &text)?;
            Ok(Outcome::Verified)
        }
        Command::Zoo {
            action: ZooAction::Emit { name, part, output },
        } => {
            let entry = zoo(name.parse()?, tol, &limits)?;
            let missing = |what: &str| Error::Precondition(format!("`{name}` has no {what} certificate"));
            let doc = match part {
                Part::Channel => Document::Channel(entry.channel),
                Part::Mixture => Document::MixtureCert(entry.mixture),
                Part::Lift => Document::MatrixCert(entry.lift),
                Part::Spin => Document::MatrixCert(entry.spin.ok_or_else(|| missing("spin"))?),
                Part::Witness => Document::FgWitness(entry.witness.ok_or_else(|| missing("free-group"))?),
            };
            write_output(&output, &emit_document(&doc))?;
            Ok(Outcome::Verified)
        }
        Command::SelfTest { count } => self_test(cli.seed, count, tol, &limits),
    }
}

fn self_test(seed: u64, count: usize, tol: f64, limits: &Limits) -> Result<Outcome> {
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for i in 0..count {
        let (n, k, d) = (rng.random_range(2..=3), rng.random_range(2..=3), rng.random_range(1..=4));
        let cert = random_product_mixture(n, k, d, 12, &mut rng)?;
        let (_, t) = verify_mixture_cert(&cert, tol, limits)?;
        let lifted = lift_rational_mixture(&cert, tol, limits)?;
        let r = verify_matrix_factorization(&lifted, &t, tol)?;
        worst = worst.max(r.max_error);
        if !r.verdict {
            failures.push(format!("lift instance {i}"));
        }
    }
    for i in 0..count {
        let n = rng.random_range(2..=3);
        let sizes: Vec<usize> = (0..rng.random_range(1..=3)).map(|_| rng.random_range(1..=3)).collect();
        let cert = random_direct_sum_cert(n, &sizes, 12, &mut rng)?;
        let t = factorcert::certificates::induced_channel_direct_sum(&cert, tol)?;
        let collapsed = collapse_direct_sum(&cert, tol, limits)?;
        let r = verify_matrix_factorization(&collapsed, &t, tol)?;
        worst = worst.max(r.max_error);
        if !r.verdict {
            failures.push(format!("collapse instance {i}"));
        }
    }
    let mut notes = vec![format!("seed = {seed}"), format!("instances = {}", 2 * count)];
    notes.extend(failures.iter().map(|f| format!("failed: {f}")));
    emit_report(Report {
        check: "self-test".into(),
        verdict: failures.is_empty(),
        max_error: worst,
        failing_index: None,
        tol,
        notes,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Verified) => ExitCode::SUCCESS,
        Ok(Outcome::Refuted) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
