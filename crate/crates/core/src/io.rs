//! JSON document formats.
//!
//! Every document is an envelope
//!
//! ```text
//! {"format_version": "1", "kind": "<kind>", "payload": {...}}
//! ```
//!
//! with `kind` one of `channel`, `mixture-cert`, `matrix-cert`, `direct-sum-cert`,
//! `fg-witness`, `report`. Complex numbers are `[re, im]`, matrices are
//! `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major order, and rationals
//! are strings `"num/den"`. Unknown fields, kinds and versions are rejected.
//!
//! [`emit_document`] is deterministic: keys are sorted and floats are written with
//! 17 significant digits, so `parse ∘ emit` is the identity on [`Document`].

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::Value;

use crate::certificates::{
    DirectSumFactorizationCert, DirectSumSpace, FactorizationUnitary, MatrixFactorizationCert,
    MixtureTerm, RationalMixtureCert, RepeatedBlock,
};
use crate::channels::QuantumChannel;
use crate::free_group::{FreeGroupWitness, FreeWord};
use crate::linalg::{ComplexMatrix, Rational};
use crate::{Error, Result};

pub const FORMAT_VERSION: &str = "1";

/// Machine-readable outcome of a CLI check.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub check: String,
    pub verdict: bool,
    pub max_error: f64,
    pub failing_index: Option<Vec<usize>>,
    pub tol: f64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Channel(QuantumChannel),
    MixtureCert(RationalMixtureCert),
    MatrixCert(MatrixFactorizationCert),
    DirectSumCert(DirectSumFactorizationCert),
    FgWitness(FreeGroupWitness),
    Report(Report),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Channel(_) => "channel",
            Document::MixtureCert(_) => "mixture-cert",
            Document::MatrixCert(_) => "matrix-cert",
            Document::DirectSumCert(_) => "direct-sum-cert",
            Document::FgWitness(_) => "fg-witness",
            Document::Report(_) => "report",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope<'a> {
    format_version: String,
    kind: String,
    #[serde(borrow)]
    payload: &'a RawValue,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelWire {
    dim: usize,
    kraus: Vec<MatrixWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermWire {
    coefficient: String,
    unitary: MatrixWire,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureWire {
    n: usize,
    k: usize,
    terms: Vec<TermWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockWire {
    unitary: MatrixWire,
    multiplicity: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum UnitaryWire {
    Dense(MatrixWire),
    BlockRepeated(Vec<BlockWire>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixCertWire {
    n: usize,
    ancilla_dim: usize,
    unitary: UnitaryWire,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectSumWire {
    n: usize,
    sizes: Vec<usize>,
    weights: Vec<String>,
    blocks: Vec<MatrixWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessTermWire {
    matrix: MatrixWire,
    word: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessWire {
    dim: usize,
    terms: Vec<WitnessTermWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportWire {
    check: String,
    verdict: bool,
    max_error: f64,
    failing_index: Option<Vec<usize>>,
    tol: f64,
    notes: Vec<String>,
}

impl MatrixWire {
    fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixWire {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    fn into_matrix(self) -> Result<ComplexMatrix> {
        if self.rows.checked_mul(self.cols) != Some(self.data.len()) {
            return Err(Error::Shape(format!(
                "matrix declares {}x{} but carries {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        let data = self.data.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        ComplexMatrix::new(self.rows, self.cols, data)
    }
}

fn matrices(ms: Vec<MatrixWire>) -> Result<Vec<ComplexMatrix>> {
    ms.into_iter().map(MatrixWire::into_matrix).collect()
}

fn rational(s: &str) -> Result<Rational> {
    s.parse()
}

/// Byte offset of serde's 1-based (line, column) position in `text`.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

fn json_error(text: &str, base: usize, e: &serde_json::Error) -> Error {
    let offset = base + byte_offset(text, e.line(), e.column());
    let message = e.to_string();
    let message = match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message,
    };
    match e.classify() {
        serde_json::error::Category::Syntax | serde_json::error::Category::Eof | serde_json::error::Category::Io => {
            Error::Syntax { offset, message }
        }
        serde_json::error::Category::Data => Error::Schema(format!("at byte {offset}: {message}")),
    }
}

fn payload<'a, T: Deserialize<'a>>(text: &str, raw: &'a RawValue) -> Result<T> {
    let body = raw.get();
    let base = body.as_ptr() as usize - text.as_ptr() as usize;
    serde_json::from_str(body).map_err(|e| json_error(body, base, &e))
}

/// Strict parse of one document.
pub fn parse_document(text: &str) -> Result<Document> {
    let env: Envelope = serde_json::from_str(text).map_err(|e| json_error(text, 0, &e))?;
    if env.format_version != FORMAT_VERSION {
        return Err(Error::Schema(format!(
            "unsupported format_version `{}` (expected `{FORMAT_VERSION}`)",
            env.format_version
        )));
    }
    match env.kind.as_str() {
        "channel" => {
            let w: ChannelWire = payload(text, env.payload)?;
            Ok(Document::Channel(QuantumChannel::new(w.dim, matrices(w.kraus)?)?))
        }
        "mixture-cert" => {
            let w: MixtureWire = payload(text, env.payload)?;
            let terms = w
                .terms
                .into_iter()
                .map(|t| {
                    Ok(MixtureTerm {
                        coefficient: rational(&t.coefficient)?,
                        unitary: t.unitary.into_matrix()?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Document::MixtureCert(RationalMixtureCert::new(w.n, w.k, terms)?))
        }
        "matrix-cert" => {
            let w: MatrixCertWire = payload(text, env.payload)?;
            let unitary = match w.unitary {
                UnitaryWire::Dense(m) => FactorizationUnitary::Dense(m.into_matrix()?),
                UnitaryWire::BlockRepeated(blocks) => {
                    let blocks = blocks
                        .into_iter()
                        .map(|b| {
                            Ok(RepeatedBlock {
                                unitary: b.unitary.into_matrix()?,
                                multiplicity: b.multiplicity,
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    block_repeated(w.n, w.ancilla_dim, blocks)?
                }
            };
            Ok(Document::MatrixCert(MatrixFactorizationCert::new(w.n, w.ancilla_dim, unitary)?))
        }
        "direct-sum-cert" => {
            let w: DirectSumWire = payload(text, env.payload)?;
            let weights = w.weights.iter().map(|s| rational(s)).collect::<Result<Vec<_>>>()?;
            let space = DirectSumSpace::new(w.sizes, weights)?;
            Ok(Document::DirectSumCert(DirectSumFactorizationCert::new(w.n, space, matrices(w.blocks)?)?))
        }
        "fg-witness" => {
            let w: WitnessWire = payload(text, env.payload)?;
            let terms = w
                .terms
                .into_iter()
                .map(|t| Ok((t.matrix.into_matrix()?, t.word.parse::<FreeWord>()?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Document::FgWitness(FreeGroupWitness::new(w.dim, terms)?))
        }
        "report" => {
            let w: ReportWire = payload(text, env.payload)?;
            Ok(Document::Report(Report {
                check: w.check,
                verdict: w.verdict,
                max_error: w.max_error,
                failing_index: w.failing_index,
                tol: w.tol,
                notes: w.notes,
            }))
        }
        other => Err(Error::Schema(format!("unknown document kind `{other}`"))),
    }
}

/// Recovers `base_k` from `ancilla_dim = base_k · Σ C_i`.
fn block_repeated(n: usize, ancilla_dim: usize, blocks: Vec<RepeatedBlock>) -> Result<FactorizationUnitary> {
    let total = blocks
        .iter()
        .try_fold(0u64, |acc, b| acc.checked_add(b.multiplicity))
        .ok_or(Error::Overflow)?;
    let base_k = blocks.first().map(|b| b.unitary.rows() / n.max(1)).unwrap_or(0);
    if total == 0 || base_k == 0 || (base_k as u64).checked_mul(total) != Some(ancilla_dim as u64) {
        return Err(Error::Shape(format!(
            "block_repeated blocks (multiplicity total {total}, block size {}) do not fill an ancilla of dimension {ancilla_dim}",
            base_k
        )));
    }
    Ok(FactorizationUnitary::BlockRepeated { base_k, blocks })
}

fn to_value<T: Serialize>(w: &T) -> Value {
    serde_json::to_value(w).expect("wire types serialize")
}

fn payload_value(doc: &Document) -> Value {
    match doc {
        Document::Channel(c) => to_value(&ChannelWire {
            dim: c.dim(),
            kraus: c.kraus().iter().map(MatrixWire::from_matrix).collect(),
        }),
        Document::MixtureCert(m) => to_value(&MixtureWire {
            n: m.n(),
            k: m.k(),
            terms: m
                .terms()
                .iter()
                .map(|t| TermWire {
                    coefficient: t.coefficient.to_string(),
                    unitary: MatrixWire::from_matrix(&t.unitary),
                })
                .collect(),
        }),
        Document::MatrixCert(c) => to_value(&MatrixCertWire {
            n: c.n(),
            ancilla_dim: c.ancilla_dim(),
            unitary: match c.unitary() {
                FactorizationUnitary::Dense(u) => UnitaryWire::Dense(MatrixWire::from_matrix(u)),
                FactorizationUnitary::BlockRepeated { blocks, .. } => UnitaryWire::BlockRepeated(
                    blocks
                        .iter()
                        .map(|b| BlockWire {
                            unitary: MatrixWire::from_matrix(&b.unitary),
                            multiplicity: b.multiplicity,
                        })
                        .collect(),
                ),
            },
        }),
        Document::DirectSumCert(c) => to_value(&DirectSumWire {
            n: c.n(),
            sizes: c.space().sizes().to_vec(),
            weights: c.space().weights().iter().map(ToString::to_string).collect(),
            blocks: c.blocks().iter().map(MatrixWire::from_matrix).collect(),
        }),
        Document::FgWitness(w) => to_value(&WitnessWire {
            dim: w.dim(),
            terms: w
                .terms()
                .iter()
                .map(|(m, g)| WitnessTermWire {
                    matrix: MatrixWire::from_matrix(m),
                    word: g.to_string(),
                })
                .collect(),
        }),
        Document::Report(r) => to_value(&ReportWire {
            check: r.check.clone(),
            verdict: r.verdict,
            max_error: finite(r.max_error),
            failing_index: r.failing_index.clone(),
            tol: finite(r.tol),
            notes: r.notes.clone(),
        }),
    }
}

fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX
    }
}

/// Deterministic serialization, terminated by a newline.
pub fn emit_document(doc: &Document) -> String {
    let mut env = serde_json::Map::new();
    env.insert("format_version".into(), Value::String(FORMAT_VERSION.into()));
    env.insert("kind".into(), Value::String(doc.kind().into()));
    env.insert("payload".into(), payload_value(doc));
    let mut out = String::new();
    write_value(&mut out, &Value::Object(env), 0);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                write!(out, "{i}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                let f = n.as_f64().expect("finite number");
                write!(out, "{f:.16e}").unwrap();
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            if items.iter().all(is_scalar) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, item, depth + 1);
                }
                out.push(']');
            } else {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    out.push_str(if i > 0 { ",\n" } else { "\n" });
                    indent(out, depth + 1);
                    write_value(out, item, depth + 1);
                }
                out.push('\n');
                indent(out, depth);
                out.push(']');
            }
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.iter().enumerate() {
                out.push_str(if i > 0 { ",\n" } else { "\n" });
                indent(out, depth + 1);
                out.push_str(&serde_json::to_string(key).expect("string serializes"));
                out.push_str(": ");
                write_value(out, &map[key.as_str()], depth + 1);
            }
            if !keys.is_empty() {
                out.push('\n');
                indent(out, depth);
            }
            out.push('}');
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}
