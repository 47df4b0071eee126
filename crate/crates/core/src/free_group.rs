//! Free group words and exact checks of factorizations through `L(F_d)`.
//!
//! A witness is a family `(a_i, g_i)` of matrices `a_i ∈ M_n` and group elements `g_i`
//! standing for `u = Σ a_i ⊗ λ_{g_i}`. Since distinct group elements give linearly
//! independent `λ_w`, unitarity of `u` is the finite condition
//! `Σ_{g_i⁻¹ g_j = w} a_i* a_j = δ_{w,e} 1` (and the same for `a_i a_j*` with
//! `g_i g_j⁻¹`), and the canonical trace reduces the induced map to
//! `x ↦ Σ_{g_i = g_j} a_i* x a_j`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::channels::{ChoiMatrix, QuantumChannel};
use crate::linalg::ComplexMatrix;
use crate::{Error, Result};

/// One letter `g_i^{±1}`; generators are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    generator: u32,
    inverse: bool,
}

impl Letter {
    pub fn new(generator: u32, exponent_sign: i8) -> Result<Self> {
        if generator == 0 {
            return Err(Error::Domain("generator indices start at 1".into()));
        }
        let inverse = match exponent_sign {
            1 => false,
            -1 => true,
            s => return Err(Error::Domain(format!("exponent sign must be ±1, got {s}"))),
        };
        Ok(Letter { generator, inverse })
    }

    pub fn generator(&self) -> u32 {
        self.generator
    }

    pub fn exponent_sign(&self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Letter {
            inverse: !self.inverse,
            ..self
        }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

/// Reduced word in a free group. The empty word is the identity `e`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    pub fn generator(index: u32) -> Result<Self> {
        Ok(FreeWord {
            letters: vec![Letter::new(index, 1)?],
        })
    }

    /// Freely reduces a raw letter sequence.
    pub fn reduce(raw: impl IntoIterator<Item = Letter>) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in raw {
            match stack.last() {
                Some(top) if top.cancels(&l) => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        FreeWord { letters: stack }
    }

    /// Reduces `(generator, sign)` pairs; generator 0 is a domain error.
    pub fn from_pairs(pairs: &[(u32, i8)]) -> Result<Self> {
        let letters = pairs
            .iter()
            .map(|&(g, s)| Letter::new(g, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::reduce(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        Self::reduce(self.letters.iter().chain(&other.letters).copied())
    }

    pub fn inv(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `⟨λ_w δ_e, δ_e⟩`: 1 on the identity, 0 elsewhere.
    pub fn canonical_trace(&self) -> u8 {
        u8::from(self.is_identity())
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "g{}", l.generator)?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

/// Whitespace-separated letters `g<i>` or `g<i>^-1`; `e` (or an empty string) is the
/// identity. The parsed word is reduced.
impl FromStr for FreeWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "e" {
                continue;
            }
            let (body, inverse) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let digits = body
                .strip_prefix('g')
                .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                .ok_or_else(|| Error::Schema(format!("bad free-group letter `{tok}`")))?;
            let g: u32 = digits
                .parse()
                .map_err(|_| Error::Schema(format!("bad free-group letter `{tok}`")))?;
            letters.push(Letter::new(g, if inverse { -1 } else { 1 })?);
        }
        Ok(FreeWord::reduce(letters))
    }
}

/// `u = Σ a_i ⊗ λ_{g_i}` as a finite witness.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeGroupWitness {
    dim: usize,
    terms: Vec<(ComplexMatrix, FreeWord)>,
}

impl FreeGroupWitness {
    pub fn new(dim: usize, terms: Vec<(ComplexMatrix, FreeWord)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Shape("free-group witness has no terms".into()));
        }
        for (i, (a, _)) in terms.iter().enumerate() {
            if a.rows() != dim || a.cols() != dim {
                return Err(Error::Shape(format!(
                    "term {i} is {}x{}, expected {dim}x{dim}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(FreeGroupWitness { dim, terms })
    }

    /// `(a_i, g_i)` with `a_i = E_ii` and `g_i` the i-th generator.
    pub fn diagonal(d: usize) -> Result<Self> {
        let terms = (0..d)
            .map(|i| Ok((ComplexMatrix::unit(d, i, i), FreeWord::generator(i as u32 + 1)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(ComplexMatrix, FreeWord)] {
        &self.terms
    }

    pub fn check(&self, t: &QuantumChannel, tol: f64) -> Result<FreeGroupReport> {
        let (a, g): (Vec<_>, Vec<_>) = self.terms.iter().cloned().unzip();
        symbolic_factorization_check(&a, &g, t, tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeGroupReport {
    pub unitary: bool,
    pub factorizes: bool,
    /// Largest `‖M_w − δ_{w,e} 1‖_F` over the words occurring in `u*u` and `uu*`.
    pub unitarity_residual: f64,
    /// Word whose coefficient is worst when unitarity fails.
    pub offending_word: Option<FreeWord>,
    /// Choi distance between `t` and the induced channel.
    pub factorization_distance: f64,
    pub tol: f64,
}

impl FreeGroupReport {
    pub fn verdict(&self) -> bool {
        self.unitary && self.factorizes
    }
}

/// Exact symbolic check that `u = Σ a_i ⊗ λ_{g_i}` is unitary in `M_n ⊗ L(F)` and that
/// `(id_n ⊗ τ)(u* (x ⊗ 1) u) = t(x)`.
pub fn symbolic_factorization_check(
    a: &[ComplexMatrix],
    g: &[FreeWord],
    t: &QuantumChannel,
    tol: f64,
) -> Result<FreeGroupReport> {
    if a.is_empty() || a.len() != g.len() {
        return Err(Error::Shape(format!(
            "{} matrices for {} group elements",
            a.len(),
            g.len()
        )));
    }
    let n = t.dim();
    for (i, ai) in a.iter().enumerate() {
        if ai.rows() != n || ai.cols() != n {
            return Err(Error::Shape(format!(
                "coefficient {i} is {}x{}, channel acts on M_{n}",
                ai.rows(),
                ai.cols()
            )));
        }
    }

    // u*u = Σ a_i* a_j ⊗ λ_{g_i⁻¹ g_j},  uu* = Σ a_i a_j* ⊗ λ_{g_i g_j⁻¹}
    let mut left: BTreeMap<FreeWord, ComplexMatrix> = BTreeMap::new();
    let mut right: BTreeMap<FreeWord, ComplexMatrix> = BTreeMap::new();
    let one = Complex64::new(1.0, 0.0);
    for (ai, gi) in a.iter().zip(g) {
        for (aj, gj) in a.iter().zip(g) {
            left.entry(gi.inv().mul(gj))
                .or_insert_with(|| ComplexMatrix::zeros(n, n))
                .add_scaled(one, &ai.adjoint_mul(aj));
            right
                .entry(gi.mul(&gj.inv()))
                .or_insert_with(|| ComplexMatrix::zeros(n, n))
                .add_scaled(one, &(ai * &aj.adjoint()));
        }
    }
    let id = ComplexMatrix::identity(n);
    let zero = ComplexMatrix::zeros(n, n);
    let mut residual = 0.0f64;
    let mut worst: Option<FreeWord> = None;
    for (w, m) in left.iter().chain(right.iter()) {
        let target = if w.is_identity() { &id } else { &zero };
        let r = m.frobenius_distance(target);
        if r > residual {
            residual = r;
            worst = Some(w.clone());
        }
    }
    // the identity word always occurs, so a missing entry cannot hide a defect
    let unitary = residual <= tol;

    let induced = symbolic_induced_choi(n, a, g)?;
    let factorization_distance = induced.matrix.frobenius_distance(&t.choi().matrix);

    Ok(FreeGroupReport {
        unitary,
        factorizes: factorization_distance <= tol,
        unitarity_residual: residual,
        offending_word: if unitary { None } else { worst },
        factorization_distance,
        tol,
    })
}

/// Choi matrix of `x ↦ (id_n ⊗ τ)(u* (x ⊗ 1) u) = Σ_{g_i = g_j} a_i* x a_j`.
pub fn symbolic_induced_choi(n: usize, a: &[ComplexMatrix], g: &[FreeWord]) -> Result<ChoiMatrix> {
    if a.len() != g.len() {
        return Err(Error::Shape(format!("{} matrices for {} group elements", a.len(), g.len())));
    }
    let one = Complex64::new(1.0, 0.0);
    ChoiMatrix::from_action(n, |x| {
        let mut out = ComplexMatrix::zeros(n, n);
        for (ai, gi) in a.iter().zip(g) {
            for (aj, gj) in a.iter().zip(g) {
                if gi.inv().mul(gj).canonical_trace() == 1 {
                    out.add_scaled(one, &ai.adjoint_mul(&x.try_matmul(aj)?));
                }
            }
        }
        Ok(out)
    })
}

impl FreeGroupWitness {
    /// The channel induced by the witness, as a Kraus family.
    pub fn induced_channel(&self) -> Result<QuantumChannel> {
        let (a, g): (Vec<_>, Vec<_>) = self.terms.iter().cloned().unzip();
        symbolic_induced_choi(self.dim, &a, &g)?.to_channel(crate::KRAUS_RANK_CUTOFF)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::dephasing;

    fn w(s: &str) -> FreeWord {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(FreeWord::from_pairs(&[(1, 1), (2, 1), (2, -1)]).unwrap(), w("g1"));
        assert!(FreeWord::from_pairs(&[(1, 1), (1, -1)]).unwrap().is_identity());
        assert!(matches!(FreeWord::from_pairs(&[(0, 1)]), Err(Error::Domain(_))));
        assert!(matches!(Letter::new(1, 2), Err(Error::Domain(_))));
        // cancellation cascades
        assert_eq!(w("g1 g2 g3 g3^-1 g2^-1 g4"), w("g1 g4"));
    }

    #[test]
    fn group_operations() {
        let a = w("g1 g2^-1 g3");
        assert!(a.mul(&a.inv()).is_identity());
        assert_eq!(a.inv().inv(), a);
        assert_eq!(a.inv().to_string(), "g3^-1 g2 g1^-1");
    }

    #[test]
    fn text_format() {
        assert_eq!(w("e").to_string(), "e");
        assert_eq!(w("").to_string(), "e");
        assert_eq!(w("  g12   g3^-1 ").to_string(), "g12 g3^-1");
        for bad in ["x1", "g", "g-1", "g1^2", "g0", "g1^-1^-1"] {
            assert!(bad.parse::<FreeWord>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn canonical_trace_values() {
        assert_eq!(FreeWord::identity().canonical_trace(), 1);
        assert_eq!(w("g1").canonical_trace(), 0);
        assert_eq!(w("g1 g2 g1^-1 g2^-1").canonical_trace(), 0);
    }

    #[test]
    fn dephasing_witnesses() {
        for d in 2..=5 {
            let t = dephasing(d).unwrap();
            let rep = FreeGroupWitness::diagonal(d).unwrap().check(&t, 1e-9).unwrap();
            assert!(rep.verdict(), "d = {d}: {rep:?}");
            assert!(rep.unitarity_residual <= 1e-12);
            assert!(rep.factorization_distance <= 1e-12);
        }
    }

    #[test]
    fn repeated_generator_is_unitary_but_induces_identity() {
        let a = [ComplexMatrix::unit(2, 0, 0), ComplexMatrix::unit(2, 1, 1)];
        let g = [w("g1"), w("g1")];
        let rep = symbolic_factorization_check(&a, &g, &dephasing(2).unwrap(), 1e-9).unwrap();
        assert!(rep.unitary);
        assert!(!rep.factorizes);
        let rep = symbolic_factorization_check(&a, &g, &QuantumChannel::identity(2), 1e-9).unwrap();
        assert!(rep.verdict());
    }

    #[test]
    fn non_unitary_witness_names_a_word() {
        let a = [ComplexMatrix::identity(2), ComplexMatrix::identity(2)];
        let g = [w("g1"), w("g2")];
        let rep = symbolic_factorization_check(&a, &g, &QuantumChannel::identity(2), 1e-9).unwrap();
        assert!(!rep.unitary);
        let word = rep.offending_word.unwrap();
        assert!(!word.is_identity() || rep.unitarity_residual > 0.0);
    }

    #[test]
    fn shape_errors() {
        let t = dephasing(2).unwrap();
        assert!(symbolic_factorization_check(&[], &[], &t, 1e-9).is_err());
        assert!(symbolic_factorization_check(&[ComplexMatrix::identity(3)], &[w("g1")], &t, 1e-9).is_err());
        assert!(symbolic_factorization_check(&[ComplexMatrix::identity(2)], &[], &t, 1e-9).is_err());
    }
}
