//! Constructive transformations between certificates.
//!
//! - [`lift_rational_mixture`]: from `T ⊗ S_k = Σ c_i ad(u_i)` with rational `c_i` to a
//!   factorization of `T` through `M_n ⊗ M_{kL}`, `L` the common denominator.
//! - [`pushforward`]: transports a factorization along a trace-preserving unital
//!   *-homomorphism of the ancilla algebra.
//! - [`equalize_sizes`], [`embed_equal_blocks`], [`collapse_direct_sum`]: collapse a
//!   factorization through `(⊕ M_{k_i}, τ_α)` with rational `α` into one through a
//!   single matrix algebra.
//! - [`spin_unitaries`], [`commuting_kraus_factorization`]: factorization through
//!   `M_n ⊗ M_{2^d}` of `x ↦ Σ a_i x a_i` for commuting self-adjoint `a_i`.

pub mod zoo;

use num_complex::Complex64;
use num_integer::Integer;

use crate::certificates::{
    verify_matrix_factorization, verify_mixture_cert, DirectSumFactorizationCert, DirectSumSpace,
    FactorizationCert, FactorizationUnitary, MatrixFactorizationCert, RationalMixtureCert,
    RepeatedBlock,
};
use crate::channels::{choi_distance, ChoiMatrix, QuantumChannel};
use crate::linalg::{is_unitary, kron_with_limit, lcm_reduce, ComplexMatrix, Rational};
use crate::{Error, Limits, Result, KRAUS_RANK_CUTOFF};

/// Lifts a verified rational mixture `T ⊗ S_k = Σ c_i ad(u_i)` to the block unitary
/// `U = diag(u_1 ×C_1, …, u_d ×C_d)` with `c_i = C_i / L`, a factorization of `T`
/// through `M_n ⊗ M_k ⊗ M_L`.
///
/// The tensor-factor hypothesis is re-checked; a mixture that is not of the form
/// `T ⊗ S_k` yields [`Error::HypothesisFailure`].
pub fn lift_rational_mixture(
    cert: &RationalMixtureCert,
    tol: f64,
    limits: &Limits,
) -> Result<MatrixFactorizationCert> {
    let (report, recovered) = verify_mixture_cert(cert, tol, limits)?;
    if !report.verdict {
        return Err(Error::HypothesisFailure {
            distance: report.distance,
        });
    }
    let expansion = lcm_reduce(&cert.coefficients(), limits.max_lcm)?;
    let ancilla = (cert.k() as u64)
        .checked_mul(expansion.common_denominator)
        .and_then(|a| usize::try_from(a).ok())
        .ok_or(Error::Overflow)?;
    let blocks = cert
        .terms()
        .iter()
        .zip(&expansion.multiplicities)
        .map(|(t, &m)| RepeatedBlock {
            unitary: t.unitary.clone(),
            multiplicity: m,
        })
        .collect();
    let lifted = MatrixFactorizationCert::new(
        cert.n(),
        ancilla,
        FactorizationUnitary::BlockRepeated {
            base_k: cert.k(),
            blocks,
        },
    )?;
    let check = verify_matrix_factorization(&lifted, &recovered, tol)?;
    if !check.verdict {
        return Err(Error::InvalidCertificate(format!(
            "lifted factorization misses the recovered channel by {:e}",
            check.max_error
        )));
    }
    Ok(lifted)
}

/// One run of repeated copies of a source summand inside a target summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub source_index: usize,
    pub multiplicity: usize,
}

/// Unital *-homomorphism `⊕ M_{k_i} → ⊕ M_{k'_j}` placing copies of the source blocks
/// along the diagonal of each target summand, in the listed order.
///
/// Construction checks that the block dimensions add up and that the target trace
/// pulls back to the source trace exactly (`Σ_j β_j m_{ji} k_i / k'_j = α_i`).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEmbedding {
    source: DirectSumSpace,
    target: DirectSumSpace,
    layout: Vec<Vec<Placement>>,
}

impl BlockEmbedding {
    pub fn new(source: DirectSumSpace, target: DirectSumSpace, layout: Vec<Vec<Placement>>) -> Result<Self> {
        if layout.len() != target.summands() {
            return Err(Error::NotHomomorphism(format!(
                "layout has {} target summands, target space has {}",
                layout.len(),
                target.summands()
            )));
        }
        let mut pulled_back = vec![Rational::ZERO; source.summands()];
        for (j, slots) in layout.iter().enumerate() {
            let kt = target.sizes()[j];
            let mut filled = 0usize;
            for p in slots {
                let ks = *source.sizes().get(p.source_index).ok_or_else(|| {
                    Error::NotHomomorphism(format!("source index {} out of range", p.source_index))
                })?;
                if p.multiplicity == 0 {
                    return Err(Error::NotHomomorphism("zero multiplicity".into()));
                }
                filled = filled
                    .checked_add(p.multiplicity.checked_mul(ks).ok_or(Error::Overflow)?)
                    .ok_or(Error::Overflow)?;
                // β_j · m · k_i / k'_j
                let share = target.weights()[j]
                    .checked_mul(&Rational::new((p.multiplicity * ks) as i128, kt as i128)?)?;
                pulled_back[p.source_index] = pulled_back[p.source_index].checked_add(&share)?;
            }
            if filled != kt {
                return Err(Error::NotHomomorphism(format!(
                    "target summand {j} is M_{kt} but its blocks fill {filled}"
                )));
            }
        }
        for (i, (got, want)) in pulled_back.iter().zip(source.weights()).enumerate() {
            if got != want {
                return Err(Error::NotHomomorphism(format!(
                    "summand {i}: target trace pulls back to weight {got}, source weight is {want}"
                )));
            }
        }
        Ok(BlockEmbedding {
            source,
            target,
            layout,
        })
    }

    pub fn identity(space: DirectSumSpace) -> Self {
        let layout = (0..space.summands())
            .map(|i| {
                vec![Placement {
                    source_index: i,
                    multiplicity: 1,
                }]
            })
            .collect();
        BlockEmbedding {
            source: space.clone(),
            target: space,
            layout,
        }
    }

    pub fn source(&self) -> &DirectSumSpace {
        &self.source
    }

    pub fn target(&self) -> &DirectSumSpace {
        &self.target
    }

    pub fn layout(&self) -> &[Vec<Placement>] {
        &self.layout
    }

    /// Image of a source element `(x_1, …, x_d)`.
    pub fn apply(&self, element: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
        self.apply_amplified(1, element)
    }

    /// `(id_n ⊗ emb)` applied to an element of `M_n ⊗ (⊕ M_{k_i})` given blockwise,
    /// block `i` in `M_n ⊗ M_{k_i}` with the ancilla as the inner factor.
    pub fn apply_amplified(&self, n: usize, element: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
        if element.len() != self.source.summands() {
            return Err(Error::EmbeddingMismatch(format!(
                "element has {} blocks, source has {} summands",
                element.len(),
                self.source.summands()
            )));
        }
        for (i, (x, &k)) in element.iter().zip(self.source.sizes()).enumerate() {
            if x.rows() != n * k || x.cols() != n * k {
                return Err(Error::EmbeddingMismatch(format!(
                    "block {i} is {}x{}, expected {}x{}",
                    x.rows(),
                    x.cols(),
                    n * k,
                    n * k
                )));
            }
        }
        let mut out = Vec::with_capacity(self.target.summands());
        for (slots, &kt) in self.layout.iter().zip(self.target.sizes()) {
            let mut block = ComplexMatrix::zeros(n * kt, n * kt);
            let mut offset = 0;
            for p in slots {
                let ks = self.source.sizes()[p.source_index];
                let x = &element[p.source_index];
                for _ in 0..p.multiplicity {
                    for r in 0..n {
                        for s in 0..n {
                            for a in 0..ks {
                                for b in 0..ks {
                                    block[(r * kt + offset + a, s * kt + offset + b)] = x[(r * ks + a, s * ks + b)];
                                }
                            }
                        }
                    }
                    offset += ks;
                }
            }
            out.push(block);
        }
        Ok(out)
    }
}

/// Embeds `(M_k ⊕ … ⊕ M_k, τ_α)` into `(M_{kL}, τ_{kL})`, where `α_i = l_i / L` over the
/// common denominator `L`, repeating summand `i` exactly `l_i` times.
pub fn embed_equal_blocks(space: &DirectSumSpace, limits: &Limits) -> Result<BlockEmbedding> {
    let k = space.sizes()[0];
    if space.sizes().iter().any(|&s| s != k) {
        return Err(Error::Precondition(format!(
            "summand sizes {:?} are not all equal",
            space.sizes()
        )));
    }
    let expansion = lcm_reduce(space.weights(), limits.max_lcm)?;
    let dim = (k as u64)
        .checked_mul(expansion.common_denominator)
        .and_then(|d| usize::try_from(d).ok())
        .ok_or(Error::Overflow)?;
    limits.check_dim(dim)?;
    let layout = vec![expansion
        .multiplicities
        .iter()
        .enumerate()
        .map(|(i, &m)| Placement {
            source_index: i,
            multiplicity: m as usize,
        })
        .collect()];
    BlockEmbedding::new(space.clone(), DirectSumSpace::matrix_algebra(dim)?, layout)
}

/// Embeds `⊕ M_{k_i}` into `⊕ M_K` with `K = lcm(k_i)`, summand `i` repeated `K / k_i`
/// times inside its own target summand; weights are unchanged.
pub fn equalize_sizes(space: &DirectSumSpace, limits: &Limits) -> Result<BlockEmbedding> {
    let mut common = 1usize;
    for &k in space.sizes() {
        common = (common / common.gcd(&k)).checked_mul(k).ok_or(Error::Overflow)?;
        limits.check_dim(common)?;
    }
    let layout = space
        .sizes()
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            vec![Placement {
                source_index: i,
                multiplicity: common / k,
            }]
        })
        .collect();
    let target = DirectSumSpace::new(vec![common; space.summands()], space.weights().to_vec())?;
    BlockEmbedding::new(space.clone(), target, layout)
}

fn unitary_blocks(cert: &FactorizationCert, limits: &Limits) -> Result<Vec<ComplexMatrix>> {
    match cert {
        FactorizationCert::Matrix(c) => Ok(vec![c.materialize(limits)?]),
        FactorizationCert::DirectSum(c) => Ok(c.blocks().to_vec()),
    }
}

fn induced_choi(cert: &FactorizationCert) -> Result<ChoiMatrix> {
    ChoiMatrix::from_action(cert.n(), |x| cert.induced_action(x))
}

/// Transports a factorization along `emb`: the unitary `u` becomes `(id_n ⊗ emb)(u)`.
/// The induced channel is recomputed on both sides and must agree within `tol`.
///
/// A one-summand target yields a [`FactorizationCert::Matrix`].
pub fn pushforward(
    cert: &FactorizationCert,
    emb: &BlockEmbedding,
    tol: f64,
    limits: &Limits,
) -> Result<FactorizationCert> {
    let space = cert.space()?;
    if &space != emb.source() {
        return Err(Error::EmbeddingMismatch(format!(
            "certificate lives over sizes {:?} with weights {:?}, embedding expects {:?} / {:?}",
            space.sizes(),
            space.weights(),
            emb.source().sizes(),
            emb.source().weights()
        )));
    }
    cert.validate(tol)?;
    let n = cert.n();
    for &k in emb.target().sizes() {
        limits.check_dim(n.saturating_mul(k))?;
    }
    let blocks = emb.apply_amplified(n, &unitary_blocks(cert, limits)?)?;
    for (i, b) in blocks.iter().enumerate() {
        if !is_unitary(b, tol)? {
            return Err(Error::NotHomomorphism(format!(
                "image of the unitary is not unitary in target summand {i}"
            )));
        }
    }
    let out = if emb.target().summands() == 1 {
        let u = blocks.into_iter().next().expect("one summand");
        FactorizationCert::Matrix(MatrixFactorizationCert::dense(n, u)?)
    } else {
        FactorizationCert::DirectSum(DirectSumFactorizationCert::new(n, emb.target().clone(), blocks)?)
    };
    let before = induced_choi(cert)?;
    let after = induced_choi(&out)?;
    let distance = before.matrix.frobenius_distance(&after.matrix);
    if distance > tol {
        return Err(Error::InvalidCertificate(format!(
            "pushforward changed the induced channel (Choi distance {distance:e})"
        )));
    }
    Ok(out)
}

/// Collapses a factorization through `(⊕ M_{k_i}, τ_α)` into one through
/// `M_n ⊗ M_{K·L}`, `K = lcm(k_i)` and `L` the common denominator of `α`.
pub fn collapse_direct_sum(
    cert: &DirectSumFactorizationCert,
    tol: f64,
    limits: &Limits,
) -> Result<MatrixFactorizationCert> {
    cert.validate(tol)?;
    let start = FactorizationCert::DirectSum(cert.clone());
    let equal = pushforward(&start, &equalize_sizes(cert.space(), limits)?, tol, limits)?;
    let single = pushforward(&equal, &embed_equal_blocks(&equal.space()?, limits)?, tol, limits)?;
    let FactorizationCert::Matrix(out) = single else {
        unreachable!("embedding into one summand yields a matrix certificate")
    };
    let reference = ChoiMatrix::from_action(cert.n(), |x| cert.induced_action(x))?.to_channel(KRAUS_RANK_CUTOFF)?;
    let check = verify_matrix_factorization(&out, &reference, tol)?;
    if !check.verdict {
        return Err(Error::InvalidCertificate(format!(
            "collapsed factorization misses the original channel by {:e}",
            check.max_error
        )));
    }
    Ok(out)
}

fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
}

/// Jordan–Wigner family `s_i = Z^{⊗(i−1)} ⊗ X ⊗ 1^{⊗(d−i)}` in `M_{2^d}`: self-adjoint,
/// unitary, pairwise anticommuting, with `τ(s_i s_j) = δ_ij`.
pub fn spin_unitaries(d: usize, limits: &Limits) -> Result<Vec<ComplexMatrix>> {
    if d == 0 {
        return Err(Error::Domain("spin family needs d ≥ 1".into()));
    }
    let dim = u32::try_from(d)
        .ok()
        .and_then(|d| 1usize.checked_shl(d))
        .filter(|_| d < usize::BITS as usize)
        .unwrap_or(usize::MAX);
    limits.check_dim(dim)?;
    let (x, z, id) = (pauli_x(), pauli_z(), ComplexMatrix::identity(2));
    (0..d)
        .map(|i| {
            let mut s = ComplexMatrix::identity(1);
            for slot in 0..d {
                let factor = match slot.cmp(&i) {
                    std::cmp::Ordering::Less => &z,
                    std::cmp::Ordering::Equal => &x,
                    std::cmp::Ordering::Greater => &id,
                };
                s = kron_with_limit(&s, factor, limits.max_dim)?;
            }
            Ok(s)
        })
        .collect()
}

/// Factorization of `x ↦ Σ a_i x a_i` through `M_n ⊗ M_{2^d}` via `u = Σ a_i ⊗ s_i`,
/// for self-adjoint, pairwise commuting `a_i` with `Σ a_i² = 1`.
pub fn commuting_kraus_factorization(
    a: &[ComplexMatrix],
    tol: f64,
    limits: &Limits,
) -> Result<MatrixFactorizationCert> {
    let first = a
        .first()
        .ok_or_else(|| Error::Precondition("empty operator family".into()))?;
    let n = first.square_dim()?;
    let one = Complex64::new(1.0, 0.0);
    let mut square_sum = ComplexMatrix::zeros(n, n);
    for (i, ai) in a.iter().enumerate() {
        if ai.rows() != n || ai.cols() != n {
            return Err(Error::Shape(format!("operator {i} is not {n}x{n}")));
        }
        let herm = ai.hermiticity_error()?;
        if herm > tol {
            return Err(Error::Precondition(format!(
                "operator {i} is not self-adjoint (error {herm:e})"
            )));
        }
        square_sum.add_scaled(one, &(ai * ai));
    }
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let comm = (&a[i] * &a[j]).frobenius_distance(&(&a[j] * &a[i]));
            if comm > tol {
                return Err(Error::Precondition(format!(
                    "operators {i} and {j} do not commute (error {comm:e})"
                )));
            }
        }
    }
    let defect = square_sum.frobenius_distance(&ComplexMatrix::identity(n));
    if defect > tol {
        return Err(Error::Precondition(format!(
            "sum of squares differs from the identity by {defect:e}"
        )));
    }

    let spins = spin_unitaries(a.len(), limits)?;
    let dim = n.saturating_mul(spins[0].rows());
    limits.check_dim(dim)?;
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (ai, si) in a.iter().zip(&spins) {
        u.add_scaled(one, &kron_with_limit(ai, si, limits.max_dim)?);
    }
    let cert = MatrixFactorizationCert::dense(n, u)?;
    let target = QuantumChannel::new(n, a.to_vec())?;
    let check = verify_matrix_factorization(&cert, &target, tol)?;
    if !check.verdict {
        return Err(Error::InvalidCertificate(format!(
            "spin factorization misses the channel by {:e}",
            check.max_error
        )));
    }
    Ok(cert)
}

/// Choi distance between the channels induced by two certificates.
pub fn induced_distance(a: &FactorizationCert, b: &FactorizationCert) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::Shape("certificates act on different algebras".into()));
    }
    Ok(induced_choi(a)?.matrix.frobenius_distance(&induced_choi(b)?.matrix))
}

/// Choi distance from `t` to the channel induced by a certificate.
pub fn distance_to_channel(cert: &FactorizationCert, t: &QuantumChannel) -> Result<f64> {
    let induced = induced_choi(cert)?.to_channel(KRAUS_RANK_CUTOFF)?;
    choi_distance(&induced, t)
}
