//! Factorizability certificates and their verifiers.
//!
//! Three kinds of certificate are supported:
//!
//! - [`RationalMixtureCert`]: `T ⊗ S_k = Σ c_i ad(u_i)` with positive rational `c_i`.
//! - [`MatrixFactorizationCert`]: a unitary `u ∈ M_n ⊗ M_k` with
//!   `T(x) = (id_n ⊗ τ_k)(u* (x ⊗ 1_k) u)`.
//! - [`DirectSumFactorizationCert`]: unitaries `u_i ∈ M_n ⊗ M_{k_i}` and rational weights
//!   `α_i`, inducing `T(x) = Σ α_i (id_n ⊗ τ_{k_i})(u_i* (x ⊗ 1_{k_i}) u_i)`.
//!
//! Verification runs over the matrix units `E_pq`, which by linearity is a complete test.

use num_complex::Complex64;

use crate::channels::{
    check_probability_vector, choi_distance, compress, depolarizing, mixture_channel,
    tensor_channels, ChoiMatrix, QuantumChannel,
};
use crate::linalg::{
    kron_with_limit, normalized_trace, partial_trace_right, unitarity_error, ComplexMatrix,
    Rational,
};
use crate::{Error, Limits, Result, KRAUS_RANK_CUTOFF};

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureTerm {
    pub coefficient: Rational,
    pub unitary: ComplexMatrix,
}

/// Witness that `T ⊗ S_k` is the rational convex combination `Σ c_i ad(u_i)` on `M_n ⊗ M_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMixtureCert {
    n: usize,
    k: usize,
    terms: Vec<MixtureTerm>,
}

impl RationalMixtureCert {
    pub fn new(n: usize, k: usize, terms: Vec<MixtureTerm>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::Shape("mixture certificate needs n, k ≥ 1".into()));
        }
        if terms.is_empty() {
            return Err(Error::Shape("mixture certificate has no terms".into()));
        }
        let dim = n.checked_mul(k).ok_or(Error::Overflow)?;
        for (i, t) in terms.iter().enumerate() {
            if t.unitary.rows() != dim || t.unitary.cols() != dim {
                return Err(Error::Shape(format!(
                    "term {i}: unitary is {}x{}, expected {dim}x{dim}",
                    t.unitary.rows(),
                    t.unitary.cols()
                )));
            }
        }
        Ok(RationalMixtureCert { n, k, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[MixtureTerm] {
        &self.terms
    }

    pub fn coefficients(&self) -> Vec<Rational> {
        self.terms.iter().map(|t| t.coefficient).collect()
    }

    pub fn unitaries(&self) -> Vec<ComplexMatrix> {
        self.terms.iter().map(|t| t.unitary.clone()).collect()
    }

    /// The mixture `Σ c_i ad(u_i)` on `M_{nk}`; fails on bad coefficients or non-unitary terms.
    pub fn mixture(&self, tol: f64) -> Result<QuantumChannel> {
        mixture_channel(&self.coefficients(), &self.unitaries(), tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatedBlock {
    pub unitary: ComplexMatrix,
    pub multiplicity: u64,
}

/// Unitary of a matrix-algebra factorization.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorizationUnitary {
    Dense(ComplexMatrix),
    /// `U = Σ_p u_{i(p)} ⊗ E_pp` in `M_n ⊗ M_{base_k} ⊗ M_L`, where block `i` fills
    /// `multiplicity_i` consecutive slots and `L = Σ multiplicity_i`. The slot factor is
    /// the innermost one.
    BlockRepeated {
        base_k: usize,
        blocks: Vec<RepeatedBlock>,
    },
}

impl FactorizationUnitary {
    fn slot_count(blocks: &[RepeatedBlock]) -> Result<u64> {
        blocks
            .iter()
            .try_fold(0u64, |acc, b| acc.checked_add(b.multiplicity))
            .ok_or(Error::Overflow)
    }
}

/// Exact factorization through `(M_n ⊗ M_k, τ_n ⊗ τ_k)` with `k = ancilla_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFactorizationCert {
    n: usize,
    ancilla_dim: usize,
    unitary: FactorizationUnitary,
}

impl MatrixFactorizationCert {
    pub fn new(n: usize, ancilla_dim: usize, unitary: FactorizationUnitary) -> Result<Self> {
        if n == 0 || ancilla_dim == 0 {
            return Err(Error::Shape("factorization needs n, ancilla_dim ≥ 1".into()));
        }
        match &unitary {
            FactorizationUnitary::Dense(u) => {
                let dim = n.checked_mul(ancilla_dim).ok_or(Error::Overflow)?;
                if u.rows() != dim || u.cols() != dim {
                    return Err(Error::Shape(format!(
                        "dense unitary is {}x{}, expected {dim}x{dim}",
                        u.rows(),
                        u.cols()
                    )));
                }
            }
            FactorizationUnitary::BlockRepeated { base_k, blocks } => {
                if blocks.is_empty() || *base_k == 0 {
                    return Err(Error::Shape("block-repeated unitary has no blocks".into()));
                }
                if blocks.iter().any(|b| b.multiplicity == 0) {
                    return Err(Error::Shape("block multiplicity must be positive".into()));
                }
                let slots = FactorizationUnitary::slot_count(blocks)?;
                let total = (*base_k as u64).checked_mul(slots).ok_or(Error::Overflow)?;
                if total != ancilla_dim as u64 {
                    return Err(Error::Shape(format!(
                        "block-repeated ancilla is {base_k}·{slots} = {total}, declared {ancilla_dim}"
                    )));
                }
                let dim = n * base_k;
                for (i, b) in blocks.iter().enumerate() {
                    if b.unitary.rows() != dim || b.unitary.cols() != dim {
                        return Err(Error::Shape(format!(
                            "block {i} is {}x{}, expected {dim}x{dim}",
                            b.unitary.rows(),
                            b.unitary.cols()
                        )));
                    }
                }
            }
        }
        Ok(MatrixFactorizationCert {
            n,
            ancilla_dim,
            unitary,
        })
    }

    pub fn dense(n: usize, u: ComplexMatrix) -> Result<Self> {
        let dim = u.square_dim()?;
        if n == 0 || dim % n != 0 {
            return Err(Error::Shape(format!("{dim}x{dim} unitary does not split over M_{n}")));
        }
        Self::new(n, dim / n, FactorizationUnitary::Dense(u))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn unitary(&self) -> &FactorizationUnitary {
        &self.unitary
    }

    /// Largest unitarity defect, computed blockwise for structured unitaries.
    pub fn unitarity_error(&self) -> Result<f64> {
        match &self.unitary {
            FactorizationUnitary::Dense(u) => unitarity_error(u),
            FactorizationUnitary::BlockRepeated { blocks, .. } => blocks
                .iter()
                .map(|b| unitarity_error(&b.unitary))
                .try_fold(0.0f64, |acc, e| e.map(|e| acc.max(e))),
        }
    }

    pub fn validate(&self, tol: f64) -> Result<f64> {
        let err = self.unitarity_error()?;
        if err > tol {
            return Err(Error::InvalidCertificate(format!(
                "factorization unitary is not unitary (error {err:e} > {tol:e})"
            )));
        }
        Ok(err)
    }

    /// Dense form of the unitary, subject to `limits.max_dim`.
    pub fn materialize(&self, limits: &Limits) -> Result<ComplexMatrix> {
        match &self.unitary {
            FactorizationUnitary::Dense(u) => Ok(u.clone()),
            FactorizationUnitary::BlockRepeated { base_k, blocks } => {
                let dim = self.n.saturating_mul(self.ancilla_dim);
                limits.check_dim(dim)?;
                let slots = self.ancilla_dim / base_k;
                let inner = self.n * base_k;
                let mut out = ComplexMatrix::zeros(dim, dim);
                let mut slot = 0usize;
                for b in blocks {
                    for _ in 0..b.multiplicity {
                        for a in 0..inner {
                            for c in 0..inner {
                                out[(a * slots + slot, c * slots + slot)] = b.unitary[(a, c)];
                            }
                        }
                        slot += 1;
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn to_dense(&self, limits: &Limits) -> Result<Self> {
        Self::new(
            self.n,
            self.ancilla_dim,
            FactorizationUnitary::Dense(self.materialize(limits)?),
        )
    }

    fn weighted_terms(&self) -> Vec<WeightedTerm<'_>> {
        match &self.unitary {
            FactorizationUnitary::Dense(u) => vec![WeightedTerm {
                weight: 1.0,
                unitary: u,
                ancilla: self.ancilla_dim,
            }],
            FactorizationUnitary::BlockRepeated { base_k, blocks } => {
                let slots = (self.ancilla_dim / base_k) as f64;
                blocks
                    .iter()
                    .map(|b| WeightedTerm {
                        weight: b.multiplicity as f64 / slots,
                        unitary: &b.unitary,
                        ancilla: *base_k,
                    })
                    .collect()
            }
        }
    }

    /// The induced map `x ↦ (id_n ⊗ τ_k)(U* (x ⊗ 1_k) U)`, evaluated blockwise.
    pub fn induced_action(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        induced_action(self.n, &self.weighted_terms(), x)
    }
}

/// Finite-dimensional tracial space `(M_{k_1} ⊕ … ⊕ M_{k_d}, τ_α)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectSumSpace {
    sizes: Vec<usize>,
    weights: Vec<Rational>,
}

impl DirectSumSpace {
    pub fn new(sizes: Vec<usize>, weights: Vec<Rational>) -> Result<Self> {
        if sizes.is_empty() || sizes.len() != weights.len() {
            return Err(Error::Shape(format!(
                "{} sizes for {} weights",
                sizes.len(),
                weights.len()
            )));
        }
        if sizes.contains(&0) {
            return Err(Error::Shape("summand sizes must be positive".into()));
        }
        check_probability_vector(&weights)?;
        Ok(DirectSumSpace { sizes, weights })
    }

    /// `(M_k, τ_k)` as a one-summand space.
    pub fn matrix_algebra(k: usize) -> Result<Self> {
        Self::new(vec![k], vec![Rational::ONE])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn summands(&self) -> usize {
        self.sizes.len()
    }

    /// `τ_α(x_1, …, x_d) = Σ α_i τ_{k_i}(x_i)`.
    pub fn tau_alpha(&self, element: &[ComplexMatrix]) -> Result<Complex64> {
        if element.len() != self.sizes.len() {
            return Err(Error::Shape(format!(
                "element has {} blocks, space has {} summands",
                element.len(),
                self.sizes.len()
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for ((x, &k), w) in element.iter().zip(&self.sizes).zip(&self.weights) {
            if x.rows() != k || x.cols() != k {
                return Err(Error::Shape(format!(
                    "block is {}x{}, summand is M_{k}",
                    x.rows(),
                    x.cols()
                )));
            }
            acc += normalized_trace(x)? * w.to_f64();
        }
        Ok(acc)
    }
}

/// `τ_α(x_1, …, x_d)`.
pub fn tau_alpha(space: &DirectSumSpace, element: &[ComplexMatrix]) -> Result<Complex64> {
    space.tau_alpha(element)
}

/// Exact factorization through `(M_n ⊗ (M_{k_1} ⊕ … ⊕ M_{k_d}), τ_n ⊗ τ_α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectSumFactorizationCert {
    n: usize,
    space: DirectSumSpace,
    blocks: Vec<ComplexMatrix>,
}

impl DirectSumFactorizationCert {
    pub fn new(n: usize, space: DirectSumSpace, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("direct-sum certificate needs n ≥ 1".into()));
        }
        if blocks.len() != space.summands() {
            return Err(Error::Shape(format!(
                "{} blocks for {} summands",
                blocks.len(),
                space.summands()
            )));
        }
        for (i, (b, &k)) in blocks.iter().zip(space.sizes()).enumerate() {
            let dim = n.checked_mul(k).ok_or(Error::Overflow)?;
            if b.rows() != dim || b.cols() != dim {
                return Err(Error::Shape(format!(
                    "block {i} is {}x{}, expected {dim}x{dim}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        Ok(DirectSumFactorizationCert { n, space, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &DirectSumSpace {
        &self.space
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn unitarity_error(&self) -> Result<f64> {
        self.blocks
            .iter()
            .map(unitarity_error)
            .try_fold(0.0f64, |acc, e| e.map(|e| acc.max(e)))
    }

    pub fn validate(&self, tol: f64) -> Result<f64> {
        for (i, b) in self.blocks.iter().enumerate() {
            let err = unitarity_error(b)?;
            if err > tol {
                return Err(Error::InvalidCertificate(format!(
                    "block {i} is not unitary (error {err:e} > {tol:e})"
                )));
            }
        }
        self.unitarity_error()
    }

    fn weighted_terms(&self) -> Vec<WeightedTerm<'_>> {
        self.blocks
            .iter()
            .zip(self.space.sizes())
            .zip(self.space.weights())
            .map(|((u, &k), w)| WeightedTerm {
                weight: w.to_f64(),
                unitary: u,
                ancilla: k,
            })
            .collect()
    }

    /// `x ↦ Σ α_i (id_n ⊗ τ_{k_i})(u_i* (x ⊗ 1_{k_i}) u_i)`.
    pub fn induced_action(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        induced_action(self.n, &self.weighted_terms(), x)
    }
}

/// Either kind of exact-factorization certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorizationCert {
    Matrix(MatrixFactorizationCert),
    DirectSum(DirectSumFactorizationCert),
}

impl FactorizationCert {
    pub fn n(&self) -> usize {
        match self {
            FactorizationCert::Matrix(c) => c.n(),
            FactorizationCert::DirectSum(c) => c.n(),
        }
    }

    /// The tracial ancilla space; a matrix certificate lives over `(M_k, τ_k)`.
    pub fn space(&self) -> Result<DirectSumSpace> {
        match self {
            FactorizationCert::Matrix(c) => DirectSumSpace::matrix_algebra(c.ancilla_dim()),
            FactorizationCert::DirectSum(c) => Ok(c.space().clone()),
        }
    }

    pub fn induced_action(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        match self {
            FactorizationCert::Matrix(c) => c.induced_action(x),
            FactorizationCert::DirectSum(c) => c.induced_action(x),
        }
    }

    pub fn validate(&self, tol: f64) -> Result<f64> {
        match self {
            FactorizationCert::Matrix(c) => c.validate(tol),
            FactorizationCert::DirectSum(c) => c.validate(tol),
        }
    }

    pub fn induced_channel(&self, tol: f64) -> Result<QuantumChannel> {
        self.validate(tol)?;
        induced_channel_from_action(self.n(), |x| self.induced_action(x))
    }
}

struct WeightedTerm<'a> {
    weight: f64,
    unitary: &'a ComplexMatrix,
    ancilla: usize,
}

fn induced_action(n: usize, terms: &[WeightedTerm<'_>], x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.rows() != n || x.cols() != n {
        return Err(Error::Shape(format!(
            "induced map on M_{n} applied to a {}x{} matrix",
            x.rows(),
            x.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for term in terms {
        let lifted = kron_with_limit(x, &ComplexMatrix::identity(term.ancilla), usize::MAX)?;
        let conj = term.unitary.adjoint_mul(&(&lifted * term.unitary));
        let reduced = partial_trace_right(&conj, n, term.ancilla)?;
        out.add_scaled(Complex64::new(term.weight, 0.0), &reduced);
    }
    Ok(out)
}

fn induced_channel_from_action<F>(n: usize, action: F) -> Result<QuantumChannel>
where
    F: FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    ChoiMatrix::from_action(n, action)?.to_channel(KRAUS_RANK_CUTOFF)
}

/// Channel induced by a matrix-algebra factorization certificate, in a Choi-extracted
/// Kraus realization.
pub fn induced_channel_matrix(cert: &MatrixFactorizationCert, tol: f64) -> Result<QuantumChannel> {
    cert.validate(tol)?;
    induced_channel_from_action(cert.n(), |x| cert.induced_action(x))
}

/// Channel induced by a direct-sum factorization certificate.
pub fn induced_channel_direct_sum(cert: &DirectSumFactorizationCert, tol: f64) -> Result<QuantumChannel> {
    cert.validate(tol)?;
    induced_channel_from_action(cert.n(), |x| cert.induced_action(x))
}

/// Result of comparing a channel with the map induced by a factorization certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationReport {
    pub verdict: bool,
    pub unitarity_error: f64,
    /// Max over matrix units `E_pq` of `‖T(E_pq) − induced(E_pq)‖_F`.
    pub max_error: f64,
    /// Matrix unit attaining `max_error`.
    pub worst_index: (usize, usize),
    /// Set when the verdict is negative.
    pub failing_index: Option<(usize, usize)>,
    /// `‖choi(T) − choi(induced)‖_F`.
    pub choi_distance: f64,
    pub tol: f64,
}

fn compare_on_units<F>(t: &QuantumChannel, n: usize, mut action: F) -> Result<(f64, (usize, usize), f64)>
where
    F: FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    if t.dim() != n {
        return Err(Error::Shape(format!(
            "channel acts on M_{}, certificate on M_{n}",
            t.dim()
        )));
    }
    let mut max_error = 0.0f64;
    let mut worst = (0, 0);
    let mut sum_sq = 0.0;
    for p in 0..n {
        for q in 0..n {
            let e = ComplexMatrix::unit(n, p, q);
            let err = t.apply(&e)?.frobenius_distance(&action(&e)?);
            sum_sq += err * err;
            if err > max_error {
                max_error = err;
                worst = (p, q);
            }
        }
    }
    Ok((max_error, worst, sum_sq.sqrt()))
}

/// Checks `T(x) = (id_n ⊗ τ_k)(U* (x ⊗ 1_k) U)` on every matrix unit. The verdict
/// holds iff the largest matrix-unit error is at most `tol`. A non-unitary certificate
/// is an input error, not a refutation.
pub fn verify_matrix_factorization(
    cert: &MatrixFactorizationCert,
    t: &QuantumChannel,
    tol: f64,
) -> Result<FactorizationReport> {
    if t.dim() != cert.n() {
        return Err(Error::Shape(format!(
            "channel acts on M_{}, certificate on M_{}",
            t.dim(),
            cert.n()
        )));
    }
    let unitarity_error = cert.validate(tol)?;
    let (max_error, worst_index, choi_distance) = compare_on_units(t, cert.n(), |x| cert.induced_action(x))?;
    let verdict = max_error <= tol;
    Ok(FactorizationReport {
        verdict,
        unitarity_error,
        max_error,
        worst_index,
        failing_index: (!verdict).then_some(worst_index),
        choi_distance,
        tol,
    })
}

/// Checks a direct-sum factorization; the verdict holds iff the Choi distance between
/// `T` and the induced channel is at most `tol`.
pub fn verify_direct_sum_factorization(
    cert: &DirectSumFactorizationCert,
    t: &QuantumChannel,
    tol: f64,
) -> Result<FactorizationReport> {
    if t.dim() != cert.n() {
        return Err(Error::Shape(format!(
            "channel acts on M_{}, certificate on M_{}",
            t.dim(),
            cert.n()
        )));
    }
    let unitarity_error = cert.validate(tol)?;
    let (max_error, worst_index, choi_distance) = compare_on_units(t, cert.n(), |x| cert.induced_action(x))?;
    let verdict = choi_distance <= tol;
    Ok(FactorizationReport {
        verdict,
        unitarity_error,
        max_error,
        worst_index,
        failing_index: (!verdict).then_some(worst_index),
        choi_distance,
        tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureReport {
    pub verdict: bool,
    /// `‖choi(M) − choi(T ⊗ S_k)‖_F` for the mixture `M` and recovered `T`.
    pub distance: f64,
    pub tol: f64,
}

/// Checks that `M = Σ c_i ad(u_i)` really is of the form `T ⊗ S_k`: recovers
/// `T = (id_n ⊗ τ_k)(M(· ⊗ 1_k))` and compares `M` with `T ⊗ S_k`.
pub fn verify_mixture_cert(
    cert: &RationalMixtureCert,
    tol: f64,
    limits: &Limits,
) -> Result<(MixtureReport, QuantumChannel)> {
    let mixture = cert.mixture(tol)?;
    let recovered = compress(&mixture, cert.n(), cert.k())?;
    let product = tensor_channels(&recovered, &depolarizing(cert.k())?, limits)?;
    let distance = choi_distance(&mixture, &product)?;
    Ok((
        MixtureReport {
            verdict: distance <= tol,
            distance,
            tol,
        },
        recovered,
    ))
}
