//! Quantum channels in Kraus form and their Choi matrices.
//!
//! Kraus convention: `T(x) = Σ_i a_i* x a_i`. Under it `T` is unital iff
//! `Σ a_i* a_i = 1` and trace-preserving iff `Σ a_i a_i* = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::{
    gram_vectors, is_psd, kron_with_limit, partial_trace_right, unitarity_error, ComplexMatrix,
    Rational,
};
use crate::{Error, Limits, Result, KRAUS_RANK_CUTOFF};

/// A linear map on `M_dim` given by a Kraus family.
///
/// Equality compares the Kraus families, not the maps they induce; use
/// [`channels_equal`] for the latter.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
    validated: bool,
}

impl PartialEq for QuantumChannel {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.kraus == other.kraus
    }
}

/// Outcome of checking complete positivity, unitality and trace preservation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelCheck {
    pub completely_positive: bool,
    /// `‖Σ a_i* a_i − 1‖_F`
    pub unital_error: f64,
    /// `‖Σ a_i a_i* − 1‖_F`
    pub trace_error: f64,
    pub tol: f64,
}

impl ChannelCheck {
    pub fn max_error(&self) -> f64 {
        self.unital_error.max(self.trace_error)
    }

    pub fn verdict(&self) -> bool {
        self.completely_positive && self.unital_error <= self.tol && self.trace_error <= self.tol
    }
}

impl QuantumChannel {
    /// Builds an unvalidated channel; only shapes are checked.
    pub fn new(dim: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("channel dimension must be positive".into()));
        }
        if kraus.is_empty() {
            return Err(Error::Shape("empty Kraus family".into()));
        }
        for (i, a) in kraus.iter().enumerate() {
            if a.rows() != dim || a.cols() != dim {
                return Err(Error::Shape(format!(
                    "Kraus operator {i} is {}x{}, expected {dim}x{dim}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(QuantumChannel {
            dim,
            kraus,
            validated: false,
        })
    }

    pub fn identity(dim: usize) -> Self {
        QuantumChannel {
            dim,
            kraus: vec![ComplexMatrix::identity(dim)],
            validated: true,
        }
    }

    /// Checks the channel conditions at `tol` and marks the channel validated.
    pub fn validated(mut self, tol: f64) -> Result<Self> {
        let check = self.check(tol);
        if !check.verdict() {
            return Err(Error::Precondition(format!(
                "not a unital CPTP map at tol {tol:e} (CP: {}, unital error {:e}, trace error {:e})",
                check.completely_positive, check.unital_error, check.trace_error
            )));
        }
        self.validated = true;
        Ok(self)
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(Error::Shape(format!(
                "channel on M_{} applied to a {}x{} matrix",
                self.dim,
                x.rows(),
                x.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            let xa = x * a;
            out.add_scaled(Complex64::new(1.0, 0.0), &a.adjoint_mul(&xa));
        }
        Ok(out)
    }

    /// `Σ_ij E_ij ⊗ T(E_ij)`, assembled from the Kraus vectors
    /// `v[i·n + r] = conj(a[i, r])` as `Σ v v*`.
    pub fn choi(&self) -> ChoiMatrix {
        let n = self.dim;
        let big = n * n;
        let mut m = ComplexMatrix::zeros(big, big);
        for a in &self.kraus {
            let v: Vec<Complex64> = a.data().iter().map(|z| z.conj()).collect();
            for (p, &vp) in v.iter().enumerate() {
                if vp == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (q, &vq) in v.iter().enumerate() {
                    m[(p, q)] += vp * vq.conj();
                }
            }
        }
        ChoiMatrix { dim: n, matrix: m }
    }

    pub fn check(&self, tol: f64) -> ChannelCheck {
        let id = ComplexMatrix::identity(self.dim);
        let mut left = ComplexMatrix::zeros(self.dim, self.dim);
        let mut right = ComplexMatrix::zeros(self.dim, self.dim);
        let one = Complex64::new(1.0, 0.0);
        for a in &self.kraus {
            left.add_scaled(one, &a.adjoint_mul(a));
            right.add_scaled(one, &(a * &a.adjoint()));
        }
        let completely_positive = is_psd(&self.choi().matrix, tol).unwrap_or(false);
        ChannelCheck {
            completely_positive,
            unital_error: left.frobenius_distance(&id),
            trace_error: right.frobenius_distance(&id),
            tol,
        }
    }

    pub fn is_cptp_unital(&self, tol: f64) -> bool {
        self.check(tol).verdict()
    }
}

/// Choi matrix of a linear map on `M_dim`, of size `dim² × dim²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub dim: usize,
    pub matrix: ComplexMatrix,
}

impl ChoiMatrix {
    /// Choi matrix of an arbitrary linear map given by its action on matrix units.
    pub fn from_action<F>(dim: usize, mut action: F) -> Result<Self>
    where
        F: FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
    {
        let big = dim * dim;
        let mut m = ComplexMatrix::zeros(big, big);
        for i in 0..dim {
            for j in 0..dim {
                let image = action(&ComplexMatrix::unit(dim, i, j))?;
                if image.rows() != dim || image.cols() != dim {
                    return Err(Error::Shape("map does not preserve the dimension".into()));
                }
                for r in 0..dim {
                    for s in 0..dim {
                        m[(i * dim + r, j * dim + s)] = image[(r, s)];
                    }
                }
            }
        }
        Ok(ChoiMatrix { dim, matrix: m })
    }

    /// Kraus realization from Gram vectors of the Choi matrix, dropping pivots below
    /// `cutoff`. The matrix must be positive semidefinite up to roundoff.
    pub fn to_channel(&self, cutoff: f64) -> Result<QuantumChannel> {
        let n = self.dim;
        let mut kraus: Vec<ComplexMatrix> = gram_vectors(&self.matrix, cutoff)?
            .into_iter()
            .map(|w| ComplexMatrix::from_fn(n, n, |i, r| w[i * n + r].conj()))
            .collect();
        if kraus.is_empty() {
            kraus.push(ComplexMatrix::zeros(n, n));
        }
        QuantumChannel::new(n, kraus)
    }
}

/// `ad(u)(x) = u* x u`.
pub fn ad_channel(u: &ComplexMatrix, tol: f64) -> Result<QuantumChannel> {
    let n = u.square_dim()?;
    let err = unitarity_error(u)?;
    if err > tol {
        return Err(Error::InvalidCertificate(format!(
            "matrix is not unitary (error {err:e} > {tol:e})"
        )));
    }
    let mut t = QuantumChannel::new(n, vec![u.clone()])?;
    t.validated = true;
    Ok(t)
}

/// Completely depolarizing channel `S_k(x) = τ_k(x) 1_k`, Kraus family `{E_ij / √k}`.
pub fn depolarizing(k: usize) -> Result<QuantumChannel> {
    if k == 0 {
        return Err(Error::Domain("depolarizing channel needs k ≥ 1".into()));
    }
    let s = 1.0 / (k as f64).sqrt();
    let mut kraus = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            kraus.push(ComplexMatrix::unit(k, i, j).scale_real(s));
        }
    }
    let mut t = QuantumChannel::new(k, kraus)?;
    t.validated = true;
    Ok(t)
}

/// Diagonal (completely dephasing) channel on `M_d`, Kraus family `{E_ii}`.
pub fn dephasing(d: usize) -> Result<QuantumChannel> {
    if d == 0 {
        return Err(Error::Domain("dephasing channel needs d ≥ 1".into()));
    }
    let mut t = QuantumChannel::new(d, (0..d).map(|i| ComplexMatrix::unit(d, i, i)).collect())?;
    t.validated = true;
    Ok(t)
}

/// `T ⊗ S` with Kraus family `{a_i ⊗ b_j}` on `M_{nm}`.
pub fn tensor_channels(t: &QuantumChannel, s: &QuantumChannel, limits: &Limits) -> Result<QuantumChannel> {
    let dim = t.dim.saturating_mul(s.dim);
    limits.check_dim(dim)?;
    let mut kraus = Vec::with_capacity(t.kraus.len() * s.kraus.len());
    for a in &t.kraus {
        for b in &s.kraus {
            kraus.push(kron_with_limit(a, b, limits.max_dim)?);
        }
    }
    let mut out = QuantumChannel::new(dim, kraus)?;
    out.validated = t.validated && s.validated;
    Ok(out)
}

/// `Σ c_i ad(u_i)` with Kraus family `{√c_i u_i}`.
pub fn mixture_channel(coeffs: &[Rational], unitaries: &[ComplexMatrix], tol: f64) -> Result<QuantumChannel> {
    if coeffs.len() != unitaries.len() || coeffs.is_empty() {
        return Err(Error::InvalidCertificate(format!(
            "{} coefficients for {} unitaries",
            coeffs.len(),
            unitaries.len()
        )));
    }
    check_probability_vector(coeffs)?;
    let n = unitaries[0].square_dim()?;
    let mut kraus = Vec::with_capacity(unitaries.len());
    for (i, (c, u)) in coeffs.iter().zip(unitaries).enumerate() {
        if u.rows() != n || u.cols() != n {
            return Err(Error::InvalidCertificate(format!(
                "unitary {i} has shape {}x{}, expected {n}x{n}",
                u.rows(),
                u.cols()
            )));
        }
        let err = unitarity_error(u)?;
        if err > tol {
            return Err(Error::InvalidCertificate(format!(
                "term {i} is not unitary (error {err:e} > {tol:e})"
            )));
        }
        kraus.push(u.scale_real(c.to_f64().sqrt()));
    }
    let mut t = QuantumChannel::new(n, kraus)?;
    t.validated = true;
    Ok(t)
}

/// Positive rationals summing to exactly one.
pub(crate) fn check_probability_vector(coeffs: &[Rational]) -> Result<()> {
    if let Some(c) = coeffs.iter().find(|c| !c.is_positive()) {
        return Err(Error::InvalidCertificate(format!(
            "coefficient {c} is not positive"
        )));
    }
    let total = Rational::checked_sum(coeffs)?;
    if total != Rational::ONE {
        return Err(Error::InvalidCertificate(format!(
            "coefficients sum to {total}, not 1"
        )));
    }
    Ok(())
}

/// Cyclic shift `X|j⟩ = |j+1 mod k⟩`.
pub fn weyl_shift(k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(k, k, |i, j| {
        if i == (j + 1) % k {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Clock `Z = diag(ω^0, …, ω^{k−1})`, `ω = e^{2πi/k}`.
pub fn weyl_clock(k: usize) -> ComplexMatrix {
    let phases: Vec<Complex64> = (0..k)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64))
        .collect();
    ComplexMatrix::diag(&phases)
}

/// `Z^power` computed from phases directly.
pub fn clock_power(k: usize, power: usize) -> ComplexMatrix {
    let phases: Vec<Complex64> = (0..k)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * ((j * power) % k) as f64 / k as f64))
        .collect();
    ComplexMatrix::diag(&phases)
}

/// Discrete Weyl witness for `S_k ∈ conv(Aut(M_k))`: coefficients `1/k²` and unitaries
/// `X^a Z^b` for `a, b ∈ {0..k−1}`, `a` outer.
pub fn weyl_mixture(k: usize) -> Result<(Vec<Rational>, Vec<ComplexMatrix>)> {
    if k == 0 {
        return Err(Error::Domain("Weyl mixture needs k ≥ 1".into()));
    }
    let kk = (k as i128) * (k as i128);
    let coeff = Rational::new(1, kk)?;
    let shift = weyl_shift(k);
    let mut unitaries = Vec::with_capacity(k * k);
    let mut shift_pow = ComplexMatrix::identity(k);
    for _a in 0..k {
        for b in 0..k {
            unitaries.push(&shift_pow * &clock_power(k, b));
        }
        shift_pow = &shift * &shift_pow;
    }
    Ok((vec![coeff; k * k], unitaries))
}

/// `‖choi(a) − choi(b)‖_F`.
pub fn choi_distance(a: &QuantumChannel, b: &QuantumChannel) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::Shape(format!(
            "channels act on M_{} and M_{}",
            a.dim, b.dim
        )));
    }
    Ok(a.choi().matrix.frobenius_distance(&b.choi().matrix))
}

pub fn channels_equal(a: &QuantumChannel, b: &QuantumChannel, tol: f64) -> Result<bool> {
    Ok(choi_distance(a, b)? <= tol)
}

/// `x ↦ (id_n ⊗ τ_k)(M(x ⊗ 1_k))` for a channel `M` on `M_{nk}`, returned in a Kraus
/// realization extracted from its Choi matrix.
pub fn compress(m: &QuantumChannel, n: usize, k: usize) -> Result<QuantumChannel> {
    if n == 0 || k == 0 || n.checked_mul(k) != Some(m.dim) {
        return Err(Error::Shape(format!(
            "channel on M_{} does not split as M_{n} ⊗ M_{k}",
            m.dim
        )));
    }
    let id_k = ComplexMatrix::identity(k);
    let choi = ChoiMatrix::from_action(n, |x| {
        let lifted = kron_with_limit(x, &id_k, usize::MAX)?;
        partial_trace_right(&m.apply(&lifted)?, n, k)
    })?;
    choi.to_channel(KRAUS_RANK_CUTOFF)
}
