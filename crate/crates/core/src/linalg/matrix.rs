use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Limits, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        let expected = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Shape(format!("{rows}x{cols} overflows")))?;
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {expected} entries, got {}",
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Standard matrix unit `E_ij` in `M_n` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// Side length of a square matrix, or a shape error.
    pub fn square_dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self += c * other`; shapes must agree.
    pub fn add_scaled(&mut self, c: Complex64, other: &ComplexMatrix) {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "add_scaled: shape mismatch"
        );
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn try_matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[l * other.cols..(l + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self* · other` without forming the adjoint.
    pub fn adjoint_mul(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "adjoint_mul: shape mismatch");
        let mut out = Self::zeros(self.cols, other.cols);
        for l in 0..self.rows {
            let b_row = &other.data[l * other.cols..(l + 1) * other.cols];
            for i in 0..self.cols {
                let a = self.data[l * self.cols + i].conj();
                if a == ZERO {
                    continue;
                }
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖self − other‖_F`; shapes must agree.
    pub fn frobenius_distance(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "frobenius_distance: shape mismatch"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn trace(&self) -> Result<Complex64> {
        let n = self.square_dim()?;
        Ok((0..n).map(|i| self[(i, i)]).sum())
    }

    /// `‖a − a*‖_F`.
    pub fn hermiticity_error(&self) -> Result<f64> {
        let n = self.square_dim()?;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Matrix product. Panics on a shape mismatch; use [`ComplexMatrix::try_matmul`]
/// for untrusted shapes.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(ONE, rhs);
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(-ONE, rhs);
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product under the default dimension bound.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_limit(a, b, Limits::default().max_dim)
}

/// Kronecker product `a ⊗ b`. The left factor carries the coarse (outer) block index:
/// entry `(i·b.rows + r, j·b.cols + s)` equals `a[i,j]·b[r,s]`.
pub fn kron_with_limit(a: &ComplexMatrix, b: &ComplexMatrix, max_dim: usize) -> Result<ComplexMatrix> {
    let rows = checked_dim(a.rows, b.rows, max_dim)?;
    let cols = checked_dim(a.cols, b.cols, max_dim)?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for r in 0..b.rows {
                let row = i * b.rows + r;
                let dst = &mut out.data[row * cols + j * b.cols..row * cols + (j + 1) * b.cols];
                for (d, &v) in dst.iter_mut().zip(&b.data[r * b.cols..(r + 1) * b.cols]) {
                    *d = s * v;
                }
            }
        }
    }
    Ok(out)
}

fn checked_dim(a: usize, b: usize, max_dim: usize) -> Result<usize> {
    match a.checked_mul(b) {
        Some(d) if d <= max_dim => Ok(d),
        Some(d) => Err(Error::DimensionLimit { dim: d, max: max_dim }),
        None => Err(Error::DimensionLimit {
            dim: usize::MAX,
            max: max_dim,
        }),
    }
}

/// Block-diagonal matrix with the given square blocks in order.
pub fn direct_sum(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let mut total = 0usize;
    for b in blocks {
        total += b.square_dim()?;
    }
    let mut out = ComplexMatrix::zeros(total, total);
    let mut off = 0;
    for b in blocks {
        let d = b.rows;
        for i in 0..d {
            for j in 0..d {
                out[(off + i, off + j)] = b[(i, j)];
            }
        }
        off += d;
    }
    Ok(out)
}

/// `diag(a, …, a)` with `m` copies; equals `kron(1_m, a)`.
pub fn block_repeat(a: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
    a.square_dim()?;
    if m == 0 {
        return Err(Error::Domain("block_repeat needs at least one copy".into()));
    }
    kron(&ComplexMatrix::identity(m), a)
}

/// `τ_n(a) = tr(a) / n`.
pub fn normalized_trace(a: &ComplexMatrix) -> Result<Complex64> {
    let n = a.square_dim()?;
    if n == 0 {
        return Err(Error::Shape("normalized trace of an empty matrix".into()));
    }
    Ok(a.trace()? / n as f64)
}

/// `(id_n ⊗ τ_k)(a)` for `a ∈ M_n ⊗ M_k`: averages the diagonal of each inner `k×k` block.
pub fn partial_trace_right(a: &ComplexMatrix, n: usize, k: usize) -> Result<ComplexMatrix> {
    let dim = a.square_dim()?;
    if k == 0 || n.checked_mul(k) != Some(dim) {
        return Err(Error::Shape(format!(
            "cannot trace out M_{k} from a {dim}x{dim} matrix with outer dimension {n}"
        )));
    }
    let inv = 1.0 / k as f64;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let s: Complex64 = (0..k).map(|s| a[(i * k + s, j * k + s)]).sum();
        s * inv
    }))
}

/// `max(‖a*a − 1‖_F, ‖aa* − 1‖_F)`.
pub fn unitarity_error(a: &ComplexMatrix) -> Result<f64> {
    let n = a.square_dim()?;
    let id = ComplexMatrix::identity(n);
    let left = a.adjoint_mul(a).frobenius_distance(&id);
    let right = (a * &a.adjoint()).frobenius_distance(&id);
    Ok(left.max(right))
}

pub fn is_unitary(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(unitarity_error(a)? <= tol)
}

/// True iff `a` is Hermitian within `tol` (Frobenius) and its spectrum is bounded below
/// by `−tol`. The spectral test is a Cholesky factorization of `a + tol·1`.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    if a.hermiticity_error()? > tol {
        return Ok(false);
    }
    let n = a.rows;
    let mut shifted = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    for i in 0..n {
        shifted[(i, i)] += tol;
    }
    Ok(cholesky_in_place(&mut shifted))
}

/// Lower Cholesky factorization in place; false when a pivot is not strictly positive.
fn cholesky_in_place(m: &mut ComplexMatrix) -> bool {
    let n = m.rows;
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= m[(j, k)].norm_sqr();
        }
        if !d.is_finite() || d <= 0.0 {
            return false;
        }
        let ljj = d.sqrt();
        m[(j, j)] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= m[(i, k)] * m[(j, k)].conj();
            }
            m[(i, j)] = s / ljj;
        }
    }
    true
}

/// Gram vectors of a positive semidefinite matrix: returns `v_1..v_r` with
/// `a ≈ Σ v_i v_i*`, stopping once every remaining pivot is at most `cutoff`.
/// Diagonally pivoted outer-product Cholesky.
pub fn gram_vectors(a: &ComplexMatrix, cutoff: f64) -> Result<Vec<Vec<Complex64>>> {
    let n = a.square_dim()?;
    let mut residual = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    let mut used = vec![false; n];
    let mut out = Vec::new();
    loop {
        let pivot = (0..n)
            .filter(|&i| !used[i])
            .max_by(|&i, &j| residual[(i, i)].re.total_cmp(&residual[(j, j)].re));
        let Some(p) = pivot else { break };
        let d = residual[(p, p)].re;
        if d.is_nan() || d <= cutoff {
            break;
        }
        used[p] = true;
        let scale = 1.0 / d.sqrt();
        let v: Vec<Complex64> = (0..n).map(|i| residual[(i, p)] * scale).collect();
        for i in 0..n {
            if v[i] == ZERO {
                continue;
            }
            for j in 0..n {
                let t = v[i] * v[j].conj();
                residual[(i, j)] -= t;
            }
        }
        out.push(v);
    }
    Ok(out)
}
