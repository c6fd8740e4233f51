//! Truncated sequence-space arithmetic: seminorms, the Cesàro operator and
//! its relatives as lower-triangular kernels, and numerically safe complex
//! products.
//!
//! Indices are 1-based on the whole public surface. Lower-triangular
//! operators are exact on a truncation window; operators that read forward
//! (`C'`, `D`) flag the result with a tail caveat when the input's last entry
//! is nonzero, since the unseen coordinates beyond the window would then
//! contribute.
//!
//! Most operations exist twice: on complex doubles (this module's public
//! types) and generically over any [`Scalar`], which is how the exact
//! rational modes are driven.

use crate::weights::{WeightError, WeightFamily};
use crate::xreal::XReal;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use std::fmt::Write as _;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("truncation window must have N >= 1")]
    EmptyWindow,
    #[error("entry {index} is not finite")]
    NonFiniteEntry { index: usize },
    #[error("vector length {len} does not match window N={n}")]
    LengthMismatch { len: usize, n: usize },
    #[error("left shift needs a window of size >= 2")]
    ShiftOnUnitWindow,
    #[error("kernel entry ({i},{j}): {message}")]
    Entry { i: usize, j: usize, message: String },
    #[error("log-complex modulus {log_modulus} overflows f64 on conversion")]
    Overflow { log_modulus: f64 },
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("csv: {0}")]
    Csv(String),
}

// ---------------------------------------------------------------------------
// Windows and vectors

/// Finite section 1..=N of the index set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationWindow {
    n: usize,
}

impl TruncationWindow {
    pub fn new(n: usize) -> Result<TruncationWindow, KernelError> {
        if n == 0 {
            return Err(KernelError::EmptyWindow);
        }
        Ok(TruncationWindow { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distinct geometrically spaced indices from 1 to N inclusive.
    pub fn geometric_samples(&self, count: usize) -> Vec<usize> {
        geometric_samples(self.n, count)
    }
}

pub fn geometric_samples(n: usize, count: usize) -> Vec<usize> {
    if n == 1 {
        return vec![1];
    }
    let c = count.max(2);
    let ln_n = (n as f64).ln();
    let mut out = Vec::with_capacity(c);
    let mut last = 0usize;
    for k in 0..c {
        let x = (ln_n * k as f64 / (c - 1) as f64).exp().round() as usize;
        let x = x.clamp(1, n);
        if x > last {
            out.push(x);
            last = x;
        }
    }
    if *out.last().unwrap() != n {
        out.push(n);
    }
    out
}

/// A truncated element of the sequence space: complex entries `x_1..x_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceVector {
    window: TruncationWindow,
    entries: Vec<Complex64>,
    tail_caveat: bool,
}

impl SequenceVector {
    pub fn from_entries(entries: Vec<Complex64>) -> Result<SequenceVector, KernelError> {
        let window = TruncationWindow::new(entries.len())?;
        for (k, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(KernelError::NonFiniteEntry { index: k + 1 });
            }
        }
        Ok(SequenceVector { window, entries, tail_caveat: false })
    }

    pub fn from_real(entries: &[f64]) -> Result<SequenceVector, KernelError> {
        Self::from_entries(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero(window: TruncationWindow) -> SequenceVector {
        SequenceVector {
            window,
            entries: vec![Complex64::new(0.0, 0.0); window.len()],
            tail_caveat: false,
        }
    }

    /// Canonical basis vector `e_j`.
    pub fn basis(window: TruncationWindow, j: usize) -> Result<SequenceVector, KernelError> {
        if j < 1 || j > window.len() {
            return Err(KernelError::LengthMismatch { len: j, n: window.len() });
        }
        let mut v = SequenceVector::zero(window);
        v.entries[j - 1] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    /// The constant-one vector `𝟙`.
    pub fn ones(window: TruncationWindow) -> SequenceVector {
        SequenceVector {
            window,
            entries: vec![Complex64::new(1.0, 0.0); window.len()],
            tail_caveat: false,
        }
    }

    pub fn window(&self) -> TruncationWindow {
        self.window
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 1-based access.
    pub fn get(&self, i: usize) -> Complex64 {
        self.entries[i - 1]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Set when the last coordinates of the result depended on coordinates
    /// beyond the window.
    pub fn tail_caveat(&self) -> bool {
        self.tail_caveat
    }

    pub fn sub(&self, other: &SequenceVector) -> SequenceVector {
        assert_eq!(self.len(), other.len(), "window mismatch");
        SequenceVector {
            window: self.window,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
            tail_caveat: self.tail_caveat || other.tail_caveat,
        }
    }

    /// CSV with header `index,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,re,im\n");
        for (k, z) in self.entries.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", k + 1, z.re, z.im);
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<SequenceVector, KernelError> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("index")) {
                continue;
            }
            let mut parts = line.split(',');
            let idx: usize = parts
                .next()
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| KernelError::Csv(format!("line {}: bad index", lineno + 1)))?;
            let re: f64 = parts
                .next()
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| KernelError::Csv(format!("line {}: bad re", lineno + 1)))?;
            let im: f64 = parts
                .next()
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| KernelError::Csv(format!("line {}: bad im", lineno + 1)))?;
            if idx != entries.len() + 1 {
                return Err(KernelError::Csv(format!(
                    "line {}: expected index {}, got {idx}",
                    lineno + 1,
                    entries.len() + 1
                )));
            }
            entries.push(Complex64::new(re, im));
        }
        SequenceVector::from_entries(entries)
    }
}

// ---------------------------------------------------------------------------
// Generic scalar operations (shared by the float and exact paths)

/// Minimal field interface for the window operations.
pub trait Scalar:
    Clone
    + PartialEq
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_index(i: usize) -> Self;
    fn is_zero(&self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_index(i: usize) -> Self {
        i as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_index(i: usize) -> Self {
        Complex64::new(i as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_index(i: usize) -> Self {
        BigRational::from_integer(BigInt::from(i))
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

impl Scalar for num_complex::Complex<BigRational> {
    fn zero() -> Self {
        num_complex::Complex::new(Scalar::zero(), Scalar::zero())
    }
    fn one() -> Self {
        num_complex::Complex::new(Scalar::one(), Scalar::zero())
    }
    fn from_index(i: usize) -> Self {
        num_complex::Complex::new(Scalar::from_index(i), Scalar::zero())
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(&self.re) && Scalar::is_zero(&self.im)
    }
}

/// `(Cx)_i = (x_1 + … + x_i)/i`, single prefix-sum pass.
pub fn cesaro_apply_in<T: Scalar>(x: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(x.len());
    let mut prefix = T::zero();
    for (k, v) in x.iter().enumerate() {
        prefix = prefix + v.clone();
        out.push(prefix.clone() / T::from_index(k + 1));
    }
    out
}

/// `(C⁻¹y)_i = i·y_i − (i−1)·y_{i−1}` with `y_0 = 0`.
pub fn cesaro_inverse_in<T: Scalar>(y: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(y.len());
    let mut prev = T::zero();
    for (k, v) in y.iter().enumerate() {
        out.push(T::from_index(k + 1) * v.clone() - T::from_index(k) * prev.clone());
        prev = v.clone();
    }
    out
}

/// `(C′y)_i = Σ_{j=i}^{N} y_j/j`, reverse suffix-sum pass.
pub fn cesaro_dual_in<T: Scalar>(y: &[T]) -> Vec<T> {
    let n = y.len();
    let mut out = vec![T::zero(); n];
    let mut suffix = T::zero();
    for i in (0..n).rev() {
        suffix = suffix + y[i].clone() / T::from_index(i + 1);
        out[i] = suffix.clone();
    }
    out
}

/// `(Dx)_i = i·x_{i+1}` for `i < N`; the last entry is truncated to zero.
pub fn diff_in<T: Scalar>(x: &[T]) -> Vec<T> {
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    for i in 1..n {
        out.push(T::from_index(i) * x[i].clone());
    }
    out.push(T::zero());
    out
}

// ---------------------------------------------------------------------------
// Public float operations

/// Seminorm `p_n(x) = sup_i a_n(i)|x_i|` computed in log domain: the returned
/// value is `exp(max_i (log a_n(i) + log|x_i|))`.
pub fn seminorm(family: &WeightFamily, n: u32, x: &SequenceVector) -> Result<f64, KernelError> {
    Ok(seminorm_log(family, n, x)?.to_f64().exp())
}

/// The log of the seminorm as an extended-range real (`-inf` for zero).
pub fn seminorm_log(
    family: &WeightFamily,
    n: u32,
    x: &SequenceVector,
) -> Result<XReal, KernelError> {
    let mut best = XReal::NEG_INFINITY;
    for i in 1..=x.len() {
        let z = x.get(i);
        let modulus = z.norm();
        if modulus == 0.0 {
            continue;
        }
        let term = family.log_weight(n, i)?.add_f64(modulus.ln());
        if term > best {
            best = term;
        }
    }
    Ok(best)
}

pub fn cesaro_apply(x: &SequenceVector) -> SequenceVector {
    SequenceVector {
        window: x.window,
        entries: cesaro_apply_in(&x.entries),
        tail_caveat: x.tail_caveat,
    }
}

pub fn cesaro_inverse_apply(y: &SequenceVector) -> SequenceVector {
    SequenceVector {
        window: y.window,
        entries: cesaro_inverse_in(&y.entries),
        tail_caveat: y.tail_caveat,
    }
}

pub fn cesaro_dual_apply(y: &SequenceVector) -> SequenceVector {
    let caveat = !y.entries[y.len() - 1].is_zero();
    SequenceVector {
        window: y.window,
        entries: cesaro_dual_in(&y.entries),
        tail_caveat: y.tail_caveat || caveat,
    }
}

pub fn diff_apply(x: &SequenceVector) -> SequenceVector {
    let caveat = !x.entries[x.len() - 1].is_zero();
    SequenceVector {
        window: x.window,
        entries: diff_in(&x.entries),
        tail_caveat: x.tail_caveat || caveat,
    }
}

/// `S(x) = (x_2, x_3, …)`: the window shrinks by one.
pub fn shift_left(x: &SequenceVector) -> Result<SequenceVector, KernelError> {
    if x.len() == 1 {
        return Err(KernelError::ShiftOnUnitWindow);
    }
    Ok(SequenceVector {
        window: TruncationWindow::new(x.len() - 1)?,
        entries: x.entries[1..].to_vec(),
        tail_caveat: x.tail_caveat,
    })
}

// ---------------------------------------------------------------------------
// Triangular kernels and dense matrices

type EntryFn = Arc<dyn Fn(usize, usize) -> Result<Complex64, KernelError> + Send + Sync>;

/// Lazily evaluated lower-triangular infinite matrix.
#[derive(Clone)]
pub struct TriangularKernel {
    tag: String,
    entry: EntryFn,
}

impl TriangularKernel {
    /// Wraps an entry function; the upper triangle is forced to exact zero.
    pub fn new<F>(tag: &str, f: F) -> TriangularKernel
    where
        F: Fn(usize, usize) -> Result<Complex64, KernelError> + Send + Sync + 'static,
    {
        TriangularKernel { tag: tag.to_owned(), entry: Arc::new(f) }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn entry(&self, i: usize, j: usize) -> Result<Complex64, KernelError> {
        if j > i {
            return Ok(Complex64::new(0.0, 0.0));
        }
        (self.entry)(i, j)
    }

    pub fn identity() -> TriangularKernel {
        TriangularKernel::new("identity", |i, j| {
            Ok(if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
        })
    }

    /// The Cesàro operator: row `i` is `1/i` on columns `1..=i`.
    pub fn cesaro() -> TriangularKernel {
        TriangularKernel::new("cesaro", |i, _| Ok(Complex64::new(1.0 / i as f64, 0.0)))
    }

    /// Its two-band inverse: `i` on the diagonal, `-(i-1)` just below.
    pub fn cesaro_inverse() -> TriangularKernel {
        TriangularKernel::new("cesaro-inverse", |i, j| {
            Ok(if i == j {
                Complex64::new(i as f64, 0.0)
            } else if j + 1 == i {
                Complex64::new(-(j as f64), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            })
        })
    }

    /// Composition `(self ∘ other)(i,j) = Σ_{k=j}^{i} self(i,k)·other(k,j)`.
    pub fn compose(&self, other: &TriangularKernel) -> TriangularKernel {
        let a = self.entry.clone();
        let b = other.entry.clone();
        let tag = format!("{}∘{}", self.tag, other.tag);
        TriangularKernel::new(&tag, move |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in j..=i {
                if k > i || j > k {
                    continue;
                }
                acc += a(i, k)? * b(k, j)?;
            }
            Ok(acc)
        })
    }

    /// Materializes the window `1 ≤ j ≤ i ≤ N`; the upper triangle is exact 0.
    pub fn truncate(&self, window: TruncationWindow) -> Result<DenseMatrix, KernelError> {
        let n = window.len();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 1..=n {
            for j in 1..=i {
                data[(i - 1) * n + (j - 1)] = self.entry(i, j).map_err(|e| match e {
                    KernelError::Entry { .. } => e,
                    other => KernelError::Entry { i, j, message: other.to_string() },
                })?;
            }
        }
        Ok(DenseMatrix { n, data })
    }
}

/// Dense square complex matrix, row-major, 1-based accessors.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn identity(n: usize) -> DenseMatrix {
        let mut m = DenseMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] };
        for i in 1..=n {
            *m.get_mut(i, i) = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<DenseMatrix, KernelError> {
        let n = rows.len();
        if n == 0 {
            return Err(KernelError::EmptyWindow);
        }
        let mut data = Vec::with_capacity(n * n);
        for r in &rows {
            if r.len() != n {
                return Err(KernelError::LengthMismatch { len: r.len(), n });
            }
            data.extend_from_slice(r);
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i - 1) * self.n + (j - 1)]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[(i - 1) * self.n + (j - 1)]
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n, "size mismatch");
        let n = self.n;
        let mut out = DenseMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] };
        for i in 1..=n {
            for k in 1..=n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 1..=n {
                    *out.get_mut(i, j) += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (1..=self.n)
            .map(|i| (1..=self.n).map(|j| self.get(i, j) * x[j - 1]).sum())
            .collect()
    }

    /// Max entrywise deviation `|a_ij - b_ij|` scaled by the max modulus of `b`.
    pub fn max_rel_deviation(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        let scale = other
            .data
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max)
            / scale
    }

    /// CSV, row-major, with the size recorded in a leading comment line.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# N={}\n", self.n);
        for i in 1..=self.n {
            for j in 1..=self.n {
                if j > 1 {
                    s.push(',');
                }
                let z = self.get(i, j);
                if z.im == 0.0 {
                    let _ = write!(s, "{}", z.re);
                } else if z.im < 0.0 {
                    let _ = write!(s, "{}{}i", z.re, z.im);
                } else {
                    let _ = write!(s, "{}+{}i", z.re, z.im);
                }
            }
            s.push('\n');
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Log-domain complex values

/// A complex number represented by `log|z|` and `arg z ∈ (-π, π]`.
///
/// Products of many factors `1 - 1/(kλ)` accumulate here so that moduli far
/// below the `f64` underflow threshold survive until the final conversion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogComplex {
    pub log_modulus: f64,
    pub argument: f64,
}

fn wrap_angle(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut x = a % tau;
    if x <= -std::f64::consts::PI {
        x += tau;
    } else if x > std::f64::consts::PI {
        x -= tau;
    }
    x
}

impl LogComplex {
    pub fn one() -> LogComplex {
        LogComplex { log_modulus: 0.0, argument: 0.0 }
    }

    /// The exact zero (`log|z| = -inf`).
    pub fn zero() -> LogComplex {
        LogComplex { log_modulus: f64::NEG_INFINITY, argument: 0.0 }
    }

    pub fn from_complex(z: Complex64) -> LogComplex {
        if z.is_zero() {
            return LogComplex::zero();
        }
        LogComplex { log_modulus: z.norm().ln(), argument: wrap_angle(z.arg()) }
    }

    pub fn is_zero(&self) -> bool {
        self.log_modulus == f64::NEG_INFINITY
    }

    pub fn mul(&self, other: &LogComplex) -> LogComplex {
        if self.is_zero() || other.is_zero() {
            return LogComplex::zero();
        }
        LogComplex {
            log_modulus: self.log_modulus + other.log_modulus,
            argument: wrap_angle(self.argument + other.argument),
        }
    }

    pub fn recip(&self) -> LogComplex {
        LogComplex { log_modulus: -self.log_modulus, argument: wrap_angle(-self.argument) }
    }

    pub fn to_complex(&self) -> Result<Complex64, KernelError> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if self.log_modulus > 709.0 {
            return Err(KernelError::Overflow { log_modulus: self.log_modulus });
        }
        let m = self.log_modulus.exp();
        Ok(Complex64::new(m * self.argument.cos(), m * self.argument.sin()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{AlphaSeq, BuiltinFamily};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn vec_of(reals: &[f64]) -> SequenceVector {
        SequenceVector::from_real(reals).unwrap()
    }

    fn psf() -> WeightFamily {
        WeightFamily::builtin(BuiltinFamily::PowerSeriesFinite { alpha: AlphaSeq::Identity }).unwrap()
    }

    #[test]
    fn cesaro_prefix_averages() {
        let y = cesaro_apply(&vec_of(&[1.0, 2.0, 3.0]));
        assert_eq!(y.entries(), &[c(1.0, 0.0), c(1.5, 0.0), c(2.0, 0.0)]);
        // 𝟙 is a fixed point, exactly.
        let ones = SequenceVector::ones(TruncationWindow::new(64).unwrap());
        assert_eq!(cesaro_apply(&ones), ones);
        // e_1 maps to (1, 1/2, 1/3, 1/4).
        let e1 = SequenceVector::basis(TruncationWindow::new(4).unwrap(), 1).unwrap();
        let y = cesaro_apply(&e1);
        for i in 1..=4 {
            assert_eq!(y.get(i), c(1.0 / i as f64, 0.0));
        }
    }

    #[test]
    fn cesaro_inverse_formula() {
        assert_eq!(
            cesaro_inverse_apply(&vec_of(&[1.0, 1.5, 2.0])).entries(),
            &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]
        );
        assert_eq!(
            cesaro_inverse_apply(&vec_of(&[1.0, 2.0, 3.0])).entries(),
            &[c(1.0, 0.0), c(3.0, 0.0), c(5.0, 0.0)]
        );
        let ones = SequenceVector::ones(TruncationWindow::new(5).unwrap());
        assert_eq!(cesaro_inverse_apply(&ones), ones);
    }

    #[test]
    fn inverse_round_trip_float() {
        // <= 1e-12 relative error on a mildly adversarial vector, N = 1000.
        let n = 1000;
        let x: Vec<f64> = (1..=n).map(|i| ((i * 37 % 101) as f64 - 50.0) / 13.0).collect();
        let v = vec_of(&x);
        let rt = cesaro_inverse_apply(&cesaro_apply(&v));
        for i in 1..=n {
            let a = rt.get(i).re;
            let b = v.get(i).re;
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "i={i}: {a} vs {b}");
        }
    }

    #[test]
    fn dual_suffix_sums_and_caveat() {
        let w = TruncationWindow::new(4).unwrap();
        let e1 = SequenceVector::basis(w, 1).unwrap();
        let y = cesaro_dual_apply(&e1);
        assert_eq!(y.entries(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(!y.tail_caveat());

        let e2 = SequenceVector::basis(w, 2).unwrap();
        let y = cesaro_dual_apply(&e2);
        assert_eq!(y.entries(), &[c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);

        // (1,-1,0,0) is the eigenvector for 1/2: C'y = y/2.
        let y = cesaro_dual_apply(&vec_of(&[1.0, -1.0, 0.0, 0.0]));
        assert_eq!(y.entries(), &[c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);

        // Support touching the window edge sets the caveat.
        let full = SequenceVector::ones(w);
        assert!(cesaro_dual_apply(&full).tail_caveat());
    }

    #[test]
    fn diff_and_shift() {
        let w = TruncationWindow::new(4).unwrap();
        let d = diff_apply(&SequenceVector::ones(w));
        assert_eq!(d.entries(), &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(0.0, 0.0)]);
        assert!(d.tail_caveat());

        let e1 = SequenceVector::basis(w, 1).unwrap();
        let d = diff_apply(&e1);
        assert!(d.entries().iter().all(|z| z.is_zero()));
        assert!(!d.tail_caveat());

        assert_eq!(
            diff_apply(&vec_of(&[0.0, 1.0, 0.0, 0.0])).entries(),
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );

        let s = shift_left(&vec_of(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(s.entries(), &[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!(shift_left(&vec_of(&[1.0])).is_err());
    }

    #[test]
    fn seminorm_examples() {
        let f = psf();
        let w = TruncationWindow::new(10).unwrap();
        let e1 = SequenceVector::basis(w, 1).unwrap();
        let p = seminorm(&f, 1, &e1).unwrap();
        assert!((p - (-1.0f64).exp()).abs() < 1e-15);

        assert_eq!(seminorm(&f, 3, &SequenceVector::zero(w)).unwrap(), 0.0);

        let ones = SequenceVector::ones(TruncationWindow::new(50).unwrap());
        let p = seminorm(&f, 1, &ones).unwrap();
        assert!((p - (-1.0f64).exp()).abs() < 1e-15, "max at i=1");
    }

    #[test]
    fn truncate_kernels() {
        let w2 = TruncationWindow::new(2).unwrap();
        let m = TriangularKernel::cesaro().truncate(w2).unwrap();
        assert_eq!(m.get(1, 1), c(1.0, 0.0));
        assert_eq!(m.get(1, 2), c(0.0, 0.0));
        assert_eq!(m.get(2, 1), c(0.5, 0.0));
        assert_eq!(m.get(2, 2), c(0.5, 0.0));

        let w3 = TruncationWindow::new(3).unwrap();
        assert_eq!(TriangularKernel::identity().truncate(w3).unwrap(), DenseMatrix::identity(3));

        let inv = TriangularKernel::cesaro_inverse().truncate(w3).unwrap();
        let expect = DenseMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(-1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-2.0, 0.0), c(3.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(inv, expect);
    }

    #[test]
    fn truncation_commutes_with_composition() {
        // Lower-triangular kernels are window-closed.
        let cases = [
            (TriangularKernel::cesaro(), TriangularKernel::cesaro_inverse()),
            (TriangularKernel::cesaro(), TriangularKernel::cesaro()),
            (TriangularKernel::cesaro_inverse(), TriangularKernel::cesaro()),
        ];
        let w = TruncationWindow::new(30).unwrap();
        for (a, b) in cases {
            let composed = a.compose(&b).truncate(w).unwrap();
            let product = a.truncate(w).unwrap().mul(&b.truncate(w).unwrap());
            assert!(composed.max_rel_deviation(&product) <= 1e-12);
        }
    }

    #[test]
    fn power_bound_inequality_quick() {
        let f = psf();
        let x: Vec<f64> = (1..=128).map(|i| ((i * 83 % 47) as f64 - 23.0) / 24.0 + 1.1).collect();
        let v = vec_of(&x);
        let cx = cesaro_apply(&v);
        for n in 1..=5 {
            let a = seminorm(&f, n, &cx).unwrap();
            let b = seminorm(&f, n, &v).unwrap();
            assert!(a <= b * (1.0 + 1e-14), "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn log_complex_products_match_direct() {
        // k <= 200 factors (1 - 1/(jλ)); relative modulus error <= 1e-10.
        for lambda in [c(0.4, 0.3), c(2.0, 0.0), c(-0.7, 0.4)] {
            let mut direct = c(1.0, 0.0);
            let mut logp = LogComplex::one();
            for j in 1..=200 {
                let factor = c(1.0, 0.0) - c(1.0, 0.0) / (lambda * j as f64);
                direct *= factor;
                logp = logp.mul(&LogComplex::from_complex(factor));
            }
            if direct.norm() > 1e-290 && direct.norm() < 1e290 {
                let back = logp.to_complex().unwrap();
                assert!(
                    (back - direct).norm() <= 1e-10 * direct.norm(),
                    "λ={lambda}: {back} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn log_complex_overflow_is_reported() {
        let big = LogComplex { log_modulus: 800.0, argument: 0.0 };
        assert!(matches!(big.to_complex(), Err(KernelError::Overflow { .. })));
        assert_eq!(LogComplex::zero().to_complex().unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn csv_roundtrip() {
        let v = SequenceVector::from_entries(vec![c(1.5, 0.0), c(-2.0, 3.25), c(0.0, 0.0)]).unwrap();
        let csv = v.to_csv();
        assert!(csv.starts_with("index,re,im\n"));
        let back = SequenceVector::from_csv(&csv).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn degenerate_windows() {
        assert!(TruncationWindow::new(0).is_err());
        let w1 = TruncationWindow::new(1).unwrap();
        let v = SequenceVector::ones(w1);
        assert_eq!(cesaro_apply(&v).entries(), &[c(1.0, 0.0)]);
        assert_eq!(cesaro_inverse_apply(&v).entries(), &[c(1.0, 0.0)]);
    }

    #[test]
    fn geometric_sampling_covers_endpoints() {
        let s = geometric_samples(4096, 64);
        assert_eq!(*s.first().unwrap(), 1);
        assert_eq!(*s.last().unwrap(), 4096);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(geometric_samples(1, 10), vec![1]);
    }
}
