//! Deterministic linear-algebra kernels: cyclic shifts, circulant and
//! Toeplitz matrix-vector products (direct and FFT-based), the orthonormal
//! fast Walsh-Hadamard transform, coordinate restriction and sign flips.
//!
//! Index conventions: the written formulas are 1-based with addition mod `n`
//! mapping into `[1, n]`. Storage here is 0-based; the translation is
//! `entry(i, j) = gen[(j - i - 1) mod n]` for the circulant matrix whose
//! i-th row (1-based) is the shift `T^{n-i}` of its generator.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::fft;
use rustfft::num_complex::Complex;

/// A strictly increasing set of coordinate indices inside an ambient
/// dimension. Constructed 1-based (the convention of the formulas),
/// stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    indices: Vec<usize>, // 0-based, strictly increasing
    ambient_dim: usize,
}

impl IndexSet {
    /// Builds from 1-based indices in `[1, n]`.
    pub fn from_one_based(indices: &[usize], ambient_dim: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyInput("index set"));
        }
        let mut zero_based = Vec::with_capacity(indices.len());
        for &i in indices {
            if i == 0 || i > ambient_dim {
                return Err(Error::IndexOutOfRange { index: i, dim: ambient_dim });
            }
            zero_based.push(i - 1);
        }
        for w in zero_based.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidArgument(
                    "index set must be strictly increasing".into(),
                ));
            }
        }
        Ok(IndexSet { indices: zero_based, ambient_dim })
    }

    pub(crate) fn from_zero_based_sorted(indices: Vec<usize>, ambient_dim: usize) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.iter().all(|&i| i < ambient_dim));
        IndexSet { indices, ambient_dim }
    }

    /// The full set `[n]`.
    pub fn full(n: usize) -> Self {
        IndexSet { indices: (0..n).collect(), ambient_dim: n }
    }

    /// The first `m` indices `{1, ..., m}`.
    pub fn first_m(m: usize, ambient_dim: usize) -> Result<Self> {
        if m == 0 || m > ambient_dim {
            return Err(Error::InvalidArgument(format!(
                "first_m requires 1 <= m <= n, got m={m}, n={ambient_dim}"
            )));
        }
        Ok(IndexSet { indices: (0..m).collect(), ambient_dim })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// 0-based indices, strictly increasing.
    pub fn zero_based(&self) -> &[usize] {
        &self.indices
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }

    pub fn contains(&self, zero_based: usize) -> bool {
        self.indices.binary_search(&zero_based).is_ok()
    }
}

/// Generator of a circulant (length `n`) or Toeplitz (length `2n-1`)
/// operator of size `n x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantSpec {
    generator: Vec<f64>,
    mode: OperatorMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorMode {
    Circulant,
    Toeplitz,
}

impl CirculantSpec {
    pub fn circulant(generator: Vec<f64>) -> Result<Self> {
        if generator.is_empty() {
            return Err(Error::EmptyInput("circulant generator"));
        }
        check_finite(&generator)?;
        Ok(CirculantSpec { generator, mode: OperatorMode::Circulant })
    }

    /// Toeplitz generator of odd length `2n-1`, defining an `n x n` operator.
    pub fn toeplitz(generator: Vec<f64>) -> Result<Self> {
        if generator.is_empty() {
            return Err(Error::EmptyInput("toeplitz generator"));
        }
        if generator.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "toeplitz generator length must be odd (2n-1), got {}",
                generator.len()
            )));
        }
        check_finite(&generator)?;
        Ok(CirculantSpec { generator, mode: OperatorMode::Toeplitz })
    }

    pub fn generator(&self) -> &[f64] {
        &self.generator
    }

    pub fn mode(&self) -> OperatorMode {
        self.mode
    }

    /// Size of the square operator this spec defines.
    pub fn dim(&self) -> usize {
        match self.mode {
            OperatorMode::Circulant => self.generator.len(),
            OperatorMode::Toeplitz => self.generator.len().div_ceil(2),
        }
    }
}

fn check_finite(x: &[f64]) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("vector entry"));
    }
    Ok(())
}

/// Cyclic shift: `result_i = x_{i+k}` (1-based, indices mod n). Any integer
/// `k` is accepted and reduced mod n.
pub fn shift_apply(x: &[f64], k: i64) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::EmptyInput("shift_apply"));
    }
    let k = k.rem_euclid(n as i64) as usize;
    Ok((0..n).map(|i| x[(i + k) % n]).collect())
}

/// Entry `(i, j)` (0-based) of the circulant matrix generated by `gen`.
#[inline]
fn circulant_entry(gen: &[f64], i: usize, j: usize) -> f64 {
    let n = gen.len();
    gen[(j as i64 - i as i64 - 1).rem_euclid(n as i64) as usize]
}

/// Exact `O(n^2)` evaluation; serves as the oracle for the FFT path.
pub fn circulant_matvec_direct(spec: &CirculantSpec, y: &[f64]) -> Result<Vec<f64>> {
    let n = spec.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    let gen = spec.generator();
    // Both modes share the entry formula; the Toeplitz block reads the
    // (2n-1)-circulant at its upper-left n x n corner.
    Ok((0..n)
        .map(|i| (0..n).map(|j| circulant_entry(gen, i, j) * y[j]).sum())
        .collect())
}

/// FFT-based product in `O(n log n)` for arbitrary `n`.
///
/// The product `(C_x y)_i = sum_j x_{(j-i) mod n} y_j` is a circular
/// cross-correlation, evaluated as `IDFT(DFT(y) .* conj(DFT(u)))` with
/// `u_c = x_{(c-1) mod n}`.
pub fn circulant_matvec_fft(spec: &CirculantSpec, y: &[f64]) -> Result<Vec<f64>> {
    let n = spec.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    match spec.mode() {
        OperatorMode::Circulant => Ok(correlate(spec.generator(), y, n)),
        OperatorMode::Toeplitz => {
            // Upper-left n x n block of the (2n-1)-circulant: zero-pad y and
            // keep the first n outputs.
            let big = spec.generator().len();
            let mut padded = y.to_vec();
            padded.resize(big, 0.0);
            let mut out = correlate(spec.generator(), &padded, big);
            out.truncate(n);
            Ok(out)
        }
    }
}

fn correlate(gen: &[f64], y: &[f64], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![gen[0] * y[0]];
    }
    let mut u: Vec<Complex<f64>> = (0..n)
        .map(|c| Complex::new(gen[(c as i64 - 1).rem_euclid(n as i64) as usize], 0.0))
        .collect();
    let mut v = fft::to_complex(y);
    fft::forward(&mut u);
    fft::forward(&mut v);
    for (a, b) in v.iter_mut().zip(u.iter()) {
        *a *= b.conj();
    }
    fft::inverse(&mut v);
    v.into_iter().map(|c| c.re).collect()
}

/// Toeplitz product for a generator of length `2n-1`; `y` has length `n`.
pub fn toeplitz_matvec(spec: &CirculantSpec, y: &[f64]) -> Result<Vec<f64>> {
    if spec.mode() != OperatorMode::Toeplitz {
        return Err(Error::InvalidArgument("toeplitz_matvec requires a toeplitz spec".into()));
    }
    circulant_matvec_fft(spec, y)
}

/// Orthonormal Walsh-Hadamard transform, in place. Entries of the dense
/// transform are `±1/sqrt(n)`; the map is an involution and an isometry.
pub fn fwht_inplace(x: &mut [f64]) -> Result<()> {
    let n = x.len();
    if n == 0 {
        return Err(Error::EmptyInput("fwht"));
    }
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (x[j], x[j + h]);
                x[j] = a + b;
                x[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    for v in x.iter_mut() {
        *v *= scale;
    }
    Ok(())
}

pub fn fwht(x: &[f64]) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    fwht_inplace(&mut out)?;
    Ok(out)
}

/// Restriction `R_I x = (x_i)_{i in I}`, in increasing index order.
pub fn restrict(x: &[f64], index: &IndexSet) -> Result<Vec<f64>> {
    if index.ambient_dim() != x.len() {
        return Err(Error::DimensionMismatch { expected: index.ambient_dim(), got: x.len() });
    }
    Ok(index.zero_based().iter().map(|&i| x[i]).collect())
}

/// Entrywise product with a sign vector (the diagonal map `D_eps`).
pub fn sign_flip(x: &[f64], eps: &[f64]) -> Result<Vec<f64>> {
    if x.len() != eps.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: eps.len() });
    }
    if eps.iter().any(|&e| e != 1.0 && e != -1.0) {
        return Err(Error::InvalidArgument("sign vector entries must be +1 or -1".into()));
    }
    Ok(x.iter().zip(eps).map(|(a, b)| a * b).collect())
}

/// Dense materialization of a circulant/Toeplitz operator, built from the
/// entry formula directly (never from the FFT path), for use as an oracle.
pub fn to_dense(spec: &CirculantSpec) -> DenseMatrix {
    let n = spec.dim();
    DenseMatrix::from_fn(n, n, |i, j| circulant_entry(spec.generator(), i, j))
}

/// Dense orthonormal Hadamard matrix with entries `(-1)^{<i,j>} / sqrt(n)`,
/// where `<i,j>` is the parity of `i AND j` in binary. Independent of the
/// butterfly implementation in `fwht`.
pub fn hadamard_dense(n: usize) -> Result<DenseMatrix> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let scale = 1.0 / (n as f64).sqrt();
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        if (i & j).count_ones() % 2 == 0 {
            scale
        } else {
            -scale
        }
    }))
}
