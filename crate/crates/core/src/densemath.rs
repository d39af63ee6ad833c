//! Small dense complex matrices.
//!
//! Everything in this crate works on at most a dozen qubits, so operators are
//! stored as plain row-major `Vec<Complex64>` with no sparsity. Spectra are only
//! ever needed for Hermitian matrices (positivity checks and trace distances),
//! which go through nalgebra's Hermitian eigensolver.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default tolerance for Hermiticity, positivity and trace checks.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// Wire form: `[[[re, im], ...], ...]`, one inner list per row.
#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RawMatrix(Vec<Vec<[f64; 2]>>);

impl TryFrom<RawMatrix> for CMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        let rows = raw.0.len();
        let cols = raw.0.first().map_or(0, Vec::len);
        if raw.0.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        let data = raw.0.into_iter().flatten().map(|[re, im]| C64::new(re, im)).collect();
        CMatrix::new(rows, cols, data)
    }
}

impl From<CMatrix> for RawMatrix {
    fn from(m: CMatrix) -> Self {
        RawMatrix(m.data.chunks(m.cols).map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect())
    }
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix("matrix must have positive dimensions".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!("{} entries for a {}x{} matrix", data.len(), rows, cols)));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from literal rows. Panics on ragged or empty input.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let cols = rows[0].as_ref().len();
        let data: Vec<C64> = rows.iter().flat_map(|r| r.as_ref().to_vec()).collect();
        Self::new(rows.len(), cols, data).expect("well-formed literal matrix")
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect()).expect("well-formed real matrix")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * entries.len() + i] = z;
        }
        m
    }

    /// Column vector.
    pub fn ket(v: &[C64]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut data = Vec::with_capacity(u.len() * v.len());
        for a in u {
            for b in v {
                data.push(a * b.conj());
            }
        }
        Self { rows: u.len(), cols: v.len(), data }
    }

    /// `|i><j|` on a `dim`-dimensional space.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m.data[i * dim + j] = ONE;
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, z: C64) {
        self.data[r * self.cols + c] = z;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul: {}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c].conj();
            }
        }
        out
    }

    pub fn scale(&self, z: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * z).collect() }
    }

    pub fn scale_real(&self, x: f64) -> CMatrix {
        self.scale(C64::new(x, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// `self * rho * self^dag`.
    pub fn conjugate(&self, rho: &CMatrix) -> CMatrix {
        self.matmul(rho).matmul(&self.adjoint())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "max_abs_diff shape");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) <= tol
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `max |U^dag U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint().matmul(self).max_abs_diff(&CMatrix::identity(self.rows))
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        kron(self, other)
    }

    /// Eigenvalues (ascending) of the Hermitian part of a square matrix.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        assert!(self.is_square(), "eigenvalues of a non-square matrix");
        let n = self.rows;
        let m = DMatrix::from_fn(n, n, |r, c| (self.get(r, c) + self.get(c, r).conj()) * 0.5);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Qubit count if this is a square `2^n` matrix.
    pub fn qubit_count(&self) -> Option<usize> {
        (self.is_square() && self.rows.is_power_of_two()).then(|| self.rows.trailing_zeros() as usize)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self.get(r, c);
                write!(f, "{:>+9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product `a (x) b`; `a` carries the more significant index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = CMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a.get(ar, ac);
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out.set(ar * b.rows + br, ac * b.cols + bc, x * b.get(br, bc));
                }
            }
        }
    }
    out
}

/// Kronecker product of a list, left to right.
pub fn kron_all<'a>(ms: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    ms.into_iter().fold(CMatrix::identity(1), |acc, m| kron(&acc, m))
}

/// Reduces `m` onto the subsystems in `keep` (output ordered by ascending index).
pub fn partial_trace_matrix(m: &CMatrix, keep: &[usize], dims: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows != total {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {:?} (product {}) do not match a {}x{} matrix",
            dims, total, m.rows, m.cols
        )));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "kept subsystem {} out of range for {} subsystems",
            bad,
            dims.len()
        )));
    }
    let kept: Vec<bool> = (0..dims.len()).map(|i| keep.contains(&i)).collect();
    let out_dim: usize = keep.iter().map(|&k| dims[k]).product();

    // digit decomposition: for each full index, its kept index and traced index
    let split = |mut idx: usize| -> (usize, usize) {
        let (mut k_idx, mut k_mul, mut t_idx, mut t_mul) = (0, 1, 0, 1);
        for s in (0..dims.len()).rev() {
            let d = idx % dims[s];
            idx /= dims[s];
            if kept[s] {
                k_idx += d * k_mul;
                k_mul *= dims[s];
            } else {
                t_idx += d * t_mul;
                t_mul *= dims[s];
            }
        }
        (k_idx, t_idx)
    };
    let parts: Vec<(usize, usize)> = (0..total).map(split).collect();

    let mut out = CMatrix::zeros(out_dim, out_dim);
    for (r, &(kr, tr)) in parts.iter().enumerate() {
        for (c, &(kc, tc)) in parts.iter().enumerate() {
            if tr == tc {
                let z = out.get(kr, kc) + m.get(r, c);
                out.set(kr, kc, z);
            }
        }
    }
    Ok(out)
}

/// True iff `m` is Hermitian within `tol` and its smallest eigenvalue is `>= -tol`.
pub fn is_psd(m: &CMatrix, tol: f64) -> bool {
    if !m.is_hermitian(tol) {
        return false;
    }
    m.hermitian_eigenvalues().first().is_none_or(|&e| e >= -tol)
}

/// A (possibly unnormalized) density operator; its trace is a branch probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityOperator {
    mat: CMatrix,
    normalized: bool,
}

impl DensityOperator {
    /// A normalized state: Hermitian, PSD and unit trace within [`DEFAULT_TOL`].
    pub fn new(mat: CMatrix) -> Result<Self> {
        Self::checked(mat, true, DEFAULT_TOL)
    }

    /// A post-selected branch: Hermitian, PSD, trace in `[0, 1]` within [`DEFAULT_TOL`].
    pub fn branch(mat: CMatrix) -> Result<Self> {
        Self::checked(mat, false, DEFAULT_TOL)
    }

    pub fn checked(mat: CMatrix, normalized: bool, tol: f64) -> Result<Self> {
        if mat.qubit_count().is_none() {
            return Err(Error::InvalidState(format!("{}x{} is not a square 2^n matrix", mat.rows, mat.cols)));
        }
        let herm = mat.hermiticity_defect();
        if herm > tol {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:.3e})")));
        }
        let tr = mat.trace().re;
        if normalized && (tr - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        if !normalized && !(-tol..=1.0 + tol).contains(&tr) {
            return Err(Error::InvalidState(format!("branch trace {tr} outside [0, 1]")));
        }
        let min_ev = mat.hermitian_eigenvalues()[0];
        if min_ev < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_ev:.3e}")));
        }
        Ok(Self { mat, normalized })
    }

    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        Self::new(CMatrix::outer(amplitudes, amplitudes))
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let d = 1usize << qubits;
        Self { mat: CMatrix::identity(d).scale_real(1.0 / d as f64), normalized: true }
    }

    /// Wraps a matrix already known to satisfy the invariants.
    pub(crate) fn trusted(mat: CMatrix, normalized: bool) -> Self {
        debug_assert!(mat.is_hermitian(1e-8));
        Self { mat, normalized }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn num_qubits(&self) -> usize {
        self.mat.rows.trailing_zeros() as usize
    }

    /// Rescales to unit trace. Fails on a zero-probability branch.
    pub fn normalize(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= DEFAULT_TOL {
            return Err(Error::InvalidState("cannot normalize a zero-trace branch".into()));
        }
        Ok(Self { mat: self.mat.scale_real(1.0 / tr), normalized: true })
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator { mat: kron(&self.mat, &other.mat), normalized: self.normalized && other.normalized }
    }
}

/// Reduced state on the kept subsystems.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize], dims: &[usize]) -> Result<DensityOperator> {
    let m = partial_trace_matrix(&rho.mat, keep, dims)?;
    Ok(DensityOperator { mat: m, normalized: rho.normalized })
}

/// `1/2 * sum |eigenvalues(a - b)|`.
pub fn trace_distance_matrix(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.rows != b.rows || a.cols != b.cols || !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let diff = a - b;
    Ok(0.5 * diff.hermitian_eigenvalues().iter().map(|e| e.abs()).sum::<f64>())
}

pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    trace_distance_matrix(&a.mat, &b.mat)
}

/// Standard single-qubit matrices and states.
pub mod gates {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn id2() -> CMatrix {
        CMatrix::identity(2)
    }

    pub fn x() -> CMatrix {
        CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_rows(&[[ZERO, -I], [I, ZERO]])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
    }

    pub fn h() -> CMatrix {
        CMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0]).scale_real(FRAC_1_SQRT_2)
    }

    /// `X^a Z^b`.
    pub fn xz_power(a: u8, b: u8) -> CMatrix {
        let mut m = id2();
        if a & 1 == 1 {
            m = x();
        }
        if b & 1 == 1 {
            m = m.matmul(&z());
        }
        m
    }

    /// `e^{-i theta Z / 2}`.
    pub fn rz(theta: f64) -> CMatrix {
        CMatrix::diag(&[C64::from_polar(1.0, -theta / 2.0), C64::from_polar(1.0, theta / 2.0)])
    }

    /// `|k><k|`.
    pub fn proj(k: u8) -> CMatrix {
        CMatrix::unit(2, k as usize, k as usize)
    }

    pub fn cz() -> CMatrix {
        CMatrix::diag(&[ONE, ONE, ONE, -ONE])
    }

    pub fn ket0() -> [C64; 2] {
        [ONE, ZERO]
    }

    pub fn ket1() -> [C64; 2] {
        [ZERO, ONE]
    }

    pub fn plus() -> [C64; 2] {
        [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)]
    }

    pub fn minus() -> [C64; 2] {
        [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)]
    }

    pub fn plus_state() -> DensityOperator {
        DensityOperator::trusted(CMatrix::outer(&plus(), &plus()), true)
    }

    pub fn zero_state() -> DensityOperator {
        DensityOperator::trusted(proj(0), true)
    }

    /// `|B_ij> = (I (x) X^i Z^j)(|00> + |11>)/sqrt 2`.
    pub fn bell(i: u8, j: u8) -> [C64; 4] {
        let phi = [C64::new(FRAC_1_SQRT_2, 0.0), ZERO, ZERO, C64::new(FRAC_1_SQRT_2, 0.0)];
        let op = kron(&id2(), &xz_power(i, j));
        let mut out = [ZERO; 4];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|k| op.get(r, k) * phi[k]).sum();
        }
        out
    }

    /// Equatorial measurement vector `e^{-i phi Z/2} Z^k |+>`.
    pub fn equatorial(phi: f64, k: u8) -> [C64; 2] {
        let p = plus();
        let s = if k & 1 == 1 { -1.0 } else { 1.0 };
        [p[0] * C64::from_polar(1.0, -phi / 2.0), p[1] * s * C64::from_polar(1.0, phi / 2.0)]
    }
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;
    use proptest::prelude::*;

    fn random_matrix(rows: usize, cols: usize, seed: &[f64]) -> CMatrix {
        let data =
            (0..rows * cols).map(|i| C64::new(seed[(2 * i) % seed.len()], seed[(2 * i + 1) % seed.len()])).collect();
        CMatrix::new(rows, cols, data).unwrap()
    }

    fn random_psd(dim: usize, seed: &[f64]) -> CMatrix {
        let a = random_matrix(dim, dim, seed);
        a.matmul(&a.adjoint())
    }

    #[test]
    fn kron_identities() {
        assert!(kron(&id2(), &id2()).approx_eq(&CMatrix::identity(4), 0.0));
    }

    #[test]
    fn kron_x_z_by_hand() {
        let expected = CMatrix::from_real(
            4,
            4,
            &[
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, -1.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, -1.0, 0.0, 0.0,
            ],
        );
        assert!(kron(&x(), &z()).approx_eq(&expected, 0.0));
    }

    #[test]
    fn kron_projector_is_block_diag() {
        let k = kron(&proj(0), &h());
        let mut expected = CMatrix::zeros(4, 4);
        for r in 0..2 {
            for c in 0..2 {
                expected.set(r, c, h().get(r, c));
            }
        }
        assert!(k.approx_eq(&expected, 0.0));
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let b = DensityOperator::pure(&bell(0, 0)).unwrap();
        let r = partial_trace(&b, &[0], &[2, 2]).unwrap();
        assert!(r.matrix().approx_eq(&id2().scale_real(0.5), 1e-15));
    }

    #[test]
    fn partial_trace_of_cz_dephases_input() {
        let rho = CMatrix::from_rows(&[[c(0.7, 0.0), c(0.2, -0.3)], [c(0.2, 0.3), c(0.3, 0.0)]]);
        let joint = kron(&rho, plus_state().matrix());
        let after = cz().conjugate(&joint);
        let reduced = partial_trace_matrix(&after, &[0], &[2, 2]).unwrap();
        let dephased = CMatrix::diag(&[c(0.7, 0.0), c(0.3, 0.0)]);
        assert!(reduced.approx_eq(&dephased, 1e-15));
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let m = CMatrix::identity(4);
        assert!(matches!(partial_trace_matrix(&m, &[0], &[2, 3]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn partial_trace_middle_of_three() {
        let a = random_psd(2, &[0.1, 0.5, -0.3, 0.9, 0.2]);
        let b = random_psd(3, &[0.7, -0.2, 0.4, 0.1, 0.3, 0.8, -0.5]);
        let cc = random_psd(2, &[0.3, 0.3, -0.6, 0.1]);
        let m = kron_all([&a, &b, &cc]);
        let r = partial_trace_matrix(&m, &[0, 2], &[2, 3, 2]).unwrap();
        assert!(r.approx_eq(&kron(&a, &cc).scale(b.trace()), 1e-12));
    }

    #[test]
    fn trace_distance_examples() {
        let zero = zero_state();
        let one = DensityOperator::pure(&ket1()).unwrap();
        let mixed = DensityOperator::maximally_mixed(1);
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance(&zero, &mixed).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&id2(), DEFAULT_TOL));
        assert!(!is_psd(&z(), DEFAULT_TOL));
        assert!(is_psd(plus_state().matrix(), DEFAULT_TOL));
        assert!(!is_psd(&x().matmul(&z()), DEFAULT_TOL));
    }

    #[test]
    fn density_operator_rejects_bad_input() {
        assert!(DensityOperator::new(z()).is_err());
        assert!(DensityOperator::new(id2()).is_err());
        assert!(DensityOperator::branch(id2().scale_real(0.25)).is_ok());
        assert!(DensityOperator::new(CMatrix::identity(3).scale_real(1.0 / 3.0)).is_err());
        assert!(CMatrix::new(1, 1, vec![C64::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn bell_states_are_orthonormal() {
        for a in 0..4u8 {
            for b in 0..4u8 {
                let u = bell(a >> 1, a & 1);
                let v = bell(b >> 1, b & 1);
                let ip: C64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn serde_roundtrip() {
        let m = y().scale(c(0.5, 0.25));
        let text = serde_json::to_string(&m).unwrap();
        let back: CMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
        assert!(serde_json::from_str::<CMatrix>("[[[1,0]],[[1,0],[0,0]]]").is_err());
    }

    fn arb_entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1.0f64..1.0, n)
    }

    proptest! {
        #[test]
        fn kron_mixed_product(s in arb_entries(32)) {
            let a = random_matrix(2, 2, &s[0..8]);
            let b = random_matrix(2, 2, &s[8..16]);
            let cc = random_matrix(2, 2, &s[16..24]);
            let d = random_matrix(2, 2, &s[24..32]);
            let lhs = kron(&a, &b).matmul(&kron(&cc, &d));
            let rhs = kron(&a.matmul(&cc), &b.matmul(&d));
            prop_assert!(lhs.approx_eq(&rhs, 1e-12));
            let assoc_l = kron(&kron(&a, &b), &cc);
            let assoc_r = kron(&a, &kron(&b, &cc));
            prop_assert!(assoc_l.approx_eq(&assoc_r, 1e-14));
            let bil = kron(&(&a + &b), &cc);
            prop_assert!(bil.approx_eq(&(&kron(&a, &cc) + &kron(&b, &cc)), 1e-13));
        }

        #[test]
        fn partial_trace_of_product(s in arb_entries(24)) {
            let a = random_psd(2, &s[0..8]);
            let b = random_psd(4, &s[8..24]);
            let r = partial_trace_matrix(&kron(&a, &b), &[0], &[2, 4]).unwrap();
            prop_assert!(r.approx_eq(&a.scale(b.trace()), 1e-12));
        }

        #[test]
        fn trace_distance_triangle(s in arb_entries(24)) {
            let norm = |m: CMatrix| { let t = m.trace(); m.scale(C64::new(1.0, 0.0) / t) };
            let a = norm(&random_psd(2, &s[0..8]) + &CMatrix::identity(2).scale_real(1e-3));
            let b = norm(&random_psd(2, &s[8..16]) + &CMatrix::identity(2).scale_real(1e-3));
            let cc = norm(&random_psd(2, &s[16..24]) + &CMatrix::identity(2).scale_real(1e-3));
            let ab = trace_distance_matrix(&a, &b).unwrap();
            let bc = trace_distance_matrix(&b, &cc).unwrap();
            let ac = trace_distance_matrix(&a, &cc).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert!((ab - trace_distance_matrix(&b, &a).unwrap()).abs() < 1e-12);
        }
    }
}
