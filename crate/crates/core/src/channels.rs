//! Kraus channels, Choi matrices and single-qubit Pauli-basis decompositions.
//!
//! Channels are compared through their Choi matrices only: two Kraus sets that
//! differ by an isometry on the Kraus index describe the same map, so Kraus
//! operators themselves are never compared directly.

use serde::{Deserialize, Serialize};

use crate::densemath::{gates, CMatrix, DensityOperator, C64, DEFAULT_TOL, I, ONE, ZERO};
use crate::error::{Error, Result};

/// Default tolerance for Choi-matrix channel equality.
pub const CHOI_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    /// `sum K^dag K = I`.
    TracePreserving,
    /// `sum K^dag K <= I`: a post-selected branch whose trace is a probability.
    TraceNonIncreasing,
    /// Any completely positive map. Produced by the noise-location mappings,
    /// whose modified channels only make sense composed with a block.
    CompletelyPositive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelWire", into = "ChannelWire")]
pub struct KrausChannel {
    ops: Vec<CMatrix>,
    kind: ChannelKind,
}

#[derive(Serialize, Deserialize)]
struct ChannelWire {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<ChannelKind>,
    ops: Vec<CMatrix>,
}

impl TryFrom<ChannelWire> for KrausChannel {
    type Error = Error;

    fn try_from(w: ChannelWire) -> Result<Self> {
        if let Some(op) = w.ops.iter().find(|op| op.rows() != w.dim || op.cols() != w.dim) {
            return Err(Error::DimensionMismatch(format!(
                "declared dim {} but found a {}x{} Kraus operator",
                w.dim,
                op.rows(),
                op.cols()
            )));
        }
        let ch = KrausChannel::validate(w.ops)?;
        match w.kind {
            Some(k) if k != ch.kind => {
                Err(Error::InvalidMatrix(format!("declared kind {:?} but operators are {:?}", k, ch.kind)))
            }
            _ => Ok(ch),
        }
    }
}

impl From<KrausChannel> for ChannelWire {
    fn from(ch: KrausChannel) -> Self {
        ChannelWire { dim: ch.dim(), kind: Some(ch.kind), ops: ch.ops }
    }
}

fn check_shapes(ops: &[CMatrix]) -> Result<usize> {
    let first = ops.first().ok_or(Error::EmptyChannel)?;
    let d = first.rows();
    for op in ops {
        if op.rows() != d || op.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators must all be {d}x{d}, found {}x{}",
                op.rows(),
                op.cols()
            )));
        }
    }
    Ok(d)
}

fn kraus_sum(ops: &[CMatrix]) -> CMatrix {
    let d = ops[0].rows();
    ops.iter().fold(CMatrix::zeros(d, d), |acc, k| &acc + &k.adjoint().matmul(k))
}

/// Classifies `ops` and returns the most negative eigenvalue of `I - sum K^dag K`.
fn classify(ops: &[CMatrix], tol: f64) -> (ChannelKind, f64) {
    let s = kraus_sum(ops);
    let d = s.rows();
    if s.max_abs_diff(&CMatrix::identity(d)) <= tol {
        return (ChannelKind::TracePreserving, 0.0);
    }
    let slack = &CMatrix::identity(d) - &s;
    let min_ev = slack.hermitian_eigenvalues()[0];
    if min_ev >= -tol {
        (ChannelKind::TraceNonIncreasing, min_ev)
    } else {
        (ChannelKind::CompletelyPositive, min_ev)
    }
}

impl KrausChannel {
    /// Accepts trace-preserving or trace-non-increasing Kraus sets.
    pub fn validate(ops: Vec<CMatrix>) -> Result<Self> {
        Self::validate_with_tol(ops, DEFAULT_TOL)
    }

    pub fn validate_with_tol(ops: Vec<CMatrix>, tol: f64) -> Result<Self> {
        check_shapes(&ops)?;
        match classify(&ops, tol) {
            (ChannelKind::CompletelyPositive, min_ev) => Err(Error::NotAChannel { excess: -min_ev }),
            (kind, _) => Ok(Self { ops, kind }),
        }
    }

    /// Accepts any Kraus set; the kind records whether it happens to be a channel.
    pub fn completely_positive(ops: Vec<CMatrix>) -> Result<Self> {
        check_shapes(&ops)?;
        let (kind, _) = classify(&ops, DEFAULT_TOL);
        Ok(Self { ops, kind })
    }

    pub fn identity(dim: usize) -> Self {
        Self { ops: vec![CMatrix::identity(dim)], kind: ChannelKind::TracePreserving }
    }

    /// Conjugation by a unitary.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        let defect = u.unitarity_defect();
        if defect > DEFAULT_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { ops: vec![u], kind: ChannelKind::TracePreserving })
    }

    /// Applies `u` with probability `p`.
    pub fn unitary_noise(p: f64, u: &CMatrix) -> Result<Self> {
        let id = CMatrix::identity(u.rows());
        Self::validate(vec![id.scale_real((1.0 - p).sqrt()), u.scale_real(p.sqrt())])
    }

    /// `{sqrt(1-p) I, sqrt(p) X}`.
    pub fn bit_flip(p: f64) -> Result<Self> {
        Self::unitary_noise(p, &gates::x())
    }

    /// `{sqrt(1-p) I, sqrt(p) Z}`.
    pub fn phase_flip(p: f64) -> Result<Self> {
        Self::unitary_noise(p, &gates::z())
    }

    /// Applies I, X, Y, Z with the given probabilities.
    pub fn pauli(probs: [f64; 4]) -> Result<Self> {
        let paulis = [gates::id2(), gates::x(), gates::y(), gates::z()];
        let ops = probs.iter().zip(paulis).filter(|(p, _)| **p > 0.0).map(|(p, s)| s.scale_real(p.sqrt())).collect();
        Self::validate(ops)
    }

    /// `{I, X, Y, Z} / 2`, mapping every qubit state to `I/2`.
    pub fn completely_depolarizing() -> Self {
        Self::pauli([0.25; 4]).expect("uniform Pauli mixture is a channel")
    }

    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        let k0 = CMatrix::diag(&[ONE, C64::new((1.0 - gamma).sqrt(), 0.0)]);
        let k1 = CMatrix::from_rows(&[[ZERO, C64::new(gamma.sqrt(), 0.0)], [ZERO, ZERO]]);
        Self::validate(vec![k0, k1])
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<CMatrix> {
        self.ops
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `sum K m K^dag` for an arbitrary operator `m`.
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let d = self.dim();
        self.ops.iter().fold(CMatrix::zeros(d, d), |acc, k| &acc + &k.conjugate(m))
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}-dimensional channel applied to a {}-dimensional state",
                self.dim(),
                rho.dim()
            )));
        }
        let out = self.apply_matrix(rho.matrix());
        let normalized = rho.is_normalized() && self.kind == ChannelKind::TracePreserving;
        DensityOperator::checked(out, normalized, DEFAULT_TOL)
    }

    /// `after . before`, with Kraus set `{A_i B_j}`.
    pub fn compose(after: &KrausChannel, before: &KrausChannel) -> Result<KrausChannel> {
        if after.dim() != before.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}-dimensional after {}-dimensional channel",
                after.dim(),
                before.dim()
            )));
        }
        let ops: Vec<CMatrix> = after.ops.iter().flat_map(|a| before.ops.iter().map(move |b| a.matmul(b))).collect();
        let kind = match (after.kind, before.kind) {
            (ChannelKind::TracePreserving, ChannelKind::TracePreserving) => ChannelKind::TracePreserving,
            (ChannelKind::CompletelyPositive, _) | (_, ChannelKind::CompletelyPositive) => {
                classify(&ops, DEFAULT_TOL).0
            }
            _ => ChannelKind::TraceNonIncreasing,
        };
        Ok(KrausChannel { ops, kind })
    }

    /// Composes a list applied first-to-last.
    pub fn sequence<'a>(channels: impl IntoIterator<Item = &'a KrausChannel>) -> Result<KrausChannel> {
        let mut it = channels.into_iter();
        let first = it.next().ok_or(Error::EmptyChannel)?.clone();
        it.try_fold(first, |acc, ch| KrausChannel::compose(ch, &acc))
    }

    /// Drops Kraus operators that are numerically zero.
    pub fn pruned(&self, tol: f64) -> KrausChannel {
        let ops: Vec<CMatrix> = self.ops.iter().filter(|k| k.max_abs() > tol).cloned().collect();
        if ops.is_empty() {
            let d = self.dim();
            return KrausChannel { ops: vec![CMatrix::zeros(d, d)], kind: self.kind };
        }
        KrausChannel { ops, kind: self.kind }
    }

    /// `sum_ij |i><j| (x) ch(|i><j|)`.
    pub fn choi(&self) -> ChoiMatrix {
        let d = self.dim();
        let mut c = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let block = self.apply_matrix(&CMatrix::unit(d, i, j));
                for r in 0..d {
                    for s in 0..d {
                        c.set(i * d + r, j * d + s, block.get(r, s));
                    }
                }
            }
        }
        ChoiMatrix { mat: c, dim: d }
    }

    /// Max-entry distance between Choi matrices.
    pub fn choi_distance(&self, other: &KrausChannel) -> f64 {
        self.choi().max_entry_diff(&other.choi())
    }

    pub fn choi_eq(&self, other: &KrausChannel, tol: f64) -> bool {
        self.dim() == other.dim() && self.choi_distance(other) <= tol
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiMatrix {
    mat: CMatrix,
    dim: usize,
}

impl ChoiMatrix {
    /// Assembles `sum_ij |i><j| (x) blocks[i][j]` from the images of `|i><j|`.
    pub fn from_blocks(blocks: &[Vec<CMatrix>]) -> Result<Self> {
        let d = blocks.len();
        let mut c = CMatrix::zeros(d * d, d * d);
        for (i, row) in blocks.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch("Choi block table must be square".into()));
            }
            for (j, b) in row.iter().enumerate() {
                if b.rows() != d || b.cols() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "Choi block ({i},{j}) is {}x{}, expected {d}x{d}",
                        b.rows(),
                        b.cols()
                    )));
                }
                for r in 0..d {
                    for s in 0..d {
                        c.set(i * d + r, j * d + s, b.get(r, s));
                    }
                }
            }
        }
        Ok(Self { mat: c, dim: d })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_entry_diff(&self, other: &ChoiMatrix) -> f64 {
        self.mat.max_abs_diff(&other.mat)
    }

    pub fn is_completely_positive(&self, tol: f64) -> bool {
        crate::densemath::is_psd(&self.mat, tol)
    }

    /// Partial trace over the output factor; `I` for trace-preserving maps.
    pub fn input_marginal(&self) -> CMatrix {
        crate::densemath::partial_trace_matrix(&self.mat, &[0], &[self.dim, self.dim])
            .expect("Choi matrix has d^2 x d^2 shape")
    }

    /// Output of the channel on `rho`, recovered from the Choi matrix by linearity.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.dim;
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let w = rho.get(i, j);
                if w == ZERO {
                    continue;
                }
                for r in 0..d {
                    for s in 0..d {
                        let z = out.get(r, s) + w * self.mat.get(i * d + r, j * d + s);
                        out.set(r, s, z);
                    }
                }
            }
        }
        out
    }
}

/// Labelling of the single-qubit Pauli basis `sigma_gh`, `g, h in {0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum PauliConvention {
    /// `sigma_gh = i^{gh} X^g Z^h`: `(0,1) = Z`, `(1,0) = X`, `(1,1) = Y`.
    XzStd,
    /// `sigma_gh = (-i)^{gh} Z^g X^h`: `(0,1) = X`, `(1,0) = Z`, `(1,1) = Y`.
    ZxMeas,
    /// `U sigma_gh U^dag` for the `ZxMeas` elements, `U = e^{-i phi Z/2}`.
    XzRotated { phi: f64 },
}

impl PauliConvention {
    pub fn basis_element(&self, g: u8, h: u8) -> CMatrix {
        let phase = |exp: i32| -> C64 {
            match exp.rem_euclid(4) {
                0 => ONE,
                1 => I,
                2 => -ONE,
                _ => -I,
            }
        };
        let gh = (g & h) as i32;
        match *self {
            PauliConvention::XzStd => gates::xz_power(g, h).scale(phase(gh)),
            PauliConvention::ZxMeas => zx_power(g, h).scale(phase(-gh)),
            PauliConvention::XzRotated { phi } => {
                let u = gates::rz(phi);
                u.conjugate(&PauliConvention::ZxMeas.basis_element(g, h))
            }
        }
    }
}

/// `Z^a X^b`.
fn zx_power(a: u8, b: u8) -> CMatrix {
    let mut m = gates::id2();
    if a & 1 == 1 {
        m = gates::z();
    }
    if b & 1 == 1 {
        m = m.matmul(&gates::x());
    }
    m
}

/// Coefficients `a_gh` of a 2x2 operator in a declared Pauli basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliCoeffs {
    pub a: [[C64; 2]; 2],
    pub convention: PauliConvention,
}

impl PauliCoeffs {
    pub fn get(&self, g: u8, h: u8) -> C64 {
        self.a[g as usize][h as usize]
    }

    pub fn zero(convention: PauliConvention) -> Self {
        Self { a: [[ZERO; 2]; 2], convention }
    }

    /// Iterates `(g, h, a_gh)`.
    pub fn terms(&self) -> impl Iterator<Item = (u8, u8, C64)> + '_ {
        (0..2u8).flat_map(move |g| (0..2u8).map(move |h| (g, h, self.get(g, h))))
    }
}

/// `a_gh = Tr(B_gh^dag K) / 2` for the basis elements `B_gh` of `convention`.
pub fn pauli_decompose(k: &CMatrix, convention: PauliConvention) -> Result<PauliCoeffs> {
    if k.rows() != 2 || k.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "Pauli decomposition needs a 2x2 operator, got {}x{}",
            k.rows(),
            k.cols()
        )));
    }
    let mut a = [[ZERO; 2]; 2];
    for g in 0..2u8 {
        for h in 0..2u8 {
            let b = convention.basis_element(g, h);
            a[g as usize][h as usize] = b.adjoint().matmul(k).trace() * 0.5;
        }
    }
    Ok(PauliCoeffs { a, convention })
}

pub fn pauli_reconstruct(c: &PauliCoeffs) -> CMatrix {
    c.terms().fold(CMatrix::zeros(2, 2), |acc, (g, h, a)| &acc + &c.convention.basis_element(g, h).scale(a))
}

/// If `k` is proportional to a single `X^g Z^h`, returns `(g, h, coefficient)`.
pub fn pauli_component(k: &CMatrix, tol: f64) -> Option<(u8, u8, C64)> {
    let coeffs = pauli_decompose(k, PauliConvention::XzStd).ok()?;
    let nonzero: Vec<(u8, u8, C64)> = coeffs.terms().filter(|(_, _, a)| a.norm() > tol).collect();
    match nonzero.as_slice() {
        [] => Some((0, 0, ZERO)),
        [one] => Some(*one),
        _ => None,
    }
}

/// Channel whose Choi matrix is `choi`, via `sum_ij |i><j| (x) E(|i><j|)`; used to
/// turn a simulated Choi matrix back into Kraus form for application.
pub fn kraus_from_choi(choi: &ChoiMatrix) -> Result<KrausChannel> {
    let n = choi.mat.rows();
    let d = choi.dim;
    let m = nalgebra::DMatrix::from_fn(n, n, |r, c| (choi.mat.get(r, c) + choi.mat.get(c, r).conj()) * 0.5);
    let eig = m.symmetric_eigen();
    let mut ops = Vec::new();
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= 1e-13 {
            continue;
        }
        let v = eig.eigenvectors.column(idx);
        let mut k = CMatrix::zeros(d, d);
        for i in 0..d {
            for r in 0..d {
                k.set(r, i, v[i * d + r] * lambda.sqrt());
            }
        }
        ops.push(k);
    }
    if ops.is_empty() {
        ops.push(CMatrix::zeros(d, d));
    }
    KrausChannel::completely_positive(ops)
}
