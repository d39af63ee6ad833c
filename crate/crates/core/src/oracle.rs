//! Brute-force density-matrix simulation of small circuits.
//!
//! Sites carry stable labels. A site becomes live when it is prepared and stops
//! being live when it is measured with `remove` or discarded; the register only
//! stores live sites, ordered by label with the smallest label as the most
//! significant qubit. Measurements select a requested branch, so the final trace
//! is the probability of the recorded outcome string.

use serde::{Deserialize, Serialize};

use crate::block::{BlockNoiseConfig, MeasBasis, MeasSpec};
use crate::channels::{ChannelKind, ChoiMatrix, KrausChannel};
use crate::densemath::{gates, CMatrix, DensityOperator, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Default cap on simultaneously live qubits.
pub const DEFAULT_MAX_QUBITS: usize = 12;

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "NOISY_MBQC_MAX_QUBITS";

/// The live-qubit cap, read from the environment when set.
pub fn max_qubits() -> usize {
    std::env::var(MAX_QUBITS_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MAX_QUBITS)
}

const BASIS_TOL: f64 = 1e-12;

/// Measurement basis for [`CircuitOp::Measure`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Spec(MeasBasis),
    /// Explicit orthonormal pair; outcome `k` selects `vectors[k]`.
    Pair([[C64; 2]; 2]),
}

impl Basis {
    pub fn x() -> Self {
        Basis::Spec(MeasBasis::Equatorial(0.0))
    }

    pub fn z() -> Self {
        Basis::Spec(MeasBasis::Z)
    }

    pub fn vector(&self, outcome: u8) -> Result<[C64; 2]> {
        match self {
            Basis::Spec(b) => Ok(MeasSpec { basis: *b, outcome }.vector()),
            Basis::Pair(vs) => {
                check_orthonormal(vs)?;
                Ok(vs[(outcome & 1) as usize])
            }
        }
    }
}

fn check_orthonormal(vs: &[[C64; 2]; 2]) -> Result<()> {
    let ip = |a: &[C64; 2], b: &[C64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
    let dev = [(ip(&vs[0], &vs[0]) - ONE).norm(), (ip(&vs[1], &vs[1]) - ONE).norm(), ip(&vs[0], &vs[1]).norm()]
        .into_iter()
        .fold(0.0, f64::max);
    if dev > BASIS_TOL {
        return Err(Error::NonOrthonormalBasis(dev));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitOp {
    PrepPlus(usize),
    PrepState(usize, DensityOperator),
    Cz(usize, usize),
    Channel1Q(usize, KrausChannel),
    Unitary1Q(usize, CMatrix),
    Measure {
        site: usize,
        basis: Basis,
        outcome: u8,
        remove: bool,
    },
    /// Traces a site out.
    Discard(usize),
}

impl CircuitOp {
    fn sites(&self) -> Vec<usize> {
        match self {
            CircuitOp::PrepPlus(s)
            | CircuitOp::PrepState(s, _)
            | CircuitOp::Channel1Q(s, _)
            | CircuitOp::Unitary1Q(s, _)
            | CircuitOp::Discard(s) => vec![*s],
            CircuitOp::Measure { site, .. } => vec![*site],
            CircuitOp::Cz(a, b) => vec![*a, *b],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    /// Unnormalized whenever a measurement or a non-trace-preserving channel occurred.
    pub state: DensityOperator,
    pub outcome_record: Vec<(usize, u8)>,
    /// Labels of the live sites, in register order.
    pub sites: Vec<usize>,
}

impl SimResult {
    pub fn branch_prob(&self) -> f64 {
        self.state.trace()
    }
}

/// Operator on the live sites of a lazily grown register.
#[derive(Clone, Debug, PartialEq)]
pub struct Register {
    sites: Vec<usize>,
    mat: CMatrix,
    limit: usize,
}

impl Default for Register {
    fn default() -> Self {
        Self::new()
    }
}

impl Register {
    pub fn new() -> Self {
        Self::with_limit(max_qubits())
    }

    pub fn with_limit(limit: usize) -> Self {
        Self { sites: Vec::new(), mat: CMatrix::identity(1), limit }
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    fn position(&self, site: usize) -> Result<usize> {
        self.sites.binary_search(&site).map_err(|_| Error::SiteNotLive(site))
    }

    /// Bit of `site` within a basis index, counting from the least significant end.
    fn bit(&self, pos: usize) -> usize {
        self.sites.len() - 1 - pos
    }

    /// Puts `site` in the (possibly non-Hermitian) operator `m`; a live site is
    /// first traced out.
    pub fn prep(&mut self, site: usize, m: &CMatrix) -> Result<()> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "single-site preparation needs a 2x2 operator, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if self.sites.binary_search(&site).is_ok() {
            self.discard(site)?;
        }
        if self.sites.len() + 1 > self.limit {
            return Err(Error::SizeLimit { qubits: self.sites.len() + 1, limit: self.limit });
        }
        let pos = self.sites.binary_search(&site).unwrap_err();
        let low_bits = self.sites.len() - pos;
        let old = &self.mat;
        let d = old.rows() * 2;
        let mut out = CMatrix::zeros(d, d);
        let low = (1usize << low_bits) - 1;
        let squeeze = |x: usize| ((x >> (low_bits + 1)) << low_bits) | (x & low);
        for r in 0..d {
            let rb = (r >> low_bits) & 1;
            let rold = squeeze(r);
            for c in 0..d {
                let cb = (c >> low_bits) & 1;
                let z = old.get(rold, squeeze(c)) * m.get(rb, cb);
                if z != ZERO {
                    out.set(r, c, z);
                }
            }
        }
        self.mat = out;
        self.sites.insert(pos, site);
        Ok(())
    }

    pub fn prep_plus(&mut self, site: usize) -> Result<()> {
        self.prep(site, gates::plus_state().matrix())
    }

    /// `m -> L m R^dag` with `L`, `R` acting on `site`.
    pub fn sandwich(&mut self, site: usize, l: &CMatrix, r: &CMatrix) -> Result<()> {
        let pos = self.position(site)?;
        let b = self.bit(pos);
        self.mat = right_mul_adjoint(&left_mul(&self.mat, b, l), b, r);
        Ok(())
    }

    pub fn apply_unitary(&mut self, site: usize, u: &CMatrix) -> Result<()> {
        self.sandwich(site, u, u)
    }

    pub fn apply_channel(&mut self, site: usize, ch: &KrausChannel) -> Result<()> {
        if ch.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "single-site channel must be 2-dimensional, got {}",
                ch.dim()
            )));
        }
        let pos = self.position(site)?;
        let b = self.bit(pos);
        let d = self.mat.rows();
        let mut acc = CMatrix::zeros(d, d);
        for k in ch.ops() {
            acc = &acc + &right_mul_adjoint(&left_mul(&self.mat, b, k), b, k);
        }
        self.mat = acc;
        Ok(())
    }

    pub fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::DimensionMismatch(format!("CZ needs two distinct sites, got {a} twice")));
        }
        let ba = self.bit(self.position(a)?);
        let bb = self.bit(self.position(b)?);
        let parity = |x: usize| ((x >> ba) & (x >> bb) & 1) == 1;
        let d = self.mat.rows();
        for r in 0..d {
            let pr = parity(r);
            for c in 0..d {
                if pr != parity(c) {
                    let z = self.mat.get(r, c);
                    self.mat.set(r, c, -z);
                }
            }
        }
        Ok(())
    }

    /// Projects `site` onto `v`; with `remove` the site is contracted away.
    pub fn measure(&mut self, site: usize, v: &[C64; 2], remove: bool) -> Result<()> {
        let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if (norm - 1.0).abs() > BASIS_TOL {
            return Err(Error::NotNormalized(norm));
        }
        if remove {
            let pos = self.position(site)?;
            let b = self.bit(pos);
            let bra = CMatrix::from_rows(&[[v[0].conj(), v[1].conj()]]);
            self.mat = contract_site(&self.mat, b, &bra);
            self.sites.remove(pos);
        } else {
            let p = CMatrix::outer(v, v);
            self.sandwich(site, &p, &p)?;
        }
        Ok(())
    }

    /// Traces `site` out.
    pub fn discard(&mut self, site: usize) -> Result<()> {
        let pos = self.position(site)?;
        let b = self.bit(pos);
        let mut acc: Option<CMatrix> = None;
        for k in 0..2 {
            let mut bra = CMatrix::zeros(1, 2);
            bra.set(0, k, ONE);
            let part = contract_site(&self.mat, b, &bra);
            acc = Some(match acc {
                None => part,
                Some(a) => &a + &part,
            });
        }
        self.mat = acc.expect("two terms");
        self.sites.remove(pos);
        Ok(())
    }

    pub fn apply(&mut self, op: &CircuitOp) -> Result<Option<(usize, u8)>> {
        match op {
            CircuitOp::PrepPlus(s) => self.prep_plus(*s)?,
            CircuitOp::PrepState(s, rho) => {
                if rho.dim() != 2 {
                    return Err(Error::DimensionMismatch(format!(
                        "single-site preparation needs a qubit state, got dimension {}",
                        rho.dim()
                    )));
                }
                self.prep(*s, rho.matrix())?
            }
            CircuitOp::Cz(a, b) => self.cz(*a, *b)?,
            CircuitOp::Channel1Q(s, ch) => self.apply_channel(*s, ch)?,
            CircuitOp::Unitary1Q(s, u) => {
                let defect = u.unitarity_defect();
                if u.rows() != 2 || u.cols() != 2 {
                    return Err(Error::DimensionMismatch("single-site unitary must be 2x2".into()));
                }
                if defect > crate::densemath::DEFAULT_TOL {
                    return Err(Error::NotUnitary(defect));
                }
                self.apply_unitary(*s, u)?
            }
            CircuitOp::Measure { site, basis, outcome, remove } => {
                let v = basis.vector(*outcome)?;
                self.measure(*site, &v, *remove)?;
                return Ok(Some((*site, *outcome & 1)));
            }
            CircuitOp::Discard(s) => self.discard(*s)?,
        }
        Ok(None)
    }
}

/// `L` on bit `b` from the left.
fn left_mul(m: &CMatrix, b: usize, l: &CMatrix) -> CMatrix {
    let d = m.rows();
    let cols = m.cols();
    let mask = 1usize << b;
    let mut out = CMatrix::zeros(d, cols);
    for r0 in (0..d).filter(|r| r & mask == 0) {
        let r1 = r0 | mask;
        for c in 0..cols {
            let (x0, x1) = (m.get(r0, c), m.get(r1, c));
            out.set(r0, c, l.get(0, 0) * x0 + l.get(0, 1) * x1);
            out.set(r1, c, l.get(1, 0) * x0 + l.get(1, 1) * x1);
        }
    }
    out
}

/// `m R^dag` with `R` on bit `b`.
fn right_mul_adjoint(m: &CMatrix, b: usize, r: &CMatrix) -> CMatrix {
    let rows = m.rows();
    let d = m.cols();
    let mask = 1usize << b;
    let mut out = CMatrix::zeros(rows, d);
    let ra = r.adjoint();
    for c0 in (0..d).filter(|c| c & mask == 0) {
        let c1 = c0 | mask;
        for row in 0..rows {
            let (x0, x1) = (m.get(row, c0), m.get(row, c1));
            out.set(row, c0, x0 * ra.get(0, 0) + x1 * ra.get(1, 0));
            out.set(row, c1, x0 * ra.get(0, 1) + x1 * ra.get(1, 1));
        }
    }
    out
}

/// `bra m bra^dag` on bit `b`, removing that bit.
fn contract_site(m: &CMatrix, b: usize, bra: &CMatrix) -> CMatrix {
    let d = m.rows() / 2;
    let low = (1usize << b) - 1;
    let expand = |x: usize, bit: usize| ((x & !low) << 1) | (bit << b) | (x & low);
    let mut out = CMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            let mut z = ZERO;
            for x in 0..2 {
                let bx = bra.get(0, x);
                if bx == ZERO {
                    continue;
                }
                for y in 0..2 {
                    let by = bra.get(0, y).conj();
                    if by == ZERO {
                        continue;
                    }
                    z += bx * m.get(expand(r, x), expand(c, y)) * by;
                }
            }
            out.set(r, c, z);
        }
    }
    out
}

fn check_sites(n: usize, ops: &[CircuitOp]) -> Result<()> {
    for op in ops {
        for s in op.sites() {
            if s >= n {
                return Err(Error::SiteOutOfRange { site: s, n });
            }
        }
    }
    Ok(())
}

/// Runs `ops` on sites `0..n`, starting from an empty register.
pub fn simulate(n: usize, ops: &[CircuitOp]) -> Result<SimResult> {
    check_sites(n, ops)?;
    let mut reg = Register::new();
    let mut record = Vec::new();
    let mut normalized = true;
    for op in ops {
        if let Some(rec) = reg.apply(op)? {
            record.push(rec);
            normalized = false;
        }
        match op {
            CircuitOp::Channel1Q(_, ch) if ch.kind() != ChannelKind::TracePreserving => normalized = false,
            CircuitOp::PrepState(_, rho) if !rho.is_normalized() => normalized = false,
            _ => {}
        }
    }
    let sites = reg.sites().to_vec();
    let state = DensityOperator::checked(reg.into_matrix(), normalized, 1e-9)?;
    Ok(SimResult { state, outcome_record: record, sites })
}

/// Pure one-dimensional cluster state on `n` qubits.
pub fn build_cluster_dm(n: usize) -> Result<DensityOperator> {
    if n == 0 {
        return Err(Error::InvalidSize("a cluster needs at least one qubit".into()));
    }
    let limit = max_qubits();
    if n > limit {
        return Err(Error::SizeLimit { qubits: n, limit });
    }
    Ok(simulate(n, &cluster_ops(n))?.state)
}

/// `|+>` on every site followed by nearest-neighbour CZs.
pub fn cluster_ops(n: usize) -> Vec<CircuitOp> {
    (0..n).map(CircuitOp::PrepPlus).chain((1..n).map(|i| CircuitOp::Cz(i - 1, i))).collect()
}

/// Applies one noisy block to an arbitrary 2x2 operator on a fresh register.
pub fn block_oracle_apply(cfg: &BlockNoiseConfig, input: &CMatrix) -> Result<CMatrix> {
    let mut reg = Register::new();
    reg.prep(0, input)?;
    run_block_ops(&mut reg, 0, 1, cfg)?;
    Ok(reg.into_matrix())
}

fn run_block_ops(reg: &mut Register, input: usize, output: usize, cfg: &BlockNoiseConfig) -> Result<()> {
    if let Some(a1) = &cfg.alpha1 {
        reg.apply_channel(input, a1)?;
    }
    reg.prep_plus(output)?;
    if let Some(a2) = &cfg.alpha2 {
        reg.apply_channel(output, a2)?;
    }
    reg.cz(input, output)?;
    if let Some(a3) = &cfg.alpha3 {
        reg.apply_channel(input, a3)?;
    }
    reg.measure(input, &cfg.meas.vector(), true)?;
    if let Some(a4) = &cfg.alpha4 {
        reg.apply_channel(output, a4)?;
    }
    Ok(())
}

/// Choi matrix of a noisy equatorial block, simulated on every `|i><j|` input.
pub fn block_oracle_channel(cfg: &BlockNoiseConfig) -> Result<ChoiMatrix> {
    cfg.validate()?;
    if cfg.meas.basis == MeasBasis::Z {
        return Err(Error::ZBasisUnsupported);
    }
    let blocks = (0..2)
        .map(|i| (0..2).map(|j| block_oracle_apply(cfg, &CMatrix::unit(2, i, j))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    ChoiMatrix::from_blocks(&blocks)
}

/// Circuit for a chain of blocks: site `j` is measured by block `j` and the
/// output lives on site `blocks.len()`.
pub fn block_chain_ops(input: &DensityOperator, blocks: &[BlockNoiseConfig]) -> Vec<CircuitOp> {
    let mut ops = vec![CircuitOp::PrepState(0, input.clone())];
    for (j, cfg) in blocks.iter().enumerate() {
        let (a, b) = (j, j + 1);
        if let Some(a1) = &cfg.alpha1 {
            ops.push(CircuitOp::Channel1Q(a, a1.clone()));
        }
        ops.push(CircuitOp::PrepPlus(b));
        if let Some(a2) = &cfg.alpha2 {
            ops.push(CircuitOp::Channel1Q(b, a2.clone()));
        }
        ops.push(CircuitOp::Cz(a, b));
        if let Some(a3) = &cfg.alpha3 {
            ops.push(CircuitOp::Channel1Q(a, a3.clone()));
        }
        ops.push(CircuitOp::Measure {
            site: a,
            basis: Basis::Spec(cfg.meas.basis),
            outcome: cfg.meas.outcome,
            remove: true,
        });
        if let Some(a4) = &cfg.alpha4 {
            ops.push(CircuitOp::Channel1Q(b, a4.clone()));
        }
    }
    ops
}
