//! Matrix product operators over a correlation space.
//!
//! An `n`-site operator is
//!
//! ```text
//! rho = sum_{I,J} sigma^{[i_n, j_n]} . eps^{[i_{n-1}, j_{n-1}]} . ... . eps^{[i_1, j_1]}(seed) |I><J|
//! eps^{[i,j]}(r) = sum_s A[i,s] r A[j,s]^dag
//! ```
//!
//! where every site is a family of matrices `A[i,s]` and the last (boundary)
//! site has row covectors `v[i,s]^dag`, so the contraction ends in a scalar.
//!
//! Physical operations on a site are never pushed through the family one at a
//! time. Each site keeps the product `M_m` of everything applied to it (one
//! product per Kraus branch `m`) and, for the builders' families, a Pauli frame
//! `(F_x, F_z)` with
//!
//! ```text
//! A[i xor 1, s] = F_x A[i, s] X        (-1)^i A[i, s] = F_z A[i, s] Z
//! ```
//!
//! which turns `M_m = sum u_gh sigma_gh` into the logical update
//! `A -> sum u_gh F_z^h F_x^g A sigma_gh`. For a cluster site `F_x = Z`, `F_z = I`
//! and the rule reads `sigma_ab -> Z^a A sigma_ab`. Sites without a frame use
//! `A'[i'] = sum_i M[i', i] A[i]`.

use serde::{Deserialize, Serialize};

use crate::channels::{pauli_decompose, KrausChannel, PauliConvention};
use crate::densemath::{gates, CMatrix, DensityOperator, C64, DEFAULT_TOL, ONE, ZERO};
use crate::error::{Error, Result};
use crate::oracle::max_qubits;
use crate::parallel::{self, Execution};

/// Per-`s` Pauli frame of a site family.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliFrame {
    pub fx: CMatrix,
    pub fz: CMatrix,
}

/// A site's effective family: `mats[i][s]`, each `out x in`. Measured sites have a
/// single physical slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteTensor {
    pub mats: Vec<Vec<CMatrix>>,
    pub boundary: bool,
}

impl SiteTensor {
    pub fn physical_dim(&self) -> usize {
        self.mats.len()
    }

    pub fn s_count(&self) -> usize {
        self.mats.first().map_or(0, Vec::len)
    }

    pub fn in_dim(&self) -> usize {
        self.mats[0][0].cols()
    }

    pub fn out_dim(&self) -> usize {
        self.mats[0][0].rows()
    }

    fn validate(&self) -> Result<()> {
        let first = self
            .mats
            .first()
            .and_then(|m| m.first())
            .ok_or_else(|| Error::InvalidSize("site family has no matrices".into()))?;
        let (out, inn) = (first.rows(), first.cols());
        let s = self.s_count();
        for row in &self.mats {
            if row.len() != s {
                return Err(Error::InvalidSize("every physical index needs the same number of s entries".into()));
            }
            for m in row {
                if m.rows() != out || m.cols() != inn {
                    return Err(Error::DimensionMismatch(format!(
                        "site family mixes {out}x{inn} and {}x{} matrices",
                        m.rows(),
                        m.cols()
                    )));
                }
            }
        }
        if self.boundary && out != 1 {
            return Err(Error::DimensionMismatch(format!("boundary site must have row covectors, got {out} rows")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasRecord {
    pub vector: [C64; 2],
    pub outcome: u8,
}

#[derive(Clone, Debug, PartialEq)]
struct Site {
    /// `base[i][s]`.
    base: [Vec<CMatrix>; 2],
    boundary: bool,
    frames: Option<Vec<PauliFrame>>,
    /// Accumulated physical operators, one per Kraus branch.
    ops: Vec<CMatrix>,
    measured: Option<MeasRecord>,
}

impl Site {
    fn new(base: [Vec<CMatrix>; 2], boundary: bool, frames: Option<Vec<PauliFrame>>) -> Self {
        Site { base, boundary, frames, ops: vec![gates::id2()], measured: None }
    }

    fn s_count(&self) -> usize {
        self.base[0].len()
    }

    /// `A_eff[i][(s, m)]`, s-major.
    fn open_family(&self) -> [Vec<CMatrix>; 2] {
        let mut fam: [Vec<CMatrix>; 2] = [Vec::new(), Vec::new()];
        for s in 0..self.s_count() {
            for m in &self.ops {
                let pair = match &self.frames {
                    Some(frames) => logical_rule(&self.base, s, &frames[s], m),
                    None => physical_rule(&self.base, s, m),
                };
                let [a0, a1] = pair;
                fam[0].push(a0);
                fam[1].push(a1);
            }
        }
        fam
    }

    /// Effective family: two physical slots, or one once measured.
    fn family(&self) -> Vec<Vec<CMatrix>> {
        let [f0, f1] = self.open_family();
        match &self.measured {
            None => vec![f0, f1],
            Some(rec) => {
                let v = rec.vector;
                let closed =
                    f0.iter().zip(&f1).map(|(a0, a1)| &a0.scale(v[0].conj()) + &a1.scale(v[1].conj())).collect();
                vec![closed]
            }
        }
    }
}

/// `sum_gh u_gh F_z^h F_x^g A[i, s] sigma_gh` for both `i`.
fn logical_rule(base: &[Vec<CMatrix>; 2], s: usize, frame: &PauliFrame, m: &CMatrix) -> [CMatrix; 2] {
    let u = pauli_decompose(m, PauliConvention::XzStd).expect("accumulated operators are 2x2");
    let conv = PauliConvention::XzStd;
    let out = base[0][s].rows();
    let inn = base[0][s].cols();
    let mut res = [CMatrix::zeros(out, inn), CMatrix::zeros(out, inn)];
    for (g, h, coeff) in u.terms() {
        if coeff == ZERO {
            continue;
        }
        let mut left = CMatrix::identity(out);
        if h == 1 {
            left = left.matmul(&frame.fz);
        }
        if g == 1 {
            left = left.matmul(&frame.fx);
        }
        let sigma = conv.basis_element(g, h);
        for (i, r) in res.iter_mut().enumerate() {
            let term = left.matmul(&base[i][s]).matmul(&sigma).scale(coeff);
            *r = &*r + &term;
        }
    }
    res
}

/// `A'[i'] = sum_i M[i', i] A[i, s]`.
fn physical_rule(base: &[Vec<CMatrix>; 2], s: usize, m: &CMatrix) -> [CMatrix; 2] {
    let comb = |ip: usize| &base[0][s].scale(m.get(ip, 0)) + &base[1][s].scale(m.get(ip, 1));
    [comb(0), comb(1)]
}

/// `eps(r) = sum_s L[s] r R[s]^dag` on the correlation space.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalSuperop {
    pub left: Vec<CMatrix>,
    pub right: Vec<CMatrix>,
}

impl LogicalSuperop {
    pub fn apply(&self, r: &CMatrix) -> CMatrix {
        let out = self.left[0].rows();
        self.left
            .iter()
            .zip(&self.right)
            .fold(CMatrix::zeros(out, out), |acc, (l, rr)| &acc + &l.matmul(r).matmul(&rr.adjoint()))
    }

    /// Kraus form, available when left and right families coincide.
    pub fn to_kraus(&self) -> Result<KrausChannel> {
        if self.left != self.right {
            return Err(Error::InvalidMatrix("off-diagonal superoperator has no Kraus form".into()));
        }
        KrausChannel::completely_positive(self.left.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MpoState {
    sites: Vec<Site>,
    seed: CMatrix,
    normalized: bool,
}

fn pure_frame(fx: CMatrix, fz: CMatrix) -> PauliFrame {
    PauliFrame { fx, fz }
}

fn scalar(z: C64) -> CMatrix {
    CMatrix::from_rows(&[[z]])
}

fn row(v: [C64; 2]) -> CMatrix {
    CMatrix::from_rows(&[v])
}

fn bit_ket(k: usize) -> [C64; 2] {
    if k == 0 {
        gates::ket0()
    } else {
        gates::ket1()
    }
}

fn mixed_matrix_site() -> Site {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let fam = |k: usize| -> Vec<CMatrix> {
        (0..2).map(|s| CMatrix::outer(&gates::ket0(), &bit_ket(k ^ s)).scale_real(r)).collect()
    };
    let frames =
        (0..2).map(|s| pure_frame(gates::id2(), gates::id2().scale_real(if s == 0 { 1.0 } else { -1.0 }))).collect();
    Site::new([fam(0), fam(1)], false, Some(frames))
}

fn mixed_boundary_site() -> Site {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let fam = |i: usize| -> Vec<CMatrix> { (0..2).map(|t| row(bit_ket(i ^ t)).scale_real(r)).collect() };
    let frames = (0..2).map(|t| pure_frame(scalar(ONE), scalar(if t == 0 { ONE } else { -ONE }))).collect();
    Site::new([fam(0), fam(1)], true, Some(frames))
}

fn check_size(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSize(format!("{what} needs at least one site")));
    }
    Ok(())
}

impl MpoState {
    /// One-dimensional cluster state: `A[k] = H|k><k|`, seed `|+><+|`, boundary `<i|`.
    pub fn cluster(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("a cluster MPO needs at least 2 sites, got {n}")));
        }
        let h = gates::h();
        let frame = || vec![pure_frame(gates::z(), gates::id2())];
        let mut sites: Vec<Site> = (0..n - 1)
            .map(|_| {
                let a = |k: usize| vec![h.matmul(&CMatrix::outer(&bit_ket(k), &bit_ket(k)))];
                Site::new([a(0), a(1)], false, Some(frame()))
            })
            .collect();
        sites.push(Site::new(
            [vec![row(gates::ket0())], vec![row(gates::ket1())]],
            true,
            Some(vec![pure_frame(scalar(ONE), scalar(ONE))]),
        ));
        Ok(Self { sites, seed: gates::plus_state().into_matrix(), normalized: true })
    }

    /// `I / 2^n`: `A[k, s] = |0><k xor s| / sqrt 2`, seed `|0><0|`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_size(n, "a maximally mixed MPO")?;
        let mut sites: Vec<Site> = (0..n - 1).map(|_| mixed_matrix_site()).collect();
        sites.push(mixed_boundary_site());
        Ok(Self { sites, seed: gates::proj(0), normalized: true })
    }

    /// `|0><0| (x) I / 2^n` on `n + 1` qubits.
    pub fn one_clean(n: usize) -> Result<Self> {
        check_size(n, "the one-clean-qubit MPO")?;
        let a = |k: usize| vec![CMatrix::outer(&gates::ket0(), &bit_ket(k))];
        let mut sites = vec![Site::new([a(0), a(1)], false, Some(vec![pure_frame(gates::id2(), gates::id2())]))];
        sites.extend((0..n - 1).map(|_| mixed_matrix_site()));
        sites.push(mixed_boundary_site());
        Ok(Self { sites, seed: gates::proj(0), normalized: true })
    }

    /// Builds an MPO from explicit families. The last site must be a boundary.
    pub fn from_families(seed: CMatrix, families: Vec<SiteTensor>) -> Result<Self> {
        let mut sites = Vec::with_capacity(families.len());
        let mut dim = seed.rows();
        if !seed.is_square() {
            return Err(Error::DimensionMismatch("seed must be square".into()));
        }
        let count = families.len();
        if count == 0 {
            return Err(Error::InvalidSize("an MPO needs at least one site".into()));
        }
        for (idx, t) in families.into_iter().enumerate() {
            t.validate()?;
            if t.in_dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "site {idx} expects bond dimension {}, previous output is {dim}",
                    t.in_dim()
                )));
            }
            if t.boundary != (idx + 1 == count) {
                return Err(Error::InvalidSize("exactly the last site must be a boundary".into()));
            }
            if t.physical_dim() != 2 {
                return Err(Error::InvalidSize(format!("site {idx} must have physical dimension 2")));
            }
            dim = t.out_dim();
            let mut it = t.mats.into_iter();
            let base = [it.next().expect("two slots"), it.next().expect("two slots")];
            sites.push(Site::new(base, t.boundary, None));
        }
        let trace = seed.trace().re;
        Ok(Self { sites, seed, normalized: (trace - 1.0).abs() < DEFAULT_TOL })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn seed(&self) -> &CMatrix {
        &self.seed
    }

    pub fn bond_dim(&self) -> usize {
        self.seed.rows()
    }

    pub fn unmeasured_sites(&self) -> Vec<usize> {
        (0..self.sites.len()).filter(|&i| self.sites[i].measured.is_none()).collect()
    }

    pub fn measurement(&self, site: usize) -> Option<MeasRecord> {
        self.sites.get(site).and_then(|s| s.measured)
    }

    /// The effective family of `site` after all updates.
    pub fn site_tensor(&self, site: usize) -> Result<SiteTensor> {
        let s = self.site(site)?;
        Ok(SiteTensor { mats: s.family(), boundary: s.boundary })
    }

    /// Family obtained by acting on the physical index directly, bypassing the
    /// Pauli-frame rule.
    pub fn site_tensor_physical(&self, site: usize) -> Result<SiteTensor> {
        let mut s = self.site(site)?.clone();
        s.frames = None;
        Ok(SiteTensor { mats: s.family(), boundary: s.boundary })
    }

    fn site(&self, site: usize) -> Result<&Site> {
        self.sites.get(site).ok_or(Error::SiteOutOfRange { site, n: self.sites.len() })
    }

    fn open_site_mut(&mut self, site: usize) -> Result<&mut Site> {
        let n = self.sites.len();
        let s = self.sites.get_mut(site).ok_or(Error::SiteOutOfRange { site, n })?;
        if s.measured.is_some() {
            return Err(Error::AlreadyMeasured(site));
        }
        Ok(s)
    }

    /// Projects `site` onto `vector`, recording `outcome`.
    pub fn measure(&self, site: usize, vector: &[C64; 2], outcome: u8) -> Result<Self> {
        let norm = (vector[0].norm_sqr() + vector[1].norm_sqr()).sqrt();
        let mut next = self.clone();
        let s = next.open_site_mut(site)?;
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        s.measured = Some(MeasRecord { vector: *vector, outcome });
        next.normalized = false;
        Ok(next)
    }

    /// Applies `sigma_ab = i^{ab} X^a Z^b`.
    pub fn apply_pauli(&self, site: usize, a: u8, b: u8) -> Result<Self> {
        let sigma = PauliConvention::XzStd.basis_element(a & 1, b & 1);
        self.apply_operator(site, &sigma)
    }

    pub fn apply_unitary(&self, site: usize, u: &CMatrix) -> Result<Self> {
        if u.rows() != 2 || u.cols() != 2 {
            return Err(Error::DimensionMismatch("site unitary must be 2x2".into()));
        }
        let defect = u.unitarity_defect();
        if defect > DEFAULT_TOL {
            return Err(Error::NotUnitary(defect));
        }
        self.apply_operator(site, u)
    }

    fn apply_operator(&self, site: usize, k: &CMatrix) -> Result<Self> {
        let mut next = self.clone();
        let s = next.open_site_mut(site)?;
        s.ops = s.ops.iter().map(|m| k.matmul(m)).collect();
        Ok(next)
    }

    /// Applies a single-qubit channel; its Kraus index extends the site's `s` index.
    pub fn apply_channel(&self, site: usize, eta: &KrausChannel) -> Result<Self> {
        if eta.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "site channel must act on one qubit, got dimension {}",
                eta.dim()
            )));
        }
        let mut next = self.clone();
        let s = next.open_site_mut(site)?;
        s.ops = eta.ops().iter().flat_map(|e| s.ops.iter().map(move |m| e.matmul(m))).collect();
        if eta.kind() != crate::channels::ChannelKind::TracePreserving {
            next.normalized = false;
        }
        Ok(next)
    }

    /// Replaces every matrix of an unmeasured site's effective family by `f(A)`.
    pub fn map_site<F: Fn(&CMatrix) -> CMatrix>(&self, site: usize, f: F) -> Result<Self> {
        let mut next = self.clone();
        let s = next.open_site_mut(site)?;
        let [f0, f1] = s.open_family();
        let base = [f0.iter().map(&f).collect(), f1.iter().map(&f).collect()];
        *s = Site::new(base, s.boundary, None);
        Ok(next)
    }

    /// Superoperator of a measured site.
    pub fn logical_superop(&self, site: usize) -> Result<LogicalSuperop> {
        let s = self.site(site)?;
        if s.measured.is_none() {
            return Err(Error::UnmeasuredSites(vec![site]));
        }
        let fam = s.family().swap_remove(0);
        Ok(LogicalSuperop { left: fam.clone(), right: fam })
    }

    /// `eps^{[i,j]}` of an unmeasured site.
    pub fn site_superop(&self, site: usize, i: u8, j: u8) -> Result<LogicalSuperop> {
        let s = self.site(site)?;
        if s.measured.is_some() {
            return Err(Error::AlreadyMeasured(site));
        }
        let mut fam = s.family();
        let right = fam.swap_remove((j & 1) as usize);
        let left = if i == j { right.clone() } else { fam.swap_remove(0) };
        Ok(LogicalSuperop { left, right })
    }

    /// Composition of every non-boundary site's superoperator applied to the seed.
    /// All non-boundary sites must be measured; the trace is the probability of
    /// the recorded outcome string.
    pub fn logical_output(&self) -> Result<DensityOperator> {
        let last = self.sites.len() - 1;
        let open: Vec<usize> = (0..last).filter(|&i| self.sites[i].measured.is_none()).collect();
        if !open.is_empty() {
            return Err(Error::UnmeasuredSites(open));
        }
        let mut r = self.seed.clone();
        for site in 0..last {
            r = self.logical_superop(site)?.apply(&r);
        }
        DensityOperator::checked(r, false, 1e-9)
    }

    pub fn contract(&self) -> Result<DensityOperator> {
        self.contract_with(Execution::default())
    }

    /// Dense operator on the unmeasured sites, in site order.
    pub fn contract_with(&self, exec: Execution) -> Result<DensityOperator> {
        let open = self.unmeasured_sites().len();
        let limit = max_qubits();
        if open > limit {
            return Err(Error::SizeLimit { qubits: open, limit });
        }
        let compiled: Vec<Compiled> = self
            .sites
            .iter()
            .map(|s| {
                let fam = s.family();
                let adj = fam.iter().map(|f| f.iter().map(CMatrix::adjoint).collect()).collect();
                Compiled { fam, adj }
            })
            .collect();

        let mut frontier = vec![Partial { site: 0, row: 0, col: 0, r: self.seed.clone() }];
        while frontier.len() < 64 && frontier.iter().any(|p| p.site < compiled.len()) {
            frontier = frontier.iter().flat_map(|p| p.expand(&compiled)).collect();
        }
        let parts = parallel::map(exec, &frontier, |p| {
            let mut entries = Vec::new();
            p.finish(&compiled, &mut entries);
            entries
        });
        let d = 1usize << open;
        let mut mat = CMatrix::zeros(d, d);
        for (r, c, z) in parts.into_iter().flatten() {
            mat.set(r, c, z);
        }
        DensityOperator::checked(mat, self.normalized, 1e-9)
    }
}

struct Compiled {
    fam: Vec<Vec<CMatrix>>,
    adj: Vec<Vec<CMatrix>>,
}

#[derive(Clone)]
struct Partial {
    site: usize,
    row: usize,
    col: usize,
    r: CMatrix,
}

fn sandwich(r: &CMatrix, left: &[CMatrix], right_adj: &[CMatrix]) -> CMatrix {
    let out = left[0].rows();
    left.iter().zip(right_adj).fold(CMatrix::zeros(out, out), |acc, (l, ra)| &acc + &l.matmul(r).matmul(ra))
}

impl Partial {
    fn expand(&self, sites: &[Compiled]) -> Vec<Partial> {
        let Some(c) = sites.get(self.site) else {
            return vec![self.clone()];
        };
        if c.fam.len() == 1 {
            let r = sandwich(&self.r, &c.fam[0], &c.adj[0]);
            return vec![Partial { site: self.site + 1, row: self.row, col: self.col, r }];
        }
        let mut out = Vec::with_capacity(4);
        for i in 0..2 {
            for j in 0..2 {
                let r = sandwich(&self.r, &c.fam[i], &c.adj[j]);
                if r.max_abs() == 0.0 {
                    continue;
                }
                out.push(Partial { site: self.site + 1, row: self.row << 1 | i, col: self.col << 1 | j, r });
            }
        }
        out
    }

    fn finish(&self, sites: &[Compiled], entries: &mut Vec<(usize, usize, C64)>) {
        if self.site == sites.len() {
            entries.push((self.row, self.col, self.r.get(0, 0)));
            return;
        }
        for p in self.expand(sites) {
            p.finish(sites, entries);
        }
    }
}

/// Wire form of an MPO: seed plus each site's effective family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpoFile {
    pub seed: CMatrix,
    pub sites: Vec<MpoFileSite>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpoFileSite {
    pub physical_dim: usize,
    pub bond_dim: usize,
    pub s_count: usize,
    pub boundary: bool,
    pub matrices: Vec<Vec<CMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured: Option<MeasRecord>,
}

impl MpoState {
    /// Effective families only; the reloaded state applies later updates on the
    /// physical index.
    pub fn to_file(&self) -> MpoFile {
        let sites = self
            .sites
            .iter()
            .map(|s| {
                let open = Site { measured: None, ..s.clone() }.family();
                MpoFileSite {
                    physical_dim: 2,
                    bond_dim: open[0][0].cols(),
                    s_count: open[0].len(),
                    boundary: s.boundary,
                    matrices: open,
                    measured: s.measured,
                }
            })
            .collect();
        MpoFile { seed: self.seed.clone(), sites }
    }

    pub fn from_file(file: MpoFile) -> Result<Self> {
        let families = file
            .sites
            .iter()
            .map(|s| {
                if s.physical_dim != s.matrices.len() {
                    return Err(Error::InvalidSize(format!(
                        "declared physical_dim {} but found {} slots",
                        s.physical_dim,
                        s.matrices.len()
                    )));
                }
                let t = SiteTensor { mats: s.matrices.clone(), boundary: s.boundary };
                t.validate()?;
                if t.s_count() != s.s_count || t.in_dim() != s.bond_dim {
                    return Err(Error::InvalidSize("declared s_count or bond_dim does not match matrices".into()));
                }
                Ok(t)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut state = Self::from_families(file.seed, families)?;
        for (idx, s) in file.sites.iter().enumerate() {
            if let Some(rec) = s.measured {
                state = state.measure(idx, &rec.vector, rec.outcome)?;
            }
        }
        Ok(state)
    }
}

pub fn mpo_cluster(n: usize) -> Result<MpoState> {
    MpoState::cluster(n)
}

pub fn mpo_maximally_mixed(n: usize) -> Result<MpoState> {
    MpoState::maximally_mixed(n)
}

pub fn mpo_one_clean(n: usize) -> Result<MpoState> {
    MpoState::one_clean(n)
}

pub fn mpo_contract(m: &MpoState) -> Result<DensityOperator> {
    m.contract()
}

pub fn mpo_measure(m: &MpoState, site: usize, vector: &[C64; 2], outcome: u8) -> Result<MpoState> {
    m.measure(site, vector, outcome)
}

pub fn mpo_apply_pauli(m: &MpoState, site: usize, a: u8, b: u8) -> Result<MpoState> {
    m.apply_pauli(site, a, b)
}

pub fn mpo_apply_unitary(m: &MpoState, site: usize, u: &CMatrix) -> Result<MpoState> {
    m.apply_unitary(site, u)
}

pub fn mpo_apply_channel(m: &MpoState, site: usize, eta: &KrausChannel) -> Result<MpoState> {
    m.apply_channel(site, eta)
}

pub fn mpo_logical_output(m: &MpoState) -> Result<DensityOperator> {
    m.logical_output()
}
