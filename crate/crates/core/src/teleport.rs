//! Teleportation through a Bell pair whose second half went through a noisy channel.
//!
//! Qubit 0 is the input, qubits 1 and 2 hold the resource with qubit 2 on the
//! receiving side. The Bell measurement projects qubits 0 and 1 onto
//! `|B_st> = (I (x) X^s Z^t)(|00> + |11>)/sqrt 2`.

use serde::{Deserialize, Serialize};

use crate::channels::{pauli_component, KrausChannel};
use crate::densemath::{gates, kron, partial_trace_matrix, trace_distance_matrix, CMatrix, DensityOperator};
use crate::error::{Error, Result};
use crate::oracle::Register;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BellLabel {
    pub i: u8,
    pub j: u8,
}

impl BellLabel {
    pub fn all() -> [BellLabel; 4] {
        [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(i, j)| BellLabel { i, j })
    }

    pub fn projector(&self) -> CMatrix {
        let v = gates::bell(self.i, self.j);
        CMatrix::outer(&v, &v)
    }

    /// `X^i Z^j`, the by-product left on the receiving qubit.
    pub fn byproduct(&self) -> CMatrix {
        gates::xz_power(self.i, self.j)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TeleportOutcome {
    pub s: u8,
    pub t: u8,
    pub prob: f64,
    /// Unnormalized; trace equals `prob`.
    pub state: DensityOperator,
}

fn check_qubit_channel(eps: &KrausChannel) -> Result<()> {
    if eps.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "resource noise must act on one qubit, got dimension {}",
            eps.dim()
        )));
    }
    Ok(())
}

/// `sum_ij (1/2) |i><j| (x) eps(|i><j|)`: a Bell pair whose second qubit went through `eps`.
pub fn diagonal_resource(eps: &KrausChannel) -> Result<DensityOperator> {
    check_qubit_channel(eps)?;
    let choi = eps.choi();
    let normalized = eps.kind() == crate::channels::ChannelKind::TracePreserving;
    DensityOperator::checked(choi.matrix().scale_real(0.5), normalized, 1e-10)
}

/// Bell-measurement branch `(s, t)` of teleporting `rho` through `resource`.
pub fn teleport_branch(resource: &DensityOperator, rho: &DensityOperator, s: u8, t: u8) -> Result<TeleportOutcome> {
    if resource.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "resource must be a two-qubit state, got dimension {}",
            resource.dim()
        )));
    }
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "teleported state must be one qubit, got dimension {}",
            rho.dim()
        )));
    }
    let full = kron(rho.matrix(), resource.matrix());
    let p = kron(&BellLabel { i: s & 1, j: t & 1 }.projector(), &gates::id2());
    let projected = p.matmul(&full).matmul(&p);
    let bob = partial_trace_matrix(&projected, &[2], &[2, 2, 2])?;
    let state = DensityOperator::checked(bob, false, 1e-10)?;
    Ok(TeleportOutcome { s: s & 1, t: t & 1, prob: state.trace(), state })
}

/// The predicted branch `(1/4) X^s Z^t eps(rho) Z^t X^s`.
pub fn pauli_teleport_branch(eps: &KrausChannel, rho: &DensityOperator, s: u8, t: u8) -> Result<CMatrix> {
    let out = eps.apply(rho)?;
    Ok(gates::xz_power(s, t).conjugate(out.matrix()).scale_real(0.25))
}

/// Whether every Bell-measurement branch matches `(1/4) X^s Z^t eps(rho) Z^t X^s`
/// within `tol` in trace distance. Requires a Pauli channel.
pub fn check_pauli_teleport(eps: &KrausChannel, rho: &DensityOperator, tol: f64) -> Result<bool> {
    check_qubit_channel(eps)?;
    for (index, k) in eps.ops().iter().enumerate() {
        if pauli_component(k, 1e-12).is_none() {
            return Err(Error::NotPauliChannel { index });
        }
    }
    let resource = diagonal_resource(eps)?;
    for b in BellLabel::all() {
        let got = teleport_branch(&resource, rho, b.i, b.j)?;
        let want = pauli_teleport_branch(eps, rho, b.i, b.j)?;
        if trace_distance_matrix(got.state.matrix(), &want)? > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Gate-level simulation of the same branch: Bell pair from `|+>|+>`, a CZ and a
/// Hadamard, `eps` on the receiving qubit, then CNOT and Hadamard on the sender's
/// pair followed by computational-basis measurements.
pub fn teleport_oracle_branch(eps: &KrausChannel, rho: &DensityOperator, s: u8, t: u8) -> Result<DensityOperator> {
    check_qubit_channel(eps)?;
    let h = gates::h();
    let mut reg = Register::new();
    reg.prep(0, rho.matrix())?;
    reg.prep_plus(1)?;
    reg.prep_plus(2)?;
    reg.cz(1, 2)?;
    reg.apply_unitary(2, &h)?;
    reg.apply_channel(2, eps)?;
    reg.apply_unitary(1, &h)?;
    reg.cz(0, 1)?;
    reg.apply_unitary(1, &h)?;
    reg.apply_unitary(0, &h)?;
    let bit = |b: u8| if b & 1 == 0 { gates::ket0() } else { gates::ket1() };
    reg.measure(0, &bit(t), true)?;
    reg.measure(1, &bit(s), true)?;
    DensityOperator::checked(reg.into_matrix(), false, 1e-10)
}
