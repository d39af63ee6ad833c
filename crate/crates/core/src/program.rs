//! Site-operation programs run both on an MPO and on the dense oracle.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{ChannelKind, KrausChannel};
use crate::densemath::{gates, CMatrix, DensityOperator, C64};
use crate::error::{Error, Result};
use crate::mpo::MpoState;
use crate::oracle::{cluster_ops, simulate, Basis, CircuitOp};
use crate::random::{random_angle, random_channel, random_unitary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builder {
    Cluster,
    MaximallyMixed,
    /// One clean qubit followed by `n - 1` maximally mixed ones.
    OneClean,
}

impl Builder {
    /// Total number of qubits for size parameter `n`.
    pub fn build(self, n: usize) -> Result<MpoState> {
        match self {
            Builder::Cluster => MpoState::cluster(n),
            Builder::MaximallyMixed => MpoState::maximally_mixed(n),
            Builder::OneClean => {
                if n < 2 {
                    return Err(Error::InvalidSize("one clean qubit needs at least one mixed partner".into()));
                }
                MpoState::one_clean(n - 1)
            }
        }
    }

    fn oracle_prep(self, n: usize) -> Vec<CircuitOp> {
        match self {
            Builder::Cluster => cluster_ops(n),
            Builder::MaximallyMixed => {
                (0..n).map(|i| CircuitOp::PrepState(i, DensityOperator::maximally_mixed(1))).collect()
            }
            Builder::OneClean => std::iter::once(CircuitOp::PrepState(0, gates::zero_state()))
                .chain((1..n).map(|i| CircuitOp::PrepState(i, DensityOperator::maximally_mixed(1))))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SiteOp {
    Pauli { site: usize, a: u8, b: u8 },
    Unitary { site: usize, u: CMatrix },
    Channel { site: usize, channel: KrausChannel },
    Measure { site: usize, vectors: [[C64; 2]; 2], outcome: u8 },
}

impl SiteOp {
    pub fn site(&self) -> usize {
        match self {
            SiteOp::Pauli { site, .. }
            | SiteOp::Unitary { site, .. }
            | SiteOp::Channel { site, .. }
            | SiteOp::Measure { site, .. } => *site,
        }
    }

    /// X-basis measurement.
    pub fn measure_x(site: usize, outcome: u8) -> Self {
        SiteOp::Measure { site, vectors: [gates::plus(), gates::minus()], outcome }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MpoProgram {
    pub builder: Builder,
    pub n: usize,
    pub ops: Vec<SiteOp>,
}

impl MpoProgram {
    pub fn run_mpo(&self) -> Result<MpoState> {
        apply_site_ops(self.builder.build(self.n)?, &self.ops)
    }

    pub fn oracle_ops(&self) -> Vec<CircuitOp> {
        let mut ops = self.builder.oracle_prep(self.n);
        for op in &self.ops {
            ops.push(match op {
                SiteOp::Pauli { site, a, b } => {
                    CircuitOp::Unitary1Q(*site, crate::channels::PauliConvention::XzStd.basis_element(*a & 1, *b & 1))
                }
                SiteOp::Unitary { site, u } => CircuitOp::Unitary1Q(*site, u.clone()),
                SiteOp::Channel { site, channel } => CircuitOp::Channel1Q(*site, channel.clone()),
                SiteOp::Measure { site, vectors, outcome } => {
                    CircuitOp::Measure { site: *site, basis: Basis::Pair(*vectors), outcome: *outcome, remove: true }
                }
            });
        }
        ops
    }

    pub fn run_oracle(&self) -> Result<DensityOperator> {
        Ok(simulate(self.n, &self.oracle_ops())?.state)
    }

    pub fn measured_sites(&self) -> Vec<usize> {
        self.ops
            .iter()
            .filter_map(|op| match op {
                SiteOp::Measure { site, .. } => Some(*site),
                _ => None,
            })
            .collect()
    }

    /// Same program with measurement outcomes replaced, in program order.
    pub fn with_outcomes(&self, outcomes: &[u8]) -> Self {
        let mut it = outcomes.iter();
        let ops = self
            .ops
            .iter()
            .map(|op| match op {
                SiteOp::Measure { site, vectors, outcome } => {
                    SiteOp::Measure { site: *site, vectors: *vectors, outcome: it.next().copied().unwrap_or(*outcome) }
                }
                other => other.clone(),
            })
            .collect();
        Self { ops, ..self.clone() }
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.ops.iter().all(|op| match op {
            SiteOp::Channel { channel, .. } => channel.kind() == ChannelKind::TracePreserving,
            _ => true,
        })
    }
}

/// Applies `ops` to `state` in order.
pub fn apply_site_ops(mut state: MpoState, ops: &[SiteOp]) -> Result<MpoState> {
    for op in ops {
        state = match op {
            SiteOp::Pauli { site, a, b } => state.apply_pauli(*site, *a, *b)?,
            SiteOp::Unitary { site, u } => state.apply_unitary(*site, u)?,
            SiteOp::Channel { site, channel } => state.apply_channel(*site, channel)?,
            SiteOp::Measure { site, vectors, outcome } => {
                state.measure(*site, &vectors[(*outcome & 1) as usize], *outcome)?
            }
        };
    }
    Ok(state)
}

/// Random program on a cluster of `n` sites: Paulis, unitaries and channels on
/// random sites, then X or equatorial measurements on a random subset of the
/// non-boundary sites.
pub fn random_program<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MpoProgram {
    let mut ops = Vec::new();
    let updates = rng.random_range(1..=2 * n);
    for _ in 0..updates {
        let site = rng.random_range(0..n);
        ops.push(match rng.random_range(0..3) {
            0 => SiteOp::Pauli { site, a: rng.random_range(0..2), b: rng.random_range(0..2) },
            1 => SiteOp::Unitary { site, u: random_unitary(rng, 2) },
            _ => {
                let rank = rng.random_range(1..=3);
                SiteOp::Channel { site, channel: random_channel(rng, rank) }
            }
        });
    }
    for site in 0..n - 1 {
        if rng.random_bool(0.6) {
            let outcome = rng.random_range(0..2);
            ops.push(if rng.random_bool(0.5) {
                SiteOp::measure_x(site, outcome)
            } else {
                let phi = random_angle(rng);
                SiteOp::Measure { site, vectors: [gates::equatorial(phi, 0), gates::equatorial(phi, 1)], outcome }
            });
        }
    }
    MpoProgram { builder: Builder::Cluster, n, ops }
}
