//! Case expansion and execution.

use std::path::Path;

use noisy_mbqc::block::{adapted_angle, sequence_channel, BlockNoiseConfig, MeasBasis, MeasSpec};
use noisy_mbqc::channels::{pauli_component, ChoiMatrix, KrausChannel};
use noisy_mbqc::densemath::{c, gates, trace_distance_matrix, CMatrix, DensityOperator, C64};
use noisy_mbqc::mpo::{MpoFile, MpoState};
use noisy_mbqc::oracle::{block_chain_ops, simulate};
use noisy_mbqc::parallel::{self, Execution};
use noisy_mbqc::program::{apply_site_ops, Builder, MpoProgram, SiteOp};
use noisy_mbqc::random::{random_angle, random_channel, random_density};
use noisy_mbqc::teleport::{
    diagonal_resource, pauli_teleport_branch, teleport_branch, teleport_oracle_branch, BellLabel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::RunError;
use crate::report::{CaseReport, Metadata, Report};
use crate::spec::{
    Angle, BlockBasis, ChainSpec, Experiment, ExperimentSpec, MpoOp, MpoSource, MpoSpec, Noise, TeleportSpec,
};

const MAX_RANDOM_RANK: usize = 4;

/// Prepared resource written by `save` and read by `load`: the preparation
/// program for the oracle plus the MPO it produced.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SavedResource {
    pub builder: Builder,
    pub n: usize,
    pub ops: Vec<SavedOp>,
    pub mpo: MpoFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum SavedOp {
    Pauli { site: usize, x: u8, z: u8 },
    Unitary { site: usize, matrix: CMatrix },
    Channel { site: usize, channel: KrausChannel },
}

impl SavedOp {
    fn site_op(&self) -> SiteOp {
        match self {
            SavedOp::Pauli { site, x, z } => SiteOp::Pauli { site: *site, a: *x, b: *z },
            SavedOp::Unitary { site, matrix } => SiteOp::Unitary { site: *site, u: matrix.clone() },
            SavedOp::Channel { site, channel } => SiteOp::Channel { site: *site, channel: channel.clone() },
        }
    }
}

enum CaseInput {
    Chain(Vec<BlockNoiseConfig>),
    Teleport { eps: KrausChannel, rho: DensityOperator, bell: BellLabel },
    Mpo { start: MpoState, ops: Vec<SiteOp>, oracle: MpoProgram },
}

struct Case {
    name: String,
    input: CaseInput,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Report, RunError> {
    run_experiment_filtered(spec, None)
}

/// Runs the cases whose name contains `filter` (all cases when `None`).
pub fn run_experiment_filtered(spec: &ExperimentSpec, filter: Option<&str>) -> Result<Report, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut cases = match &spec.experiment {
        Experiment::BlockChain(chain) => chain_cases(chain, &mut rng),
        Experiment::Teleport(t) => teleport_cases(t, &mut rng),
        Experiment::Mpo(m) => mpo_cases(spec, m)?,
    };
    if let Some(f) = filter {
        cases.retain(|c| c.name.contains(f));
    }
    let rows = parallel::try_map(Execution::default(), &cases, |case| {
        evaluate(&case.input, &case.name).map_err(|source| RunError::Case { case: case.name.clone(), source })
    })?;
    let metadata = Metadata { spec_hash: spec.spec_hash.clone(), seed: spec.seed, timestamp: None };
    Ok(Report::new(spec.kind(), rows, spec.tolerance, metadata))
}

fn outcome_strings(choices: &[Vec<u8>]) -> Vec<Vec<u8>> {
    choices.iter().fold(vec![vec![]], |acc, opts| {
        acc.iter()
            .flat_map(|prefix| {
                opts.iter().map(move |&k| {
                    let mut s = prefix.clone();
                    s.push(k);
                    s
                })
            })
            .collect()
    })
}

fn bits(outcomes: &[u8]) -> String {
    outcomes.iter().map(|k| char::from(b'0' + k)).collect()
}

fn sample_noise<R: Rng>(noise: &Option<Noise>, rng: &mut R) -> Option<KrausChannel> {
    match noise {
        None => None,
        Some(Noise::Fixed(ch)) => Some(ch.clone()),
        Some(Noise::Random) => {
            let rank = rng.random_range(1..=MAX_RANDOM_RANK);
            Some(random_channel(rng, rank))
        }
    }
}

fn chain_cases<R: Rng>(chain: &ChainSpec, rng: &mut R) -> Vec<Case> {
    let mut cases = Vec::new();
    for rep in 0..chain.repeat {
        let sampled: Vec<(MeasBasis, [Option<KrausChannel>; 4])> = chain
            .blocks
            .iter()
            .map(|b| {
                let basis = match b.basis {
                    BlockBasis::Z => MeasBasis::Z,
                    BlockBasis::Equatorial(Angle::Fixed(phi)) => MeasBasis::Equatorial(phi),
                    BlockBasis::Equatorial(Angle::Random) => MeasBasis::Equatorial(random_angle(rng)),
                };
                let alpha = [0, 1, 2, 3].map(|i| sample_noise(&b.alpha[i], rng));
                (basis, alpha)
            })
            .collect();
        let choices: Vec<Vec<u8>> = chain.blocks.iter().map(|b| b.k.values()).collect();
        for outcomes in outcome_strings(&choices) {
            let configs = chain
                .blocks
                .iter()
                .zip(&sampled)
                .enumerate()
                .map(|(j, (b, (basis, alpha)))| {
                    let basis = match *basis {
                        MeasBasis::Equatorial(phi) => {
                            MeasBasis::Equatorial(adapted_angle(phi, &outcomes, &b.depends_on))
                        }
                        MeasBasis::Z => MeasBasis::Z,
                    };
                    let [a1, a2, a3, a4] = alpha.clone();
                    BlockNoiseConfig {
                        alpha1: a1,
                        alpha2: a2,
                        alpha3: a3,
                        alpha4: a4,
                        meas: MeasSpec { basis, outcome: outcomes[j] },
                    }
                })
                .collect();
            let name = if chain.repeat == 1 {
                format!("k={}", bits(&outcomes))
            } else {
                format!("rep{rep}/k={}", bits(&outcomes))
            };
            cases.push(Case { name, input: CaseInput::Chain(configs) });
        }
    }
    cases
}

fn teleport_cases<R: Rng>(t: &TeleportSpec, rng: &mut R) -> Vec<Case> {
    let mut states = t.states.clone();
    states.extend((0..t.random_states).map(|_| random_density(rng, 1)));
    let mut cases = Vec::new();
    for (i, rho) in states.into_iter().enumerate() {
        for bell in BellLabel::all() {
            cases.push(Case {
                name: format!("state{i}/s={}t={}", bell.i, bell.j),
                input: CaseInput::Teleport { eps: t.resource.clone(), rho: rho.clone(), bell },
            });
        }
    }
    cases
}

fn read_resource(path: &Path) -> Result<SavedResource, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| RunError::ResourceFile { path: path.to_path_buf(), source })
}

fn write_resource(path: &Path, res: &SavedResource) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(res)
        .map_err(|source| RunError::ResourceFile { path: path.to_path_buf(), source })?;
    std::fs::write(path, text + "\n").map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

fn core_err(context: impl Into<String>) -> impl FnOnce(noisy_mbqc::Error) -> RunError {
    let context = context.into();
    move |source| RunError::Core { context, source }
}

fn mpo_cases(spec: &ExperimentSpec, m: &MpoSpec) -> Result<Vec<Case>, RunError> {
    let (builder, n, prefix, start) = match &m.source {
        MpoSource::Builder { builder, n } => {
            (*builder, *n, Vec::new(), builder.build(*n).map_err(core_err("mpo builder"))?)
        }
        MpoSource::Load(path) => {
            let path = spec.resolve(path);
            let res = read_resource(&path)?;
            let start = MpoState::from_file(res.mpo).map_err(core_err(format!("loading {}", path.display())))?;
            (res.builder, res.n, res.ops, start)
        }
    };

    if let Some(save) = &m.save {
        let prep: Vec<SavedOp> = m
            .ops
            .iter()
            .map_while(|op| match op {
                MpoOp::Pauli { site, x, z } => Some(SavedOp::Pauli { site: *site, x: *x, z: *z }),
                MpoOp::Unitary { site, u } => Some(SavedOp::Unitary { site: *site, matrix: u.clone() }),
                MpoOp::Channel { site, channel } => Some(SavedOp::Channel { site: *site, channel: channel.clone() }),
                MpoOp::Measure { .. } => None,
            })
            .collect();
        let site_ops: Vec<SiteOp> = prep.iter().map(SavedOp::site_op).collect();
        let state = apply_site_ops(start.clone(), &site_ops).map_err(core_err("preparing the saved resource"))?;
        let mut ops = prefix.clone();
        ops.extend(prep);
        write_resource(&spec.resolve(save), &SavedResource { builder, n, ops, mpo: state.to_file() })?;
    }

    let choices: Vec<Vec<u8>> = m
        .ops
        .iter()
        .filter_map(|op| match op {
            MpoOp::Measure { k, .. } => Some(k.values()),
            _ => None,
        })
        .collect();
    let prefix_ops: Vec<SiteOp> = prefix.iter().map(SavedOp::site_op).collect();
    let mut cases = Vec::new();
    for outcomes in outcome_strings(&choices) {
        let mut next = outcomes.iter();
        let ops: Vec<SiteOp> = m
            .ops
            .iter()
            .map(|op| match op {
                MpoOp::Pauli { site, x, z } => SiteOp::Pauli { site: *site, a: *x, b: *z },
                MpoOp::Unitary { site, u } => SiteOp::Unitary { site: *site, u: u.clone() },
                MpoOp::Channel { site, channel } => SiteOp::Channel { site: *site, channel: channel.clone() },
                MpoOp::Measure { site, vectors, .. } => SiteOp::Measure {
                    site: *site,
                    vectors: *vectors,
                    outcome: *next.next().expect("one outcome per measurement"),
                },
            })
            .collect();
        let oracle = MpoProgram { builder, n, ops: prefix_ops.iter().cloned().chain(ops.iter().cloned()).collect() };
        let name = if outcomes.is_empty() { "unmeasured".to_string() } else { format!("k={}", bits(&outcomes)) };
        cases.push(Case { name, input: CaseInput::Mpo { start: start.clone(), ops, oracle } });
    }
    Ok(cases)
}

/// Choi matrix of a block chain simulated gate by gate on the four states
/// `|0>, |1>, |+>, |+i>`, extended linearly to every `|i><j|`.
fn chain_oracle_choi(blocks: &[BlockNoiseConfig]) -> noisy_mbqc::Result<CMatrix> {
    if blocks.iter().any(|b| b.meas.basis == MeasBasis::Z) {
        return Err(noisy_mbqc::Error::ZBasisUnsupported);
    }
    let run = |amps: [C64; 2]| -> noisy_mbqc::Result<CMatrix> {
        let rho = DensityOperator::pure(&amps)?;
        Ok(simulate(blocks.len() + 1, &block_chain_ops(&rho, blocks))?.state.into_matrix())
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let e00 = run(gates::ket0())?;
    let e11 = run(gates::ket1())?;
    let ident = &e00 + &e11;
    let xpart = &run(gates::plus())?.scale_real(2.0) - &ident;
    let ypart = &run([c(s, 0.0), c(0.0, s)])?.scale_real(2.0) - &ident;
    let iy = ypart.scale(c(0.0, 1.0));
    let e01 = (&xpart + &iy).scale_real(0.5);
    let e10 = (&xpart - &iy).scale_real(0.5);
    Ok(ChoiMatrix::from_blocks(&[vec![e00, e01], vec![e10, e11]])?.matrix().clone())
}

fn is_pauli_channel(eps: &KrausChannel) -> bool {
    eps.ops().iter().all(|k| pauli_component(k, 1e-12).is_some())
}

fn evaluate(input: &CaseInput, name: &str) -> noisy_mbqc::Result<CaseReport> {
    let (closed, oracle, norm) = match input {
        CaseInput::Chain(blocks) => {
            let closed = sequence_channel(blocks)?.choi().matrix().clone();
            (closed, chain_oracle_choi(blocks)?, 0.5)
        }
        CaseInput::Teleport { eps, rho, bell } => {
            let closed = if is_pauli_channel(eps) {
                pauli_teleport_branch(eps, rho, bell.i, bell.j)?
            } else {
                teleport_branch(&diagonal_resource(eps)?, rho, bell.i, bell.j)?.state.into_matrix()
            };
            let oracle = teleport_oracle_branch(eps, rho, bell.i, bell.j)?.into_matrix();
            (closed, oracle, 1.0)
        }
        CaseInput::Mpo { start, ops, oracle } => {
            let closed = apply_site_ops(start.clone(), ops)?.contract()?.into_matrix();
            (closed, oracle.run_oracle()?.into_matrix(), 1.0)
        }
    };
    let trace_distance = trace_distance_matrix(&closed.scale_real(norm), &oracle.scale_real(norm))?;
    Ok(CaseReport {
        name: name.to_string(),
        branch_prob: closed.trace().re * norm,
        oracle_branch_prob: oracle.trace().re * norm,
        max_entry_diff: closed.max_abs_diff(&oracle),
        trace_distance,
        closed_form: closed,
        oracle,
    })
}
