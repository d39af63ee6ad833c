//! Experiment documents.
//!
//! A document is a JSON object with a `kind` (`teleport`, `block_chain` or
//! `mpo`), a table of named `channels`, an optional `seed` and `tolerance`, and
//! the section matching its kind. Channel references may also be the reserved
//! name `"random"`, which draws a fresh random channel from the seeded generator
//! for every repetition.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use noisy_mbqc::channels::{ChannelKind, KrausChannel};
use noisy_mbqc::densemath::{gates, CMatrix, DensityOperator, C64};
use noisy_mbqc::program::Builder;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::SpecError;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const RANDOM_REF: &str = "random";
const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Teleport,
    BlockChain,
    Mpo,
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub seed: u64,
    pub tolerance: f64,
    pub experiment: Experiment,
    /// SHA-256 of the source document, hex encoded.
    pub spec_hash: String,
    /// Directory that relative `save`/`load` paths are resolved against.
    pub base_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn kind(&self) -> ExperimentKind {
        match self.experiment {
            Experiment::Teleport(_) => ExperimentKind::Teleport,
            Experiment::BlockChain(_) => ExperimentKind::BlockChain,
            Experiment::Mpo(_) => ExperimentKind::Mpo,
        }
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.base_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Experiment {
    Teleport(TeleportSpec),
    BlockChain(ChainSpec),
    Mpo(MpoSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Noise {
    Fixed(KrausChannel),
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcomes {
    Fixed(u8),
    Both,
}

impl Outcomes {
    pub fn values(self) -> Vec<u8> {
        match self {
            Outcomes::Fixed(k) => vec![k],
            Outcomes::Both => vec![0, 1],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BlockBasis {
    Z,
    Equatorial(Angle),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockTemplate {
    pub basis: BlockBasis,
    pub k: Outcomes,
    /// Noise at input, resource, measurement and output, in that order.
    pub alpha: [Option<Noise>; 4],
    /// Earlier blocks whose outcome parity flips the sign of the angle.
    pub depends_on: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    pub blocks: Vec<BlockTemplate>,
    pub repeat: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TeleportSpec {
    pub resource: KrausChannel,
    pub states: Vec<DensityOperator>,
    pub random_states: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MpoOp {
    Pauli { site: usize, x: u8, z: u8 },
    Unitary { site: usize, u: CMatrix },
    Channel { site: usize, channel: KrausChannel },
    Measure { site: usize, vectors: [[C64; 2]; 2], k: Outcomes },
}

#[derive(Clone, Debug, PartialEq)]
pub enum MpoSource {
    Builder { builder: Builder, n: usize },
    Load(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MpoSpec {
    pub source: MpoSource,
    pub ops: Vec<MpoOp>,
    pub save: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: ExperimentKind,
    #[serde(default)]
    channels: BTreeMap<String, Value>,
    #[serde(default)]
    seed: u64,
    tolerance: Option<f64>,
    chain: Option<Vec<RawBlock>>,
    repeat: Option<usize>,
    teleport: Option<RawTeleport>,
    mpo: Option<RawMpo>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    phi: Option<Value>,
    basis: Option<String>,
    k: Option<Value>,
    alpha1: Option<String>,
    alpha2: Option<String>,
    alpha3: Option<String>,
    alpha4: Option<String>,
    #[serde(default)]
    depends_on: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTeleport {
    resource: String,
    #[serde(default)]
    states: Vec<CMatrix>,
    #[serde(default)]
    random_states: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMpo {
    builder: Option<Builder>,
    n: Option<usize>,
    #[serde(default)]
    ops: Vec<RawOp>,
    save: Option<PathBuf>,
    load: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum RawOp {
    Pauli {
        site: usize,
        #[serde(default)]
        x: u8,
        #[serde(default)]
        z: u8,
    },
    Unitary {
        site: usize,
        matrix: CMatrix,
    },
    Channel {
        site: usize,
        channel: String,
    },
    Measure {
        site: usize,
        basis: Option<Value>,
        k: Option<Value>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireChannel {
    dim: usize,
    kind: Option<ChannelKind>,
    ops: Vec<CMatrix>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum NamedChannel {
    Identity,
    BitFlip {
        p: f64,
    },
    PhaseFlip {
        p: f64,
    },
    /// `(1 - p) rho + p I/2`.
    Depolarizing {
        p: f64,
    },
    CompletelyDepolarizing,
    /// Probabilities of I, X, Y, Z.
    Pauli {
        probs: [f64; 4],
    },
    AmplitudeDamping {
        gamma: f64,
    },
    UnitaryNoise {
        p: f64,
        unitary: CMatrix,
    },
}

/// Parses and validates an experiment document.
pub fn parse_experiment(text: &str) -> Result<ExperimentSpec, SpecError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        SpecError::Parse { path, line: inner.line(), column: inner.column(), message: inner.to_string() }
    })?;
    let spec_hash = hex::encode(Sha256::digest(text.as_bytes()));
    build(raw, spec_hash)
}

/// Reads and parses a document; relative paths inside it resolve against its directory.
pub fn load_experiment(path: &Path) -> Result<ExperimentSpec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.to_path_buf(), source })?;
    let mut spec = parse_experiment(&text)?;
    spec.base_dir = path.parent().map(Path::to_path_buf);
    Ok(spec)
}

fn build(raw: RawSpec, spec_hash: String) -> Result<ExperimentSpec, SpecError> {
    let tolerance = raw.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(SpecError::invalid("tolerance", format!("must be a non-negative number, got {tolerance}")));
    }
    let channels = parse_channels(&raw.channels)?;
    let section = |present: bool, name: &str| {
        if present {
            Err(SpecError::invalid(name, format!("not allowed for a {:?} experiment", raw.kind)))
        } else {
            Ok(())
        }
    };
    let experiment = match raw.kind {
        ExperimentKind::BlockChain => {
            section(raw.teleport.is_some(), "teleport")?;
            section(raw.mpo.is_some(), "mpo")?;
            Experiment::BlockChain(parse_chain(raw.chain.unwrap_or_default(), raw.repeat, &channels)?)
        }
        ExperimentKind::Teleport => {
            section(raw.chain.is_some(), "chain")?;
            section(raw.repeat.is_some(), "repeat")?;
            section(raw.mpo.is_some(), "mpo")?;
            let t = raw.teleport.ok_or_else(|| SpecError::invalid("teleport", "missing section"))?;
            Experiment::Teleport(parse_teleport(t, &channels)?)
        }
        ExperimentKind::Mpo => {
            section(raw.chain.is_some(), "chain")?;
            section(raw.repeat.is_some(), "repeat")?;
            section(raw.teleport.is_some(), "teleport")?;
            let m = raw.mpo.ok_or_else(|| SpecError::invalid("mpo", "missing section"))?;
            Experiment::Mpo(parse_mpo(m, &channels)?)
        }
    };
    Ok(ExperimentSpec { seed: raw.seed, tolerance, experiment, spec_hash, base_dir: None })
}

fn parse_channels(raw: &BTreeMap<String, Value>) -> Result<BTreeMap<String, KrausChannel>, SpecError> {
    let mut out = BTreeMap::new();
    for (name, value) in raw {
        let path = format!("channels.{name}");
        if name == RANDOM_REF {
            return Err(SpecError::invalid(path, "\"random\" is reserved"));
        }
        let ch = parse_channel(value, &path)?;
        if ch.dim() != 2 {
            return Err(SpecError::invalid(
                path,
                format!("expected a single-qubit channel, got dimension {}", ch.dim()),
            ));
        }
        out.insert(name.clone(), ch);
    }
    Ok(out)
}

fn value_error(path: &str, e: serde_json::Error) -> SpecError {
    SpecError::Parse { path: path.to_string(), line: e.line(), column: e.column(), message: e.to_string() }
}

fn parse_channel(value: &Value, path: &str) -> Result<KrausChannel, SpecError> {
    let not_a_channel = |source| SpecError::NotAChannel { path: path.to_string(), source };
    if value.get("ops").is_some() {
        let wire: WireChannel = serde_json::from_value(value.clone()).map_err(|e| value_error(path, e))?;
        if let Some(op) = wire.ops.iter().find(|op| op.rows() != wire.dim || op.cols() != wire.dim) {
            return Err(SpecError::invalid(
                path,
                format!("declared dim {} but found a {}x{} operator", wire.dim, op.rows(), op.cols()),
            ));
        }
        let ch = KrausChannel::validate(wire.ops).map_err(not_a_channel)?;
        if let Some(kind) = wire.kind {
            if kind != ch.kind() {
                return Err(SpecError::invalid(
                    path,
                    format!("declared kind {kind:?} but operators are {:?}", ch.kind()),
                ));
            }
        }
        return Ok(ch);
    }
    let named: NamedChannel = serde_json::from_value(value.clone()).map_err(|e| value_error(path, e))?;
    let probability = |p: f64| {
        if (0.0..=1.0).contains(&p) {
            Ok(p)
        } else {
            Err(SpecError::invalid(path, format!("probability {p} outside [0, 1]")))
        }
    };
    let ch = match named {
        NamedChannel::Identity => Ok(KrausChannel::identity(2)),
        NamedChannel::BitFlip { p } => KrausChannel::bit_flip(probability(p)?),
        NamedChannel::PhaseFlip { p } => KrausChannel::phase_flip(probability(p)?),
        NamedChannel::Depolarizing { p } => {
            let p = probability(p)?;
            KrausChannel::pauli([1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p])
        }
        NamedChannel::CompletelyDepolarizing => Ok(KrausChannel::completely_depolarizing()),
        NamedChannel::Pauli { probs } => {
            for p in probs {
                probability(p)?;
            }
            KrausChannel::pauli(probs)
        }
        NamedChannel::AmplitudeDamping { gamma } => KrausChannel::amplitude_damping(probability(gamma)?),
        NamedChannel::UnitaryNoise { p, unitary } => {
            check_unitary(&unitary, &format!("{path}.unitary"))?;
            KrausChannel::unitary_noise(probability(p)?, &unitary)
        }
    };
    ch.map_err(not_a_channel)
}

fn check_unitary(u: &CMatrix, path: &str) -> Result<(), SpecError> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(SpecError::invalid(path, format!("expected a 2x2 matrix, got {}x{}", u.rows(), u.cols())));
    }
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(SpecError::invalid(path, format!("not unitary (defect {defect:.3e})")));
    }
    Ok(())
}

fn resolve(name: &str, path: &str, channels: &BTreeMap<String, KrausChannel>) -> Result<Noise, SpecError> {
    if name == RANDOM_REF {
        return Ok(Noise::Random);
    }
    channels
        .get(name)
        .cloned()
        .map(Noise::Fixed)
        .ok_or_else(|| SpecError::UnknownChannelRef { path: path.to_string(), name: name.to_string() })
}

fn parse_outcomes(value: Option<&Value>, path: &str) -> Result<Outcomes, SpecError> {
    match value {
        None => Ok(Outcomes::Fixed(0)),
        Some(Value::String(s)) if s == "both" => Ok(Outcomes::Both),
        Some(Value::Number(n)) if n.as_u64() == Some(0) => Ok(Outcomes::Fixed(0)),
        Some(Value::Number(n)) if n.as_u64() == Some(1) => Ok(Outcomes::Fixed(1)),
        Some(other) => Err(SpecError::invalid(path, format!("expected 0, 1 or \"both\", got {other}"))),
    }
}

fn parse_angle(value: &Value, path: &str) -> Result<Angle, SpecError> {
    match value {
        Value::String(s) if s == RANDOM_REF => Ok(Angle::Random),
        Value::Number(n) => match n.as_f64() {
            Some(phi) if phi.is_finite() => Ok(Angle::Fixed(phi)),
            _ => Err(SpecError::invalid(path, "angle must be finite")),
        },
        other => Err(SpecError::invalid(path, format!("expected a number or \"random\", got {other}"))),
    }
}

fn parse_chain(
    raw: Vec<RawBlock>,
    repeat: Option<usize>,
    channels: &BTreeMap<String, KrausChannel>,
) -> Result<ChainSpec, SpecError> {
    if raw.is_empty() {
        return Err(SpecError::invalid("chain", "a block chain needs at least one block"));
    }
    let repeat = repeat.unwrap_or(1);
    if repeat == 0 {
        return Err(SpecError::invalid("repeat", "must be at least 1"));
    }
    let mut blocks = Vec::with_capacity(raw.len());
    for (j, b) in raw.into_iter().enumerate() {
        let at = |field: &str| format!("chain[{j}].{field}");
        let basis = match (b.basis.as_deref(), &b.phi) {
            (Some("z"), None) => BlockBasis::Z,
            (Some("z"), Some(_)) => return Err(SpecError::invalid(at("phi"), "a Z-basis block takes no angle")),
            (None | Some("equatorial"), Some(phi)) => BlockBasis::Equatorial(parse_angle(phi, &at("phi"))?),
            (None | Some("equatorial"), None) => {
                return Err(SpecError::invalid(at("phi"), "an equatorial block needs an angle"))
            }
            (Some(other), _) => {
                return Err(SpecError::invalid(
                    at("basis"),
                    format!("expected \"z\" or \"equatorial\", got \"{other}\""),
                ))
            }
        };
        if let Some(&d) = b.depends_on.iter().find(|&&d| d >= j) {
            return Err(SpecError::invalid(at("depends_on"), format!("block {d} is not an earlier block")));
        }
        if basis == BlockBasis::Z && !b.depends_on.is_empty() {
            return Err(SpecError::invalid(at("depends_on"), "a Z-basis block has no angle to adapt"));
        }
        let mut alpha: [Option<Noise>; 4] = Default::default();
        for (slot, (field, name)) in alpha.iter_mut().zip([
            ("alpha1", &b.alpha1),
            ("alpha2", &b.alpha2),
            ("alpha3", &b.alpha3),
            ("alpha4", &b.alpha4),
        ]) {
            if let Some(name) = name {
                *slot = Some(resolve(name, &at(field), channels)?);
            }
        }
        blocks.push(BlockTemplate {
            basis,
            k: parse_outcomes(b.k.as_ref(), &at("k"))?,
            alpha,
            depends_on: b.depends_on,
        });
    }
    Ok(ChainSpec { blocks, repeat })
}

fn parse_teleport(raw: RawTeleport, channels: &BTreeMap<String, KrausChannel>) -> Result<TeleportSpec, SpecError> {
    let resource = match resolve(&raw.resource, "teleport.resource", channels)? {
        Noise::Fixed(ch) => ch,
        Noise::Random => return Err(SpecError::invalid("teleport.resource", "must name a channel")),
    };
    let states = raw
        .states
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            let path = format!("teleport.states[{i}]");
            if m.rows() != 2 {
                return Err(SpecError::invalid(path, "expected a single-qubit density matrix"));
            }
            DensityOperator::new(m).map_err(|e| SpecError::invalid(path, e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if states.is_empty() && raw.random_states == 0 {
        return Err(SpecError::invalid("teleport", "give `states` or a positive `random_states`"));
    }
    Ok(TeleportSpec { resource, states, random_states: raw.random_states })
}

fn parse_basis(value: Option<&Value>, path: &str) -> Result<[[C64; 2]; 2], SpecError> {
    let bad = |msg: String| SpecError::invalid(path, msg);
    match value {
        None => Ok([gates::plus(), gates::minus()]),
        Some(Value::String(s)) => match s.as_str() {
            "x" => Ok([gates::plus(), gates::minus()]),
            "z" => Ok([gates::ket0(), gates::ket1()]),
            other => {
                Err(bad(format!("expected \"x\", \"z\", {{\"phi\": ..}} or {{\"vectors\": ..}}, got \"{other}\"")))
            }
        },
        Some(v @ Value::Object(map)) => {
            if let Some(phi) = map.get("phi") {
                match parse_angle(phi, &format!("{path}.phi"))? {
                    Angle::Fixed(phi) if map.len() == 1 => Ok([gates::equatorial(phi, 0), gates::equatorial(phi, 1)]),
                    Angle::Fixed(_) => Err(bad("unexpected extra fields".into())),
                    Angle::Random => Err(bad("measurement angles must be fixed numbers".into())),
                }
            } else if let Some(vs) = map.get("vectors") {
                let vs: [[C64; 2]; 2] = serde_json::from_value(vs.clone()).map_err(|e| value_error(path, e))?;
                let ip = |a: &[C64; 2], b: &[C64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
                let dev = [
                    (ip(&vs[0], &vs[0]).re - 1.0).abs(),
                    (ip(&vs[1], &vs[1]).re - 1.0).abs(),
                    ip(&vs[0], &vs[1]).norm(),
                ]
                .into_iter()
                .fold(0.0, f64::max);
                if dev > UNITARY_TOL {
                    return Err(bad(format!("basis vectors are not orthonormal (defect {dev:.3e})")));
                }
                Ok(vs)
            } else {
                Err(bad(format!("unrecognized basis {v}")))
            }
        }
        Some(other) => Err(bad(format!("unrecognized basis {other}"))),
    }
}

fn parse_mpo(raw: RawMpo, channels: &BTreeMap<String, KrausChannel>) -> Result<MpoSpec, SpecError> {
    let source = match (raw.load, raw.builder, raw.n) {
        (Some(path), None, None) => MpoSource::Load(path),
        (Some(_), _, _) => return Err(SpecError::invalid("mpo.load", "a loaded resource takes no builder or n")),
        (None, Some(builder), Some(n)) => {
            let min = if builder == Builder::OneClean { 2 } else { 1 };
            if n < min {
                return Err(SpecError::invalid("mpo.n", format!("{builder:?} needs at least {min} sites")));
            }
            MpoSource::Builder { builder, n }
        }
        (None, None, _) => return Err(SpecError::invalid("mpo.builder", "missing builder")),
        (None, Some(_), None) => return Err(SpecError::invalid("mpo.n", "missing site count")),
    };
    let limit = match source {
        MpoSource::Builder { n, .. } => Some(n),
        MpoSource::Load(_) => None,
    };
    let mut ops = Vec::with_capacity(raw.ops.len());
    for (i, op) in raw.ops.into_iter().enumerate() {
        let at = |field: &str| format!("mpo.ops[{i}].{field}");
        let site = match &op {
            RawOp::Pauli { site, .. }
            | RawOp::Unitary { site, .. }
            | RawOp::Channel { site, .. }
            | RawOp::Measure { site, .. } => *site,
        };
        if let Some(n) = limit {
            if site >= n {
                return Err(SpecError::invalid(at("site"), format!("site {site} out of range for {n} sites")));
            }
        }
        ops.push(match op {
            RawOp::Pauli { x, z, .. } => {
                if x > 1 || z > 1 {
                    return Err(SpecError::invalid(at("x"), "Pauli exponents must be 0 or 1"));
                }
                MpoOp::Pauli { site, x, z }
            }
            RawOp::Unitary { matrix, .. } => {
                check_unitary(&matrix, &at("matrix"))?;
                MpoOp::Unitary { site, u: matrix }
            }
            RawOp::Channel { channel, .. } => match resolve(&channel, &at("channel"), channels)? {
                Noise::Fixed(channel) => MpoOp::Channel { site, channel },
                Noise::Random => return Err(SpecError::invalid(at("channel"), "MPO programs take named channels")),
            },
            RawOp::Measure { basis, k, .. } => MpoOp::Measure {
                site,
                vectors: parse_basis(basis.as_ref(), &at("basis"))?,
                k: parse_outcomes(k.as_ref(), &at("k"))?,
            },
        });
    }
    Ok(MpoSpec { source, ops, save: raw.save })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_chain() {
        let spec = parse_experiment(r#"{"kind": "block_chain", "chain": [{"phi": 0.0}]}"#).unwrap();
        assert_eq!(spec.kind(), ExperimentKind::BlockChain);
        assert_eq!(spec.tolerance, DEFAULT_TOLERANCE);
        let Experiment::BlockChain(chain) = spec.experiment else { panic!() };
        assert_eq!(chain.blocks[0].k, Outcomes::Fixed(0));
        assert_eq!(chain.blocks[0].basis, BlockBasis::Equatorial(Angle::Fixed(0.0)));
    }

    #[test]
    fn unknown_reference_names_the_path() {
        let err = parse_experiment(
            r#"{"kind": "block_chain", "chain": [{"phi": 0.0}, {"phi": 1.0, "alpha3": "alpha_bad"}]}"#,
        )
        .unwrap_err();
        match err {
            SpecError::UnknownChannelRef { path, name } => {
                assert_eq!(path, "chain[1].alpha3");
                assert_eq!(name, "alpha_bad");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn invalid_kraus_set() {
        let text = r#"{"kind": "block_chain", "channels": {"big": {"dim": 2, "ops": [[[[2,0],[0,0]],[[0,0],[1,0]]]]}},
                       "chain": [{"phi": 0.0}]}"#;
        match parse_experiment(text).unwrap_err() {
            SpecError::NotAChannel { path, source } => {
                assert_eq!(path, "channels.big");
                assert!(matches!(source, noisy_mbqc::Error::NotAChannel { .. }));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn syntax_errors_carry_location() {
        match parse_experiment("{\"kind\": \"block_chain\",\n \"chain\": [{\"phi\": 0.0, \"k\": 1,}]}").unwrap_err() {
            SpecError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("{other}"),
        }
        match parse_experiment(r#"{"kind": "block_chain", "chain": [{"phi": 0.0, "alpha5": "x"}]}"#).unwrap_err() {
            SpecError::Parse { path, .. } => assert!(path.starts_with("chain[0]"), "{path}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn chain_checks() {
        for (text, path) in [
            (r#"{"kind": "block_chain", "chain": []}"#, "chain"),
            (r#"{"kind": "block_chain", "chain": [{"phi": 0.0, "k": 2}]}"#, "chain[0].k"),
            (r#"{"kind": "block_chain", "chain": [{"phi": 0.0, "depends_on": [0]}]}"#, "chain[0].depends_on"),
            (r#"{"kind": "block_chain", "chain": [{"basis": "z", "phi": 1.0}]}"#, "chain[0].phi"),
            (r#"{"kind": "block_chain", "chain": [{"k": 0}]}"#, "chain[0].phi"),
            (r#"{"kind": "block_chain", "chain": [{"phi": 0.0}], "repeat": 0}"#, "repeat"),
            (r#"{"kind": "teleport", "teleport": {"resource": "random", "random_states": 1}}"#, "teleport.resource"),
        ] {
            match parse_experiment(text).unwrap_err() {
                SpecError::Invalid { path: p, .. } => assert_eq!(p, path, "{text}"),
                other => panic!("{text}: {other}"),
            }
        }
    }

    #[test]
    fn named_channels() {
        let text = r#"{"kind": "teleport",
            "channels": {
                "d": {"type": "phase_flip", "p": 0.5},
                "dep": {"type": "depolarizing", "p": 1.0},
                "h": {"type": "unitary_noise", "p": 0.2, "unitary": [[[0.7071067811865476,0],[0.7071067811865476,0]],[[0.7071067811865476,0],[-0.7071067811865476,0]]]}
            },
            "teleport": {"resource": "d", "random_states": 3}}"#;
        let spec = parse_experiment(text).unwrap();
        let Experiment::Teleport(t) = spec.experiment else { panic!() };
        assert!(t.resource.choi_eq(&KrausChannel::phase_flip(0.5).unwrap(), 1e-15));
        let bad = r#"{"kind": "teleport", "channels": {"d": {"type": "bit_flip", "p": 1.5}}, "teleport": {"resource": "d", "random_states": 1}}"#;
        assert!(matches!(parse_experiment(bad), Err(SpecError::Invalid { .. })));
    }

    #[test]
    fn mpo_checks() {
        let ok = r#"{"kind": "mpo", "channels": {"bf": {"type": "bit_flip", "p": 0.1}},
            "mpo": {"builder": "cluster", "n": 3, "ops": [
                {"op": "channel", "site": 2, "channel": "bf"},
                {"op": "pauli", "site": 1, "x": 1},
                {"op": "measure", "site": 0, "basis": {"phi": 0.4}, "k": "both"},
                {"op": "measure", "site": 1, "basis": "z"}]}}"#;
        let spec = parse_experiment(ok).unwrap();
        let Experiment::Mpo(m) = spec.experiment else { panic!() };
        assert_eq!(m.ops.len(), 4);
        let bad = r#"{"kind": "mpo", "mpo": {"builder": "cluster", "n": 3, "ops": [{"op": "pauli", "site": 3}]}}"#;
        match parse_experiment(bad).unwrap_err() {
            SpecError::Invalid { path, .. } => assert_eq!(path, "mpo.ops[0].site"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn hash_tracks_text() {
        let a = parse_experiment(r#"{"kind": "block_chain", "chain": [{"phi": 0.0}]}"#).unwrap();
        let b = parse_experiment(r#"{"kind": "block_chain", "chain": [{"phi": 0.0}] }"#).unwrap();
        assert_eq!(a.spec_hash.len(), 64);
        assert_ne!(a.spec_hash, b.spec_hash);
    }
}
