//! The two-qubit building block of one-dimensional MBQC and its noise mappings.
//!
//! A block takes an input qubit `rho`, attaches a `|+>` qubit with a controlled-Z,
//! and measures the input qubit. Noise can act at four places:
//!
//! | location | where                                     |
//! |----------|-------------------------------------------|
//! | `alpha1` | on the input qubit, before the block      |
//! | `alpha2` | on the fresh `|+>` qubit, before the CZ   |
//! | `alpha3` | on the input qubit, just before measuring |
//! | `alpha4` | on the output qubit, after the block      |
//!
//! For equatorial measurements the noisy block equals
//! `alpha4 . map(alpha2) . eps_k . map_k(alpha3) . alpha1`, where the mapped channels
//! are diagonal in the computational basis.

use serde::{Deserialize, Serialize};

use crate::channels::{pauli_decompose, KrausChannel, PauliConvention};
use crate::densemath::{gates, CMatrix, DensityOperator, C64, I};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasBasis {
    /// Computational basis.
    Z,
    /// Eigenbasis of `R_z(phi) X R_z(-phi)`, angle in radians.
    Equatorial(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasSpec {
    pub basis: MeasBasis,
    pub outcome: u8,
}

impl MeasSpec {
    pub fn z(outcome: u8) -> Self {
        Self { basis: MeasBasis::Z, outcome }
    }

    pub fn equatorial(phi: f64, outcome: u8) -> Self {
        Self { basis: MeasBasis::Equatorial(phi), outcome }
    }

    pub fn validate(&self) -> Result<()> {
        if self.outcome > 1 {
            return Err(Error::InvalidSize(format!("measurement outcome {} is not a bit", self.outcome)));
        }
        if let MeasBasis::Equatorial(phi) = self.basis {
            if !phi.is_finite() {
                return Err(Error::InvalidSize(format!("measurement angle {phi} is not finite")));
            }
        }
        Ok(())
    }

    /// The basis vector selected by outcome `k`.
    pub fn basis_vector(&self, k: u8) -> [C64; 2] {
        match self.basis {
            MeasBasis::Z => {
                if k == 0 {
                    gates::ket0()
                } else {
                    gates::ket1()
                }
            }
            MeasBasis::Equatorial(phi) => gates::equatorial(phi, k),
        }
    }

    /// The basis vector of the recorded outcome.
    pub fn vector(&self) -> [C64; 2] {
        self.basis_vector(self.outcome)
    }

    pub fn with_outcome(&self, outcome: u8) -> Self {
        Self { basis: self.basis, outcome }
    }
}

/// Where a noise channel acts relative to the block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseLocation {
    Input,
    Resource,
    Measurement,
    Output,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct BlockNoiseConfig {
    pub alpha1: Option<KrausChannel>,
    pub alpha2: Option<KrausChannel>,
    pub alpha3: Option<KrausChannel>,
    pub alpha4: Option<KrausChannel>,
    pub meas: MeasSpec,
}

impl Default for MeasSpec {
    fn default() -> Self {
        MeasSpec::equatorial(0.0, 0)
    }
}

impl BlockNoiseConfig {
    pub fn noiseless(meas: MeasSpec) -> Self {
        Self { meas, ..Default::default() }
    }

    pub fn with_alpha1(mut self, ch: KrausChannel) -> Self {
        self.alpha1 = Some(ch);
        self
    }

    pub fn with_alpha2(mut self, ch: KrausChannel) -> Self {
        self.alpha2 = Some(ch);
        self
    }

    pub fn with_alpha3(mut self, ch: KrausChannel) -> Self {
        self.alpha3 = Some(ch);
        self
    }

    pub fn with_alpha4(mut self, ch: KrausChannel) -> Self {
        self.alpha4 = Some(ch);
        self
    }

    pub fn with_outcome(&self, outcome: u8) -> Self {
        Self { meas: self.meas.with_outcome(outcome), ..self.clone() }
    }

    /// Present channels with their locations, in application order.
    pub fn noise(&self) -> impl Iterator<Item = (NoiseLocation, &KrausChannel)> {
        [
            (NoiseLocation::Input, &self.alpha1),
            (NoiseLocation::Measurement, &self.alpha3),
            (NoiseLocation::Resource, &self.alpha2),
            (NoiseLocation::Output, &self.alpha4),
        ]
        .into_iter()
        .filter_map(|(loc, ch)| ch.as_ref().map(|c| (loc, c)))
    }

    pub fn validate(&self) -> Result<()> {
        self.meas.validate()?;
        for (_, ch) in self.noise() {
            if ch.dim() != 2 {
                return Err(Error::DimensionMismatch(format!(
                    "block noise must act on one qubit, got a {}-dimensional channel",
                    ch.dim()
                )));
            }
        }
        Ok(())
    }
}

/// A block's post-selected channel together with the measurement it realizes.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockChannel {
    pub kraus: KrausChannel,
    pub meas: MeasSpec,
    /// Noise locations folded into `kraus`.
    pub noise: Vec<NoiseLocation>,
}

impl BlockChannel {
    pub fn choi(&self) -> crate::channels::ChoiMatrix {
        self.kraus.choi()
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.kraus.apply(rho)
    }
}

/// Kraus operator of the noiseless block.
pub fn ideal_kraus(spec: &MeasSpec) -> CMatrix {
    let k = spec.outcome & 1;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    match spec.basis {
        MeasBasis::Z => gates::xz_power(0, k).scale_real(inv_sqrt2),
        MeasBasis::Equatorial(phi) => {
            gates::xz_power(k, 0).matmul(&gates::h()).matmul(&gates::rz(-phi)).scale_real(inv_sqrt2)
        }
    }
}

/// `{Z^k / sqrt 2}` for the computational basis, `{X^k H e^{i phi Z/2} / sqrt 2}`
/// for an equatorial measurement.
pub fn ideal_block(spec: MeasSpec) -> Result<BlockChannel> {
    spec.validate()?;
    let kraus = KrausChannel::validate(vec![ideal_kraus(&spec)])?;
    Ok(BlockChannel { kraus, meas: spec, noise: Vec::new() })
}

fn check_qubit(ch: &KrausChannel) -> Result<()> {
    if ch.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("expected a single-qubit channel, got dimension {}", ch.dim())));
    }
    Ok(())
}

/// Output-side equivalent of one Kraus operator acting on the fresh `|+>` qubit.
///
/// With `K = sum a_uv (-i)^{uv} Z^u X^v`, the `X` factor stabilizes `|+>` and the
/// `Z` factor commutes through the CZ onto the output qubit, giving
/// `(a_00 + a_01) I + (a_10 - i a_11) Z`.
pub fn map_resource_operator(k: &CMatrix) -> Result<CMatrix> {
    let a = pauli_decompose(k, PauliConvention::ZxMeas)?;
    let t0 = a.get(0, 0) + a.get(0, 1);
    let t1 = a.get(1, 0) - I * a.get(1, 1);
    Ok(diag_pauli(t0, t1))
}

/// Output-side equivalent of one Kraus operator acting on the measured qubit
/// just before an equatorial measurement with outcome `outcome`.
///
/// With `K` expanded in the rotated basis, the rotated `X` acts on the
/// measurement eigenvector as `(-1)^k` and the `Z` factor commutes with the CZ
/// back onto the block input:
/// `(a_00 + (-1)^k a_01) I + (a_10 + i (-1)^k a_11) Z`.
pub fn map_measurement_operator(k: &CMatrix, phi: f64, outcome: u8) -> Result<CMatrix> {
    let a = pauli_decompose(k, PauliConvention::XzRotated { phi })?;
    let sign = if outcome & 1 == 0 { 1.0 } else { -1.0 };
    let t0 = a.get(0, 0) + a.get(0, 1) * sign;
    let t1 = a.get(1, 0) + I * a.get(1, 1) * sign;
    Ok(diag_pauli(t0, t1))
}

/// `t0 I + t1 Z`.
fn diag_pauli(t0: C64, t1: C64) -> CMatrix {
    CMatrix::diag(&[t0 + t1, t0 - t1])
}

/// Channel on the block output equivalent to `alpha2` on the resource qubit.
/// Kraus operators keep their order; the result need not be trace-non-increasing
/// on its own.
pub fn map_resource_noise(alpha2: &KrausChannel) -> Result<KrausChannel> {
    check_qubit(alpha2)?;
    let ops = alpha2.ops().iter().map(map_resource_operator).collect::<Result<Vec<_>>>()?;
    KrausChannel::completely_positive(ops)
}

/// Outcome-dependent channel on the block input equivalent to `alpha3` acting
/// just before the measurement.
pub fn map_measurement_noise(alpha3: &KrausChannel, phi: f64, outcome: u8) -> Result<KrausChannel> {
    check_qubit(alpha3)?;
    if !phi.is_finite() {
        return Err(Error::InvalidSize(format!("measurement angle {phi} is not finite")));
    }
    let ops = alpha3.ops().iter().map(|k| map_measurement_operator(k, phi, outcome)).collect::<Result<Vec<_>>>()?;
    KrausChannel::completely_positive(ops)
}

/// The full noisy block `alpha4 . map(alpha2) . eps_k . map_k(alpha3) . alpha1`
/// for an equatorial measurement.
pub fn compose_block_noise(cfg: &BlockNoiseConfig) -> Result<BlockChannel> {
    cfg.validate()?;
    let phi = match cfg.meas.basis {
        MeasBasis::Z => return Err(Error::ZBasisUnsupported),
        MeasBasis::Equatorial(phi) => phi,
    };
    let k = cfg.meas.outcome;
    let mut chain: Vec<KrausChannel> = Vec::with_capacity(5);
    let mut noise = Vec::new();
    if let Some(a1) = &cfg.alpha1 {
        chain.push(a1.clone());
        noise.push(NoiseLocation::Input);
    }
    if let Some(a3) = &cfg.alpha3 {
        chain.push(map_measurement_noise(a3, phi, k)?);
        noise.push(NoiseLocation::Measurement);
    }
    chain.push(ideal_block(cfg.meas)?.kraus);
    if let Some(a2) = &cfg.alpha2 {
        chain.push(map_resource_noise(a2)?);
        noise.push(NoiseLocation::Resource);
    }
    if let Some(a4) = &cfg.alpha4 {
        chain.push(a4.clone());
        noise.push(NoiseLocation::Output);
    }
    let kraus = KrausChannel::sequence(&chain)?;
    Ok(BlockChannel { kraus, meas: cfg.meas, noise })
}

/// Channel of one block of a sequence. Computational-basis blocks accept only
/// input and output noise.
pub fn block_channel(cfg: &BlockNoiseConfig) -> Result<BlockChannel> {
    match cfg.meas.basis {
        MeasBasis::Equatorial(_) => compose_block_noise(cfg),
        MeasBasis::Z => {
            cfg.validate()?;
            if cfg.alpha2.is_some() || cfg.alpha3.is_some() {
                return Err(Error::ZBasisUnsupported);
            }
            let ideal = ideal_block(cfg.meas)?;
            let mut chain = Vec::new();
            let mut noise = Vec::new();
            if let Some(a1) = &cfg.alpha1 {
                chain.push(a1.clone());
                noise.push(NoiseLocation::Input);
            }
            chain.push(ideal.kraus);
            if let Some(a4) = &cfg.alpha4 {
                chain.push(a4.clone());
                noise.push(NoiseLocation::Output);
            }
            Ok(BlockChannel { kraus: KrausChannel::sequence(&chain)?, meas: cfg.meas, noise })
        }
    }
}

/// Applies the blocks in order; the output trace is the joint branch probability.
pub fn run_block_sequence(input: &DensityOperator, blocks: &[BlockNoiseConfig]) -> Result<DensityOperator> {
    if blocks.is_empty() {
        return Err(Error::InvalidSize("block sequence is empty".into()));
    }
    if input.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("block input must be one qubit, got dimension {}", input.dim())));
    }
    blocks.iter().try_fold(input.clone(), |rho, cfg| block_channel(cfg)?.apply(&rho))
}

/// Composite channel of a whole sequence, first block first.
pub fn sequence_channel(blocks: &[BlockNoiseConfig]) -> Result<KrausChannel> {
    let chans = blocks.iter().map(|cfg| block_channel(cfg).map(|b| b.kraus)).collect::<Result<Vec<_>>>()?;
    KrausChannel::sequence(&chans)
}

/// `(-1)^{sum of selected outcomes} phi`, the adapted angle of a block whose
/// basis depends on earlier outcomes.
pub fn adapted_angle(phi: f64, outcomes: &[u8], depends_on: &[usize]) -> f64 {
    let parity = depends_on.iter().fold(0u8, |acc, &j| acc ^ (outcomes[j] & 1));
    if parity == 0 {
        phi
    } else {
        -phi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densemath::gates::*;
    use crate::densemath::{ONE, ZERO};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: &CMatrix, b: &CMatrix) -> bool {
        a.approx_eq(b, 1e-12)
    }

    #[test]
    fn ideal_examples() {
        let b = ideal_block(MeasSpec::equatorial(0.0, 0)).unwrap();
        assert!(close(&b.kraus.ops()[0], &h().scale_real(FRAC_1_SQRT_2)));

        let phi = 0.9;
        let b = ideal_block(MeasSpec::equatorial(phi, 1)).unwrap();
        let expected = x().matmul(&h()).matmul(&rz(-phi)).scale_real(FRAC_1_SQRT_2);
        assert!(close(&b.kraus.ops()[0], &expected));

        let b = ideal_block(MeasSpec::z(1)).unwrap();
        assert!(close(&b.kraus.ops()[0], &z().scale_real(FRAC_1_SQRT_2)));
    }

    #[test]
    fn ideal_block_halves_trace() {
        let b = ideal_block(MeasSpec::equatorial(1.3, 1)).unwrap();
        let out = b.apply(&plus_state()).unwrap();
        assert!((out.trace() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn resource_noise_examples() {
        let p = 0.3;
        let bf = KrausChannel::bit_flip(p).unwrap();
        let mapped = map_resource_noise(&bf).unwrap();
        assert!(mapped.choi_eq(&KrausChannel::identity(2), 1e-14));

        let pf = KrausChannel::phase_flip(p).unwrap();
        assert!(map_resource_noise(&pf).unwrap().choi_eq(&pf, 1e-14));

        let hn = KrausChannel::unitary_noise(p, &h()).unwrap();
        let mapped = map_resource_noise(&hn).unwrap();
        assert!(close(&mapped.ops()[0], &id2().scale_real((1.0 - p).sqrt())));
        assert!(close(&mapped.ops()[1], &proj(0).scale_real((2.0 * p).sqrt())));
    }

    #[test]
    fn measurement_noise_examples() {
        let p = 0.2;
        for k in 0..2 {
            let bf = KrausChannel::bit_flip(p).unwrap();
            let mapped = map_measurement_noise(&bf, 0.0, k).unwrap();
            assert!(mapped.choi_eq(&KrausChannel::identity(2), 1e-14));

            let pf = KrausChannel::phase_flip(p).unwrap();
            assert!(map_measurement_noise(&pf, 0.0, k).unwrap().choi_eq(&pf, 1e-14));

            let hn = KrausChannel::unitary_noise(p, &h()).unwrap();
            let mapped = map_measurement_noise(&hn, 0.0, k).unwrap();
            let sign = if k == 0 { 1.0 } else { -1.0 };
            assert!(close(&mapped.ops()[1], &proj(k).scale_real(sign * (2.0 * p).sqrt())));
        }
    }

    #[test]
    fn resource_table() {
        let conv = PauliConvention::ZxMeas;
        let expected = [
            ((0, 0), diag_pauli(ONE, ZERO)),
            ((0, 1), diag_pauli(ONE, ZERO)),
            ((1, 0), diag_pauli(ZERO, ONE)),
            ((1, 1), diag_pauli(ZERO, -I)),
        ];
        for ((g, h), want) in expected {
            let got = map_resource_operator(&conv.basis_element(g, h)).unwrap();
            assert!(close(&got, &want), "sigma_{g}{h}");
        }
    }

    #[test]
    fn measurement_table() {
        for phi in [0.0, 0.4, PI / 2.0, 2.5] {
            let conv = PauliConvention::XzRotated { phi };
            for k in 0..2u8 {
                let s = if k == 0 { 1.0 } else { -1.0 };
                let expected = [
                    ((0, 0), diag_pauli(ONE, ZERO)),
                    ((1, 0), diag_pauli(ZERO, ONE)),
                    ((0, 1), diag_pauli(ONE * s, ZERO)),
                    ((1, 1), diag_pauli(ZERO, I * s)),
                ];
                for ((g, h), want) in expected {
                    let got = map_measurement_operator(&conv.basis_element(g, h), phi, k).unwrap();
                    assert!(close(&got, &want), "phi={phi} k={k} sigma_{g}{h}");
                }
            }
        }
    }

    #[test]
    fn compose_noiseless_is_ideal() {
        let spec = MeasSpec::equatorial(0.77, 1);
        let composed = compose_block_noise(&BlockNoiseConfig::noiseless(spec)).unwrap();
        assert!(composed.kraus.choi_eq(&ideal_block(spec).unwrap().kraus, 1e-14));
    }

    #[test]
    fn compose_input_and_output_only() {
        let spec = MeasSpec::equatorial(0.3, 0);
        let a = KrausChannel::amplitude_damping(0.25).unwrap();
        let ideal = ideal_block(spec).unwrap().kraus;
        let c1 = compose_block_noise(&BlockNoiseConfig::noiseless(spec).with_alpha1(a.clone())).unwrap();
        assert!(c1.kraus.choi_eq(&KrausChannel::compose(&ideal, &a).unwrap(), 1e-14));
        let c4 = compose_block_noise(&BlockNoiseConfig::noiseless(spec).with_alpha4(a.clone())).unwrap();
        assert!(c4.kraus.choi_eq(&KrausChannel::compose(&a, &ideal).unwrap(), 1e-14));
    }

    #[test]
    fn compose_rejects_z_basis() {
        let cfg = BlockNoiseConfig::noiseless(MeasSpec::z(0));
        assert_eq!(compose_block_noise(&cfg), Err(Error::ZBasisUnsupported));
        assert!(block_channel(&cfg).is_ok());
        let noisy = cfg.with_alpha2(KrausChannel::bit_flip(0.1).unwrap());
        assert_eq!(block_channel(&noisy), Err(Error::ZBasisUnsupported));
    }

    #[test]
    fn sequence_examples() {
        let one = [BlockNoiseConfig::noiseless(MeasSpec::equatorial(0.0, 0))];
        let out = run_block_sequence(&plus_state(), &one).unwrap();
        assert!(close(out.matrix(), &proj(0).scale_real(0.5)));

        let two = [one[0].clone(), one[0].clone()];
        let out = run_block_sequence(&plus_state(), &two).unwrap();
        assert!(close(out.matrix(), &plus_state().matrix().scale_real(0.25)));

        let many: Vec<_> =
            (0..9).map(|i| BlockNoiseConfig::noiseless(MeasSpec::equatorial(0.1 * i as f64, (i % 2) as u8))).collect();
        let out = run_block_sequence(&plus_state(), &many).unwrap();
        assert!((out.trace() * 2f64.powi(9) - 1.0).abs() < 1e-12);
        assert!(run_block_sequence(&plus_state(), &[]).is_err());
    }

    #[test]
    fn adapted_angle_flips_sign_on_odd_parity() {
        assert_eq!(adapted_angle(0.5, &[1, 0, 1], &[0, 2]), 0.5);
        assert_eq!(adapted_angle(0.5, &[1, 0, 1], &[0, 1]), -0.5);
    }
}
