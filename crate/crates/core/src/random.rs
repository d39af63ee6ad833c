//! Seedable sampling of random states, unitaries and channels.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::block::{BlockNoiseConfig, MeasSpec};
use crate::channels::KrausChannel;
use crate::densemath::{CMatrix, DensityOperator, C64};

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let data = (0..rows * cols).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    CMatrix::new(rows, cols, data).expect("gaussian samples are finite")
}

/// `rows x cols` matrix with orthonormal columns (`rows >= cols`), obtained by
/// Gram-Schmidt orthonormalization of a Gaussian matrix.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(rows >= cols, "an isometry needs rows >= cols");
    loop {
        let mut g = gaussian_matrix(rng, rows, cols);
        if orthonormalize_columns(&mut g) {
            return g;
        }
    }
}

/// Modified Gram-Schmidt in place; false if the columns were numerically dependent.
fn orthonormalize_columns(m: &mut CMatrix) -> bool {
    let (rows, cols) = (m.rows(), m.cols());
    for j in 0..cols {
        for p in 0..j {
            let overlap: C64 = (0..rows).map(|r| m.get(r, p).conj() * m.get(r, j)).sum();
            for r in 0..rows {
                let z = m.get(r, j) - overlap * m.get(r, p);
                m.set(r, j, z);
            }
        }
        let norm = (0..rows).map(|r| m.get(r, j).norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return false;
        }
        for r in 0..rows {
            let z = m.get(r, j) / norm;
            m.set(r, j, z);
        }
    }
    true
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    random_isometry(rng, dim, dim)
}

/// Random single-qubit CPTP channel with `rank` Kraus operators, read off the
/// `2 x 2` blocks of a random `2 rank x 2` isometry.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> KrausChannel {
    random_channel_dim(rng, 2, rank)
}

pub fn random_channel_dim<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> KrausChannel {
    let v = random_isometry(rng, dim * rank, dim);
    let ops = (0..rank)
        .map(|m| {
            let mut k = CMatrix::zeros(dim, dim);
            for r in 0..dim {
                for c in 0..dim {
                    k.set(r, c, v.get(m * dim + r, c));
                }
            }
            k
        })
        .collect();
    KrausChannel::validate_with_tol(ops, 1e-9).expect("isometry blocks form a channel")
}

/// Random full-rank mixed state on `qubits` qubits, `G G^dag / Tr(G G^dag)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, qubits: usize) -> DensityOperator {
    let d = 1 << qubits;
    let g = gaussian_matrix(rng, d, d);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityOperator::new(m.scale_real(1.0 / tr)).expect("G G^dag is a state")
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, qubits: usize) -> DensityOperator {
    let v = random_isometry(rng, 1 << qubits, 1);
    DensityOperator::pure(v.data()).expect("unit vector")
}

/// Uniform angle in `[0, 2 pi)`.
pub fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(0.0..std::f64::consts::TAU)
}

/// Block with random CPTP noise of rank 1 to 4 at all four locations and a
/// random equatorial angle.
pub fn random_block_config<R: Rng + ?Sized>(rng: &mut R, outcome: u8) -> BlockNoiseConfig {
    let ch = |rng: &mut R| {
        let rank = rng.random_range(1..=4);
        random_channel(rng, rank)
    };
    let (a1, a2, a3, a4) = (ch(rng), ch(rng), ch(rng), ch(rng));
    BlockNoiseConfig::noiseless(MeasSpec::equatorial(random_angle(rng), outcome))
        .with_alpha1(a1)
        .with_alpha2(a2)
        .with_alpha3(a3)
        .with_alpha4(a4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ChannelKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..6 {
            assert!(random_unitary(&mut rng, d).unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn channel_is_trace_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for rank in 1..5 {
            let ch = random_channel(&mut rng, rank);
            assert_eq!(ch.kind(), ChannelKind::TracePreserving);
            assert_eq!(ch.len(), rank);
        }
    }

    #[test]
    fn states_are_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_density(&mut rng, 2);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        let psi = random_pure(&mut rng, 3);
        let purity = psi.matrix().matmul(psi.matrix()).trace().re;
        assert!((purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let a = random_channel(&mut ChaCha8Rng::seed_from_u64(9), 3);
        let b = random_channel(&mut ChaCha8Rng::seed_from_u64(9), 3);
        assert_eq!(a, b);
    }
}
