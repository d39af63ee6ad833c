use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use noisy_mbqc::block::{compose_block_noise, BlockNoiseConfig};
use noisy_mbqc::channels::KrausChannel;
use noisy_mbqc::mpo::MpoState;
use noisy_mbqc::oracle::block_oracle_channel;
use noisy_mbqc::parallel::{self, Execution};
use noisy_mbqc::random::random_block_config;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn noisy_cluster(n: usize) -> MpoState {
    let bf = KrausChannel::bit_flip(0.1).unwrap();
    let ad = KrausChannel::amplitude_damping(0.2).unwrap();
    let mut state = MpoState::cluster(n).unwrap();
    for site in 0..n {
        let ch = if site % 2 == 0 { &bf } else { &ad };
        state = state.apply_channel(site, ch).unwrap();
    }
    state
}

fn bench_contract(c: &mut Criterion) {
    let mut group = c.benchmark_group("mpo_contract");
    group.sample_size(10);
    for n in [6, 8] {
        let state = noisy_cluster(n);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &state, |b, s| {
                b.iter(|| black_box(s.contract_with(exec).unwrap()))
            });
        }
    }
    group.finish();
}

fn bench_block_suite(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let configs: Vec<BlockNoiseConfig> = (0..32).map(|i| random_block_config(&mut rng, (i % 2) as u8)).collect();
    let mut group = c.benchmark_group("block_suite");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                parallel::map(exec, &configs, |cfg| {
                    let closed = compose_block_noise(cfg).unwrap().choi();
                    closed.max_entry_diff(&block_oracle_channel(cfg).unwrap())
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_contract, bench_block_suite);
criterion_main!(benches);
