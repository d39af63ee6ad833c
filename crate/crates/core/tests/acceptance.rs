//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::{Duration, Instant};

use noisy_mbqc::block::{
    compose_block_noise, ideal_block, map_measurement_noise, map_measurement_operator, map_resource_noise,
    map_resource_operator, run_block_sequence, BlockNoiseConfig, MeasSpec,
};
use noisy_mbqc::channels::{KrausChannel, PauliConvention};
use noisy_mbqc::densemath::gates::{self, h, id2, proj, x, xz_power, z};
use noisy_mbqc::densemath::{c, trace_distance_matrix, DensityOperator, C64, ONE, ZERO};
use noisy_mbqc::mpo::MpoState;
use noisy_mbqc::oracle::{block_oracle_channel, build_cluster_dm};
use noisy_mbqc::parallel::{self, Execution};
use noisy_mbqc::program::{random_program, Builder, MpoProgram, SiteOp};
use noisy_mbqc::random::{random_block_config, random_density};
use noisy_mbqc::teleport::{diagonal_resource, teleport_branch, teleport_oracle_branch, BellLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within_time(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let elapsed = start.elapsed();
    ensure(elapsed < limit, || format!("{what} took {elapsed:.2?}, limit {limit:.0?}"))
}

fn teleportation() -> Check {
    const TOL: f64 = 1e-10;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e1e);
    let deph = KrausChannel::phase_flip(0.5).map_err(err)?;
    let deph_res = diagonal_resource(&deph).map_err(err)?;
    let dep = KrausChannel::completely_depolarizing();
    let dep_res = diagonal_resource(&dep).map_err(err)?;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let rho = random_density(&mut rng, 1);
        let dephased = &rho.matrix().scale_real(0.5) + &z().conjugate(rho.matrix()).scale_real(0.5);
        for b in BellLabel::all() {
            let out = teleport_branch(&deph_res, &rho, b.i, b.j).map_err(err)?;
            let want = b.byproduct().conjugate(&dephased).scale_real(0.25);
            worst = worst.max(trace_distance_matrix(out.state.matrix(), &want).map_err(err)?);
            let gate_level = teleport_oracle_branch(&deph, &rho, b.i, b.j).map_err(err)?;
            worst = worst.max(trace_distance_matrix(gate_level.matrix(), &want).map_err(err)?);

            let out = teleport_branch(&dep_res, &rho, b.i, b.j).map_err(err)?;
            ensure((out.prob - 0.25).abs() <= TOL, || format!("depolarized branch probability {}", out.prob))?;
            let normalized = out.state.matrix().scale_real(1.0 / out.prob);
            worst = worst.max(trace_distance_matrix(&normalized, &id2().scale_real(0.5)).map_err(err)?);
        }
    }
    ensure(worst <= TOL, || format!("max trace distance {worst:.3e} > {TOL:e}"))?;
    within_time(start, Duration::from_secs(1), "teleportation checks")?;
    Ok(format!("max trace distance {worst:.2e} (tol {TOL:e}), {:.0?}", start.elapsed()))
}

fn tables() -> Check {
    const TOL: f64 = 1e-12;
    let diag = |t0: C64, t1: C64| &id2().scale(t0) + &z().scale(t1);
    let mut worst: f64 = 0.0;

    let zx = PauliConvention::ZxMeas;
    let resource =
        [(0, 0, diag(ONE, ZERO)), (0, 1, diag(ONE, ZERO)), (1, 0, diag(ZERO, ONE)), (1, 1, diag(ZERO, -c(0.0, 1.0)))];
    for (g, hh, want) in resource {
        let got = map_resource_operator(&zx.basis_element(g, hh)).map_err(err)?;
        worst = worst.max(got.max_abs_diff(&want));
    }

    for phi in [0.0, 0.3, PI / 4.0, 1.7, PI, 5.9] {
        let rot = PauliConvention::XzRotated { phi };
        for k in 0..2u8 {
            let s = if k == 0 { 1.0 } else { -1.0 };
            let rows = [
                (0, 0, diag(ONE, ZERO)),
                (1, 0, diag(ZERO, ONE)),
                (0, 1, diag(ONE * s, ZERO)),
                (1, 1, diag(ZERO, c(0.0, s))),
            ];
            for (g, hh, want) in rows {
                let got = map_measurement_operator(&rot.basis_element(g, hh), phi, k).map_err(err)?;
                worst = worst.max(got.max_abs_diff(&want));
            }
        }
    }

    let state = MpoState::cluster(3).map_err(err)?;
    let base = state.site_tensor(1).map_err(err)?;
    let iy = c(0.0, 1.0);
    for k in 0..2 {
        let a = &base.mats[k][0];
        let rows = [
            ((1u8, 0u8), z().matmul(a).matmul(&x())),
            ((0, 1), a.matmul(&z())),
            ((1, 1), z().matmul(a).matmul(&x()).matmul(&z()).scale(iy)),
        ];
        for ((pa, pb), want) in rows {
            let t = state.apply_pauli(1, pa, pb).map_err(err)?.site_tensor(1).map_err(err)?;
            worst = worst.max(t.mats[k][0].max_abs_diff(&want));
        }
    }
    ensure(worst <= TOL, || format!("max entry deviation {worst:.3e} > {TOL:e}"))?;
    Ok(format!("4 resource rows, 48 measurement rows, 6 MPO rows; max deviation {worst:.2e} (tol {TOL:e})"))
}

fn random_block_suite() -> Check {
    const TOL: f64 = 1e-9;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7401);
    let configs: Vec<BlockNoiseConfig> = (0..200).map(|_| random_block_config(&mut rng, 0)).collect();
    let results = parallel::try_map(Execution::Parallel, &configs, |cfg| {
        let mut diff: f64 = 0.0;
        for k in 0..2 {
            let cfg = cfg.with_outcome(k);
            let closed = compose_block_noise(&cfg)?.choi();
            let oracle = block_oracle_channel(&cfg)?;
            diff = diff.max(closed.max_entry_diff(&oracle));
        }
        Ok::<f64, noisy_mbqc::Error>(diff)
    })
    .map_err(err)?;
    let worst = results.into_iter().fold(0.0, f64::max);
    ensure(worst <= TOL, || format!("max Choi difference {worst:.3e} > {TOL:e}"))?;
    within_time(start, Duration::from_secs(10), "random block suite")?;
    Ok(format!("400 cases, max Choi difference {worst:.2e} (tol {TOL:e}), {:.0?}", start.elapsed()))
}

fn worked_examples() -> Check {
    const TOL: f64 = 1e-10;
    let p = 0.3;
    let bf = KrausChannel::bit_flip(p).map_err(err)?;
    let pf = KrausChannel::phase_flip(p).map_err(err)?;
    let hn = KrausChannel::unitary_noise(p, &h()).map_err(err)?;
    let id = KrausChannel::identity(2);
    let mut worst: f64 = 0.0;
    let mut note = |d: f64| worst = worst.max(d);

    note(map_resource_noise(&bf).map_err(err)?.choi_distance(&id));
    note(map_resource_noise(&pf).map_err(err)?.choi_distance(&pf));
    note(map_measurement_noise(&bf, 0.0, 0).map_err(err)?.choi_distance(&id));
    note(map_measurement_noise(&bf, 0.0, 1).map_err(err)?.choi_distance(&id));
    note(map_measurement_noise(&pf, 0.0, 0).map_err(err)?.choi_distance(&pf));
    note(map_measurement_noise(&pf, 0.0, 1).map_err(err)?.choi_distance(&pf));

    let mapped = map_resource_noise(&hn).map_err(err)?;
    note(mapped.ops()[0].max_abs_diff(&hn.ops()[0]));
    note(mapped.ops()[1].max_abs_diff(&proj(0).scale_real((2.0 * p).sqrt())));
    for k in 0..2u8 {
        let mapped = map_measurement_noise(&hn, 0.0, k).map_err(err)?;
        let sign = if k == 0 { 1.0 } else { -1.0 };
        note(mapped.ops()[1].max_abs_diff(&proj(k).scale_real(sign * (2.0 * p).sqrt())));
    }

    for k in 0..2u8 {
        let spec = MeasSpec::equatorial(0.0, k);
        let ideal = ideal_block(spec).map_err(err)?.kraus;
        let cases = [
            (BlockNoiseConfig::noiseless(spec).with_alpha2(bf.clone()), ideal.clone()),
            (
                BlockNoiseConfig::noiseless(spec).with_alpha2(pf.clone()),
                KrausChannel::compose(&pf, &ideal).map_err(err)?,
            ),
            (BlockNoiseConfig::noiseless(spec).with_alpha3(bf.clone()), ideal.clone()),
            (
                BlockNoiseConfig::noiseless(spec).with_alpha3(pf.clone()),
                KrausChannel::compose(&ideal, &pf).map_err(err)?,
            ),
            (
                BlockNoiseConfig::noiseless(spec).with_alpha2(hn.clone()),
                KrausChannel::compose(&map_resource_noise(&hn).map_err(err)?, &ideal).map_err(err)?,
            ),
            (
                BlockNoiseConfig::noiseless(spec).with_alpha3(hn.clone()),
                KrausChannel::compose(&ideal, &map_measurement_noise(&hn, 0.0, k).map_err(err)?).map_err(err)?,
            ),
        ];
        for (cfg, expected) in cases {
            let closed = compose_block_noise(&cfg).map_err(err)?;
            note(closed.kraus.choi_distance(&expected));
            note(closed.choi().max_entry_diff(&block_oracle_channel(&cfg).map_err(err)?));
        }
    }
    ensure(worst <= TOL, || format!("max deviation {worst:.3e} > {TOL:e}"))?;
    Ok(format!("6 examples x 2 outcomes, closed form and oracle; max deviation {worst:.2e} (tol {TOL:e})"))
}

fn mpo_builders() -> Check {
    const TOL: f64 = 1e-10;
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        let rho = MpoState::cluster(n).and_then(|m| m.contract()).map_err(err)?;
        let want = build_cluster_dm(n).map_err(err)?;
        worst = worst.max(trace_distance_matrix(rho.matrix(), want.matrix()).map_err(err)?);
    }
    for n in 1..=6 {
        let rho = MpoState::maximally_mixed(n).and_then(|m| m.contract()).map_err(err)?;
        let want = DensityOperator::maximally_mixed(n);
        worst = worst.max(trace_distance_matrix(rho.matrix(), want.matrix()).map_err(err)?);
    }
    for n in 1..=5 {
        let rho = MpoState::one_clean(n).and_then(|m| m.contract()).map_err(err)?;
        let want = gates::zero_state().tensor(&DensityOperator::maximally_mixed(n));
        worst = worst.max(trace_distance_matrix(rho.matrix(), want.matrix()).map_err(err)?);
    }
    ensure(worst <= TOL, || format!("max trace distance {worst:.3e} > {TOL:e}"))?;
    within_time(start, Duration::from_secs(30), "MPO builder contractions")?;
    Ok(format!("18 builds, max trace distance {worst:.2e} (tol {TOL:e}), {:.0?}", start.elapsed()))
}

fn outcome_strings(count: usize) -> Vec<Vec<u8>> {
    (0..1usize << count).map(|bits| (0..count).map(|j| ((bits >> j) & 1) as u8).collect()).collect()
}

struct ProgramStats {
    worst_diff: f64,
    worst_prob_sum: f64,
    branches: usize,
}

fn program_suite() -> Result<ProgramStats, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9405);
    let programs: Vec<MpoProgram> = (0..100)
        .map(|_| {
            let n = rng.random_range(2..=6);
            random_program(&mut rng, n)
        })
        .collect();
    let per_program = parallel::try_map(Execution::Parallel, &programs, |p| {
        let measured = p.measured_sites().len();
        let mut diff: f64 = 0.0;
        let mut total = 0.0;
        let strings = outcome_strings(measured);
        for outcomes in &strings {
            let q = p.with_outcomes(outcomes);
            let mpo = q.run_mpo()?.contract()?;
            let oracle = q.run_oracle()?;
            diff = diff.max(mpo.matrix().max_abs_diff(oracle.matrix()));
            total += mpo.trace();
        }
        let prob_dev = if p.is_trace_preserving() { (total - 1.0).abs() } else { 0.0 };
        Ok::<_, noisy_mbqc::Error>((diff, prob_dev, strings.len()))
    })
    .map_err(err)?;
    Ok(per_program.into_iter().fold(
        ProgramStats { worst_diff: 0.0, worst_prob_sum: 0.0, branches: 0 },
        |acc, (d, p, b)| ProgramStats {
            worst_diff: acc.worst_diff.max(d),
            worst_prob_sum: acc.worst_prob_sum.max(p),
            branches: acc.branches + b,
        },
    ))
}

fn program_equivalence(stats: &Result<ProgramStats, String>) -> Check {
    const TOL: f64 = 1e-9;
    let s = stats.as_ref().map_err(Clone::clone)?;
    ensure(s.worst_diff <= TOL, || format!("max entry difference {:.3e} > {TOL:e}", s.worst_diff))?;
    Ok(format!("100 programs, {} branches, max entry difference {:.2e} (tol {TOL:e})", s.branches, s.worst_diff))
}

fn propagation_examples() -> Check {
    const TOL: f64 = 1e-10;
    let mut worst: f64 = 0.0;
    let p = 0.35;
    let (p0, p1, p2) = (0.5, 0.2, 0.3);
    let bf = KrausChannel::bit_flip(p).map_err(err)?;
    let hn = KrausChannel::unitary_noise(p, &h()).map_err(err)?;
    let ixy = KrausChannel::pauli([p0, p1, p2, 0.0]).map_err(err)?;
    let z_model = KrausChannel::pauli([p0 + p1, 0.0, 0.0, p2]).map_err(err)?;

    for m in 0..2u8 {
        let hzm = h().matmul(&xz_power(0, m));
        let measured = |ch: &KrausChannel| -> Result<(MpoState, KrausChannel), String> {
            let state = MpoState::cluster(3)
                .and_then(|s| s.apply_channel(0, ch))
                .and_then(|s| s.measure(0, &gates::equatorial(0.0, m), m))
                .map_err(err)?;
            let superop = state.logical_superop(0).and_then(|s| s.to_kraus()).map_err(err)?;
            Ok((state, superop))
        };
        let oracle_check = |state: &MpoState, ch: &KrausChannel| -> Result<f64, String> {
            let program = MpoProgram {
                builder: Builder::Cluster,
                n: 3,
                ops: vec![SiteOp::Channel { site: 0, channel: ch.clone() }, SiteOp::measure_x(0, m)],
            };
            let oracle = program.run_oracle().map_err(err)?;
            let mpo = state.contract().map_err(err)?;
            Ok(mpo.matrix().max_abs_diff(oracle.matrix()))
        };

        let (state, superop) = measured(&bf)?;
        let unaffected = KrausChannel::completely_positive(vec![hzm.scale_real(FRAC_1_SQRT_2)]).map_err(err)?;
        worst = worst.max(superop.choi_distance(&unaffected));
        worst = worst.max(oracle_check(&state, &bf)?);

        let (state, superop) = measured(&hn)?;
        let h_term = &superop.ops()[1];
        let reduced = h().matmul(&proj(m)).scale_real(2f64.sqrt());
        worst = worst.max(h_term.max_abs_diff(&reduced.scale_real(p.sqrt() * FRAC_1_SQRT_2)));
        worst = worst.max(oracle_check(&state, &hn)?);

        let (state, superop) = measured(&ixy)?;
        let (_, model) = measured(&z_model)?;
        worst = worst.max(superop.choi_distance(&model));
        let explicit = KrausChannel::completely_positive(vec![
            hzm.scale_real(((p0 + p1) / 2.0).sqrt()),
            hzm.matmul(&z()).scale_real((p2 / 2.0).sqrt()),
        ])
        .map_err(err)?;
        worst = worst.max(superop.choi_distance(&explicit));
        worst = worst.max(oracle_check(&state, &ixy)?);
    }
    ensure(worst <= TOL, || format!("max deviation {worst:.3e} > {TOL:e}"))?;
    Ok(format!("3 examples x 2 outcomes against closed forms and the oracle; max deviation {worst:.2e} (tol {TOL:e})"))
}

fn branch_bookkeeping(stats: &Result<ProgramStats, String>) -> Check {
    const TOL: f64 = 1e-9;
    const CHAIN_REL_TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(0x8b0c);
    let mut worst_block: f64 = 0.0;
    for _ in 0..200 {
        let cfg = random_block_config(&mut rng, 0);
        let rho = random_density(&mut rng, 1);
        let mut total = 0.0;
        for k in 0..2 {
            total += compose_block_noise(&cfg.with_outcome(k)).and_then(|b| b.apply(&rho)).map_err(err)?.trace();
        }
        worst_block = worst_block.max((total - 1.0).abs());
    }
    ensure(worst_block <= TOL, || format!("block outcome probabilities sum off by {worst_block:.3e}"))?;

    let s = stats.as_ref().map_err(Clone::clone)?;
    ensure(s.worst_prob_sum <= TOL, || format!("program branch probabilities sum off by {:.3e}", s.worst_prob_sum))?;

    let mut worst_chain: f64 = 0.0;
    for len in 1..=20 {
        let blocks: Vec<BlockNoiseConfig> = (0..len)
            .map(|_| {
                BlockNoiseConfig::noiseless(MeasSpec::equatorial(
                    rng.random_range(0.0..2.0 * PI),
                    rng.random_range(0..2),
                ))
            })
            .collect();
        let rho = random_density(&mut rng, 1);
        let out = run_block_sequence(&rho, &blocks).map_err(err)?;
        worst_chain = worst_chain.max((out.trace() * 2f64.powi(len) - 1.0).abs());
    }
    ensure(worst_chain <= CHAIN_REL_TOL, || format!("chain trace relative error {worst_chain:.3e}"))?;
    Ok(format!(
        "block sums dev {worst_block:.1e}, program sums dev {:.1e} (tol {TOL:e}); 2^-L chains rel dev {worst_chain:.1e} (tol {CHAIN_REL_TOL:e})",
        s.worst_prob_sum
    ))
}

fn main() {
    let stats = program_suite();
    let criteria: Vec<Criterion> = vec![
        ("teleportation through Bell-diagonal resources", Box::new(teleportation)),
        ("basis-element mapping tables", Box::new(tables)),
        ("noisy block closed form vs oracle (200 random configs)", Box::new(random_block_suite)),
        ("worked single-channel examples", Box::new(worked_examples)),
        ("MPO builders vs dense states", Box::new(mpo_builders)),
        ("MPO updates vs oracle (100 random programs)", Box::new(|| program_equivalence(&stats))),
        ("noise-then-measure propagation examples", Box::new(propagation_examples)),
        ("branch probability bookkeeping", Box::new(|| branch_bookkeeping(&stats))),
    ];
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", idx + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {detail}", idx + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
