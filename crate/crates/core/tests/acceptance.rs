//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one pass line (run with `--nocapture` to see them all).

use std::time::Instant;

use chaoskit::classify::{
    classify_pair, consistency_check, verify_witness, witness_sequence, Thresholds,
};
use chaoskit::distfn::{
    distance_profile, distribution_estimate, empirical_density, estimate_pair, merge_checkpoints,
    EstimateConfig, SequenceSpec,
};
use chaoskit::rtchaos::{rt_verdict, RtParams};
use chaoskit::systems::shift::family_boundaries;
use chaoskit::systems::{make_system, SystemKind, SystemSpec, GOLDEN_ALPHA};
use chaoskit::theorems::{example1_grid, example1_reproduction, theorem1_harness, theorem2_harness};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn sys64(kind: SystemKind, cap: u64) -> chaoskit::System64 {
    make_system(&SystemSpec::new(kind, cap)).unwrap()
}

fn random_seed_pair(rng: &mut StdRng) -> (f64, f64) {
    let a: f64 = rng.random_range(1e-6..1.0 - 1e-6);
    let mut b: f64 = rng.random_range(1e-6..1.0 - 1e-6);
    if b == a {
        b = (b + 0.31).fract().max(1e-6);
    }
    (a, b)
}

#[test]
fn criterion_01_example1_upper_density() {
    let started = Instant::now();
    let horizon = 1_000_000u64;
    let sys = sys64(SystemKind::Example1, horizon);
    let x = sys.example1_point(0.25, 0).unwrap();
    let y = sys.example1_point(0.75, 0).unwrap();
    let profile = distance_profile(&sys, &x, &y, horizon).unwrap();
    let cfg = EstimateConfig::<f64>::default();
    let cps = merge_checkpoints(
        &cfg.checkpoints_for(horizon).unwrap(),
        &sys.natural_checkpoints(horizon),
    );
    let est = distribution_estimate(&profile, &[0.3f64], &cps, 0).unwrap();
    let elapsed = started.elapsed();
    assert!(
        est.upper[0] >= 0.49 && est.upper[0] <= 0.50,
        "upper density {} outside [0.49, 0.50]",
        est.upper[0]
    );
    assert!(elapsed.as_secs() < 30, "runtime {elapsed:?} exceeds 30 s");
    println!(
        "ACCEPTANCE 01 PASS upper density at t=0.3, horizon 1e6: {:.6} in [0.49, 0.50] ({} ms)",
        est.upper[0],
        elapsed.as_millis()
    );
}

#[test]
fn criterion_02_example1_lower_density() {
    let horizon = 10_000u64;
    let sys = sys64(SystemKind::Example1, horizon);
    let x = sys.example1_point(0.25, 0).unwrap();
    let y = sys.example1_point(0.75, 0).unwrap();
    let profile = distance_profile(&sys, &x, &y, horizon).unwrap();
    let d = empirical_density(&profile, 0.5f64, 2059).unwrap();
    let envelope = 12.0 / 2059.0;
    assert_eq!(d, 0.0, "density at t=1/2, n=L_4 must vanish exactly");
    assert!(d <= envelope);
    println!(
        "ACCEPTANCE 02 PASS density at t=0.5, n=2059 is exactly {d} (envelope {envelope:.5})"
    );
}

#[test]
fn criterion_03_example1_parity_law() {
    let horizon = 1_000_000u64;
    let sys = sys64(SystemKind::Example1, horizon);
    let mut rng = StdRng::seed_from_u64(303);
    for pair_idx in 0..10 {
        let (s1, s2) = random_seed_pair(&mut rng);
        let x = sys.example1_point(s1, 0).unwrap();
        let y = sys.example1_point(s2, 0).unwrap();
        let profile = distance_profile(&sys, &x, &y, horizon).unwrap();
        for (i, &v) in profile.values.iter().enumerate().skip(1).step_by(2) {
            assert_eq!(v, 1.0, "pair {pair_idx}, odd index {i}: distance {v} != 1");
        }
    }
    println!("ACCEPTANCE 03 PASS parity law exact at every odd index < 1e6 for 10 random pairs");
}

#[test]
fn criterion_04_example1_verdict() {
    let report =
        example1_reproduction::<f64>(1_000_000, &[(0.25, 0.75)], &Thresholds::default()).unwrap();
    assert!(report.passed, "{:?}", report.counterexamples);
    let case = &report.cases[0];
    assert!(case.flags["dc2prime_set"], "DC2' must be detected");
    assert!(case.flags["dc1_clear"], "DC1 must stay clear");
    println!(
        "ACCEPTANCE 04 PASS verdict at default thresholds: dc2prime set, dc1 clear \
         (upper max {:.5})",
        case.values["upper_t03_max"]
    );
}

#[test]
fn criterion_05_implication_lattice() {
    let th = Thresholds::default();
    let mut total_pairs = 0usize;
    let mut violations: Vec<String> = Vec::new();
    let identity_q = SequenceSpec::identity();

    // Interval and rotation systems: 100 sampled pairs each.
    let mut rng = StdRng::seed_from_u64(505);
    for kind in [
        SystemKind::Tent,
        SystemKind::Logistic4,
        SystemKind::Rotation { alpha: GOLDEN_ALPHA },
        SystemKind::Identity,
    ] {
        let horizon = 4_096u64;
        let sys = sys64(kind, horizon);
        let cfg = EstimateConfig::default().with_burn_in(64);
        for _ in 0..100 {
            let x = sys.sample_point(&mut rng, horizon);
            let y = sys.sample_point(&mut rng, horizon);
            let v = classify_pair(&sys, &x, &y, horizon, &th, &cfg, Some(&identity_q)).unwrap();
            for viol in consistency_check(&v) {
                violations.push(format!("{}: {viol}", sys.name()));
            }
            total_pairs += 1;
        }
    }

    // The scrambled family: all pairs over 16 patterns.
    {
        let horizon = 20_000u64;
        let sys = sys64(SystemKind::Shift2, horizon + 128);
        let points: Vec<_> = (0..16u8)
            .map(|b| {
                sys.family_point(&[b & 1, (b >> 1) & 1, (b >> 2) & 1, (b >> 3) & 1])
                    .unwrap()
            })
            .collect();
        let cfg = EstimateConfig::default()
            .with_burn_in(64)
            .with_extra_checkpoints(family_boundaries(horizon));
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let v = classify_pair(
                    &sys,
                    &points[i],
                    &points[j],
                    horizon,
                    &th,
                    &cfg,
                    Some(&identity_q),
                )
                .unwrap();
                for viol in consistency_check(&v) {
                    violations.push(format!("shift2[{i},{j}]: {viol}"));
                }
                total_pairs += 1;
            }
        }
    }

    // The half-line system: 100 random seed pairs.
    {
        let horizon = 10_000u64;
        let sys = sys64(SystemKind::Example1, horizon);
        let cfg = EstimateConfig::default().with_burn_in(64);
        for _ in 0..100 {
            let (s1, s2) = random_seed_pair(&mut rng);
            let x = sys.example1_point(s1, 0).unwrap();
            let y = sys.example1_point(s2, 0).unwrap();
            let v = classify_pair(&sys, &x, &y, horizon, &th, &cfg, Some(&identity_q)).unwrap();
            for viol in consistency_check(&v) {
                violations.push(format!("example1: {viol}"));
            }
            total_pairs += 1;
        }
    }

    assert!(
        violations.is_empty(),
        "{} violations over {total_pairs} pairs: {violations:?}",
        violations.len()
    );
    println!(
        "ACCEPTANCE 05 PASS implication lattice clean over {total_pairs} pairs across 6 systems"
    );
}

#[test]
fn criterion_06_theorem2_iterate_invariance() {
    let th = Thresholds::default();

    // 20 scrambled-family pairs.
    let m_shift = 22_000u64;
    let sys = sys64(SystemKind::Shift2, 5 * m_shift + 128);
    let patterns: Vec<Vec<u8>> = (0..16u8)
        .map(|b| vec![b & 1, (b >> 1) & 1, (b >> 2) & 1, (b >> 3) & 1])
        .collect();
    let points: Vec<_> = patterns
        .iter()
        .map(|c| sys.family_point(c).unwrap())
        .collect();
    let mut shift_pairs = Vec::new();
    'outer: for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            shift_pairs.push((points[i].clone(), points[j].clone()));
            if shift_pairs.len() == 20 {
                break 'outer;
            }
        }
    }
    let cfg_shift = EstimateConfig::default()
        .with_extra_checkpoints(family_boundaries(5 * m_shift));
    let mut agree = 0usize;
    let mut total = 0usize;
    for n in [2u64, 3, 5] {
        let report = theorem2_harness(&sys, &shift_pairs, n, m_shift, &th, &cfg_shift).unwrap();
        agree += report.cases.iter().filter(|c| c.agree).count();
        total += report.cases.len();
        assert!(report.passed, "shift2 N={n}: {:?}", report.counterexamples);
    }

    // 10 half-line pairs at the scale-adapted grid.
    let m_e1 = 20_000u64;
    let e1 = sys64(SystemKind::Example1, 5 * m_e1);
    let mut rng = StdRng::seed_from_u64(606);
    let e1_pairs: Vec<_> = (0..10)
        .map(|_| {
            let (s1, s2) = random_seed_pair(&mut rng);
            (
                e1.example1_point(s1, 0).unwrap(),
                e1.example1_point(s2, 0).unwrap(),
            )
        })
        .collect();
    let cfg_e1 = EstimateConfig::default().with_t_grid(example1_grid::<f64>());
    for n in [2u64, 3, 5] {
        let report = theorem2_harness(&e1, &e1_pairs, n, m_e1, &th, &cfg_e1).unwrap();
        agree += report.cases.iter().filter(|c| c.agree).count();
        total += report.cases.len();
        assert!(report.passed, "example1 N={n}: {:?}", report.counterexamples);
    }

    assert_eq!(agree, total, "flag agreement must be 100%");
    println!("ACCEPTANCE 06 PASS DC2' iterate invariance: {agree}/{total} cases agree");
}

#[test]
fn criterion_07_theorem1_bounded_gaps() {
    let horizon = 100_000u64;
    let sys = sys64(SystemKind::Shift2, 3 * horizon + 128);
    let patterns: Vec<Vec<u8>> = (0..16u8)
        .map(|b| vec![b & 1, (b >> 1) & 1, (b >> 2) & 1, (b >> 3) & 1])
        .collect();
    let points: Vec<_> = patterns
        .iter()
        .map(|c| sys.family_point(c).unwrap())
        .collect();
    let mut pairs = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            pairs.push((points[i].clone(), points[j].clone()));
        }
    }
    let cfg = EstimateConfig::default().with_extra_checkpoints(family_boundaries(horizon));
    for step in [2u64, 3] {
        let report = theorem1_harness(
            &sys,
            &pairs,
            &SequenceSpec::arith(step, 0),
            horizon,
            &Thresholds::default(),
            &cfg,
            false,
        )
        .unwrap();
        let rate = report.stats["agreement_rate"];
        assert!(
            rate >= 0.95,
            "M={step}: agreement {rate} below 0.95: {:?}",
            report.counterexamples
        );
        assert!(
            report.cases.iter().all(|c| c.flags["counting_ok"]),
            "M={step}: subset counting inequality must hold exactly"
        );
        assert!(report.stats["counting_checks"] > 0.0);
        println!(
            "ACCEPTANCE 07 PASS bounded gap M={step}: agreement {:.3} over {} pairs, \
             {} exact counting checks",
            rate,
            pairs.len(),
            report.stats["counting_checks"]
        );
    }
}

#[test]
fn criterion_08_witness_sequences() {
    let horizon = 100_000u64;
    let sys = sys64(SystemKind::Shift2, horizon + 128);
    let th = Thresholds::default();
    let mut rng = StdRng::seed_from_u64(808);
    let mut successes = 0;
    for _ in 0..10 {
        // A random pattern against its complement differs on every block.
        let c: Vec<u8> = (0..6).map(|_| rng.random_range(0..=1u8)).collect();
        let cbar: Vec<u8> = c.iter().map(|&b| 1 - b).collect();
        let x = sys.family_point(&c).unwrap();
        let y = sys.family_point(&cbar).unwrap();
        let profile = distance_profile(&sys, &x, &y, horizon).unwrap();
        let ly = chaoskit::classify::liyorke_verdict(&profile, &th, 0);
        assert!(ly.set, "family pair must be Li-Yorke before witnessing");
        let q = witness_sequence(&profile, &th).expect("witness construction");
        let sdc = verify_witness(&profile, &q, &th).unwrap();
        assert!(sdc.sdc1.set, "witness must certify SDC1 on re-verification");
        successes += 1;
    }
    assert_eq!(successes, 10);
    println!("ACCEPTANCE 08 PASS witness sequences found and re-verified as SDC1 on 10/10 pairs");
}

#[test]
fn criterion_09_isometry_control() {
    let horizon = 4_096u64;
    let sys = sys64(SystemKind::Rotation { alpha: GOLDEN_ALPHA }, horizon);
    let th = Thresholds::default();
    let cfg = EstimateConfig::default();
    let mut rng = StdRng::seed_from_u64(909);
    for _ in 0..100 {
        let x = sys.sample_point(&mut rng, horizon);
        let y = sys.sample_point(&mut rng, horizon);
        let d = sys.distance(&x, &y).unwrap();
        let (_, est) = estimate_pair(&sys, &x, &y, horizon, &cfg).unwrap();
        for (j, &t) in est.t_grid.iter().enumerate() {
            let step = if d < t { 1.0 } else { 0.0 };
            assert_eq!(est.lower[j], step, "lower must be the exact step function");
            assert_eq!(est.upper[j], step, "upper must be the exact step function");
        }
        let v = classify_pair(&sys, &x, &y, horizon, &th, &cfg, Some(&SequenceSpec::identity()))
            .unwrap();
        assert!(!v.dc1.set && !v.dc2.set && !v.dc2prime.set && !v.dc3.set);
        assert!(!v.liyorke.as_ref().unwrap().set);
        let sdc = v.sdc.as_ref().unwrap();
        assert!(!sdc.sdc1.set && !sdc.sdc2.set && !sdc.sdc3.set);
        assert!(consistency_check(&v).is_empty());
    }
    println!("ACCEPTANCE 09 PASS rotation pairs: exact step estimates, all flags clear (100 pairs)");
}

#[test]
fn criterion_10_rt_indicators() {
    // Tent: sensitive and transitive at the stated scales.
    let tent = sys64(SystemKind::Tent, 400_000);
    let tent_params = RtParams::<f64> {
        sensitivity_horizon: 100_000,
        transitivity_horizon: 100_000,
        grid_eps: 0.01,
        ..RtParams::default()
    };
    let tent_report = rt_verdict(&tent, &tent_params).unwrap();
    assert!(
        tent_report.sensitivity_constant_estimate >= 0.1,
        "tent sensitivity {}",
        tent_report.sensitivity_constant_estimate
    );
    assert!(tent_report.transitive, "tent must be transitive at eps 0.01");
    assert!(tent_report.rt_chaotic);

    // Rotation: transitive control with exactly zero sensitivity.
    let rot = sys64(SystemKind::Rotation { alpha: GOLDEN_ALPHA }, 400_000);
    let rot_report = rt_verdict(&rot, &RtParams::default()).unwrap();
    assert_eq!(rot_report.sensitivity_constant_estimate, 0.0);
    assert!(!rot_report.rt_chaotic);

    // Identity: neither.
    let id = sys64(SystemKind::Identity, 400_000);
    let id_report = rt_verdict(&id, &RtParams::default()).unwrap();
    assert_eq!(id_report.sensitivity_constant_estimate, 0.0);
    assert!(!id_report.transitive);
    assert!(!id_report.rt_chaotic);

    println!(
        "ACCEPTANCE 10 PASS R-T indicators: tent sensitivity {:.2} + transitive \
         ({}/{} cells); rotation 0.0; identity neither",
        tent_report.sensitivity_constant_estimate,
        tent_report.cells_visited,
        tent_report.cells_total
    );
}
