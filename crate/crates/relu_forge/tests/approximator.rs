use std::collections::BTreeSet;

use proptest::prelude::*;
use relu_forge::approximator::*;
use relu_forge::domain_ext::ModulusOfContinuity;
use relu_forge::fixtures::zoo;
use relu_forge::fnn_core::{Layer, ReluNetwork};
use relu_forge::ForgeError;

fn identity_target() -> TargetFunction {
    TargetFunction::new(1, "x", ModulusOfContinuity::lipschitz(1.0).unwrap(), |x| x[0])
}

#[test]
fn partition_single_cube() {
    let p = Partition::new(1, 3, 0.9).unwrap();
    assert_eq!(p.len(), 1);
    assert_eq!(p.cube(&[0, 0, 0]), vec![(0.0, 1.0); 3]);
    assert!(!in_trifling(&[0.5, 0.2, 0.99], 1, 0.9));
}

#[test]
fn partition_five_intervals() {
    let delta = 1.0 / 15.0;
    let p = Partition::new(5, 1, delta).unwrap();
    for b in 0..4 {
        let (lo, hi) = p.interval(b);
        assert!((lo - 0.2 * b as f64).abs() < 1e-15);
        assert!((hi - (0.2 * (b + 1) as f64 - delta)).abs() < 1e-12);
    }
    assert_eq!(p.interval(4), (0.8, 1.0));
    assert_eq!(p.representative(&[3]), vec![0.6]);
}

#[test]
fn partition_measure_adds_up() {
    let (k, delta) = (4, 0.05);
    let p = Partition::new(k, 2, delta).unwrap();
    assert_eq!(p.len(), 16);
    let per = 2000;
    let mut inside = 0usize;
    for i in 0..per {
        for j in 0..per {
            let x = [(i as f64 + 0.5) / per as f64, (j as f64 + 0.5) / per as f64];
            if in_trifling(&x, k, delta) {
                inside += 1;
            }
        }
    }
    let trifling = inside as f64 / (per * per) as f64;
    assert!((p.cube_measure() + trifling - 1.0).abs() <= 1e-6);
    assert!(trifling <= (k * 2) as f64 * delta);
}

#[test]
fn partition_rejects_delta() {
    assert!(matches!(Partition::new(4, 1, 0.0), Err(ForgeError::Argument(_))));
    assert!(matches!(Partition::new(4, 1, 0.1), Err(ForgeError::Argument(_))));
    assert!(Partition::new(4, 1, 1.0 / 12.0).is_ok());
}

#[test]
fn trifling_membership() {
    assert!(in_trifling(&[0.17], 5, 0.05));
    assert!(!in_trifling(&[0.2], 5, 0.05));
    assert!(!in_trifling(&[0.15], 5, 0.05));
    assert!(!in_trifling(&[0.1], 5, 0.05));
    assert!(in_trifling(&[0.5, 0.79], 5, 0.05));
    assert!(!in_trifling(&[1.0], 5, 0.05));
}

#[test]
fn index_map_examples() {
    let net = index_map(7, 1).unwrap();
    assert_eq!(net.depth(), 0);
    for b in 0..7 {
        assert!((net.evaluate_scalar(&[b as f64]).unwrap() - b as f64 / 14.0).abs() < 1e-15);
    }
    let net = index_map(4, 2).unwrap();
    assert!((net.evaluate_scalar(&[3.0, 2.0]).unwrap() - 0.8125).abs() < 1e-15);

    let (k, d) = (4usize, 2usize);
    let kd = 16usize;
    let a2: BTreeSet<usize> = (0..k)
        .flat_map(|i| (k..2 * k).map(move |t| 2 * k * i + t))
        .collect();
    let mut seen = BTreeSet::new();
    for b0 in 0..k {
        for b1 in 0..k {
            let v = net.evaluate_scalar(&[b0 as f64, b1 as f64]).unwrap();
            let j = (v * (2 * kd) as f64).round() as usize;
            assert!((v - j as f64 / (2 * kd) as f64).abs() < 1e-14);
            assert_eq!(j, index_position(&[b0, b1], k));
            assert!(!a2.contains(&j), "image {j} falls in the interpolation set");
            assert!(seen.insert(j));
        }
    }
    assert_eq!(seen.len(), kd);
    let _ = d;
}

#[test]
fn index_map_injective_exhaustive() {
    for (k, d) in [(3usize, 3usize), (5, 2), (2, 4), (10, 3)] {
        let mut seen = BTreeSet::new();
        let total = k.pow(d as u32);
        for i in 0..total {
            let mut beta = vec![0; d];
            let mut r = i;
            for b in beta.iter_mut().rev() {
                *b = r % k;
                r /= k;
            }
            let j = index_position(&beta, k);
            assert!(j < 2 * total);
            assert!(seen.insert(j));
        }
    }
}

#[test]
fn g_for_identity() {
    let f = identity_target();
    let g = build_g(&f, 2).unwrap();
    assert_eq!(g.breakpoints().len(), 5);
    // f̃ = f − f(0) + ω(1) = x + 1
    assert!((g.eval(0.0) - 1.0).abs() < 1e-15);
    assert!((g.eval(0.25) - 1.5).abs() < 1e-15);
    assert!((g.eval(1.0) - 2.0).abs() < 1e-15);
}

#[test]
fn g_variation_bound() {
    for (name, k) in [("holder_sqrt", 9usize), ("abs", 16), ("sin_sum", 5)] {
        let f = zoo(name).unwrap();
        let d = f.dim();
        let g = build_g(&f, k).unwrap();
        let w = f.omega((d as f64).sqrt() / k as f64);
        let top = 2.0 * f.omega((d as f64).sqrt());
        for pair in g.values().windows(2) {
            assert!((pair[1] - pair[0]).abs() <= w * (1.0 + 1e-12), "{name}: jump exceeds ω");
        }
        for v in g.values() {
            assert!(*v >= 0.0 && *v <= top * (1.0 + 1e-12));
        }
    }
}

#[test]
fn constant_target_is_exact() {
    let f = zoo("const").unwrap();
    let a = build_approximant(&f, 2, 2, Norm::P(2.0), false).unwrap();
    let r = certify(&a, &f, SamplePlan::Grid { per_dim: 1000 }).unwrap();
    assert_eq!(r.measured_global, 0.0);
    assert!(r.pass);
}

#[test]
fn abs_fixture_meets_bound() {
    let f = zoo("abs").unwrap();
    let a = build_approximant(&f, 2, 2, Norm::P(1.0), false).unwrap();
    assert_eq!(a.k, 16);
    assert!(a.delta > 0.0 && a.delta <= 1.0 / 48.0);
    assert!((a.bound_outside_trifling - 1.125).abs() < 1e-12);
    assert!(a.network.width() <= 12 * 2 + 8);
    assert!(a.network.depth() <= 12 * 2 + 14);
    let r = certify(&a, &f, SamplePlan::default_for(1, 0)).unwrap();
    assert!(r.pass);
    assert!(r.measured_outside_trifling <= 1.125);
    assert!(r.max_abs_output <= f.eval(&[0.0]).abs() + f.omega(1.0) + 1e-9);
}

#[test]
fn holder_fixture_l1() {
    let f = zoo("holder_sqrt").unwrap();
    let a = build_approximant(&f, 4, 2, Norm::P(1.0), false).unwrap();
    let r = certify(&a, &f, SamplePlan::MonteCarlo { count: 20_000, seed: 3 }).unwrap();
    let bound = 19.0 * 2f64.sqrt() * f.omega(rate_radius(4, 2, 2));
    assert!((a.bound_global - bound).abs() < 1e-12);
    assert!(r.measured_global <= bound);
    assert!(r.pass);
}

#[test]
fn lift_keeps_constants() {
    let c = ReluNetwork::constant(1, 0.3).unwrap();
    let lifted = uniform_lift(&c, 8, 1.0 / 24.0, 1).unwrap();
    for i in 0..=100 {
        let x = i as f64 / 100.0;
        assert!((lifted.evaluate_scalar(&[x]).unwrap() - 0.3).abs() < 1e-14);
    }
    let c2 = ReluNetwork::constant(2, -1.5).unwrap();
    let lifted = uniform_lift(&c2, 3, 0.1, 2).unwrap();
    assert!((lifted.evaluate_scalar(&[0.31, 0.64]).unwrap() + 1.5).abs() < 1e-14);
}

#[test]
fn lift_of_scaled_staircase() {
    // staircase x ↦ k/K, which approximates the identity within 1/K outside the gaps
    let (n, l) = (2, 2);
    let k = relu_forge::constructions::step_count(n, l, 1);
    let delta = 1.0 / (3 * k) as f64;
    let steps = relu_forge::constructions::step_function_net(n, l, 1, delta).unwrap();
    let scale = Layer::new(1, 1, vec![1.0 / k as f64], vec![0.0]).unwrap();
    let net = relu_forge::fnn_core::postcompose_affine(&steps, &scale).unwrap();
    let lifted = uniform_lift(&net, k, delta, 1).unwrap();
    assert!(lifted.depth() <= net.depth() + 2);
    assert!(lifted.width() <= 3 * net.width());
    let eps = 1.0 / k as f64;
    let mut ev = lifted.evaluator();
    for i in 0..=20_000 {
        let x = i as f64 / 20_000.0;
        let v = ev.eval_scalar(&[x]);
        assert!((v - x).abs() <= eps + delta + 1e-12, "x={x}: {v}");
        if !in_trifling(&[x], k, delta) {
            let base = net.evaluate_scalar(&[x]).unwrap();
            assert!((v - x).abs() <= (base - x).abs().max(eps) + 1e-12);
        }
    }
}

#[test]
fn lift_rejects_high_dimension() {
    let c = ReluNetwork::constant(5, 0.0).unwrap();
    assert!(matches!(uniform_lift(&c, 2, 0.1, 5), Err(ForgeError::Capability(_))));
    let f = relu_forge::fixtures::sin_sum(5);
    assert!(matches!(build_approximant(&f, 1, 1, Norm::Inf, true), Err(ForgeError::Capability(_))));
}

#[test]
fn holder_uniform_sup_bound() {
    let f = zoo("holder_sqrt").unwrap();
    let a = build_approximant(&f, 2, 2, Norm::Inf, true).unwrap();
    assert!(a.uniform);
    let r = certify(&a, &f, SamplePlan::MonteCarlo { count: 100_000, seed: 1 }).unwrap();
    assert!(r.measured_global <= 19.0 * 2f64.sqrt() * f.omega(rate_radius(2, 2, 2)));
    assert!(r.pass);
}

#[test]
fn corrupted_network_fails() {
    let f = zoo("abs").unwrap();
    let mut a = build_approximant(&f, 2, 2, Norm::P(2.0), false).unwrap();
    let mut layers = a.network.clone().into_layers();
    let last = layers.last_mut().unwrap();
    let w: Vec<f64> = last.weights().to_vec();
    let idx = w.iter().position(|v| *v != 0.0).unwrap();
    let mut w2 = w.clone();
    w2[idx] = 0.0;
    let mut bias = last.bias().to_vec();
    bias[0] += 100.0;
    *last = Layer::new(last.rows(), last.cols(), w2, bias).unwrap();
    a.network = ReluNetwork::new(1, layers).unwrap();
    let r = certify(&a, &f, SamplePlan::Grid { per_dim: 2000 }).unwrap();
    assert!(!r.pass);
}

#[test]
fn capacity_is_reported() {
    let f = zoo("holder_sqrt").unwrap();
    let opts = BuildOptions { eval_cap: 10, ..Default::default() };
    match build_approximant_with(&f, 4, 4, Norm::P(1.0), false, &opts) {
        Err(ForgeError::Capacity(m)) => assert!(m.contains("258"), "{m}"),
        other => panic!("expected capacity error, got {other:?}"),
    }
}

#[test]
fn sweep_on_constant() {
    let f = zoo("const").unwrap();
    let rows = rate_sweep(
        &f,
        &[(2, 1), (1, 1), (1, 2), (1, 1)],
        Norm::P(2.0),
        false,
        SamplePlan::Grid { per_dim: 200 },
        &BuildOptions::default(),
    );
    assert_eq!(rows.len(), 3);
    assert_eq!((rows[0].n, rows[0].l), (1, 1));
    assert!(rows.iter().all(|r| r.pass()));
    let mut buf = Vec::new();
    write_sweep_csv(&rows, Norm::P(2.0), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with(&SWEEP_HEADER.join(",")));
}

#[test]
fn annotation_round_trip() {
    let f = zoo("abs").unwrap();
    let mut a = build_approximant(&f, 1, 2, Norm::P(2.0), false).unwrap();
    a.annotate("abs");
    let b = Approximant::from_annotated(a.network.clone()).unwrap();
    assert_eq!(a.delta.to_bits(), b.delta.to_bits());
    assert_eq!(a.shift.to_bits(), b.shift.to_bits());
    assert_eq!((a.n, a.l, a.d, a.k, a.norm, a.uniform), (b.n, b.l, b.d, b.k, b.norm, b.uniform));
}

#[test]
fn norm_parsing() {
    assert_eq!("inf".parse::<Norm>().unwrap(), Norm::Inf);
    assert_eq!("1.5".parse::<Norm>().unwrap(), Norm::P(1.5));
    assert!("0.5".parse::<Norm>().is_err());
    assert!(loglog_slope(&[1.0, 2.0, 4.0], &[1.0, 0.25, 0.0625]).unwrap() + 2.0 < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn k_and_delta_invariants(n in 1usize..=6, l in 1usize..=4, d in 1usize..=2) {
        let f = relu_forge::fixtures::sin_sum(d);
        let a = build_approximant(&f, n, l, Norm::P(2.0), false).unwrap();
        let r = relu_forge::constructions::iroot(n as u64, d as u32) as usize;
        let s = relu_forge::constructions::iroot((l * l) as u64, d as u32) as usize;
        prop_assert_eq!(a.k, r * r * s);
        prop_assert!(a.delta > 0.0 && a.delta <= 1.0 / (3 * a.k) as f64);
        prop_assert!(a.network.width() <= (4 * d * r + 3 * d).max(12 * n + 8));
        prop_assert!(a.network.depth() <= 12 * l + 14);
    }

    #[test]
    fn trifling_matches_interval_scan(x in 0.0f64..=1.0, k in 1usize..=12) {
        let delta = 1.0 / (3 * k) as f64;
        let want = (1..k).any(|j| {
            let e = j as f64 / k as f64;
            x > e - delta && x < e
        });
        prop_assert_eq!(in_trifling(&[x], k, delta), want);
    }
}
