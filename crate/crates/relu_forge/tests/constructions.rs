use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relu_forge::constructions::*;
use relu_forge::fnn_core::{Layer, ReluNetwork};
use relu_forge::ForgeError;

fn eval1(net: &ReluNetwork, x: f64) -> f64 {
    net.evaluate_scalar(&[x]).unwrap()
}

fn random_two_layer(rng: &mut ChaCha8Rng, n: usize, l: usize) -> ReluNetwork {
    let mut mk = |rows: usize, cols: usize| {
        Layer::new(
            rows,
            cols,
            (0..rows * cols).map(|_| rng.random_range(-2.0..2.0)).collect(),
            (0..rows).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    };
    let layers = vec![mk(n, 1), mk(n * l, n), mk(1, n * l)];
    ReluNetwork::new(1, layers).unwrap()
}

#[test]
fn fit_smallest_instance() {
    let net = fit_points_two_layer(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)], 1, 1).unwrap();
    assert_eq!(net.hidden_widths(), vec![2, 3]);
    for (x, y) in [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (0.5, 0.5)] {
        assert!((eval1(&net, x) - y).abs() <= 1e-12);
    }
}

#[test]
fn fit_constant_samples() {
    let samples: Vec<(f64, f64)> = (0..7).map(|i| (i as f64, 5.0)).collect();
    let net = fit_points_two_layer(&samples, 2, 2).unwrap();
    for (x, y) in samples {
        assert!((eval1(&net, x) - y).abs() <= 1e-8 * 5.0);
    }
}

#[test]
fn fit_interpolates_and_is_linear_inside_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (n1, n2) = (3, 4);
    let count = n1 * (n2 + 1) + 1;
    let mut x = 0.0;
    let samples: Vec<(f64, f64)> = (0..count)
        .map(|_| {
            x += rng.random_range(0.1..1.0);
            (x, rng.random_range(0.0..3.0))
        })
        .collect();
    let net = fit_points_two_layer(&samples, n1, n2).unwrap();
    assert_eq!(net.hidden_widths(), vec![2 * n1, 2 * n2 + 1]);
    let scale = 3.0;
    for (x, y) in &samples {
        assert!((eval1(&net, *x) - y).abs() <= 1e-8 * scale);
    }
    for i in 1..count {
        if i % (n2 + 1) == 0 {
            continue;
        }
        let (x0, y0) = samples[i - 1];
        let (x1, y1) = samples[i];
        for p in 0..1000 {
            let t = p as f64 / 999.0;
            let want = y0 + t * (y1 - y0);
            assert!((eval1(&net, x0 + t * (x1 - x0)) - want).abs() <= 1e-8 * scale);
        }
    }
}

#[test]
fn fit_rejects_bad_input() {
    assert!(matches!(fit_points_two_layer(&[(0.0, 0.0), (1.0, 1.0)], 1, 1), Err(ForgeError::Argument(_))));
    assert!(matches!(
        fit_points_two_layer(&[(0.0, 0.0), (0.0, 1.0), (2.0, 0.0)], 1, 1),
        Err(ForgeError::Argument(_))
    ));
}

#[test]
fn wide_to_deep_single_block_is_the_same_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let net = random_two_layer(&mut rng, 1, 1);
    let deep = wide_to_deep(&net, 1).unwrap();
    for _ in 0..100 {
        let x = rng.random_range(-3.0..3.0);
        assert!((eval1(&net, x) - eval1(&deep, x)).abs() <= 1e-9 * (1.0 + eval1(&net, x).abs()));
    }
}

#[test]
fn wide_to_deep_matches_original() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let net = random_two_layer(&mut rng, 2, 3);
    let deep = wide_to_deep(&net, 3).unwrap();
    assert!(deep.width() <= 6);
    assert!(deep.depth() <= 4);
    for _ in 0..1000 {
        let x = rng.random_range(-5.0..5.0);
        let a = eval1(&net, x);
        assert!((a - eval1(&deep, x)).abs() <= 1e-9 * (1.0 + a.abs()));
    }
    assert!(matches!(wide_to_deep(&net, 2), Err(ForgeError::Argument(_))));
}

fn plateau_probe(net: &ReluNetwork, k: usize, delta: f64, probes: usize) {
    for p in 0..k {
        let lo = p as f64 / k as f64;
        let hi = if p + 1 < k { (p + 1) as f64 / k as f64 - delta } else { 1.0 };
        for i in 0..probes {
            let x = lo + (hi - lo) * i as f64 / (probes - 1) as f64;
            let v = eval1(net, x);
            assert!((v - p as f64).abs() <= 1e-8, "plateau {p}, x={x}: {v}");
        }
    }
}

#[test]
fn step_net_examples() {
    let z = step_function_net(1, 1, 1, 0.5).unwrap();
    for x in [0.0, 0.3, 1.0] {
        assert_eq!(eval1(&z, x), 0.0);
    }
    let k = step_count(2, 2, 1);
    assert_eq!(k, 16);
    let delta = 1.0 / (3.0 * 16.0);
    let net = step_function_net(2, 2, 1, delta).unwrap();
    assert!((eval1(&net, 0.5) - 8.0).abs() <= 1e-8);
    assert!(net.width() <= 11, "width {}", net.width());
    assert!(net.depth() <= 13, "depth {}", net.depth());
    plateau_probe(&net, 16, delta, 50);

    assert_eq!(step_count(4, 1, 2), 4);
    let net = step_function_net(4, 1, 2, 1.0 / 12.0).unwrap();
    assert!(net.width() <= 11);
    plateau_probe(&net, 4, 1.0 / 12.0, 50);
}

#[test]
fn step_net_is_zero_left_of_origin_and_holds_past_one() {
    for (n, l, d) in [(2, 2, 1), (3, 2, 2), (4, 3, 1)] {
        let k = step_count(n, l, d);
        let delta = 1.0 / (3 * k) as f64;
        let net = step_function_net(n, l, d, delta).unwrap();
        assert_eq!(eval1(&net, -delta), 0.0);
        assert!((eval1(&net, 1.0 + delta) - (k - 1) as f64).abs() <= 1e-8);
    }
}

#[test]
fn step_net_rejects_bad_delta() {
    assert!(matches!(step_function_net(2, 2, 1, 0.0), Err(ForgeError::Argument(_))));
    assert!(matches!(step_function_net(2, 2, 1, 0.1), Err(ForgeError::Argument(_))));
}

#[test]
fn integer_roots() {
    assert_eq!(iroot(27, 3), 3);
    assert_eq!(iroot(26, 3), 2);
    assert_eq!(iroot(1 << 40, 2), 1 << 20);
    assert_eq!(iroot(u64::MAX, 2), 4294967295);
    assert_eq!(step_count(9, 4, 2), 9 * 4);
}

fn bits_of(v: u32, l: usize) -> Vec<u8> {
    (0..l).map(|j| ((v >> (l - 1 - j)) & 1) as u8).collect()
}

fn encode(bits: &[u8]) -> f64 {
    bits.iter().enumerate().map(|(j, b)| f64::from(*b) * 0.5f64.powi(j as i32 + 1)).sum()
}

#[test]
fn bit_extraction_examples() {
    let net = bit_extract_net(3).unwrap();
    for l in 1..=3 {
        assert_eq!(net.evaluate_scalar(&[0.0, l as f64]).unwrap(), 0.0);
    }
    let xi = encode(&[1, 0, 1]);
    assert!((net.evaluate_scalar(&[xi, 2.0]).unwrap() - 1.0).abs() <= 1e-6);
    assert!((net.evaluate_scalar(&[xi, 3.0]).unwrap() - 2.0).abs() <= 1e-6);
    assert!(matches!(bit_extract_net(BIT_CAP + 1), Err(ForgeError::Capability(_))));
}

#[test]
fn bit_extraction_exhaustive_l10() {
    let l = 10;
    let net = bit_extract_net(l).unwrap();
    assert!(net.width() <= 7 && net.depth() <= 2 * l + 1);
    let mut ev = net.evaluator();
    for v in 0..(1u32 << l) {
        let bits = bits_of(v, l);
        let xi = encode(&bits);
        let mut sum = 0.0;
        for p in 1..=l {
            sum += f64::from(bits[p - 1]);
            let got = ev.eval_scalar(&[xi, p as f64]);
            assert!((got - sum).abs() <= 1e-6, "v={v} ℓ={p}: {got}");
        }
    }
}

#[test]
fn bit_sum_examples() {
    let (n, l) = (2, 4);
    let m = n * n * l;
    let zero = bit_sum_net(&BitMatrix::zeros(m, l), n, l).unwrap();
    let ones = bit_sum_net(&BitMatrix::new(m, l, vec![1; m * l]).unwrap(), n, l).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let random = BitMatrix::new(m, l, (0..m * l).map(|_| rng.random_range(0..2u8)).collect()).unwrap();
    let net = bit_sum_net(&random, n, l).unwrap();
    for (k, t) in [&zero, &ones, &net].iter().enumerate() {
        assert!(t.width() <= 4 * n + 3, "width {}", t.width());
        assert!(t.depth() <= 3 * l + 3);
        let _ = k;
    }
    for i in 0..m {
        for j in 0..l {
            let x = [i as f64, j as f64];
            assert!(zero.evaluate_scalar(&x).unwrap().abs() <= 1e-6);
            assert!((ones.evaluate_scalar(&x).unwrap() - (j + 1) as f64).abs() <= 1e-6);
            let want = f64::from(random.prefix_sum(i, j));
            assert!((net.evaluate_scalar(&x).unwrap() - want).abs() <= 1e-6);
        }
    }
    assert!(bit_sum_net(&BitMatrix::zeros(3, l), n, l).is_err());
}

fn random_table(rng: &mut ChaCha8Rng, m: usize, l: usize, eps: f64) -> Vec<Vec<f64>> {
    let mut flat = vec![rng.random_range(0.0..4.0 * eps)];
    for _ in 1..m * l {
        let prev: f64 = *flat.last().unwrap();
        flat.push((prev + rng.random_range(-eps..eps)).max(0.0));
    }
    flat.chunks(l).map(|c| c.to_vec()).collect()
}

fn check_grid(net: &ReluNetwork, y: &[Vec<f64>], eps: f64, rng: &mut ChaCha8Rng) {
    let ymax = y.iter().flatten().cloned().fold(0.0, f64::max);
    for (i, row) in y.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let got = net.evaluate_scalar(&[i as f64, j as f64]).unwrap();
            assert!((got - v).abs() <= eps * (1.0 + 1e-9), "({i},{j}): {got} vs {v}");
        }
    }
    for _ in 0..10_000 {
        let x = [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
        let v = net.evaluate_scalar(&x).unwrap();
        assert!((0.0..=ymax * (1.0 + 1e-12)).contains(&v), "{x:?}: {v}");
    }
}

#[test]
fn grid_fit_examples() {
    let (n, l) = (1, 2);
    let m = n * n * l;
    let constant = vec![vec![0.7; l]; m];
    let net = grid_fit_net(&constant, 0.5, n, l).unwrap();
    for i in 0..m {
        for j in 0..l {
            assert!((net.evaluate_scalar(&[i as f64, j as f64]).unwrap() - 0.5).abs() <= 1e-9);
        }
    }
    let zeros = vec![vec![0.0; l]; m];
    let net = grid_fit_net(&zeros, 0.5, n, l).unwrap();
    assert_eq!(net.evaluate_scalar(&[1.0, 1.0]).unwrap(), 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let (n, l, eps) = (2, 3, 0.1);
    let y = random_table(&mut rng, n * n * l, l, eps);
    let net = grid_fit_net(&y, eps, n, l).unwrap();
    assert!(net.width() <= 12 * n + 8 && net.depth() <= 3 * l + 6);
    check_grid(&net, &y, eps, &mut rng);

    let mut bad = y.clone();
    bad[0][1] = bad[0][0] + 3.0 * eps;
    assert!(matches!(grid_fit_net(&bad, eps, n, l), Err(ForgeError::Argument(_))));
}

#[test]
fn point_fit_examples() {
    let eps = 0.25;
    let (n, l) = (2, 2);
    let linear: Vec<f64> = (0..16).map(|j| j as f64 * eps).collect();
    let net = point_fit_net(&SampleSequence::new(linear.clone(), eps).unwrap(), eps, n, l).unwrap();
    assert!(net.width() <= 12 * n + 8 && net.depth() <= 4 * l + 9);
    for (j, y) in linear.iter().enumerate() {
        assert!((eval1(&net, j as f64) - y).abs() <= eps * (1.0 + 1e-9));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..2000 {
        let v = eval1(&net, rng.random_range(-100.0..100.0));
        assert!((0.0..=15.0 * eps + 1e-12).contains(&v));
    }

    let constant = vec![1.3; 9];
    let net = point_fit_net(&SampleSequence::new(constant, 0.2).unwrap(), 0.2, 1, 3).unwrap();
    for j in 0..9 {
        assert!((eval1(&net, j as f64) - 1.3).abs() <= 0.2);
    }

    let too_many = SampleSequence::new(vec![0.0; 17], 1.0).unwrap();
    assert!(matches!(point_fit_net(&too_many, 1.0, 2, 2), Err(ForgeError::Capacity(_))));
    assert!(SampleSequence::new(vec![0.0, 2.0], 1.0).is_err());
    assert!(SampleSequence::new(vec![-1.0], 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wide_to_deep_is_pointwise_identity(seed in any::<u64>(), n in 1usize..=4, l in 1usize..=5, x in -4.0f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_two_layer(&mut rng, n, l);
        let deep = wide_to_deep(&net, l).unwrap();
        prop_assert!(deep.width() <= 2 * n + 2);
        prop_assert!(deep.depth() <= l + 1);
        let a = eval1(&net, x);
        prop_assert!((a - eval1(&deep, x)).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn point_fit_meets_tolerance_and_range(seed in any::<u64>(), n in 1usize..=3, l in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = rng.random_range(0.05..1.0);
        let count = rng.random_range(1..=n * n * l * l);
        let mut ys = vec![rng.random_range(0.0..3.0 * eps)];
        for _ in 1..count {
            let prev: f64 = *ys.last().unwrap();
            ys.push((prev + rng.random_range(-eps..eps)).max(0.0));
        }
        let ymax = ys.iter().cloned().fold(0.0, f64::max);
        let net = point_fit_net(&SampleSequence::new(ys.clone(), eps).unwrap(), eps, n, l).unwrap();
        prop_assert!(net.width() <= 12 * n + 8);
        prop_assert!(net.depth() <= 4 * l + 9);
        for (j, y) in ys.iter().enumerate() {
            prop_assert!((eval1(&net, j as f64) - y).abs() <= eps * (1.0 + 1e-9));
        }
        for _ in 0..200 {
            let v = eval1(&net, rng.random_range(-20.0..(count as f64 + 20.0)));
            prop_assert!(v >= 0.0 && v <= ymax * (1.0 + 1e-12));
        }
    }

    #[test]
    fn step_nets_hit_every_plateau(n in 1usize..=4, l in 1usize..=3, d in 1usize..=2) {
        let k = step_count(n, l, d);
        let delta = 1.0 / (3 * k) as f64;
        let net = step_function_net(n, l, d, delta).unwrap();
        let r = iroot(n as u64, d as u32) as usize;
        prop_assert!(net.width() <= 4 * r + 3);
        prop_assert!(net.depth() <= 4 * l + 5);
        plateau_probe(&net, k, delta, 10);
    }
}
