use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hmi::diffcum::{
    differential_cumulant, differential_moment, gauss_legendre, local_cumulant, local_moment, parity_alpha, r_factor,
    same_moment_class, window_r_factor, CubeWindow, Density, FiniteDifference, Gaussian, Integrator, Mec, Method,
    Product, Univariate,
};
use hmi::logdensity::MECSpec;
use hmi::partitions::MultiIndex;

fn binary_indices(p: usize, max_order: usize) -> Vec<MultiIndex> {
    (1u32..1 << p)
        .filter(|b| b.count_ones() as usize <= max_order)
        .map(|b| MultiIndex::indicator(p, (0..p).filter(|i| b >> i & 1 == 1)))
        .collect()
}

fn in_threads<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f)
}

proptest! {
    #[test]
    fn moment_classes_are_parity_classes(p in 1usize..=4, a in prop::collection::vec(0u32..=5, 4), b in prop::collection::vec(0u32..=5, 4)) {
        let u = MultiIndex::new(a[..p].to_vec()).unwrap();
        let k = MultiIndex::new(b[..p].to_vec()).unwrap();
        let same = a[..p].iter().zip(&b[..p]).all(|(x, y)| x % 2 == y % 2);
        prop_assert_eq!(same_moment_class(&u, &k).unwrap(), same);
        prop_assert!(parity_alpha(&k).is_binary());
        prop_assert!(same_moment_class(&parity_alpha(&k), &k).unwrap());
    }

    #[test]
    fn r_factor_matches_cube_moments(k in prop::collection::vec(0u32..=4, 1..=3), eps in 0.05f64..2.0) {
        // r(ε, k) is the mean of x^{k+α} over the cube [-ε, ε]^p
        let k = MultiIndex::new(k).unwrap();
        let alpha = parity_alpha(&k);
        let nodes = gauss_legendre(12).unwrap();
        let mut expected = 1.0;
        for (&ki, &ai) in k.entries().iter().zip(alpha.entries()) {
            let e = (ki + ai) as i32;
            let avg: f64 = nodes.iter().map(|&(t, w)| w * (eps * t).powi(e)).sum::<f64>() / 2.0;
            expected *= avg;
        }
        let r = r_factor(eps, &k).unwrap();
        prop_assert!((r - expected).abs() <= 1e-12 * expected.abs().max(1e-300), "{r} vs {expected}");
    }
}

#[test]
fn there_are_two_to_the_p_moment_classes() {
    for p in 1..=4usize {
        let mut classes = BTreeSet::new();
        let mut count = 0;
        for code in 0..5u32.pow(p as u32) {
            let entries: Vec<u32> = (0..p).map(|i| code / 5u32.pow(i as u32) % 5).collect();
            classes.insert(parity_alpha(&MultiIndex::new(entries).unwrap()));
            count += 1;
        }
        assert!(count > 1 << p);
        assert_eq!(classes.len(), 1 << p);
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn partition_sum_agrees_with_log_derivative() {
    let fd = FiniteDifference::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gauss = Gaussian::from_covariance(
        vec![0.2, -0.1, 0.4],
        nalgebra::DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.1, 0.3, 1.2, -0.2, 0.1, -0.2, 0.8]),
    )
    .unwrap();
    let spec = MECSpec::new(
        3,
        [
            (MultiIndex::indicator(3, [0]), q(1, 2)),
            (MultiIndex::indicator(3, [0, 1]), q(-1, 1)),
            (MultiIndex::indicator(3, [1, 2]), q(3, 4)),
            (MultiIndex::indicator(3, [0, 1, 2]), q(1, 3)),
        ],
    )
    .unwrap();
    let mec = Mec::new(&spec, 0.0, 1.0).unwrap();
    let densities: [(&dyn Density, (f64, f64)); 2] = [(&gauss, (-1.5, 1.5)), (&mec, (0.1, 0.9))];
    for (f, (lo, hi)) in densities {
        for _ in 0..25 {
            let xi: Vec<f64> = (0..3).map(|_| rng.gen_range(lo..hi)).collect();
            for k in binary_indices(3, 3) {
                let a = differential_cumulant(f, &xi, &k, Method::PartitionSum, &fd).unwrap().value;
                let b = differential_cumulant(f, &xi, &k, Method::LogDerivative, &fd).unwrap().value;
                assert!((a - b).abs() <= 1e-5, "k={k} ξ={xi:?}: {a} vs {b}");
                let exact = f.log_derivative(&xi, &k).unwrap();
                assert!((b - exact).abs() <= 1e-5, "k={k} ξ={xi:?}: {b} vs {exact}");
            }
        }
    }
}

#[test]
fn finite_differences_match_closed_forms() {
    let fd = FiniteDifference::default();
    let product = Product::new(vec![
        Univariate::Logistic { location: 0.3, scale: 0.7 },
        Univariate::Normal { mean: -1.0, sd: 2.0 },
    ])
    .unwrap();
    for xi in [[0.0, 0.0], [1.2, -0.5], [-2.0, 3.0]] {
        for k in ["1,0", "0,1", "2,0", "0,2", "1,1"] {
            let k: MultiIndex = k.parse().unwrap();
            let est = differential_cumulant(&product, &xi, &k, Method::LogDerivative, &fd).unwrap().value;
            let alpha = parity_alpha(&k);
            if alpha.is_zero() {
                continue;
            }
            let exact = product.log_derivative(&xi, &alpha).unwrap();
            assert!((est - exact).abs() < 1e-6, "k={k} ξ={xi:?}: {est} vs {exact}");
        }
    }
    // m^ξ_k for a Gaussian: ∂_1 f / f = −(Λ(x−μ))_1
    let g = Gaussian::bivariate(0.5).unwrap();
    let m = differential_moment(&g, &[0.4, -0.3], &"3,2".parse().unwrap(), &fd).unwrap().value;
    let exact = g.log_derivative(&[0.4, -0.3], &"1,0".parse().unwrap()).unwrap();
    assert!((m - exact).abs() < 1e-6);
}

#[test]
fn local_moments_converge_at_second_order() {
    let g = Gaussian::bivariate(0.5).unwrap();
    let fd = FiniteDifference::default();
    let xi = [0.5, -0.2];
    for k in ["1,0", "1,1", "3,0", "2,1"] {
        let k: MultiIndex = k.parse().unwrap();
        let target = differential_moment(&g, &xi, &k, &fd).unwrap().value;
        let errors: Vec<f64> = [0.4, 0.2, 0.1]
            .iter()
            .map(|&eps| {
                let w = CubeWindow::new(xi.to_vec(), eps).unwrap();
                let rep = local_moment(&g, &w, &k, Integrator::default()).unwrap();
                assert_eq!(rep.r, Some(window_r_factor(&w, &k).unwrap()));
                (rep.scaled.unwrap() - target).abs()
            })
            .collect();
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((2.5..=6.0).contains(&ratio), "k={k}: errors {errors:?}");
        }
    }
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let g = Gaussian::bivariate(-0.3).unwrap();
    let w = CubeWindow::new(vec![0.1, 0.7], 0.3).unwrap();
    let k: MultiIndex = "2,1".parse().unwrap();
    for integrator in [Integrator::Tensor { nodes: 16 }, Integrator::MonteCarlo { samples: 20_000, seed: 42 }] {
        let run = |n| in_threads(n, || local_cumulant(&g, &w, &k, integrator).unwrap());
        let one = run(1);
        assert_eq!(one, run(1));
        assert_eq!(one, run(4));
        assert_eq!(one.value.to_bits(), run(3).value.to_bits());
    }
}

#[test]
fn monte_carlo_agrees_with_quadrature() {
    let g = Gaussian::bivariate(0.6).unwrap();
    let w = CubeWindow::new(vec![0.3, 0.2], 0.5).unwrap();
    let k: MultiIndex = "1,0".parse().unwrap();
    let tensor = local_moment(&g, &w, &k, Integrator::default()).unwrap().value;
    let mc = local_moment(&g, &w, &k, Integrator::MonteCarlo { samples: 200_000, seed: 7 }).unwrap().value;
    // the local first moment is O(ε²); compare on that scale
    assert!((tensor - mc).abs() < 2e-3, "{tensor} vs {mc}");
    let other = local_moment(&g, &w, &k, Integrator::MonteCarlo { samples: 200_000, seed: 8 }).unwrap().value;
    assert_ne!(mc, other);
}

#[test]
fn invalid_inputs() {
    let g = Gaussian::bivariate(0.1).unwrap();
    let fd = FiniteDifference::default();
    assert!(differential_moment(&g, &[0.0], &"1,0".parse().unwrap(), &fd).is_err());
    assert!(differential_cumulant(&g, &[0.0, 0.0], &"0,0".parse().unwrap(), Method::PartitionSum, &fd).is_err());
    assert!(CubeWindow::new(vec![0.0, 0.0], 0.0).is_err());
    assert!(r_factor(-1.0, &"1".parse().unwrap()).is_err());
    assert!(gauss_legendre(0).is_err());
}
