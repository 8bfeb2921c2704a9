use illposed_core::linalg::{condition_number, DenseMatrix, Vector};
use illposed_core::operators::{gaussian_matrix, gaussian_vector};
use illposed_core::regression::{
    build_design, elastic_net, gen_lasso, lasso, lasso_critical_lambda, ols, ridge,
    ridge_bias_variance, Basis, DesignMatrix,
};
use illposed_core::StopRule;
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

fn close(a: &Vector, b: &Vector, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

fn nodes(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

#[test]
fn design_matrices() {
    let t = nodes(7);
    let x = build_design(Basis::Poly { degree: 0 }, &t).unwrap();
    assert_eq!(x.matrix(), &DenseMatrix::from_element(7, 1, 1.0));

    let n = 32;
    let tt: Vec<f64> = (0..n)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / n as f64)
        .collect();
    let trig = build_design(Basis::Trig { freqs: 4 }, &tt)
        .unwrap()
        .into_inner();
    let gram = trig.tr_mul(&trig);
    assert!((gram - DenseMatrix::identity(8, 8) * (n as f64 / 2.0)).amax() < 1e-10);

    let poly = build_design(Basis::Poly { degree: 9 }, &nodes(40)).unwrap();
    assert!(condition_number(poly.matrix(), 0.0).unwrap() > 1e4);

    assert!(build_design(Basis::Trig { freqs: 0 }, &t).is_err());
    assert!(build_design(Basis::Poly { degree: 2 }, &[]).is_err());
    assert!(DesignMatrix::new(DenseMatrix::zeros(3, 2)).is_err());
}

#[test]
fn ridge_and_lasso_limits() {
    let x = gaussian_matrix(20, 5, 1.0, 1);
    let y = gaussian_vector(20, 2);
    let b = ols(&x, &y).unwrap();
    assert!(close(&ridge(&x, &y, 0.0).unwrap(), &b, 1e-10));
    let stop = StopRule::iters(5000).with_tol(1e-15);
    assert!(close(&lasso(&x, &y, 0.0, stop).unwrap(), &b, 1e-6));

    let crit = lasso_critical_lambda(&x, &y);
    assert_eq!(lasso(&x, &y, crit * 1.001, stop).unwrap().amax(), 0.0);
    assert!(lasso(&x, &y, crit * 0.9, stop).unwrap().amax() > 0.0);
}

#[test]
fn elastic_net_endpoints() {
    let x = gaussian_matrix(18, 6, 1.0, 3);
    let y = gaussian_vector(18, 4);
    let stop = StopRule::iters(10000).with_tol(1e-15);
    assert!(close(
        &elastic_net(&x, &y, 0.6, 0.0, stop).unwrap(),
        &lasso(&x, &y, 0.6, stop).unwrap(),
        1e-6
    ));
    assert!(close(
        &elastic_net(&x, &y, 0.0, 0.8, stop).unwrap(),
        &ridge(&x, &y, 0.8).unwrap(),
        1e-6
    ));
    assert!(elastic_net(&x, &y, 0.1, -1.0, stop).is_err());
}

#[test]
fn generalized_lasso_with_identity_is_lasso() {
    let x = gaussian_matrix(15, 6, 1.0, 5);
    let y = gaussian_vector(15, 6);
    let stop = StopRule::iters(20000).with_tol(1e-15);
    let g = gen_lasso(&x, &y, &DenseMatrix::identity(6, 6), 0.7, 1.0, stop).unwrap();
    assert!(close(&g, &lasso(&x, &y, 0.7, stop).unwrap(), 1e-5));
}

#[test]
fn ridge_shrinks_quintic_fit() {
    let t: Vec<f64> = nodes(30).iter().map(|v| 2.0 * v - 1.0).collect();
    let x = build_design(Basis::Poly { degree: 5 }, &t)
        .unwrap()
        .into_inner();
    let truth = Vector::from_vec(vec![1.0, -2.0, 0.5, 3.0, -1.0, 0.8]);
    let y = &x * &truth + gaussian_vector(30, 7) * 0.5;
    let b = ols(&x, &y).unwrap();
    let r = ridge(&x, &y, 2f64.sqrt()).unwrap();
    assert!(r.norm() < b.norm());
}

#[test]
fn bias_variance_trends() {
    let x = gaussian_matrix(30, 6, 1.0, 8);
    let beta = gaussian_vector(6, 9);
    let grid: Vec<f64> = [0.0, 0.01, 0.1, 1.0, 10.0, 100.0].to_vec();
    let bv = ridge_bias_variance(&x, &beta, 0.5, &grid).unwrap();
    assert_eq!(bv[0].bias2, 0.0);
    // λ = 0 variance is s² tr((XᵀX)⁻¹)
    let tr = x.tr_mul(&x).try_inverse().unwrap().trace();
    assert!((bv[0].variance - 0.5 * tr).abs() <= 1e-10 * bv[0].variance);
    for w in bv.windows(2) {
        assert!(w[1].variance < w[0].variance);
        assert!(w[1].bias2 > w[0].bias2);
    }
    assert!(bv
        .iter()
        .all(|r| (r.mse - r.variance - r.bias2).abs() < 1e-15));
    assert!(ridge_bias_variance(&x, &beta, -1.0, &grid).is_err());
    assert!(ridge_bias_variance(&x, &Vector::zeros(5), 1.0, &grid).is_err());
}

#[test]
fn bias_variance_matches_monte_carlo() {
    let x = gaussian_matrix(6, 4, 1.0, 10);
    let beta = Vector::from_vec(vec![1.0, -0.5, 2.0, 0.3]);
    let s = 0.7;
    let lam = 0.8;
    let theory = ridge_bias_variance(&x, &beta, s * s, &[lam]).unwrap()[0];
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, s).unwrap();
    let draws = 2000;
    let mut ests = Vec::with_capacity(draws);
    for _ in 0..draws {
        let e = Vector::from_fn(6, |_, _| noise.sample(&mut rng));
        ests.push(ridge(&x, &(&x * &beta + e), lam.sqrt()).unwrap());
    }
    let mean = ests.iter().fold(Vector::zeros(4), |acc, b| acc + b) / draws as f64;
    let var: f64 =
        ests.iter().map(|b| (b - &mean).norm_squared()).sum::<f64>() / (draws - 1) as f64;
    let bias2 = (&mean - &beta).norm_squared();
    let mse: f64 = ests.iter().map(|b| (b - &beta).norm_squared()).sum::<f64>() / draws as f64;
    assert!(
        (var / theory.variance - 1.0).abs() <= 0.05,
        "{var} vs {}",
        theory.variance
    );
    assert!(
        (mse / theory.mse - 1.0).abs() <= 0.05,
        "{mse} vs {}",
        theory.mse
    );
    assert!((bias2 - theory.bias2).abs() <= 0.05 * theory.mse);
}

proptest! {
    #[test]
    fn ridge_norm_decreases_in_lambda(seed in 0u64..200, l in 1e-3..3.0f64, f in 1.01..5.0f64) {
        let x = gaussian_matrix(12, 5, 1.0, seed);
        let y = gaussian_vector(12, seed + 100);
        prop_assert!(ridge(&x, &y, l * f).unwrap().norm() <= ridge(&x, &y, l).unwrap().norm() * (1.0 + 1e-12));
    }
}
