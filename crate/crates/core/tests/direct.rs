use illposed_core::direct::{
    map_gaussian, naive_solve, newton_step, quadratic_gradient, stacked_solve, tikhonov_classic,
    tikhonov_data_form, tikhonov_general, tikhonov_multi, GaussianModel,
};
use illposed_core::linalg::{lstsq_qr, DenseMatrix, Vector};
use illposed_core::operators::{gaussian_matrix, gaussian_vector};
use illposed_core::regmat::{build_l, LKind};
use illposed_core::RegularizerSpec;
use proptest::prelude::*;

fn close(a: &Vector, b: &Vector, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

#[test]
fn scalar_and_identity_cases() {
    let a = DenseMatrix::identity(3, 3);
    let y = Vector::from_vec(vec![2.0, -4.0, 6.0]);
    // (1 + λ²)⁻¹ y
    let x = tikhonov_classic(&a, &y, 1.0).unwrap();
    assert!(close(&x, &(&y * 0.5), 1e-15));
    assert!(close(&tikhonov_classic(&a, &y, 0.0).unwrap(), &y, 1e-15));
    assert!(tikhonov_classic(&a, &Vector::zeros(2), 1.0).is_err());
    assert!(tikhonov_classic(&a, &y, -1.0).is_err());
}

#[test]
fn data_form_matches_classic_for_tall_and_wide() {
    for (m, n) in [(15, 10), (10, 15)] {
        let a = gaussian_matrix(m, n, 1.0, 21);
        let y = gaussian_vector(m, 22);
        for lambda in [1e-3, 0.1, 3.0] {
            let c = tikhonov_classic(&a, &y, lambda).unwrap();
            assert!(
                close(&tikhonov_data_form(&a, &y, lambda).unwrap(), &c, 1e-8),
                "{m}x{n} λ={lambda}"
            );
        }
    }
    assert!(tikhonov_data_form(&DenseMatrix::identity(2, 2), &Vector::zeros(2), 0.0).is_err());
}

#[test]
fn stacked_matches_normal_equations() {
    let a = gaussian_matrix(20, 12, 1.0, 4);
    let y = gaussian_vector(20, 5);
    let regs = vec![
        RegularizerSpec::new(build_l(LKind::D1, 12).unwrap(), 0.4).unwrap(),
        RegularizerSpec::new(build_l(LKind::D2, 12).unwrap(), 0.9)
            .unwrap()
            .with_reference(gaussian_vector(12, 6))
            .unwrap(),
    ];
    let m = tikhonov_multi(&a, &y, &regs).unwrap();
    assert!(close(&stacked_solve(&a, &y, &regs).unwrap(), &m, 1e-8));
}

#[test]
fn two_identical_terms_double_the_weight() {
    let a = gaussian_matrix(10, 8, 1.0, 7);
    let y = gaussian_vector(10, 8);
    let l = build_l(LKind::D1, 8).unwrap();
    let one = RegularizerSpec::new(l.clone(), 0.3).unwrap();
    let two = tikhonov_multi(&a, &y, &[one.clone(), one]).unwrap();
    let merged =
        tikhonov_general(&a, &y, &RegularizerSpec::new(l, 0.3 * 2f64.sqrt()).unwrap()).unwrap();
    assert!(close(&two, &merged, 1e-8));
}

#[test]
fn newton_step_from_zero_lands_on_minimizer() {
    let a = gaussian_matrix(14, 9, 1.0, 9);
    let y = gaussian_vector(14, 10);
    let regs = vec![RegularizerSpec::new(build_l(LKind::D2, 9).unwrap(), 0.5).unwrap()];
    let x1 = newton_step(&a, &y, &regs, &Vector::zeros(9)).unwrap();
    let x = tikhonov_multi(&a, &y, &regs).unwrap();
    assert!(close(&x1, &x, 1e-8));
    let g = quadratic_gradient(&a, &y, &regs, &x);
    assert!(g.norm() <= 1e-8 * (1.0 + a.tr_mul(&y).norm()));
}

#[test]
fn white_gaussian_map_is_classic_tikhonov() {
    let a = gaussian_matrix(12, 6, 1.0, 11);
    let y = gaussian_vector(12, 12);
    let m = map_gaussian(&a, &y, &GaussianModel::white(12, 6, 0.7)).unwrap();
    assert!(close(&m, &tikhonov_classic(&a, &y, 0.7).unwrap(), 1e-8));
}

#[test]
fn map_with_mean_and_weights() {
    // whitening oracle: weighted least squares written out by hand
    let a = gaussian_matrix(8, 4, 1.0, 13);
    let y = gaussian_vector(8, 14);
    let le = DenseMatrix::from_diagonal(&Vector::from_fn(8, |i, _| 1.0 + i as f64));
    let mu_e = Vector::from_element(8, 0.25);
    let mu_x = gaussian_vector(4, 15);
    let model = GaussianModel {
        l_e: le.clone(),
        mu_e: mu_e.clone(),
        l_pr: DenseMatrix::identity(4, 4),
        mu_x: mu_x.clone(),
        lambda: 0.5,
    };
    let w = le.tr_mul(&le);
    let lhs = a.tr_mul(&(&w * &a)) + DenseMatrix::identity(4, 4) * 0.25;
    let rhs = a.tr_mul(&(&w * (&y + &mu_e))) + &mu_x * 0.25;
    let oracle = lhs.lu().solve(&rhs).unwrap();
    assert!(close(&map_gaussian(&a, &y, &model).unwrap(), &oracle, 1e-8));
}

#[test]
fn large_lambda_pulls_to_reference() {
    let a = gaussian_matrix(10, 5, 1.0, 16);
    let y = gaussian_vector(10, 17);
    let xr = Vector::from_vec(vec![1.0, -2.0, 0.5, 3.0, 0.0]);
    let reg = RegularizerSpec::identity(5, 1e5)
        .unwrap()
        .with_reference(xr.clone())
        .unwrap();
    assert!((tikhonov_general(&a, &y, &reg).unwrap() - &xr).norm() <= 1e-6);
}

#[test]
fn reference_enters_linearly() {
    // x(x*) = x(0) + λ²(AᵀA + λ²LᵀL)⁻¹LᵀL x*
    let a = gaussian_matrix(9, 6, 1.0, 18);
    let y = gaussian_vector(9, 19);
    let l = build_l(LKind::D1Invertible, 6).unwrap();
    let xr = gaussian_vector(6, 20);
    let lambda = 0.8;
    let x0 = tikhonov_general(&a, &y, &RegularizerSpec::new(l.clone(), lambda).unwrap()).unwrap();
    let x1 = tikhonov_general(
        &a,
        &y,
        &RegularizerSpec::new(l.clone(), lambda)
            .unwrap()
            .with_reference(xr.clone())
            .unwrap(),
    )
    .unwrap();
    let ltl = l.tr_mul(&l);
    let h = a.tr_mul(&a) + &ltl * (lambda * lambda);
    let shift = h.lu().solve(&(&ltl * &xr * (lambda * lambda))).unwrap();
    assert!(close(&x1, &(x0 + shift), 1e-8));
}

#[test]
fn heavily_weighted_datum_is_fit() {
    let mut a = gaussian_matrix(10, 4, 1.0, 21);
    let mut y = gaussian_vector(10, 22);
    let w = 1e6;
    for j in 0..4 {
        a[(0, j)] *= w;
    }
    y[0] *= w;
    let x = tikhonov_classic(&a, &y, 0.5).unwrap();
    let row0: f64 = (0..4).map(|j| a[(0, j)] * x[j]).sum();
    assert!(((row0 - y[0]) / w).abs() <= 1e-6);
}

#[test]
fn naive_inverse_amplifies_noise() {
    let n = 10;
    // Hilbert-like smoothing matrix
    let a = DenseMatrix::from_fn(n, n, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
    let x = Vector::from_element(n, 1.0);
    let y = &a * &x + gaussian_vector(n, 23) * 1e-6;
    let naive = naive_solve(&a, &y).unwrap();
    let tik = tikhonov_classic(&a, &y, 1e-3).unwrap();
    assert!((&naive - &x).norm() > 100.0 * (&tik - &x).norm());
    assert!(naive_solve(&gaussian_matrix(3, 4, 1.0, 1), &Vector::zeros(3)).is_err());
}

#[test]
fn zero_lambda_is_least_squares() {
    let a = gaussian_matrix(16, 7, 1.0, 24);
    let y = gaussian_vector(16, 25);
    let ls = lstsq_qr(&a, &y).unwrap();
    let x = tikhonov_general(
        &a,
        &y,
        &RegularizerSpec::new(build_l(LKind::D1, 7).unwrap(), 0.0).unwrap(),
    )
    .unwrap();
    assert!(close(&x, &ls, 1e-8));
}

proptest! {
    #[test]
    fn optimality_condition(seed in 0u64..200, lambda in 1e-2..10.0f64, m in 4usize..14, n in 2usize..10) {
        let a = gaussian_matrix(m, n, 1.0, seed);
        let y = gaussian_vector(m, seed + 7);
        let regs = vec![RegularizerSpec::identity(n, lambda).unwrap()];
        let x = tikhonov_multi(&a, &y, &regs).unwrap();
        let g = quadratic_gradient(&a, &y, &regs, &x);
        prop_assert!(g.norm() <= 1e-8 * (1.0 + a.tr_mul(&y).norm()));
    }

    #[test]
    fn norm_shrinks_as_lambda_grows(seed in 0u64..200, l1 in 1e-3..5.0f64, f in 1.01..10.0f64) {
        let a = gaussian_matrix(10, 6, 1.0, seed);
        let y = gaussian_vector(10, seed + 3);
        let x1 = tikhonov_classic(&a, &y, l1).unwrap();
        let x2 = tikhonov_classic(&a, &y, l1 * f).unwrap();
        prop_assert!(x2.norm() <= x1.norm() * (1.0 + 1e-12));
        prop_assert!((&a * &x2 - &y).norm() >= (&a * &x1 - &y).norm() * (1.0 - 1e-12));
    }
}
