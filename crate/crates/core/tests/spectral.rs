use illposed_core::direct::{naive_solve, tikhonov_classic};
use illposed_core::linalg::{pinv_left, svd, DenseMatrix, Vector};
use illposed_core::operators::{
    add_noise, conv_matrix, gaussian_matrix, gaussian_vector, psf_build, NoiseModel, PsfParams,
};
use illposed_core::spectral::{
    classify_illposedness, filter_factors, picard_table, tikhonov_svd_solve, tsvd_solve,
    FilterKind, IllPosedness,
};
use illposed_core::{BoundaryCondition, PsfKind};
use proptest::prelude::*;

fn blur_1d(n: usize, sigma: f64) -> DenseMatrix {
    // Gaussian blur on a line, zero boundaries
    let psf = psf_build(
        PsfKind::GaussianAniso,
        &PsfParams {
            size: 9,
            sigma_x: sigma,
            sigma_y: 1e-3,
            ..PsfParams::default()
        },
    )
    .unwrap();
    conv_matrix(psf.kernel(), 1, n, BoundaryCondition::Zero).unwrap_or_else(|_| {
        let k = psf.kernel();
        DenseMatrix::from_fn(n, n, |i, j| {
            let d = j as isize - i as isize + 4;
            if (0..9).contains(&d) {
                k.get(4, d as usize)
            } else {
                0.0
            }
        })
    })
}

#[test]
fn picard_identity() {
    let f = svd(&DenseMatrix::identity(4, 4)).unwrap();
    let t = picard_table(&f, &Vector::from_element(4, 1.0)).unwrap();
    assert_eq!(t.len(), 4);
    assert!(t
        .coeff
        .iter()
        .chain(&t.ratio)
        .all(|v| (v - 1.0).abs() < 1e-15));
    assert!(picard_table(&f, &Vector::zeros(3)).is_err());
}

#[test]
fn picard_noiseless_versus_noisy() {
    let n = 64;
    let a = DenseMatrix::from_diagonal(&Vector::from_fn(n, |i, _| (-(i as f64) / 4.0).exp()));
    let f = svd(&a).unwrap();
    let x = Vector::from_element(n, 1.0);
    let clean = picard_table(&f, &(&a * &x)).unwrap();
    assert!(clean.ratio.iter().all(|r| (r - 1.0).abs() < 1e-10));

    let std = 1e-4;
    let y = add_noise(&(&a * &x), NoiseModel::Gaussian { mean: 0.0, std }, 3).unwrap();
    let noisy = picard_table(&f, &y).unwrap();
    let mut tail = noisy.coeff[n - 16..].to_vec();
    tail.sort_by(f64::total_cmp);
    let median = tail[tail.len() / 2];
    // |uᵢᵀδ| ~ |N(0, std²)|, whose median is 0.674·std
    assert!(median > 0.2 * std && median < 3.0 * std, "{median}");
    assert!(noisy.ratio[n - 1] > 100.0);
}

#[test]
fn classification_of_synthetic_spectra() {
    let n = 100;
    let mild: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-0.5)).collect();
    let c = classify_illposedness(&mild).unwrap();
    assert_eq!(c.class, IllPosedness::Mild);
    assert!((c.alpha_hat - 0.5).abs() <= 0.05);
    let moderate: Vec<f64> = (1..=n).map(|i| (i as f64).powi(-2)).collect();
    assert_eq!(
        classify_illposedness(&moderate).unwrap().class,
        IllPosedness::Moderate
    );
    let severe: Vec<f64> = (1..=n).map(|i| (-(i as f64)).exp()).collect();
    assert_eq!(
        classify_illposedness(&severe).unwrap().class,
        IllPosedness::Severe
    );
    assert!(classify_illposedness(&mild[..7]).is_err());
}

#[test]
fn tsvd_examples() {
    let a = DenseMatrix::from_diagonal(&Vector::from_vec(vec![2.0, 1.0]));
    let f = svd(&a).unwrap();
    let x = tsvd_solve(&f, &Vector::from_vec(vec![4.0, 3.0]), 1).unwrap();
    assert!((x - Vector::from_vec(vec![2.0, 0.0])).amax() < 1e-15);
    assert!(tsvd_solve(&f, &Vector::zeros(2), 0).is_err());
    assert!(tsvd_solve(&f, &Vector::zeros(2), 3).is_err());

    let a = gaussian_matrix(12, 8, 1.0, 5);
    let y = gaussian_vector(12, 6);
    let f = svd(&a).unwrap();
    let oracle = pinv_left(&a).unwrap() * &y;
    assert!((tsvd_solve(&f, &y, 8).unwrap() - &oracle).norm() <= 1e-8 * oracle.norm());

    let phi = filter_factors(&f.sigmas, 0.0, FilterKind::Tsvd { k: 3 })
        .unwrap()
        .phi;
    assert_eq!(phi, vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
}

#[test]
fn filter_factor_identities() {
    let sig = [4.0, 1.0, 0.25, 1e-3];
    for kind in [FilterKind::Tikhonov, FilterKind::Damped] {
        assert!(filter_factors(&sig, 0.0, kind)
            .unwrap()
            .phi
            .iter()
            .all(|p| *p == 1.0));
    }
    let half = filter_factors(&[0.7], 0.7, FilterKind::Tikhonov)
        .unwrap()
        .phi[0];
    assert!((half - 0.5).abs() < 1e-15);
    let lambda = 2.0;
    for ratio in [0.05, 0.02, 0.001] {
        let s = ratio * lambda;
        let phi = filter_factors(&[s], lambda, FilterKind::Tikhonov)
            .unwrap()
            .phi[0];
        let asym = s * s / (lambda * lambda);
        assert!((phi - asym).abs() <= 0.01 * asym);
    }
    assert!(filter_factors(&sig, -1.0, FilterKind::Damped).is_err());
}

#[test]
fn tikhonov_spectral_examples() {
    let f = svd(&DenseMatrix::from_element(1, 1, 1.0)).unwrap();
    let x = tikhonov_svd_solve(&f, &Vector::from_element(1, 1.0), 1.0).unwrap();
    assert!((x[0] - 0.5).abs() < 1e-15);

    let a = gaussian_matrix(20, 20, 1.0, 8);
    let y = gaussian_vector(20, 9);
    let f = svd(&a).unwrap();
    let direct = tikhonov_classic(&a, &y, 0.3).unwrap();
    assert!((tikhonov_svd_solve(&f, &y, 0.3).unwrap() - &direct).norm() <= 1e-8 * direct.norm());

    let naive = naive_solve(&a, &y).unwrap();
    assert!((tikhonov_svd_solve(&f, &y, 1e-9).unwrap() - &naive).norm() <= 1e-6 * naive.norm());
    assert!(tikhonov_svd_solve(&f, &y, 0.0).is_err());
}

#[test]
fn norms_are_monotone_along_lambda() {
    let a = blur_1d(50, 1.5);
    let f = svd(&a).unwrap();
    let y = add_noise(
        &(&a * Vector::from_element(50, 1.0)),
        NoiseModel::Gaussian {
            mean: 0.0,
            std: 0.01,
        },
        1,
    )
    .unwrap();
    let grid = illposed_core::linalg::logspace(1e-5, 10.0, 20);
    let (mut prev_x, mut prev_r) = (f64::INFINITY, 0.0);
    for l in grid {
        let x = tikhonov_svd_solve(&f, &y, l).unwrap();
        let (xn, rn) = (x.norm(), (&a * &x - &y).norm());
        assert!(xn <= prev_x * (1.0 + 1e-12));
        assert!(rn >= prev_r * (1.0 - 1e-12));
        prev_x = xn;
        prev_r = rn;
    }
}

#[test]
fn tsvd_norm_grows_with_k() {
    let a = gaussian_matrix(15, 10, 1.0, 2);
    let y = gaussian_vector(15, 3);
    let f = svd(&a).unwrap();
    let norms: Vec<f64> = (1..=10)
        .map(|k| tsvd_solve(&f, &y, k).unwrap().norm())
        .collect();
    assert!(norms.windows(2).all(|w| w[1] >= w[0]));
}

proptest! {
    #[test]
    fn filter_factors_lie_in_unit_interval(
        sig in prop::collection::vec(0.0..1e3f64, 1..20),
        lambda in 0.0..1e3f64,
        k in 0usize..25,
    ) {
        for kind in [FilterKind::Tikhonov, FilterKind::Damped, FilterKind::Tsvd { k }] {
            let f = filter_factors(&sig, lambda, kind).unwrap();
            prop_assert_eq!(f.phi.len(), sig.len());
            prop_assert!(f.phi.iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }

    #[test]
    fn spectral_tikhonov_is_linear_in_y(seed in 0u64..300, a in -5.0..5.0f64, lambda in 1e-3..10.0f64) {
        let m = gaussian_matrix(9, 7, 1.0, seed);
        let f = svd(&m).unwrap();
        let y1 = gaussian_vector(9, seed + 1);
        let y2 = gaussian_vector(9, seed + 2);
        let lhs = tikhonov_svd_solve(&f, &(&y1 * a + &y2), lambda).unwrap();
        let rhs = tikhonov_svd_solve(&f, &y1, lambda).unwrap() * a + tikhonov_svd_solve(&f, &y2, lambda).unwrap();
        prop_assert!((lhs - &rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }
}
