use illposed_core::linalg::{svd, DenseMatrix, Vector, RANK_TOL};
use illposed_core::operators::{conv_matrix, gaussian_vector, mask_operator};
use illposed_core::regmat::{
    build_l, laplacian2d_operator, laplacian_kernel, stacked_full_column_rank, LKind,
};
use illposed_core::{BoundaryCondition, ImageGrid, LinearOperator, RegularizerSpec};
use proptest::prelude::*;

#[test]
fn difference_matrices() {
    let d1 = build_l(LKind::D1, 3).unwrap();
    assert_eq!(
        d1,
        DenseMatrix::from_row_slice(2, 3, &[1.0, -1.0, 0.0, 0.0, 1.0, -1.0])
    );
    let d2 = build_l(LKind::D2, 4).unwrap();
    assert_eq!(
        d2,
        DenseMatrix::from_row_slice(2, 4, &[1.0, -2.0, 1.0, 0.0, 0.0, 1.0, -2.0, 1.0])
    );
    assert_eq!(
        build_l(LKind::Identity, 5).unwrap(),
        DenseMatrix::identity(5, 5)
    );
    assert!(build_l(LKind::D2Reflexive, 2).is_err());
    assert!(build_l(LKind::D1, 1).is_err());
    assert_eq!("d2-reflexive".parse::<LKind>().unwrap(), LKind::D2Reflexive);
    assert!("d3".parse::<LKind>().is_err());
}

#[test]
fn differences_annihilate_constants() {
    for kind in [LKind::D1, LKind::D2, LKind::D2Reflexive] {
        let l = build_l(kind, 9).unwrap();
        assert_eq!(
            &l * Vector::from_element(9, 2.5),
            Vector::zeros(l.nrows()),
            "{kind:?}"
        );
    }
}

#[test]
fn ranks_of_difference_matrices() {
    for n in [3usize, 7, 20] {
        assert_eq!(
            svd(&build_l(LKind::D1, n).unwrap()).unwrap().rank(RANK_TOL),
            n - 1
        );
        assert_eq!(
            svd(&build_l(LKind::D2, n).unwrap()).unwrap().rank(RANK_TOL),
            n - 2
        );
        let inv = svd(&build_l(LKind::D1Invertible, n).unwrap()).unwrap();
        assert_eq!(inv.rank(RANK_TOL), n);
        assert!(*inv.sigmas.last().unwrap() > 0.0);
    }
}

#[test]
fn laplacian_operator() {
    let op = laplacian2d_operator(6, 7, BoundaryCondition::Periodic).unwrap();
    assert!(op.apply(&Vector::from_element(42, 3.0)).amax() < 1e-14);

    let mut imp = ImageGrid::zeros(5, 5);
    imp.set(2, 2, 1.0);
    let z = laplacian2d_operator(5, 5, BoundaryCondition::Zero).unwrap();
    let out = ImageGrid::devectorize(5, 5, &z.apply(&imp.vectorize())).unwrap();
    let k = laplacian_kernel();
    for i in 0..5 {
        for j in 0..5 {
            let expect = if (1..4).contains(&i) && (1..4).contains(&j) {
                k.get(i - 1, j - 1)
            } else {
                0.0
            };
            assert_eq!(out.get(i, j), expect);
        }
    }
    assert!(laplacian2d_operator(2, 5, BoundaryCondition::Zero).is_err());
}

#[test]
fn mask_and_second_difference_determine_the_signal() {
    let n = 60;
    let keep: Vec<usize> = (0..n)
        .filter(|i| !(15..25).contains(i) && !(40..48).contains(i))
        .collect();
    let a = mask_operator(&keep, n).unwrap().to_dense();
    assert!(stacked_full_column_rank(&a, &build_l(LKind::D2, n).unwrap()).unwrap());
    // nothing observed: the affine null space of d2 survives
    let empty = mask_operator(&[], n).unwrap().to_dense();
    assert!(!stacked_full_column_rank(&empty, &build_l(LKind::D2, n).unwrap()).unwrap());
}

#[test]
fn regularizer_spec_checks() {
    assert!(RegularizerSpec::identity(3, -1.0).is_err());
    assert!(RegularizerSpec::identity(3, f64::NAN).is_err());
    let r = RegularizerSpec::identity(3, 0.5).unwrap();
    assert_eq!(r.x_ref, Vector::zeros(3));
    assert!(r.clone().with_reference(Vector::zeros(4)).is_err());
    assert!(r.with_reference(Vector::from_element(3, 1.0)).is_ok());
}

proptest! {
    #[test]
    fn laplacian_equals_matrix_path(seed in 0u64..500, bc_idx in 0usize..4) {
        let bc = [
            BoundaryCondition::Zero,
            BoundaryCondition::Replicate,
            BoundaryCondition::Periodic,
            BoundaryCondition::Reflexive,
        ][bc_idx];
        let x = gaussian_vector(36, seed);
        let op = laplacian2d_operator(6, 6, bc).unwrap();
        let m = conv_matrix(&laplacian_kernel(), 6, 6, bc).unwrap();
        prop_assert!((op.apply(&x) - &m * &x).amax() <= 1e-12);
    }
}
