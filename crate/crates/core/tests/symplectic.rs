use proptest::prelude::*;
use tfmeta::matrix::{max_abs, Mat};
use tfmeta::symplectic::{
    canonical_j, exp_scaled, exp_scaled_generic, is_algebra_element, is_symplectic,
    parse_matrix_csv, matrix_to_csv, symplectic_defect, AlgebraElement, SymplecticMatrix,
    SYMPLECTIC_TOL,
};
use tfmeta::Error;

/// A random element of sp(2d): `J S` with `S` symmetric.
fn algebra(d: usize, entries: &[f64]) -> AlgebraElement {
    let n = 2 * d;
    let mut s = Mat::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            s[(i, j)] = entries[k];
            s[(j, i)] = entries[k];
            k += 1;
        }
    }
    AlgebraElement::new(canonical_j(d) * s, 1e-12).unwrap()
}

fn relative_defect(m: &Mat) -> f64 {
    symplectic_defect(m).unwrap() / max_abs(m).powi(2).max(1.0)
}

#[test]
fn named_flows_have_closed_forms() {
    let h = exp_scaled(&AlgebraElement::harmonic(1), std::f64::consts::FRAC_PI_2).unwrap();
    assert!((h.matrix() - canonical_j(1)).abs().max() < 1e-15);
    let r = exp_scaled(&AlgebraElement::repulsive(1), 1.0).unwrap();
    assert!((r.a()[(0, 0)] - 1f64.cosh()).abs() < 1e-15);
    assert!((r.b()[(0, 0)] - 1f64.sinh()).abs() < 1e-15);
    let b = Mat::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 3.0]);
    let f = exp_scaled(&AlgebraElement::free(&b).unwrap(), 0.5).unwrap();
    assert!((f.b() - &b * 0.5).abs().max() < 1e-15);
    assert!((f.a() - Mat::identity(2, 2)).abs().max() == 0.0);
}

#[test]
fn closed_forms_match_the_series() {
    for (gen, t) in [
        (AlgebraElement::harmonic(2), 0.9),
        (AlgebraElement::repulsive(2), 1.4),
        (AlgebraElement::free(&Mat::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0])).unwrap(), -0.6),
    ] {
        let closed = exp_scaled(&gen, t).unwrap();
        let series = exp_scaled_generic(&gen, t).unwrap();
        assert!((closed.matrix() - series.matrix()).abs().max() < 1e-12);
    }
}

#[test]
fn rejects_non_symplectic_input() {
    let m = Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
    assert!(!is_symplectic(&m, SYMPLECTIC_TOL).unwrap());
    assert!(matches!(SymplecticMatrix::new(m, SYMPLECTIC_TOL), Err(Error::Contract(_))));
    assert!(matches!(is_symplectic(&Mat::identity(3, 3), 1e-10), Err(Error::Dimension(_))));
    assert!(!is_algebra_element(&Mat::identity(2, 2), 1e-12).unwrap());
}

#[test]
fn csv_round_trip() {
    let s = exp_scaled(&AlgebraElement::harmonic(2), 0.3).unwrap();
    let back = parse_matrix_csv(&matrix_to_csv(s.matrix())).unwrap();
    assert_eq!(&back, s.matrix());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponentials_are_symplectic(
        d in 1usize..=4,
        entries in proptest::collection::vec(-1.0f64..1.0, 36),
        t in -1.0f64..1.0,
    ) {
        let gen = algebra(d, &entries);
        let norm = max_abs(gen.matrix()) * (2 * d) as f64;
        // Keep ‖t𝒜‖ within 10.
        let t = t * 10.0 / norm.max(1e-12);
        let s = exp_scaled_generic(&gen, t).unwrap();
        prop_assert!(relative_defect(s.matrix()) <= SYMPLECTIC_TOL);
        prop_assert!((s.matrix().determinant() - 1.0).abs() <= 1e-8 * max_abs(s.matrix()).powi(2 * d as i32).max(1.0));
    }

    #[test]
    fn one_parameter_group_law(
        d in 1usize..=3,
        entries in proptest::collection::vec(-1.0f64..1.0, 21),
        s in -0.5f64..0.5,
        t in -0.5f64..0.5,
    ) {
        let gen = algebra(d, &entries);
        let a = exp_scaled_generic(&gen, s).unwrap();
        let b = exp_scaled_generic(&gen, t).unwrap();
        let ab = exp_scaled_generic(&gen, s + t).unwrap();
        let prod = a.compose(&b).unwrap();
        prop_assert!((prod.matrix() - ab.matrix()).abs().max() <= 1e-10 * max_abs(ab.matrix()).max(1.0));
        let zero = exp_scaled_generic(&gen, 0.0).unwrap();
        prop_assert_eq!(zero.matrix(), &Mat::identity(2 * d, 2 * d));
    }

    #[test]
    fn inverse_undoes_composition(d in 1usize..=3, entries in proptest::collection::vec(-1.0f64..1.0, 21)) {
        let s = exp_scaled_generic(&algebra(d, &entries), 0.7).unwrap();
        let id = s.compose(&s.inverse()).unwrap();
        prop_assert!((id.matrix() - Mat::identity(2 * d, 2 * d)).abs().max() <= 1e-10 * max_abs(s.matrix()).powi(2).max(1.0));
    }
}
