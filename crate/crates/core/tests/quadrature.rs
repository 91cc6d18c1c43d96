mod common;

use ader_mp::basis::{gauss_legendre, lagrange_eval, ReferenceBasis};
use proptest::prelude::*;

use common::golub_welsch;

#[test]
fn rules_match_the_jacobi_matrix_oracle() {
    for order in 0..=9 {
        let (x, w) = gauss_legendre(order).unwrap();
        let (xo, wo) = golub_welsch(order + 1);
        for i in 0..=order {
            assert!((x[i] - xo[i]).abs() <= 1e-14, "order {order} node {i}");
            assert!((w[i] - wo[i]).abs() <= 1e-14, "order {order} weight {i}");
        }
        assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
    }
}

#[test]
fn face_integrals_reproduce_boundary_values() {
    for order in 1..=9 {
        let b = ReferenceBasis::new(order).unwrap();
        // the cubic x^3 - x is interpolated exactly from order 3 on
        let f = |x: f64| if order >= 3 { x * x * x - x } else { 2.0 * x - 1.0 };
        let values: Vec<f64> = b.nodes.iter().map(|&x| f(x)).collect();
        let (l, r) = b.face_trace(&values);
        assert!((l - f(0.0)).abs() < 1e-13);
        assert!((r - f(1.0)).abs() < 1e-13);
    }
}

proptest! {
    #[test]
    fn exact_for_degree_2n_plus_1(order in 0usize..=9, coeffs in prop::collection::vec(-1.0f64..1.0, 20)) {
        let (x, w) = gauss_legendre(order).unwrap();
        let deg = 2 * order + 1;
        let exact: f64 = (0..=deg).map(|k| coeffs[k] / (k as f64 + 1.0)).sum();
        let quad: f64 = x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| wi * (0..=deg).map(|k| coeffs[k] * xi.powi(k as i32)).sum::<f64>())
            .sum();
        prop_assert!((exact - quad).abs() < 1e-13);
    }

    #[test]
    fn lagrange_basis_is_cardinal(order in 0usize..=9, t in 0.0f64..1.0) {
        let (x, _) = gauss_legendre(order).unwrap();
        let sum: f64 = (0..=order).map(|l| lagrange_eval(&x, l, t)).sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        for (i, &xi) in x.iter().enumerate() {
            for l in 0..=order {
                let expect = if i == l { 1.0 } else { 0.0 };
                prop_assert!((lagrange_eval(&x, l, xi) - expect).abs() < 1e-12);
            }
        }
    }
}
