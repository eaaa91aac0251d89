use num_complex::Complex64 as C;
use proptest::prelude::*;
use specasym_core::matrix::max_norm;
use specasym_core::solutions::{
    closed_form_zero_coeff, integrate_fundamental, system_matrix, IntegrationSettings,
};
use specasym_core::{build_associated_matrix, AssociatedMatrix, CoefficientFunction, ExpressionSpec};

fn settings() -> IntegrationSettings {
    IntegrationSettings::default()
}

#[test]
fn second_order_zero_coefficients_match_sinh() {
    let f = AssociatedMatrix::zero(2);
    for lambda in [C::new(3.0, 0.0), C::new(-20.0, 5.0), C::new(0.0, 0.0)] {
        let c = integrate_fundamental(&f, lambda, &settings()).unwrap();
        for (x, m) in c.grid.iter().zip(&c.values) {
            let s = lambda.sqrt();
            let want = if lambda.norm() == 0.0 { C::new(*x, 0.0) } else { (s * x).sinh() / s };
            assert!((m[(0, 1)] - want).norm() < 1e-12 * (1.0 + want.norm()), "x={x}");
        }
    }
}

#[test]
fn closed_form_values() {
    let m = closed_form_zero_coeff(2, C::new(-std::f64::consts::PI.powi(2), 0.0), 1.0);
    assert!(m[(0, 1)].norm() < 1e-14);
    let m = closed_form_zero_coeff(3, C::new(0.0, 0.0), 0.7);
    let want = [1.0, 0.7, 0.245];
    for (k, w) in want.iter().enumerate() {
        assert!((m[(0, k)] - w).norm() < 1e-15);
    }
    assert!((m[(1, 2)] - 0.7).norm() < 1e-15);
}

#[test]
fn closed_form_clamped_beam_determinant_vanishes() {
    // Bisection on cos(r) cosh(r) = 1 near 4.73.
    let (mut a, mut b) = (4.5f64, 5.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (a.cos() * a.cosh() - 1.0) * (mid.cos() * mid.cosh() - 1.0) <= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    let rho = 0.5 * (a + b);
    let m = closed_form_zero_coeff(4, C::new(rho.powi(4), 0.0), 1.0);
    // y(0) = y'(0) = 0 leaves columns 3, 4; y(1) = y'(1) = 0 is the 2x2 minor on rows 1, 2.
    let d = m[(0, 2)] * m[(1, 3)] - m[(0, 3)] * m[(1, 2)];
    assert!(d.norm() < 1e-10 * m[(0, 3)].norm(), "{d}");
}

#[test]
fn direct_integration_matches_closed_form() {
    for n in 2..=4 {
        let f = AssociatedMatrix::zero(n);
        for lambda in [
            C::new(1.0, 0.0),
            C::new(-37.0, 11.0),
            C::new(900.0, -400.0),
            C::new(-1e4, 0.0),
            C::new(0.0, 1e4),
        ] {
            let c = integrate_fundamental(&f, lambda, &settings()).unwrap();
            for (x, m) in c.grid.iter().zip(&c.values).step_by(10) {
                let want = closed_form_zero_coeff(n, lambda, *x);
                let err = max_norm(&(m - &want)) / max_norm(&want);
                assert!(err < 1e-10, "n={n} lambda={lambda} x={x} err={err:e}");
            }
        }
    }
}

#[test]
fn direct_integration_is_capped() {
    let f = AssociatedMatrix::zero(2);
    assert!(integrate_fundamental(&f, C::new(-2e5, 0.0), &settings()).is_err());
}

fn linear(a: f64, b: f64) -> CoefficientFunction {
    CoefficientFunction::polynomial(vec![C::new(a, 0.0), C::new(b, 0.0)])
}

fn random_spec(n: usize, coeffs: &[(f64, f64, f64)]) -> ExpressionSpec {
    let sig = coeffs[..n - 1]
        .iter()
        .map(|&(a, b, c)| {
            CoefficientFunction::piecewise(
                vec![0.0, 0.4, 1.0],
                vec![vec![C::new(a, 0.0), C::new(b, 0.0)], vec![C::new(c, 0.5), C::new(-b, 0.0)]],
                specasym_core::ClassTag::L2,
            )
            .unwrap()
        })
        .collect();
    ExpressionSpec::new(n, vec![0; n - 1], sig).unwrap()
}

#[test]
fn residual_of_columns_is_small() {
    let spec = ExpressionSpec::new(3, vec![1, 0], vec![linear(0.5, 2.0), linear(-1.0, 3.0)]).unwrap();
    let f = build_associated_matrix(&spec).unwrap();
    let lambda = C::new(-50.0, 20.0);
    let mut s = settings();
    s.samples = 2001;
    let c = integrate_fundamental(&f, lambda, &s).unwrap();
    let h = c.grid[1] - c.grid[0];
    let mut total = 0.0;
    for i in 0..c.grid.len() {
        if i < 2 || i + 2 >= c.grid.len() {
            continue;
        }
        let v = &c.values;
        let deriv = (&v[i - 2] - &v[i - 1] * C::new(8.0, 0.0) + &v[i + 1] * C::new(8.0, 0.0) - &v[i + 2])
            / C::new(12.0 * h, 0.0);
        let rhs = system_matrix(&f, lambda, c.grid[i]) * &c.values[i];
        total += max_norm(&(deriv - rhs)) * h;
    }
    assert!(total < 1e-6 * (1.0 + lambda.norm()), "{total:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn liouville_determinant_is_one(
        n in 2usize..=5,
        coeffs in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0), 4),
        re in -40.0f64..40.0,
        im in -40.0f64..40.0,
    ) {
        let f = build_associated_matrix(&random_spec(n, &coeffs)).unwrap();
        let c = integrate_fundamental(&f, C::new(re, im), &settings()).unwrap();
        prop_assert!(c.det_defect() < 1e-8, "defect {}", c.det_defect());
    }
}
