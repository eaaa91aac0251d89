//! Fixtures shared by the benchmarks.

use specasym_core::{BoundaryForm, BoundarySpec, CoefficientFunction, ExpressionSpec, ProblemSpec, C};

fn poly(c: &[f64]) -> CoefficientFunction {
    CoefficientFunction::polynomial(c.iter().map(|&v| C::new(v, 0.0)).collect())
}

fn plain(ps: &[usize]) -> Vec<BoundaryForm> {
    ps.iter().map(|&p| BoundaryForm::plain(p)).collect()
}

/// Order six with every index at its bound.
pub fn sixth_order() -> ExpressionSpec {
    ExpressionSpec::new(
        6,
        vec![3, 2, 2, 1, 1],
        vec![poly(&[1.0, 0.5]), poly(&[0.3]), poly(&[-1.0, 2.0]), poly(&[0.25]), poly(&[1.0, -1.0, 0.5])],
    )
    .unwrap()
}

/// Smooth fourth-order operator used for the Birkhoff and `Delta` timings.
pub fn fourth_order() -> ExpressionSpec {
    ExpressionSpec::new(4, vec![0, 0, 1], vec![poly(&[0.3, -1.0]), poly(&[1.5]), poly(&[1.0, 2.0, -1.0])]).unwrap()
}

pub fn fourth_order_problem() -> ProblemSpec {
    ProblemSpec::from_expression(fourth_order(), BoundarySpec::new(plain(&[0, 1]), plain(&[0, 2]), None)).unwrap()
}

/// `-y'' = lambda y`, Dirichlet, with the weight form `y'(0)`.
pub fn dirichlet() -> ProblemSpec {
    ProblemSpec::from_expression(
        ExpressionSpec::zero(2, vec![0]).unwrap(),
        BoundarySpec::new(plain(&[0]), plain(&[0]), Some(BoundaryForm::plain(1))),
    )
    .unwrap()
}

/// Third-order problem with a linear `sigma_1`.
pub fn third_order_linear() -> ProblemSpec {
    ProblemSpec::from_expression(
        ExpressionSpec::new(3, vec![1, 0], vec![poly(&[0.0]), poly(&[-0.5, 1.0])]).unwrap(),
        BoundarySpec::new(plain(&[0]), plain(&[0, 1]), None),
    )
    .unwrap()
}
