//! Characteristic determinants.
//!
//! `Delta = det [A; B C(1)]` with `A` the forms at `x = 0` and `B` those at
//! `x = 1`. With `Q = [Z Y0]` unitary and `Y0` spanning `ker A`,
//! `Delta = det(A Z) det(B C(1) Y0) / det Q`. Only the `(n - r)`-frame
//! `C(x) Y0` is propagated, re-orthonormalized after every step, so the value
//! stays accurate where the full fundamental matrix would overflow or cancel.

use crate::error::{Error, Result};
use crate::matrix::{det, CMatrix, C};
use crate::regularization::AssociatedMatrix;
use crate::solutions::{for_each_scaled_step, IntegrationSettings};

use super::boundary::{BoundarySpec, ProblemSpec};

/// `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaValue {
    pub mantissa: C,
    pub log_scale: f64,
}

impl DeltaValue {
    pub fn from_value(v: C) -> Self {
        Self {
            mantissa: v,
            log_scale: 0.0,
        }
    }

    /// Plain complex value; may overflow.
    pub fn value(&self) -> C {
        self.mantissa * self.log_scale.exp()
    }

    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }

    /// The value multiplied by `exp(-scale)`.
    pub fn rescaled(&self, scale: f64) -> C {
        self.mantissa * (self.log_scale - scale).exp()
    }

    /// `self / other`.
    pub fn ratio(&self, other: &Self) -> C {
        self.mantissa / other.mantissa * (self.log_scale - other.log_scale).exp()
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.re.is_finite() && self.mantissa.im.is_finite() && self.log_scale.is_finite()
    }
}

fn orthonormal_complement(z: &CMatrix) -> CMatrix {
    let n = z.nrows();
    let mut basis: Vec<nalgebra::DVector<C>> = (0..z.ncols()).map(|j| z.column(j).into_owned()).collect();
    let mut extra = Vec::new();
    while basis.len() < n {
        let mut best: Option<nalgebra::DVector<C>> = None;
        for e in 0..n {
            let mut v = nalgebra::DVector::from_fn(n, |i, _| if i == e { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) });
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dotc(&v);
                    v -= b * c;
                }
            }
            if best.as_ref().is_none_or(|bv| v.norm() > bv.norm()) {
                best = Some(v);
            }
        }
        let v = best.unwrap();
        let v = &v / C::new(v.norm(), 0.0);
        basis.push(v.clone());
        extra.push(v);
    }
    CMatrix::from_columns(&extra)
}

/// `det [left; right * C(1, lambda)]` by frame propagation.
pub fn boundary_determinant(
    f: &AssociatedMatrix,
    left: &CMatrix,
    right: &CMatrix,
    lambda: C,
    settings: &IntegrationSettings,
) -> Result<DeltaValue> {
    let n = f.n();
    let r = left.nrows();
    if r + right.nrows() != n || left.ncols() != n || right.ncols() != n {
        return Err(Error::validation("boundary", "form rows do not match the order"));
    }
    // Columns scaled by s^k match the size of the quasi-derivatives.
    let s = lambda.norm().powf(1.0 / n as f64).max(1.0);
    let d = CMatrix::from_fn(n, n, |j, k| if j == k { C::new(s.powi(k as i32), 0.0) } else { C::new(0.0, 0.0) });
    let left = left * &d;
    let right = right * &d;
    let qr = left.adjoint().qr();
    let z = qr.q();
    let r_top = qr.r();
    let y0 = orthonormal_complement(&z);
    let mut full = CMatrix::zeros(n, n);
    full.columns_mut(0, r).copy_from(&z);
    full.columns_mut(r, n - r).copy_from(&y0);
    let prefactor = det(&r_top).conj() / det(&full);
    let mut y = y0;
    let mut log_sum = C::new(0.0, 0.0);
    for_each_scaled_step(f, lambda, &[], s, settings, |x0, _, p| {
        let next = p * &y;
        let qr = next.qr();
        let rr = qr.r();
        for i in 0..rr.nrows() {
            let d = rr[(i, i)];
            if d.norm() == 0.0 || !d.re.is_finite() {
                return Err(Error::Integration {
                    x: x0,
                    message: "frame lost rank".into(),
                });
            }
            log_sum += d.ln();
        }
        y = qr.q();
        Ok(())
    })?;
    let tail = det(&(right * &y));
    Ok(DeltaValue {
        mantissa: prefactor * tail * C::new(0.0, log_sum.im).exp(),
        log_scale: log_sum.re - (n * (n - 1) / 2) as f64 * s.ln(),
    })
}

fn rows_of(spec: &BoundarySpec, n: usize) -> (CMatrix, CMatrix) {
    let left: Vec<_> = spec.left.iter().collect();
    let right: Vec<_> = spec.right.iter().collect();
    (BoundarySpec::rows(&left, n), BoundarySpec::rows(&right, n))
}

/// `Delta(lambda) = det [U_s(C_k)]`, rows `s = 1..n`, columns `k = 1..n`.
pub fn char_delta(problem: &ProblemSpec, lambda: C) -> Result<DeltaValue> {
    char_delta_with(problem, lambda, &IntegrationSettings::default())
}

pub fn char_delta_with(problem: &ProblemSpec, lambda: C, settings: &IntegrationSettings) -> Result<DeltaValue> {
    let n = problem.n();
    let (left, right) = rows_of(&problem.boundary, n);
    boundary_determinant(problem.matrix(), &left, &right, lambda, settings)
}

/// `Delta^bullet(lambda)`: rows `U_1, ..., U_{r-1}, U_{r+1}, ..., U_n, U_0`.
///
/// With `U_0` in the last row the Dirichlet weights come out as `-1 / alpha_l`,
/// `alpha_l` the squared norm of the eigenfunction.
pub fn char_delta_bullet(problem: &ProblemSpec, lambda: C) -> Result<DeltaValue> {
    char_delta_bullet_with(problem, lambda, &IntegrationSettings::default())
}

pub fn char_delta_bullet_with(problem: &ProblemSpec, lambda: C, settings: &IntegrationSettings) -> Result<DeltaValue> {
    let n = problem.n();
    let b = &problem.boundary;
    let w = b
        .weight
        .as_ref()
        .ok_or_else(|| Error::Config("weight_form is required for the weight numbers".into()))?;
    let mut left = vec![w];
    left.extend(b.left[..b.r() - 1].iter());
    let right: Vec<_> = b.right.iter().collect();
    let mut v = boundary_determinant(
        problem.matrix(),
        &BoundarySpec::rows(&left, n),
        &BoundarySpec::rows(&right, n),
        lambda,
        settings,
    )?;
    // Moving U_0 from the first row to the last.
    if n.is_multiple_of(2) {
        v.mantissa = -v.mantissa;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::max_norm;
    use crate::solutions::integrate_fundamental;
    use crate::spectrum::boundary::BoundaryForm;

    #[test]
    fn matches_direct_determinant_at_small_lambda() {
        let f = AssociatedMatrix::zero(4);
        let left = CMatrix::from_fn(2, 4, |i, j| C::new(((i + 2 * j) % 3) as f64 - 0.5, 0.1 * j as f64));
        let right = CMatrix::from_fn(2, 4, |i, j| C::new((i * j) as f64 * 0.3 + 1.0, -0.2 * i as f64));
        for lambda in [C::new(3.0, 1.0), C::new(-40.0, 0.0), C::new(0.0, 0.0)] {
            let c = integrate_fundamental(&f, lambda, &IntegrationSettings::default()).unwrap();
            let mut m = CMatrix::zeros(4, 4);
            m.rows_mut(0, 2).copy_from(&left);
            m.rows_mut(2, 2).copy_from(&(&right * c.at_one()));
            let want = det(&m);
            let got = boundary_determinant(&f, &left, &right, lambda, &IntegrationSettings::default())
                .unwrap()
                .value();
            assert!((got - want).norm() < 1e-11 * (1.0 + want.norm()) * max_norm(&m), "{got} {want}");
        }
    }

    #[test]
    fn dirichlet_values() {
        let b = BoundarySpec::new(vec![BoundaryForm::plain(0)], vec![BoundaryForm::plain(0)], Some(BoundaryForm::plain(1)));
        let spec = crate::regularization::ExpressionSpec::zero(2, vec![0]).unwrap();
        let p = ProblemSpec::from_expression(spec, b).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!(char_delta(&p, C::new(-pi2, 0.0)).unwrap().value().norm() < 1e-10);
        assert!((char_delta(&p, C::new(0.0, 0.0)).unwrap().value() - 1.0).norm() < 1e-12);
        assert!((char_delta_bullet(&p, C::new(-pi2, 0.0)).unwrap().value() + 1.0).norm() < 1e-10);
        assert!((char_delta_bullet(&p, C::new(0.0, 0.0)).unwrap().value() - 1.0).norm() < 1e-12);
        let l = C::new(2.5, 0.0);
        assert!((char_delta_bullet(&p, l).unwrap().value() - l.sqrt().cosh()).norm() < 1e-12);
    }
}
