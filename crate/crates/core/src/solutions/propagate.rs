//! Step propagators of `Y' = (F(x) + Lambda) Y` by Magnus exponentials.

use crate::error::{Error, Result};
use crate::matrix::{max_norm, CMatrix, C};
use crate::regularization::AssociatedMatrix;

/// Controls for the direct integration of the quasi-derivative system.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationSettings {
    /// Local relative error allowed per step on non-constant panels.
    pub rel_tol: f64,
    /// Largest `|rho|` accepted by [`integrate_fundamental`](super::integrate_fundamental).
    pub max_rho: f64,
    /// Number of uniform output samples on `[0, 1]`.
    pub samples: usize,
    pub min_step: f64,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            max_rho: 128.0,
            samples: 101,
            min_step: 1e-10,
        }
    }
}

/// `F(x) + Lambda` with `lambda` at the bottom-left corner.
pub fn system_matrix(f: &AssociatedMatrix, lambda: C, x: f64) -> CMatrix {
    let mut m = f.eval(x);
    let n = m.nrows();
    m[(n - 1, 0)] += lambda;
    m
}

/// `D^{-1} (F(x) + Lambda) D` with `D = diag(1, s, ..., s^{n-1})`.
fn scaled_system(f: &AssociatedMatrix, lambda: C, x: f64, s: f64) -> CMatrix {
    let mut m = system_matrix(f, lambda, x);
    if s != 1.0 {
        let n = m.nrows();
        for j in 0..n {
            for k in 0..n {
                m[(j, k)] *= s.powi(k as i32 - j as i32);
            }
        }
    }
    m
}

fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Sixth-order Magnus exponent on three Gauss nodes, with the difference to
/// the fourth-order exponent built from the same nodes.
fn magnus_exponent(f: &AssociatedMatrix, lambda: C, x0: f64, x1: f64, s: f64) -> (CMatrix, f64) {
    let h = x1 - x0;
    let mid = 0.5 * (x0 + x1);
    let off = h * 15f64.sqrt() / 10.0;
    let a1 = scaled_system(f, lambda, mid - off, s);
    let a2 = scaled_system(f, lambda, mid, s);
    let a3 = scaled_system(f, lambda, mid + off, s);
    let k = |c: f64| C::new(c, 0.0);
    let b1 = &a2 * k(h);
    let b2 = (&a3 - &a1) * k(15f64.sqrt() * h / 3.0);
    let b3 = (&a3 - &a2 * k(2.0) + &a1) * k(10.0 * h / 3.0);
    let c1 = commutator(&b1, &b2);
    let c2 = commutator(&b1, &(&b3 * k(2.0) + &c1)) * k(-1.0 / 60.0);
    let inner = &b1 * k(-20.0) - &b3 + &c1;
    let tail = commutator(&inner, &(&b2 + &c2)) * k(1.0 / 240.0);
    let gap = max_norm(&(&tail + &c1 * k(1.0 / 12.0)));
    (&b1 + &b3 * k(1.0 / 12.0) + tail, gap)
}

/// Walks `[0, 1]` with steps that never cross a breakpoint of `F` or a stop,
/// calling `visit(x0, x1, P)` with the step propagator `P`.
///
/// Steps satisfy `|rho| h <= 1`, which keeps every minor of `P` well scaled.
pub fn for_each_step(
    f: &AssociatedMatrix,
    lambda: C,
    stops: &[f64],
    settings: &IntegrationSettings,
    visit: impl FnMut(f64, f64, &CMatrix) -> Result<()>,
) -> Result<()> {
    for_each_scaled_step(f, lambda, stops, 1.0, settings, visit)
}

/// [`for_each_step`] for the propagators of `D^{-1} Y` with `D = diag(s^j)`.
/// With `s = |rho|` all entries are of comparable size.
pub fn for_each_scaled_step(
    f: &AssociatedMatrix,
    lambda: C,
    stops: &[f64],
    scale: f64,
    settings: &IntegrationSettings,
    mut visit: impl FnMut(f64, f64, &CMatrix) -> Result<()>,
) -> Result<()> {
    let n = f.n();
    let rho_abs = lambda.norm().powf(1.0 / n as f64);
    let h_cap = 1.0 / rho_abs.max(1.0);
    let mut knots: Vec<f64> = f.breakpoints();
    knots.extend_from_slice(stops);
    knots.push(0.0);
    knots.push(1.0);
    knots.retain(|x| (0.0..=1.0).contains(x));
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = b - a;
        if len <= 0.0 {
            continue;
        }
        if f.matrix().local_degree(0.5 * (a + b)) == 0 {
            let count = (len / h_cap).ceil().max(1.0) as usize;
            let h = len / count as f64;
            let p = (scaled_system(f, lambda, 0.5 * (a + b), scale) * C::new(h, 0.0)).exp();
            for i in 0..count {
                let x0 = a + i as f64 * h;
                let x1 = if i + 1 == count { b } else { x0 + h };
                visit(x0, x1, &p)?;
            }
            continue;
        }
        let mut x = a;
        let mut h = h_cap.min(len).min(0.25);
        while x < b {
            if x + h > b || b - (x + h) < 1e-14 {
                h = b - x;
            }
            let (omega, err) = magnus_exponent(f, lambda, x, x + h, scale);
            if err <= settings.rel_tol || h <= settings.min_step {
                if h <= settings.min_step && err > settings.rel_tol {
                    return Err(Error::Integration {
                        x,
                        message: format!("step size underflow, local error {err:e}"),
                    });
                }
                let x1 = x + h;
                visit(x, x1, &omega.exp())?;
                x = x1;
                let grow = if err == 0.0 { 2.0 } else { (0.9 * (settings.rel_tol / err).powf(0.2)).min(2.0) };
                h = (h * grow).min(h_cap);
            } else {
                h *= (0.9 * (settings.rel_tol / err).powf(0.2)).clamp(0.1, 0.5);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_panel_product_is_exact_exponential() {
        let f = AssociatedMatrix::zero(3);
        let lambda = C::new(-8.0, 3.0);
        let mut prod = CMatrix::identity(3, 3);
        for_each_step(&f, lambda, &[], &IntegrationSettings::default(), |_, _, p| {
            prod = p * &prod;
            Ok(())
        })
        .unwrap();
        let want = system_matrix(&f, lambda, 0.5).exp();
        assert!(max_norm(&(prod - &want)) < 1e-12 * max_norm(&want));
    }

    #[test]
    fn steps_respect_stops_and_scale() {
        let f = AssociatedMatrix::zero(2);
        let lambda = C::new(-400.0, 0.0);
        let mut xs = vec![];
        for_each_step(&f, lambda, &[0.3], &IntegrationSettings::default(), |a, b, _| {
            assert!(b - a <= 1.0 / 20.0 + 1e-15);
            xs.push(b);
            Ok(())
        })
        .unwrap();
        assert!(xs.iter().any(|x| (x - 0.3).abs() < 1e-15));
        assert_eq!(*xs.last().unwrap(), 1.0);
    }
}
