use crate::asymptotics::sector::root_of_unity;
use crate::matrix::{CMatrix, C};

/// `C(x, lambda)` for `y^(n) = lambda y`, from the exponential basis
/// `exp(rho w_k x)` converted to the initial-value basis.
///
/// For `|rho x| <= 1` the Taylor series of `exp(x M)` is summed instead; at
/// `lambda = 0` this is the polynomial basis `x^j / j!`.
pub fn closed_form_zero_coeff(n: usize, lambda: C, x: f64) -> CMatrix {
    let rho = if lambda == C::new(0.0, 0.0) {
        C::new(0.0, 0.0)
    } else {
        lambda.powf(1.0 / n as f64)
    };
    if rho.norm() * x <= 1.0 {
        return taylor(n, lambda, x);
    }
    let nf = n as f64;
    CMatrix::from_fn(n, n, |j, k| {
        let mut acc = C::new(0.0, 0.0);
        for m in 0..n {
            let w = root_of_unity(m, n);
            let mu = rho * w;
            acc += w.powu(j as u32) * w.powu(k as u32).conj() * (mu * x).exp();
        }
        acc * rho.powi(j as i32 - k as i32) / nf
    })
}

fn taylor(n: usize, lambda: C, x: f64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for k in 0..n - 1 {
        m[(k, k + 1)] = C::new(x, 0.0);
    }
    m[(n - 1, 0)] = lambda * x;
    let mut term = CMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..200 {
        term = &term * &m / C::new(k as f64, 0.0);
        sum += &term;
        if term.iter().all(|c| c.norm() < 1e-18 * (1.0 + sum.iter().map(|s| s.norm()).fold(0.0, f64::max))) {
            break;
        }
    }
    sum
}
