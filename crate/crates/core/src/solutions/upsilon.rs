//! The functionals `Upsilon(rho)` and `Upsilon_d(rho)` controlling the
//! Birkhoff remainders.
//!
//! Index comparisons follow the non-growing directions of the kernels: `j`
//! precedes `k` when `Re(rho w_j) > Re(rho w_k)`, so every exponential factor
//! below has modulus at most one and the sweeps are free of cancellation.

use rayon::prelude::*;

use crate::matrix::{MatrixFunction, C};
use crate::poly::CoefficientFunction;
use crate::regularization::ConjugatedSystem;

/// Default `(s, x)` grid size for `|rho|`.
pub fn default_upsilon_grid(rho: C) -> usize {
    ((8.0 * rho.norm()).ceil() as usize).clamp(64, 2048)
}

fn uniform(size: usize) -> Vec<f64> {
    (0..=size).map(|i| i as f64 / size as f64).collect()
}

/// `max |v_{jkl}(s, x, rho)|` over index triples and an `(size + 1)^2` grid.
pub fn upsilon(sys: &ConjugatedSystem, rho: C, size: usize) -> f64 {
    upsilon_matrix(&sys.a[0], &sys.frame.omegas, rho, size)
}

/// [`upsilon`] for an explicit `A_0` and root ordering.
pub fn upsilon_matrix(a0: &MatrixFunction, omegas: &[C], rho: C, size: usize) -> f64 {
    let n = omegas.len();
    let xs = uniform(size.max(1));
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|j| (0..n).flat_map(move |k| (0..n).map(move |l| (j, k, l))))
        .filter(|&(j, _, l)| !a0.get(j, l).is_zero())
        .collect();
    triples
        .par_iter()
        .map(|&(j, k, l)| kernel_max(a0.get(j, l), omegas, rho, j, k, l, &xs))
        .reduce(|| 0.0, f64::max)
}

fn precedes(omegas: &[C], rho: C, j: usize, k: usize) -> bool {
    (rho * omegas[j]).re > (rho * omegas[k]).re
}

fn kernel_max(a: &CoefficientFunction, omegas: &[C], rho: C, j: usize, k: usize, l: usize, xs: &[f64]) -> f64 {
    let p = rho * (omegas[l] - omegas[k]);
    let q = rho * (omegas[j] - omegas[k]);
    let jb = precedes(omegas, rho, j, k);
    let lb = precedes(omegas, rho, l, k);
    let m = xs.len();
    let h = xs[1] - xs[0];
    let mut best = 0.0f64;
    match (jb, lb) {
        (false, false) => {
            // int_s^x a(t) e^{p (t - s) + q (x - t)} dt, swept forward in x.
            let cell: Vec<C> = (0..m - 1)
                .map(|i| (q * h).exp() * a.integrate_times_exp_about(xs[i], xs[i + 1], p - q, xs[i]))
                .collect();
            let eq = (q * h).exp();
            for si in 0..m {
                let mut v = C::new(0.0, 0.0);
                let mut carry = C::new(1.0, 0.0);
                for i in si..m - 1 {
                    v = eq * v + carry * cell[i];
                    carry *= (p * h).exp();
                    best = best.max(v.norm());
                }
            }
        }
        (true, true) => {
            // int_x^s a(t) e^{p (t - s) + q (x - t)} dt, swept backward in x.
            let cell: Vec<C> = (0..m - 1)
                .map(|i| (-q * h).exp() * a.integrate_times_exp_about(xs[i], xs[i + 1], p - q, xs[i + 1]))
                .collect();
            let eq = (-q * h).exp();
            for si in 0..m {
                let mut v = C::new(0.0, 0.0);
                let mut carry = C::new(1.0, 0.0);
                for i in (0..si).rev() {
                    v = eq * v + carry * cell[i];
                    carry *= (-p * h).exp();
                    best = best.max(v.norm());
                }
            }
        }
        (true, false) => {
            // int_{max(x,s)}^1; H(y) = int_y^1 a(t) e^{(p - q)(t - y)} dt.
            let mut hv = vec![C::new(0.0, 0.0); m];
            for i in (0..m - 1).rev() {
                hv[i] = ((p - q) * h).exp() * hv[i + 1] + a.integrate_times_exp_about(xs[i], xs[i + 1], p - q, xs[i]);
            }
            for si in 0..m {
                for xi in 0..m {
                    let v = if xi >= si {
                        (p * (xs[xi] - xs[si])).exp() * hv[xi]
                    } else {
                        (q * (xs[xi] - xs[si])).exp() * hv[si]
                    };
                    best = best.max(v.norm());
                }
            }
        }
        (false, true) => {
            // int_0^{min(x,s)}; K(y) = int_0^y a(t) e^{(p - q)(t - y)} dt.
            let mut kv = vec![C::new(0.0, 0.0); m];
            for i in 0..m - 1 {
                kv[i + 1] = (-(p - q) * h).exp() * kv[i] + a.integrate_times_exp_about(xs[i], xs[i + 1], p - q, xs[i + 1]);
            }
            for si in 0..m {
                for xi in 0..m {
                    let v = if xi <= si {
                        (p * (xs[xi] - xs[si])).exp() * kv[xi]
                    } else {
                        (q * (xs[xi] - xs[si])).exp() * kv[si]
                    };
                    best = best.max(v.norm());
                }
            }
        }
    }
    best
}

/// `max_{j != k, x} |alpha_{jk}(x, rho)|` for a matrix function `A_hat_d`.
pub fn upsilon_d(a_hat_d: &MatrixFunction, omegas: &[C], rho: C, size: usize) -> f64 {
    let n = omegas.len();
    let xs = uniform(size.max(1));
    let m = xs.len();
    let h = xs[1] - xs[0];
    let mut best = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let a = a_hat_d.get(j, k);
            if j == k || a.is_zero() {
                continue;
            }
            let mu = rho * (omegas[j] - omegas[k]);
            if !precedes(omegas, rho, j, k) {
                // int_0^x a(t) e^{mu (x - t)} dt
                let mut v = C::new(0.0, 0.0);
                for i in 0..m - 1 {
                    v = (mu * h).exp() * v + a.integrate_times_exp_about(xs[i], xs[i + 1], -mu, xs[i + 1]);
                    best = best.max(v.norm());
                }
            } else {
                // -int_x^1 a(t) e^{mu (x - t)} dt
                let mut v = C::new(0.0, 0.0);
                for i in (0..m - 1).rev() {
                    v = (-mu * h).exp() * v - a.integrate_times_exp_about(xs[i], xs[i + 1], -mu, xs[i]);
                    best = best.max(v.norm());
                }
            }
        }
    }
    best
}

/// `sup_t #{k : t <= |rho_k| < t + 1}`: a sequence is non-condensing when this is finite.
pub fn condensation_index(rhos: &[C]) -> usize {
    let mut r: Vec<f64> = rhos.iter().map(|z| z.norm()).collect();
    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best = 0;
    let mut lo = 0;
    for hi in 0..r.len() {
        while r[hi] - r[lo] >= 1.0 {
            lo += 1;
        }
        best = best.max(hi - lo + 1);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condensation_of_simple_sequences() {
        let line: Vec<C> = (1..50).map(|k| C::new(k as f64 * 0.5, 0.0)).collect();
        assert_eq!(condensation_index(&line), 2);
        let mut bunched = line.clone();
        bunched.extend((0..5).map(|k| C::from_polar(10.2, k as f64)));
        assert_eq!(condensation_index(&bunched), 7);
        assert_eq!(condensation_index(&[]), 0);
    }
}
