//! Comparison of two problems that share the coefficients `sigma_nu`, `nu >= nu0`.

use crate::error::{Error, Result};
use crate::matrix::C;
use crate::regularization::ExpressionSpec;
use crate::spectrum::{BoundarySpec, SpectralDatum};

use super::fits::loglog_slope;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecayOrder {
    pub d: usize,
    /// `nu < nu0` attaining the maximum of `nu + i_nu`.
    pub n_d: Vec<usize>,
    /// Members of `n_d` with `i_nu = 0`.
    pub n_d0: Vec<usize>,
}

/// `d = n - 1 - max_{nu < nu0} (nu + i_nu)` after checking that the specs agree from `nu0` on.
pub fn compute_d(a: &ExpressionSpec, b: &ExpressionSpec, nu0: usize) -> Result<DecayOrder> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::validation("n", format!("orders differ: {n} and {}", b.n())));
    }
    if a.indices() != b.indices() {
        return Err(Error::validation("indices", "the two problems must share the indices i_nu"));
    }
    if nu0 < 1 || nu0 > n - 1 {
        return Err(Error::validation("nu0", format!("must lie in 1..={}", n - 1)));
    }
    for nu in nu0..n - 1 {
        if !a.coefficients()[nu].symbolic_eq(&b.coefficients()[nu]) {
            return Err(Error::validation(
                format!("coefficients[{nu}]"),
                format!("sigma_{nu} differs between the problems but nu >= nu0 = {nu0}"),
            ));
        }
    }
    let idx = a.indices();
    let top = (0..nu0).map(|nu| nu + idx[nu]).max().unwrap();
    let n_d: Vec<usize> = (0..nu0).filter(|&nu| nu + idx[nu] == top).collect();
    let n_d0 = n_d.iter().copied().filter(|&nu| idx[nu] == 0).collect();
    Ok(DecayOrder { d: n - 1 - top, n_d, n_d0 })
}

/// Checks `u_{s, p_s - j} = u~_{s, p_s - j}` for `j = 0..d-2`, including the weight form if asked.
pub fn check_boundary_match(a: &BoundarySpec, b: &BoundarySpec, d: usize, with_weight: bool) -> Result<()> {
    if a.p_left() != b.p_left() || a.p_right() != b.p_right() {
        return Err(Error::validation("boundary", "the two problems must share r and every p_s"));
    }
    let mut pairs: Vec<(String, _, _)> = Vec::new();
    for (i, (fa, fb)) in a.left.iter().zip(&b.left).enumerate() {
        pairs.push((format!("boundary.left[{i}].u"), fa, fb));
    }
    for (i, (fa, fb)) in a.right.iter().zip(&b.right).enumerate() {
        pairs.push((format!("boundary.right[{i}].u"), fa, fb));
    }
    if with_weight {
        match (&a.weight, &b.weight) {
            (Some(wa), Some(wb)) if wa.p == wb.p => pairs.push(("weight_form.u0".into(), wa, wb)),
            _ => return Err(Error::Config("both problems need weight forms with the same p0".into())),
        }
    }
    for (field, fa, fb) in pairs {
        for j in 0..d.saturating_sub(1) {
            if j >= fa.p {
                break;
            }
            let k = fa.p - j - 1;
            if (fa.u[k] - fb.u[k]).norm() > 0.0 {
                return Err(Error::validation(format!("{field}[{k}]"), format!("must agree for j = {j} < d - 1")));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairComparison {
    pub order: DecayOrder,
    /// `(l, rho_l - rho~_l)`.
    pub rho_hat: Vec<(i64, C)>,
    /// Mean of `l^d rho_hat_l` over the upper half of the window.
    pub c_hat: C,
    /// `(l, l^d rho_hat_l - c_hat)`.
    pub delta: Vec<(i64, C)>,
    /// Slope of `log |rho_hat_l|` against `log l`; `None` when every difference vanishes.
    pub slope_fit: Option<f64>,
}

fn aligned<'a>(a: &'a [SpectralDatum], b: &'a [SpectralDatum], l_range: (i64, i64)) -> Vec<(&'a SpectralDatum, &'a SpectralDatum)> {
    a.iter()
        .filter(|d| d.multiplicity == 1 && d.l >= l_range.0 && d.l <= l_range.1)
        .filter_map(|d| b.iter().find(|e| e.l == d.l && e.multiplicity == 1).map(|e| (d, e)))
        .collect()
}

fn upper_half_mean(seq: &[(i64, C)], l_range: (i64, i64)) -> C {
    let mid = (l_range.0 + l_range.1) / 2;
    let top: Vec<C> = seq.iter().filter(|s| s.0 >= mid).map(|s| s.1).collect();
    if top.is_empty() {
        C::new(0.0, 0.0)
    } else {
        top.iter().sum::<C>() / top.len() as f64
    }
}

/// `rho_hat_l = rho_l - rho~_l` with the decay-rate fits.
pub fn pair_difference(
    a: &[SpectralDatum],
    b: &[SpectralDatum],
    order: &DecayOrder,
    l_range: (i64, i64),
) -> Result<PairComparison> {
    let pairs = aligned(a, b, l_range);
    if pairs.is_empty() {
        return Err(Error::Fit(format!("no common simple indices in {l_range:?}")));
    }
    let mut rho_hat = Vec::with_capacity(pairs.len());
    for (da, db) in &pairs {
        let diff = da.rho - db.rho;
        // Spacing of neighbouring eigenvalues in t.
        let gap = a
            .iter()
            .filter(|o| (o.l - da.l).abs() == 1)
            .map(|o| (o.rho - da.rho).norm() / (o.l - da.l).abs() as f64)
            .fold(f64::INFINITY, f64::min);
        if gap.is_finite() && diff.norm() > 0.25 * gap {
            return Err(Error::Fit(format!("l = {}: |rho_hat| = {} suggests misaligned numbering", da.l, diff.norm())));
        }
        rho_hat.push((da.l, diff));
    }
    let d = order.d as i32;
    let scaled: Vec<(i64, C)> = rho_hat.iter().map(|(l, v)| (*l, v * (*l as f64).powi(d))).collect();
    let c_hat = upper_half_mean(&scaled, l_range);
    let delta = scaled.iter().map(|(l, v)| (*l, v - c_hat)).collect();
    let slope_fit = if rho_hat.iter().all(|r| r.1.norm() == 0.0) {
        None
    } else {
        Some(loglog_slope(&rho_hat)?)
    };
    Ok(PairComparison {
        order: order.clone(),
        rho_hat,
        c_hat,
        delta,
        slope_fit,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightFit {
    /// `n - 1 + p0 - p_r`.
    pub expected: f64,
    pub exponent: f64,
    /// Mean of `beta_l / l^expected` over the upper half of the window.
    pub beta0: C,
}

/// `(l, beta_l)` for data with weights inside the window.
fn betas(data: &[SpectralDatum], l_range: (i64, i64)) -> Vec<(i64, C)> {
    data.iter()
        .filter(|d| d.l >= l_range.0 && d.l <= l_range.1)
        .filter_map(|d| d.beta.map(|b| (d.l, b)))
        .collect()
}

/// Growth exponent of `|beta_l|` and the constant `beta0`.
pub fn weight_asymptotics(data: &[SpectralDatum], n: usize, p0: usize, p_r: usize, l_range: (i64, i64)) -> Result<WeightFit> {
    let seq = betas(data, l_range);
    if seq.is_empty() {
        return Err(Error::Config("no weight numbers in the window; a weight_form is required".into()));
    }
    let expected = n as f64 - 1.0 + p0 as f64 - p_r as f64;
    let scaled: Vec<(i64, C)> = seq.iter().map(|(l, b)| (*l, b / (*l as f64).powf(expected))).collect();
    Ok(WeightFit {
        expected,
        exponent: loglog_slope(&seq)?,
        beta0: upper_half_mean(&scaled, l_range),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightPairFit {
    /// `(l, beta_l - beta~_l)`.
    pub beta_hat: Vec<(i64, C)>,
    /// `n - 1 + p0 - p_r - d`.
    pub expected: f64,
    pub exponent: Option<f64>,
}

pub fn weight_pair_difference(
    a: &[SpectralDatum],
    b: &[SpectralDatum],
    d: usize,
    q: f64,
    l_range: (i64, i64),
) -> Result<WeightPairFit> {
    let sa = betas(a, l_range);
    let sb = betas(b, l_range);
    if sa.is_empty() || sb.is_empty() {
        return Err(Error::Config("weight numbers missing for the pair".into()));
    }
    let beta_hat: Vec<(i64, C)> = sa
        .iter()
        .filter_map(|(l, x)| sb.iter().find(|(m, _)| m == l).map(|(_, y)| (*l, x - y)))
        .collect();
    let exponent = if beta_hat.iter().all(|v| v.1.norm() == 0.0) {
        None
    } else {
        Some(loglog_slope(&beta_hat)?)
    };
    Ok(WeightPairFit {
        beta_hat,
        expected: q - d as f64,
        exponent,
    })
}
