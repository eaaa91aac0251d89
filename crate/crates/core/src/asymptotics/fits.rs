//! Remainder sequences and least-squares fits of the asymptotic constants.

use crate::error::{Error, Result};
use crate::matrix::C;
use crate::spectrum::SpectralDatum;

use super::model::AsymptoticModel;

#[derive(Debug, Clone, PartialEq)]
pub struct Remainders {
    /// `(l, epsilon_l)` for simple eigenvalues.
    pub epsilons: Vec<(i64, C)>,
    /// `(L, sup_{l >= L} |epsilon_l|)` on a dyadic ladder of `L`.
    pub sup_tail: Vec<(i64, f64)>,
    /// `(L, sum_{l >= L} |epsilon_l|^2)` on the same ladder.
    pub tail_sums: Vec<(i64, f64)>,
}

/// `epsilon_l = t_l / G - l - chi` with the model's numbering shift.
pub fn extract_remainders(data: &[SpectralDatum], model: &AsymptoticModel) -> Remainders {
    let epsilons: Vec<(i64, C)> = data
        .iter()
        .filter(|d| d.multiplicity == 1)
        .map(|d| (d.l, d.rho / model.growth - d.l as f64 - model.chi_effective()))
        .collect();
    let mut sup_tail = Vec::new();
    let mut tail_sums = Vec::new();
    if let (Some(first), Some(last)) = (epsilons.first(), epsilons.last()) {
        let mut big_l = first.0.max(1);
        while big_l <= last.0 {
            let tail = epsilons.iter().filter(|e| e.0 >= big_l);
            sup_tail.push((big_l, tail.clone().map(|e| e.1.norm()).fold(0.0, f64::max)));
            tail_sums.push((big_l, tail.map(|e| e.1.norm_sqr()).sum()));
            big_l *= 2;
        }
    }
    Remainders {
        epsilons,
        sup_tail,
        tail_sums,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi1Fit {
    pub chi1: C,
    /// `sqrt(sum |epsilon_l - chi1 / l|^2)` over the window.
    pub residual: f64,
    pub used: usize,
}

/// Least squares of `epsilon_l ~ chi1 / l` over `lo <= l <= hi`.
pub fn chi1_fit(epsilons: &[(i64, C)], l_range: (i64, i64)) -> Result<Chi1Fit> {
    let pts: Vec<&(i64, C)> = epsilons.iter().filter(|e| e.0 >= l_range.0 && e.0 <= l_range.1 && e.0 > 0).collect();
    if pts.len() < 4 {
        return Err(Error::Fit(format!("{} usable indices in {l_range:?}, need 4", pts.len())));
    }
    let num: C = pts.iter().map(|(l, e)| e / *l as f64).sum();
    let den: f64 = pts.iter().map(|(l, _)| 1.0 / (*l as f64).powi(2)).sum();
    let chi1 = num / den;
    let residual = pts
        .iter()
        .map(|(l, e)| (e - chi1 / *l as f64).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(Chi1Fit {
        chi1,
        residual,
        used: pts.len(),
    })
}

/// Mean of `t_l / G - l` over a window: the empirical `chi`.
pub fn chi_fit(data: &[SpectralDatum], growth: f64, l_range: (i64, i64)) -> Result<C> {
    let vals: Vec<C> = data
        .iter()
        .filter(|d| d.multiplicity == 1 && d.l >= l_range.0 && d.l <= l_range.1)
        .map(|d| d.rho / growth - d.l as f64)
        .collect();
    if vals.len() < 2 {
        return Err(Error::Fit(format!("{} usable indices in {l_range:?}", vals.len())));
    }
    Ok(vals.iter().sum::<C>() / vals.len() as f64)
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Fit(format!("{} points for a line", x.len().min(y.len()))));
    }
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `log |v_l|` against `log l`, skipping exact zeros.
pub fn loglog_slope(seq: &[(i64, C)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = seq
        .iter()
        .filter(|(l, v)| *l > 0 && v.norm() > 0.0)
        .map(|(l, v)| ((*l as f64).ln(), v.norm().ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::Fit(format!("{} nonzero points for a log-log slope, need 4", pts.len())));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    Ok(linear_fit(&x, &y)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::asymptotic_model;

    #[test]
    fn remainders_of_predictions_vanish() {
        let m = asymptotic_model(3, &[0], &[0, 1], None).unwrap().with_shift(1);
        let data: Vec<SpectralDatum> = (1..=20)
            .map(|l| SpectralDatum {
                l,
                lambda: m.predicted_lambda(l),
                rho: m.predicted_t(l),
                epsilon: C::new(0.0, 0.0),
                beta: None,
                multiplicity: 1,
            })
            .collect();
        let r = extract_remainders(&data, &m);
        assert!(r.epsilons.iter().all(|e| e.1.norm() < 1e-13));
        assert_eq!(r.sup_tail.iter().map(|s| s.0).collect::<Vec<_>>(), vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn fits_recover_exact_constants() {
        let eps: Vec<(i64, C)> = (1..50).map(|l| (l, C::new(0.3, -0.1) / l as f64)).collect();
        let f = chi1_fit(&eps, (15, 40)).unwrap();
        assert!((f.chi1 - C::new(0.3, -0.1)).norm() < 1e-14 && f.residual < 1e-14);
        assert!(chi1_fit(&eps, (15, 17)).is_err());
        let seq: Vec<(i64, C)> = (5..40).map(|l| (l, C::new(2.0 * (l as f64).powi(-3), 0.0))).collect();
        assert!((loglog_slope(&seq).unwrap() + 3.0).abs() < 1e-12);
    }
}
