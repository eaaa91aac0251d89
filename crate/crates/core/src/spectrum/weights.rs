//! Weight numbers `beta_l = Delta^bullet(lambda_l) / Delta'(lambda_l)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::C;
use crate::solutions::IntegrationSettings;

use super::boundary::ProblemSpec;
use super::delta::{char_delta_bullet_with, char_delta_with, DeltaValue};
use super::locate::SpectralDatum;

#[derive(Debug, Clone, PartialEq)]
pub struct CauchySettings {
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub rel_tol: f64,
}

impl Default for CauchySettings {
    fn default() -> Self {
        Self {
            min_nodes: 16,
            max_nodes: 512,
            rel_tol: 1e-11,
        }
    }
}

/// Trapezoidal rule for `(1 / 2 pi i) oint g(w) (w - z0)^{-k} dw` on `|w - z0| = radius`,
/// with node doubling until two successive values agree.
fn circle_rule<G>(g: &G, z0: C, radius: f64, power: i32, settings: &CauchySettings) -> Result<C>
where
    G: Fn(C) -> Result<(C, f64)> + Sync,
{
    let mut m = settings.min_nodes;
    let mut prev: Option<C> = None;
    while m <= settings.max_nodes {
        let vals: Vec<(C, f64)> = (0..m)
            .into_par_iter()
            .map(|j| {
                let e = C::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
                g(z0 + e * radius).map(|(v, s)| (v * e.powi(1 - power), s))
            })
            .collect::<Result<_>>()?;
        let top = vals.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
        let sum: C = vals.iter().map(|(v, s)| v * (s - top).exp()).sum();
        let value = sum / m as f64 * radius.powi(1 - power) * top.exp();
        if let Some(p) = prev {
            if (value - p).norm() <= settings.rel_tol * value.norm().max(f64::MIN_POSITIVE) {
                return Ok(value);
            }
        }
        prev = Some(value);
        m *= 2;
    }
    Err(Error::Convergence(format!(
        "Cauchy integral at {z0} with radius {radius} did not settle with {} nodes",
        settings.max_nodes
    )))
}

/// `f'(z0)` by the Cauchy integral of an analytic `f` on a circle.
pub fn cauchy_derivative<F>(f: &F, z0: C, radius: f64, settings: &CauchySettings) -> Result<C>
where
    F: Fn(C) -> Result<DeltaValue> + Sync,
{
    circle_rule(&|w| f(w).map(|v| (v.mantissa, v.log_scale)), z0, radius, 2, settings)
}

/// `dDelta / dlambda` at `lambda0`.
pub fn delta_derivative(problem: &ProblemSpec, lambda0: C, radius: f64) -> Result<C> {
    let integ = IntegrationSettings::default();
    cauchy_derivative(&|z| char_delta_with(problem, z, &integ), lambda0, radius, &CauchySettings::default())
}

/// `(1 / 2 pi i) oint Delta^bullet / Delta` around `lambda0`.
pub fn weight_residue(problem: &ProblemSpec, lambda0: C, radius: f64, settings: &CauchySettings) -> Result<C> {
    let integ = IntegrationSettings::default();
    let g = |w: C| -> Result<(C, f64)> {
        let num = char_delta_bullet_with(problem, w, &integ)?;
        let den = char_delta_with(problem, w, &integ)?;
        Ok((num.ratio(&den), 0.0))
    };
    circle_rule(&g, lambda0, radius, 0, settings)
}

/// Weight number with its residue cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightCheck {
    pub beta: C,
    pub residue: C,
    pub radius: f64,
}

/// Circle radius around each eigenvalue: a quarter of the distance to the
/// nearest other eigenvalue or model neighbour `t +- G`.
fn radii(data: &[SpectralDatum], sign: f64, n: usize, growth: f64) -> Vec<f64> {
    data.iter()
        .map(|d| {
            let mut gap = f64::INFINITY;
            for o in data {
                if o.l != d.l {
                    gap = gap.min((o.lambda - d.lambda).norm());
                }
            }
            for s in [-1.0, 1.0] {
                let t = d.rho + s * growth;
                gap = gap.min((t.powu(n as u32) * sign - d.lambda).norm());
            }
            0.25 * gap
        })
        .collect()
}

/// Fills `beta` for each simple datum; multiple eigenvalues are left without weights.
pub fn weight_numbers(problem: &ProblemSpec, data: &[SpectralDatum]) -> Result<Vec<SpectralDatum>> {
    Ok(weights(problem, data, &CauchySettings::default(), false)?
        .into_iter()
        .map(|(d, _)| d)
        .collect())
}

/// [`weight_numbers`] with the residue cross-check per datum.
pub fn weight_numbers_checked(
    problem: &ProblemSpec,
    data: &[SpectralDatum],
    settings: &CauchySettings,
) -> Result<Vec<(SpectralDatum, Option<WeightCheck>)>> {
    weights(problem, data, settings, true)
}

fn weights(
    problem: &ProblemSpec,
    data: &[SpectralDatum],
    settings: &CauchySettings,
    check: bool,
) -> Result<Vec<(SpectralDatum, Option<WeightCheck>)>> {
    if problem.boundary.weight.is_none() {
        return Err(Error::Config("weight_form is required for the weight numbers".into()));
    }
    let n = problem.n();
    let sign = if (n - problem.r()).is_multiple_of(2) { 1.0 } else { -1.0 };
    let growth = PI / (PI * problem.r() as f64 / n as f64).sin();
    let rad = radii(data, sign, n, growth);
    let integ = IntegrationSettings::default();
    data.iter()
        .zip(rad)
        .map(|(d, radius)| {
            let mut out = d.clone();
            if d.multiplicity != 1 {
                out.beta = None;
                return Ok((out, None));
            }
            let dd = cauchy_derivative(&|z| char_delta_with(problem, z, &integ), d.lambda, radius, settings)
                .map_err(|e| at_index(e, d.l))?;
            let num = char_delta_bullet_with(problem, d.lambda, &integ)?;
            let beta = num.value() / dd;
            out.beta = Some(beta);
            if !check {
                return Ok((out, None));
            }
            let residue = weight_residue(problem, d.lambda, radius, settings).map_err(|e| at_index(e, d.l))?;
            Ok((out, Some(WeightCheck { beta, residue, radius })))
        })
        .collect()
}

fn at_index(e: Error, l: i64) -> Error {
    match e {
        Error::Convergence(m) => Error::Convergence(format!("l = {l}: {m}")),
        other => other,
    }
}
