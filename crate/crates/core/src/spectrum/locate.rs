//! Eigenvalue location with global numbering.
//!
//! The numbering sweep counts zeros of `Delta` and of the zero-coefficient
//! `Delta^0` in `|lambda| < T^n`, with `T` halfway between two model zeros,
//! and fixes the integer offset of the predictions `t_l = G (l + chi)`.
//! Zeros inside the disk are found by Newton from the predictions and, if
//! that does not account for the count, by recursive rectangle subdivision.
//! Zeros outside come from one box per index in the strip around the
//! eigenvalue ray.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::asymptotics::{asymptotic_model, AsymptoticModel};
use crate::error::{Error, Result};
use crate::matrix::C;
use crate::solutions::IntegrationSettings;

use super::boundary::ProblemSpec;
use super::contour::{count_zeros_of, Contour, ContourSettings};
use super::delta::{char_delta_with, DeltaValue};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDatum {
    pub l: i64,
    pub lambda: C,
    /// `t` with `lambda = (-1)^{n-r} t^n`, on the branch nearest the positive axis.
    pub rho: C,
    /// `t / G - l - chi`.
    pub epsilon: C,
    pub beta: Option<C>,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocateSettings {
    pub integration: IntegrationSettings,
    pub contour: ContourSettings,
    /// Initial anchor index of the numbering disk.
    pub anchor: f64,
    pub max_anchor: f64,
    /// Overrides the anchor radius `T` in the `t`-plane.
    pub seed_radius: Option<f64>,
    /// Half-width of the strip around the eigenvalue ray; default `3 G`.
    pub strip: Option<f64>,
    pub kappa: Option<usize>,
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Roots closer than this in `t` are merged.
    pub dedupe: f64,
}

impl Default for LocateSettings {
    fn default() -> Self {
        Self {
            integration: IntegrationSettings::default(),
            contour: ContourSettings::default(),
            anchor: 5.0,
            max_anchor: 160.0,
            seed_radius: None,
            strip: None,
            kappa: None,
            newton_tol: 1e-14,
            max_newton: 60,
            dedupe: 1e-6,
        }
    }
}

/// Located eigenvalues together with the numbering data.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub data: Vec<SpectralDatum>,
    /// Model with the numbering shift applied.
    pub model: AsymptoticModel,
    /// Anchor radius in the `t`-plane.
    pub anchor_radius: f64,
    /// Zeros of `Delta` (and of `Delta^0`) in `|lambda| < anchor_radius^n`.
    pub anchor_count: usize,
}

struct Root {
    z: C,
    multiplicity: usize,
}

/// Newton iteration on `f` with a central-difference derivative.
fn newton<F>(f: &F, z0: C, tol: f64, max_iter: usize) -> Option<C>
where
    F: Fn(C) -> Result<DeltaValue>,
{
    let mut z = z0;
    let mut prev = f64::INFINITY;
    for _ in 0..max_iter {
        let h = 1e-6 * z.norm().max(1e-3);
        let v = f(z).ok()?;
        if v.mantissa.norm() == 0.0 {
            return Some(z);
        }
        let vp = f(z + h).ok()?;
        let vm = f(z - h).ok()?;
        let s = vp.log_scale;
        let d = (vp.rescaled(s) - vm.rescaled(s)) / (2.0 * h);
        if d.norm() == 0.0 || !d.re.is_finite() {
            return None;
        }
        let step = v.rescaled(s) / d;
        if !step.re.is_finite() {
            return None;
        }
        z -= step;
        let size = step.norm() / z.norm().max(1.0);
        // Stagnation at the rounding floor counts as convergence.
        if size <= tol || (size < 1e-9 && size > 0.5 * prev) {
            return Some(z);
        }
        prev = size;
    }
    None
}

fn inside(z: C, lo: C, hi: C, margin: f64) -> bool {
    let mx = margin * (hi.re - lo.re);
    let my = margin * (hi.im - lo.im);
    z.re >= lo.re - mx && z.re <= hi.re + mx && z.im >= lo.im - my && z.im <= hi.im + my
}

/// All zeros of `f` in the rectangle `[lo, hi]`, given their number.
/// `n_nodes` is the exponent used to size contour sampling.
fn zeros_in_rect<F>(
    f: &F,
    n_nodes: usize,
    lo: C,
    hi: C,
    count: i64,
    settings: &LocateSettings,
    depth: usize,
) -> Result<Vec<Root>>
where
    F: Fn(C) -> Result<DeltaValue> + Sync,
{
    if count <= 0 {
        return Ok(vec![]);
    }
    let center = (lo + hi) * 0.5;
    if count == 1 {
        if let Some(z) = newton(f, center, settings.newton_tol, settings.max_newton) {
            if inside(z, lo, hi, 1e-9) {
                return Ok(vec![Root { z, multiplicity: 1 }]);
            }
        }
    }
    let size = (hi - lo).norm();
    if size < 1e-10 * center.norm().max(1.0) || depth > 60 {
        if count == 1 {
            return Err(Error::Convergence(format!("Newton failed for the zero near {center}")));
        }
        return Ok(vec![Root {
            z: center,
            multiplicity: count as usize,
        }]);
    }
    // Off-centre splits keep refined zeros away from the new edges.
    let offsets = [0.5137, 0.4711, 0.5523, 0.4419];
    let mut last_err = None;
    for &o in &offsets {
        let mid = C::new(lo.re + o * (hi.re - lo.re), lo.im + (1.0 - o) * (hi.im - lo.im));
        let boxes = [
            (lo, mid),
            (C::new(mid.re, lo.im), C::new(hi.re, mid.im)),
            (C::new(lo.re, mid.im), C::new(mid.re, hi.im)),
            (mid, hi),
        ];
        let counts: Result<Vec<i64>> = boxes
            .iter()
            .map(|&(a, b)| {
                let mut c = settings.contour.clone();
                c.retries = 0;
                count_zeros_of(f, n_nodes, &Contour::Rect { lo: a, hi: b }, &c)
            })
            .collect();
        let counts = match counts {
            Ok(c) => c,
            Err(e @ Error::Contour(_)) => {
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        if counts.iter().sum::<i64>() != count {
            last_err = Some(Error::Contour(format!("sub-box counts {counts:?} do not add up to {count}")));
            continue;
        }
        let mut out = Vec::new();
        for (&(a, b), &k) in boxes.iter().zip(&counts) {
            out.extend(zeros_in_rect(f, n_nodes, a, b, k, settings, depth + 1)?);
        }
        return Ok(out);
    }
    Err(last_err.unwrap())
}

fn sort_by_modulus(roots: &mut [Root]) {
    roots.sort_by(|a, b| {
        let (ma, mb) = (a.z.norm(), b.z.norm());
        if (ma - mb).abs() <= 1e-10 * ma.max(mb) {
            a.z.arg().partial_cmp(&b.z.arg()).unwrap()
        } else {
            ma.partial_cmp(&mb).unwrap()
        }
    });
}

/// Locates `lambda_l` for `l_min <= l <= l_max`.
pub fn locate_eigenvalues(problem: &ProblemSpec, l_min: i64, l_max: i64, settings: &LocateSettings) -> Result<Spectrum> {
    if l_min < 1 || l_max < l_min {
        return Err(Error::validation("settings.l_min", format!("need 1 <= l_min <= l_max, got {l_min}..{l_max}")));
    }
    let n = problem.n();
    let b = &problem.boundary;
    let base = asymptotic_model(n, &b.p_left(), &b.p_right(), settings.kappa)?;
    let g = base.growth;
    let zero = problem.zero_coefficient();
    let integ = &settings.integration;
    let delta = |z: C| char_delta_with(problem, z, integ);
    let delta0 = |z: C| char_delta_with(&zero, z, integ);

    // Numbering sweep.
    let mut anchor = match settings.seed_radius {
        Some(t) => (t / g - base.chi.re - 0.5).round().max(1.0),
        None => settings.anchor,
    };
    let (t_anchor, count) = loop {
        let t = g * (anchor + base.chi.re + 0.5);
        let disk = Contour::Disk {
            center: C::new(0.0, 0.0),
            radius: t.powi(n as i32),
        };
        let c = count_zeros_of(&delta, n, &disk, &settings.contour)?;
        let c0 = count_zeros_of(&delta0, n, &disk, &settings.contour)?;
        if c == c0 {
            break (t, c);
        }
        anchor *= 2.0;
        if anchor > settings.max_anchor {
            return Err(Error::Model(format!(
                "zero counts of Delta ({c}) and Delta^0 ({c0}) disagree up to |t| = {t}"
            )));
        }
    };
    let l_m = (t_anchor / g - base.chi.re).floor() as i64;
    let model = base.with_shift(l_m - count);
    let count = count as usize;

    let mut data = Vec::new();
    if (l_min as usize) <= count {
        let mut roots = low_zeros(&delta, &model, t_anchor, count, settings)?;
        sort_by_modulus(&mut roots);
        let mut l = 1i64;
        for r in roots {
            let t = model.t_of_lambda(r.z);
            data.push(datum(&model, l, r.z, t, r.multiplicity));
            l += r.multiplicity as i64;
        }
    }
    let first = (count as i64 + 1).max(l_min);
    if l_max >= first {
        let mut roots = match ray_zeros(&delta, &model, t_anchor, count as i64, l_max + 1, settings)? {
            Some(r) => r,
            None => high_zeros(&delta, &model, t_anchor, count as i64 + 1, l_max + 1, settings)?,
        };
        roots.sort_by(|a, b| a.z.re.partial_cmp(&b.z.re).unwrap());
        let mut l = count as i64 + 1;
        for r in roots {
            let lambda = model.lambda_of_t(r.z);
            data.push(datum(&model, l, lambda, r.z, r.multiplicity));
            l += r.multiplicity as i64;
        }
    }
    data.retain(|d| d.l + d.multiplicity as i64 > l_min && d.l <= l_max);
    Ok(Spectrum {
        data,
        model,
        anchor_radius: t_anchor,
        anchor_count: count,
    })
}

fn datum(model: &AsymptoticModel, l: i64, lambda: C, t: C, multiplicity: usize) -> SpectralDatum {
    SpectralDatum {
        l,
        lambda,
        rho: t,
        epsilon: t / model.growth - l as f64 - model.chi_effective(),
        beta: None,
        multiplicity,
    }
}

fn dedupe(roots: &mut Vec<Root>, tol: f64, key: impl Fn(C) -> C) {
    let mut out: Vec<Root> = Vec::with_capacity(roots.len());
    for r in roots.drain(..) {
        if !out.iter().any(|o| (key(o.z) - key(r.z)).norm() < tol) {
            out.push(r);
        }
    }
    *roots = out;
}

fn low_zeros<F>(delta: &F, model: &AsymptoticModel, t_anchor: f64, count: usize, settings: &LocateSettings) -> Result<Vec<Root>>
where
    F: Fn(C) -> Result<DeltaValue> + Sync,
{
    if count == 0 {
        return Ok(vec![]);
    }
    let n = model.n;
    let radius = t_anchor.powi(n as i32);
    // Seeds from the predictions; accepted only if they account for the whole count.
    let seeds: Vec<i64> = (0..=count as i64 + 1).collect();
    let found: Vec<Option<C>> = seeds
        .par_iter()
        .map(|&l| {
            let t0 = model.predicted_t(l);
            newton(delta, model.lambda_of_t(t0), settings.newton_tol, settings.max_newton)
        })
        .collect();
    let mut roots: Vec<Root> = found
        .into_iter()
        .flatten()
        .filter(|z| z.norm() < radius)
        .map(|z| Root { z, multiplicity: 1 })
        .collect();
    dedupe(&mut roots, settings.dedupe, |z| model.t_of_lambda(z));
    if roots.len() == count {
        return Ok(roots);
    }
    let lo = C::new(-radius, -radius);
    let hi = C::new(radius, radius);
    let total = count_zeros_of(delta, n, &Contour::Rect { lo, hi }, &settings.contour)?;
    let mut roots = zeros_in_rect(delta, n, lo, hi, total, settings, 0)?;
    roots.retain(|r| r.z.norm() < radius);
    let k: usize = roots.iter().map(|r| r.multiplicity).sum();
    if k != count {
        return Err(Error::Convergence(format!("found {k} zeros in the anchor disk, expected {count}")));
    }
    Ok(roots)
}

/// Zeros with `t_anchor < |t| < T` for `T` just past `l_last`, by one disk count
/// and Newton from the predictions. `None` when the two do not agree.
fn ray_zeros<F>(
    delta: &F,
    model: &AsymptoticModel,
    t_anchor: f64,
    count: i64,
    l_last: i64,
    settings: &LocateSettings,
) -> Result<Option<Vec<Root>>>
where
    F: Fn(C) -> Result<DeltaValue> + Sync,
{
    let n = model.n;
    let t_end = model.growth * (l_last as f64 + model.chi_effective().re + 0.5);
    if t_end <= t_anchor {
        return Ok(None);
    }
    let disk = Contour::Disk {
        center: C::new(0.0, 0.0),
        radius: t_end.powi(n as i32),
    };
    let total = match count_zeros_of(delta, n, &disk, &settings.contour) {
        Ok(k) => k,
        Err(Error::Contour(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let f = |t: C| delta(model.lambda_of_t(t));
    let mut roots: Vec<Root> = (count + 1..=l_last + 1)
        .into_par_iter()
        .filter_map(|l| newton(&f, model.predicted_t(l), settings.newton_tol, settings.max_newton))
        .filter(|z| z.norm() > t_anchor && z.norm() < t_end)
        .map(|z| Root { z, multiplicity: 1 })
        .collect();
    dedupe(&mut roots, settings.dedupe, |z| z);
    Ok((roots.len() as i64 == total - count).then_some(roots))
}

fn high_zeros<F>(
    delta: &F,
    model: &AsymptoticModel,
    t_anchor: f64,
    l_first: i64,
    l_last: i64,
    settings: &LocateSettings,
) -> Result<Vec<Root>>
where
    F: Fn(C) -> Result<DeltaValue> + Sync,
{
    let n = model.n;
    let g = model.growth;
    let f = |t: C| delta(model.lambda_of_t(t));
    let per_box: Vec<Vec<Root>> = (l_first..=l_last)
        .into_par_iter()
        .map(|l| {
            let tc = model.predicted_t(l);
            let left = (tc.re - 0.5 * g).max(t_anchor);
            let right = tc.re + 0.5 * g;
            let cap = left * (PI / (2.0 * n as f64)).tan() * 0.98;
            let mut half = settings.strip.unwrap_or(3.0 * g).min(cap);
            loop {
                let lo = C::new(left, tc.im - half);
                let hi = C::new(right, tc.im + half);
                let k = count_zeros_of(&f, 1, &Contour::Rect { lo, hi }, &settings.contour)
                    .map_err(|e| with_index(e, l))?;
                if k == 0 && half < cap && settings.strip.is_none() {
                    half = (2.0 * half).min(cap);
                    continue;
                }
                if k == 1 {
                    let t0 = C::new(tc.re.clamp(lo.re, hi.re), tc.im);
                    if let Some(z) = newton(&f, t0, settings.newton_tol, settings.max_newton) {
                        if inside(z, lo, hi, 1e-9) {
                            return Ok(vec![Root { z, multiplicity: 1 }]);
                        }
                    }
                }
                return zeros_in_rect(&f, 1, lo, hi, k, settings, 0).map_err(|e| with_index(e, l));
            }
        })
        .collect::<Result<_>>()?;
    let mut roots: Vec<Root> = per_box.into_iter().flatten().collect();
    dedupe(&mut roots, settings.dedupe, |z| z);
    Ok(roots)
}

fn with_index(e: Error, l: i64) -> Error {
    match e {
        Error::Contour(m) => Error::Contour(format!("l = {l}: {m}")),
        Error::Convergence(m) => Error::Convergence(format!("l = {l}: {m}")),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularization::ExpressionSpec;
    use crate::spectrum::boundary::{BoundaryForm, BoundarySpec};

    fn plain(n: usize, pl: &[usize], pr: &[usize]) -> ProblemSpec {
        let b = BoundarySpec::new(
            pl.iter().map(|&p| BoundaryForm::plain(p)).collect(),
            pr.iter().map(|&p| BoundaryForm::plain(p)).collect(),
            None,
        );
        ProblemSpec::from_expression(ExpressionSpec::zero(n, vec![0; n - 1]).unwrap(), b).unwrap()
    }

    #[test]
    fn dirichlet_spectrum() {
        let s = locate_eigenvalues(&plain(2, &[0], &[0]), 1, 20, &LocateSettings::default()).unwrap();
        assert_eq!(s.data.len(), 20);
        for d in &s.data {
            let want = -(PI * d.l as f64).powi(2);
            assert!((d.lambda - want).norm() < 1e-10 * want.abs(), "{d:?}");
            assert!(d.epsilon.norm() < 1e-9);
        }
    }

    #[test]
    fn clamped_beam_first_root() {
        let s = locate_eigenvalues(&plain(4, &[0, 1], &[0, 1]), 1, 3, &LocateSettings::default()).unwrap();
        assert!((s.data[0].rho - 4.730040745).norm() < 1e-6, "{:?}", s.data[0]);
        assert!((s.data[1].rho - 7.853204624).norm() < 1e-6);
    }

    #[test]
    fn example_cubic_predictions() {
        let s = locate_eigenvalues(&plain(3, &[0], &[0, 1]), 1, 12, &LocateSettings::default()).unwrap();
        let g = 2.0 * PI / 3f64.sqrt();
        for d in s.data.iter().filter(|d| d.l >= 6) {
            let frac = d.rho.re / g - d.l as f64;
            let frac = frac - frac.round();
            assert!((frac - 1.0 / 6.0).abs() < 1e-3, "{d:?}");
        }
    }
}
