//! Argument-principle zero counting.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::C;

use super::boundary::ProblemSpec;
use super::delta::{char_delta, DeltaValue};

/// A closed contour, traversed counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Contour {
    /// `|lambda - center| = radius`.
    Disk { center: C, radius: f64 },
    /// Axis-parallel rectangle in the `lambda`-plane.
    Rect { lo: C, hi: C },
    /// Polygon in the `rho`-plane, `lambda = rho^n`; the map must be one-to-one inside.
    RhoPolygon(Vec<C>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourSettings {
    /// Largest argument change accepted between neighbouring nodes.
    pub max_arg_step: f64,
    pub min_initial: usize,
    pub max_evals: usize,
    /// Perturbed retries when a zero sits on the contour.
    pub retries: usize,
}

impl Default for ContourSettings {
    fn default() -> Self {
        Self {
            max_arg_step: 0.5,
            min_initial: 32,
            max_evals: 400_000,
            retries: 3,
        }
    }
}

fn rect_corners(lo: C, hi: C) -> Vec<C> {
    vec![lo, C::new(hi.re, lo.im), hi, C::new(lo.re, hi.im)]
}

fn polygon_point(v: &[C], lens: &[f64], total: f64, s: f64) -> C {
    let mut d = s.clamp(0.0, 1.0) * total;
    for (i, &len) in lens.iter().enumerate() {
        if d <= len || i + 1 == lens.len() {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            return a + (b - a) * (d / len).min(1.0);
        }
        d -= len;
    }
    v[0]
}

/// Winding number of `f` along the closed path `z(s)`, `s` in `[0, 1]`.
pub fn winding_number<F, P>(f: &F, path: &P, initial: usize, settings: &ContourSettings) -> Result<i64>
where
    F: Fn(C) -> Result<DeltaValue> + Sync,
    P: Fn(f64) -> C + Sync,
{
    let m = initial.max(settings.min_initial);
    let nodes: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    let mut values: Vec<DeltaValue> = nodes[..m].par_iter().map(|&s| f(path(s))).collect::<Result<_>>()?;
    values.push(values[0]);
    let mut evals = m;
    let mut total = 0.0;
    let arg = |a: &DeltaValue, b: &DeltaValue| (b.mantissa / a.mantissa).arg();
    for i in 0..m {
        // Depth-first refinement of one initial segment.
        let mut stack = vec![(nodes[i], nodes[i + 1], values[i], values[i + 1])];
        while let Some((sa, sb, va, vb)) = stack.pop() {
            if va.mantissa.norm() == 0.0 || vb.mantissa.norm() == 0.0 {
                return Err(Error::Contour(format!("zero on the contour near {}", path(sa))));
            }
            let sm = 0.5 * (sa + sb);
            let vm = f(path(sm))?;
            evals += 1;
            if vm.mantissa.norm() == 0.0 {
                return Err(Error::Contour(format!("zero on the contour near {}", path(sm))));
            }
            let da = arg(&va, &vm);
            let db = arg(&vm, &vb);
            let whole = arg(&va, &vb);
            let ok = da.abs() < settings.max_arg_step
                && db.abs() < settings.max_arg_step
                && whole.abs() < settings.max_arg_step
                && (da + db - whole).abs() < 1e-6;
            if ok {
                total += da + db;
                continue;
            }
            if sb - sa < 1e-13 {
                return Err(Error::Contour(format!("argument jumps near {}; zero close to the contour", path(sm))));
            }
            if evals > settings.max_evals {
                return Err(Error::Contour(format!("more than {} evaluations", settings.max_evals)));
            }
            stack.push((sm, sb, vm, vb));
            stack.push((sa, sm, va, vm));
        }
    }
    let k = total / (2.0 * PI);
    if (k - k.round()).abs() > 1e-3 {
        return Err(Error::Contour(format!("accumulated argument {total} is not a multiple of 2 pi")));
    }
    Ok(k.round() as i64)
}

/// Initial node count from the `rho`-length of a path.
fn nodes_for(rho_length: f64) -> usize {
    (16.0 + 6.0 * rho_length).ceil() as usize
}

/// `rho`-length of the image of a `lambda`-path under `rho = lambda^{1/n}`,
/// from `|d rho| = |d lambda| / (n |lambda|^{1 - 1/n})`.
fn rho_length(path: impl Fn(f64) -> C, n: usize) -> f64 {
    let k = 256;
    let e = 1.0 - 1.0 / n as f64;
    (0..k)
        .map(|j| {
            let (a, b) = (path(j as f64 / k as f64), path((j + 1) as f64 / k as f64));
            let m = ((a + b) * 0.5).norm().max(1e-300);
            (b - a).norm() / (n as f64 * m.powf(e))
        })
        .sum()
}

/// Counts zeros of an analytic `f` inside `contour` (in the plane of `f`'s argument,
/// or in the `rho`-plane for [`Contour::RhoPolygon`] with `n` given).
pub fn count_zeros_of<F>(f: &F, n: usize, contour: &Contour, settings: &ContourSettings) -> Result<i64>
where
    F: Fn(C) -> Result<DeltaValue> + Sync,
{
    let mut last = None;
    for attempt in 0..=settings.retries {
        let bump = 1.0 + 1.3e-3 * attempt as f64;
        let result = match contour {
            Contour::Disk { center, radius } => {
                let rad = radius * bump;
                let path = |s: f64| *center + C::from_polar(rad, 2.0 * PI * s);
                winding_number(f, &path, nodes_for(rho_length(path, n)), settings)
            }
            Contour::Rect { lo, hi } => {
                let c = (lo + hi) * 0.5;
                let (lo, hi) = (c + (lo - c) * bump, c + (hi - c) * bump);
                let v = rect_corners(lo, hi);
                let lens: Vec<f64> = (0..4).map(|i| (v[(i + 1) % 4] - v[i]).norm()).collect();
                let total: f64 = lens.iter().sum();
                let path = |s: f64| polygon_point(&v, &lens, total, s);
                winding_number(f, &path, nodes_for(rho_length(path, n)), settings)
            }
            Contour::RhoPolygon(v) => {
                let c = v.iter().sum::<C>() / v.len() as f64;
                let v: Vec<C> = v.iter().map(|z| c + (z - c) * bump).collect();
                let g = |rho: C| f(rho.powu(n as u32));
                polygon_winding(&g, &v, settings)
            }
        };
        match result {
            Err(Error::Contour(m)) => last = Some(Error::Contour(m)),
            other => return other,
        }
    }
    Err(last.unwrap())
}

fn polygon_winding<F>(f: &F, v: &[C], settings: &ContourSettings) -> Result<i64>
where
    F: Fn(C) -> Result<DeltaValue> + Sync,
{
    let lens: Vec<f64> = (0..v.len()).map(|i| (v[(i + 1) % v.len()] - v[i]).norm()).collect();
    let total: f64 = lens.iter().sum();
    winding_number(f, &|s: f64| polygon_point(v, &lens, total, s), nodes_for(total), settings)
}

/// Number of eigenvalues of `problem` inside `contour`.
pub fn count_zeros(problem: &ProblemSpec, contour: &Contour) -> Result<i64> {
    count_zeros_with(problem, contour, &ContourSettings::default())
}

pub fn count_zeros_with(problem: &ProblemSpec, contour: &Contour, settings: &ContourSettings) -> Result<i64> {
    count_zeros_of(&|z| char_delta(problem, z), problem.n(), contour, settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_counts() {
        let f = |z: C| Ok(DeltaValue::from_value((z - 1.0) * (z - 1.0) * (z + C::new(0.0, 3.0))));
        let s = ContourSettings::default();
        let disk = |r| Contour::Disk { center: C::new(0.0, 0.0), radius: r };
        assert_eq!(count_zeros_of(&f, 1, &disk(0.5), &s).unwrap(), 0);
        assert_eq!(count_zeros_of(&f, 1, &disk(2.0), &s).unwrap(), 2);
        assert_eq!(count_zeros_of(&f, 1, &disk(4.0), &s).unwrap(), 3);
        let rect = Contour::Rect { lo: C::new(-1.0, -4.0), hi: C::new(0.5, 0.0) };
        assert_eq!(count_zeros_of(&f, 1, &rect, &s).unwrap(), 1);
    }

    #[test]
    fn zero_on_the_contour_is_perturbed_away() {
        let f = |z: C| Ok(DeltaValue::from_value(z - 1.0));
        let disk = Contour::Disk { center: C::new(0.0, 0.0), radius: 1.0 };
        let n = count_zeros_of(&f, 1, &disk, &ContourSettings::default()).unwrap();
        assert_eq!(n, 1);
    }
}
