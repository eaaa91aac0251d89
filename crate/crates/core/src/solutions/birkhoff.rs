//! Birkhoff-type fundamental solutions `w = (I + E) exp(rho B x)` of
//! `w' = rho B w + A(x, rho) w` from the integral equations for `z = I + E`.
//!
//! Each application of `V_k` solves, component by component, the scalar
//! equation `y' = rho (w_j - w_k) y + g` in its non-growing direction: forward
//! from `x = 0` when `Re(rho w_j) <= Re(rho w_k)`, backward from `x = 1`
//! otherwise. Inside a panel `g` is interpolated at Gauss nodes and the
//! exponential kernel is integrated exactly against the interpolant.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C};
use crate::quad::{gauss_legendre, gl20};
use crate::asymptotics::sector::SectorFrame;
use crate::regularization::{AssociatedMatrix, ConjugatedSystem};

use super::propagate::{for_each_step, IntegrationSettings};

#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffSettings {
    pub nodes_per_panel: usize,
    /// Panels satisfy `|rho| h <= panel_scale`.
    pub panel_scale: f64,
    pub min_panels: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Relaxation factor of the fixed-point update, `1` for plain iteration.
    pub damping: f64,
}

impl Default for BirkhoffSettings {
    fn default() -> Self {
        Self {
            nodes_per_panel: 8,
            panel_scale: 0.5,
            min_panels: 32,
            tol: 1e-12,
            max_iter: 60,
            damping: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BirkhoffSolution {
    pub rho: C,
    pub grid: Vec<f64>,
    /// `z(x, rho)` on the grid.
    pub z: Vec<CMatrix>,
    pub iterations: usize,
    omegas: Vec<C>,
}

impl BirkhoffSolution {
    /// `E = z - I` at grid index `i`.
    pub fn remainder(&self, i: usize) -> CMatrix {
        let n = self.omegas.len();
        &self.z[i] - CMatrix::identity(n, n)
    }

    /// `max_x ||E(x, rho)||` in the max-modulus norm.
    pub fn max_remainder(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| crate::matrix::max_norm(&self.remainder(i)))
            .fold(0.0, f64::max)
    }

    /// `w(x_i) = z(x_i) exp(rho B x_i)`; overflows for large `|rho| x`.
    pub fn w(&self, i: usize) -> CMatrix {
        let x = self.grid[i];
        let mut w = self.z[i].clone();
        for (k, om) in self.omegas.iter().enumerate() {
            let e = (self.rho * om * x).exp();
            for j in 0..w.nrows() {
                w[(j, k)] *= e;
            }
        }
        w
    }

    pub fn omegas(&self) -> &[C] {
        &self.omegas
    }
}

struct Panel {
    a: f64,
    h: f64,
    /// `A(x, rho)` at the Gauss nodes.
    a_nodes: Vec<CMatrix>,
}

/// Exponential quadrature weights on one panel for one exponent `mu`.
struct Weights {
    /// Rows `0..q` for interior nodes, row `q` for the far endpoint.
    fwd: Vec<Vec<C>>,
    bwd: Vec<Vec<C>>,
    /// `exp(mu u_i)` (forward) and `exp(mu (u_i - h))` (backward), same row layout.
    fwd_carry: Vec<C>,
    bwd_carry: Vec<C>,
}

fn lagrange(nodes: &[f64], m: usize, v: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != m)
        .map(|(_, u)| (v - u) / (nodes[m] - u))
        .product()
}

fn panel_weights(mu: C, h: f64, unit: &[f64]) -> Weights {
    let q = unit.len();
    let nodes: Vec<f64> = unit.iter().map(|xi| 0.5 * h * (1.0 + xi)).collect();
    let (gx, gw) = gl20();
    // int_lo^hi exp(mu (target - v)) l_m(v) dv
    let integral = |lo: f64, hi: f64, target: f64, m: usize| -> C {
        if hi <= lo {
            return C::new(0.0, 0.0);
        }
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        gx.iter()
            .zip(gw)
            .map(|(x, w)| {
                let v = mid + half * x;
                (mu * (target - v)).exp() * lagrange(&nodes, m, v) * *w
            })
            .sum::<C>()
            * half
    };
    let mut fwd = Vec::with_capacity(q + 1);
    let mut bwd = Vec::with_capacity(q + 1);
    let mut fwd_carry = Vec::with_capacity(q + 1);
    let mut bwd_carry = Vec::with_capacity(q + 1);
    for i in 0..=q {
        let (uf, ub) = if i < q { (nodes[i], nodes[i]) } else { (h, 0.0) };
        fwd.push((0..q).map(|m| integral(0.0, uf, uf, m)).collect());
        bwd.push((0..q).map(|m| -integral(ub, h, ub, m)).collect());
        fwd_carry.push((mu * uf).exp());
        bwd_carry.push((mu * (ub - h)).exp());
    }
    Weights {
        fwd,
        bwd,
        fwd_carry,
        bwd_carry,
    }
}

struct Discretization {
    rho: C,
    omegas: Vec<C>,
    panels: Vec<Panel>,
    q: usize,
    /// Keyed by `(j, k, panel length bits)`.
    weights: HashMap<(usize, usize, u64), Weights>,
}

impl Discretization {
    fn new(sys: &ConjugatedSystem, rho: C, settings: &BirkhoffSettings) -> Self {
        let n = sys.n();
        let (unit, _) = gauss_legendre(settings.nodes_per_panel);
        let mut knots = sys.breakpoints();
        knots.push(0.0);
        knots.push(1.0);
        knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        knots.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let h_max = (settings.panel_scale / rho.norm().max(1e-300)).min(1.0 / settings.min_panels as f64);
        let mut panels = Vec::new();
        for w in knots.windows(2) {
            let len = w[1] - w[0];
            let count = (len / h_max).ceil().max(1.0) as usize;
            let h = len / count as f64;
            for i in 0..count {
                let a = w[0] + i as f64 * h;
                let a_nodes = unit
                    .iter()
                    .map(|xi| sys.a_at(a + 0.5 * h * (1.0 + xi), rho))
                    .collect();
                panels.push(Panel { a, h, a_nodes });
            }
        }
        let omegas = sys.frame.omegas.clone();
        let mut weights = HashMap::new();
        for p in &panels {
            for j in 0..n {
                for k in 0..n {
                    weights
                        .entry((j, k, p.h.to_bits()))
                        .or_insert_with(|| panel_weights(rho * (omegas[j] - omegas[k]), p.h, &unit));
                }
            }
        }
        Self {
            rho,
            omegas,
            panels,
            q: unit.len(),
            weights,
        }
    }

    fn grid(&self) -> Vec<f64> {
        let (unit, _) = gauss_legendre(self.q);
        let mut g = vec![0.0];
        for p in &self.panels {
            g.extend(unit.iter().map(|xi| p.a + 0.5 * p.h * (1.0 + xi)));
            g.push(p.a + p.h);
        }
        g
    }

    fn forward(&self, j: usize, k: usize) -> bool {
        (self.rho * self.omegas[j]).re <= (self.rho * self.omegas[k]).re
    }

    /// `z_k^0 + V_k z` on the grid layout `[0, (nodes, right end) per panel]`.
    /// `z` holds one `n`-vector per grid point.
    fn apply(&self, k: usize, z: &[Vec<C>]) -> Vec<Vec<C>> {
        let n = self.omegas.len();
        let q = self.q;
        let stride = q + 1;
        // g at the Gauss nodes, per panel
        let g: Vec<Vec<Vec<C>>> = self
            .panels
            .iter()
            .enumerate()
            .map(|(pi, p)| {
                (0..q)
                    .map(|m| {
                        let zz = &z[1 + pi * stride + m];
                        let a = &p.a_nodes[m];
                        (0..n).map(|j| (0..n).map(|l| a[(j, l)] * zz[l]).sum()).collect()
                    })
                    .collect()
            })
            .collect();
        let mut out = vec![vec![C::new(0.0, 0.0); n]; z.len()];
        for j in 0..n {
            let delta = if j == k { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) };
            if self.forward(j, k) {
                let mut left = delta;
                out[0][j] = left;
                for (pi, p) in self.panels.iter().enumerate() {
                    let w = &self.weights[&(j, k, p.h.to_bits())];
                    for i in 0..=q {
                        let s: C = (0..q).map(|m| w.fwd[i][m] * g[pi][m][j]).sum();
                        out[1 + pi * stride + i][j] = w.fwd_carry[i] * left + s;
                    }
                    left = out[1 + pi * stride + q][j];
                }
            } else {
                let mut right = C::new(0.0, 0.0);
                for (pi, p) in self.panels.iter().enumerate().rev() {
                    let w = &self.weights[&(j, k, p.h.to_bits())];
                    out[1 + pi * stride + q][j] = right;
                    for i in 0..q {
                        let s: C = (0..q).map(|m| w.bwd[i][m] * g[pi][m][j]).sum();
                        out[1 + pi * stride + i][j] = w.bwd_carry[i] * right + s;
                    }
                    let s: C = (0..q).map(|m| w.bwd[q][m] * g[pi][m][j]).sum();
                    right = w.bwd_carry[q] * right + s;
                }
                out[0][j] = right;
            }
        }
        out
    }
}

fn sup_diff(a: &[Vec<C>], b: &[Vec<C>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).norm()))
        .fold(0.0, f64::max)
}

fn sup(a: &[Vec<C>]) -> f64 {
    a.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Largest relative mismatch between the columns of `T z(x) exp(rho B x)`,
/// `T = diag(rho^j) Omega`, and their direct propagation across blocks of
/// `stride` grid cells.
pub fn direct_mismatch(
    f: &AssociatedMatrix,
    frame: &SectorFrame,
    sol: &BirkhoffSolution,
    stride: usize,
    settings: &IntegrationSettings,
) -> Result<f64> {
    let n = frame.n;
    let rho = sol.rho;
    let stride = stride.max(1);
    let d = CMatrix::from_fn(n, n, |i, j| if i == j { rho.powu(i as u32) } else { C::new(0.0, 0.0) });
    let t = &d * &frame.omega;
    let stops: Vec<f64> = sol.grid.iter().copied().step_by(stride).collect();
    let mut props = Vec::new();
    let mut cur = CMatrix::identity(n, n);
    let mut next = 1;
    for_each_step(f, rho.powu(n as u32), &stops, settings, |_, x1, p| {
        cur = p * &cur;
        if next < stops.len() && (stops[next] - x1).abs() < 1e-14 {
            props.push(std::mem::replace(&mut cur, CMatrix::identity(n, n)));
            next += 1;
        }
        Ok(())
    })?;
    let mut worst = 0.0f64;
    for (i, p) in props.iter().enumerate() {
        let (a, b) = (i * stride, (i + 1) * stride);
        let h = sol.grid[b] - sol.grid[a];
        for (k, om) in frame.omegas.iter().enumerate() {
            let ya = &t * sol.z[a].column(k);
            let yb = &t * sol.z[b].column(k) * (rho * om * h).exp();
            let err = (p * &ya - &yb).iter().map(|c| c.norm()).fold(0.0, f64::max);
            let scale = ya.iter().chain(yb.iter()).map(|c| c.norm()).fold(0.0, f64::max);
            worst = worst.max(err / scale);
        }
    }
    Ok(worst)
}

/// Solves the integral equations for `z` by fixed-point iteration.
pub fn birkhoff_fss(sys: &ConjugatedSystem, rho: C, settings: &BirkhoffSettings) -> Result<BirkhoffSolution> {
    if rho.norm() == 0.0 {
        return Err(Error::validation("rho", "rho must be nonzero"));
    }
    let n = sys.n();
    let disc = Discretization::new(sys, rho, settings);
    let grid = disc.grid();
    let mut columns = Vec::with_capacity(n);
    let mut iterations = 0;
    for k in 0..n {
        let mut z: Vec<Vec<C>> = grid
            .iter()
            .map(|_| (0..n).map(|j| if j == k { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) }).collect())
            .collect();
        let mut prev_change = f64::INFINITY;
        let mut growth = 0;
        let mut converged = false;
        for it in 1..=settings.max_iter {
            let mut next = disc.apply(k, &z);
            if settings.damping != 1.0 {
                for (nx, old) in next.iter_mut().zip(&z) {
                    for (a, b) in nx.iter_mut().zip(old) {
                        *a = *b + (*a - *b) * settings.damping;
                    }
                }
            }
            let change = sup_diff(&next, &z) / sup(&next).max(1.0);
            z = next;
            iterations = iterations.max(it);
            if !change.is_finite() || change > 1e8 {
                growth = usize::MAX;
                break;
            }
            if change <= settings.tol {
                converged = true;
                break;
            }
            if change >= prev_change {
                growth += 1;
                if growth >= 3 {
                    break;
                }
            }
            prev_change = change;
        }
        if !converged {
            return Err(Error::NonContraction {
                rho_abs: rho.norm(),
                message: if growth > 0 {
                    "iteration diverges; increase |rho| beyond rho*".into()
                } else {
                    format!("no convergence in {} iterations; increase |rho|", settings.max_iter)
                },
            });
        }
        columns.push(z);
    }
    let z = (0..grid.len())
        .map(|i| CMatrix::from_fn(n, n, |j, k| columns[k][i][j]))
        .collect();
    Ok(BirkhoffSolution {
        rho,
        grid,
        z,
        iterations,
        omegas: disc.omegas.clone(),
    })
}

/// Estimate of `max_k ||V_k^2||` from two applications to constant test vectors.
pub fn vk_squared_estimate(sys: &ConjugatedSystem, rho: C, settings: &BirkhoffSettings) -> f64 {
    let n = sys.n();
    let disc = Discretization::new(sys, rho, settings);
    let len = disc.grid().len();
    let mut worst = 0.0f64;
    for k in 0..n {
        let ones = vec![vec![C::new(1.0, 0.0); n]; len];
        let zero = vec![vec![C::new(0.0, 0.0); n]; len];
        // V_k y = (z_k^0 + V_k y) - z_k^0
        let base = disc.apply(k, &zero);
        let lin = |y: &[Vec<C>]| -> Vec<Vec<C>> {
            disc.apply(k, y)
                .into_iter()
                .zip(&base)
                .map(|(a, b)| a.iter().zip(b).map(|(u, v)| u - v).collect())
                .collect()
        };
        let twice = lin(&lin(&ones));
        worst = worst.max(sup(&twice));
    }
    worst
}

/// Doubles `|rho|` along the sector bisector from 1 until the `V_k^2` estimate drops below 1/2.
pub fn choose_rho_star(sys: &ConjugatedSystem, settings: &BirkhoffSettings) -> Result<f64> {
    let dir = sys.frame.midpoint_direction();
    let mut t = 1.0;
    for _ in 0..20 {
        if vk_squared_estimate(sys, dir * t, settings) < 0.5 {
            return Ok(t);
        }
        t *= 2.0;
    }
    Err(Error::NonContraction {
        rho_abs: t,
        message: "V_k^2 estimate stays above 1/2".into(),
    })
}
