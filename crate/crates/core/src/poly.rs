//! Complex piecewise polynomials on `[0, 1]`.
//!
//! Coefficients of the differential expression are stored in this form. The
//! algebra is closed under sums and products, definite integrals are exact,
//! and integrals against `exp(alpha t)` are evaluated in closed form or by a
//! Gauss rule that is exact to rounding for the degrees involved.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;

type C = Complex64;

/// Declared integrability class of a coefficient.
///
/// Every piecewise polynomial is bounded, so the tag is metadata that mirrors
/// the class the caller promises for the modelled coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassTag {
    L1,
    L2,
}

/// A complex piecewise polynomial on `[0, 1]`.
///
/// Piece `i` lives on `[breaks[i], breaks[i + 1])` (the last piece is closed)
/// and stores monomial coefficients in the global variable `x`.
#[derive(Clone, PartialEq)]
pub struct CoefficientFunction {
    breaks: Vec<f64>,
    pieces: Vec<Vec<C>>,
    class: ClassTag,
}

impl fmt::Debug for CoefficientFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.constant_value() {
            return write!(f, "Const({c})");
        }
        f.debug_struct("CoefficientFunction")
            .field("breaks", &self.breaks)
            .field("pieces", &self.pieces)
            .field("class", &self.class)
            .finish()
    }
}

impl Default for CoefficientFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl CoefficientFunction {
    pub fn zero() -> Self {
        Self::constant(C::new(0.0, 0.0))
    }

    pub fn constant(c: C) -> Self {
        Self {
            breaks: vec![0.0, 1.0],
            pieces: vec![vec![c]],
            class: ClassTag::L2,
        }
    }

    pub fn real(c: f64) -> Self {
        Self::constant(C::new(c, 0.0))
    }

    /// Single polynomial `sum_k coeffs[k] x^k` on the whole interval.
    pub fn polynomial(coeffs: Vec<C>) -> Self {
        let mut f = Self {
            breaks: vec![0.0, 1.0],
            pieces: vec![coeffs],
            class: ClassTag::L2,
        };
        f.trim();
        f
    }

    /// Builds a piecewise polynomial, validating the partition.
    pub fn piecewise(breaks: Vec<f64>, pieces: Vec<Vec<C>>, class: ClassTag) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(Error::validation("breakpoints", "need at least two breakpoints"));
        }
        if breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
            return Err(Error::validation("breakpoints", "first must be 0 and last must be 1"));
        }
        if let Some(i) = breaks.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::validation(
                format!("breakpoints[{}]", i + 1),
                "breakpoints must be strictly increasing",
            ));
        }
        if pieces.len() + 1 != breaks.len() {
            return Err(Error::validation(
                "coeffs",
                format!("expected {} pieces, got {}", breaks.len() - 1, pieces.len()),
            ));
        }
        if let Some(i) = pieces
            .iter()
            .position(|p| p.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()))
        {
            return Err(Error::validation(format!("coeffs[{i}]"), "non-finite coefficient"));
        }
        let mut f = Self {
            breaks,
            pieces,
            class,
        };
        f.trim();
        Ok(f)
    }

    pub fn with_class(mut self, class: ClassTag) -> Self {
        self.class = class;
        self
    }

    pub fn class(&self) -> ClassTag {
        self.class
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Vec<C>] {
        &self.pieces
    }

    /// Largest polynomial degree over all pieces (0 for constants and zero).
    pub fn degree(&self) -> usize {
        self.pieces
            .iter()
            .map(|p| p.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    /// The value if the function is one constant on all of `[0, 1]`.
    pub fn constant_value(&self) -> Option<C> {
        let first = self.pieces.first()?.first().copied().unwrap_or_default();
        let all_same = self
            .pieces
            .iter()
            .all(|p| p.len() <= 1 && p.first().copied().unwrap_or_default() == first);
        all_same.then_some(first)
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.iter().all(|c| *c == C::new(0.0, 0.0)))
    }

    fn piece_index(&self, x: f64) -> usize {
        let i = self.breaks.partition_point(|&b| b <= x);
        i.saturating_sub(1).min(self.pieces.len() - 1)
    }

    pub fn eval(&self, x: f64) -> C {
        horner(&self.pieces[self.piece_index(x)], C::new(x, 0.0))
    }

    /// Degree of the piece that contains `x`.
    pub fn local_degree(&self, x: f64) -> usize {
        self.pieces[self.piece_index(x)].len().saturating_sub(1)
    }

    /// Exact definite integral over `[a, b]` (sign-reversed if `b < a`).
    pub fn integral(&self, a: f64, b: f64) -> C {
        if b < a {
            return -self.integral(b, a);
        }
        let mut total = C::new(0.0, 0.0);
        for (i, p) in self.pieces.iter().enumerate() {
            let lo = self.breaks[i].max(a);
            let hi = self.breaks[i + 1].min(b);
            if hi > lo {
                total += poly_antideriv_at(p, hi) - poly_antideriv_at(p, lo);
            }
        }
        total
    }

    pub fn total_integral(&self) -> C {
        self.integral(0.0, 1.0)
    }

    /// Continuous primitive `x -> int_0^x f`.
    pub fn primitive(&self) -> Self {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut acc = C::new(0.0, 0.0);
        for (i, p) in self.pieces.iter().enumerate() {
            let mut q = vec![C::new(0.0, 0.0); p.len() + 1];
            for (k, c) in p.iter().enumerate() {
                q[k + 1] = c / (k as f64 + 1.0);
            }
            let a = self.breaks[i];
            q[0] = acc - horner(&q, C::new(a, 0.0));
            acc = horner(&q, C::new(self.breaks[i + 1], 0.0));
            pieces.push(q);
        }
        let mut out = Self {
            breaks: self.breaks.clone(),
            pieces,
            class: ClassTag::L2,
        };
        out.trim();
        out
    }

    /// `int_a^b f(t) exp(alpha t) dt`, exact up to rounding.
    pub fn integrate_times_exp(&self, a: f64, b: f64, alpha: C) -> C {
        self.integrate_times_exp_about(a, b, alpha, 0.0)
    }

    /// `int_a^b f(t) exp(alpha (t - t0)) dt`; keeps the exponent small when `t0` is near `[a, b]`.
    pub fn integrate_times_exp_about(&self, a: f64, b: f64, alpha: C, t0: f64) -> C {
        if b < a {
            return -self.integrate_times_exp_about(b, a, alpha, t0);
        }
        let mut total = C::new(0.0, 0.0);
        for (i, p) in self.pieces.iter().enumerate() {
            let lo = self.breaks[i].max(a);
            let hi = self.breaks[i + 1].min(b);
            if hi > lo {
                total += poly_exp_integral(p, lo, hi, alpha, t0);
            }
        }
        total
    }

    /// Multiplies by a complex scalar.
    pub fn scale(&self, s: C) -> Self {
        let mut out = self.clone();
        for p in &mut out.pieces {
            for c in p.iter_mut() {
                *c *= s;
            }
        }
        out.trim();
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C::new(s, 0.0))
    }

    /// Pieces of `self` on the given refinement of its partition.
    fn refined(&self, breaks: &[f64]) -> Vec<Vec<C>> {
        breaks
            .windows(2)
            .map(|w| self.pieces[self.piece_index(0.5 * (w[0] + w[1]))].clone())
            .collect()
    }

    /// Piecewise coefficient-wise comparison on the common refinement.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let breaks = merge_breaks(&self.breaks, &other.breaks);
        let a = self.refined(&breaks);
        let b = other.refined(&breaks);
        a.iter().zip(&b).all(|(p, q)| {
            let len = p.len().max(q.len());
            (0..len).all(|k| {
                let x = p.get(k).copied().unwrap_or_default();
                let y = q.get(k).copied().unwrap_or_default();
                (x - y).norm() <= tol * (1.0 + x.norm().max(y.norm()))
            })
        })
    }

    /// Exact coefficient equality on the common refinement.
    pub fn symbolic_eq(&self, other: &Self) -> bool {
        self.approx_eq(other, 0.0)
    }

    /// Largest coefficient magnitude, a cheap norm surrogate.
    pub fn coeff_norm(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| p.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    fn trim(&mut self) {
        for p in &mut self.pieces {
            while p.len() > 1 && *p.last().unwrap() == C::new(0.0, 0.0) {
                p.pop();
            }
            if p.is_empty() {
                p.push(C::new(0.0, 0.0));
            }
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&[C], &[C]) -> Vec<C>, class: ClassTag) -> Self {
        let breaks = merge_breaks(&self.breaks, &other.breaks);
        let a = self.refined(&breaks);
        let b = other.refined(&breaks);
        let pieces = a.iter().zip(&b).map(|(p, q)| f(p, q)).collect();
        let mut out = Self {
            breaks,
            pieces,
            class,
        };
        out.trim();
        out
    }
}

fn merge_breaks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().chain(b).copied().collect();
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.dedup();
    out
}

fn horner(p: &[C], x: C) -> C {
    p.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * x + c)
}

fn poly_antideriv_at(p: &[C], x: f64) -> C {
    let mut acc = C::new(0.0, 0.0);
    for (k, c) in p.iter().enumerate().rev() {
        acc = acc * x + c / (k as f64 + 1.0);
    }
    acc * x
}

fn poly_exp_integral(p: &[C], a: f64, b: f64, alpha: C, t0: f64) -> C {
    let len = b - a;
    let deg = p.len().saturating_sub(1);
    if (alpha * len).norm() <= 2.0 + deg as f64 {
        // Analytic integrand with moderate variation: 20 Gauss nodes are exact to rounding.
        let (x, w) = quad::gl20();
        let half = 0.5 * len;
        let mid = 0.5 * (a + b);
        let mut s = C::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(w) {
            let t = mid + half * xi;
            s += horner(p, C::new(t, 0.0)) * (alpha * (t - t0)).exp() * *wi;
        }
        return s * half;
    }
    // Repeated integration by parts: e^{at} sum_k (-1)^k p^{(k)}(t) / a^{k+1}.
    let eval = |t: f64| -> C {
        let mut deriv: Vec<C> = p.to_vec();
        let mut sum = C::new(0.0, 0.0);
        let mut sign = 1.0;
        let mut apow = alpha;
        while !deriv.is_empty() {
            sum += horner(&deriv, C::new(t, 0.0)) * sign / apow;
            deriv = deriv
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect();
            sign = -sign;
            apow *= alpha;
        }
        sum * (alpha * (t - t0)).exp()
    };
    eval(b) - eval(a)
}

fn add_coeffs(p: &[C], q: &[C]) -> Vec<C> {
    let len = p.len().max(q.len());
    (0..len)
        .map(|k| p.get(k).copied().unwrap_or_default() + q.get(k).copied().unwrap_or_default())
        .collect()
}

fn mul_coeffs(p: &[C], q: &[C]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn sum_class(a: &CoefficientFunction, b: &CoefficientFunction) -> ClassTag {
    a.class.min(b.class)
}

fn product_class(a: &CoefficientFunction, b: &CoefficientFunction) -> ClassTag {
    match (a.constant_value().is_some(), b.constant_value().is_some()) {
        (true, true) => ClassTag::L2,
        (true, false) => b.class,
        (false, true) => a.class,
        // L2 * L2 lands in L1; anything with an L1 factor is not controlled.
        (false, false) => ClassTag::L1,
    }
}

impl Add for &CoefficientFunction {
    type Output = CoefficientFunction;
    fn add(self, rhs: Self) -> CoefficientFunction {
        self.zip_with(rhs, add_coeffs, sum_class(self, rhs))
    }
}

impl Sub for &CoefficientFunction {
    type Output = CoefficientFunction;
    fn sub(self, rhs: Self) -> CoefficientFunction {
        self + &(-rhs)
    }
}

impl Neg for &CoefficientFunction {
    type Output = CoefficientFunction;
    fn neg(self) -> CoefficientFunction {
        self.scale(C::new(-1.0, 0.0))
    }
}

impl Mul for &CoefficientFunction {
    type Output = CoefficientFunction;
    fn mul(self, rhs: Self) -> CoefficientFunction {
        self.zip_with(rhs, mul_coeffs, product_class(self, rhs))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CoefficientFunction {
            type Output = CoefficientFunction;
            fn $m(self, rhs: Self) -> CoefficientFunction {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
