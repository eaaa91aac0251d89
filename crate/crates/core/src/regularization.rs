//! Regularization of the differential expression with distribution coefficients.
//!
//! The expression of order `n = 2m + tau` is encoded by an associated matrix
//! `F(x)` built from the primitives `sigma_nu` themselves, never from their
//! distributional derivatives. Quasi-derivatives defined through `F` turn the
//! equation `l(y) = lambda y` into the first-order system
//! `Y' = (F(x) + Lambda) Y` with `Lambda` carrying `lambda` at `(n, 1)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::asymptotics::sector::{companion, SectorFrame};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, MatrixFunction, C};
use crate::poly::{ClassTag, CoefficientFunction};

/// Order data, derivative indices and coefficients of the expression.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionSpec {
    n: usize,
    indices: Vec<usize>,
    coefficients: Vec<CoefficientFunction>,
}

impl ExpressionSpec {
    pub fn new(n: usize, indices: Vec<usize>, coefficients: Vec<CoefficientFunction>) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation("order.n", "order must be at least 2"));
        }
        if indices.len() != n - 1 {
            return Err(Error::validation(
                "indices",
                format!("expected {} indices, got {}", n - 1, indices.len()),
            ));
        }
        if coefficients.len() != n - 1 {
            return Err(Error::validation(
                "coefficients",
                format!("expected {} coefficients, got {}", n - 1, coefficients.len()),
            ));
        }
        let m = n / 2;
        for (nu, &i) in indices.iter().enumerate() {
            let bound = index_bound(nu, m);
            if i > bound {
                return Err(Error::validation(
                    format!("indices[{nu}]"),
                    format!("i_{nu} = {i} exceeds m - k - j = {bound}"),
                ));
            }
            if n.is_multiple_of(2) && i == bound && coefficients[nu].class() != ClassTag::L2 {
                return Err(Error::ClassTag {
                    field: format!("coefficients[{nu}]"),
                    message: format!("sigma_{nu} must be L2 when n is even and i_{nu} = {bound}"),
                });
            }
        }
        Ok(Self {
            n,
            indices,
            coefficients,
        })
    }

    /// All coefficients identically zero.
    pub fn zero(n: usize, indices: Vec<usize>) -> Result<Self> {
        Self::new(n, indices, vec![CoefficientFunction::zero(); n.saturating_sub(1)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.n / 2
    }

    pub fn tau(&self) -> usize {
        self.n % 2
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn coefficients(&self) -> &[CoefficientFunction] {
        &self.coefficients
    }

    /// Same order and indices with every coefficient zero.
    pub fn zeroed(&self) -> Self {
        Self {
            n: self.n,
            indices: self.indices.clone(),
            coefficients: vec![CoefficientFunction::zero(); self.n - 1],
        }
    }
}

/// `m - k - j` for `nu = 2k + j`.
fn index_bound(nu: usize, m: usize) -> usize {
    let (k, j) = (nu / 2, nu % 2);
    m.saturating_sub(k + j)
}

/// Integer `(m + 1) x (m + 1)` pattern placing `sigma_nu` into `Q`.
pub type ChiMatrix = Vec<Vec<i64>>;

fn binom(i: i64, s: i64) -> i64 {
    if s < 0 || s > i || i < 0 {
        return 0;
    }
    let mut r = 1i64;
    for t in 0..s {
        r = r * (i - t) / (t + 1);
    }
    r
}

/// Binomial pattern of `sigma_nu` with derivative index `i` in `Q`.
pub fn chi_matrix(nu: usize, i: usize, m: usize) -> Result<Arc<ChiMatrix>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, usize), Arc<ChiMatrix>>>> = OnceLock::new();
    if m == 0 {
        return Err(Error::validation("m", "half-order must be at least 1"));
    }
    if nu > 2 * m - 1 {
        return Err(Error::validation("nu", format!("nu = {nu} exceeds 2m - 1 = {}", 2 * m - 1)));
    }
    let bound = index_bound(nu, m);
    if i > bound {
        return Err(Error::validation(
            "i",
            format!("i = {i} exceeds m - k - j = {bound} for nu = {nu}"),
        ));
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&(nu, i, m)) {
        return Ok(hit.clone());
    }
    let mut chi = vec![vec![0i64; m + 1]; m + 1];
    let k = nu / 2;
    let ii = i as i64;
    if nu.is_multiple_of(2) {
        for s in 0..=i {
            chi[s + k][i - s + k] = binom(ii, s as i64);
        }
    } else {
        for s in 0..=i + 1 {
            let si = s as i64;
            chi[s + k][i + 1 - s + k] = binom(ii + 1, si) - 2 * binom(ii, si - 1);
        }
    }
    let chi = Arc::new(chi);
    cache.lock().unwrap().insert((nu, i, m), chi.clone());
    Ok(chi)
}

/// The associated matrix `F(x)` of an expression or of a raw system.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociatedMatrix {
    f: MatrixFunction,
}

impl AssociatedMatrix {
    /// Wraps an arbitrary matrix function after checking the companion shape,
    /// `L2` diagonal and zero trace.
    pub fn from_raw(f: MatrixFunction) -> Result<Self> {
        let n = f.dim();
        if n < 2 {
            return Err(Error::validation("raw_matrix", "order must be at least 2"));
        }
        let one = CoefficientFunction::real(1.0);
        for k in 0..n {
            for j in k + 1..n {
                let e = f.get(k, j);
                let ok = if j == k + 1 { e.symbolic_eq(&one) } else { e.is_zero() };
                if !ok {
                    return Err(Error::validation(
                        format!("raw_matrix.entries[{k}][{j}]"),
                        if j == k + 1 {
                            "superdiagonal entries must be the constant 1"
                        } else {
                            "entries above the superdiagonal must vanish"
                        },
                    ));
                }
            }
            if f.get(k, k).class() != ClassTag::L2 {
                return Err(Error::ClassTag {
                    field: format!("raw_matrix.entries[{k}][{k}]"),
                    message: "diagonal entries must be L2".into(),
                });
            }
        }
        let tr = f.trace();
        let scale = (0..n).map(|k| f.get(k, k).coeff_norm()).fold(1.0, f64::max);
        if tr.coeff_norm() > 1e-13 * scale {
            return Err(Error::validation("raw_matrix", "trace of F must vanish identically"));
        }
        Ok(Self { f })
    }

    pub fn n(&self) -> usize {
        self.f.dim()
    }

    pub fn matrix(&self) -> &MatrixFunction {
        &self.f
    }

    /// Zero-based entry `f_{row+1, col+1}`.
    pub fn entry(&self, row: usize, col: usize) -> &CoefficientFunction {
        self.f.get(row, col)
    }

    pub fn eval(&self, x: f64) -> CMatrix {
        self.f.eval(x)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.f.breakpoints()
    }

    /// Companion form of `y^(n) = lambda y`.
    pub fn zero(n: usize) -> Self {
        let mut f = MatrixFunction::zeros(n);
        for k in 0..n - 1 {
            f.set(k, k + 1, CoefficientFunction::real(1.0));
        }
        Self { f }
    }

    /// True when every lower-triangular entry vanishes.
    pub fn is_companion(&self) -> bool {
        let n = self.n();
        (0..n).all(|k| (0..=k).all(|j| self.f.get(k, j).is_zero()))
    }
}

/// Builds `F` from `Q = sum_nu sigma_nu chi_{nu, i_nu}`.
pub fn build_associated_matrix(spec: &ExpressionSpec) -> Result<AssociatedMatrix> {
    let n = spec.n;
    let m = spec.m();
    let mut q = vec![vec![CoefficientFunction::zero(); m + 1]; m + 1];
    for (nu, (sigma, &i)) in spec.coefficients.iter().zip(&spec.indices).enumerate() {
        if sigma.is_zero() {
            continue;
        }
        let chi = chi_matrix(nu, i, m)?;
        for (xi, row) in chi.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0 {
                    q[xi][j] = &q[xi][j] + &sigma.scale_real(c as f64);
                }
            }
        }
    }
    let sign = |e: usize| if e.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut f = AssociatedMatrix::zero(n).f;
    if n.is_multiple_of(2) {
        // Rows and columns are one-based in the formulas below.
        for j in 1..=m {
            f.set(m - 1, j - 1, q[j - 1][m].scale_real(sign(m + 1)));
        }
        for k in m + 1..=2 * m {
            f.set(k - 1, m, q[m][2 * m - k].scale_real(sign(k + 1)));
        }
        for k in m + 1..=2 * m {
            for j in 1..=m {
                let a = &q[j - 1][m];
                let b = &q[m][2 * m - k];
                let mut entry = q[j - 1][2 * m - k].scale_real(sign(k + 1));
                if !a.is_zero() && !b.is_zero() {
                    for (factor, field) in [(a, (j - 1, m)), (b, (m, 2 * m - k))] {
                        if factor.class() != ClassTag::L2 {
                            return Err(Error::ClassTag {
                                field: format!("Q[{}][{}]", field.0, field.1),
                                message: "quadratic term needs both factors in L2".into(),
                            });
                        }
                    }
                    entry = &entry + &(a * b).scale_real(sign(m + k));
                }
                f.set(k - 1, j - 1, entry);
            }
        }
    } else {
        for k in m + 1..=2 * m + 1 {
            for j in 1..=m + 1 {
                f.set(k - 1, j - 1, q[j - 1][2 * m + 1 - k].scale_real(sign(k)));
            }
        }
    }
    Ok(AssociatedMatrix { f })
}

/// `F_{-1}` and the lower diagonals `F_0, ..., F_{n-1}` of `F`.
#[derive(Debug, Clone)]
pub struct DiagonalSplit {
    pub minus_one: CMatrix,
    pub parts: Vec<MatrixFunction>,
}

impl DiagonalSplit {
    pub fn n(&self) -> usize {
        self.parts.len()
    }

    /// Reassembles `F` from the superdiagonal of `F_{-1}` and the diagonals.
    pub fn reconstruct(&self) -> MatrixFunction {
        let n = self.n();
        let mut f = self
            .parts
            .iter()
            .fold(MatrixFunction::zeros(n), |acc, p| acc.add(p));
        for k in 0..n - 1 {
            f.set(k, k + 1, CoefficientFunction::constant(self.minus_one[(k, k + 1)]));
        }
        f
    }
}

pub fn diagonal_split(f: &AssociatedMatrix) -> DiagonalSplit {
    let n = f.n();
    DiagonalSplit {
        minus_one: companion(n),
        parts: (0..n).map(|k| f.f.diagonal_part(k)).collect(),
    }
}

/// The system after the change of variables `w = Omega^{-1} u`.
#[derive(Debug, Clone)]
pub struct ConjugatedSystem {
    pub frame: SectorFrame,
    /// `A_k = Omega^{-1} F_k Omega`, `k = 0..n-1`.
    pub a: Vec<MatrixFunction>,
}

impl ConjugatedSystem {
    pub fn n(&self) -> usize {
        self.frame.n
    }

    /// `A(x, rho) = A_0(x) + sum_k rho^{-k} A_k(x)`.
    pub fn a_at(&self, x: f64, rho: C) -> CMatrix {
        let n = self.n();
        let mut out = CMatrix::zeros(n, n);
        let mut p = C::new(1.0, 0.0);
        let inv = rho.inv();
        for ak in &self.a {
            if !ak.is_zero() {
                out += ak.eval(x) * p;
            }
            p *= inv;
        }
        out
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.a.iter().flat_map(|m| m.breakpoints()).collect();
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.dedup();
        b
    }
}

pub fn conjugate_system(split: &DiagonalSplit, frame: &SectorFrame) -> Result<ConjugatedSystem> {
    let n = split.n();
    if frame.n != n {
        return Err(Error::validation("sector_frame", "order mismatch"));
    }
    let b = &frame.omega_inv * &split.minus_one * &frame.omega;
    let off = crate::matrix::max_norm(&(b - frame.b_matrix()));
    if off > 1e-12 {
        return Err(Error::Consistency(format!("Omega^-1 F_-1 Omega differs from B by {off:e}")));
    }
    let a: Vec<MatrixFunction> = split
        .parts
        .iter()
        .map(|p| p.conjugate(&frame.omega_inv, &frame.omega))
        .collect();
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| split.parts[0].get(i, j).coeff_norm())
        .fold(1.0, f64::max);
    for i in 0..n {
        let d = a[0].get(i, i).coeff_norm();
        if d > 1e-12 * scale {
            return Err(Error::Consistency(format!("diag(A_0) entry {i} has size {d:e}")));
        }
    }
    Ok(ConjugatedSystem {
        frame: frame.clone(),
        a,
    })
}

/// Coefficient of `sigma_nu` in the sum along its diagonal of `F`.
///
/// Vanishes for `i_nu > 0`. The sign for odd `nu` follows the entries of `F`
/// produced by [`build_associated_matrix`].
pub fn s_coefficient(nu: usize, i_nu: usize) -> i64 {
    let k = nu / 2;
    let alt = |i: usize| -> i64 { (0..=i).map(|s| if s % 2 == 0 { binom(i as i64, s as i64) } else { -binom(i as i64, s as i64) }).sum() };
    if nu.is_multiple_of(2) {
        let sign = if (k + 1).is_multiple_of(2) { 1 } else { -1 };
        sign * alt(i_nu)
    } else {
        let sign = if k.is_multiple_of(2) { 1 } else { -1 };
        sign * (alt(i_nu + 1) + 2 * alt(i_nu))
    }
}

fn check_pair(a: &ExpressionSpec, b: &ExpressionSpec) -> Result<()> {
    if a.n != b.n {
        return Err(Error::validation("order.n", "paired expressions must share n"));
    }
    if a.indices != b.indices {
        return Err(Error::validation("indices", "paired expressions must share (i_nu)"));
    }
    Ok(())
}

/// `diag(A_hat_d)` from the entry-wise difference of the two associated matrices.
pub fn diag_correction(
    a: &ExpressionSpec,
    b: &ExpressionSpec,
    d: usize,
    frame: &SectorFrame,
) -> Result<Vec<CoefficientFunction>> {
    check_pair(a, b)?;
    let n = a.n;
    if d >= n {
        return Err(Error::validation("d", format!("d = {d} must be below n = {n}")));
    }
    let fa = build_associated_matrix(a)?;
    let fb = build_associated_matrix(b)?;
    let diff = fa.f.sub(&fb.f);
    let sum = (0..n - d).fold(CoefficientFunction::zero(), |acc, j| &acc + diff.get(j + d, j));
    Ok(diag_from_sum(&sum, d, frame))
}

/// The same combination assembled from `S_nu` and `sigma_hat_nu`, `nu` in `nus`.
pub fn diag_correction_via_s(
    a: &ExpressionSpec,
    b: &ExpressionSpec,
    d: usize,
    nus: &[usize],
    frame: &SectorFrame,
) -> Result<Vec<CoefficientFunction>> {
    check_pair(a, b)?;
    let sum = nus.iter().fold(CoefficientFunction::zero(), |acc, &nu| {
        let hat = &a.coefficients[nu] - &b.coefficients[nu];
        &acc + &hat.scale_real(s_coefficient(nu, a.indices[nu]) as f64)
    });
    Ok(diag_from_sum(&sum, d, frame))
}

fn diag_from_sum(sum: &CoefficientFunction, d: usize, frame: &SectorFrame) -> Vec<CoefficientFunction> {
    let n = frame.n as f64;
    frame
        .omegas
        .iter()
        .map(|w| sum.scale(w.powi(-(d as i32)) / n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::sector::sector_frame;
    use crate::matrix::max_norm;

    fn r(c: f64) -> CoefficientFunction {
        CoefficientFunction::real(c)
    }

    #[test]
    fn chi_examples() {
        let c = chi_matrix(0, 0, 1).unwrap();
        assert_eq!(*c, vec![vec![1, 0], vec![0, 0]]);
        let c = chi_matrix(1, 0, 1).unwrap();
        assert_eq!(*c, vec![vec![0, 1], vec![-1, 0]]);
        let c = chi_matrix(2, 1, 2).unwrap();
        let mut want = vec![vec![0; 3]; 3];
        want[1][2] = 1;
        want[2][1] = 1;
        assert_eq!(*c, want);
    }

    #[test]
    fn chi_rejects_out_of_range() {
        assert!(matches!(chi_matrix(1, 1, 1), Err(Error::Validation { field, .. }) if field == "i"));
        assert!(matches!(chi_matrix(4, 0, 2), Err(Error::Validation { field, .. }) if field == "nu"));
    }

    #[test]
    fn index_bounds_are_enforced() {
        let e = ExpressionSpec::new(3, vec![2, 0], vec![r(0.0), r(0.0)]);
        assert!(matches!(e, Err(Error::Validation { field, .. }) if field == "indices[0]"));
        let l1 = r(1.0).with_class(ClassTag::L1);
        let e = ExpressionSpec::new(4, vec![2, 0, 0], vec![l1.clone(), r(0.0), r(0.0)]);
        assert!(matches!(e, Err(Error::ClassTag { field, .. }) if field == "coefficients[0]"));
        // odd order never needs L2
        assert!(ExpressionSpec::new(3, vec![1, 0], vec![l1.clone(), l1]).is_ok());
    }

    #[test]
    fn zero_coefficients_give_companion() {
        for n in 2..=7 {
            let spec = ExpressionSpec::zero(n, vec![0; n - 1]).unwrap();
            let f = build_associated_matrix(&spec).unwrap();
            assert!(f.is_companion());
            let split = diagonal_split(&f);
            assert!(split.parts.iter().all(MatrixFunction::is_zero));
        }
    }

    #[test]
    fn third_order_split_and_conjugation() {
        let s0 = CoefficientFunction::polynomial(vec![C::new(0.3, 0.0), C::new(1.0, 0.0)]);
        let s1 = r(1.0);
        let spec = ExpressionSpec::new(3, vec![1, 0], vec![s0.clone(), s1.clone()]).unwrap();
        let f = build_associated_matrix(&spec).unwrap();
        let split = diagonal_split(&f);
        assert!(split.parts[0].is_zero());
        assert!(split.parts[1].get(1, 0).symbolic_eq(&(&s0 + &s1)));
        assert!(split.parts[1].get(2, 1).symbolic_eq(&-&(&s0 - &s1)));
        let frame = sector_frame(3, 1).unwrap();
        let sys = conjugate_system(&split, &frame).unwrap();
        for (i, w) in frame.omegas.iter().enumerate() {
            let want = s1.scale(w.inv() * (2.0 / 3.0));
            assert!(sys.a[1].get(i, i).approx_eq(&want, 1e-14));
        }
    }

    #[test]
    fn conjugated_zero_parts_vanish() {
        let f = AssociatedMatrix::zero(4);
        let frame = sector_frame(4, 3).unwrap();
        let sys = conjugate_system(&diagonal_split(&f), &frame).unwrap();
        assert!(sys.a.iter().all(MatrixFunction::is_zero));
        assert!(max_norm(&sys.a_at(0.3, C::new(5.0, 1.0))) == 0.0);
    }

    #[test]
    fn s_coefficients() {
        for k in 0..3 {
            let sgn = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(s_coefficient(2 * k, 0), -sgn);
            assert_eq!(s_coefficient(2 * k + 1, 0), 2 * sgn);
            for i in 1..3 {
                assert_eq!(s_coefficient(2 * k, i), 0);
                assert_eq!(s_coefficient(2 * k + 1, i), 0);
            }
        }
    }

    #[test]
    fn raw_matrix_validation() {
        let mut f = AssociatedMatrix::zero(3).matrix().clone();
        f.set(1, 1, r(2.0));
        f.set(2, 2, r(-2.0));
        assert!(AssociatedMatrix::from_raw(f.clone()).is_ok());
        f.set(2, 2, r(-1.0));
        assert!(AssociatedMatrix::from_raw(f.clone()).is_err());
        f.set(2, 2, r(-2.0));
        f.set(0, 2, r(1.0));
        assert!(matches!(
            AssociatedMatrix::from_raw(f),
            Err(Error::Validation { field, .. }) if field == "raw_matrix.entries[0][2]"
        ));
    }

    #[test]
    fn diag_correction_identical_specs_vanish() {
        let spec = ExpressionSpec::new(4, vec![0, 0, 0], vec![r(1.0), r(2.0), r(3.0)]).unwrap();
        let frame = sector_frame(4, 1).unwrap();
        let d = diag_correction(&spec, &spec, 2, &frame).unwrap();
        assert!(d.iter().all(CoefficientFunction::is_zero));
        let other = ExpressionSpec::new(5, vec![0; 4], vec![r(0.0); 4]).unwrap();
        assert!(diag_correction(&spec, &other, 1, &frame).is_err());
    }

    fn lin(a: f64, b: f64) -> CoefficientFunction {
        CoefficientFunction::polynomial(vec![C::new(a, 0.0), C::new(b, 0.0)])
    }

    fn assert_rows(f: &AssociatedMatrix, rows: &[(usize, Vec<CoefficientFunction>)]) {
        for (k, row) in rows {
            for (j, want) in row.iter().enumerate() {
                assert!(f.entry(*k, j).symbolic_eq(want), "entry ({k},{j}): {:?} vs {:?}", f.entry(*k, j), want);
            }
        }
    }

    #[test]
    fn golden_third_order() {
        let (s0, s1) = (lin(0.5, 2.0), lin(-1.0, 0.25));
        let spec = ExpressionSpec::new(3, vec![1, 0], vec![s0.clone(), s1.clone()]).unwrap();
        let f = build_associated_matrix(&spec).unwrap();
        let z = CoefficientFunction::zero;
        assert_rows(
            &f,
            &[
                (0, vec![z(), r(1.0), z()]),
                (1, vec![&s0 + &s1, z(), r(1.0)]),
                (2, vec![z(), -&(&s0 - &s1), z()]),
            ],
        );
    }

    #[test]
    fn golden_sixth_order() {
        let s: Vec<_> = (0..5).map(|k| lin(k as f64 + 1.0, 0.5 - k as f64)).collect();
        let spec = ExpressionSpec::new(6, vec![0; 5], s.clone()).unwrap();
        let f = build_associated_matrix(&spec).unwrap();
        let z = CoefficientFunction::zero;
        assert_rows(
            &f,
            &[
                (3, vec![z(), -&s[3], -&s[4], z(), r(1.0), z()]),
                (4, vec![s[1].clone(), s[2].clone(), -&s[3], z(), z(), r(1.0)]),
                (5, vec![-&s[0], s[1].clone(), z(), z(), z(), z()]),
            ],
        );
    }

    #[test]
    fn golden_fourth_order_with_quadratic_terms() {
        let (s0, s1, s2) = (lin(1.0, 1.0), lin(-0.5, 2.0), lin(0.25, -1.0));
        let spec = ExpressionSpec::new(4, vec![1, 1, 1], vec![s0.clone(), s1.clone(), s2.clone()]).unwrap();
        let f = build_associated_matrix(&spec).unwrap();
        let z = CoefficientFunction::zero;
        assert_rows(
            &f,
            &[
                (0, vec![z(), r(1.0), z(), z()]),
                (1, vec![-&s1, -&s2, r(1.0), z()]),
                (2, vec![&s0 - &(&s1 * &s2), -&(&s2 * &s2), s2.clone(), r(1.0)]),
                (3, vec![-&(&s1 * &s1), &(-&s0) - &(&s1 * &s2), s1.clone(), z()]),
            ],
        );
        let split = diagonal_split(&f);
        assert!(split.parts[0].get(1, 1).symbolic_eq(&-&s2));
        assert!(split.parts[0].get(2, 2).symbolic_eq(&s2));
        assert!(split.parts[0].trace().is_zero());
        let frame = sector_frame(4, 1).unwrap();
        assert!(conjugate_system(&split, &frame).is_ok());
    }

    #[test]
    fn fourth_order_pair_with_positive_indices_has_no_diagonal_correction() {
        let a = ExpressionSpec::new(4, vec![1, 1, 1], vec![lin(1.0, 1.0), lin(-0.5, 2.0), lin(0.25, -1.0)]).unwrap();
        let b = ExpressionSpec::new(4, vec![1, 1, 1], vec![lin(2.0, 0.0), lin(-0.5, 2.0), lin(0.25, -1.0)]).unwrap();
        let frame = sector_frame(4, 1).unwrap();
        let via_s = diag_correction_via_s(&a, &b, 2, &[0], &frame).unwrap();
        assert!(via_s.iter().all(CoefficientFunction::is_zero));
    }

    #[test]
    fn s_combination_matches_entrywise_difference() {
        // Pairs differing only in sigma_nu, i = 0 throughout.
        for n in 3..=7 {
            for nu in 0..n - 1 {
                let mut sa = vec![CoefficientFunction::zero(); n - 1];
                let mut sb = sa.clone();
                for (k, (a, b)) in sa.iter_mut().zip(sb.iter_mut()).enumerate().skip(nu) {
                    *a = lin(0.3 * k as f64, 1.0);
                    *b = if k == nu { lin(-0.7, 1.0) } else { a.clone() };
                }
                let a = ExpressionSpec::new(n, vec![0; n - 1], sa).unwrap();
                let b = ExpressionSpec::new(n, vec![0; n - 1], sb).unwrap();
                let frame = sector_frame(n, 1).unwrap();
                let mut found = false;
                for dd in 0..n {
                    let brute = diag_correction(&a, &b, dd, &frame).unwrap();
                    if brute.iter().all(|f| f.coeff_norm() < 1e-14) {
                        continue;
                    }
                    let via = diag_correction_via_s(&a, &b, dd, &[nu], &frame).unwrap();
                    for (x, y) in brute.iter().zip(&via) {
                        assert!(x.approx_eq(y, 1e-13), "n={n} nu={nu} d={dd}");
                    }
                    found = true;
                }
                assert!(found, "n={n} nu={nu}");
            }
        }
    }
}
