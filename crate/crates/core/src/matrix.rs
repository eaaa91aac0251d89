//! Matrix-valued piecewise polynomials and small dense complex helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::poly::CoefficientFunction;

pub type C = Complex64;
pub type CMatrix = DMatrix<C>;

/// An `n x n` grid of piecewise polynomials, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFunction {
    n: usize,
    entries: Vec<CoefficientFunction>,
}

impl MatrixFunction {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![CoefficientFunction::zero(); n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<CoefficientFunction>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix function must be square");
        Self {
            n,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Zero-based entry access.
    pub fn get(&self, row: usize, col: usize) -> &CoefficientFunction {
        &self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, f: CoefficientFunction) {
        self.entries[row * self.n + col] = f;
    }

    pub fn eval(&self, x: f64) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| {
            let f = self.get(i, j);
            if f.is_zero() {
                C::new(0.0, 0.0)
            } else {
                f.eval(x)
            }
        })
    }

    /// Sorted union of the breakpoints of all entries.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .entries
            .iter()
            .flat_map(|f| f.breakpoints().iter().copied())
            .collect();
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.dedup();
        b
    }

    /// Largest degree of any entry on the piece containing `x`.
    pub fn local_degree(&self, x: f64) -> usize {
        self.entries.iter().map(|f| f.local_degree(x)).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CoefficientFunction::is_zero)
    }

    pub fn trace(&self) -> CoefficientFunction {
        (0..self.n).fold(CoefficientFunction::zero(), |acc, i| &acc + self.get(i, i))
    }

    /// `left * self * right` for constant matrices.
    pub fn conjugate(&self, left: &CMatrix, right: &CMatrix) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = CoefficientFunction::zero();
                for k in 0..n {
                    for l in 0..n {
                        let f = self.get(k, l);
                        if f.is_zero() {
                            continue;
                        }
                        let w = left[(i, k)] * right[(l, j)];
                        if w.norm() == 0.0 {
                            continue;
                        }
                        acc = &acc + &f.scale(w);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Keeps only the entries on diagonal `index` (`row - col == index`).
    pub fn diagonal_part(&self, index: usize) -> Self {
        let mut out = Self::zeros(self.n);
        for j in 0..self.n.saturating_sub(index) {
            let i = j + index;
            out.set(i, j, self.get(i, j).clone());
        }
        out
    }
}

/// Determinant of a small complex matrix by LU with partial pivoting.
pub fn det(m: &CMatrix) -> C {
    if m.nrows() == 0 {
        return C::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Determinant of the submatrix of `m` with the given rows and columns.
pub fn minor(m: &CMatrix, rows: &[usize], cols: &[usize]) -> C {
    let sub = CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]);
    det(&sub)
}

/// The `k`-th multiplicative compound of `m` in the lexicographic subset basis.
pub fn compound(m: &CMatrix, sets: &[Vec<usize>]) -> CMatrix {
    let d = sets.len();
    CMatrix::from_fn(d, d, |i, j| minor(m, &sets[i], &sets[j]))
}

/// Max-modulus entry norm, the norm used throughout the asymptotic estimates.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}
