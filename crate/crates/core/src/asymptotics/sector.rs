use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C};

/// Roots of unity ordered for one sector of the `rho`-plane.
///
/// For `rho` in the open sector `(kappa - 1) pi / n < arg rho < kappa pi / n`
/// the roots satisfy `Re(rho w_1) < ... < Re(rho w_n)`.
#[derive(Debug, Clone)]
pub struct SectorFrame {
    pub n: usize,
    pub kappa: usize,
    pub omegas: Vec<C>,
    /// `Omega[j][k] = w_k^j` (zero-based powers).
    pub omega: CMatrix,
    pub omega_inv: CMatrix,
    /// Shift of the extended sector.
    pub h: f64,
    /// Lower bound on `|rho|` for the Birkhoff region.
    pub rho_star: f64,
}

/// `exp(2 pi i k / n)` with exact values on the axes.
pub(crate) fn root_of_unity(k: usize, n: usize) -> C {
    let k = k % n;
    if 4 * k == n {
        return C::new(0.0, 1.0);
    }
    if 2 * k == n {
        return C::new(-1.0, 0.0);
    }
    if 4 * k == 3 * n {
        return C::new(0.0, -1.0);
    }
    if k == 0 {
        return C::new(1.0, 0.0);
    }
    let t = 2.0 * PI * k as f64 / n as f64;
    C::new(t.cos(), t.sin())
}

pub fn sector_frame(n: usize, kappa: usize) -> Result<SectorFrame> {
    if n < 2 {
        return Err(Error::validation("n", "order must be at least 2"));
    }
    if kappa < 1 || kappa > 2 * n {
        return Err(Error::validation("kappa", format!("must lie in 1..={}", 2 * n)));
    }
    let mid = C::from_polar(1.0, PI * (kappa as f64 - 0.5) / n as f64);
    let mut roots: Vec<C> = (0..n).map(|k| root_of_unity(k, n)).collect();
    roots.sort_by(|a, b| (mid * a).re.partial_cmp(&(mid * b).re).unwrap());
    // On the midpoint ray no two roots have equal real parts.
    assert!(
        roots.windows(2).all(|w| (mid * w[1]).re - (mid * w[0]).re > 1e-9),
        "ordering tie on sector midpoint"
    );
    let omega = CMatrix::from_fn(n, n, |j, k| roots[k].powu(j as u32));
    let omega_inv = CMatrix::from_fn(n, n, |k, j| roots[k].powu(j as u32).conj() / n as f64);
    Ok(SectorFrame {
        n,
        kappa,
        omegas: roots,
        omega,
        omega_inv,
        h: 1.0,
        rho_star: 1.0,
    })
}

impl SectorFrame {
    pub fn with_extension(mut self, h: f64, rho_star: f64) -> Self {
        self.h = h;
        self.rho_star = rho_star;
        self
    }

    /// Unit vector along the sector bisector.
    pub fn midpoint_direction(&self) -> C {
        C::from_polar(1.0, PI * (self.kappa as f64 - 0.5) / self.n as f64)
    }

    /// Diagonal matrix `B = diag(w_1, ..., w_n)`.
    pub fn b_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.omegas.clone()))
    }

    /// The constant part of the scaled system: ones on the superdiagonal and at `(n, 1)`.
    pub fn companion(&self) -> CMatrix {
        companion(self.n)
    }

    /// True when `rho` lies in the open sector.
    pub fn contains(&self, rho: C) -> bool {
        let a = rho.arg();
        let a = if a < 0.0 { a + 2.0 * PI } else { a };
        let lo = PI * (self.kappa as f64 - 1.0) / self.n as f64;
        let hi = PI * self.kappa as f64 / self.n as f64;
        rho.norm() > 0.0 && a > lo && a < hi
    }

    /// True when `rho` lies in the extended sector shifted by `h` along the bisector.
    pub fn in_extended(&self, rho: C) -> bool {
        self.contains(rho + self.midpoint_direction() * self.h)
    }

    /// Strict ordering of `Re(rho w_k)` at this `rho`.
    pub fn ordering_holds(&self, rho: C) -> bool {
        self.omegas
            .windows(2)
            .all(|w| (rho * w[0]).re < (rho * w[1]).re)
    }
}

pub(crate) fn companion(n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for k in 0..n - 1 {
        m[(k, k + 1)] = C::new(1.0, 0.0);
    }
    m[(n - 1, 0)] = C::new(1.0, 0.0);
    m
}
