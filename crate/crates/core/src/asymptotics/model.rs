//! The zero-coefficient model `D_1^0(rho) = c_1 e^{rho w_{r+1}} - c_2 e^{rho w_r}`
//! and the eigenvalue predictions `rho_l^0 = G (l + chi)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::{det, CMatrix, C};

use super::sector::{sector_frame, SectorFrame};

#[derive(Debug, Clone)]
pub struct AsymptoticModel {
    pub n: usize,
    pub r: usize,
    pub p_left: Vec<usize>,
    pub p_right: Vec<usize>,
    pub kappa: usize,
    /// Argument of the eigenvalue ray in the `rho`-plane; `rho = t e^{i phase}`.
    pub phase: f64,
    pub omegas: Vec<C>,
    pub c1: C,
    pub c2: C,
    /// Principal-branch value.
    pub chi: C,
    /// `pi / sin(pi r / n)`.
    pub growth: f64,
    /// `(-1)^{n - r}`.
    pub sign: f64,
    /// `sum_{k > r} w_k`.
    pub omega_sum: C,
    /// Integer offset fixed by the numbering sweep.
    pub shift: i64,
}

/// Default sector: its lower boundary ray carries the eigenvalues.
pub fn default_kappa(n: usize, r: usize) -> usize {
    if (n - r).is_multiple_of(2) {
        1
    } else {
        2
    }
}

fn column_det(omegas: &[C], ps: &[usize], cols: &[usize]) -> C {
    let m = CMatrix::from_fn(ps.len(), cols.len(), |s, k| omegas[cols[k]].powu(ps[s] as u32));
    det(&m)
}

/// Model constants for `p_left = (p_1..p_r)`, `p_right = (p_{r+1}..p_n)`.
///
/// `kappa` selects the sector whose frame orders the roots; the eigenvalue
/// ray is the boundary ray of `Gamma_kappa` on which `w_r` and `w_{r+1}` tie.
pub fn asymptotic_model(n: usize, p_left: &[usize], p_right: &[usize], kappa: Option<usize>) -> Result<AsymptoticModel> {
    let r = p_left.len();
    if r == 0 || r >= n || r + p_right.len() != n {
        return Err(Error::validation("boundary.r", "r must lie in 1..n-1 with n forms"));
    }
    if let Some(i) = p_left.iter().chain(p_right).position(|&p| p >= n) {
        return Err(Error::validation(format!("boundary.p[{i}]"), "p exceeds n - 1"));
    }
    let kappa = kappa.unwrap_or_else(|| default_kappa(n, r));
    let frame: SectorFrame = sector_frame(n, kappa)?;
    let base = if (n - r).is_multiple_of(2) { 0.0 } else { PI / n as f64 };
    let step = 2.0 * PI / n as f64;
    let lo = PI * (kappa as f64 - 1.0) / n as f64;
    let hi = PI * kappa as f64 / n as f64;
    let on_ray = |a: f64| {
        let m = ((a - base) / step).round();
        (a - base - m * step).abs() < 1e-9
    };
    let phase = if on_ray(lo) {
        lo
    } else if on_ray(hi) {
        hi
    } else {
        return Err(Error::Model(format!("sector {kappa} does not border an eigenvalue ray")));
    };
    let w = &frame.omegas;
    let dir = C::from_polar(1.0, phase);
    let gap = ((dir * w[r]).re - (dir * w[r - 1]).re).abs();
    if gap > 1e-9 {
        return Err(Error::Consistency(format!("roots {r} and {} do not tie on the eigenvalue ray", r + 1)));
    }
    let left: Vec<usize> = (0..r).collect();
    let right: Vec<usize> = (r..n).collect();
    let c1 = column_det(w, p_left, &left) * column_det(w, p_right, &right);
    let mut left2 = left.clone();
    left2[r - 1] = r;
    let mut right2 = right.clone();
    right2[0] = r - 1;
    let c2 = column_det(w, p_left, &left2) * column_det(w, p_right, &right2);
    let scale = 1.0 + c1.norm().max(c2.norm());
    if c1.norm() < 1e-12 * scale || c2.norm() < 1e-12 * scale {
        return Err(Error::Model(format!("c1 = {c1}, c2 = {c2}: degenerate boundary configuration")));
    }
    let g = dir * (w[r - 1] - w[r]);
    let log = (c1 / c2).ln();
    let chi = if g.im > 0.0 {
        log / C::new(0.0, 2.0 * PI)
    } else {
        -log / C::new(0.0, 2.0 * PI)
    };
    let growth = PI / (PI * r as f64 / n as f64).sin();
    Ok(AsymptoticModel {
        n,
        r,
        p_left: p_left.to_vec(),
        p_right: p_right.to_vec(),
        kappa,
        phase,
        omegas: w.clone(),
        c1,
        c2,
        chi,
        growth,
        sign: if (n - r).is_multiple_of(2) { 1.0 } else { -1.0 },
        omega_sum: w[r..].iter().sum(),
        shift: 0,
    })
}

impl AsymptoticModel {
    pub fn chi_effective(&self) -> C {
        self.chi + self.shift as f64
    }

    /// `t_l^0 = G (l + chi)` with the numbering shift applied.
    pub fn predicted_t(&self, l: i64) -> C {
        (self.chi_effective() + l as f64) * self.growth
    }

    /// `rho = t e^{i phase}`.
    pub fn rho_of_t(&self, t: C) -> C {
        t * C::from_polar(1.0, self.phase)
    }

    /// `lambda = (-1)^{n-r} t^n`.
    pub fn lambda_of_t(&self, t: C) -> C {
        t.powu(self.n as u32) * self.sign
    }

    /// Branch of `t = (sign lambda)^{1/n}` nearest the positive axis.
    pub fn t_of_lambda(&self, lambda: C) -> C {
        let z = lambda * self.sign;
        C::from_polar(z.norm().powf(1.0 / self.n as f64), z.arg() / self.n as f64)
    }

    pub fn predicted_lambda(&self, l: i64) -> C {
        self.lambda_of_t(self.predicted_t(l))
    }

    /// `D_1^0(rho) e^{-rho w_{r+1}} = c_1 - c_2 e^{rho (w_r - w_{r+1})}` at `rho = t e^{i phase}`.
    pub fn d1_normalized(&self, t: C) -> C {
        let rho = self.rho_of_t(t);
        self.c1 - self.c2 * (rho * (self.omegas[self.r - 1] - self.omegas[self.r])).exp()
    }

    pub fn with_shift(mut self, shift: i64) -> Self {
        self.shift = shift;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_values() {
        let m = asymptotic_model(3, &[0], &[0, 1], None).unwrap();
        assert!((m.chi - C::new(1.0 / 6.0, 0.0)).norm() < 1e-14);
        assert!((m.growth - 2.0 * PI / 3f64.sqrt()).abs() < 1e-14);
        let m = asymptotic_model(2, &[0], &[0], None).unwrap();
        assert!((m.c1 - 1.0).norm() < 1e-15 && (m.c2 - 1.0).norm() < 1e-15);
        assert!(m.chi.norm() < 1e-15);
        assert!((m.predicted_lambda(3) + 9.0 * PI * PI).norm() < 1e-10);
    }

    #[test]
    fn model_zeros_land_on_predictions() {
        for (n, pl, pr) in [(3, vec![0], vec![0, 1]), (4, vec![0, 1], vec![0, 1]), (5, vec![0, 2], vec![1, 3, 4]), (6, vec![0, 1, 5], vec![0, 2, 3])] {
            let m = asymptotic_model(n, &pl, &pr, None).unwrap();
            for l in -50..=50 {
                let v = m.d1_normalized(m.predicted_t(l));
                assert!(v.norm() < 1e-12 * (m.c1.norm() + m.c2.norm()), "n={n} l={l} {v}");
            }
        }
    }

    #[test]
    fn chi_agrees_on_every_bordering_sector() {
        for (n, pl, pr) in [(3, vec![0], vec![0, 1]), (4, vec![0, 1], vec![0, 2]), (5, vec![1, 2], vec![0, 3, 4]), (4, vec![2], vec![0, 1, 3])] {
            let base = asymptotic_model(n, &pl, &pr, None).unwrap();
            let mut seen = 0;
            for kappa in 1..=2 * n {
                if let Ok(m) = asymptotic_model(n, &pl, &pr, Some(kappa)) {
                    let d = m.chi - base.chi;
                    assert!((d.re - d.re.round()).abs() < 1e-12 && d.im.abs() < 1e-12, "n={n} kappa={kappa}");
                    seen += 1;
                }
            }
            assert_eq!(seen, 2 * n);
        }
    }

    #[test]
    fn degenerate_configuration_is_rejected() {
        // A repeated p makes both determinants vanish.
        assert!(matches!(asymptotic_model(3, &[0], &[0, 0], None), Err(Error::Model(_))));
    }
}
