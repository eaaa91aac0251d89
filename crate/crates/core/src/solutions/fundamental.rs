use crate::error::{Error, Result};
use crate::matrix::{det, CMatrix, C};
use crate::regularization::AssociatedMatrix;

use super::propagate::{for_each_step, IntegrationSettings};

/// `C(x, lambda)` sampled on a grid; column `k` is the solution `C_k` and row
/// `j` its quasi-derivative of order `j`.
#[derive(Debug, Clone)]
pub struct FundamentalMatrix {
    pub lambda: C,
    pub grid: Vec<f64>,
    pub values: Vec<CMatrix>,
}

impl FundamentalMatrix {
    /// Value at the right endpoint.
    pub fn at_one(&self) -> &CMatrix {
        self.values.last().expect("grid is never empty")
    }

    /// Largest deviation of `det C(x)` from 1 over the grid.
    pub fn det_defect(&self) -> f64 {
        self.values
            .iter()
            .map(|m| (det(m) - 1.0).norm())
            .fold(0.0, f64::max)
    }
}

/// Integrates `Y' = (F + Lambda) Y`, `Y(0) = I`, sampling on a uniform grid.
pub fn integrate_fundamental(
    f: &AssociatedMatrix,
    lambda: C,
    settings: &IntegrationSettings,
) -> Result<FundamentalMatrix> {
    let n = f.n();
    let rho_abs = lambda.norm().powf(1.0 / n as f64);
    if rho_abs > settings.max_rho {
        return Err(Error::Integration {
            x: 0.0,
            message: format!(
                "|rho| = {rho_abs:.3} exceeds the direct-integration cap {}; use the Birkhoff solver",
                settings.max_rho
            ),
        });
    }
    let samples = settings.samples.max(2);
    let grid: Vec<f64> = (0..samples).map(|i| i as f64 / (samples - 1) as f64).collect();
    integrate_on_grid(f, lambda, &grid, settings)
}

/// Same as [`integrate_fundamental`] on a caller-supplied increasing grid in `[0, 1]` starting at 0.
pub fn integrate_on_grid(
    f: &AssociatedMatrix,
    lambda: C,
    grid: &[f64],
    settings: &IntegrationSettings,
) -> Result<FundamentalMatrix> {
    let n = f.n();
    let mut cur = CMatrix::identity(n, n);
    let mut values = Vec::with_capacity(grid.len());
    let mut next = 0;
    while next < grid.len() && grid[next] <= 0.0 {
        values.push(cur.clone());
        next += 1;
    }
    for_each_step(f, lambda, grid, settings, |_, x1, p| {
        cur = p * &cur;
        if !cur.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Integration {
                x: x1,
                message: "solution overflowed".into(),
            });
        }
        while next < grid.len() && (grid[next] - x1).abs() < 1e-14 {
            values.push(cur.clone());
            next += 1;
        }
        Ok(())
    })?;
    Ok(FundamentalMatrix {
        lambda,
        grid: grid.to_vec(),
        values,
    })
}
