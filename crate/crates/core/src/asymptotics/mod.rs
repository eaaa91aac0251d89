//! Sector geometry, the asymptotic eigenvalue model, remainder fits and
//! paired-problem comparisons.

mod fits;
mod model;
mod pair;
pub mod sector;

pub use model::{asymptotic_model, default_kappa, AsymptoticModel};
pub use fits::{chi1_fit, chi_fit, extract_remainders, linear_fit, loglog_slope, Chi1Fit, Remainders};
pub use pair::{
    check_boundary_match, compute_d, pair_difference, weight_asymptotics, weight_pair_difference, DecayOrder, PairComparison,
    WeightFit, WeightPairFit,
};
