//! Fundamental solutions of the quasi-derivative system.

mod birkhoff;
mod closed_form;
mod fundamental;
pub mod propagate;
mod upsilon;

pub use birkhoff::{birkhoff_fss, choose_rho_star, direct_mismatch, vk_squared_estimate, BirkhoffSettings, BirkhoffSolution};
pub use closed_form::closed_form_zero_coeff;
pub use fundamental::{integrate_fundamental, integrate_on_grid, FundamentalMatrix};
pub use propagate::{for_each_scaled_step, for_each_step, system_matrix, IntegrationSettings};
pub use upsilon::{condensation_index, default_upsilon_grid, upsilon, upsilon_d, upsilon_matrix};
