//! Characteristic determinants, eigenvalues and weight numbers.

mod boundary;
mod contour;
mod delta;
mod locate;
mod weights;

pub use boundary::{boundary_form, BoundaryForm, BoundarySpec, Operator, ProblemSpec};
pub use contour::{count_zeros, count_zeros_of, count_zeros_with, winding_number, Contour, ContourSettings};
pub use delta::{
    boundary_determinant, char_delta, char_delta_bullet, char_delta_bullet_with, char_delta_with, DeltaValue,
};
pub use locate::{locate_eigenvalues, LocateSettings, SpectralDatum, Spectrum};
pub use weights::{
    cauchy_derivative, delta_derivative, weight_numbers, weight_numbers_checked, weight_residue, CauchySettings, WeightCheck,
};
