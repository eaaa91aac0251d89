//! Spectral asymptotics for ordinary differential operators whose
//! coefficients are distributions.

pub mod asymptotics;
pub mod error;
pub mod matrix;
pub mod poly;
pub mod quad;
pub mod regularization;
pub mod solutions;
pub mod spectrum;

pub use error::{Error, Result};
pub use matrix::{CMatrix, MatrixFunction, C};
pub use poly::{ClassTag, CoefficientFunction};
pub use regularization::{
    build_associated_matrix, chi_matrix, conjugate_system, diag_correction, diag_correction_via_s,
    diagonal_split, s_coefficient, AssociatedMatrix, ConjugatedSystem, DiagonalSplit, ExpressionSpec,
};
pub use asymptotics::sector::{sector_frame, SectorFrame};
pub use asymptotics::{AsymptoticModel, DecayOrder};
pub use solutions::IntegrationSettings;
pub use spectrum::{BoundaryForm, BoundarySpec, Operator, ProblemSpec, SpectralDatum, Spectrum};
