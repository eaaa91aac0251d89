use thiserror::Error;

/// Errors raised by the regularization, integration and spectral pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violates a structural constraint; `field` names the offending item.
    #[error("validation error at {field}: {message}")]
    Validation { field: String, message: String },

    /// A coefficient carries an integrability tag weaker than required.
    #[error("class-tag violation at {field}: {message}")]
    ClassTag { field: String, message: String },

    /// A constructed object failed an identity that holds by construction.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    /// Step-size control broke down while propagating the system.
    #[error("integration failed near x = {x}: {message}")]
    Integration { x: f64, message: String },

    /// The Birkhoff fixed-point iteration did not contract.
    #[error("fixed-point iteration did not contract at |rho| = {rho_abs}: {message}")]
    NonContraction { rho_abs: f64, message: String },

    /// Argument accumulation along a contour was not close to a multiple of 2*pi.
    #[error("contour too coarse: {0}")]
    Contour(String),

    /// A root search or quadrature failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// The boundary configuration makes the asymptotic model degenerate.
    #[error("degenerate asymptotic model: {0}")]
    Model(String),

    /// A requested quantity needs configuration that is absent.
    #[error("configuration error: {0}")]
    Config(String),

    /// An asymptotic fit had too little usable data.
    #[error("fit error: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors that come from the numerics rather than from user input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::Validation { .. } | Error::ClassTag { .. } | Error::Config(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
