use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShellError {
    #[error("degenerate frame: det(G_ij) = {det:e} is below 1e-12")]
    DegenerateFrame { det: f64 },
    #[error("point ({}, {}) lies outside the chart domain", u[0], u[1])]
    OutOfDomain { u: [f64; 2] },
    #[error("motion reverses orientation: signed det F = {det:e}")]
    OrientationReversed { det: f64 },
    #[error("stencil around ({}, {}) with step {h:e} leaves the chart domain", u[0], u[1])]
    StencilOutOfDomain { u: [f64; 2], h: f64 },
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("frame is not orthonormal: max deviation {deviation:e}")]
    NonOrthonormalFrame { deviation: f64 },
    #[error("unknown suite `{0}`; expected geometry, kinematics, stress, balance, linearized or all")]
    UnknownSuite(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, ShellError>;
