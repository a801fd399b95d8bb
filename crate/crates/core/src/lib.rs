//! Elastic shell theory in the geometric algebra of Euclidean 3-space.
//!
//! The crate evaluates, pointwise on a parametrized surface, the geometry of
//! the reference and deformed configurations, the strain, bending and rate
//! measures of a motion, the Koiter constitutive law with the associated
//! stress and couple-stress tensors, residuals of the local balance laws,
//! and first-order perturbations about a pre-strained state. Every quantity
//! can be checked against an independent finite-difference or
//! automatic-differentiation oracle; see [`verify`].

pub mod autodiff;
pub mod balance;
pub mod error;
pub mod field;
pub mod ga3;
pub mod kinematics;
pub mod linalg;
pub mod linearized;
pub mod motion;
pub mod stress;
pub mod surface;
pub mod verify;

pub use error::{Result, ShellError};
