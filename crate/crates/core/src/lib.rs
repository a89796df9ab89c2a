//! Series solution of the axisymmetric linear-elasticity problem for a hollow
//! circular cylinder loaded axially on an annular portion of its end faces.
//!
//! The displacement field is expanded in odd Fourier modes along the axis; each
//! mode reduces to a radial two-point boundary value problem solved by a
//! Frobenius-type power/log series with a closed-form recurrence.  Truncation
//! of both the series order N and the mode count M is controlled by explicit
//! a-priori bounds.
//!
//! The crate is generic over the scalar type through [`scalar::Scalar`]; the
//! boundary systems of high modes are severely ill-conditioned in plain
//! doubles, so production runs use the extended-precision alias below.

pub mod config;
pub mod error;
pub mod field;
pub mod linalg;
pub mod material;
pub mod mode;
pub mod oracle;
pub mod particular;
pub mod quad;
pub mod run;
pub mod scalar;
pub mod series;
pub mod truncation;

pub use error::{Error, Result};
pub use material::{AxialLoad, CylinderGeometry, ElasticMaterial, ScaledCoefficients};
pub use scalar::Scalar;

/// Extended-precision scalar (double-double, ≈32 significant digits).
pub type Extended = scalar::Ext;

/// Default-precision material.
pub type Material = material::ElasticMaterial<f64>;
/// Default-precision geometry.
pub type Geometry = material::CylinderGeometry<f64>;
/// Default-precision load.
pub type Load = material::AxialLoad<f64>;
/// Default-precision mode solution.
pub type Mode = mode::ModeSolution<f64>;
