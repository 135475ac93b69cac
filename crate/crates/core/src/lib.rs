//! Pointwise numerical verification of identities for foliated Riemannian manifolds.
//!
//! The geometry layers are generic over [`smooth_fields::Scalar`]; the aliases
//! below fix the scalar to `f64`, which is what the identity suite and CLI use.

pub mod cli;
pub mod error;
pub mod exterior;
pub mod foliation;
pub mod identities;
pub mod models;
pub mod riemannian;
pub mod smooth_fields;

pub use error::{Error, Result};

pub type Jet = smooth_fields::Jet2<f64>;
pub type ScalarField = smooth_fields::ScalarField<f64>;
pub type VectorField = smooth_fields::VectorField<f64>;
pub type Metric = riemannian::MetricField<f64>;
pub type Model = foliation::FoliatedModel<f64>;
pub type Form = exterior::DifferentialForm<f64>;
