//! Metric, Levi-Civita connection and curvature on a single chart.
//!
//! Curvature follows `R(E,F)G = D_E D_F G − D_F D_E G − D_{[E,F]} G` with the
//! quartic form `R(E,F,G,G′) = −g(R(E,F)G, G′)`, so a round sphere has
//! `R(E,F,E,F) = +1` on orthonormal pairs.

mod connection;
mod curvature;
mod metric;

#[cfg(test)]
mod tests;

pub use connection::{gram_schmidt_jets, gram_schmidt_values, ChristoffelJets, DEPENDENT_TOL};
pub use curvature::{contract4, CurvatureTensor};
pub use metric::{inner_values, symmetric_eigenvalues, MetricField, MetricJets, MIN_EIGENVALUE};
