//! Foliated charts: adapted frames, projections, the O'Neill tensors `T` and
//! `A`, the mean curvature vector `τ` and form `κ`, and numerical predicates
//! (basic, bundle-like, umbilical).

mod geometry;
mod model;
mod oneill;
mod predicates;


pub use geometry::Part;
pub use model::{Claims, FoliatedModel, FramePair, HORIZONTAL_SKIP_TOL};
pub use predicates::{combine, BundleLike, Check};
pub(crate) use predicates::random_unit_combo;
