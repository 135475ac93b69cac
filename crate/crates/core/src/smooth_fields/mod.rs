//! Smooth scalar and vector fields on a single chart, evaluated through
//! second-order jets.

mod expr;
mod field;
mod jet;
mod scalar;
mod site;

pub use expr::{parse_expr, Expr};
pub use field::{
    add_vec, axpy, bracket, directional, directional_derivative, dot_values, eval_jet, lie_bracket, scale_vec,
    sub_vec, sum_vecs, values, ScalarField, TangentValue, VectorField, VectorJet,
};
pub use jet::{sum_jets, Jet2, DIVISOR_FLOOR, MAX_DIM};
pub use scalar::Scalar;
pub use site::{ChartBox, ChartPoint, MemoKey, Site, CHART_MARGIN};
