//! The catalog of foliation identities and the residual evaluator that checks
//! each on each model whose hypotheses it meets.

mod catalog;
mod evaluate;
mod special;


pub use catalog::{catalog, find, Identity, Kind, Needs, CATALOG};
pub use evaluate::{
    evaluate_identity, run_catalog, Context, ResidualReport, Verdict, DEFAULT_QUADRATURE_RESOLUTION,
    INTEGRAL_TOLERANCE, MAX_SKIP_FRACTION, VACUOUS_SCALE,
};
pub use special::{contact_classify, cor26_verdict, integral_check_136, ContactReport, Cor26Report, IntegralReport};
