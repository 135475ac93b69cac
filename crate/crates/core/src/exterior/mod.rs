//! Differential forms with the shuffle-sum wedge and the exterior derivative
//! without a `1/(k+1)` factor, frame-contraction codifferentials, the
//! characteristic form `χ_F`, and the adapted connection `D̃`.

mod form;
mod geometric;


pub use form::{
    det_jets, exterior_derivative, interior, lie_derivative, permutation_sign, permutations, subsets, wedge,
    DifferentialForm,
};
pub use geometric::{
    adapted_connection, adapted_connection_jets, basic_codifferential, basic_codifferential_unchecked,
    basic_form_defect, characteristic_form, codifferential, kappa_form, one_form_dual,
};
