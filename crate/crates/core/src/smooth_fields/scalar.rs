use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};

/// Real scalar the geometry engine is generic over.
pub trait Scalar: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {
    /// Tolerance at which numerical predicates (basic, bundle-like, ...) are decided.
    const PREDICATE_TOL: f64;

    #[inline]
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("literal representable in scalar type")
    }

    /// `tol`, raised to a thousand machine epsilons when that is larger.
    #[inline]
    fn tol_floor(tol: f64) -> Self {
        Self::lit(tol.max(1e3 * Self::epsilon().as_f64()))
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const PREDICATE_TOL: f64 = 1e-8;
}

impl Scalar for f32 {
    const PREDICATE_TOL: f64 = 1e-3;
}
