use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{ChartBox, Jet2, Scalar, Site};
use crate::error::{Error, Result};

/// Jets of the components of a vector field at one point.
pub type VectorJet<T> = Vec<Jet2<T>>;

/// Evaluated tangent vector in chart components.
pub type TangentValue<T> = Vec<T>;

type ScalarRule<T> = dyn Fn(&Site<T>) -> Result<Jet2<T>> + Send + Sync;
type VectorRule<T> = dyn Fn(&Site<T>) -> Result<VectorJet<T>> + Send + Sync;

/// A smooth function on a chart, evaluated as a second-order jet.
#[derive(Clone)]
pub struct ScalarField<T> {
    rule: Arc<ScalarRule<T>>,
}

impl<T> fmt::Debug for ScalarField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarField")
    }
}

impl<T: Scalar> ScalarField<T> {
    pub fn from_fn(rule: impl Fn(&Site<T>) -> Result<Jet2<T>> + Send + Sync + 'static) -> Self {
        Self { rule: Arc::new(rule) }
    }

    pub fn constant(value: T) -> Self {
        Self::from_fn(move |site| Ok(site.constant(value)))
    }

    pub fn coordinate(index: usize) -> Self {
        Self::from_fn(move |site| {
            if index >= site.dim() {
                return Err(Error::DimensionMismatch { expected: index + 1, found: site.dim() });
            }
            Ok(site.coordinate(index))
        })
    }

    pub fn eval(&self, site: &Site<T>) -> Result<Jet2<T>> {
        (self.rule)(site)
    }

    pub fn value(&self, site: &Site<T>) -> Result<T> {
        Ok(self.eval(site)?.value())
    }

    /// Applies a fallible jet map pointwise.
    pub fn map(&self, f: impl Fn(Jet2<T>) -> Result<Jet2<T>> + Send + Sync + 'static) -> Self {
        let inner = self.clone();
        Self::from_fn(move |site| f(inner.eval(site)?))
    }

    pub fn exp(&self) -> Self {
        self.map(|j| Ok(j.exp()))
    }

    pub fn sin(&self) -> Self {
        self.map(|j| Ok(j.sin()))
    }

    pub fn cos(&self) -> Self {
        self.map(|j| Ok(j.cos()))
    }

    pub fn sqrt(&self) -> Self {
        self.map(|j| j.sqrt())
    }

    pub fn ln(&self) -> Self {
        self.map(|j| j.ln())
    }

    pub fn recip(&self) -> Self {
        self.map(|j| j.recip())
    }

    pub fn powi(&self, n: i32) -> Self {
        self.map(move |j| Ok(j.powi(n)))
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(move |j| Ok(j.scale(s)))
    }

    /// Quotient; evaluation fails where the divisor is below `1e-12`.
    pub fn div(&self, rhs: &Self) -> Self {
        let (a, b) = (self.clone(), rhs.clone());
        Self::from_fn(move |site| a.eval(site)?.try_div(&b.eval(site)?))
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<T: Scalar> $tr for ScalarField<T> {
            type Output = ScalarField<T>;
            fn $method(self, rhs: Self) -> Self {
                ScalarField::from_fn(move |site| Ok(self.eval(site)? $op rhs.eval(site)?))
            }
        }
        impl<T: Scalar> $tr for &ScalarField<T> {
            type Output = ScalarField<T>;
            fn $method(self, rhs: Self) -> ScalarField<T> {
                self.clone() $op rhs.clone()
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl<T: Scalar> Neg for ScalarField<T> {
    type Output = ScalarField<T>;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

/// A vector field in the coordinate basis of a chart.
#[derive(Clone)]
pub struct VectorField<T> {
    dim: usize,
    rule: Arc<VectorRule<T>>,
}

impl<T> fmt::Debug for VectorField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField(dim={})", self.dim)
    }
}

impl<T: Scalar> VectorField<T> {
    pub fn from_fn(dim: usize, rule: impl Fn(&Site<T>) -> Result<VectorJet<T>> + Send + Sync + 'static) -> Self {
        Self { dim, rule: Arc::new(rule) }
    }

    pub fn from_components(components: Vec<ScalarField<T>>) -> Self {
        let dim = components.len();
        Self::from_fn(dim, move |site| components.iter().map(|c| c.eval(site)).collect())
    }

    /// The coordinate field `∂_index`.
    pub fn coordinate(dim: usize, index: usize) -> Self {
        Self::constant(dim, (0..dim).map(|k| if k == index { T::one() } else { T::zero() }).collect())
    }

    pub fn constant(dim: usize, components: Vec<T>) -> Self {
        Self::from_fn(dim, move |site| Ok(components.iter().map(|&c| site.constant(c)).collect()))
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, vec![T::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, site: &Site<T>) -> Result<VectorJet<T>> {
        if site.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: site.dim() });
        }
        (self.rule)(site)
    }

    pub fn value(&self, site: &Site<T>) -> Result<TangentValue<T>> {
        Ok(values(&self.eval(site)?))
    }

    pub fn component(&self, k: usize) -> ScalarField<T> {
        let inner = self.clone();
        ScalarField::from_fn(move |site| Ok(inner.eval(site)?[k]))
    }

    /// Pointwise multiplication by a scalar field.
    pub fn scaled_by(&self, f: &ScalarField<T>) -> Self {
        let (v, f) = (self.clone(), f.clone());
        Self::from_fn(self.dim, move |site| {
            let s = f.eval(site)?;
            Ok(v.eval(site)?.into_iter().map(|c| c * s).collect())
        })
    }

    pub fn scale(&self, s: T) -> Self {
        let v = self.clone();
        Self::from_fn(self.dim, move |site| Ok(v.eval(site)?.into_iter().map(|c| c.scale(s)).collect()))
    }

    /// Constant-coefficient linear combination of fields.
    pub fn combination(dim: usize, terms: Vec<(T, VectorField<T>)>) -> Self {
        Self::from_fn(dim, move |site| {
            let mut acc = vec![site.constant(T::zero()); dim];
            for (c, f) in &terms {
                axpy(&mut acc, *c, &f.eval(site)?);
            }
            Ok(acc)
        })
    }
}

impl<T: Scalar> Add for VectorField<T> {
    type Output = VectorField<T>;
    fn add(self, rhs: Self) -> Self {
        let dim = self.dim;
        VectorField::from_fn(dim, move |site| Ok(add_vec(&self.eval(site)?, &rhs.eval(site)?)))
    }
}

impl<T: Scalar> Sub for VectorField<T> {
    type Output = VectorField<T>;
    fn sub(self, rhs: Self) -> Self {
        let dim = self.dim;
        VectorField::from_fn(dim, move |site| Ok(sub_vec(&self.eval(site)?, &rhs.eval(site)?)))
    }
}

impl<T: Scalar> Neg for VectorField<T> {
    type Output = VectorField<T>;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

pub fn values<T: Scalar>(v: &[Jet2<T>]) -> Vec<T> {
    v.iter().map(|j| j.value()).collect()
}

pub fn add_vec<T: Scalar>(a: &[Jet2<T>], b: &[Jet2<T>]) -> VectorJet<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn sub_vec<T: Scalar>(a: &[Jet2<T>], b: &[Jet2<T>]) -> VectorJet<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn scale_vec<T: Scalar>(s: Jet2<T>, v: &[Jet2<T>]) -> VectorJet<T> {
    v.iter().map(|&c| s * c).collect()
}

/// `acc += c * v`
pub fn axpy<T: Scalar>(acc: &mut [Jet2<T>], c: T, v: &[Jet2<T>]) {
    for (a, &x) in acc.iter_mut().zip(v) {
        *a += x.scale(c);
    }
}

/// `Σ_k u^k ∂_k f` on jets.
pub fn directional<T: Scalar>(u: &[Jet2<T>], f: &Jet2<T>) -> Result<Jet2<T>> {
    let n = f.dim();
    let mut acc = Jet2::constant(n, T::zero());
    for (k, &uk) in u.iter().enumerate() {
        acc += uk * f.partial(k)?;
    }
    Ok(acc)
}

/// `[u, w]^k = u(w^k) - w(u^k)` on jets.
pub fn bracket<T: Scalar>(u: &[Jet2<T>], w: &[Jet2<T>]) -> Result<VectorJet<T>> {
    u.iter()
        .zip(w)
        .map(|(uk, wk)| Ok(directional(u, wk)? - directional(w, uk)?))
        .collect()
}

/// Euclidean component sum `Σ a_k b_k`, used only for coordinate-level checks.
pub fn dot_values<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn lie_bracket<T: Scalar>(x: &VectorField<T>, y: &VectorField<T>) -> VectorField<T> {
    let (x, y) = (x.clone(), y.clone());
    VectorField::from_fn(x.dim(), move |site| bracket(&x.eval(site)?, &y.eval(site)?))
}

pub fn directional_derivative<T: Scalar>(f: &ScalarField<T>, x: &VectorField<T>) -> ScalarField<T> {
    let (f, x) = (f.clone(), x.clone());
    ScalarField::from_fn(move |site| directional(&x.eval(site)?, &f.eval(site)?))
}

/// Evaluates `f` at `coords`, which must lie inside `domain`.
pub fn eval_jet<T: Scalar>(f: &ScalarField<T>, domain: &ChartBox<T>, coords: &[T]) -> Result<Jet2<T>> {
    f.eval(&domain.site(coords.to_vec())?)
}

/// Sum of a family of vector jets (zero vector if empty).
pub fn sum_vecs<T: Scalar>(dim: usize, vs: impl IntoIterator<Item = VectorJet<T>>) -> VectorJet<T> {
    let mut acc: Vec<Jet2<T>> = vec![Jet2::constant(dim, T::zero()); dim];
    for v in vs {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    acc
}
