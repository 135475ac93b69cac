//! Second-order forward-mode jets.
//!
//! A [`Jet2`] carries the value, gradient and Hessian of a scalar at a chart
//! point. Every jet also records how many of its derivative orders are valid:
//! differentiating a jet (taking a partial) lowers the order by one, so a
//! quantity built from first derivatives of the metric (Christoffel symbols,
//! the mean curvature vector, ...) carries a valid gradient but no Hessian.
//! Reading past the valid order is an error rather than silent garbage.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::Scalar;
use crate::error::{Error, Result};

/// Largest chart dimension a jet can carry.
pub const MAX_DIM: usize = 6;
const PACKED: usize = MAX_DIM * (MAX_DIM + 1) / 2;

/// Magnitude below which a jet may not be used as a divisor.
pub const DIVISOR_FLOOR: f64 = 1e-12;

#[inline]
fn tri(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    b * (b + 1) / 2 + a
}

/// Value, gradient and symmetric Hessian of a scalar at a point.
///
/// The Hessian is stored as a packed triangle, so it is symmetric by
/// construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<T> {
    dim: u8,
    order: u8,
    value: T,
    grad: [T; MAX_DIM],
    hess: [T; PACKED],
}

impl<T: Scalar> Jet2<T> {
    pub fn constant(dim: usize, value: T) -> Self {
        debug_assert!(dim <= MAX_DIM);
        Self {
            dim: dim as u8,
            order: 2,
            value,
            grad: [T::zero(); MAX_DIM],
            hess: [T::zero(); PACKED],
        }
    }

    /// The coordinate function `x^index` evaluated at `value`.
    pub fn variable(dim: usize, index: usize, value: T) -> Self {
        let mut j = Self::constant(dim, value);
        j.grad[index] = T::one();
        j
    }

    /// Builds a jet from explicit derivatives; `hessian(i, j)` is only queried for `i <= j`.
    pub fn from_parts(value: T, gradient: &[T], hessian: impl Fn(usize, usize) -> T) -> Self {
        let dim = gradient.len();
        let mut j = Self::constant(dim, value);
        j.grad[..dim].copy_from_slice(gradient);
        for b in 0..dim {
            for a in 0..=b {
                j.hess[tri(a, b)] = hessian(a, b);
            }
        }
        j
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Number of valid derivative orders (0, 1 or 2).
    #[inline]
    pub fn order(&self) -> u8 {
        self.order
    }

    #[inline]
    pub fn value(&self) -> T {
        self.value
    }

    #[inline]
    pub fn gradient(&self) -> &[T] {
        &self.grad[..self.dim()]
    }

    #[inline]
    pub fn hessian(&self, i: usize, j: usize) -> T {
        self.hess[tri(i, j)]
    }

    pub fn hessian_matrix(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.hessian(i, j)).collect()).collect()
    }

    /// Fails unless at least `needed` derivative orders are valid.
    pub fn require(&self, needed: u8) -> Result<()> {
        if self.order < needed {
            return Err(Error::OrderExhausted { needed, available: self.order });
        }
        Ok(())
    }

    /// Drops derivative information above `order`.
    pub fn truncate(mut self, order: u8) -> Self {
        if order < self.order {
            self.order = order;
            self.clear_invalid();
        }
        self
    }

    fn clear_invalid(&mut self) {
        if self.order < 2 {
            self.hess = [T::zero(); PACKED];
        }
        if self.order < 1 {
            self.grad = [T::zero(); MAX_DIM];
        }
    }

    /// The partial derivative `∂_k` of this jet, one order lower.
    pub fn partial(&self, k: usize) -> Result<Self> {
        self.require(1)?;
        let n = self.dim();
        let mut out = Self::constant(n, self.grad[k]);
        out.order = self.order - 1;
        if out.order >= 1 {
            for j in 0..n {
                out.grad[j] = self.hess[tri(k, j)];
            }
        }
        Ok(out)
    }

    pub fn scale(mut self, s: T) -> Self {
        self.value = self.value * s;
        for g in self.grad.iter_mut() {
            *g = *g * s;
        }
        for h in self.hess.iter_mut() {
            *h = *h * s;
        }
        self
    }

    pub fn add_scalar(mut self, s: T) -> Self {
        self.value = self.value + s;
        self
    }

    /// Applies a univariate function given its value and first two derivatives at `self.value()`.
    pub fn chain(&self, f0: T, f1: T, f2: T) -> Self {
        let n = self.dim();
        let mut out = Self::constant(n, f0);
        out.order = self.order;
        if self.order >= 1 {
            for i in 0..n {
                out.grad[i] = f1 * self.grad[i];
            }
        }
        if self.order >= 2 {
            for b in 0..n {
                for a in 0..=b {
                    let k = tri(a, b);
                    out.hess[k] = f1 * self.hess[k] + f2 * self.grad[a] * self.grad[b];
                }
            }
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn powi(&self, n: i32) -> Self {
        let v = self.value;
        let nf = T::lit(n as f64);
        let (f1, f2) = match n {
            0 => (T::zero(), T::zero()),
            1 => (T::one(), T::zero()),
            _ => (nf * v.powi(n - 1), nf * (nf - T::one()) * v.powi(n - 2)),
        };
        self.chain(v.powi(n), f1, f2)
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.value <= T::lit(DIVISOR_FLOOR) {
            return Err(Error::NonPositiveArgument { op: "sqrt", value: self.value.as_f64() });
        }
        let r = self.value.sqrt();
        let two = T::lit(2.0);
        Ok(self.chain(r, T::one() / (two * r), -T::one() / (two * two * r * r * r)))
    }

    pub fn ln(&self) -> Result<Self> {
        if self.value <= T::zero() {
            return Err(Error::NonPositiveArgument { op: "ln", value: self.value.as_f64() });
        }
        let v = self.value;
        Ok(self.chain(v.ln(), T::one() / v, -T::one() / (v * v)))
    }

    pub fn recip(&self) -> Result<Self> {
        let v = self.value;
        if v.abs() < T::lit(DIVISOR_FLOOR) {
            return Err(Error::NearZeroDivisor { value: v.as_f64() });
        }
        let r = T::one() / v;
        Ok(self.chain(r, -r * r, T::lit(2.0) * r * r * r))
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(*self * rhs.recip()?)
    }
}

impl<T: Scalar> Add for Jet2<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<T: Scalar> AddAssign for Jet2<T> {
    fn add_assign(&mut self, rhs: Self) {
        debug_assert_eq!(self.dim, rhs.dim);
        self.order = self.order.min(rhs.order);
        self.value = self.value + rhs.value;
        for i in 0..MAX_DIM {
            self.grad[i] = self.grad[i] + rhs.grad[i];
        }
        for k in 0..PACKED {
            self.hess[k] = self.hess[k] + rhs.hess[k];
        }
        self.clear_invalid();
    }
}

impl<T: Scalar> Sub for Jet2<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<T: Scalar> SubAssign for Jet2<T> {
    fn sub_assign(&mut self, rhs: Self) {
        *self += -rhs;
    }
}

impl<T: Scalar> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim();
        let (a, b) = (self.value, rhs.value);
        let mut out = Self::constant(n, a * b);
        out.order = self.order.min(rhs.order);
        if out.order >= 1 {
            for i in 0..n {
                out.grad[i] = a * rhs.grad[i] + b * self.grad[i];
            }
        }
        if out.order >= 2 {
            for q in 0..n {
                for p in 0..=q {
                    let k = tri(p, q);
                    out.hess[k] = a * rhs.hess[k]
                        + b * self.hess[k]
                        + self.grad[p] * rhs.grad[q]
                        + self.grad[q] * rhs.grad[p];
                }
            }
        }
        out
    }
}

impl<T: Scalar> std::iter::Sum for Jet2<T> {
    /// Panics on an empty iterator since the dimension would be unknown.
    fn sum<I: Iterator<Item = Self>>(mut iter: I) -> Self {
        let first = iter.next().expect("sum of an empty jet iterator");
        iter.fold(first, |acc, j| acc + j)
    }
}

/// Sums jets, returning a zero jet of dimension `dim` when the iterator is empty.
pub fn sum_jets<T: Scalar>(dim: usize, iter: impl IntoIterator<Item = Jet2<T>>) -> Jet2<T> {
    iter.into_iter().fold(Jet2::constant(dim, T::zero()), |acc, j| acc + j)
}
