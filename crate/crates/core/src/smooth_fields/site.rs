use std::any::Any;
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};

use super::{Jet2, Scalar, MAX_DIM};
use crate::error::{Error, Result};

/// Margin by which sample points must stay inside a chart box.
pub const CHART_MARGIN: f64 = 1e-3;

/// Coordinates of a point in a single chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint<T> {
    coords: Vec<T>,
}

impl<T: Scalar> ChartPoint<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Axis-aligned open box carrying the chart domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartBox<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> ChartBox<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), found: upper.len() });
        }
        if lower.len() > MAX_DIM {
            return Err(Error::DimensionTooLarge(lower.len()));
        }
        let margin = T::lit(CHART_MARGIN);
        if lower.iter().zip(&upper).any(|(&l, &u)| !(u - l > margin + margin)) {
            return Err(Error::InvalidParameter("chart box is empty or thinner than its margin".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn contains(&self, coords: &[T], margin: T) -> bool {
        coords.len() == self.dim()
            && coords
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&c, (&l, &u))| c > l + margin && c < u - margin)
    }

    /// Validates `coords` against the box shrunk by [`CHART_MARGIN`].
    pub fn point(&self, coords: Vec<T>) -> Result<ChartPoint<T>> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: coords.len() });
        }
        // The margin check is slightly relaxed so points produced by sampling
        // the shrunk box are not rejected by rounding.
        let margin = T::lit(CHART_MARGIN * (1.0 - 1e-9));
        if !self.contains(&coords, margin) {
            return Err(Error::OutOfChart {
                coords: coords.iter().map(|c| c.as_f64()).collect(),
                margin: CHART_MARGIN,
            });
        }
        Ok(ChartPoint::new(coords))
    }

    pub fn site(&self, coords: Vec<T>) -> Result<Site<T>> {
        Ok(Site::new(self.point(coords)?))
    }
}

/// Identifies a cached quantity inside a [`Site`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MemoKey(u64);

impl MemoKey {
    pub fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(1);
        MemoKey(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

/// A chart point together with a per-point cache.
///
/// Quantities that many fields share at the same point (metric jets,
/// Christoffel symbols, frames, the mean curvature vector) are computed once
/// per site. A site is confined to one thread; evaluate different points on
/// different sites.
pub struct Site<T> {
    point: ChartPoint<T>,
    memo: RefCell<HashMap<MemoKey, Rc<dyn Any>>>,
}

impl<T: Scalar> Site<T> {
    pub fn new(point: ChartPoint<T>) -> Self {
        Self { point, memo: RefCell::new(HashMap::new()) }
    }

    pub fn point(&self) -> &ChartPoint<T> {
        &self.point
    }

    pub fn coords(&self) -> &[T] {
        self.point.coords()
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    pub fn coordinate(&self, index: usize) -> Jet2<T> {
        Jet2::variable(self.dim(), index, self.point.coords[index])
    }

    pub fn constant(&self, value: T) -> Jet2<T> {
        Jet2::constant(self.dim(), value)
    }

    /// Returns the cached value under `key`, computing it on first use.
    ///
    /// `compute` may itself consult the cache for other keys.
    pub fn memo<V: 'static>(&self, key: MemoKey, compute: impl FnOnce() -> Result<V>) -> Result<Rc<V>> {
        if let Some(hit) = self.memo.borrow().get(&key) {
            return Ok(hit.clone().downcast::<V>().expect("memo key reused with a different type"));
        }
        let value = Rc::new(compute()?);
        self.memo.borrow_mut().insert(key, value.clone());
        Ok(value)
    }
}
