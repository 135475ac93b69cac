use std::rc::Rc;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::riemannian::{gram_schmidt_jets, MetricField};
use crate::smooth_fields::{values, ChartBox, Jet2, MemoKey, Scalar, Site, VectorField, VectorJet};

/// Property claims a model makes about itself; each is checked, never trusted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Claims {
    /// Constant sectional curvature of the ambient metric.
    pub curvature: Option<f64>,
    pub bundle_like: Option<bool>,
    pub umbilical: Option<bool>,
}

/// Residual norm below which a projected coordinate field is dropped from the horizontal frame.
pub const HORIZONTAL_SKIP_TOL: f64 = 1e-9;

/// Orthonormal vertical and horizontal frames at one point, as jets.
#[derive(Clone, Debug)]
pub struct FramePair<T> {
    pub vertical: Vec<VectorJet<T>>,
    pub horizontal: Vec<VectorJet<T>>,
}

impl<T: Scalar> FramePair<T> {
    pub fn vertical_values(&self) -> Vec<Vec<T>> {
        self.vertical.iter().map(|v| values(v)).collect()
    }

    pub fn horizontal_values(&self) -> Vec<Vec<T>> {
        self.horizontal.iter().map(|v| values(v)).collect()
    }

    /// Vertical frame followed by horizontal frame.
    pub fn full(&self) -> impl Iterator<Item = &VectorJet<T>> {
        self.vertical.iter().chain(&self.horizontal)
    }
}

#[derive(Clone)]
struct Inner<T> {
    name: String,
    domain: ChartBox<T>,
    metric: MetricField<T>,
    spanning: Vec<VectorField<T>>,
    orientation: T,
    claims: Claims,
    periodic: Vec<bool>,
    coordinate_names: Vec<String>,
    frame_key: MemoKey,
    tau_key: MemoKey,
}

/// A Riemannian chart with a foliation given by `p` spanning vertical fields.
#[derive(Clone)]
pub struct FoliatedModel<T> {
    inner: Arc<Inner<T>>,
}

impl<T> std::fmt::Debug for FoliatedModel<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FoliatedModel({})", self.inner.name)
    }
}

impl<T: Scalar> FoliatedModel<T> {
    /// `orientation` must be `1` or `-1`; it multiplies the first vertical frame field.
    pub fn new(
        name: impl Into<String>,
        domain: ChartBox<T>,
        metric: MetricField<T>,
        spanning: Vec<VectorField<T>>,
        orientation: i8,
    ) -> Result<Self> {
        let n = domain.dim();
        if metric.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: metric.dim() });
        }
        let p = spanning.len();
        if p == 0 || p >= n {
            return Err(Error::InvalidParameter(format!("leaf dimension {p} must satisfy 1 <= p < {n}")));
        }
        if let Some(w) = spanning.iter().find(|w| w.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: w.dim() });
        }
        if orientation != 1 && orientation != -1 {
            return Err(Error::InvalidParameter(format!("orientation sign must be ±1, got {orientation}")));
        }
        Ok(Self {
            inner: Arc::new(Inner {
                name: name.into(),
                domain,
                metric,
                spanning,
                orientation: T::lit(orientation as f64),
                claims: Claims::default(),
                periodic: vec![false; n],
                coordinate_names: (0..n).map(|i| format!("x{i}")).collect(),
                frame_key: MemoKey::fresh(),
                tau_key: MemoKey::fresh(),
            }),
        })
    }

    fn edit(mut self, f: impl FnOnce(&mut Inner<T>)) -> Self {
        f(Arc::make_mut(&mut self.inner));
        self
    }

    pub fn with_claims(self, claims: Claims) -> Self {
        self.edit(|m| m.claims = claims)
    }

    /// Marks coordinates whose chart box is one full period.
    pub fn with_periodic(self, periodic: Vec<bool>) -> Self {
        self.edit(|m| m.periodic = periodic)
    }

    pub fn with_coordinate_names(self, names: Vec<String>) -> Self {
        self.edit(|m| m.coordinate_names = names)
    }

    /// The same foliated metric with a different spanning set for the leaves.
    pub fn with_spanning(&self, spanning: Vec<VectorField<T>>) -> Result<Self> {
        let m = &self.inner;
        let orient = if m.orientation > T::zero() { 1 } else { -1 };
        Ok(FoliatedModel::new(m.name.clone(), m.domain.clone(), m.metric.clone(), spanning, orient)?
            .with_claims(m.claims.clone())
            .with_periodic(m.periodic.clone())
            .with_coordinate_names(m.coordinate_names.clone()))
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn domain(&self) -> &ChartBox<T> {
        &self.inner.domain
    }

    pub fn metric(&self) -> &MetricField<T> {
        &self.inner.metric
    }

    pub fn spanning(&self) -> &[VectorField<T>] {
        &self.inner.spanning
    }

    pub fn claims(&self) -> &Claims {
        &self.inner.claims
    }

    pub fn periodic(&self) -> &[bool] {
        &self.inner.periodic
    }

    pub fn coordinate_names(&self) -> &[String] {
        &self.inner.coordinate_names
    }

    pub fn dim(&self) -> usize {
        self.inner.domain.dim()
    }

    /// Leaf dimension `p`.
    pub fn leaf_dim(&self) -> usize {
        self.inner.spanning.len()
    }

    /// Codimension `q`.
    pub fn codim(&self) -> usize {
        self.dim() - self.leaf_dim()
    }

    pub fn site(&self, coords: Vec<T>) -> Result<Site<T>> {
        self.inner.domain.site(coords)
    }

    /// Orthonormal frames at the site, cached.
    ///
    /// Vertical: Gram–Schmidt on the spanning fields in declaration order,
    /// with the first field multiplied by the orientation sign. Horizontal:
    /// Gram–Schmidt on `ℋ∂_k` in coordinate order, skipping candidates whose
    /// residual norm is below [`HORIZONTAL_SKIP_TOL`].
    pub fn frames(&self, site: &Site<T>) -> Result<Rc<FramePair<T>>> {
        site.memo(self.inner.frame_key, || {
            let g = &self.inner.metric;
            let spans: Vec<VectorJet<T>> = self.inner.spanning.iter().map(|w| w.eval(site)).collect::<Result<_>>()?;
            let mut vertical = gram_schmidt_jets(g, site, &spans, None)
                .map_err(|e| Error::Frame(format!("vertical distribution is rank deficient: {e}")))?;
            for c in vertical[0].iter_mut() {
                *c = c.scale(self.inner.orientation);
            }
            let n = self.dim();
            let mut cands = Vec::with_capacity(n);
            for k in 0..n {
                let dk: Vec<Jet2<T>> =
                    (0..n).map(|i| site.constant(if i == k { T::one() } else { T::zero() })).collect();
                cands.push(horizontal_part(g, site, &vertical, &dk)?);
            }
            let horizontal = gram_schmidt_jets(g, site, &cands, Some(T::tol_floor(HORIZONTAL_SKIP_TOL)))?;
            if horizontal.len() != self.codim() {
                return Err(Error::Frame(format!(
                    "horizontal frame has {} fields, expected {}",
                    horizontal.len(),
                    self.codim()
                )));
            }
            Ok(FramePair { vertical, horizontal })
        })
    }

    pub(crate) fn tau_key(&self) -> MemoKey {
        self.inner.tau_key
    }
}

/// `𝒱E = Σ g(E, V_i) V_i` for an orthonormal vertical frame.
pub(crate) fn vertical_part<T: Scalar>(
    g: &MetricField<T>,
    site: &Site<T>,
    vframe: &[VectorJet<T>],
    e: &[Jet2<T>],
) -> Result<VectorJet<T>> {
    let mut out: VectorJet<T> = vec![site.constant(T::zero()); e.len()];
    for v in vframe {
        let c = g.inner_jets(site, e, v)?;
        for (o, &vk) in out.iter_mut().zip(v) {
            *o += c * vk;
        }
    }
    Ok(out)
}

pub(crate) fn horizontal_part<T: Scalar>(
    g: &MetricField<T>,
    site: &Site<T>,
    vframe: &[VectorJet<T>],
    e: &[Jet2<T>],
) -> Result<VectorJet<T>> {
    let v = vertical_part(g, site, vframe, e)?;
    Ok(e.iter().zip(&v).map(|(&a, &b)| a - b).collect())
}
