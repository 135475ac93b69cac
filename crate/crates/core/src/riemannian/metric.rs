use std::rc::Rc;

use crate::error::{Error, Result};
use crate::smooth_fields::{Jet2, MemoKey, Scalar, ScalarField, Site, MAX_DIM};

/// Smallest eigenvalue a metric may have at an evaluated point.
pub const MIN_EIGENVALUE: f64 = 1e-9;

/// Jets of `g_ij` and `g^ij` at one point.
#[derive(Clone, Debug)]
pub struct MetricJets<T> {
    pub g: Vec<Vec<Jet2<T>>>,
    pub inv: Vec<Vec<Jet2<T>>>,
}

impl<T: Scalar> MetricJets<T> {
    pub fn values(&self) -> Vec<Vec<T>> {
        self.g.iter().map(|r| r.iter().map(|j| j.value()).collect()).collect()
    }

    pub fn inverse_values(&self) -> Vec<Vec<T>> {
        self.inv.iter().map(|r| r.iter().map(|j| j.value()).collect()).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct MetricKeys {
    pub jets: MemoKey,
    pub christoffel: MemoKey,
    pub riemann: MemoKey,
}

/// A Riemannian metric `g_ij` on a chart; only the upper triangle is stored.
#[derive(Clone, Debug)]
pub struct MetricField<T> {
    dim: usize,
    upper: Vec<ScalarField<T>>,
    pub(crate) keys: MetricKeys,
}

fn packed(i: usize, j: usize, n: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + b
}

impl<T: Scalar> MetricField<T> {
    /// Builds a metric from `entry(i, j)`, queried only for `i <= j`.
    pub fn from_entries(dim: usize, mut entry: impl FnMut(usize, usize) -> ScalarField<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("metric dimension must be positive".into()));
        }
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge(dim));
        }
        let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                upper.push(entry(i, j));
            }
        }
        Ok(Self {
            dim,
            upper,
            keys: MetricKeys { jets: MemoKey::fresh(), christoffel: MemoKey::fresh(), riemann: MemoKey::fresh() },
        })
    }

    /// Diagonal metric `Σ h_i (dx^i)²`.
    pub fn diagonal(diag: Vec<ScalarField<T>>) -> Result<Self> {
        let n = diag.len();
        Self::from_entries(n, |i, j| if i == j { diag[i].clone() } else { ScalarField::constant(T::zero()) })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::diagonal(vec![ScalarField::constant(T::one()); dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarField<T> {
        &self.upper[packed(i, j, self.dim)]
    }

    /// Metric and inverse-metric jets, cached per site.
    ///
    /// Fails with [`Error::DegenerateMetric`] unless the smallest eigenvalue
    /// exceeds [`MIN_EIGENVALUE`].
    pub fn jets(&self, site: &Site<T>) -> Result<Rc<MetricJets<T>>> {
        site.memo(self.keys.jets, || {
            let n = self.dim;
            if site.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: site.dim() });
            }
            let mut g = vec![vec![site.constant(T::zero()); n]; n];
            for i in 0..n {
                for j in i..n {
                    let v = self.entry(i, j).eval(site)?;
                    g[i][j] = v;
                    g[j][i] = v;
                }
            }
            let vals: Vec<Vec<T>> = g.iter().map(|r| r.iter().map(|j| j.value()).collect()).collect();
            let min = symmetric_eigenvalues(&vals).into_iter().fold(T::infinity(), T::min);
            if !(min > T::lit(MIN_EIGENVALUE)) {
                return Err(Error::DegenerateMetric { min_eigenvalue: min.as_f64() });
            }
            let inv = invert_jets(&g)?;
            Ok(MetricJets { g, inv })
        })
    }

    pub fn values(&self, site: &Site<T>) -> Result<Vec<Vec<T>>> {
        Ok(self.jets(site)?.values())
    }

    /// `g(u, v)` on jets.
    pub fn inner_jets(&self, site: &Site<T>, u: &[Jet2<T>], v: &[Jet2<T>]) -> Result<Jet2<T>> {
        let mj = self.jets(site)?;
        let mut acc = site.constant(T::zero());
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += mj.g[i][j] * u[i] * v[j];
            }
        }
        Ok(acc)
    }

    /// `g(u, v)` on tangent values.
    pub fn inner(&self, site: &Site<T>, u: &[T], v: &[T]) -> Result<T> {
        Ok(inner_values(&self.values(site)?, u, v))
    }
}

pub fn inner_values<T: Scalar>(g: &[Vec<T>], u: &[T], v: &[T]) -> T {
    let mut acc = T::zero();
    for (i, row) in g.iter().enumerate() {
        for (j, &gij) in row.iter().enumerate() {
            acc = acc + gij * u[i] * v[j];
        }
    }
    acc
}

/// Gauss–Jordan inverse with partial pivoting, carried out on jets.
fn invert_jets<T: Scalar>(m: &[Vec<Jet2<T>>]) -> Result<Vec<Vec<Jet2<T>>>> {
    let n = m.len();
    let dim = m[0][0].dim();
    let zero = Jet2::constant(dim, T::zero());
    let mut a: Vec<Vec<Jet2<T>>> = m.to_vec();
    let mut inv: Vec<Vec<Jet2<T>>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Jet2::constant(dim, T::one()) } else { zero }).collect()).collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].value().abs().partial_cmp(&a[s][col].value().abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].recip()?;
        for k in 0..n {
            a[col][k] = a[col][k] * p;
            inv[col][k] = inv[col][k] * p;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                for k in 0..n {
                    let (ack, ick) = (a[col][k], inv[col][k]);
                    a[r][k] -= f * ack;
                    inv[r][k] -= f * ick;
                }
            }
        }
    }
    Ok(inv)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<T: Scalar>(m: &[Vec<T>]) -> Vec<T> {
    let n = m.len();
    let mut a = m.to_vec();
    for _sweep in 0..100 {
        let off: T = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).fold(
            T::zero(),
            |acc, (i, j)| acc + a[i][j] * a[i][j],
        );
        if off <= T::epsilon() * T::epsilon() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth_fields::ChartBox;

    #[test]
    fn jacobi_eigenvalues() {
        let m: Vec<Vec<f64>> = vec![vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 5.0]];
        let mut e: Vec<f64> = symmetric_eigenvalues(&m);
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in e.iter().zip([1.0, 3.0, 5.0]) {
            assert!((got - want as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_jets_differentiate_correctly() {
        // g = diag(e^{2x}, 1) + off-diagonal x y
        let x = ScalarField::<f64>::coordinate(0);
        let y = ScalarField::coordinate(1);
        let g = MetricField::from_entries(2, |i, j| match (i, j) {
            (0, 0) => x.scale(2.0).exp(),
            (0, 1) => (&x * &y).scale(0.3),
            _ => ScalarField::constant(1.0),
        })
        .unwrap();
        let bx = ChartBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let site = bx.site(vec![0.2, 0.5]).unwrap();
        let mj = g.jets(&site).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let mut prod = site.constant(0.0);
                for j in 0..2 {
                    prod += mj.g[i][j] * mj.inv[j][k];
                }
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((prod.value() - want).abs() < 1e-14);
                assert!(prod.gradient().iter().all(|d| d.abs() < 1e-13));
                assert!(prod.hessian_matrix().iter().flatten().all(|d| d.abs() < 1e-12));
            }
        }
    }

    #[test]
    fn degenerate_metric_rejected() {
        let x = ScalarField::<f64>::coordinate(0);
        let g = MetricField::diagonal(vec![&x * &x, ScalarField::constant(1.0)]).unwrap();
        let bx = ChartBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let site = bx.site(vec![0.0, 0.5]).unwrap();
        assert!(matches!(g.jets(&site), Err(Error::DegenerateMetric { .. })));
    }
}
