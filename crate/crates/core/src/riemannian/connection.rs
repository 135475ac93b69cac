use std::rc::Rc;

use super::metric::inner_values;
use super::MetricField;
use crate::error::{Error, Result};
use crate::smooth_fields::{directional, Jet2, Scalar, Site, VectorField, VectorJet};

/// `Γ[k][i][j] = Γ^k_ij` as order-1 jets.
pub type ChristoffelJets<T> = Vec<Vec<Vec<Jet2<T>>>>;

/// Residual norm below which a Gram–Schmidt candidate counts as dependent.
pub const DEPENDENT_TOL: f64 = 1e-9;

impl<T: Scalar> MetricField<T> {
    /// Christoffel symbols of the Levi-Civita connection, cached per site.
    pub fn christoffel_jets(&self, site: &Site<T>) -> Result<Rc<ChristoffelJets<T>>> {
        site.memo(self.keys.christoffel, || {
            let n = self.dim();
            let mj = self.jets(site)?;
            let mut dg = vec![vec![vec![site.constant(T::zero()); n]; n]; n];
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        dg[i][j][l] = mj.g[i][j].partial(l)?;
                    }
                }
            }
            let half = T::lit(0.5);
            let mut gamma = vec![vec![vec![site.constant(T::zero()); n]; n]; n];
            for k in 0..n {
                for i in 0..n {
                    for j in i..n {
                        let mut acc = site.constant(T::zero());
                        for l in 0..n {
                            acc += mj.inv[k][l] * (dg[j][l][i] + dg[i][l][j] - dg[i][j][l]);
                        }
                        let acc = acc.scale(half);
                        gamma[k][i][j] = acc;
                        gamma[k][j][i] = acc;
                    }
                }
            }
            Ok(gamma)
        })
    }

    /// `Γ[k][i][j] = Γ^k_ij` at the point.
    pub fn christoffel(&self, site: &Site<T>) -> Result<Vec<Vec<Vec<T>>>> {
        let gamma = self.christoffel_jets(site)?;
        Ok(gamma.iter().map(|a| a.iter().map(|b| b.iter().map(|j| j.value()).collect()).collect()).collect())
    }

    /// `(D_X Y)^k = X(Y^k) + Γ^k_ij X^i Y^j` on jets.
    pub fn covariant_jets(&self, site: &Site<T>, x: &[Jet2<T>], y: &[Jet2<T>]) -> Result<VectorJet<T>> {
        let n = self.dim();
        let gamma = self.christoffel_jets(site)?;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = directional(x, &y[k])?;
            for i in 0..n {
                for j in 0..n {
                    acc += gamma[k][i][j] * x[i] * y[j];
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    pub fn covariant_derivative(&self, x: &VectorField<T>, y: &VectorField<T>) -> VectorField<T> {
        let (g, x, y) = (self.clone(), x.clone(), y.clone());
        VectorField::from_fn(self.dim(), move |site| g.covariant_jets(site, &x.eval(site)?, &y.eval(site)?))
    }

    /// `div W = Σ_a g(D_{e_a} W, e_a)` over an orthonormal frame of the coordinate basis.
    pub fn divergence_full(&self, site: &Site<T>, w: &[Jet2<T>]) -> Result<T> {
        let n = self.dim();
        let g = self.values(site)?;
        let basis: Vec<Vec<T>> =
            (0..n).map(|i| (0..n).map(|k| if i == k { T::one() } else { T::zero() }).collect()).collect();
        let frame = gram_schmidt_values(&g, &basis, None)?;
        let mut acc = T::zero();
        for e in &frame {
            let ej: Vec<Jet2<T>> = e.iter().map(|&c| site.constant(c)).collect();
            let dw: Vec<T> = self.covariant_jets(site, &ej, w)?.iter().map(|j| j.value()).collect();
            acc = acc + inner_values(&g, &dw, e);
        }
        Ok(acc)
    }

    /// `div W = ∂_k W^k + Γ^k_kj W^j`, the coordinate form of [`Self::divergence_full`].
    pub fn divergence_coordinate(&self, site: &Site<T>, w: &[Jet2<T>]) -> Result<T> {
        let n = self.dim();
        let gamma = self.christoffel_jets(site)?;
        let mut acc = T::zero();
        for k in 0..n {
            acc = acc + w[k].partial(k)?.value();
            for j in 0..n {
                acc = acc + gamma[k][k][j].value() * w[j].value();
            }
        }
        Ok(acc)
    }
}

/// Gram–Schmidt on tangent values.
///
/// With `skip = Some(tol)` candidates whose residual norm is below `tol` are
/// dropped; with `None` such a candidate is an error.
pub fn gram_schmidt_values<T: Scalar>(g: &[Vec<T>], candidates: &[Vec<T>], skip: Option<T>) -> Result<Vec<Vec<T>>> {
    let mut frame: Vec<Vec<T>> = Vec::new();
    for v in candidates {
        let mut w = v.clone();
        for e in &frame {
            let c = inner_values(g, v, e);
            for (wk, &ek) in w.iter_mut().zip(e) {
                *wk = *wk - c * ek;
            }
        }
        let norm = inner_values(g, &w, &w).max(T::zero()).sqrt();
        let tol = skip.unwrap_or(T::tol_floor(DEPENDENT_TOL));
        if norm < tol {
            if skip.is_some() {
                continue;
            }
            return Err(Error::Frame(format!("dependent candidate (residual norm {:e})", norm.as_f64())));
        }
        frame.push(w.into_iter().map(|c| c / norm).collect());
    }
    Ok(frame)
}

/// Gram–Schmidt on vector jets, so the frame carries derivatives.
///
/// Dependence is decided on values as in [`gram_schmidt_values`].
pub fn gram_schmidt_jets<T: Scalar>(
    metric: &MetricField<T>,
    site: &Site<T>,
    candidates: &[VectorJet<T>],
    skip: Option<T>,
) -> Result<Vec<VectorJet<T>>> {
    let mut frame: Vec<VectorJet<T>> = Vec::new();
    for v in candidates {
        let mut w = v.clone();
        for e in &frame {
            let c = metric.inner_jets(site, v, e)?;
            for (wk, &ek) in w.iter_mut().zip(e) {
                *wk -= c * ek;
            }
        }
        let n2 = metric.inner_jets(site, &w, &w)?;
        let tol = skip.unwrap_or(T::tol_floor(DEPENDENT_TOL));
        if n2.value().max(T::zero()).sqrt() < tol {
            if skip.is_some() {
                continue;
            }
            return Err(Error::Frame(format!(
                "dependent candidate (residual norm {:e})",
                n2.value().max(T::zero()).sqrt().as_f64()
            )));
        }
        let inv = n2.sqrt()?.recip()?;
        frame.push(w.into_iter().map(|c| c * inv).collect());
    }
    Ok(frame)
}
