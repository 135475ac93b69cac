use std::rc::Rc;

use super::model::{horizontal_part, vertical_part, FoliatedModel};
use crate::error::Result;
use crate::smooth_fields::{bracket, sum_vecs, values, Jet2, Scalar, ScalarField, Site, VectorField, VectorJet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Vertical,
    Horizontal,
}

impl<T: Scalar> FoliatedModel<T> {
    /// `𝒱E` on jets.
    pub fn vertical_jets(&self, site: &Site<T>, e: &[Jet2<T>]) -> Result<VectorJet<T>> {
        let fr = self.frames(site)?;
        vertical_part(self.metric(), site, &fr.vertical, e)
    }

    /// `ℋE` on jets.
    pub fn horizontal_jets(&self, site: &Site<T>, e: &[Jet2<T>]) -> Result<VectorJet<T>> {
        let fr = self.frames(site)?;
        horizontal_part(self.metric(), site, &fr.vertical, e)
    }

    pub fn project_jets(&self, site: &Site<T>, e: &[Jet2<T>], part: Part) -> Result<VectorJet<T>> {
        match part {
            Part::Vertical => self.vertical_jets(site, e),
            Part::Horizontal => self.horizontal_jets(site, e),
        }
    }

    pub fn project(&self, e: &VectorField<T>, part: Part) -> VectorField<T> {
        let (m, e) = (self.clone(), e.clone());
        VectorField::from_fn(self.dim(), move |site| m.project_jets(site, &e.eval(site)?, part))
    }

    /// `D_E F` on jets.
    pub fn cov(&self, site: &Site<T>, e: &[Jet2<T>], f: &[Jet2<T>]) -> Result<VectorJet<T>> {
        self.metric().covariant_jets(site, e, f)
    }

    /// `T_E F = 𝒱D_{𝒱E}ℋF + ℋD_{𝒱E}𝒱F`.
    pub fn tensor_t_jets(&self, site: &Site<T>, e: &[Jet2<T>], f: &[Jet2<T>]) -> Result<VectorJet<T>> {
        let ve = self.vertical_jets(site, e)?;
        let (vf, hf) = (self.vertical_jets(site, f)?, self.horizontal_jets(site, f)?);
        let a = self.vertical_jets(site, &self.cov(site, &ve, &hf)?)?;
        let b = self.horizontal_jets(site, &self.cov(site, &ve, &vf)?)?;
        Ok(a.iter().zip(&b).map(|(&x, &y)| x + y).collect())
    }

    /// `A_E F = 𝒱D_{ℋE}ℋF + ℋD_{ℋE}𝒱F`.
    pub fn tensor_a_jets(&self, site: &Site<T>, e: &[Jet2<T>], f: &[Jet2<T>]) -> Result<VectorJet<T>> {
        let he = self.horizontal_jets(site, e)?;
        let (vf, hf) = (self.vertical_jets(site, f)?, self.horizontal_jets(site, f)?);
        let a = self.vertical_jets(site, &self.cov(site, &he, &hf)?)?;
        let b = self.horizontal_jets(site, &self.cov(site, &he, &vf)?)?;
        Ok(a.iter().zip(&b).map(|(&x, &y)| x + y).collect())
    }

    pub fn tensor_t(&self, site: &Site<T>, e: &VectorField<T>, f: &VectorField<T>) -> Result<Vec<T>> {
        Ok(values(&self.tensor_t_jets(site, &e.eval(site)?, &f.eval(site)?)?))
    }

    pub fn tensor_a(&self, site: &Site<T>, e: &VectorField<T>, f: &VectorField<T>) -> Result<Vec<T>> {
        Ok(values(&self.tensor_a_jets(site, &e.eval(site)?, &f.eval(site)?)?))
    }

    /// `τ = Σ_i ℋD_{V_i}V_i` as order-1 jets, cached per site.
    pub fn tau_jets(&self, site: &Site<T>) -> Result<Rc<VectorJet<T>>> {
        site.memo(self.tau_key(), || {
            let fr = self.frames(site)?;
            let mut terms = Vec::with_capacity(fr.vertical.len());
            for v in &fr.vertical {
                terms.push(self.horizontal_jets(site, &self.cov(site, v, v)?)?);
            }
            Ok(sum_vecs(self.dim(), terms))
        })
    }

    /// Mean curvature vector `τ` at the site.
    pub fn mean_curvature_vector(&self, site: &Site<T>) -> Result<Vec<T>> {
        Ok(values(&self.tau_jets(site)?))
    }

    pub fn tau_field(&self) -> VectorField<T> {
        let m = self.clone();
        VectorField::from_fn(self.dim(), move |site| Ok((*m.tau_jets(site)?).clone()))
    }

    /// `κ(E) = g(E, τ)` on jets.
    pub fn kappa_jets(&self, site: &Site<T>, e: &[Jet2<T>]) -> Result<Jet2<T>> {
        let tau = self.tau_jets(site)?;
        self.metric().inner_jets(site, e, &tau)
    }

    /// `κ(E)` as a scalar field.
    pub fn mean_curvature_form(&self, e: &VectorField<T>) -> ScalarField<T> {
        let (m, e) = (self.clone(), e.clone());
        ScalarField::from_fn(move |site| m.kappa_jets(site, &e.eval(site)?))
    }

    /// `Σ_i g([X, V_i], V_i)`, which equals `κ(X)` for basic `X`.
    pub fn kappa_by_brackets(&self, site: &Site<T>, x: &[Jet2<T>]) -> Result<Jet2<T>> {
        let fr = self.frames(site)?;
        let mut acc = site.constant(T::zero());
        for v in &fr.vertical {
            acc += self.metric().inner_jets(site, &bracket(x, v)?, v)?;
        }
        Ok(acc)
    }

    /// `Σ_i g(D_{V_i} W, V_i)`.
    pub fn leaf_divergence(&self, site: &Site<T>, w: &[Jet2<T>]) -> Result<T> {
        let fr = self.frames(site)?;
        self.frame_divergence(site, &fr.vertical, w)
    }

    /// `Σ_a g(D_{X_a} W, X_a)`.
    pub fn horizontal_divergence(&self, site: &Site<T>, w: &[Jet2<T>]) -> Result<T> {
        let fr = self.frames(site)?;
        self.frame_divergence(site, &fr.horizontal, w)
    }

    /// Divergence on `M` over the adapted frame.
    pub fn divergence_full(&self, site: &Site<T>, w: &[Jet2<T>]) -> Result<T> {
        Ok(self.leaf_divergence(site, w)? + self.horizontal_divergence(site, w)?)
    }

    fn frame_divergence(&self, site: &Site<T>, frame: &[VectorJet<T>], w: &[Jet2<T>]) -> Result<T> {
        let mut acc = T::zero();
        for e in frame {
            acc = acc + self.metric().inner_jets(site, &self.cov(site, e, w)?, e)?.value();
        }
        Ok(acc)
    }

    /// Norm of a tangent value.
    pub fn norm(&self, site: &Site<T>, v: &[T]) -> Result<T> {
        Ok(self.metric().inner(site, v, v)?.max(T::zero()).sqrt())
    }

    /// The `i`-th vertical frame field, evaluated by Gram–Schmidt at each site.
    pub fn vertical_frame_field(&self, i: usize) -> VectorField<T> {
        let m = self.clone();
        VectorField::from_fn(self.dim(), move |site| Ok(m.frames(site)?.vertical[i].clone()))
    }

    pub fn horizontal_frame_field(&self, a: usize) -> VectorField<T> {
        let m = self.clone();
        VectorField::from_fn(self.dim(), move |site| Ok(m.frames(site)?.horizontal[a].clone()))
    }

    /// Both frames as vector fields valid near any point of the chart.
    pub fn frame_fields(&self) -> (Vec<VectorField<T>>, Vec<VectorField<T>>) {
        (
            (0..self.leaf_dim()).map(|i| self.vertical_frame_field(i)).collect(),
            (0..self.codim()).map(|a| self.horizontal_frame_field(a)).collect(),
        )
    }

    /// `ℋ∂_k` as a vector field.
    pub fn projected_coordinate_field(&self, k: usize) -> VectorField<T> {
        self.project(&VectorField::coordinate(self.dim(), k), Part::Horizontal)
    }
}
