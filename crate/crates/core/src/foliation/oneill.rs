use super::model::FoliatedModel;
use crate::error::Result;
use crate::smooth_fields::{add_vec, bracket, sub_vec, values, Jet2, Scalar, Site, VectorJet};

impl<T: Scalar> FoliatedModel<T> {
    /// Leaf connection `D̂_U W = 𝒱D_U W`.
    pub fn leaf_cov(&self, site: &Site<T>, u: &[Jet2<T>], w: &[Jet2<T>]) -> Result<VectorJet<T>> {
        self.vertical_jets(site, &self.cov(site, u, w)?)
    }

    /// Transversal connection on horizontal `Z`: `D*_E Z = ℋD_{ℋE}Z + ℋ[𝒱E, Z]`.
    pub fn transversal_cov(&self, site: &Site<T>, e: &[Jet2<T>], z: &[Jet2<T>]) -> Result<VectorJet<T>> {
        let (he, ve) = (self.horizontal_jets(site, e)?, self.vertical_jets(site, e)?);
        let sum = add_vec(&self.cov(site, &he, z)?, &bracket(&ve, z)?);
        self.horizontal_jets(site, &sum)
    }

    /// `R̂(U,V)W = D̂_U D̂_V W − D̂_V D̂_U W − D̂_{[U,V]} W`.
    pub fn leaf_curvature_vector(&self, site: &Site<T>, u: &[Jet2<T>], v: &[Jet2<T>], w: &[Jet2<T>]) -> Result<Vec<T>> {
        let a = self.leaf_cov(site, u, &self.leaf_cov(site, v, w)?)?;
        let b = self.leaf_cov(site, v, &self.leaf_cov(site, u, w)?)?;
        let c = self.leaf_cov(site, &bracket(u, v)?, w)?;
        Ok(values(&sub_vec(&sub_vec(&a, &b), &c)))
    }

    /// `R*(X,Y)Z` for the transversal connection.
    pub fn transversal_curvature_vector(
        &self,
        site: &Site<T>,
        x: &[Jet2<T>],
        y: &[Jet2<T>],
        z: &[Jet2<T>],
    ) -> Result<Vec<T>> {
        let a = self.transversal_cov(site, x, &self.transversal_cov(site, y, z)?)?;
        let b = self.transversal_cov(site, y, &self.transversal_cov(site, x, z)?)?;
        let c = self.transversal_cov(site, &bracket(x, y)?, z)?;
        Ok(values(&sub_vec(&sub_vec(&a, &b), &c)))
    }

    /// `R̂(U,V,W,W′) = −g(R̂(U,V)W, W′)`, same sign convention as the ambient curvature.
    pub fn leaf_curvature(
        &self,
        site: &Site<T>,
        u: &[Jet2<T>],
        v: &[Jet2<T>],
        w: &[Jet2<T>],
        w2: &[Jet2<T>],
    ) -> Result<T> {
        let r = self.leaf_curvature_vector(site, u, v, w)?;
        Ok(-self.metric().inner(site, &r, &values(w2))?)
    }

    pub fn transversal_curvature(
        &self,
        site: &Site<T>,
        x: &[Jet2<T>],
        y: &[Jet2<T>],
        z: &[Jet2<T>],
        z2: &[Jet2<T>],
    ) -> Result<T> {
        let r = self.transversal_curvature_vector(site, x, y, z)?;
        Ok(-self.metric().inner(site, &r, &values(z2))?)
    }

    /// `(D_E T)_F G = D_E(T_F G) − T_{D_E F} G − T_F(D_E G)`.
    pub fn tensor_t_derivative(
        &self,
        site: &Site<T>,
        e: &[Jet2<T>],
        f: &[Jet2<T>],
        g: &[Jet2<T>],
    ) -> Result<Vec<T>> {
        let a = self.cov(site, e, &self.tensor_t_jets(site, f, g)?)?;
        let b = self.tensor_t_jets(site, &self.cov(site, e, f)?, g)?;
        let c = self.tensor_t_jets(site, f, &self.cov(site, e, g)?)?;
        Ok(values(&sub_vec(&sub_vec(&a, &b), &c)))
    }

    /// `(D_E A)_F G`.
    pub fn tensor_a_derivative(
        &self,
        site: &Site<T>,
        e: &[Jet2<T>],
        f: &[Jet2<T>],
        g: &[Jet2<T>],
    ) -> Result<Vec<T>> {
        let a = self.cov(site, e, &self.tensor_a_jets(site, f, g)?)?;
        let b = self.tensor_a_jets(site, &self.cov(site, e, f)?, g)?;
        let c = self.tensor_a_jets(site, f, &self.cov(site, e, g)?)?;
        Ok(values(&sub_vec(&sub_vec(&a, &b), &c)))
    }
}
