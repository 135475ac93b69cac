use rand::Rng;

use super::geometry::Part;
use super::model::FoliatedModel;
use crate::error::Result;
use crate::smooth_fields::{bracket, directional, values, Jet2, Scalar, Site, VectorField, VectorJet};

/// Outcome of a numerical predicate: the worst defect seen and whether it is within tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Check<T> {
    pub holds: bool,
    pub defect: T,
}

impl<T: Scalar> Check<T> {
    pub fn from_defect(defect: T) -> Self {
        Self { holds: defect <= T::lit(T::PREDICATE_TOL), defect }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BundleLike<T> {
    Yes { defect: T },
    No { defect: T },
    /// No nonzero basic field could be built from projected coordinate fields.
    Inconclusive,
}

impl<T: Scalar> BundleLike<T> {
    pub fn holds(&self) -> Option<bool> {
        match self {
            BundleLike::Yes { .. } => Some(true),
            BundleLike::No { .. } => Some(false),
            BundleLike::Inconclusive => None,
        }
    }
}

pub(crate) fn random_unit_combo<T: Scalar>(k: usize, rng: &mut impl Rng) -> Vec<T> {
    loop {
        let a: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 {
            return a.into_iter().map(|x| T::lit(x / n)).collect();
        }
    }
}

/// `Σ_i a_i F_i` for constant coefficients.
pub fn combine<T: Scalar>(site: &Site<T>, coeffs: &[T], fields: &[VectorJet<T>]) -> VectorJet<T> {
    let n = site.dim();
    let mut out = vec![site.constant(T::zero()); n];
    for (&a, f) in coeffs.iter().zip(fields) {
        for (o, &c) in out.iter_mut().zip(f) {
            *o += c.scale(a);
        }
    }
    out
}

impl<T: Scalar> FoliatedModel<T> {
    fn jet_norm(&self, site: &Site<T>, v: &[Jet2<T>]) -> Result<T> {
        self.norm(site, &values(v))
    }

    /// `max ‖ℋ[W_i, W_j]‖` over spanning pairs.
    pub fn integrability_defect(&self, pts: &[Vec<T>]) -> Result<T> {
        let mut worst = T::zero();
        for p in pts {
            let site = self.site(p.clone())?;
            let w: Vec<VectorJet<T>> = self.spanning().iter().map(|f| f.eval(&site)).collect::<Result<_>>()?;
            for i in 0..w.len() {
                for j in i + 1..w.len() {
                    let h = self.horizontal_jets(&site, &bracket(&w[i], &w[j])?)?;
                    worst = worst.max(self.jet_norm(&site, &h)?);
                }
            }
        }
        Ok(worst)
    }

    /// Basic-field test: `X` horizontal and `[W, X]` vertical for spanning `W`.
    ///
    /// The defect is the max over points and `W` of `‖ℋX − X‖ + ‖ℋ[W, X]‖`.
    pub fn is_basic(&self, x: &VectorField<T>, pts: &[Vec<T>]) -> Result<Check<T>> {
        let mut worst = T::zero();
        for p in pts {
            let site = self.site(p.clone())?;
            let xj = x.eval(&site)?;
            let off = self.jet_norm(&site, &self.vertical_jets(&site, &xj)?)?;
            for w in self.spanning() {
                let br = bracket(&w.eval(&site)?, &xj)?;
                let h = self.jet_norm(&site, &self.horizontal_jets(&site, &br)?)?;
                worst = worst.max(off + h);
            }
        }
        Ok(Check::from_defect(worst))
    }

    /// Projected coordinate fields `ℋ∂_k` that pass [`Self::is_basic`] and are not identically small.
    pub fn basic_coordinate_fields(&self, pts: &[Vec<T>]) -> Result<Vec<VectorField<T>>> {
        Ok(self.basic_coordinate_indices(pts)?.into_iter().map(|k| self.projected_coordinate_field(k)).collect())
    }

    /// Coordinate indices `k` whose `ℋ∂_k` is accepted by [`Self::basic_coordinate_fields`].
    pub fn basic_coordinate_indices(&self, pts: &[Vec<T>]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for k in 0..self.dim() {
            let x = self.projected_coordinate_field(k);
            if !self.is_basic(&x, pts)?.holds {
                continue;
            }
            let mut nonzero = false;
            for p in pts {
                let site = self.site(p.clone())?;
                nonzero |= self.norm(&site, &x.value(&site)?)? > T::lit(1e-6);
            }
            if nonzero {
                out.push(k);
            }
        }
        Ok(out)
    }

    /// `max |W g(X, X)|` over basic `X` (projected coordinate fields and random constant combinations of them)
    /// and spanning `W`.
    pub fn is_bundle_like(&self, pts: &[Vec<T>], trials: usize, rng: &mut impl Rng) -> Result<BundleLike<T>> {
        let basic = self.basic_coordinate_fields(pts)?;
        if basic.is_empty() {
            return Ok(BundleLike::Inconclusive);
        }
        let combos: Vec<Vec<T>> = (0..trials).map(|_| random_unit_combo(basic.len(), rng)).collect();
        let mut worst = T::zero();
        for p in pts {
            let site = self.site(p.clone())?;
            let bj: Vec<VectorJet<T>> = basic.iter().map(|x| x.eval(&site)).collect::<Result<_>>()?;
            let mut xs = bj.clone();
            xs.extend(combos.iter().map(|c| combine(&site, c, &bj)));
            for w in self.spanning() {
                let wj = w.eval(&site)?;
                for x in &xs {
                    let gxx = self.metric().inner_jets(&site, x, x)?;
                    worst = worst.max(directional(&wj, &gxx)?.value().abs());
                }
            }
        }
        let c = Check::from_defect(worst);
        Ok(if c.holds { BundleLike::Yes { defect: worst } } else { BundleLike::No { defect: worst } })
    }

    /// `max ‖T_U V − (1/p) g(U, V) τ‖` over frame pairs and random vertical `U, V`.
    pub fn umbilical_defect(&self, site: &Site<T>, trials: usize, rng: &mut impl Rng) -> Result<T> {
        let fr = self.frames(site)?;
        let p = self.leaf_dim();
        let tau = values(&self.tau_jets(site)?);
        let mut pairs: Vec<(VectorJet<T>, VectorJet<T>)> = Vec::new();
        for i in 0..p {
            for j in 0..p {
                pairs.push((fr.vertical[i].clone(), fr.vertical[j].clone()));
            }
        }
        for _ in 0..trials {
            let (a, b) = (random_unit_combo(p, rng), random_unit_combo(p, rng));
            pairs.push((combine(site, &a, &fr.vertical), combine(site, &b, &fr.vertical)));
        }
        let inv_p = T::one() / T::lit(p as f64);
        let mut worst = T::zero();
        for (u, v) in &pairs {
            let t = values(&self.tensor_t_jets(site, u, v)?);
            let guv = self.metric().inner(site, &values(u), &values(v))? * inv_p;
            let r: Vec<T> = t.iter().zip(&tau).map(|(&a, &b)| a - guv * b).collect();
            worst = worst.max(self.norm(site, &r)?);
        }
        Ok(worst)
    }

    /// `max ‖A_E F‖` over all pairs of the adapted frame.
    pub fn a_tensor_norm(&self, site: &Site<T>) -> Result<T> {
        let fr = self.frames(site)?;
        let all: Vec<&VectorJet<T>> = fr.full().collect();
        let mut worst = T::zero();
        for e in &all {
            for f in &all {
                worst = worst.max(self.jet_norm(site, &self.tensor_a_jets(site, e, f)?)?);
            }
        }
        Ok(worst)
    }

    /// `max ‖A_X Y + A_Y X‖` over pairs of the horizontal frame, diagonal included.
    pub fn a_antisymmetry_defect(&self, site: &Site<T>) -> Result<T> {
        let fr = self.frames(site)?;
        let mut worst = T::zero();
        for (i, x) in fr.horizontal.iter().enumerate() {
            for y in &fr.horizontal[i..] {
                let xy = self.tensor_a_jets(site, x, y)?;
                let yx = self.tensor_a_jets(site, y, x)?;
                let sum: Vec<T> = xy.iter().zip(&yx).map(|(a, b)| a.value() + b.value()).collect();
                worst = worst.max(self.norm(site, &sum)?);
            }
        }
        Ok(worst)
    }

    /// `max_a |κ(X_a) − Σ_i g([X_a, V_i], V_i)|` over the given basic fields.
    pub fn kappa_route_defect(&self, site: &Site<T>, basic: &[VectorField<T>]) -> Result<T> {
        let mut worst = T::zero();
        for x in basic {
            let xj = x.eval(site)?;
            let a = self.kappa_jets(site, &xj)?.value();
            let b = self.kappa_by_brackets(site, &xj)?.value();
            worst = worst.max((a - b).abs());
        }
        Ok(worst)
    }

    pub fn project_value(&self, site: &Site<T>, e: &[T], part: Part) -> Result<Vec<T>> {
        let ej: Vec<Jet2<T>> = e.iter().map(|&c| site.constant(c)).collect();
        Ok(values(&self.project_jets(site, &ej, part)?))
    }
}
