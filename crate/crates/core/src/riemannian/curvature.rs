use std::rc::Rc;

use rand::Rng;

use super::connection::gram_schmidt_values;
use super::metric::inner_values;
use super::MetricField;
use crate::error::Result;
use crate::smooth_fields::{Scalar, Site, VectorField};

/// `R[i][j][k][l] = R(∂_i, ∂_j, ∂_k, ∂_l) = −g(R(∂_i, ∂_j)∂_k, ∂_l)`.
pub type CurvatureTensor<T> = Vec<Vec<Vec<Vec<T>>>>;

impl<T: Scalar> MetricField<T> {
    /// Coordinate curvature tensor, cached per site.
    ///
    /// `R(E,F)G = D_E D_F G − D_F D_E G − D_{[E,F]} G`, which in coordinates is
    /// `(R(∂_i,∂_j)∂_k)^m = ∂_iΓ^m_jk − ∂_jΓ^m_ik + Γ^p_jk Γ^m_ip − Γ^p_ik Γ^m_jp`.
    pub fn riemann(&self, site: &Site<T>) -> Result<Rc<CurvatureTensor<T>>> {
        site.memo(self.keys.riemann, || {
            let n = self.dim();
            let gamma = self.christoffel_jets(site)?;
            let g = self.values(site)?;
            let mut dgamma = vec![vec![vec![vec![T::zero(); n]; n]; n]; n];
            for m in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for i in 0..n {
                            dgamma[i][m][j][k] = gamma[m][j][k].partial(i)?.value();
                        }
                    }
                }
            }
            let gv = |m: usize, i: usize, j: usize| gamma[m][i][j].value();
            let mut quad = vec![vec![vec![vec![T::zero(); n]; n]; n]; n];
            let mut rvec = vec![T::zero(); n];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for (m, r) in rvec.iter_mut().enumerate() {
                            let mut acc = dgamma[i][m][j][k] - dgamma[j][m][i][k];
                            for p in 0..n {
                                acc = acc + gv(p, j, k) * gv(m, i, p) - gv(p, i, k) * gv(m, j, p);
                            }
                            *r = acc;
                        }
                        for l in 0..n {
                            let mut acc = T::zero();
                            for (m, &r) in rvec.iter().enumerate() {
                                acc = acc + r * g[m][l];
                            }
                            quad[i][j][k][l] = -acc;
                        }
                    }
                }
            }
            Ok(quad)
        })
    }

    /// `R(E, F, G, G′)` for tangent values at the point.
    pub fn curvature_quad(&self, site: &Site<T>, e: &[T], f: &[T], g: &[T], h: &[T]) -> Result<T> {
        let r = self.riemann(site)?;
        Ok(contract4(&r, e, f, g, h))
    }

    pub fn curvature_quad_fields(
        &self,
        site: &Site<T>,
        e: &VectorField<T>,
        f: &VectorField<T>,
        g: &VectorField<T>,
        h: &VectorField<T>,
    ) -> Result<T> {
        self.curvature_quad(site, &e.value(site)?, &f.value(site)?, &g.value(site)?, &h.value(site)?)
    }

    /// `Ric(E, F) = Σ_ab g^ab R(E, ∂_a, F, ∂_b)`.
    pub fn ricci(&self, site: &Site<T>, e: &[T], f: &[T]) -> Result<T> {
        let n = self.dim();
        let r = self.riemann(site)?;
        let inv = self.jets(site)?.inverse_values();
        let mut acc = T::zero();
        for a in 0..n {
            for b in 0..n {
                let mut s = T::zero();
                for i in 0..n {
                    for k in 0..n {
                        s = s + r[i][a][k][b] * e[i] * f[k];
                    }
                }
                acc = acc + inv[a][b] * s;
            }
        }
        Ok(acc)
    }

    /// `Σ_a R(E, e_a, F, e_a)` over a supplied orthonormal frame.
    pub fn ricci_in_frame(&self, site: &Site<T>, e: &[T], f: &[T], frame: &[Vec<T>]) -> Result<T> {
        let r = self.riemann(site)?;
        Ok(frame.iter().fold(T::zero(), |acc, ea| acc + contract4(&r, e, ea, f, ea)))
    }

    /// Max over random orthonormal pairs of `|R(E,F,E,F) − c|`, plus all pairs of the coordinate frame.
    pub fn constant_curvature_residual(&self, site: &Site<T>, c: T, trials: usize, rng: &mut impl Rng) -> Result<T> {
        let n = self.dim();
        let g = self.values(site)?;
        let r = self.riemann(site)?;
        let basis: Vec<Vec<T>> =
            (0..n).map(|i| (0..n).map(|k| if i == k { T::one() } else { T::zero() }).collect()).collect();
        let frame = gram_schmidt_values(&g, &basis, None)?;
        let mut pairs: Vec<(Vec<T>, Vec<T>)> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((frame[a].clone(), frame[b].clone()));
            }
        }
        for _ in 0..trials {
            let mut draw = || (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect::<Vec<T>>();
            let cand = [draw(), draw()];
            if let Ok(p) = gram_schmidt_values(&g, &cand, None) {
                pairs.push((p[0].clone(), p[1].clone()));
            }
        }
        let mut worst = T::zero();
        for (e, f) in &pairs {
            let expected = c * (inner_values(&g, e, e) * inner_values(&g, f, f) - inner_values(&g, e, f).powi(2));
            worst = worst.max((contract4(&r, e, f, e, f) - expected).abs());
        }
        Ok(worst)
    }
}

pub fn contract4<T: Scalar>(r: &CurvatureTensor<T>, e: &[T], f: &[T], g: &[T], h: &[T]) -> T {
    let n = e.len();
    let mut acc = T::zero();
    for i in 0..n {
        if e[i] == T::zero() {
            continue;
        }
        for j in 0..n {
            let ef = e[i] * f[j];
            if ef == T::zero() {
                continue;
            }
            for k in 0..n {
                let efg = ef * g[k];
                if efg == T::zero() {
                    continue;
                }
                for l in 0..n {
                    acc = acc + efg * h[l] * r[i][j][k][l];
                }
            }
        }
    }
    acc
}
