use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::smooth_fields::{bracket, directional, Jet2, Scalar, ScalarField, Site, VectorField, VectorJet};

type FormRule<T> = dyn Fn(&Site<T>, &[VectorJet<T>]) -> Result<Jet2<T>> + Send + Sync;

/// An alternating `k`-form, evaluated on `k` vector jets at a site.
#[derive(Clone)]
pub struct DifferentialForm<T> {
    degree: usize,
    dim: usize,
    rule: Arc<FormRule<T>>,
}

impl<T> fmt::Debug for DifferentialForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DifferentialForm(degree={}, dim={})", self.degree, self.dim)
    }
}

/// Sign of the permutation taking `0..n` to `perm`.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// All increasing `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// All permutations of `0..n` with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out.into_iter().map(|p| {
        let s = permutation_sign(&p);
        (p, s)
    })
    .collect()
}

/// Leibniz determinant of a square jet matrix.
pub fn det_jets<T: Scalar>(m: &[Vec<Jet2<T>>], dim: usize) -> Jet2<T> {
    let n = m.len();
    let mut acc = Jet2::constant(dim, T::zero());
    for (perm, sign) in permutations(n) {
        let mut term = Jet2::constant(dim, T::lit(sign as f64));
        for (i, &j) in perm.iter().enumerate() {
            term = term * m[i][j];
        }
        acc += term;
    }
    acc
}

impl<T: Scalar> DifferentialForm<T> {
    /// Wraps an evaluation rule; the rule must be alternating and multilinear.
    pub fn from_fn(
        degree: usize,
        dim: usize,
        rule: impl Fn(&Site<T>, &[VectorJet<T>]) -> Result<Jet2<T>> + Send + Sync + 'static,
    ) -> Result<Self> {
        if degree > dim {
            return Err(Error::DegreeOverflow { degree, dim });
        }
        Ok(Self { degree, dim, rule: Arc::new(rule) })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, site: &Site<T>, args: &[VectorJet<T>]) -> Result<Jet2<T>> {
        if args.len() != self.degree {
            return Err(Error::DimensionMismatch { expected: self.degree, found: args.len() });
        }
        if site.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: site.dim() });
        }
        (self.rule)(site, args)
    }

    pub fn eval_fields(&self, site: &Site<T>, args: &[VectorField<T>]) -> Result<T> {
        let jets: Vec<VectorJet<T>> = args.iter().map(|a| a.eval(site)).collect::<Result<_>>()?;
        Ok(self.eval(site, &jets)?.value())
    }

    /// A function viewed as a 0-form.
    pub fn function(dim: usize, f: ScalarField<T>) -> Self {
        Self { degree: 0, dim, rule: Arc::new(move |site, _| f.eval(site)) }
    }

    pub fn zero(dim: usize, degree: usize) -> Result<Self> {
        Self::from_fn(degree, dim, |site, _| Ok(site.constant(T::zero())))
    }

    /// `f dx^{i_1} ∧ … ∧ dx^{i_k}`.
    pub fn monomial(dim: usize, indices: Vec<usize>, coeff: ScalarField<T>) -> Result<Self> {
        if indices.iter().any(|&i| i >= dim) {
            return Err(Error::InvalidParameter(format!("coordinate index out of range in {indices:?}")));
        }
        let k = indices.len();
        let perms = permutations(k);
        Self::from_fn(k, dim, move |site, args| {
            let c = coeff.eval(site)?;
            let mut acc = site.constant(T::zero());
            for (perm, sign) in &perms {
                let mut term = c.scale(T::lit(*sign as f64));
                for (a, &b) in perm.iter().enumerate() {
                    term = term * args[a][indices[b]];
                }
                acc += term;
            }
            Ok(acc)
        })
    }

    /// `Σ_k c_k dx^k`.
    pub fn one_form(components: Vec<ScalarField<T>>) -> Self {
        let dim = components.len();
        Self {
            degree: 1,
            dim,
            rule: Arc::new(move |site, args| {
                let mut acc = site.constant(T::zero());
                for (c, &e) in components.iter().zip(&args[0]) {
                    acc += c.eval(site)? * e;
                }
                Ok(acc)
            }),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::InvalidParameter(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let (a, b) = (self.clone(), other.clone());
        Self::from_fn(self.degree, self.dim, move |site, args| Ok(a.eval(site, args)? + b.eval(site, args)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-T::one()))
    }

    pub fn scale(&self, s: T) -> Self {
        let a = self.clone();
        Self { degree: self.degree, dim: self.dim, rule: Arc::new(move |site, args| Ok(a.eval(site, args)?.scale(s))) }
    }

    /// `f ω` for a function `f`.
    pub fn times(&self, f: &ScalarField<T>) -> Self {
        let (a, f) = (self.clone(), f.clone());
        Self {
            degree: self.degree,
            dim: self.dim,
            rule: Arc::new(move |site, args| Ok(f.eval(site)? * a.eval(site, args)?)),
        }
    }
}

/// `(α∧β)(E_1..E_{k+l}) = Σ_shuffles sign · α(E_σ…) β(E_σ…)`, with no normalizing factor.
pub fn wedge<T: Scalar>(alpha: &DifferentialForm<T>, beta: &DifferentialForm<T>) -> Result<DifferentialForm<T>> {
    let (k, l) = (alpha.degree(), beta.degree());
    let n = alpha.dim();
    if beta.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: beta.dim() });
    }
    if k + l > n {
        return Err(Error::DegreeOverflow { degree: k + l, dim: n });
    }
    let shuffles: Vec<(Vec<usize>, Vec<usize>, T)> = subsets(k + l, k)
        .into_iter()
        .map(|s| {
            let rest: Vec<usize> = (0..k + l).filter(|i| !s.contains(i)).collect();
            let perm: Vec<usize> = s.iter().chain(&rest).copied().collect();
            let sign = T::lit(permutation_sign(&perm) as f64);
            (s, rest, sign)
        })
        .collect();
    let (a, b) = (alpha.clone(), beta.clone());
    DifferentialForm::from_fn(k + l, n, move |site, args| {
        let mut acc = site.constant(T::zero());
        for (s, rest, sign) in &shuffles {
            let aa: Vec<VectorJet<T>> = s.iter().map(|&i| args[i].clone()).collect();
            let bb: Vec<VectorJet<T>> = rest.iter().map(|&i| args[i].clone()).collect();
            acc += (a.eval(site, &aa)? * b.eval(site, &bb)?).scale(*sign);
        }
        Ok(acc)
    })
}

fn without<T: Clone>(args: &[T], skip: &[usize]) -> Vec<T> {
    args.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, a)| a.clone()).collect()
}

/// Exterior derivative:
/// `dω(E_0..E_k) = Σ_i (−1)^i E_i(ω(..Ê_i..)) + Σ_{i<j} (−1)^{i+j} ω([E_i,E_j], ..Ê_i..Ê_j..)`.
pub fn exterior_derivative<T: Scalar>(omega: &DifferentialForm<T>) -> Result<DifferentialForm<T>> {
    let k = omega.degree();
    let w = omega.clone();
    DifferentialForm::from_fn(k + 1, omega.dim(), move |site, args| {
        let mut acc = site.constant(T::zero());
        for i in 0..=k {
            let sign = if i % 2 == 0 { T::one() } else { -T::one() };
            let val = w.eval(site, &without(args, &[i]))?;
            acc += directional(&args[i], &val)?.scale(sign);
        }
        for i in 0..=k {
            for j in i + 1..=k {
                let sign = if (i + j) % 2 == 0 { T::one() } else { -T::one() };
                let mut rest = vec![bracket(&args[i], &args[j])?];
                rest.extend(without(args, &[i, j]));
                acc += w.eval(site, &rest)?.scale(sign);
            }
        }
        Ok(acc)
    })
}

/// `i(W)ω = ω(W, …)`.
pub fn interior<T: Scalar>(w: &VectorField<T>, omega: &DifferentialForm<T>) -> Result<DifferentialForm<T>> {
    if omega.degree() == 0 {
        return Err(Error::ZeroDegree);
    }
    let (w, om) = (w.clone(), omega.clone());
    DifferentialForm::from_fn(omega.degree() - 1, omega.dim(), move |site, args| {
        let mut full = vec![w.eval(site)?];
        full.extend_from_slice(args);
        om.eval(site, &full)
    })
}

/// Lie derivative by Cartan's rule `θ(W) = i(W)d + d i(W)`.
pub fn lie_derivative<T: Scalar>(w: &VectorField<T>, omega: &DifferentialForm<T>) -> Result<DifferentialForm<T>> {
    let a = interior(w, &exterior_derivative(omega)?)?;
    if omega.degree() == 0 {
        return Ok(a);
    }
    a.add(&exterior_derivative(&interior(w, omega)?)?)
}
