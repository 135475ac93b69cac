use super::form::{det_jets, interior, lie_derivative, subsets, DifferentialForm};
use crate::error::{Error, Result};
use crate::foliation::FoliatedModel;
use crate::smooth_fields::{directional, values, Jet2, Scalar, Site, VectorField, VectorJet};

/// `χ_F(E_1..E_p) = det(g(E_i, V_j))` for the oriented vertical frame.
pub fn characteristic_form<T: Scalar>(model: &FoliatedModel<T>) -> DifferentialForm<T> {
    let m = model.clone();
    DifferentialForm::from_fn(model.leaf_dim(), model.dim(), move |site, args| {
        let fr = m.frames(site)?;
        let mut gm = Vec::with_capacity(args.len());
        for e in args {
            let row: Vec<Jet2<T>> =
                fr.vertical.iter().map(|v| m.metric().inner_jets(site, e, v)).collect::<Result<_>>()?;
            gm.push(row);
        }
        Ok(det_jets(&gm, site.dim()))
    })
    .expect("leaf dimension is below the chart dimension")
}

/// The metric dual `E ↦ g(E, W)` of a vector field.
pub fn one_form_dual<T: Scalar>(model: &FoliatedModel<T>, w: &VectorField<T>) -> DifferentialForm<T> {
    let (m, w) = (model.clone(), w.clone());
    DifferentialForm::from_fn(1, model.dim(), move |site, args| m.metric().inner_jets(site, &args[0], &w.eval(site)?))
        .expect("degree 1 fits any chart")
}

/// Mean curvature form `κ = g(·, τ)`.
pub fn kappa_form<T: Scalar>(model: &FoliatedModel<T>) -> DifferentialForm<T> {
    let m = model.clone();
    DifferentialForm::from_fn(1, model.dim(), move |site, args| m.kappa_jets(site, &args[0]))
        .expect("degree 1 fits any chart")
}

/// `D̃_E F = 𝒱D_E𝒱F + ℋD_EℋF` on jets.
pub fn adapted_connection_jets<T: Scalar>(
    model: &FoliatedModel<T>,
    site: &Site<T>,
    e: &[Jet2<T>],
    f: &[Jet2<T>],
) -> Result<VectorJet<T>> {
    let (vf, hf) = (model.vertical_jets(site, f)?, model.horizontal_jets(site, f)?);
    let a = model.vertical_jets(site, &model.cov(site, e, &vf)?)?;
    let b = model.horizontal_jets(site, &model.cov(site, e, &hf)?)?;
    Ok(a.iter().zip(&b).map(|(&x, &y)| x + y).collect())
}

pub fn adapted_connection<T: Scalar>(
    model: &FoliatedModel<T>,
    site: &Site<T>,
    e: &VectorField<T>,
    f: &VectorField<T>,
) -> Result<Vec<T>> {
    Ok(values(&adapted_connection_jets(model, site, &e.eval(site)?, &f.eval(site)?)?))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Connection {
    LeviCivita,
    Adapted,
}

fn connect<T: Scalar>(
    model: &FoliatedModel<T>,
    site: &Site<T>,
    conn: Connection,
    e: &[Jet2<T>],
    f: &[Jet2<T>],
) -> Result<VectorJet<T>> {
    match conn {
        Connection::LeviCivita => model.cov(site, e, f),
        Connection::Adapted => adapted_connection_jets(model, site, e, f),
    }
}

/// `−Σ_e [e(ω(e, E..)) − ω(∇_e e, E..) − Σ_i ω(e, .., ∇_e E_i, ..)]` over the adapted frame.
fn frame_codifferential<T: Scalar>(
    model: &FoliatedModel<T>,
    omega: &DifferentialForm<T>,
    site: &Site<T>,
    args: &[VectorJet<T>],
    conn: Connection,
) -> Result<Jet2<T>> {
    let fr = model.frames(site)?;
    let mut acc = site.constant(T::zero());
    for e in fr.full() {
        let mut full = vec![e.clone()];
        full.extend_from_slice(args);
        acc -= directional(e, &omega.eval(site, &full)?)?;
        full[0] = connect(model, site, conn, e, e)?;
        acc += omega.eval(site, &full)?;
        full[0] = e.clone();
        for i in 0..args.len() {
            let saved = full[i + 1].clone();
            full[i + 1] = connect(model, site, conn, e, &saved)?;
            acc += omega.eval(site, &full)?;
            full[i + 1] = saved;
        }
    }
    Ok(acc)
}

/// `δω(E_2..E_k) = −Σ_e (D_e ω)(e, E_2..E_k)` over the full orthonormal frame.
pub fn codifferential<T: Scalar>(model: &FoliatedModel<T>, omega: &DifferentialForm<T>) -> Result<DifferentialForm<T>> {
    if omega.degree() == 0 {
        return Err(Error::ZeroDegree);
    }
    let (m, w) = (model.clone(), omega.clone());
    DifferentialForm::from_fn(omega.degree() - 1, omega.dim(), move |site, args| {
        frame_codifferential(&m, &w, site, args, Connection::LeviCivita)
    })
}

/// The frame formula for `δ̃` with `D̃` throughout, applied without checking that `ω` is basic.
pub fn basic_codifferential_unchecked<T: Scalar>(
    model: &FoliatedModel<T>,
    omega: &DifferentialForm<T>,
) -> Result<DifferentialForm<T>> {
    if omega.degree() == 0 {
        return Err(Error::ZeroDegree);
    }
    let (m, w) = (model.clone(), omega.clone());
    DifferentialForm::from_fn(omega.degree() - 1, omega.dim(), move |site, args| {
        frame_codifferential(&m, &w, site, args, Connection::Adapted)
    })
}

/// `δ̃ω`, after checking on `pts` that `ω` is basic.
pub fn basic_codifferential<T: Scalar>(
    model: &FoliatedModel<T>,
    omega: &DifferentialForm<T>,
    pts: &[Vec<T>],
) -> Result<DifferentialForm<T>> {
    let defect = basic_form_defect(model, omega, pts)?;
    if !(defect <= T::lit(T::PREDICATE_TOL)) {
        return Err(Error::NotBasic { defect: defect.as_f64() });
    }
    basic_codifferential_unchecked(model, omega)
}

/// Max over spanning `W`, points and coordinate arguments of `|i(W)ω|` and `|θ(W)ω|`.
pub fn basic_form_defect<T: Scalar>(model: &FoliatedModel<T>, omega: &DifferentialForm<T>, pts: &[Vec<T>]) -> Result<T> {
    let n = model.dim();
    let k = omega.degree();
    let mut checks: Vec<DifferentialForm<T>> = Vec::new();
    for w in model.spanning() {
        if k > 0 {
            checks.push(interior(w, omega)?);
        }
        checks.push(lie_derivative(w, omega)?);
    }
    let mut worst = T::zero();
    for p in pts {
        let site = model.site(p.clone())?;
        for form in &checks {
            for idx in subsets(n, form.degree()) {
                let args: Vec<VectorJet<T>> = idx
                    .iter()
                    .map(|&i| (0..n).map(|j| site.constant(if i == j { T::one() } else { T::zero() })).collect())
                    .collect();
                worst = worst.max(form.eval(&site, &args)?.value().abs());
            }
        }
    }
    Ok(worst)
}
