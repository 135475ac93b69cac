use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::smooth_fields::{lie_bracket, ChartBox, ScalarField, Site, VectorField};

fn coord(i: usize) -> ScalarField<f64> {
    ScalarField::coordinate(i)
}

fn konst(c: f64) -> ScalarField<f64> {
    ScalarField::constant(c)
}

/// `y^{-2} δ` on `(x_1, .., x_p, y)`.
fn upper_half_space(n: usize) -> MetricField<f64> {
    let w = coord(n - 1).powi(-2);
    MetricField::diagonal(vec![w; n]).unwrap()
}

/// Round S³ in Hopf coordinates `(η, ξ1, ξ2)`.
fn hopf_sphere() -> MetricField<f64> {
    let eta = coord(0);
    MetricField::diagonal(vec![konst(1.0), eta.cos().powi(2), eta.sin().powi(2)]).unwrap()
}

/// `f²(dθ1² + dθ2²) + dx² + dy²` with `f = e^{sin x}`.
fn conformal_torus() -> MetricField<f64> {
    let f2 = coord(2).sin().scale(2.0).exp();
    MetricField::diagonal(vec![f2.clone(), f2, konst(1.0), konst(1.0)]).unwrap()
}

/// A generic metric with off-diagonal terms, used for property checks.
fn lumpy() -> MetricField<f64> {
    let (x, y, z) = (coord(0), coord(1), coord(2));
    MetricField::from_entries(3, |i, j| match (i, j) {
        (0, 0) => (&x * &y).sin().scale(0.3).exp(),
        (1, 1) => &konst(2.0) + &z.cos().scale(0.5),
        (2, 2) => &konst(1.0) + &(&x * &x),
        (0, 1) => (&y + &z).sin().scale(0.2),
        (0, 2) => (&x * &z).scale(0.1),
        _ => (&x - &y).cos().scale(0.15),
    })
    .unwrap()
}

fn site(b: &ChartBox<f64>, p: &[f64]) -> Site<f64> {
    b.site(p.to_vec()).unwrap()
}

fn cube(n: usize, lo: f64, hi: f64) -> ChartBox<f64> {
    ChartBox::new(vec![lo; n], vec![hi; n]).unwrap()
}

fn basis(n: usize, i: usize) -> Vec<f64> {
    (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
}

#[test]
fn euclidean_christoffels_vanish() {
    let g = MetricField::<f64>::euclidean(3).unwrap();
    let s = site(&cube(3, -1.0, 1.0), &[0.1, 0.2, 0.3]);
    assert!(g.christoffel(&s).unwrap().iter().flatten().flatten().all(|c| *c == 0.0));
    let d = g.covariant_derivative(&VectorField::coordinate(3, 0), &VectorField::coordinate(3, 1));
    assert!(d.value(&s).unwrap().iter().all(|c| *c == 0.0));
}

#[test]
fn half_plane_christoffels() {
    let g = upper_half_space(2);
    let b = ChartBox::new(vec![-1.0, 0.5], vec![1.0, 2.0]).unwrap();
    let y = 1.3;
    let gam = g.christoffel(&site(&b, &[0.2, y])).unwrap();
    assert!((gam[0][0][1] + 1.0 / y).abs() < 1e-14);
    assert!((gam[1][0][0] - 1.0 / y).abs() < 1e-14);
    assert!((gam[1][1][1] + 1.0 / y).abs() < 1e-14);
    assert!(gam[0][0][0].abs() < 1e-14 && gam[1][0][1].abs() < 1e-14);
}

#[test]
fn warped_christoffel() {
    let g = conformal_torus();
    let x = 0.8;
    let s = site(&cube(4, 0.0, 6.0), &[1.0, 2.0, x, 3.0]);
    let gam = g.christoffel(&s).unwrap();
    let f = x.sin().exp();
    let fx = x.cos() * f;
    assert!((gam[2][0][0] + f * fx).abs() < 1e-13);
}

#[test]
fn unit_geodesic_and_horosphere_derivatives() {
    let g = upper_half_space(3);
    let b = ChartBox::new(vec![-1.0, -1.0, 0.5], vec![1.0, 1.0, 2.0]).unwrap();
    let s = site(&b, &[0.1, -0.2, 1.4]);
    let ydy = VectorField::from_components(vec![konst(0.0), konst(0.0), coord(2)]);
    let d = g.covariant_derivative(&ydy, &ydy).value(&s).unwrap();
    assert!(d.iter().all(|c| c.abs() < 1e-14));
    let e1 = VectorField::coordinate(3, 0);
    let d = g.covariant_derivative(&e1, &e1).value(&s).unwrap();
    assert!(d[0].abs() < 1e-14 && d[1].abs() < 1e-14);
    assert!((d[2] - 1.0 / 1.4).abs() < 1e-14);
}

#[test]
fn sectional_curvature_of_space_forms() {
    let g = hopf_sphere();
    let s = site(&ChartBox::new(vec![0.1, 0.0, 0.0], vec![1.47, 6.28, 6.28]).unwrap(), &[0.6, 1.0, 2.0]);
    let (c, sn) = (0.6f64.cos(), 0.6f64.sin());
    let e = vec![0.0, 1.0 / c, 0.0];
    let f = vec![0.0, 0.0, 1.0 / sn];
    let eta = basis(3, 0);
    assert!((g.curvature_quad(&s, &e, &f, &e, &f).unwrap() - 1.0).abs() < 1e-10);
    assert!((g.curvature_quad(&s, &eta, &e, &eta, &e).unwrap() - 1.0).abs() < 1e-10);
    let v = vec![0.0, 1.0, 1.0];
    assert!((g.ricci(&s, &v, &v).unwrap() - 2.0).abs() < 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    assert!(g.constant_curvature_residual(&s, 1.0, 20, &mut rng).unwrap() < 1e-8);

    let g = upper_half_space(3);
    let y = 1.2;
    let s = site(&ChartBox::new(vec![-1.0, -1.0, 0.5], vec![1.0, 1.0, 2.0]).unwrap(), &[0.3, 0.1, y]);
    let (e, f) = (vec![y, 0.0, 0.0], vec![0.0, 0.0, y]);
    assert!((g.curvature_quad(&s, &e, &f, &e, &f).unwrap() + 1.0).abs() < 1e-10);
    assert!((g.ricci(&s, &f, &f).unwrap() + 2.0).abs() < 1e-10);
    assert!(g.constant_curvature_residual(&s, -1.0, 20, &mut rng).unwrap() < 1e-8);
    assert!(g.constant_curvature_residual(&s, 1.0, 0, &mut rng).unwrap() > 1.0);
}

#[test]
fn flat_torus_curvature_vanishes() {
    let g = MetricField::<f64>::euclidean(3).unwrap();
    let s = site(&cube(3, 0.0, 6.0), &[1.0, 2.0, 3.0]);
    assert!(g.riemann(&s).unwrap().iter().flatten().flatten().flatten().all(|r| *r == 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(g.constant_curvature_residual(&s, 0.0, 10, &mut rng).unwrap() <= 1e-10);
}

#[test]
fn euclidean_divergence_of_position_field() {
    let g = MetricField::<f64>::euclidean(2).unwrap();
    let s = site(&cube(2, -1.0, 1.0), &[0.3, -0.7]);
    let w = VectorField::from_components(vec![coord(0), coord(1)]).eval(&s).unwrap();
    assert!((g.divergence_full(&s, &w).unwrap() - 2.0).abs() < 1e-14);
    let dz = VectorField::coordinate(2, 1).eval(&s).unwrap();
    assert_eq!(g.divergence_full(&s, &dz).unwrap(), 0.0);
}

fn field(a: [f64; 3]) -> VectorField<f64> {
    let (x, y, z) = (coord(0), coord(1), coord(2));
    VectorField::from_components(vec![
        (&y * &z).scale(a[0]).sin(),
        &(&x * &x).scale(a[1]) + &z,
        (&x - &y).scale(a[2]).exp(),
    ])
}

fn pt() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-0.9f64..0.9)
}

fn coeffs() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn levi_civita_is_metric_compatible(p in pt(), a in coeffs(), b in coeffs(), c in coeffs()) {
        let g = lumpy();
        let s = site(&cube(3, -1.0, 1.0), &p);
        let (x, y, z) = (field(a).eval(&s).unwrap(), field(b).eval(&s).unwrap(), field(c).eval(&s).unwrap());
        let gyz = g.inner_jets(&s, &y, &z).unwrap();
        let lhs = crate::smooth_fields::directional(&x, &gyz).unwrap().value();
        let dxy = g.covariant_jets(&s, &x, &y).unwrap();
        let dxz = g.covariant_jets(&s, &x, &z).unwrap();
        let rhs = g.inner_jets(&s, &dxy, &z).unwrap().value() + g.inner_jets(&s, &y, &dxz).unwrap().value();
        prop_assert!((lhs - rhs).abs() <= 1e-8);
    }

    #[test]
    fn levi_civita_is_torsion_free(p in pt(), a in coeffs(), b in coeffs()) {
        let g = lumpy();
        let s = site(&cube(3, -1.0, 1.0), &p);
        let (x, y) = (field(a), field(b));
        let t = g.covariant_derivative(&x, &y) - g.covariant_derivative(&y, &x) - lie_bracket(&x, &y);
        prop_assert!(t.value(&s).unwrap().iter().all(|c| c.abs() <= 1e-8));
    }

    #[test]
    fn curvature_symmetries(p in pt(), v in prop::array::uniform4(coeffs())) {
        let g = lumpy();
        let s = site(&cube(3, -1.0, 1.0), &p);
        let [e, f, h, k] = v.map(|a| a.to_vec());
        let r = |a: &[f64], b: &[f64], c: &[f64], d: &[f64]| g.curvature_quad(&s, a, b, c, d).unwrap();
        let base = r(&e, &f, &h, &k);
        prop_assert!((base + r(&f, &e, &h, &k)).abs() <= 1e-8);
        prop_assert!((base + r(&e, &f, &k, &h)).abs() <= 1e-8);
        prop_assert!((base - r(&h, &k, &e, &f)).abs() <= 1e-8);
        prop_assert!((base + r(&f, &h, &e, &k) + r(&h, &e, &f, &k)).abs() <= 1e-8);
    }

    // The quartic form equals −g(R(E,F)G,G′) with R built from iterated covariant derivatives.
    #[test]
    fn quartic_form_matches_operator_definition(p in pt(), a in coeffs(), b in coeffs(), c in coeffs()) {
        let g = lumpy();
        let s = site(&cube(3, -1.0, 1.0), &p);
        let (e, f, h) = (field(a), field(b), field(c));
        let rv = g.covariant_derivative(&e, &g.covariant_derivative(&f, &h))
            - g.covariant_derivative(&f, &g.covariant_derivative(&e, &h))
            - g.covariant_derivative(&lie_bracket(&e, &f), &h);
        let rv = rv.value(&s).unwrap();
        let k = [0.3, -0.5, 0.8];
        let lhs = g.curvature_quad(&s, &e.value(&s).unwrap(), &f.value(&s).unwrap(), &h.value(&s).unwrap(), &k).unwrap();
        let rhs = -g.inner(&s, &rv, &k).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8);
    }

    #[test]
    fn ricci_is_frame_independent(p in pt(), u in coeffs(), w in coeffs(), seed in 0u64..1000) {
        let g = lumpy();
        let s = site(&cube(3, -1.0, 1.0), &p);
        let gv = g.values(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut frame = || {
            let cand: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect()).collect();
            gram_schmidt_values(&gv, &cand, None)
        };
        if let (Ok(f1), Ok(f2)) = (frame(), frame()) {
            let r1 = g.ricci_in_frame(&s, &u, &w, &f1).unwrap();
            let r2 = g.ricci_in_frame(&s, &u, &w, &f2).unwrap();
            let rc = g.ricci(&s, &u, &w).unwrap();
            prop_assert!((r1 - r2).abs() <= 1e-8);
            prop_assert!((r1 - rc).abs() <= 1e-8);
        }
    }

    #[test]
    fn divergence_routes_agree(p in pt(), a in coeffs()) {
        let g = lumpy();
        let s = site(&cube(3, -1.0, 1.0), &p);
        let w = field(a).eval(&s).unwrap();
        let d1 = g.divergence_full(&s, &w).unwrap();
        let d2 = g.divergence_coordinate(&s, &w).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-10 * (1.0 + d1.abs()));
    }
}
