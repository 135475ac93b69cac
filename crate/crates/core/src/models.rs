//! Built-in foliated models with known closed-form geometry.
//!
//! Every model carries a table of expected properties that is checked against
//! the numerical predicates when the model is built; a model that fails its
//! own table is an error.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exterior::{basic_form_defect, kappa_form};
use crate::foliation::{BundleLike, Claims, FoliatedModel};
use crate::riemannian::MetricField;
use crate::smooth_fields::{parse_expr, ChartBox, Expr, Scalar, ScalarField, VectorField, CHART_MARGIN};

pub const MODEL_NAMES: [&str; 5] = ["flat_torus_flow", "hopf_s3", "horosphere", "conformal_torus", "twisted_flow"];

/// Points used to validate a model's property table at build time.
pub const VALIDATION_POINTS: usize = 50;
pub const VALIDATION_SEED: u64 = 0x5EED;

/// Expected properties; `None` means the model makes no claim.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Expectations {
    pub bundle_like: Option<bool>,
    pub umbilical: Option<bool>,
    pub curvature: Option<f64>,
    pub kappa_basic: Option<bool>,
    pub a_zero: Option<bool>,
    pub tau_zero: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub expected: Expectations,
}

/// Properties established numerically at build time.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelProfile {
    pub bundle_like: Option<bool>,
    pub bundle_like_defect: f64,
    pub umbilical: bool,
    pub umbilical_defect: f64,
    /// Constant curvature, present only when claimed and validated.
    pub curvature: Option<f64>,
    pub curvature_defect: Option<f64>,
    pub kappa_basic: bool,
    pub kappa_basic_defect: f64,
    pub a_zero: bool,
    pub a_norm: f64,
    pub tau_zero: bool,
    pub tau_norm: f64,
    pub div_h_tau_zero: bool,
    pub div_h_tau_max: f64,
    pub integrability_defect: f64,
}

pub struct BuiltModel<T> {
    pub model: FoliatedModel<T>,
    pub spec: ModelSpec,
    pub profile: ModelProfile,
}

impl<T> std::fmt::Debug for BuiltModel<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BuiltModel").field("spec", &self.spec).field("profile", &self.profile).finish()
    }
}

/// Splits `name(a, b)` into the name and positional arguments.
fn split_call(raw: &str) -> Result<(String, Vec<String>)> {
    let raw = raw.trim();
    let Some(open) = raw.find('(') else {
        return Ok((raw.to_string(), Vec::new()));
    };
    if !raw.ends_with(')') {
        return Err(Error::InvalidParameter(format!("unbalanced parentheses in `{raw}`")));
    }
    let inner = &raw[open + 1..raw.len() - 1];
    let mut args = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push(inner[start..i].trim().to_string());
                start = i + 1;
            }
            _ => {}
        }
    }
    if !inner.trim().is_empty() {
        args.push(inner[start..].trim().to_string());
    }
    Ok((raw[..open].trim().to_string(), args))
}

struct Params {
    model: String,
    map: BTreeMap<String, String>,
}

impl Params {
    fn new(model: &str, positional: &[&str], args: Vec<String>, named: &BTreeMap<String, String>, allowed: &[&str]) -> Result<Self> {
        if args.len() > positional.len() {
            return Err(Error::InvalidParameter(format!("{model} takes at most {} positional arguments", positional.len())));
        }
        let mut map: BTreeMap<String, String> = positional.iter().map(|s| s.to_string()).zip(args).collect();
        for (k, v) in named {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "unknown parameter `{k}` for {model} (accepted: {})",
                    allowed.join(", ")
                )));
            }
            map.insert(k.clone(), v.clone());
        }
        Ok(Self { model: model.to_string(), map })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn expr(&self, key: &str, default: &str, vars: &[&str]) -> Result<(Expr, bool)> {
        let src = self.get(key).unwrap_or(default);
        let e = parse_expr(src, vars)
            .map_err(|e| Error::InvalidParameter(format!("{}: parameter `{key}`: {e}", self.model)))?;
        let is_default = parse_expr(default, vars).map(|d| d == e).unwrap_or(false);
        Ok((e, is_default))
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => parse_expr(s, &[])
                .ok()
                .and_then(|e| e.constant_value())
                .filter(|v| v.is_finite())
                .map(Some)
                .ok_or_else(|| Error::InvalidParameter(format!("{}: `{key}` must be a number, got `{s}`", self.model))),
        }
    }

    fn orientation(&self) -> Result<i8> {
        match self.number("orientation")? {
            None => Ok(1),
            Some(v) if v == 1.0 => Ok(1),
            Some(v) if v == -1.0 => Ok(-1),
            Some(v) => Err(Error::InvalidParameter(format!("orientation must be 1 or -1, got {v}"))),
        }
    }
}

fn konst<T: Scalar>(c: f64) -> ScalarField<T> {
    ScalarField::constant(T::lit(c))
}

fn cube<T: Scalar>(n: usize, lo: f64, hi: f64) -> Result<ChartBox<T>> {
    ChartBox::new(vec![T::lit(lo); n], vec![T::lit(hi); n])
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Builds the named model and validates its expected-property table.
///
/// `name` may carry positional arguments, as in `horosphere(3)` or
/// `conformal_torus(exp(cos(y)))`; `params` supplies named ones.
pub fn build_model<T: Scalar>(name: &str, params: &BTreeMap<String, String>) -> Result<BuiltModel<T>> {
    let (model, spec) = construct::<T>(name, params)?;
    let profile = validate(&model, &spec)?;
    Ok(BuiltModel { model, spec, profile })
}

/// Builds the model without checking its property table.
pub fn construct<T: Scalar>(name: &str, params: &BTreeMap<String, String>) -> Result<(FoliatedModel<T>, ModelSpec)> {
    let (base, args) = split_call(name)?;
    let exp;
    let model = match base.as_str() {
        "flat_torus_flow" => {
            let p = Params::new(&base, &[], args, params, &["orientation"])?;
            exp = Expectations {
                bundle_like: Some(true),
                umbilical: Some(true),
                curvature: Some(0.0),
                kappa_basic: Some(true),
                a_zero: Some(true),
                tau_zero: Some(true),
            };
            let model = FoliatedModel::new(
                "flat_torus_flow",
                cube(3, 0.0, 2.0 * PI)?,
                MetricField::euclidean(3)?,
                vec![VectorField::coordinate(3, 2)],
                p.orientation()?,
            )?
            .with_periodic(vec![true; 3])
            .with_coordinate_names(names(&["x", "y", "z"]));
            (model, p)
        }
        "hopf_s3" => {
            let p = Params::new(&base, &[], args, params, &["orientation"])?;
            exp = Expectations {
                bundle_like: Some(true),
                umbilical: Some(true),
                curvature: Some(1.0),
                kappa_basic: Some(true),
                a_zero: Some(false),
                tau_zero: Some(true),
            };
            let eta = ScalarField::<T>::coordinate(0);
            let metric = MetricField::diagonal(vec![konst(1.0), eta.cos().powi(2), eta.sin().powi(2)])?;
            let domain = ChartBox::new(
                vec![T::lit(0.1), T::zero(), T::zero()],
                vec![T::lit(PI / 2.0 - 0.1), T::lit(2.0 * PI), T::lit(2.0 * PI)],
            )?;
            let v = VectorField::constant(3, vec![T::zero(), T::one(), T::one()]);
            let model = FoliatedModel::new("hopf_s3", domain, metric, vec![v], p.orientation()?)?
                .with_periodic(vec![false, true, true])
                .with_coordinate_names(names(&["eta", "xi1", "xi2"]));
            (model, p)
        }
        "horosphere" => {
            let p = Params::new(&base, &["p"], args, params, &["p", "orientation"])?;
            let leaves = p.number("p")?.unwrap_or(2.0);
            if leaves.fract() != 0.0 || !(1.0..=5.0).contains(&leaves) {
                return Err(Error::InvalidParameter(format!("horosphere: p must be an integer in 1..=5, got {leaves}")));
            }
            let leaves = leaves as usize;
            let n = leaves + 1;
            exp = Expectations {
                bundle_like: Some(true),
                umbilical: Some(true),
                curvature: Some(-1.0),
                kappa_basic: Some(true),
                a_zero: Some(true),
                tau_zero: Some(false),
            };
            let w = ScalarField::<T>::coordinate(n - 1).powi(-2);
            let metric = MetricField::diagonal(vec![w; n])?;
            let mut lo = vec![T::lit(-1.0); n];
            let mut hi = vec![T::one(); n];
            lo[n - 1] = T::lit(0.5);
            hi[n - 1] = T::lit(2.0);
            let spanning = (0..leaves).map(|i| VectorField::coordinate(n, i)).collect();
            let mut cn: Vec<String> = (1..=leaves).map(|i| format!("x{i}")).collect();
            cn.push("y".into());
            let model = FoliatedModel::new(format!("horosphere({leaves})"), ChartBox::new(lo, hi)?, metric, spanning, p.orientation()?)?
                .with_coordinate_names(cn);
            (model, p)
        }
        "conformal_torus" => {
            let p = Params::new(&base, &["f"], args, params, &["f", "c", "orientation"])?;
            let vars = ["theta1", "theta2", "x", "y"];
            let (f, is_default) = p.expr("f", "exp(sin(x))", &vars)?;
            if f.variables().iter().any(|&v| v < 2) {
                return Err(Error::InvalidParameter("conformal_torus: f may depend only on x and y".into()));
            }
            let constant_f = f.variables().is_empty();
            exp = Expectations {
                bundle_like: Some(true),
                umbilical: Some(true),
                curvature: p.number("c")?,
                kappa_basic: Some(true),
                a_zero: Some(true),
                tau_zero: if constant_f { Some(true) } else if is_default { Some(false) } else { None },
            };
            let f2 = f.to_field::<T>().powi(2);
            let metric = MetricField::diagonal(vec![f2.clone(), f2, konst(1.0), konst(1.0)])?;
            let spanning = vec![VectorField::coordinate(4, 0), VectorField::coordinate(4, 1)];
            let model = FoliatedModel::new("conformal_torus", cube(4, 0.0, 2.0 * PI)?, metric, spanning, p.orientation()?)?
                .with_periodic(vec![true; 4])
                .with_coordinate_names(names(&vars));
            (model, p)
        }
        "twisted_flow" => {
            let p = Params::new(&base, &["psi", "a", "beta"], args, params, &["psi", "a", "beta", "orientation"])?;
            let vars = ["x", "y", "z"];
            let (psi, d1) = p.expr("psi", "z + z^2/2", &vars)?;
            let (a, d2) = p.expr("a", "y", &vars)?;
            let (beta, d3) = p.expr("beta", "z/2", &vars)?;
            let defaults = d1 && d2 && d3;
            let flag = |v: bool| if defaults { Some(v) } else { None };
            exp = Expectations {
                bundle_like: flag(false),
                umbilical: Some(true),
                curvature: None,
                kappa_basic: flag(false),
                a_zero: flag(false),
                tau_zero: flag(false),
            };
            let e2psi = psi.to_field::<T>().scale(T::lit(2.0)).exp();
            let e2beta = beta.to_field::<T>().scale(T::lit(2.0)).exp();
            let a = a.to_field::<T>();
            let metric = MetricField::from_entries(3, |i, j| match (i, j) {
                (0, 0) => &e2beta + &(&e2psi * &(&a * &a)),
                (0, 2) => &e2psi * &a,
                (1, 1) => e2beta.clone(),
                (2, 2) => e2psi.clone(),
                _ => konst(0.0),
            })?;
            let domain = ChartBox::new(
                vec![T::lit(-1.0), T::lit(0.5), T::lit(-1.0)],
                vec![T::one(), T::lit(1.5), T::one()],
            )?;
            let model = FoliatedModel::new("twisted_flow", domain, metric, vec![VectorField::coordinate(3, 2)], p.orientation()?)?
                .with_coordinate_names(names(&vars));
            (model, p)
        }
        _ => return Err(Error::UnknownModel(name.to_string())),
    };
    let (model, p) = model;
    let claims = Claims { curvature: exp.curvature, bundle_like: exp.bundle_like, umbilical: exp.umbilical };
    let spec = ModelSpec { name: model.name().to_string(), params: p.map, expected: exp };
    Ok((model.with_claims(claims), spec))
}

/// Deterministic uniform samples in the chart box shrunk by [`CHART_MARGIN`].
///
/// The generator is ChaCha8 seeded with `seed` via `seed_from_u64`; each
/// coordinate of each point consumes one `f64` draw in coordinate order.
pub fn sample_points<T: Scalar>(model: &FoliatedModel<T>, count: usize, seed: u64) -> Vec<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dom = model.domain();
    (0..count)
        .map(|_| {
            dom.lower()
                .iter()
                .zip(dom.upper())
                .map(|(&l, &u)| {
                    let (l, u) = (l.as_f64() + CHART_MARGIN, u.as_f64() - CHART_MARGIN);
                    T::lit(l + rng.gen::<f64>() * (u - l))
                })
                .collect()
        })
        .collect()
}

fn mismatch(model: &str, what: &str, claimed: impl std::fmt::Debug, found: impl std::fmt::Debug) -> Error {
    Error::ModelValidation { model: model.to_string(), detail: format!("{what}: claimed {claimed:?}, found {found:?}") }
}

/// Computes the property profile on fixed validation points and checks the model's claimed properties against it.
pub fn validate<T: Scalar>(model: &FoliatedModel<T>, spec: &ModelSpec) -> Result<ModelProfile> {
    let pts = sample_points(model, VALIDATION_POINTS, VALIDATION_SEED);
    let tol = T::PREDICATE_TOL;
    let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
    let name = model.name();

    let integrability_defect = model.integrability_defect(&pts)?.as_f64();
    if integrability_defect > tol {
        return Err(mismatch(name, "integrability", "≤ tol", integrability_defect));
    }
    let bl = model.is_bundle_like(&pts, 4, &mut rng)?;
    let bundle_like_defect = match bl {
        BundleLike::Yes { defect } | BundleLike::No { defect } => defect.as_f64(),
        BundleLike::Inconclusive => f64::NAN,
    };
    let kappa_basic_defect = basic_form_defect(model, &kappa_form(model), &pts)?.as_f64();
    let (mut umb, mut a_norm, mut tau_norm, mut div_h, mut curv) = (0f64, 0f64, 0f64, 0f64, None::<f64>);
    for p in &pts {
        let site = model.site(p.clone())?;
        umb = umb.max(model.umbilical_defect(&site, 4, &mut rng)?.as_f64());
        a_norm = a_norm.max(model.a_tensor_norm(&site)?.as_f64());
        let tau = model.tau_jets(&site)?;
        tau_norm = tau_norm.max(model.norm(&site, &crate::smooth_fields::values(&tau))?.as_f64());
        div_h = div_h.max(model.horizontal_divergence(&site, &tau)?.as_f64().abs());
        if let Some(c) = spec.expected.curvature {
            let r = model.metric().constant_curvature_residual(&site, T::lit(c), 4, &mut rng)?.as_f64();
            curv = Some(curv.unwrap_or(0.0).max(r));
        }
    }
    let profile = ModelProfile {
        bundle_like: bl.holds(),
        bundle_like_defect,
        umbilical: umb <= tol,
        umbilical_defect: umb,
        curvature: spec.expected.curvature.filter(|_| curv.is_some_and(|r| r <= tol)),
        curvature_defect: curv,
        kappa_basic: kappa_basic_defect <= tol,
        kappa_basic_defect,
        a_zero: a_norm <= tol,
        a_norm,
        tau_zero: tau_norm <= tol,
        tau_norm,
        div_h_tau_zero: div_h <= tol,
        div_h_tau_max: div_h,
        integrability_defect,
    };
    let e = &spec.expected;
    if let Some(b) = e.bundle_like {
        if profile.bundle_like != Some(b) {
            return Err(mismatch(name, "bundle-like", b, (profile.bundle_like, bundle_like_defect)));
        }
    }
    let checks = [
        ("umbilical", e.umbilical, profile.umbilical, umb),
        ("κ basic", e.kappa_basic, profile.kappa_basic, kappa_basic_defect),
        ("A ≡ 0", e.a_zero, profile.a_zero, a_norm),
        ("τ = 0", e.tau_zero, profile.tau_zero, tau_norm),
    ];
    for (what, claim, found, defect) in checks {
        if let Some(c) = claim {
            if c != found {
                return Err(mismatch(name, what, c, (found, defect)));
            }
        }
    }
    if let (Some(c), Some(r)) = (e.curvature, curv) {
        if r > tol {
            return Err(mismatch(name, "constant curvature", c, format!("residual {r:e}")));
        }
    }
    Ok(profile)
}
