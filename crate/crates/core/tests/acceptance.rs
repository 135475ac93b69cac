//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use foliate::cli::{cmd_verify, render_json, render_text, RunConfig};
use foliate::exterior::{basic_form_defect, characteristic_form, codifferential, exterior_derivative, kappa_form, wedge};
use foliate::foliation::{BundleLike, FoliatedModel};
use foliate::identities::{cor26_verdict, find, integral_check_136, Context, ResidualReport, Verdict};
use foliate::models::{build_model, sample_points};
use foliate::smooth_fields::{bracket, eval_jet, parse_expr, values, ChartBox, Site, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const TOL: f64 = 1e-8;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn params(kv: &[(&str, &str)]) -> BTreeMap<String, String> {
    kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn context(name: &str, kv: &[(&str, &str)], points: usize) -> Result<Context, String> {
    let built = build_model::<f64>(name, &params(kv)).map_err(|e| format!("{name}: {e}"))?;
    Context::new(built, points, 42, TOL).map_err(|e| e.to_string())
}

fn rows(ctx: &Context, ids: &[&str]) -> Vec<ResidualReport> {
    let ids: Vec<_> = ids.iter().map(|id| find(id).expect("catalog id")).collect();
    ctx.evaluate(&ids)
}

/// Passing (or vacuously passing) with residual at most `tol`.
fn holds(r: &ResidualReport, tol: f64) -> Result<f64, String> {
    let res = r.max_residual.ok_or_else(|| format!("{} on {}: {} ({:?})", r.identity, r.model, r.verdict.as_str(), r.note))?;
    ensure!(
        matches!(r.verdict, Verdict::Pass | Verdict::Vacuous) && res <= tol,
        "{} on {}: {} residual {res:.2e}",
        r.identity,
        r.model,
        r.verdict.as_str()
    );
    Ok(res)
}

fn worst_of(ctx: &Context, ids: &[&str], tol: f64) -> Result<f64, String> {
    rows(ctx, ids).iter().map(|r| holds(r, tol)).try_fold(0.0f64, |w, r| Ok(w.max(r?)))
}

fn sites(m: &FoliatedModel<f64>, count: usize, seed: u64) -> Vec<Site<f64>> {
    sample_points(m, count, seed).into_iter().map(|p| m.site(p).unwrap()).collect()
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// A random smooth function on ℝ³ with a plain `f64` evaluator and the same formula as text.
struct RandomFunction {
    c: [f64; 6],
    dirs: [[f64; 3]; 7],
    shift: f64,
}

impl RandomFunction {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let mut dirs = [[0.0; 3]; 7];
        for d in &mut dirs {
            for x in d.iter_mut() {
                *x = rng.gen_range(-1.0..1.0);
            }
        }
        let mut c = [0.0; 6];
        for x in &mut c {
            *x = rng.gen_range(-1.0..1.0);
        }
        Self { c, dirs, shift: rng.gen_range(-1.0..1.0) }
    }

    fn dot(&self, k: usize, p: &[f64]) -> f64 {
        (0..3).map(|i| self.dirs[k][i] * p[i]).sum()
    }

    fn value(&self, p: &[f64]) -> f64 {
        let c = &self.c;
        c[0] * (self.dot(0, p) + self.shift).sin()
            + c[1] * (0.5 * self.dot(1, p)).exp()
            + c[2] * self.dot(2, p).powi(2) * self.dot(3, p).cos()
            + c[3] / (1.5 + self.dot(4, p).powi(2))
            + c[4] * (2.0 + self.dot(5, p).powi(2)).sqrt()
            + c[5] * (4.0 + self.dot(6, p)).ln()
    }

    fn text(&self) -> String {
        let l = |k: usize| {
            let d = self.dirs[k];
            format!("(({:?})*x + ({:?})*y + ({:?})*z)", d[0], d[1], d[2])
        };
        let c = &self.c;
        format!(
            "({:?})*sin({} + ({:?})) + ({:?})*exp(0.5*{}) + ({:?})*{}^2*cos({}) + ({:?})/(1.5 + {}^2) + ({:?})*sqrt(2 + {}^2) + ({:?})*ln(4 + {})",
            c[0], l(0), self.shift, c[1], l(1), c[2], l(2), l(3), c[3], l(4), c[4], l(5), c[5], l(6)
        )
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let domain = ChartBox::new(vec![-2.0; 3], vec![2.0; 3]).unwrap();
    let (mut worst_g, mut worst_h) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let f = RandomFunction::new(&mut rng);
        let field = parse_expr(&f.text(), &["x", "y", "z"]).map_err(|e| e.to_string())?.to_field::<f64>();
        let p = random_vec(&mut rng, 3);
        let jet = eval_jet(&field, &domain, &p).map_err(|e| e.to_string())?;
        ensure!((jet.value() - f.value(&p)).abs() < 1e-12, "value mismatch at {p:?}");
        let at = |i: usize, a: f64, k: usize, b: f64| {
            let mut q = p.clone();
            q[i] += a;
            q[k] += b;
            f.value(&q)
        };
        let h = 1e-4;
        for i in 0..3 {
            let fd = (at(i, h, i, 0.0) - at(i, -h, i, 0.0)) / (2.0 * h);
            worst_g = worst_g.max((jet.gradient()[i] - fd).abs());
        }
        let h = 1e-3;
        for i in 0..3 {
            for k in 0..3 {
                let fd = (at(i, h, k, h) - at(i, h, k, -h) - at(i, -h, k, h) + at(i, -h, k, -h)) / (4.0 * h * h);
                worst_h = worst_h.max((jet.hessian(i, k) - fd).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(worst_g <= 1e-6, "gradient deviation {worst_g:.2e}");
    ensure!(worst_h <= 1e-4, "Hessian deviation {worst_h:.2e}");
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("gradient {worst_g:.2e}, Hessian {worst_h:.2e}, {:.2} s", elapsed.as_secs_f64()))
}

fn polynomial_field(rng: &mut ChaCha8Rng, n: usize) -> VectorField<f64> {
    let vars: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    let comps = (0..n)
        .map(|_| {
            let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let text = format!("({a:?})*{}*{} + ({b:?})*{} + ({c:?})", names[i], names[j], names[(i + 1) % n]);
            parse_expr(&text, &names).unwrap().to_field()
        })
        .collect();
    VectorField::from_components(comps)
}

const DEFAULT_MODELS: [&str; 5] = ["flat_torus_flow", "hopf_s3", "horosphere", "conformal_torus", "twisted_flow"];

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut conn, mut curv) = (0.0f64, 0.0f64);
    for name in DEFAULT_MODELS {
        let built = build_model::<f64>(name, &BTreeMap::new()).map_err(|e| e.to_string())?;
        let (m, g) = (&built.model, built.model.metric());
        let n = m.dim();
        for site in sites(m, 100, 7) {
            let (x, y, z) = (polynomial_field(&mut rng, n), polynomial_field(&mut rng, n), polynomial_field(&mut rng, n));
            let (xj, yj, zj) = (x.eval(&site).unwrap(), y.eval(&site).unwrap(), z.eval(&site).unwrap());
            let dxy = g.covariant_jets(&site, &xj, &yj).unwrap();
            let dyx = g.covariant_jets(&site, &yj, &xj).unwrap();
            let dxz = g.covariant_jets(&site, &xj, &zj).unwrap();
            let br = bracket(&xj, &yj).unwrap();
            for k in 0..n {
                conn = conn.max((dxy[k].value() - dyx[k].value() - br[k].value()).abs());
            }
            let lhs = foliate::smooth_fields::directional(&xj, &g.inner_jets(&site, &yj, &zj).unwrap()).unwrap().value();
            let rhs = g.inner(&site, &values(&dxy), &values(&zj)).unwrap() + g.inner(&site, &values(&yj), &values(&dxz)).unwrap();
            conn = conn.max((lhs - rhs).abs());

            let [a, b, c, d] = [0, 0, 0, 0].map(|_| random_vec(&mut rng, n));
            let q = |e: &[f64], f: &[f64], g2: &[f64], h: &[f64]| g.curvature_quad(&site, e, f, g2, h).unwrap();
            let r = q(&a, &b, &c, &d);
            curv = curv
                .max((r + q(&b, &a, &c, &d)).abs())
                .max((r + q(&a, &b, &d, &c)).abs())
                .max((r - q(&c, &d, &a, &b)).abs())
                .max((r + q(&b, &c, &a, &d) + q(&c, &a, &b, &d)).abs());
        }
    }
    ensure!(conn <= TOL, "connection residual {conn:.2e}");
    ensure!(curv <= TOL, "curvature symmetry/Bianchi residual {curv:.2e}");
    Ok(format!("connection {conn:.2e}, curvature {curv:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for (name, c) in [("hopf_s3", 1.0), ("horosphere(2)", -1.0), ("horosphere(3)", -1.0)] {
        let built = build_model::<f64>(name, &BTreeMap::new()).map_err(|e| e.to_string())?;
        let m = &built.model;
        ensure!(built.profile.curvature == Some(c), "{name}: curvature not validated as {c}");
        let q = m.codim() as f64;
        for site in sites(m, 100, 11) {
            worst = worst.max(m.metric().constant_curvature_residual(&site, c, 10, &mut rng).unwrap());
            let fr = m.frames(&site).unwrap();
            let coeffs = random_vec(&mut rng, m.leaf_dim());
            let u: Vec<f64> = (0..m.dim()).map(|k| fr.vertical_values().iter().zip(&coeffs).map(|(v, a)| a * v[k]).sum()).collect();
            let sum: f64 = fr.horizontal_values().iter().map(|x| m.metric().curvature_quad(&site, x, &u, x, &u).unwrap()).sum();
            worst = worst.max((sum - q * c * m.metric().inner(&site, &u, &u).unwrap()).abs());
        }
    }
    ensure!(worst <= TOL, "residual {worst:.2e}");
    Ok(format!("hopf_s3 c=1, horosphere(2,3) c=-1: {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let ctx = context("twisted_flow", &[], 200)?;
    let worst = worst_of(&ctx, &["DKAPPA_LEAFDIV", "RUMMLER", "MAIN_113"], TOL)?;
    let spot = context("twisted_flow", &[("psi", "z"), ("a", "y"), ("beta", "0")], 20)?;
    let m = &spot.model;
    let s = m.site(vec![0.0, 1.0, 0.0]).map_err(|e| e.to_string())?;
    let x = m.projected_coordinate_field(0).eval(&s).unwrap();
    let y = m.projected_coordinate_field(1).eval(&s).unwrap();
    let v = m.frames(&s).unwrap().vertical[0].clone();
    let k = kappa_form(m);
    let dk = exterior_derivative(&k).unwrap().eval(&s, &[x.clone(), y.clone()]).unwrap().value();
    let main = exterior_derivative(&wedge(&k, &characteristic_form(m)).unwrap()).unwrap().eval(&s, &[v, x, y]).unwrap().value();
    ensure!((dk + 1.0).abs() <= TOL && (main + 1.0).abs() <= TOL, "spot values dκ = {dk}, d(κ∧χ) = {main}");
    let spot_worst = worst_of(&spot, &["DKAPPA_LEAFDIV", "RUMMLER", "MAIN_113"], TOL)?;
    Ok(format!("200 points {worst:.2e}; dκ(X,Y) at (0,1,0) = {dk:.12}; spot model {spot_worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let ctx = context("conformal_torus", &[], 100)?;
    let worst = worst_of(&ctx, &["COCLOSED_V", "COCLOSED_MIXED", "COCLOSED_HH"], TOL)?;
    let m = &ctx.model;
    let form = codifferential(m, &wedge(&kappa_form(m), &characteristic_form(m)).unwrap()).unwrap();
    let mut spot = 0.0f64;
    for site in sites(m, 20, 5) {
        let fr = m.frames(&site).unwrap();
        let value = form.eval(&site, &fr.vertical).unwrap().value();
        spot = spot.max((value + 2.0 * site.coords()[2].sin()).abs());
    }
    ensure!(spot <= TOL, "δ(κ∧χ)(V_1,V_2) vs −2 sin x: {spot:.2e}");
    let horo = context("horosphere(2)", &[], 100)?;
    let codim1 = rows(&horo, &["CODIM1_COCLOSED"]).remove(0);
    let res = holds(&codim1, TOL)?;
    Ok(format!(
        "conformal_torus {worst:.2e}, spot −2 sin x {spot:.2e}, horosphere(2) codim 1 {res:.2e} ({})",
        codim1.verdict.as_str()
    ))
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    let mut applicable = 0;
    for name in DEFAULT_MODELS.into_iter().chain(["horosphere(3)"]) {
        let ctx = context(name, &[], 100)?;
        for r in rows(&ctx, &["TILDE_DELTA", "DELTA_KAPPA_REMARK", "DIV_SPLIT"]) {
            if r.verdict != Verdict::Inapplicable {
                worst = worst.max(holds(&r, TOL)?);
                applicable += 1;
            }
        }
    }
    let built = build_model::<f64>("conformal_torus", &BTreeMap::new()).map_err(|e| e.to_string())?;
    let integral = integral_check_136(&built.model, 64).map_err(|e| e.to_string())?;
    ensure!(integral.relative_difference <= 1e-6, "integral relative difference {:.2e}", integral.relative_difference);
    Ok(format!("{applicable} rows, worst {worst:.2e}; integral relative difference {:.2e}", integral.relative_difference))
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    for name in ["hopf_s3", "horosphere(2)", "conformal_torus"] {
        let ctx = context(name, &[], 100)?;
        worst = worst.max(worst_of(&ctx, &["ONEILL_I", "ONEILL_II", "ONEILL_III", "ONEILL_IV", "ONEILL_V"], TOL)?);
        ensure!(ctx.profile.umbilical, "{name} not umbilical");
        worst = worst.max(worst_of(&ctx, &["LEMMA22_A", "LEMMA22_B", "LEMMA22_C"], TOL)?);
    }
    Ok(format!("worst {worst:.2e}"))
}

fn criterion_8() -> Outcome {
    let ids = ["KILLING_21", "PROP24_A", "PROP24_B", "PROP24_C", "DIVH_24"];
    let mut worst = 0.0f64;
    for (name, kv) in [("horosphere(2)", vec![]), ("horosphere(3)", vec![]), ("conformal_torus", vec![("f", "2"), ("c", "0")])] {
        let ctx = context(name, &kv, 100)?;
        worst = worst.max(worst_of(&ctx, &ids, TOL)?);
    }
    let hopf = context("hopf_s3", &[], 100)?;
    let einstein = holds(&rows(&hopf, &["EINSTEIN_25_26"]).remove(0), TOL)?;
    Ok(format!("umbilical rows {worst:.2e}; hopf_s3 EINSTEIN_25_26 {einstein:.2e}"))
}

fn criterion_9() -> Outcome {
    let ctx = context("horosphere(2)", &[], 100)?;
    let r = cor26_verdict(&ctx).map_err(|e| e.to_string())?;
    let g = r.g_tau_tau.ok_or("no g(τ,τ)")?;
    let (pqc, p2qc) = (r.minus_pqc.ok_or("no −pqc")?, r.minus_p2qc.ok_or("no −p²qc")?);
    ensure!((g - 4.0).abs() <= TOL && (p2qc - 4.0).abs() <= TOL && (pqc - 2.0).abs() <= TOL, "g {g}, −pqc {pqc}, −p²qc {p2qc}");
    ensure!((g - pqc).abs() > 1.0 && r.matches == "−p²qc", "matches {}", r.matches);
    let cfg = RunConfig { model: "horosphere(2)".into(), ids: Some(vec!["COR26_VERDICT".into()]), points: 20, ..Default::default() };
    let text = render_text(&cfg, &cmd_verify(&cfg).map_err(|e| e.to_string())?);
    ensure!(text.contains("−pqc") && text.contains("−p²qc") && text.contains("not the stated"), "report lacks both candidates:\n{text}");
    Ok(format!("g(τ,τ) = {g:.10} = −p²qc; −pqc = {pqc}"))
}

fn criterion_10() -> Outcome {
    let ctx = context("twisted_flow", &[], 100)?;
    let m = &ctx.model;
    let pts = sample_points(m, 50, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let bl = m.is_bundle_like(&pts, 5, &mut rng).map_err(|e| e.to_string())?;
    ensure!(matches!(bl, BundleLike::No { .. }), "bundle-like predicate: {bl:?}");
    let anti = pts.iter().map(|p| m.a_antisymmetry_defect(&m.site(p.clone()).unwrap()).unwrap()).fold(0.0, f64::max);
    ensure!(anti > 1e-3, "A antisymmetry defect {anti:.2e}");
    let kappa = basic_form_defect(m, &kappa_form(m), &pts).map_err(|e| e.to_string())?;
    ensure!(kappa > 1e-3, "κ basic defect {kappa:.2e}");
    let r = rows(&ctx, &["COCLOSED_V"]).remove(0);
    ensure!(r.verdict == Verdict::Inapplicable, "COCLOSED_V verdict {}", r.verdict.as_str());
    Ok(format!("A antisymmetry {anti:.2e}, κ basic {kappa:.2e}, COCLOSED_V inapplicable"))
}

fn criterion_11() -> Outcome {
    let mut out = Vec::new();
    for (name, expect) in [("hopf_s3", [2.0, 0.0, 2.0]), ("flat_torus_flow", [0.0, 0.0, 0.0])] {
        let ctx = context(name, &[], 100)?;
        let res = holds(&rows(&ctx, &["FLOW_RICCI"]).remove(0), TOL)?;
        let m = &ctx.model;
        for site in sites(m, 10, 4) {
            let fr = m.frames(&site).unwrap();
            let v = &fr.vertical[0];
            let ric = m.metric().ricci(&site, &values(v), &values(v)).unwrap();
            let div = m.divergence_full(&site, &m.tau_jets(&site).unwrap()).unwrap();
            let a: f64 = fr
                .horizontal
                .iter()
                .map(|x| m.norm(&site, &values(&m.tensor_a_jets(&site, x, v).unwrap())).unwrap().powi(2))
                .sum();
            let got = [ric, div, a];
            ensure!(got.iter().zip(&expect).all(|(g, e)| (g - e).abs() <= TOL), "{name}: Ric, div, ΣA² = {got:?}");
        }
        out.push(format!("{name} {res:.2e}"));
    }
    Ok(out.join(", "))
}

fn criterion_12() -> Outcome {
    let cfg = RunConfig { format: foliate::cli::Format::Json, ..Default::default() };
    let start = Instant::now();
    let first = render_json(&cmd_verify(&cfg).map_err(|e| e.to_string())?);
    let elapsed = start.elapsed();
    let second = render_json(&cmd_verify(&cfg).map_err(|e| e.to_string())?);
    ensure!(first == second, "JSON reports differ");
    ensure!(elapsed < Duration::from_secs(60), "full suite took {elapsed:?}");
    Ok(format!("{} bytes identical, full suite {:.2} s", first.len(), elapsed.as_secs_f64()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("jet derivatives match central differences", criterion_1),
        ("Levi-Civita axioms and curvature symmetries", criterion_2),
        ("constant curvature of hopf_s3 and horosphere", criterion_3),
        ("generic foliation identities on twisted_flow", criterion_4),
        ("codifferential of κ∧χ on conformal_torus and horosphere", criterion_5),
        ("adapted-calculus identities and the integral check", criterion_6),
        ("O'Neill identities and curvature lemma", criterion_7),
        ("umbilical identities", criterion_8),
        ("g(τ,τ) adjudication on horosphere(2)", criterion_9),
        ("negative controls on twisted_flow", criterion_10),
        ("Ricci identity for flows", criterion_11),
        ("determinism and runtime", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
