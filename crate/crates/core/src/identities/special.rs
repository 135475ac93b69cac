use rayon::prelude::*;
use serde::Serialize;

use super::catalog::{find, Identity};
use super::evaluate::{Context, ResidualReport, Verdict, INTEGRAL_TOLERANCE, VACUOUS_SCALE};
use crate::error::{Error, Result};
use crate::foliation::FoliatedModel;
use crate::models::{sample_points, VALIDATION_SEED};
use crate::smooth_fields::values;

/// Comparison of `g(τ,τ)` with the two candidate constants `−pqc` and `−p²qc`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cor26Report {
    pub applicable: bool,
    pub reason: Option<String>,
    pub p: usize,
    pub q: usize,
    pub c: Option<f64>,
    /// Mean of `g(τ,τ)` over the sample points.
    pub g_tau_tau: Option<f64>,
    /// `max − min` of `g(τ,τ)` over the sample points.
    pub g_tau_tau_spread: Option<f64>,
    pub minus_pqc: Option<f64>,
    pub minus_p2qc: Option<f64>,
    pub residual_pqc: Option<f64>,
    pub residual_p2qc: Option<f64>,
    /// One of `−pqc`, `−p²qc`, `both`, `neither`, or `inapplicable`.
    pub matches: String,
    pub note: Option<String>,
}

pub fn cor26_verdict(ctx: &Context) -> Result<Cor26Report> {
    let (p, q) = (ctx.model.leaf_dim(), ctx.model.codim());
    let id = find("COR26_VERDICT").expect("catalog entry");
    let mut report = Cor26Report {
        applicable: false,
        reason: None,
        p,
        q,
        c: ctx.profile.curvature,
        g_tau_tau: None,
        g_tau_tau_spread: None,
        minus_pqc: None,
        minus_p2qc: None,
        residual_pqc: None,
        residual_p2qc: None,
        matches: "inapplicable".into(),
        note: None,
    };
    if let Some(why) = id.needs.check(ctx) {
        report.reason = Some(why);
        return Ok(report);
    }
    let c = ctx.profile.curvature.expect("gated on constant curvature");
    let m = &ctx.model;
    let gtt: Vec<f64> = ctx
        .points
        .par_iter()
        .map(|pt| {
            let site = m.site(pt.clone())?;
            let tau = values(&m.tau_jets(&site)?);
            m.metric().inner(&site, &tau, &tau)
        })
        .collect::<Result<_>>()?;
    let (pf, qf) = (p as f64, q as f64);
    let (c1, c2) = (-pf * qf * c, -pf * pf * qf * c);
    let worst = |target: f64| gtt.iter().map(|v| (v - target).abs()).fold(0.0, f64::max);
    let (r1, r2) = (worst(c1), worst(c2));
    let (lo, hi) = gtt.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let tol = ctx.tolerance;
    report.matches = match (r1 <= tol, r2 <= tol) {
        (true, true) => "both",
        (true, false) => "−pqc",
        (false, true) => "−p²qc",
        (false, false) => "neither",
    }
    .into();
    if r2 <= tol && r1 > tol {
        report.note = Some(format!(
            "g(τ,τ) = {:.6} matches −p²qc = {c2} from div_H τ = cpq + g(τ,τ)/p with A = 0 and div_H τ = 0, not the stated −pqc = {c1}",
            gtt.iter().sum::<f64>() / gtt.len() as f64
        ));
    }
    report.applicable = true;
    report.g_tau_tau = Some(gtt.iter().sum::<f64>() / gtt.len() as f64);
    report.g_tau_tau_spread = Some(hi - lo);
    report.minus_pqc = Some(c1);
    report.minus_p2qc = Some(c2);
    report.residual_pqc = Some(r1);
    report.residual_p2qc = Some(r2);
    Ok(report)
}

/// Row for the catalog: the residual is the distance to the nearer candidate, so the row passes
/// when either constant matches and [`Cor26Report::matches`] says which.
pub(crate) fn cor26_row(ctx: &Context, id: &Identity) -> ResidualReport {
    let mut row = row_skeleton(ctx, id, ctx.tolerance);
    match cor26_verdict(ctx) {
        Err(e) => {
            row.verdict = Verdict::Error;
            row.note = Some(e.to_string());
        }
        Ok(r) => {
            let (Some(r1), Some(r2)) = (r.residual_pqc, r.residual_p2qc) else {
                row.note = r.reason;
                return row;
            };
            let residual = r1.min(r2);
            let scale = [r.g_tau_tau, r.minus_pqc, r.minus_p2qc].iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            row.points = ctx.points.len();
            row.max_residual = Some(residual);
            row.scale = Some(scale);
            row.verdict = verdict(residual, scale, ctx.tolerance);
            row.note = Some(format!("matches {}", r.matches));
        }
    }
    row
}

fn verdict(residual: f64, scale: f64, tol: f64) -> Verdict {
    if !(residual <= tol) {
        Verdict::Fail
    } else if scale < VACUOUS_SCALE {
        Verdict::Vacuous
    } else {
        Verdict::Pass
    }
}

fn row_skeleton(ctx: &Context, id: &Identity, tolerance: f64) -> ResidualReport {
    ResidualReport {
        model: ctx.model.name().to_string(),
        identity: id.id.to_string(),
        anchor: id.anchor.to_string(),
        points: 0,
        max_residual: None,
        tolerance,
        verdict: Verdict::Inapplicable,
        skipped: 0,
        scale: None,
        note: None,
    }
}

/// `∫ g(τ,τ) dV` and `∫ div_H τ dV` by the periodic midpoint rule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralReport {
    pub resolution: usize,
    /// Coordinates the integrands depend on; the others are integrated exactly.
    pub active: Vec<String>,
    pub tau_sq_integral: f64,
    pub div_h_integral: f64,
    pub relative_difference: f64,
}

fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap_or(k);
        if a[piv][k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Coordinates on which the metric or the spanning fields vary at some validation point.
fn active_coordinates(model: &FoliatedModel<f64>) -> Result<Vec<usize>> {
    let n = model.dim();
    let mut active = vec![false; n];
    for pt in sample_points(model, 8, VALIDATION_SEED) {
        let site = model.site(pt)?;
        for i in 0..n {
            for j in i..n {
                let grad = model.metric().entry(i, j).eval(&site)?;
                for k in 0..n {
                    active[k] |= grad.gradient()[k].abs() > 1e-13;
                }
            }
        }
        for w in model.spanning() {
            for comp in w.eval(&site)? {
                for k in 0..n {
                    active[k] |= comp.gradient()[k].abs() > 1e-13;
                }
            }
        }
    }
    Ok((0..n).filter(|&k| active[k]).collect())
}

/// `∫ g(τ,τ) dV` and `∫ div_H τ dV` over the periodic chart with `resolution` midpoint nodes per active coordinate.
pub fn integral_check_136(model: &FoliatedModel<f64>, resolution: usize) -> Result<IntegralReport> {
    if !model.periodic().iter().all(|&b| b) {
        return Err(Error::Inapplicable("chart is not fully periodic".into()));
    }
    if resolution == 0 {
        return Err(Error::InvalidParameter("quadrature resolution must be at least 1".into()));
    }
    let n = model.dim();
    let dom = model.domain();
    let (lo, hi) = (dom.lower().to_vec(), dom.upper().to_vec());
    let active = active_coordinates(model)?;
    let cells = resolution.checked_pow(active.len() as u32).ok_or_else(|| {
        Error::InvalidParameter(format!("{resolution}^{} quadrature nodes is too many", active.len()))
    })?;
    let mut weight = 1.0;
    for k in 0..n {
        let len = hi[k] - lo[k];
        weight *= if active.contains(&k) { len / resolution as f64 } else { len };
    }
    let sums = (0..cells)
        .into_par_iter()
        .map(|mut idx| {
            let mut x: Vec<f64> = (0..n).map(|k| 0.5 * (lo[k] + hi[k])).collect();
            for &k in &active {
                let i = idx % resolution;
                idx /= resolution;
                x[k] = lo[k] + (i as f64 + 0.5) * (hi[k] - lo[k]) / resolution as f64;
            }
            let site = model.site(x)?;
            let vol = determinant(model.metric().values(&site)?).max(0.0).sqrt();
            let tau = model.tau_jets(&site)?;
            let tt = model.metric().inner(&site, &values(&tau), &values(&tau))?;
            let dh = model.horizontal_divergence(&site, &tau)?;
            Ok((tt * vol, dh * vol))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let (a, b) = sums.iter().fold((0.0, 0.0), |(s, t), (u, v)| (s + u, t + v));
    let (a, b) = (a * weight, b * weight);
    let big = a.abs().max(b.abs());
    Ok(IntegralReport {
        resolution,
        active: active.iter().map(|&k| model.coordinate_names().get(k).cloned().unwrap_or(k.to_string())).collect(),
        tau_sq_integral: a,
        div_h_integral: b,
        relative_difference: if big < VACUOUS_SCALE { 0.0 } else { (a - b).abs() / big },
    })
}

pub(crate) fn integral_row(ctx: &Context, id: &Identity) -> ResidualReport {
    let tol = ctx.tolerance.max(INTEGRAL_TOLERANCE);
    let mut row = row_skeleton(ctx, id, tol);
    match integral_check_136(&ctx.model, ctx.quadrature_resolution) {
        Err(e) => {
            row.verdict = Verdict::Error;
            row.note = Some(e.to_string());
        }
        Ok(r) => {
            let scale = r.tau_sq_integral.abs().max(r.div_h_integral.abs());
            row.points = ctx.quadrature_resolution.pow(r.active.len() as u32);
            row.max_residual = Some(r.relative_difference);
            row.scale = Some(scale);
            row.verdict = verdict(r.relative_difference, scale, tol);
            row.note = Some(format!(
                "∫g(τ,τ)dV = {:.10e}, ∫div_H τ dV = {:.10e}, relative difference",
                r.tau_sq_integral, r.div_h_integral
            ));
        }
    }
    row
}

/// Pointwise `(α∧dα)(V,X_1,X_2)` for `α = g(V,·)` on a 3-dimensional flow.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContactReport {
    pub applicable: bool,
    pub reason: Option<String>,
    /// `contact`, `integrable` or `mixed`.
    pub classification: Option<String>,
    pub tolerance: f64,
    pub min_abs: Option<f64>,
    pub max_abs: Option<f64>,
    pub values: Vec<f64>,
}

pub fn contact_classify(ctx: &Context) -> Result<ContactReport> {
    let mut report = ContactReport {
        applicable: false,
        reason: None,
        classification: None,
        tolerance: ctx.tolerance,
        min_abs: None,
        max_abs: None,
        values: Vec::new(),
    };
    let Some(form) = ctx.contact_form() else {
        report.reason = Some(format!(
            "needs n = 3 and p = 1, model has n = {} and p = {}",
            ctx.model.dim(),
            ctx.model.leaf_dim()
        ));
        return Ok(report);
    };
    let m = &ctx.model;
    report.values = ctx
        .points
        .par_iter()
        .map(|pt| {
            let site = m.site(pt.clone())?;
            let fr = m.frames(&site)?;
            let args = [fr.vertical[0].clone(), fr.horizontal[0].clone(), fr.horizontal[1].clone()];
            Ok(form.eval(&site, &args)?.value())
        })
        .collect::<Result<_>>()?;
    let abs: Vec<f64> = report.values.iter().map(|v| v.abs()).collect();
    let tol = ctx.tolerance;
    report.classification = Some(
        if abs.iter().all(|&v| v > tol) {
            "contact"
        } else if abs.iter().all(|&v| v <= tol) {
            "integrable"
        } else {
            "mixed"
        }
        .into(),
    );
    report.min_abs = abs.iter().copied().reduce(f64::min);
    report.max_abs = abs.iter().copied().reduce(f64::max);
    report.applicable = true;
    Ok(report)
}
