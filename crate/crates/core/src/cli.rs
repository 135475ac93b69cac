//! Command-line front end: `verify` runs identities on models, `list` prints the catalog.
//!
//! Settings come from flags and an optional `key = value` config file; flags win.
//! Exit codes: 0 when every applicable identity passes, 1 on any failure,
//! 2 on configuration or model errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::identities::{
    catalog, contact_classify, cor26_verdict, find, ContactReport, Context, Cor26Report, Identity, Kind,
    ResidualReport, Verdict, DEFAULT_QUADRATURE_RESOLUTION,
};
use crate::models::{build_model, construct, MODEL_NAMES};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

pub const DEFAULT_POINTS: usize = 100;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "foliate", version, about = "Numerical checks of foliation identities on model manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate identities on one model or on all default models.
    Verify(VerifyArgs),
    /// List the built-in models and the identity catalog.
    List,
}

#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    /// Model name, optionally with positional arguments (`horosphere(3)`), or `all`.
    #[arg(long)]
    pub model: Option<String>,
    /// Named model parameter, `key=value`.
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    /// Comma-separated identity ids, or `all`.
    #[arg(long)]
    pub ids: Option<String>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "quadrature-resolution")]
    pub quadrature_resolution: Option<usize>,
    /// `key = value` file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// A fully resolved `verify` request.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: String,
    pub params: BTreeMap<String, String>,
    /// `None` selects the whole catalog.
    pub ids: Option<Vec<String>>,
    pub points: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub quadrature_resolution: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: "all".into(),
            params: BTreeMap::new(),
            ids: None,
            points: DEFAULT_POINTS,
            seed: DEFAULT_SEED,
            tolerance: DEFAULT_TOLERANCE,
            format: Format::Text,
            out: None,
            quadrature_resolution: DEFAULT_QUADRATURE_RESOLUTION,
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn split_pair(raw: &str, sep: char) -> Result<(String, String)> {
    let (k, v) = raw.split_once(sep).ok_or_else(|| bad(format!("expected `key{sep}value`, got `{raw}`")))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(bad(format!("empty key in `{raw}`")));
    }
    Ok((k.to_string(), v.to_string()))
}

fn parse_ids(raw: &str) -> Option<Vec<String>> {
    let ids: Vec<String> = raw.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if ids.is_empty() || ids.iter().any(|s| s == "all") {
        None
    } else {
        Some(ids)
    }
}

fn parse_value<V: std::str::FromStr>(key: &str, raw: &str) -> Result<V> {
    raw.parse().map_err(|_| bad(format!("config key `{key}`: cannot parse `{raw}`")))
}

impl RunConfig {
    /// Applies a `key = value` config text. Blank lines and `#` comments are ignored;
    /// `param` may repeat and takes `k=v`.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = split_pair(line, '=').map_err(|e| bad(format!("config line {}: {e}", no + 1)))?;
            match key.replace('_', "-").as_str() {
                "model" => self.model = value,
                "param" => {
                    let (k, v) = split_pair(&value, '=')?;
                    self.params.insert(k, v);
                }
                "ids" => self.ids = parse_ids(&value),
                "points" => self.points = parse_value(&key, &value)?,
                "seed" => self.seed = parse_value(&key, &value)?,
                "tol" | "tolerance" => self.tolerance = parse_value(&key, &value)?,
                "format" => {
                    self.format = Format::from_str(&value, true).map_err(|_| bad(format!("unknown format `{value}`")))?
                }
                "out" => self.out = Some(PathBuf::from(value)),
                "quadrature-resolution" => self.quadrature_resolution = parse_value(&key, &value)?,
                other => return Err(bad(format!("config line {}: unknown key `{other}`", no + 1))),
            }
        }
        Ok(())
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(args: &VerifyArgs) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = &args.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_config_text(&text)?;
        }
        if let Some(m) = &args.model {
            cfg.model = m.clone();
        }
        for raw in &args.params {
            let (k, v) = split_pair(raw, '=')?;
            cfg.params.insert(k, v);
        }
        if let Some(ids) = &args.ids {
            cfg.ids = parse_ids(ids);
        }
        cfg.points = args.points.unwrap_or(cfg.points);
        cfg.seed = args.seed.unwrap_or(cfg.seed);
        cfg.tolerance = args.tol.unwrap_or(cfg.tolerance);
        cfg.format = args.format.unwrap_or(cfg.format);
        if args.out.is_some() {
            cfg.out = args.out.clone();
        }
        cfg.quadrature_resolution = args.quadrature_resolution.unwrap_or(cfg.quadrature_resolution);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(bad(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.points == 0 {
            return Err(bad("point count must be at least 1"));
        }
        if self.quadrature_resolution == 0 {
            return Err(bad("quadrature resolution must be at least 1"));
        }
        if self.model == "all" && !self.params.is_empty() {
            return Err(bad("--param cannot be combined with --model all"));
        }
        Ok(())
    }

    /// Selected identities in catalog order.
    pub fn identities(&self) -> Result<Vec<&'static Identity>> {
        match &self.ids {
            None => Ok(catalog().iter().collect()),
            Some(ids) => {
                for id in ids {
                    find(id).ok_or_else(|| Error::UnknownIdentity(id.clone()))?;
                }
                Ok(catalog().iter().filter(|i| ids.iter().any(|s| s == i.id)).collect())
            }
        }
    }

    fn model_names(&self) -> Vec<String> {
        if self.model == "all" {
            MODEL_NAMES.iter().map(|s| s.to_string()).collect()
        } else {
            vec![self.model.clone()]
        }
    }
}

/// Everything `verify` reports for one model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelReport {
    pub model: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub points: usize,
    pub basic_fields: Vec<String>,
    pub rows: Vec<ResidualReport>,
    pub cor26: Option<Cor26Report>,
    pub contact: Option<ContactReport>,
}

impl ModelReport {
    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.verdict.is_failure())
    }
}

/// Runs one model. Build and configuration problems are errors; failing identities are not.
pub fn verify_model(cfg: &RunConfig, name: &str, ids: &[&Identity]) -> Result<ModelReport> {
    let built = build_model::<f64>(name, &cfg.params)?;
    let ctx = Context::new(built, cfg.points, cfg.seed, cfg.tolerance)?
        .with_quadrature_resolution(cfg.quadrature_resolution)?;
    let rows = ctx.evaluate(ids);
    let wants = |k: Kind| ids.iter().any(|i| i.kind == k);
    let cor26 = if wants(Kind::Cor26Verdict) { cor26_verdict(&ctx).ok() } else { None };
    let contact = if wants(Kind::ContactClass) { contact_classify(&ctx).ok() } else { None };
    Ok(ModelReport {
        model: ctx.model.name().to_string(),
        params: ctx.params().clone(),
        seed: cfg.seed,
        points: cfg.points,
        basic_fields: ctx.basic_labels.clone(),
        rows,
        cor26,
        contact,
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Vec<ModelReport>> {
    cfg.validate()?;
    let ids = cfg.identities()?;
    cfg.model_names().iter().map(|name| verify_model(cfg, name, &ids)).collect()
}

pub fn exit_code(reports: &[ModelReport]) -> i32 {
    if reports.iter().any(ModelReport::failed) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    }
}

/// A single model serializes as an object, several as an array.
pub fn render_json(reports: &[ModelReport]) -> String {
    let mut s = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(reports)
    }
    .expect("reports serialize");
    s.push('\n');
    s
}

fn sci(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.2e}"))
}

pub fn render_text(cfg: &RunConfig, reports: &[ModelReport]) -> String {
    let mut s = String::new();
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let _ = writeln!(s, "model {}", r.model);
        if !r.params.is_empty() {
            let ps: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "  params: {}", ps.join(", "));
        }
        let _ = writeln!(s, "  seed {}, {} points, tolerance {:.2e}", r.seed, r.points, cfg.tolerance);
        let basic = if r.basic_fields.is_empty() { "none".to_string() } else { r.basic_fields.join(", ") };
        let _ = writeln!(s, "  basic fields: {basic}");
        for row in &r.rows {
            let _ = write!(s, "  {:<18} {:<12} {:>9}  {}", row.identity, row.verdict.as_str(), sci(row.max_residual), row.anchor);
            if let Some(rel) = row.relative_residual().filter(|_| row.verdict == Verdict::Pass || row.verdict == Verdict::Fail) {
                let _ = write!(s, "  [rel {rel:.2e}]");
            }
            if let Some(note) = &row.note {
                let _ = write!(s, "  ({note})");
            }
            s.push('\n');
        }
        if let Some(c) = r.cor26.as_ref().filter(|c| c.applicable) {
            let _ = writeln!(
                s,
                "  g(τ,τ) = {} ; −pqc = {} ; −p²qc = {} ; matches {}",
                sci(c.g_tau_tau),
                sci(c.minus_pqc),
                sci(c.minus_p2qc),
                c.matches
            );
            if let Some(note) = &c.note {
                let _ = writeln!(s, "  {note}");
            }
        }
        if let Some(c) = r.contact.as_ref().filter(|c| c.applicable) {
            let _ = writeln!(
                s,
                "  horizontal distribution: {} (|α∧dα| from {} to {})",
                c.classification.as_deref().unwrap_or("-"),
                sci(c.min_abs),
                sci(c.max_abs)
            );
        }
        let count = |v: Verdict| r.rows.iter().filter(|x| x.verdict == v).count();
        let _ = writeln!(
            s,
            "  {} pass, {} vacuous, {} inapplicable, {} fail, {} error",
            count(Verdict::Pass),
            count(Verdict::Vacuous),
            count(Verdict::Inapplicable),
            count(Verdict::Fail),
            count(Verdict::Error)
        );
    }
    s
}

const MODEL_USAGE: [(&str, &str); 5] = [
    ("flat_torus_flow", "flat_torus_flow"),
    ("hopf_s3", "hopf_s3"),
    ("horosphere", "horosphere(p=2)"),
    ("conformal_torus", "conformal_torus(f=exp(sin(x)), c)"),
    ("twisted_flow", "twisted_flow(psi=z+z^2/2, a=y, beta=z/2)"),
];

fn claim(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "yes",
        Some(false) => "no",
        None => "?",
    }
}

pub fn cmd_list() -> String {
    let mut s = String::from("models:\n");
    for name in MODEL_NAMES {
        let usage = MODEL_USAGE.iter().find(|(n, _)| *n == name).map_or(name, |(_, u)| u);
        match construct::<f64>(name, &BTreeMap::new()) {
            Ok((model, spec)) => {
                let e = &spec.expected;
                let curv = e.curvature.map_or_else(|| "?".to_string(), |c| c.to_string());
                let _ = writeln!(
                    s,
                    "  {usage}\n    n={} p={} q={}  bundle-like={} umbilical={} curvature={} kappa-basic={} A=0:{} tau=0:{}",
                    model.dim(),
                    model.leaf_dim(),
                    model.dim() - model.leaf_dim(),
                    claim(e.bundle_like),
                    claim(e.umbilical),
                    curv,
                    claim(e.kappa_basic),
                    claim(e.a_zero),
                    claim(e.tau_zero)
                );
            }
            Err(e) => {
                let _ = writeln!(s, "  {usage}\n    error: {e}");
            }
        }
    }
    s.push_str("identities:\n");
    for id in catalog() {
        let _ = writeln!(s, "  {:<18} {}", id.id, id.anchor);
    }
    s
}

fn write_report(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| bad(format!("cannot write {}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<'a, I, S>(args: I, out: &'a mut dyn Write, err: &'a mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let sink = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match cli.command {
        Command::List => {
            let _ = out.write_all(cmd_list().as_bytes());
            EXIT_PASS
        }
        Command::Verify(args) => {
            let outcome = RunConfig::resolve(&args).and_then(|cfg| {
                let reports = cmd_verify(&cfg)?;
                let body = match cfg.format {
                    Format::Json => render_json(&reports),
                    Format::Text => render_text(&cfg, &reports),
                };
                match &cfg.out {
                    Some(path) => write_report(path, &body)?,
                    None => {
                        let _ = out.write_all(body.as_bytes());
                    }
                }
                Ok(exit_code(&reports))
            });
            outcome.unwrap_or_else(|e| {
                let _ = writeln!(err, "error: {e}");
                EXIT_CONFIG
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("foliate").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let mut cfg = RunConfig::default();
        cfg.apply_config_text("# defaults\nmodel = hopf_s3\npoints = 7\nparam = orientation=-1\nids = ONEILL_I, RUMMLER\ntol=1e-6\nformat = json\n")
            .unwrap();
        assert_eq!(cfg.model, "hopf_s3");
        assert_eq!(cfg.points, 7);
        assert_eq!(cfg.ids, Some(vec!["ONEILL_I".to_string(), "RUMMLER".to_string()]));
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.params["orientation"], "-1");

        let dir = std::env::temp_dir().join(format!("foliate-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "model = hopf_s3\npoints = 7\nseed = 9\n").unwrap();
        let args = VerifyArgs { points: Some(3), config: Some(path), ..Default::default() };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert_eq!((cfg.model.as_str(), cfg.points, cfg.seed), ("hopf_s3", 3, 9));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_config_text("colour = red").is_err());
        assert!(cfg.apply_config_text("points = many").is_err());
        assert!(cfg.apply_config_text("just a line").is_err());
        for args in [
            VerifyArgs { tol: Some(0.0), ..Default::default() },
            VerifyArgs { tol: Some(-1e-8), ..Default::default() },
            VerifyArgs { points: Some(0), ..Default::default() },
            VerifyArgs { params: vec!["p=3".into()], ..Default::default() },
            VerifyArgs { model: Some("hopf_s3".into()), params: vec!["novalue".into()], ..Default::default() },
        ] {
            assert!(RunConfig::resolve(&args).is_err(), "{args:?}");
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["verify", "--model", "nosuch"]).0, EXIT_CONFIG);
        assert_eq!(run_str(&["verify", "--model", "hopf_s3", "--ids", "NOPE"]).0, EXIT_CONFIG);
        assert_eq!(run_str(&["verify", "--model", "hopf_s3", "--tol", "0"]).0, EXIT_CONFIG);
        assert_eq!(run_str(&["verify", "--bogus-flag"]).0, EXIT_CONFIG);
        let (code, out, _) = run_str(&["verify", "--model", "twisted_flow", "--ids", "MAIN_113,DKAPPA_LEAFDIV", "--points", "20"]);
        assert_eq!(code, EXIT_PASS, "{out}");
        assert!(out.contains("MAIN_113") && out.contains("(1.13)"));
    }

    #[test]
    fn failing_rows_give_exit_one() {
        let mut report = ModelReport {
            model: "m".into(),
            params: BTreeMap::new(),
            seed: 0,
            points: 1,
            basic_fields: vec![],
            rows: vec![],
            cor26: None,
            contact: None,
        };
        assert_eq!(exit_code(&[report.clone()]), EXIT_PASS);
        let cfg = RunConfig { model: "hopf_s3".into(), points: 5, ..Default::default() };
        let mut row = verify_model(&cfg, "hopf_s3", &[find("RUMMLER").unwrap()]).unwrap().rows.remove(0);
        row.verdict = Verdict::Fail;
        report.rows.push(row);
        assert_eq!(exit_code(&[report]), EXIT_FAIL);
    }

    #[test]
    fn text_residuals_have_three_significant_digits() {
        assert_eq!(sci(Some(0.000123456)), "1.23e-4");
        assert_eq!(sci(None), "-");
    }

    #[test]
    fn list_is_stable_and_complete() {
        let (code, a, _) = run_str(&["list"]);
        assert_eq!(code, EXIT_PASS);
        assert_eq!(a, cmd_list());
        let models = a.lines().skip(1).take_while(|l| *l != "identities:").filter(|l| !l.starts_with("    ")).count();
        assert!(models >= 5);
        let ids: Vec<&str> = a.lines().skip_while(|l| *l != "identities:").skip(1).collect();
        assert!(ids.len() >= 20);
        let tag = |l: &str| l.contains("(1.") || l.contains("(2.") || l.contains("(Prop") || l.contains("(Cor") || l.contains("(Lemma") || l.contains("(Thm") || l.contains("(Remark");
        assert!(ids.iter().all(|l| tag(l)), "{ids:?}");
        assert!(a.contains("(1.13)"));
    }
}
