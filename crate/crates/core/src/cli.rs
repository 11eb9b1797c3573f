//! `qpolylog eval|verify|table`.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 domain or evaluation error,
//! 3 verification failure.

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use crate::closed_form::{depth1_closed_form, h1_closed_form};
use crate::contour::{f_to_i_args, quad_F, quad_I, quad_Li, quad_zeta_hbar, QuadratureSpec};
use crate::conventions::DOCUMENT;
use crate::error::{Error, Result};
use crate::exact::{bernoulli_exact, eval_exact, q_poly, verify_a3, ExactPoly};
use crate::identities::{self, check_distribution, check_rational_hbar, default_distribution_cases, default_rational_cases, SuiteConfig};
use crate::report::{check_value, complex, envelope, eval_value, fmt_g17, num, to_canonical, to_csv};
use crate::series::{companion_sum_i, multiple_polylog, pochhammer_psi, q_multiple_polylog, SeriesParams};
use crate::types::{sort_reports, CheckReport, EvalResult, HbarValue, MultiIndex, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qpolylog", version, about = "Quantum polylogarithms: evaluation, identity checks and tables")]
struct Cli {
    /// Print the frozen conventions document and exit.
    #[arg(long)]
    conventions: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a function at one or more points.
    Eval(CommonArgs),
    /// Run identity checks.
    Verify(VerifyArgs),
    /// Tabulate a function over one or two swept variables (CSV by default).
    Table(TableArgs),
}

#[derive(Args, Debug, Default, Clone)]
struct CommonArgs {
    /// F | I | Li | qLi | zeta | bernoulli | psi
    #[arg(long = "fn")]
    function: Option<String>,
    /// Comma list.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    /// Points separated by ';', coordinates by ',', each "re+imi".
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    /// Arguments of Li, qLi and psi, same syntax as --omega.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Nome of qLi and psi.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    hbar: Option<String>,
    /// auto | series | contour | companion | closed_form | exact
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// json | csv
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Identity group, or `all`.
    identity: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// VAR=START:STOP:STEP with VAR in omega (slot 1), omegaK (slot K, 1-based) or hbar; sets the real part.
    #[arg(long, allow_hyphen_values = true)]
    sweep: Vec<String>,
}

/// Resolved run configuration; also the `config` field of every JSON report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(rename = "fn")]
    pub function: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub n: Option<String>,
    pub omega: Option<String>,
    pub z: Option<String>,
    pub q: Option<String>,
    pub hbar: Option<String>,
    pub backend: Option<String>,
    pub tol: Option<f64>,
    pub format: Option<String>,
    pub seed: Option<u64>,
    pub identity: Option<String>,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub r: Option<u32>,
    pub s: Option<u32>,
    pub trials: Option<usize>,
    pub sweep: Option<Vec<String>>,
}

impl RunConfig {
    fn to_value(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Value::Object(m) = &mut v {
            m.retain(|_, x| !x.is_null());
            if let Some(t) = self.tol {
                m.insert("tol".into(), num(t));
            }
        }
        v
    }
}

fn merge(file: RunConfig, flags: RunConfig) -> RunConfig {
    macro_rules! pick {
        ($($f:ident),*) => { RunConfig { command: flags.command.clone(), $($f: flags.$f.clone().or(file.$f.clone()),)* } };
    }
    pick!(function, a, b, n, omega, z, q, hbar, backend, tol, format, seed, identity, k, l, r, s, trials, sweep)
}

fn from_common(command: &str, c: &CommonArgs) -> Result<RunConfig> {
    let flags = RunConfig {
        command: command.into(),
        function: c.function.clone(),
        a: c.a.clone(),
        b: c.b.clone(),
        n: c.n.clone(),
        omega: c.omega.clone(),
        z: c.z.clone(),
        q: c.q.clone(),
        hbar: c.hbar.clone(),
        backend: c.backend.clone(),
        tol: c.tol,
        format: c.format.clone(),
        seed: c.seed,
        ..Default::default()
    };
    match &c.config {
        None => Ok(flags),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
            let file: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Usage(format!("bad config {}: {e}", path.display())))?;
            Ok(merge(file, flags))
        }
    }
}

// ---------------------------------------------------------------- parsing

/// Parse `re+imi` style complex numbers: `-1`, `0.5i`, `-1+0.5i`, `2e-3-1e-1i`, `-i`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Usage(format!("cannot parse complex number '{s}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let real = |x: &str| x.parse::<f64>().map_err(|_| bad());
    if let Some(body) = t.strip_suffix('i') {
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(j) => (real(&body[..j])?, &body[j..]),
            None => (0.0, body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => real(x)?,
        };
        Ok(C64::new(re, im))
    } else {
        Ok(C64::new(real(&t)?, 0.0))
    }
}

/// `;`-separated points of `,`-separated coordinates.
pub fn parse_points(s: &str) -> Result<Vec<Vec<C64>>> {
    s.split(';').map(|p| p.split(',').map(parse_complex).collect()).collect()
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| Error::Usage(format!("cannot parse --{what} entry '{x}'"))))
        .collect()
}

fn parse_hbar(cfg: &RunConfig) -> Result<HbarValue> {
    let h = cfg.hbar.as_deref().map(parse_complex).transpose()?.unwrap_or(C64::new(1.0, 0.0));
    HbarValue::new(h).map_err(|e| Error::Usage(e.to_string()))
}

fn format_of(cfg: &RunConfig, default: &str) -> Result<String> {
    let f = cfg.format.clone().unwrap_or_else(|| default.into());
    match f.as_str() {
        "json" | "csv" => Ok(f),
        other => Err(Error::Usage(format!("unknown format '{other}' (json | csv)"))),
    }
}

// ---------------------------------------------------------------- evaluation

#[derive(Clone, Debug)]
struct Evaluator {
    function: String,
    backend: String,
    a: Option<Vec<u32>>,
    b: Option<Vec<u32>>,
    n: Option<Vec<i32>>,
    hbar: HbarValue,
    q: Option<C64>,
    quad: QuadratureSpec,
    series: SeriesParams,
}

const FUNCTIONS: &[&str] = &["F", "I", "Li", "qLi", "zeta", "bernoulli", "psi"];

impl Evaluator {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let function = cfg.function.clone().ok_or_else(|| Error::Usage("--fn is required".into()))?;
        if !FUNCTIONS.contains(&function.as_str()) {
            return Err(Error::Usage(format!("unknown function '{function}' ({})", FUNCTIONS.join(" | "))));
        }
        let backend = cfg.backend.clone().unwrap_or_else(|| "auto".into());
        if !["auto", "series", "contour", "companion", "closed_form", "exact"].contains(&backend.as_str()) {
            return Err(Error::Usage(format!("unknown backend '{backend}'")));
        }
        let mut quad = QuadratureSpec::default();
        let mut series = SeriesParams::default();
        if let Some(t) = cfg.tol {
            if !(t > 0.0) {
                return Err(Error::Usage("--tol must be positive".into()));
            }
            quad.tol = t;
            series.tol = t;
        }
        Ok(Self {
            function,
            backend,
            a: cfg.a.as_deref().map(|s| parse_list(s, "a")).transpose()?,
            b: cfg.b.as_deref().map(|s| parse_list(s, "b")).transpose()?,
            n: cfg.n.as_deref().map(|s| parse_list(s, "n")).transpose()?,
            hbar: parse_hbar(cfg)?,
            q: cfg.q.as_deref().map(parse_complex).transpose()?,
            quad,
            series,
        })
    }

    /// Whether points come from `--z` rather than `--omega`.
    fn uses_z(&self) -> bool {
        matches!(self.function.as_str(), "qLi" | "psi") || (self.function == "Li" && self.resolved_backend() == "series")
    }

    fn resolved_backend(&self) -> &str {
        match (self.function.as_str(), self.backend.as_str()) {
            (_, b) if b != "auto" => b,
            ("F" | "I" | "zeta", _) => "contour",
            ("bernoulli", _) => "exact",
            _ => "series",
        }
    }

    fn n(&self) -> Result<Vec<i32>> {
        self.n.clone().ok_or_else(|| Error::Usage("--n is required".into()))
    }

    fn index(&self, m: usize) -> Result<MultiIndex> {
        let n = self.n()?;
        let a = self.a.clone().unwrap_or_else(|| vec![1; n.len()]);
        let b = self.b.clone().unwrap_or_else(|| vec![1; n.len()]);
        let idx = MultiIndex::new(a, b, n)?;
        if idx.depth() != m {
            return Err(Error::Usage(format!("index depth {} but point has {m} coordinates", idx.depth())));
        }
        Ok(idx)
    }

    fn q(&self) -> Result<C64> {
        self.q.ok_or_else(|| Error::Usage("--q is required".into()))
    }

    fn wrong_backend(&self) -> Error {
        Error::Usage(format!("backend '{}' does not apply to {}", self.backend, self.function))
    }

    /// One evaluation; `extra` carries function-specific output fields.
    fn eval(&self, x: &[C64], hbar: &HbarValue) -> Result<(EvalResult, Value)> {
        let none = json!({});
        let backend = self.resolved_backend();
        match self.function.as_str() {
            "F" => {
                let idx = self.index(x.len())?;
                let r = match backend {
                    "contour" => quad_F(&idx, x, hbar, &self.quad)?,
                    "closed_form" => {
                        if idx.depth() == 1 && idx.b[0] == 0 {
                            depth1_closed_form(idx.a[0], idx.n[0], x[0], &self.series)?
                        } else if hbar.value() == C64::new(1.0, 0.0) {
                            h1_closed_form(&idx, x, &self.series)?
                        } else {
                            return Err(Error::Domain("closed form needs depth one with b = 0, or hbar = 1".into()));
                        }
                    }
                    "companion" => {
                        if idx.a.iter().chain(&idx.b).any(|&v| v != 1) {
                            return Err(Error::Domain("companion series are certified for a = b = 1".into()));
                        }
                        companion_sum_i(&idx.n, &f_to_i_args(x), *hbar, &self.series)?
                    }
                    _ => return Err(self.wrong_backend()),
                };
                Ok((r, none))
            }
            "I" => {
                let idx = self.index(x.len())?;
                let r = match backend {
                    "contour" => quad_I(&idx, x, hbar, &self.quad)?,
                    "companion" => {
                        if idx.a.iter().chain(&idx.b).any(|&v| v != 1) {
                            return Err(Error::Domain("companion series are certified for a = b = 1".into()));
                        }
                        companion_sum_i(&idx.n, x, *hbar, &self.series)?
                    }
                    _ => return Err(self.wrong_backend()),
                };
                Ok((r, none))
            }
            "Li" => {
                let n = self.n()?;
                let r = match backend {
                    "series" => multiple_polylog(&n, x, &self.series)?,
                    "contour" => quad_Li(&n, x, &self.quad)?,
                    _ => return Err(self.wrong_backend()),
                };
                Ok((r, none))
            }
            "qLi" => {
                if backend != "series" {
                    return Err(self.wrong_backend());
                }
                let n = self.n()?;
                let a: Vec<i32> = self.a.clone().unwrap_or_else(|| vec![1; n.len()]).iter().map(|&v| v as i32).collect();
                Ok((q_multiple_polylog(&a, &n, x, self.q()?, &self.series)?, none))
            }
            "zeta" => {
                if backend != "contour" {
                    return Err(self.wrong_backend());
                }
                Ok((quad_zeta_hbar(&self.n()?, hbar, &self.quad)?, none))
            }
            "psi" => {
                if backend != "series" {
                    return Err(self.wrong_backend());
                }
                let a = self.a.as_ref().and_then(|v| v.first().copied()).unwrap_or(1);
                if x.len() != 1 {
                    return Err(Error::Usage("psi takes one argument per point".into()));
                }
                let q = self.q()?;
                let lq = q.norm().ln();
                let n_trunc = if lq < 0.0 { ((self.series.tol.ln() / (2.0 * lq)).ceil() as u64 + 10).min(100_000) as u32 } else { 0 };
                Ok((pochhammer_psi(a, x[0], q, n_trunc)?, none))
            }
            "bernoulli" => {
                if backend != "exact" {
                    return Err(self.wrong_backend());
                }
                let idx = self.index(1)?;
                let poly = bernoulli_exact(idx.a[0], idx.b[0], idx.n[0]);
                let mut extra = json!({"polynomial": poly.to_string()});
                if let Some(m) = identify_q(&poly) {
                    extra["identified_as"] = json!(format!("Q_{m}(omega)"));
                }
                let v = eval_exact(&poly, x[0], hbar.value())?;
                Ok((EvalResult::exact(v)?, extra))
            }
            _ => unreachable!("function validated in new"),
        }
    }

    /// Points of the run; `zeta` needs none.
    fn points(&self, cfg: &RunConfig) -> Result<Vec<Vec<C64>>> {
        let src = if self.uses_z() { cfg.z.as_deref() } else { cfg.omega.as_deref() };
        match (src, self.function.as_str()) {
            (Some(s), _) => parse_points(s),
            (None, "zeta") => Ok(vec![vec![]]),
            (None, _) => Err(Error::Usage(format!("--{} is required for {}", if self.uses_z() { "z" } else { "omega" }, self.function))),
        }
    }
}

fn identify_q(p: &ExactPoly) -> Option<u32> {
    let d = p.omega_degree()?;
    (q_poly(d) == *p).then_some(d)
}

fn inputs_value(x: &[C64], hbar: &HbarValue) -> Value {
    json!({"point": x.iter().map(|z| complex(*z)).collect::<Vec<_>>(), "hbar": complex(hbar.value())})
}

fn record_value(x: &[C64], hbar: &HbarValue, r: &Result<(EvalResult, Value)>) -> Value {
    let mut v = match r {
        Ok((res, extra)) => {
            let mut v = eval_value(res);
            if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
                m.extend(e.clone());
            }
            v
        }
        Err(e) => json!({"error": e.to_string()}),
    };
    v["inputs"] = inputs_value(x, hbar);
    v
}

// ---------------------------------------------------------------- commands

struct Output {
    text: String,
    code: i32,
}

fn cmd_eval(cfg: &RunConfig) -> Result<Output> {
    let ev = Evaluator::new(cfg)?;
    let format = format_of(cfg, "json")?;
    let points = ev.points(cfg)?;
    let results: Vec<Result<(EvalResult, Value)>> = points.par_iter().map(|x| ev.eval(x, &ev.hbar)).collect();
    // usage problems (wrong backend, missing flags) are config errors, not per-point ones
    if let Some(Err(e @ Error::Usage(_))) = results.iter().find(|r| matches!(r, Err(Error::Usage(_)))) {
        return Err(e.clone());
    }
    let errors = results.iter().filter(|r| r.is_err()).count();
    let code = if errors > 0 { EXIT_DOMAIN } else { EXIT_OK };
    let text = if format == "json" {
        let recs: Vec<Value> = points.iter().zip(&results).map(|(x, r)| record_value(x, &ev.hbar, r)).collect();
        let summary = json!({"points": points.len(), "ok": points.len() - errors, "errors": errors});
        to_canonical(&envelope("eval", cfg.to_value(), recs, summary))
    } else {
        let header: Vec<String> = ["point", "re", "im", "err", "backend", "error"].iter().map(|s| s.to_string()).collect();
        let rows = results
            .iter()
            .enumerate()
            .map(|(j, r)| match r {
                Ok((v, _)) => vec![j.to_string(), fmt_g17(v.value.re), fmt_g17(v.value.im), fmt_g17(v.err_estimate), v.backend.as_str().into(), String::new()],
                Err(e) => vec![j.to_string(), String::new(), String::new(), String::new(), String::new(), e.to_string()],
            })
            .collect::<Vec<_>>();
        to_csv(&header, &rows)?
    };
    Ok(Output { text, code })
}

fn cmd_verify(cfg: &RunConfig) -> Result<Output> {
    let format = format_of(cfg, "json")?;
    let group = cfg.identity.clone().unwrap_or_else(|| "all".into());
    let mut suite = SuiteConfig::default();
    if let Some(s) = cfg.seed {
        suite.seed = s;
    }
    if let Some(t) = cfg.tol {
        if !(t > 0.0) {
            return Err(Error::Usage("--tol must be positive".into()));
        }
        suite.quad.tol = t;
    }
    let mut reports: Vec<CheckReport> = match (group.as_str(), cfg.k, cfg.l, cfg.r, cfg.s) {
        ("a3", Some(k), Some(l), _, _) => vec![verify_a3(k, l, cfg.trials.unwrap_or(20), suite.seed)?],
        ("distribution", _, _, Some(r), Some(s)) => check_distribution(r, s, &default_distribution_cases(r, s), &suite)?,
        ("rational_hbar", _, _, Some(r), Some(s)) => check_rational_hbar(r, s, &default_rational_cases(), &suite)?,
        _ => identities::run(&group, &suite)?,
    };
    sort_reports(&mut reports);
    let passed = reports.iter().filter(|r| r.pass).count();
    let failed = reports.len() - passed;
    let code = if failed == 0 { EXIT_OK } else { EXIT_VERIFY };
    let text = if format == "json" {
        let recs = reports.iter().map(check_value).collect();
        let summary = json!({"total": reports.len(), "passed": passed, "failed": failed});
        to_canonical(&envelope("verify", cfg.to_value(), recs, summary))
    } else {
        let header: Vec<String> = ["identity_name", "params", "residual", "tolerance", "pass"].iter().map(|s| s.to_string()).collect();
        let rows: Vec<Vec<String>> = reports
            .iter()
            .map(|r| vec![r.identity_name.clone(), to_canonical(&r.params).trim_end().to_string(), fmt_g17(r.residual), fmt_g17(r.tolerance), r.pass.to_string()])
            .collect();
        to_csv(&header, &rows)?
    };
    Ok(Output { text, code })
}

#[derive(Clone, Debug, PartialEq)]
struct Sweep {
    var: String,
    values: Vec<f64>,
}

fn parse_sweep(s: &str) -> Result<Sweep> {
    let bad = || Error::Usage(format!("sweep '{s}' is not VAR=START:STOP:STEP"));
    let (var, range) = s.split_once('=').ok_or_else(bad)?;
    let parts: Vec<f64> = range.split(':').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else { return Err(bad()) };
    if !(step != 0.0 && step.is_finite() && (stop - start) / step >= -1e-12) {
        return Err(Error::Usage(format!("sweep '{s}': step must move from start toward stop")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Error::Usage(format!("sweep '{s}' has {count} values")));
    }
    let var = var.trim().to_string();
    let ok = var == "omega" || var == "hbar" || var.strip_prefix("omega").is_some_and(|k| k.parse::<usize>().is_ok_and(|k| k >= 1));
    if !ok {
        return Err(Error::Usage(format!("sweep variable '{var}' (omega | omegaK | hbar)")));
    }
    Ok(Sweep { var, values: (0..count).map(|j| start + j as f64 * step).collect() })
}

fn cmd_table(cfg: &RunConfig) -> Result<Output> {
    let ev = Evaluator::new(cfg)?;
    let format = format_of(cfg, "csv")?;
    let sweeps: Vec<Sweep> = cfg.sweep.clone().unwrap_or_default().iter().map(|s| parse_sweep(s)).collect::<Result<_>>()?;
    if sweeps.is_empty() || sweeps.len() > 2 {
        return Err(Error::Usage(format!("table needs 1 or 2 sweeps, got {}", sweeps.len())));
    }
    let base: Vec<C64> = match ev.points(cfg) {
        Ok(p) if p.len() == 1 => p[0].clone(),
        Ok(_) => return Err(Error::Usage("table takes a single base point".into())),
        Err(_) => vec![C64::new(0.0, 0.0); ev.n.as_ref().map_or(1, |n| n.len())],
    };
    // lexicographic in sweep indices, first sweep slowest
    let mut grid: Vec<Vec<f64>> = vec![vec![]];
    for s in &sweeps {
        grid = grid.into_iter().flat_map(|g| s.values.iter().map(move |v| [g.clone(), vec![*v]].concat())).collect();
    }
    let tasks: Vec<(Vec<C64>, HbarValue)> = grid
        .iter()
        .map(|vals| {
            let mut x = base.clone();
            let mut h = ev.hbar;
            for (s, &v) in sweeps.iter().zip(vals) {
                match s.var.as_str() {
                    "hbar" => h = HbarValue::new(C64::new(v, 0.0)).map_err(|e| Error::Usage(e.to_string()))?,
                    "omega" => x[0].re = v,
                    var => {
                        let k: usize = var["omega".len()..].parse().expect("validated");
                        let slot = x.get_mut(k - 1).ok_or_else(|| Error::Usage(format!("sweep {var} exceeds the point length")))?;
                        slot.re = v;
                    }
                }
            }
            Ok((x, h))
        })
        .collect::<Result<_>>()?;
    let results: Vec<Result<(EvalResult, Value)>> = tasks.par_iter().map(|(x, h)| ev.eval(x, h)).collect();
    if let Some(Err(e @ Error::Usage(_))) = results.iter().find(|r| matches!(r, Err(Error::Usage(_)))) {
        return Err(e.clone());
    }
    let errors = results.iter().filter(|r| r.is_err()).count();
    let code = if errors > 0 { EXIT_DOMAIN } else { EXIT_OK };
    let text = if format == "csv" {
        let mut header: Vec<String> = sweeps.iter().map(|s| s.var.clone()).collect();
        header.extend(["re", "im", "err", "error"].iter().map(|s| s.to_string()));
        let rows: Vec<Vec<String>> = grid
            .iter()
            .zip(&results)
            .map(|(vals, r)| {
                let mut row: Vec<String> = vals.iter().map(|v| fmt_g17(*v)).collect();
                match r {
                    Ok((v, _)) => row.extend([fmt_g17(v.value.re), fmt_g17(v.value.im), fmt_g17(v.err_estimate), String::new()]),
                    Err(e) => row.extend([String::new(), String::new(), String::new(), e.to_string()]),
                }
                row
            })
            .collect();
        to_csv(&header, &rows)?
    } else {
        let recs: Vec<Value> = tasks.iter().zip(&results).map(|((x, h), r)| record_value(x, h, r)).collect();
        let summary = json!({"rows": recs.len(), "errors": errors});
        to_canonical(&envelope("table", cfg.to_value(), recs, summary))
    };
    Ok(Output { text, code })
}

fn dispatch(cli: Cli) -> Result<Output> {
    if cli.conventions {
        return Ok(Output { text: DOCUMENT.to_string(), code: EXIT_OK });
    }
    match cli.command {
        None => Err(Error::Usage("expected a subcommand: eval | verify | table (or --conventions)".into())),
        Some(Command::Eval(c)) => cmd_eval(&from_common("eval", &c)?),
        Some(Command::Verify(v)) => {
            let mut cfg = from_common("verify", &v.common)?;
            cfg.identity = v.identity.or(cfg.identity);
            cfg.k = v.k.or(cfg.k);
            cfg.l = v.l.or(cfg.l);
            cfg.r = v.r.or(cfg.r);
            cfg.s = v.s.or(cfg.s);
            cfg.trials = v.trials.or(cfg.trials);
            cmd_verify(&cfg)
        }
        Some(Command::Table(t)) => {
            let mut cfg = from_common("table", &t.common)?;
            if !t.sweep.is_empty() {
                cfg.sweep = Some(t.sweep);
            }
            cmd_table(&cfg)
        }
    }
}

/// Run the CLI on `args` (including the program name), writing to `out` and `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) { EXIT_OK } else { EXIT_USAGE };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    match dispatch(cli) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "qpolylog: {e}");
            match e {
                Error::Usage(_) => EXIT_USAGE,
                _ => EXIT_DOMAIN,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["qpolylog"];
        full.extend_from_slice(args);
        let code = run_with(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("-1").unwrap(), C64::new(-1.0, 0.0));
        assert_eq!(parse_complex("0.5i").unwrap(), C64::new(0.0, 0.5));
        assert_eq!(parse_complex("-1+0.5i").unwrap(), C64::new(-1.0, 0.5));
        assert_eq!(parse_complex("2e-3-1e-1i").unwrap(), C64::new(2e-3, -0.1));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e+2").unwrap(), C64::new(100.0, 0.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn eval_depth_one_b0() {
        let (code, out, _) = run(&["eval", "--fn", "F", "--a", "1", "--b", "0", "--n", "0", "--omega", "-1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let re = v["results"][0]["value"]["re"].as_f64().unwrap();
        assert!((re + 0.268_941_421_369_995_1).abs() < 1e-10, "{re}");
    }

    #[test]
    fn eval_li_at_zero() {
        let (code, out, _) = run(&["eval", "--fn", "Li", "--n", "3", "--z", "0"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"][0]["value"]["re"].as_f64().unwrap(), 0.0);
    }

    #[test]
    fn eval_bernoulli_identifies_q() {
        let (code, out, _) = run(&["eval", "--fn", "bernoulli", "--a", "2", "--b", "0", "--n", "0", "--omega", "-1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"][0]["identified_as"], "Q_1(omega)");
    }

    #[test]
    fn domain_error_exit_2() {
        let (code, out, _) = run(&["eval", "--fn", "F", "--a", "1", "--b", "0", "--n", "1", "--omega", "-1;-1+4i"]);
        assert_eq!(code, 2);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["results"][1]["error"].is_string());
        assert_eq!(v["summary"]["errors"], 1);
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(run(&["eval", "--fn", "nope", "--n", "1", "--omega", "-1"]).0, 1);
        assert_eq!(run(&["verify", "nope"]).0, 1);
        assert_eq!(run(&["frobnicate"]).0, 1);
        assert_eq!(run(&["table", "--fn", "F", "--n", "1", "--sweep", "omega=-3:-1:1", "--sweep", "hbar=1:2:1", "--sweep", "omega1=-1:-1:1"]).0, 1);
    }

    #[test]
    fn verify_a3_exact() {
        let (code, out, _) = run(&["verify", "a3", "--k", "2", "--l", "2"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"][0]["residual"].as_f64().unwrap(), 0.0);
        assert_eq!(v["schema"], 1);
    }

    #[test]
    fn table_rows_and_consistency() {
        let (code, out, _) = run(&["table", "--fn", "F", "--n", "1", "--hbar", "1.2", "--sweep", "omega=-3:-1:0.5"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.trim_end().split("\r\n").collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "omega,re,im,err,error");
        let (_, single, _) = run(&["eval", "--fn", "F", "--n", "1", "--hbar", "1.2", "--omega", "-2", "--format", "csv"]);
        let row_re = lines[3].split(',').nth(1).unwrap();
        let single_re = single.trim_end().split("\r\n").nth(1).unwrap().split(',').nth(1).unwrap();
        assert_eq!(row_re, single_re);

        let (code, out, _) = run(&["table", "--fn", "F", "--n", "1", "--sweep", "omega=-3:-1:1", "--sweep", "hbar=1:2:0.5"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.trim_end().split("\r\n").collect();
        assert_eq!(lines.len(), 10);
        assert!(lines[1].starts_with("-3,1,") && lines[2].starts_with("-3,1.5,") && lines[4].starts_with("-2,1,"));
    }

    #[test]
    fn config_file_and_flag_override() {
        let dir = std::env::temp_dir().join(format!("qpolylog-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.json");
        std::fs::write(&path, r#"{"fn": "F", "a": "1", "b": "0", "n": "0", "omega": "-2"}"#).unwrap();
        let p = path.to_str().unwrap();
        let (code, out, _) = run(&["eval", "--config", p, "--omega", "-1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["config"]["omega"], "-1");
        let re = v["results"][0]["value"]["re"].as_f64().unwrap();
        assert!((re + 0.268_941_421_369_995_1).abs() < 1e-10);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn conventions_flag_prints_document() {
        let (code, out, _) = run(&["--conventions"]);
        assert_eq!(code, 0);
        assert_eq!(out, DOCUMENT);
    }
}
