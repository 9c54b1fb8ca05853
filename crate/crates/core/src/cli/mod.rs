//! Command-line front end.

pub mod errata;
pub mod golden;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::gradedalg::coproduct_homomorphism_check;
use crate::model::{commutation_audit, Model};
use crate::scalar::{Backend, Coeff, HalfInt, RatFunc};
use crate::spectrum::{degeneracy_binomial, degeneracy_bruteforce, multiplets, Cluster, StateLabel, CLUSTER_TOL};
use crate::superrep::{
    bosonic_sector_check, build_irrep, casimir_checks, casimir_operator, hopf_data_check, ladder_identity_checks,
    structure_checks, verify_classical_relations, verify_relations, FLOAT_TOL,
};

pub use report::{Format, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ALGEBRA: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

/// `z` used by the brute-force oracle when the spectrum itself is exact.
pub const DEFAULT_ORACLE_Z: f64 = 0.7;

#[derive(Parser, Debug)]
#[command(name = "qgaudin", version, about = "U_q(osp(1|2)) Gaudin model: algebra checks, spectra and eigenbases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Number of sites N.
    #[arg(long, global = true, default_value_t = 2)]
    pub sites: usize,
    /// Site spin j as `p/2` or an integer.
    #[arg(long, global = true, default_value = "1/2")]
    pub spin: String,
    /// Deformation parameter `z` (q = e^z), or `exact`.
    #[arg(long, global = true)]
    pub z: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = GradingArg::Fbf)]
    pub grading: GradingArg,
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendArg>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Residual bound for floating-point checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Reference data for `appendix2` (defaults to the bundled file).
    #[arg(long, global = true)]
    pub golden: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check the algebra, Hopf data, coproduct and commutativity.
    VerifyAlgebra,
    /// Joint spectrum of the commuting family with multiplicities.
    Spectrum,
    /// Two-site spin-1/2 eigenstates against the reference tables.
    Appendix2,
    /// Closed-form claims recomputed against independent checks.
    Errata,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GradingArg {
    Fbf,
    Bfb,
}

impl GradingArg {
    pub fn g0(self) -> u8 {
        match self {
            GradingArg::Fbf => 1,
            GradingArg::Bfb => 0,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendArg {
    Exact,
    Float,
}

/// Validated settings; serialized as the `config` block of every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub sites: usize,
    pub spin: String,
    pub z: String,
    pub grading: GradingArg,
    pub backend: BackendArg,
    pub format: Format,
    pub tol: f64,
    #[serde(skip)]
    pub j: HalfInt,
    #[serde(skip)]
    pub numeric: Backend,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub golden: Option<PathBuf>,
}

impl RunConfig {
    pub fn g0(&self) -> u8 {
        self.grading.g0()
    }

    /// `z` for numeric comparisons: the model's own, or the default.
    pub fn oracle_z(&self) -> f64 {
        match self.numeric {
            Backend::Float { z } => z,
            Backend::Exact => DEFAULT_ORACLE_Z,
        }
    }
}

/// Configuration or usage problem (exit 1).
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<Cli> for RunConfig {
    type Error = UsageError;

    fn try_from(c: Cli) -> Result<Self, UsageError> {
        let bad = |m: String| UsageError(m);
        let j: HalfInt = c.spin.parse().map_err(|e| bad(format!("--spin: {e}")))?;
        if j.twice() < 0 {
            return Err(bad(format!("--spin: negative spin {j}")));
        }
        if c.sites == 0 {
            return Err(bad("--sites must be at least 1".into()));
        }
        let z = match c.z.as_deref() {
            None | Some("exact") => None,
            Some(t) => {
                let v: f64 = t.parse().map_err(|_| bad(format!("--z: not a decimal or `exact`: {t:?}")))?;
                Some(v)
            }
        };
        let numeric = match (c.backend, z) {
            (Some(BackendArg::Exact), Some(_)) => return Err(bad("--backend exact takes no numeric --z".into())),
            (Some(BackendArg::Float), None) => return Err(bad("--backend float needs a numeric --z".into())),
            (_, Some(z)) => Backend::float(z).map_err(|e| bad(format!("--z: {e}")))?,
            (_, None) => Backend::Exact,
        };
        let tol = c.tol.unwrap_or(FLOAT_TOL);
        if !(tol.is_finite() && tol > 0.0) {
            return Err(bad("--tol must be a positive number".into()));
        }
        let (backend, z) = match numeric {
            Backend::Exact => (BackendArg::Exact, "exact".to_string()),
            Backend::Float { z } => (BackendArg::Float, z.to_string()),
        };
        Ok(RunConfig {
            command: c.command,
            sites: c.sites,
            spin: j.to_string(),
            z,
            grading: c.grading,
            backend,
            format: c.format,
            tol,
            j,
            numeric,
            out: c.out,
            golden: c.golden,
        })
    }
}

/// Rendered output and exit status of one invocation.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
    pub out: Option<PathBuf>,
    pub diagnostics: Vec<String>,
}

/// Parse arguments and run; never panics on bad input.
pub fn run<I, A>(args: I) -> Outcome
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return Outcome { code, output: String::new(), out: None, diagnostics: vec![e.to_string()] };
        }
    };
    let cfg = match RunConfig::try_from(cli) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if let Some(n) = std::env::var("QGAUDIN_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match execute(&cfg) {
        Ok((code, report)) => {
            Outcome { code, output: report.render(cfg.format), out: cfg.out.clone(), diagnostics: Vec::new() }
        }
        Err(e) => usage(e),
    }
}

fn usage(e: UsageError) -> Outcome {
    Outcome { code: EXIT_USAGE, output: String::new(), out: None, diagnostics: vec![format!("error: {e}")] }
}

/// Run one validated command.
pub fn execute(cfg: &RunConfig) -> Result<(i32, Report), UsageError> {
    match cfg.command {
        Command::VerifyAlgebra => match cfg.numeric {
            Backend::Exact => verify_algebra::<RatFunc>(cfg, ()),
            Backend::Float { z } => verify_algebra::<f64>(cfg, z),
        },
        Command::Spectrum => match cfg.numeric {
            Backend::Exact => spectrum::<RatFunc>(cfg, ()),
            Backend::Float { z } => spectrum::<f64>(cfg, z),
        },
        Command::Appendix2 => appendix2(cfg),
        Command::Errata => errata_cmd(cfg),
    }
}

fn usage_err(e: impl std::fmt::Display) -> UsageError {
    UsageError(e.to_string())
}

fn verify_algebra<T: Coeff>(cfg: &RunConfig, p: T::Param) -> Result<(i32, Report), UsageError> {
    let exact = build_irrep(cfg.j, cfg.g0()).map_err(usage_err)?;
    let r = exact.convert::<T>(p).map_err(usage_err)?;
    let rc = exact.classical().and_then(|c| c.convert::<T>(p)).map_err(usage_err)?;
    let model = Model::<T>::build(cfg.sites, cfg.j, cfg.g0(), p).map_err(usage_err)?;

    let mut groups = vec![
        ("relations", verify_relations(&r)),
        ("casimir", casimir_checks("C", &r, &casimir_operator(&r))),
        ("structure", structure_checks(&r)),
        ("hopf", hopf_data_check(&r)),
        ("ladder", ladder_identity_checks(&r, true)),
        ("classical-relations", verify_classical_relations(&rc)),
        ("coproduct", coproduct_homomorphism_check(model.space(), true)),
        ("classical-coproduct", coproduct_homomorphism_check(model.classical_space(), false)),
    ];
    groups[2].1.checks.push(bosonic_sector_check(&r));

    let mut report = Report::new(cfg);
    report.table = Table::new(&["group", "identity", "holds", "residual"]);
    let mut ok = true;
    let judge = |holds: bool, residual: f64| if T::EXACT { holds } else { residual <= cfg.tol };
    let mut push = |report: &mut Report, group: &str, name: &str, holds: bool, residual: f64, detail: Value| {
        let holds = judge(holds, residual);
        ok &= holds;
        let worst = report.residuals.entry(group.to_string()).or_insert(0.0);
        *worst = worst.max(residual);
        report.results.push(json!({
            "group": group,
            "identity": name,
            "holds": holds,
            "residual": residual,
            "detail": detail,
        }));
        report.table.push(vec![group.into(), name.into(), holds.to_string(), format!("{residual:e}")]);
    };
    for (group, rep) in &groups {
        for c in &rep.checks {
            let detail = c.first_failure.clone().map_or(Value::Null, Value::String);
            push(&mut report, group, &c.name, c.holds, c.residual, detail);
        }
    }
    for (group, fam) in
        [("commutation", model.observable_family()), ("classical-commutation", model.observable_family_classical())]
    {
        for pr in commutation_audit(&fam, &[]).pairs {
            let name = format!("[{}, {}] = 0", pr.a, pr.b);
            push(&mut report, group, &name, pr.holds, pr.residual, Value::Null);
        }
    }
    let code = if ok { EXIT_OK } else { EXIT_ALGEBRA };
    Ok((code, report))
}

fn scalar_json<T: Coeff>(x: &T, p: T::Param) -> Value {
    let q = x.to_qscalar(p);
    match q.as_exact() {
        Some(r) => Value::String(r.to_string()),
        None => json!(q.value_at(q.z().unwrap_or(0.0)).unwrap_or(f64::NAN)),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn tuple_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| rel_gap(*x, *y)).fold(0.0, f64::max)
}

fn spectrum<T: Coeff>(cfg: &RunConfig, p: T::Param) -> Result<(i32, Report), UsageError> {
    let model = Model::<T>::build(cfg.sites, cfg.j, cfg.g0(), p).map_err(usage_err)?;
    let mut report = Report::new(cfg);
    let n = cfg.sites;
    let mut header: Vec<String> = vec!["label".into(), "l".into()];
    header.extend((1..=n).map(|k| format!("lambda_{k}")));
    header.push("multiplicity".into());
    report.table = Table { header, rows: Vec::new() };

    let mults = match multiplets(&model, true) {
        Ok(m) => m,
        Err(e) => {
            report.errata.push(json!({"id": "spectrum", "verdict": "flagged", "evidence": e.to_string()}));
            return Ok((EXIT_MISMATCH, report));
        }
    };

    // Brute-force oracle at the model's z (or the default z for exact runs).
    let oz = cfg.oracle_z();
    let fm = Model::float(n, cfg.j, cfg.g0(), oz).map_err(usage_err)?;
    let clusters: Vec<Cluster> = match degeneracy_bruteforce(&fm, true, 0) {
        Ok(c) => c,
        Err(e) => {
            report.errata.push(json!({"id": "oracle", "verdict": "flagged", "evidence": e.to_string()}));
            return Ok((EXIT_MISMATCH, report));
        }
    };
    let mut claimed = vec![0usize; clusters.len()];
    let mut assigned = Vec::with_capacity(mults.len());
    let mut worst_gap: f64 = 0.0;
    let mut ok = true;
    for mu in &mults {
        let at_z: Vec<f64> = mu.eigenvalues.iter().map(|x| x.to_qscalar(p).value_at(oz).unwrap_or(f64::NAN)).collect();
        let best = clusters
            .iter()
            .enumerate()
            .map(|(i, c)| (i, tuple_gap(&at_z, &c.eigenvalues)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, g)) if g <= CLUSTER_TOL => {
                claimed[i] += mu.dim();
                worst_gap = worst_gap.max(g);
                assigned.push(Some(i));
            }
            _ => {
                ok = false;
                assigned.push(None);
            }
        }
    }
    ok &= claimed.iter().zip(&clusters).all(|(c, cl)| *c == cl.multiplicity);

    for (mu, slot) in mults.iter().zip(&assigned) {
        let m = mu.ladder.last().map_or(0, |s| s.m);
        let label = StateLabel::new(m, mu.ladder.clone());
        let l = HalfInt::from_twice(mu.two_l).to_string();
        let lambdas: Vec<Value> = mu.eigenvalues.iter().map(|x| scalar_json(x, p)).collect();
        let oracle = slot.map(|i| clusters[i].multiplicity);
        report.results.push(json!({
            "kind": "multiplet",
            "label": label.to_string(),
            "l": l,
            "lambda": lambdas,
            "multiplicity": mu.dim(),
            "oracle_multiplicity": oracle,
        }));
        for k in m..m + mu.dim() {
            let mut row = vec![StateLabel::new(k, mu.ladder.clone()).to_string(), l.clone()];
            row.extend(lambdas.iter().map(scalar_text));
            row.push(mu.dim().to_string());
            report.table.push(row);
        }
        if slot.is_none() {
            report.errata.push(json!({
                "id": format!("spectrum-{label}"),
                "verdict": "flagged",
                "evidence": "no brute-force cluster matches this eigenvalue tuple",
            }));
        }
    }
    for (i, cl) in clusters.iter().enumerate() {
        if claimed[i] != cl.multiplicity {
            report.errata.push(json!({
                "id": format!("oracle-cluster-{i}"),
                "verdict": "flagged",
                "evidence": format!("cluster of size {} gets {} states from the construction", cl.multiplicity, claimed[i]),
            }));
        }
    }

    let total: usize = mults.iter().map(|m| m.dim()).sum();
    ok &= total == model.dim();
    if cfg.j == HalfInt::HALF {
        for two_l in 0..=n as i64 {
            let count = mults.iter().filter(|m| m.two_l == two_l).count();
            let formula = degeneracy_binomial(n, two_l).map_err(usage_err)?;
            let agrees = formula == count as i128;
            ok &= agrees;
            report.results.push(json!({
                "kind": "degeneracy",
                "l": HalfInt::from_twice(two_l).to_string(),
                "count": count,
                "formula": formula as i64,
                "states": count * (2 * two_l as usize + 1),
                "agrees": agrees,
            }));
        }
    }
    report.residuals.insert("oracle_max_gap".into(), worst_gap);
    report.residuals.insert("oracle_z".into(), oz);
    report.residuals.insert("total_states".into(), total as f64);
    Ok((if ok { EXIT_OK } else { EXIT_MISMATCH }, report))
}

fn appendix2(cfg: &RunConfig) -> Result<(i32, Report), UsageError> {
    if cfg.sites != 2 || cfg.j != HalfInt::HALF {
        return Err(UsageError("appendix2 needs --sites 2 --spin 1/2".into()));
    }
    let text = match &cfg.golden {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| UsageError(format!("--golden {}: {e}", path.display())))?
        }
        None => golden::APPENDIX2.to_string(),
    };
    let data = golden::parse_golden(&text).map_err(UsageError)?;
    let diffs = golden::compare_tables(&data).map_err(UsageError)?;
    let mut report = Report::new(cfg);
    report.table = Table::new(&["table", "label", "state", "eigenvalue", "computed", "golden"]);
    let flat = |m: &std::collections::BTreeMap<String, String>| {
        m.iter().map(|(k, v)| format!("{k}: {v}")).collect::<Vec<_>>().join("; ")
    };
    for d in &diffs {
        report.results.push(serde_json::to_value(d).map_err(usage_err)?);
        report.table.push(vec![
            d.table.clone(),
            d.label.clone(),
            if d.state_matches { "match" } else { "MISMATCH" }.into(),
            if d.eigenvalue_matches { "match" } else { "MISMATCH" }.into(),
            flat(&d.computed),
            flat(&d.golden),
        ]);
        if !d.matches() {
            report.errata.push(json!({
                "id": format!("appendix2-{}-{}", d.table, d.label),
                "verdict": "flagged",
                "computed": d.computed,
                "golden": d.golden,
            }));
        }
    }
    let matched = diffs.iter().filter(|d| d.matches()).count();
    report.residuals.insert("rows".into(), diffs.len() as f64);
    report.residuals.insert("rows_matched".into(), matched as f64);
    let code = if matched == diffs.len() { EXIT_OK } else { EXIT_MISMATCH };
    Ok((code, report))
}

fn errata_cmd(cfg: &RunConfig) -> Result<(i32, Report), UsageError> {
    let entries = errata::errata().map_err(UsageError)?;
    let mut report = Report::new(cfg);
    report.table = Table::new(&["id", "verdict", "claim", "closed_form", "oracle", "evidence"]);
    for e in &entries {
        report.errata.push(serde_json::to_value(e).map_err(usage_err)?);
        report.table.push(vec![
            e.id.clone(),
            serde_json::to_value(e.verdict).map(|v| scalar_text(&v)).unwrap_or_default(),
            e.claim.clone(),
            e.closed_form.clone(),
            e.oracle.clone(),
            e.evidence.clone(),
        ]);
    }
    let flagged = entries.iter().filter(|e| e.verdict == errata::Verdict::Flagged).count();
    report.residuals.insert("flagged".into(), flagged as f64);
    report.residuals.insert("entries".into(), entries.len() as f64);
    Ok((EXIT_OK, report))
}
