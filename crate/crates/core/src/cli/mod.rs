//! The `wiretap` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or config error, 3 numeric
//! failure (non-converged integral, out-of-range probability, failed fit).

pub mod config;

use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::backend::{build_model, draw_samples, Backend, BackendError, BackendKind};
use crate::channels::{channel_from_value, db_to_linear, ChannelModel, ChannelSpec, FieldError};
use crate::foxh::{fox_h, ContourPlan, HKernel};
use crate::metrics::{evaluate, Metric, MetricError, MetricValue, SecrecyScenario};
use crate::mixtures::{fit_mog, mg_from_channel_with, select_mog_components, EmOptions, MgRule, MogModel};
use crate::montecarlo::{mc_metric, McEstimate};

pub use config::{parse_scenario, ScenarioConfig, SweepRange};

#[derive(Debug, Parser)]
#[command(name = "wiretap", version, about = "Secrecy metrics of wiretap fading channels")]
pub struct Cli {
    /// Scenario config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for Monte Carlo draws and MoG fitting; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Absolute and relative quadrature tolerance; overrides the config.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct ScenarioOverrides {
    /// sop, sop_lower_bound, pnz, asc or esc.
    #[arg(long)]
    pub metric: Option<Metric>,
    /// analytic, mg, mog, foxh or mc.
    #[arg(long)]
    pub backend: Option<BackendKind>,
    /// Target secrecy rate in bits/s/Hz.
    #[arg(long)]
    pub rate: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one metric for the configured scenario.
    Metric(ScenarioOverrides),
    /// Estimate one metric by Monte Carlo.
    Mc {
        #[command(flatten)]
        scenario: ScenarioOverrides,
        /// Number of simulated channel pairs.
        #[arg(long)]
        draws: Option<u64>,
    },
    /// Sweep the main-to-wiretap mean SNR ratio and write CSV.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioOverrides,
        /// Append Monte Carlo columns and a 3-sigma pass flag: `mc:SEED:N`.
        #[arg(long)]
        verify: Option<VerifySpec>,
    },
    /// Fit a Mixture of Gaussians to newline-separated SNR samples.
    FitMog {
        /// Sample file; standard input if omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        components: usize,
        /// Grow the component count until the CDF error is below 1e-4.
        #[arg(long, conflicts_with = "components")]
        auto: bool,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
    },
    /// Build the Mixture Gamma form of a channel.
    MgBuild {
        /// Channel object file; defaults to the config's main channel, then
        /// standard input.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        components: Option<usize>,
        #[arg(long, value_enum, default_value_t = RuleArg::LogTrapezoid)]
        rule: RuleArg,
    },
    /// Evaluate a raw Fox H-function `{m, n, a, A, b, B, x}`.
    FoxhEval {
        /// Parameter file; standard input if omitted.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    LogTrapezoid,
    GaussLaguerre,
}

impl From<RuleArg> for MgRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::LogTrapezoid => MgRule::LogTrapezoid,
            RuleArg::GaussLaguerre => MgRule::GaussLaguerre,
        }
    }
}

/// `mc:SEED:N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifySpec {
    pub seed: u64,
    pub draws: u64,
}

impl FromStr for VerifySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected mc:SEED:N, got {s:?}");
        let mut parts = s.split(':');
        if parts.next() != Some("mc") {
            return Err(bad());
        }
        let seed = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let draws = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Self { seed, draws })
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Config(Vec<String>),
    Numeric(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) | Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

fn numeric(e: impl std::fmt::Display) -> Failure {
    Failure::Numeric(e.to_string())
}

fn from_backend(e: BackendError) -> Failure {
    match e {
        BackendError::Channel(e) => Failure::Config(vec![e.to_string()]),
        BackendError::Mixture(e) => Failure::Numeric(e.to_string()),
    }
}

fn read_source(path: Option<&Path>) -> Result<(String, String), Failure> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map(|text| (text, p.display().to_string()))
            .map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text).map_err(|e| Failure::Io(format!("<stdin>: {e}")))?;
            Ok((text, "<stdin>".into()))
        }
    }
}

fn parse_json(text: &str, name: &str) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Config(vec![format!("{name}:{}:{}: {e}", e.line(), e.column())]))
}

fn field_errors(name: &str, errors: Vec<FieldError>) -> Failure {
    Failure::Config(errors.into_iter().map(|e| format!("{name}: {e}")).collect())
}

struct Context {
    cli_seed: Option<u64>,
    tol: Option<f64>,
}

impl Context {
    fn scenario(
        &self,
        path: Option<&Path>,
        overrides: &ScenarioOverrides,
        sweep: bool,
    ) -> Result<ScenarioConfig, Failure> {
        let path = path.ok_or_else(|| Failure::Usage("--config is required for this command".into()))?;
        let (text, name) = read_source(Some(path))?;
        let mut root = parse_json(&text, &name)?;
        // Command-line overrides are applied before validation so they are
        // checked like config values.
        if let Some(obj) = root.as_object_mut() {
            if let Some(m) = overrides.metric {
                obj.insert("metric".into(), m.name().into());
            }
            if let Some(b) = overrides.backend {
                obj.insert("backend".into(), b.name().into());
            }
            if let Some(r) = overrides.rate {
                obj.insert("rate".into(), r.into());
            }
            if let Some(s) = self.cli_seed {
                obj.insert("seed".into(), s.into());
            }
        }
        let mut cfg = parse_scenario(&root, sweep).map_err(|e| field_errors(&name, e))?;
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Failure::Usage(format!("--tol must be a positive number, got {t}")));
            }
            cfg.quadrature = cfg.quadrature.with_tol(t);
        }
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct MetricRecord {
    metric: &'static str,
    value: f64,
    error_estimate: f64,
    clamp_defect: f64,
    backend: &'static str,
    rate: f64,
}

#[derive(Serialize)]
struct McRecord {
    metric: &'static str,
    value: f64,
    std_error: f64,
    n: u64,
    seed: u64,
    backend: &'static str,
    rate: f64,
}

fn scenario_models(cfg: &ScenarioConfig) -> Result<SecrecyScenario, Failure> {
    let backend = cfg.model_backend();
    let main = build_model(&cfg.main, backend, 0).map_err(from_backend)?;
    let eve = build_model(&cfg.wiretap, backend, 1).map_err(from_backend)?;
    SecrecyScenario::new(main, eve, cfg.rate).map_err(|e| Failure::Config(vec![e.to_string()]))
}

fn metric_failure(e: MetricError) -> Failure {
    match e {
        MetricError::InvalidScenario(_) | MetricError::Channel(_) => Failure::Config(vec![e.to_string()]),
        MetricError::NotConverged { estimate, error_bound } => Failure::Numeric(format!(
            "quadrature did not converge\n  estimate:    {estimate}\n  error bound: {error_bound:e}\n  \
             loosen --tol or raise quadrature.max_subdivisions"
        )),
        MetricError::OutOfRange { .. } => numeric(e),
    }
}

fn json_line(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn run_mc(cfg: &ScenarioConfig, draws: u64) -> Result<String, Failure> {
    let scn = scenario_models(&ScenarioConfig { backend: BackendKind::Analytic, ..cfg.clone() })?;
    let est = mc_metric(&scn, cfg.metric, draws, cfg.seed).map_err(|e| Failure::Config(vec![e.to_string()]))?;
    Ok(json_line(&McRecord {
        metric: cfg.metric.name(),
        value: est.value,
        std_error: est.std_error,
        n: est.n,
        seed: est.seed,
        backend: BackendKind::Mc.name(),
        rate: cfg.rate,
    }))
}

fn run_metric(cfg: &ScenarioConfig) -> Result<String, Failure> {
    if cfg.backend == BackendKind::Mc {
        return run_mc(cfg, cfg.draws);
    }
    let scn = scenario_models(cfg)?;
    let v = evaluate(cfg.metric, &scn, &cfg.quadrature).map_err(metric_failure)?;
    Ok(json_line(&MetricRecord {
        metric: cfg.metric.name(),
        value: v.value,
        error_estimate: v.error_estimate,
        clamp_defect: v.clamp_defect,
        backend: cfg.backend.name(),
        rate: cfg.rate,
    }))
}

/// One sweep row; `None` cells failed.
#[derive(Debug, Clone, Default)]
struct Row {
    value: Option<f64>,
    std_error: Option<f64>,
    oracle: Option<McEstimate>,
    error: Option<String>,
}

/// Model of `spec` at a new mean SNR. MoG fits are on the normalized
/// envelope, so one fit is reused at every point by rescaling.
fn model_at(
    spec: &ChannelSpec,
    fitted: &Option<MogModel>,
    backend: Backend,
    mean: f64,
) -> Result<Arc<dyn ChannelModel>, String> {
    match fitted {
        Some(m) => Ok(Arc::new(m.rescaled(mean / spec.mean_snr()).map_err(|e| e.to_string())?)),
        None => {
            let at = spec.with_mean_snr(mean).map_err(|e| e.to_string())?;
            build_model(&at, backend, 0).map_err(|e| e.to_string())
        }
    }
}

fn fmt_num(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn run_sweep(cfg: &ScenarioConfig, verify: Option<VerifySpec>) -> Result<(String, Vec<String>), Failure> {
    let range = cfg.sweep.expect("sweep validated");
    let backend = cfg.model_backend();
    let is_mc = cfg.backend == BackendKind::Mc;
    let eve_mean = cfg.wiretap.mean_snr();
    let analytic = |s: &ChannelSpec| build_model(s, Backend::Analytic, 0).map_err(from_backend);
    let eve =
        if is_mc { analytic(&cfg.wiretap)? } else { build_model(&cfg.wiretap, backend, 1).map_err(from_backend)? };
    let fitted_main = match backend {
        Backend::Mog { components, samples, seed } => {
            let spec = cfg.main.with_mean_snr(eve_mean).map_err(|e| Failure::Config(vec![e.to_string()]))?;
            let draws = draw_samples(&spec, samples, seed, 0).map_err(|e| Failure::Config(vec![e.to_string()]))?;
            Some(fit_mog(&draws, EmOptions::new(components, seed)).map_err(numeric)?)
        }
        _ => None,
    };
    let base_main = cfg.main.with_mean_snr(eve_mean).map_err(|e| Failure::Config(vec![e.to_string()]))?;
    let points = range.points();
    let rows: Vec<Row> = points
        .par_iter()
        .map(|&ratio_db| {
            let mean = eve_mean * db_to_linear(ratio_db);
            let mut row = Row::default();
            let main_backend = if is_mc { Backend::Analytic } else { backend };
            let main = match model_at(&base_main, &fitted_main, main_backend, mean) {
                Ok(m) => m,
                Err(e) => {
                    row.error = Some(e);
                    return row;
                }
            };
            let scn = match SecrecyScenario::new(main, eve.clone(), cfg.rate) {
                Ok(s) => s,
                Err(e) => {
                    row.error = Some(e.to_string());
                    return row;
                }
            };
            if is_mc {
                match mc_metric(&scn, cfg.metric, cfg.draws, cfg.seed) {
                    Ok(est) => {
                        row.value = Some(est.value);
                        row.std_error = Some(est.std_error);
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
            } else {
                match evaluate(cfg.metric, &scn, &cfg.quadrature) {
                    Ok(MetricValue { value, .. }) => row.value = Some(value),
                    Err(e) => row.error = Some(e.to_string()),
                }
            }
            if let Some(v) = verify {
                let oracle = analytic(&base_main.with_mean_snr(mean).expect("valid mean"))
                    .map_err(|_| ())
                    .and_then(|m| {
                        let e = analytic(&cfg.wiretap).map_err(|_| ())?;
                        SecrecyScenario::new(m, e, cfg.rate).map_err(|_| ())
                    })
                    .and_then(|s| mc_metric(&s, cfg.metric, v.draws, v.seed).map_err(|_| ()));
                row.oracle = oracle.ok();
            }
            row
        })
        .collect();

    let mut out = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["ratio_db", "value"];
    if is_mc {
        header.push("std_error");
    }
    if verify.is_some() {
        header.extend(["mc_value", "mc_std_error", "pass"]);
    }
    out.write_record(&header).map_err(|e| Failure::Io(e.to_string()))?;
    let mut failures = Vec::new();
    for (ratio_db, row) in points.iter().zip(&rows) {
        let mut rec = vec![ratio_db.to_string(), fmt_num(row.value)];
        if is_mc {
            rec.push(fmt_num(row.std_error));
        }
        if verify.is_some() {
            let o = row.oracle;
            rec.push(fmt_num(o.map(|o| o.value)));
            rec.push(fmt_num(o.map(|o| o.std_error)));
            let pass = match (row.value, o) {
                (Some(v), Some(o)) => {
                    let se = o.std_error.hypot(row.std_error.unwrap_or(0.0));
                    Some((v - o.value).abs() <= 3.0 * se)
                }
                _ => None,
            };
            rec.push(pass.map(|p| p.to_string()).unwrap_or_default());
        }
        out.write_record(&rec).map_err(|e| Failure::Io(e.to_string()))?;
        if let Some(e) = &row.error {
            failures.push(format!("ratio_db {ratio_db}: {e}"));
        } else if verify.is_some() && row.oracle.is_none() {
            failures.push(format!("ratio_db {ratio_db}: oracle failed"));
        }
    }
    let bytes = out.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    Ok((String::from_utf8(bytes).expect("utf-8 csv"), failures))
}

fn read_samples(path: Option<&Path>) -> Result<Vec<f64>, Failure> {
    let (text, name) = read_source(path)?;
    let mut samples = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.parse::<f64>() {
            Ok(x) if x >= 0.0 && x.is_finite() => samples.push(x),
            _ => errors.push(format!("{name}:{}: expected a non-negative SNR sample, got {line:?}", i + 1)),
        }
    }
    if errors.is_empty() {
        Ok(samples)
    } else {
        Err(Failure::Config(errors))
    }
}

fn run_fit_mog(
    input: Option<&Path>,
    components: usize,
    auto: bool,
    max_iter: usize,
    seed: u64,
) -> Result<String, Failure> {
    let samples = read_samples(input)?;
    let model = if auto {
        select_mog_components(&samples, seed, None).map_err(numeric)?.model
    } else {
        let opts = EmOptions { max_iter, ..EmOptions::new(components, seed) };
        fit_mog(&samples, opts).map_err(numeric)?
    };
    Ok(json_line(&model.to_json()))
}

fn run_mg_build(
    ctx: &Context,
    config: Option<&Path>,
    input: Option<&Path>,
    components: Option<usize>,
    rule: RuleArg,
) -> Result<String, Failure> {
    let (spec, budget) = match (input, config) {
        (None, Some(_)) => {
            let cfg = ctx.scenario(config, &ScenarioOverrides::default(), false)?;
            (cfg.main, cfg.mg_components)
        }
        _ => {
            let (text, name) = read_source(input)?;
            let value = parse_json(&text, &name)?;
            let mut errors = Vec::new();
            let spec = channel_from_value(&value, "", &mut errors).ok_or_else(|| field_errors(&name, errors))?;
            (spec, config::DEFAULT_MG_COMPONENTS)
        }
    };
    let terms = components.unwrap_or(budget);
    let model = mg_from_channel_with(&spec, terms, rule.into()).map_err(|e| match e {
        crate::mixtures::MixtureError::NoMgRecipe(_) | crate::mixtures::MixtureError::InvalidArgument(_) => {
            Failure::Config(vec![e.to_string()])
        }
        e => numeric(e),
    })?;
    Ok(json_line(&model.to_json()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FoxhInput {
    m: usize,
    n: usize,
    a: Vec<f64>,
    #[serde(rename = "A")]
    big_a: Vec<f64>,
    b: Vec<f64>,
    #[serde(rename = "B")]
    big_b: Vec<f64>,
    x: f64,
}

#[derive(Serialize)]
struct FoxhOutput {
    value: f64,
    error_estimate: f64,
}

fn run_foxh_eval(input: Option<&Path>) -> Result<String, Failure> {
    let (text, name) = read_source(input)?;
    let raw: FoxhInput = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(vec![format!("{name}:{}:{}: {e}", e.line(), e.column())]))?;
    let kernel = HKernel::from_rows(raw.m, raw.n, &raw.a, &raw.big_a, &raw.b, &raw.big_b)
        .map_err(|e| Failure::Config(vec![format!("{name}: {e}")]))?;
    if !(raw.x > 0.0 && raw.x.is_finite()) {
        return Err(Failure::Config(vec![format!("{name}: x: must be a positive number, got {}", raw.x)]));
    }
    let plan = ContourPlan::for_kernel(&kernel, raw.x).map_err(numeric)?;
    let h = fox_h(&kernel, raw.x, &plan).map_err(numeric)?;
    Ok(json_line(&FoxhOutput { value: h.value, error_estimate: h.error }))
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let ctx = Context { cli_seed: cli.seed, tol: cli.tol };
    let config = cli.config.as_deref();
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Metric(o) => {
            let cfg = ctx.scenario(config, o, false)?;
            emit(out, &run_metric(&cfg)?, stdout)
        }
        Command::Mc { scenario, draws } => {
            let cfg = ctx.scenario(config, scenario, false)?;
            let n = draws.unwrap_or(cfg.draws);
            emit(out, &run_mc(&cfg, n)?, stdout)
        }
        Command::Sweep { scenario, verify } => {
            let cfg = ctx.scenario(config, scenario, true)?;
            let (csv, failures) = run_sweep(&cfg, *verify)?;
            emit(out, &csv, stdout)?;
            if failures.is_empty() {
                Ok(())
            } else {
                let mut msg =
                    format!("{} of {} sweep points failed", failures.len(), cfg.sweep.expect("sweep").points().len());
                for f in &failures {
                    let _ = write!(msg, "\n  {f}");
                }
                Err(Failure::Numeric(msg))
            }
        }
        Command::FitMog { input, components, auto, max_iter } => {
            let seed = cli.seed.unwrap_or(0);
            emit(out, &run_fit_mog(input.as_deref(), *components, *auto, *max_iter, seed)?, stdout)
        }
        Command::MgBuild { input, components, rule } => {
            emit(out, &run_mg_build(&ctx, config, input.as_deref(), *components, *rule)?, stdout)
        }
        Command::FoxhEval { input } => emit(out, &run_foxh_eval(input.as_deref())?, stdout),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(f) => {
            let code = f.code();
            let _ = match &f {
                Failure::Usage(m) => writeln!(stderr, "error: {m}"),
                Failure::Config(lines) => {
                    let _ = writeln!(stderr, "config error:");
                    lines.iter().try_for_each(|l| writeln!(stderr, "  {l}"))
                }
                Failure::Numeric(m) => writeln!(stderr, "numeric error: {m}"),
                Failure::Io(m) => writeln!(stderr, "i/o error: {m}"),
            };
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_spec() {
        assert_eq!("mc:7:100000".parse::<VerifySpec>().unwrap(), VerifySpec { seed: 7, draws: 100_000 });
        for bad in ["mc:7", "qq:1:2", "mc:x:2", "mc:1:2:3"] {
            assert!(bad.parse::<VerifySpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn help_exits_zero() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["wiretap", "--help"], &mut out, &mut err), 0);
        let text = String::from_utf8(out).unwrap();
        for sub in ["metric", "sweep", "mc", "fit-mog", "mg-build", "foxh-eval"] {
            assert!(text.contains(sub), "{sub} missing from help");
        }
    }

    #[test]
    fn missing_config_is_usage_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["wiretap", "metric"], &mut out, &mut err), 2);
    }
}
