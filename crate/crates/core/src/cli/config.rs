//! Scenario config files.
//!
//! ```json
//! {
//!   "main":    {"family": "kg", "params": {"m_l": 2.5, "m_sl": 4}, "mean_snr_db": 10},
//!   "wiretap": {"family": "nakagami_m", "params": {"m": 3.5}, "mean_snr_db": 0},
//!   "metric": "pnz",
//!   "rate": 1.0,
//!   "backend": "foxh",
//!   "seed": 7,
//!   "mc": {"draws": 1000000},
//!   "mixture": {"mg_components": 20, "mog_components": 6, "mog_samples": 100000},
//!   "quadrature": {"abs_tol": 1e-10, "rel_tol": 1e-8, "max_subdivisions": 2000,
//!                  "inner_max_subdivisions": 500, "map": "rational"},
//!   "sweep": {"lo_db": -5, "hi_db": 15, "step_db": 1}
//! }
//! ```
//!
//! Only `main`, `wiretap` and `metric` are required (`sweep` too for the
//! sweep command, where `main.mean_snr_db` may be omitted because the sweep
//! sets it).

use serde_json::{Map, Value};

use crate::backend::{Backend, BackendKind};
use crate::channels::{channel_from_value, number_field, reject_unknown, ChannelSpec, Family, FieldError};
use crate::metrics::{Metric, QuadratureConfig};
use crate::quadrature::SemiInfiniteMap;

pub const DEFAULT_DRAWS: u64 = 1_000_000;
pub const DEFAULT_MG_COMPONENTS: usize = 20;
pub const DEFAULT_MOG_COMPONENTS: usize = 6;
pub const DEFAULT_MOG_SAMPLES: usize = 100_000;

/// Ratio grid of a sweep, in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub lo_db: f64,
    pub hi_db: f64,
    pub step_db: f64,
}

impl SweepRange {
    /// `lo, lo + step, …` up to `hi`: `floor((hi − lo)/step) + 1` points.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.hi_db - self.lo_db) / self.step_db + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.lo_db + i as f64 * self.step_db).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub main: ChannelSpec,
    pub wiretap: ChannelSpec,
    pub rate: f64,
    pub metric: Metric,
    pub backend: BackendKind,
    pub seed: u64,
    pub draws: u64,
    pub mg_components: usize,
    pub mog_components: usize,
    pub mog_samples: usize,
    pub quadrature: QuadratureConfig,
    pub sweep: Option<SweepRange>,
}

impl ScenarioConfig {
    /// Model backend; `mc` estimates over the analytic laws.
    pub fn model_backend(&self) -> Backend {
        match self.backend {
            BackendKind::Analytic | BackendKind::Mc => Backend::Analytic,
            BackendKind::FoxH => Backend::FoxH,
            BackendKind::Mg => Backend::Mg { components: self.mg_components },
            BackendKind::Mog => {
                Backend::Mog { components: self.mog_components, samples: self.mog_samples, seed: self.seed }
            }
        }
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn object<'a>(v: &'a Value, path: &str, errors: &mut Vec<FieldError>) -> Option<&'a Map<String, Value>> {
    match v.as_object() {
        Some(o) => Some(o),
        None => {
            errors.push(FieldError::new(path, format!("expected an object, got {v}")));
            None
        }
    }
}

fn optional_count(
    obj: &Map<String, Value>,
    key: &str,
    path: &str,
    min: u64,
    errors: &mut Vec<FieldError>,
) -> Option<u64> {
    let v = obj.get(key)?;
    match v.as_u64() {
        Some(n) if n >= min => Some(n),
        _ => {
            errors.push(FieldError::new(join(path, key), format!("expected an integer >= {min}, got {v}")));
            None
        }
    }
}

fn optional_positive(obj: &Map<String, Value>, key: &str, path: &str, errors: &mut Vec<FieldError>) -> Option<f64> {
    obj.get(key)?;
    let v = number_field(obj, key, path, errors)?;
    if v > 0.0 {
        Some(v)
    } else {
        errors.push(FieldError::new(join(path, key), format!("must be > 0, got {v}")));
        None
    }
}

fn parse_quadrature(v: &Value, errors: &mut Vec<FieldError>) -> QuadratureConfig {
    let path = "quadrature";
    let mut cfg = QuadratureConfig::default();
    let Some(obj) = object(v, path, errors) else { return cfg };
    reject_unknown(obj, &["abs_tol", "rel_tol", "max_subdivisions", "inner_max_subdivisions", "map"], path, errors);
    if let Some(t) = optional_positive(obj, "abs_tol", path, errors) {
        cfg.abs_tol = t;
    }
    if let Some(t) = optional_positive(obj, "rel_tol", path, errors) {
        cfg.rel_tol = t;
    }
    if let Some(n) = optional_count(obj, "max_subdivisions", path, 1, errors) {
        cfg.max_subdivisions = n as usize;
    }
    if let Some(n) = optional_count(obj, "inner_max_subdivisions", path, 1, errors) {
        cfg.inner_max_subdivisions = n as usize;
    }
    match obj.get("map").map(|m| m.as_str()) {
        None => {}
        Some(Some("rational")) => cfg.map = SemiInfiniteMap::Rational,
        Some(Some("logarithmic")) => cfg.map = SemiInfiniteMap::Logarithmic,
        Some(_) => errors.push(FieldError::new("quadrature.map", "expected \"rational\" or \"logarithmic\"")),
    }
    cfg
}

fn parse_sweep(v: &Value, errors: &mut Vec<FieldError>) -> Option<SweepRange> {
    let path = "sweep";
    let obj = object(v, path, errors)?;
    let before = errors.len();
    reject_unknown(obj, &["lo_db", "hi_db", "step_db"], path, errors);
    let lo = number_field(obj, "lo_db", path, errors);
    let hi = number_field(obj, "hi_db", path, errors);
    let step = number_field(obj, "step_db", path, errors);
    if let (Some(lo), Some(hi)) = (lo, hi) {
        if lo >= hi {
            errors.push(FieldError::new("sweep.hi_db", format!("must exceed lo_db ({lo}), got {hi}")));
        }
    }
    if let Some(s) = step {
        if s <= 0.0 {
            errors.push(FieldError::new("sweep.step_db", format!("must be > 0, got {s}")));
        }
    }
    if errors.len() > before {
        return None;
    }
    Some(SweepRange { lo_db: lo?, hi_db: hi?, step_db: step? })
}

fn mg_capable(family: Family) -> bool {
    matches!(family, Family::Rayleigh | Family::NakagamiM | Family::KG | Family::FisherF)
}

/// Validates a scenario config, reporting every failing field.
pub fn parse_scenario(root: &Value, sweep: bool) -> Result<ScenarioConfig, Vec<FieldError>> {
    let mut errors = Vec::new();
    let Some(obj) = object(root, "", &mut errors) else { return Err(errors) };
    reject_unknown(
        obj,
        &["main", "wiretap", "rate", "metric", "backend", "seed", "mc", "mixture", "quadrature", "sweep"],
        "",
        &mut errors,
    );

    let channel = |key: &str, errors: &mut Vec<FieldError>| -> Option<ChannelSpec> {
        match obj.get(key) {
            None => {
                errors.push(FieldError::new(key, "missing field"));
                None
            }
            Some(v) => {
                // The sweep sets the main channel's mean SNR itself.
                let mut v = v.clone();
                if sweep && key == "main" {
                    if let Some(o) = v.as_object_mut() {
                        o.entry("mean_snr_db").or_insert(Value::from(0.0));
                    }
                }
                channel_from_value(&v, key, errors)
            }
        }
    };
    let main = channel("main", &mut errors);
    let wiretap = channel("wiretap", &mut errors);

    let rate = match obj.get("rate") {
        None => Some(0.0),
        Some(_) => match number_field(obj, "rate", "", &mut errors) {
            Some(r) if r >= 0.0 => Some(r),
            Some(r) => {
                errors.push(FieldError::new("rate", format!("must be >= 0, got {r}")));
                None
            }
            None => None,
        },
    };

    let metric = match obj.get("metric") {
        None => {
            errors.push(FieldError::new("metric", "missing field"));
            None
        }
        Some(Value::String(s)) => match s.parse::<Metric>() {
            Ok(m) => Some(m),
            Err(e) => {
                errors.push(FieldError::new("metric", e));
                None
            }
        },
        Some(v) => {
            errors.push(FieldError::new("metric", format!("expected a string, got {v}")));
            None
        }
    };

    let backend = match obj.get("backend") {
        None => Some(BackendKind::Analytic),
        Some(Value::String(s)) => match s.parse::<BackendKind>() {
            Ok(b) => Some(b),
            Err(e) => {
                errors.push(FieldError::new("backend", e));
                None
            }
        },
        Some(v) => {
            errors.push(FieldError::new("backend", format!("expected a string, got {v}")));
            None
        }
    };
    if backend == Some(BackendKind::Mg) {
        for (key, spec) in [("main", &main), ("wiretap", &wiretap)] {
            if let Some(s) = spec {
                if !mg_capable(s.family()) {
                    errors.push(FieldError::new(
                        "backend",
                        format!("mg has no recipe for {key} family {}; use analytic, foxh or mog", s.family()),
                    ));
                }
            }
        }
    }

    let seed = optional_count(obj, "seed", "", 0, &mut errors).unwrap_or(0);

    let mut draws = DEFAULT_DRAWS;
    if let Some(v) = obj.get("mc") {
        if let Some(o) = object(v, "mc", &mut errors) {
            reject_unknown(o, &["draws"], "mc", &mut errors);
            if let Some(n) = optional_count(o, "draws", "mc", crate::montecarlo::MIN_DRAWS, &mut errors) {
                draws = n;
            }
        }
    }

    let (mut mg_components, mut mog_components, mut mog_samples) =
        (DEFAULT_MG_COMPONENTS, DEFAULT_MOG_COMPONENTS, DEFAULT_MOG_SAMPLES);
    if let Some(v) = obj.get("mixture") {
        if let Some(o) = object(v, "mixture", &mut errors) {
            reject_unknown(o, &["mg_components", "mog_components", "mog_samples"], "mixture", &mut errors);
            if let Some(n) = optional_count(o, "mg_components", "mixture", 1, &mut errors) {
                mg_components = n as usize;
            }
            if let Some(n) = optional_count(o, "mog_components", "mixture", 1, &mut errors) {
                mog_components = n as usize;
            }
            if let Some(n) = optional_count(o, "mog_samples", "mixture", 10, &mut errors) {
                mog_samples = n as usize;
            }
            if mog_samples < 10 * mog_components {
                errors.push(FieldError::new("mixture.mog_samples", "need at least 10 samples per MoG component"));
            }
        }
    }

    let quadrature = obj.get("quadrature").map(|v| parse_quadrature(v, &mut errors)).unwrap_or_default();

    let sweep_range = match (obj.get("sweep"), sweep) {
        (Some(v), true) => parse_sweep(v, &mut errors),
        (None, true) => {
            errors.push(FieldError::new("sweep", "missing field"));
            None
        }
        (Some(v), false) => {
            // Still validated so a shared config file fails early.
            parse_sweep(v, &mut errors)
        }
        (None, false) => None,
    };

    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(ScenarioConfig {
        main: main.expect("validated"),
        wiretap: wiretap.expect("validated"),
        rate: rate.expect("validated"),
        metric: metric.expect("validated"),
        backend: backend.expect("validated"),
        seed,
        draws,
        mg_components,
        mog_components,
        mog_samples,
        quadrature,
        sweep: sweep_range,
    })
}
