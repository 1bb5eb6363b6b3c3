//! Channel specs as JSON:
//! `{"family": "nakagami_m", "params": {"m": 2.5}, "mean_snr_db": 10.0}`.
//!
//! Parsing collects every failing field instead of stopping at the first.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};
use std::fmt;

use super::{AlphaMuHop, ChannelSpec, Fading, Family};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// A schema violation at a JSON path such as `main.params.m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl FieldError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// Reports keys of `obj` not in `allowed`.
pub(crate) fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], path: &str, errors: &mut Vec<FieldError>) {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            errors.push(FieldError::new(join(path, key), "unknown field"));
        }
    }
}

pub(crate) fn number_field(
    obj: &Map<String, Value>,
    key: &str,
    path: &str,
    errors: &mut Vec<FieldError>,
) -> Option<f64> {
    match obj.get(key) {
        None => {
            errors.push(FieldError::new(join(path, key), "missing field"));
            None
        }
        Some(v) => match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                errors.push(FieldError::new(join(path, key), format!("expected a finite number, got {v}")));
                None
            }
        },
    }
}

fn positive_field(obj: &Map<String, Value>, key: &str, path: &str, errors: &mut Vec<FieldError>) -> Option<f64> {
    let v = number_field(obj, key, path, errors)?;
    if v > 0.0 {
        Some(v)
    } else {
        errors.push(FieldError::new(join(path, key), format!("must be > 0, got {v}")));
        None
    }
}

fn params_for(family: Family, params: &Map<String, Value>, path: &str, errors: &mut Vec<FieldError>) -> Option<Fading> {
    let before = errors.len();
    let pos = |key: &str, errors: &mut Vec<FieldError>| positive_field(params, key, path, errors);
    let fading = match family {
        Family::Rayleigh => {
            reject_unknown(params, &[], path, errors);
            Some(Fading::Rayleigh)
        }
        Family::Maxwell => {
            reject_unknown(params, &[], path, errors);
            Some(Fading::Maxwell)
        }
        Family::NakagamiM => {
            reject_unknown(params, &["m"], path, errors);
            pos("m", errors).map(|m| Fading::NakagamiM { m })
        }
        Family::Weibull => {
            reject_unknown(params, &["alpha"], path, errors);
            pos("alpha", errors).map(|alpha| Fading::Weibull { alpha })
        }
        Family::AlphaMu => {
            reject_unknown(params, &["alpha", "mu"], path, errors);
            let (alpha, mu) = (pos("alpha", errors), pos("mu", errors));
            Some(Fading::AlphaMu { alpha: alpha?, mu: mu? })
        }
        Family::FisherF => {
            reject_unknown(params, &["m", "m_s"], path, errors);
            let (m, m_s) = (pos("m", errors), pos("m_s", errors));
            Some(Fading::FisherF { m: m?, m_s: m_s? })
        }
        Family::KG => {
            reject_unknown(params, &["m_l", "m_sl"], path, errors);
            let (m_l, m_sl) = (pos("m_l", errors), pos("m_sl", errors));
            Some(Fading::KG { m_l: m_l?, m_sl: m_sl? })
        }
        Family::Egk => {
            reject_unknown(params, &["m", "xi", "m_s", "xi_s"], path, errors);
            let (m, xi, m_s, xi_s) = (pos("m", errors), pos("xi", errors), pos("m_s", errors), pos("xi_s", errors));
            Some(Fading::Egk { m: m?, xi: xi?, m_s: m_s?, xi_s: xi_s? })
        }
        Family::CascadedAlphaMu => {
            reject_unknown(params, &["hops"], path, errors);
            let hops_path = join(path, "hops");
            match params.get("hops") {
                Some(Value::Array(items)) if !items.is_empty() => {
                    let mut hops = Vec::with_capacity(items.len());
                    for (i, item) in items.iter().enumerate() {
                        let hop_path = format!("{hops_path}[{i}]");
                        match item.as_object() {
                            Some(obj) => {
                                reject_unknown(obj, &["alpha", "mu"], &hop_path, errors);
                                let alpha = positive_field(obj, "alpha", &hop_path, errors);
                                let mu = positive_field(obj, "mu", &hop_path, errors);
                                if let (Some(alpha), Some(mu)) = (alpha, mu) {
                                    hops.push(AlphaMuHop { alpha, mu });
                                }
                            }
                            None => errors.push(FieldError::new(hop_path, "expected an object {alpha, mu}")),
                        }
                    }
                    Some(Fading::CascadedAlphaMu { hops })
                }
                Some(Value::Array(_)) => {
                    errors.push(FieldError::new(hops_path, "needs at least one hop"));
                    None
                }
                Some(other) => {
                    errors.push(FieldError::new(hops_path, format!("expected an array, got {other}")));
                    None
                }
                None => {
                    errors.push(FieldError::new(hops_path, "missing field"));
                    None
                }
            }
        }
    };
    if errors.len() > before {
        None
    } else {
        fading
    }
}

/// Parses a channel object at `path`, appending every violation to
/// `errors`. Returns `None` if anything failed.
pub fn channel_from_value(value: &Value, path: &str, errors: &mut Vec<FieldError>) -> Option<ChannelSpec> {
    let Some(obj) = value.as_object() else {
        errors.push(FieldError::new(path, "expected a channel object"));
        return None;
    };
    let before = errors.len();
    reject_unknown(obj, &["family", "params", "mean_snr_db"], path, errors);
    let family = match obj.get("family") {
        None => {
            errors.push(FieldError::new(join(path, "family"), "missing field"));
            None
        }
        Some(Value::String(name)) => match name.parse::<Family>() {
            Ok(f) => Some(f),
            Err(_) => {
                let known: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
                errors.push(FieldError::new(
                    join(path, "family"),
                    format!("unknown family {name:?}; expected one of {}", known.join(", ")),
                ));
                None
            }
        },
        Some(other) => {
            errors.push(FieldError::new(join(path, "family"), format!("expected a string, got {other}")));
            None
        }
    };
    let params_path = join(path, "params");
    let params = match obj.get("params") {
        None => {
            errors.push(FieldError::new(&params_path, "missing field"));
            None
        }
        Some(Value::Object(map)) => Some(map),
        Some(other) => {
            errors.push(FieldError::new(&params_path, format!("expected an object, got {other}")));
            None
        }
    };
    let fading = match (family, params) {
        (Some(f), Some(p)) => params_for(f, p, &params_path, errors),
        _ => None,
    };
    let mean_db = number_field(obj, "mean_snr_db", path, errors);
    if errors.len() > before {
        return None;
    }
    match ChannelSpec::new(fading?, db_to_linear(mean_db?)) {
        Ok(spec) => Some(spec),
        Err(e) => {
            errors.push(FieldError::new(path, e.to_string()));
            None
        }
    }
}

impl ChannelSpec {
    /// JSON object form, average SNR in dB.
    pub fn to_json(&self) -> Value {
        let params = match self.fading() {
            Fading::Rayleigh | Fading::Maxwell => json!({}),
            Fading::NakagamiM { m } => json!({ "m": m }),
            Fading::Weibull { alpha } => json!({ "alpha": alpha }),
            Fading::AlphaMu { alpha, mu } => json!({ "alpha": alpha, "mu": mu }),
            Fading::CascadedAlphaMu { hops } => {
                json!({ "hops": hops.iter().map(|h| json!({"alpha": h.alpha, "mu": h.mu})).collect::<Vec<_>>() })
            }
            Fading::FisherF { m, m_s } => json!({ "m": m, "m_s": m_s }),
            Fading::KG { m_l, m_sl } => json!({ "m_l": m_l, "m_sl": m_sl }),
            Fading::Egk { m, xi, m_s, xi_s } => json!({ "m": m, "xi": xi, "m_s": m_s, "xi_s": xi_s }),
        };
        json!({
            "family": self.family().name(),
            "params": params,
            "mean_snr_db": linear_to_db(self.mean_snr()),
        })
    }

    pub fn from_json(value: &Value) -> Result<Self, Vec<FieldError>> {
        let mut errors = Vec::new();
        match channel_from_value(value, "", &mut errors) {
            Some(spec) if errors.is_empty() => Ok(spec),
            _ => Err(errors),
        }
    }
}

impl Serialize for ChannelSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChannelSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        ChannelSpec::from_json(&value)
            .map_err(|errs| D::Error::custom(errs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")))
    }
}
