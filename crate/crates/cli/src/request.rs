//! Run requests and their validation into typed protocol parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use ifm_core::{CavityConfig, GeneralizedIfmConfig, SystemState, ZenoConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Protocol {
    /// Bomb test with the bomb's mirror as one arm; same mathematics as `ev` (`R`, `present`).
    Penrose,
    /// Mine test in a tuned interferometer (`R`, `present`).
    Ev,
    /// Mine test repeated on every D1 click (`R`).
    RepeatedEv,
    /// N-stage polarization rotation with an absorber (`N`, `present`).
    Zeno,
    /// Cavity with a resonant absorber (`transmission`, `bounces`, `absorber`).
    Xray,
    /// Two-state system probed through a beam splitter (`alpha`, `beta`, `system`).
    Generalized,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Penrose => "penrose",
            Protocol::Ev => "ev",
            Protocol::RepeatedEv => "repeated_ev",
            Protocol::Zeno => "zeno",
            Protocol::Xray => "xray",
            Protocol::Generalized => "generalized",
        }
    }

    /// Accepted parameters; the boolean says whether the parameter is required.
    pub fn params(self) -> &'static [(&'static str, bool)] {
        match self {
            Protocol::Penrose | Protocol::Ev => &[("R", true), ("present", true)],
            Protocol::RepeatedEv => &[("R", true)],
            Protocol::Zeno => &[("N", true), ("present", true)],
            Protocol::Xray => &[("transmission", true), ("bounces", true), ("absorber", true)],
            Protocol::Generalized => &[
                ("alpha", true),
                ("beta", true),
                ("alpha_im", false),
                ("beta_im", false),
                ("system", true),
            ],
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Exact,
    Sample,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Parameter value as given on the command line or in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Number(f64),
    Text(String),
}

impl ParamValue {
    fn as_f64(&self, name: &str) -> Result<f64, CliError> {
        let v = match self {
            ParamValue::Number(x) => Some(*x),
            ParamValue::Text(s) => s.trim().parse().ok(),
            ParamValue::Bool(_) => None,
        };
        v.filter(|x: &f64| x.is_finite())
            .ok_or_else(|| CliError::invalid(name, format!("expected a number, got {self}")))
    }

    fn as_bool(&self, name: &str) -> Result<bool, CliError> {
        match self {
            ParamValue::Bool(b) => Ok(*b),
            ParamValue::Text(s) => match s.trim() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(CliError::invalid(name, format!("expected true or false, got {s}"))),
            },
            ParamValue::Number(_) => Err(CliError::invalid(name, format!("expected true or false, got {self}"))),
        }
    }

    fn as_u32(&self, name: &str) -> Result<u32, CliError> {
        let x = self.as_f64(name)?;
        if x.fract() != 0.0 || x < 0.0 || x > u32::MAX as f64 {
            return Err(CliError::invalid(
                name,
                format!("expected a non-negative integer, got {self}"),
            ));
        }
        Ok(x as u32)
    }

    fn as_text(&self) -> String {
        match self {
            ParamValue::Text(s) => s.trim().to_owned(),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Number(x) => write!(f, "{x}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;

/// Everything needed to reproduce one invocation. This is also the shape of
/// the `--config` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRequest {
    pub protocol: Protocol,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_trials")]
    pub trials: i64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_format: OutputFormat,
}

fn default_trials() -> i64 {
    DEFAULT_TRIALS as i64
}

impl RunRequest {
    pub fn new(protocol: Protocol) -> Self {
        Self {
            protocol,
            params: BTreeMap::new(),
            mode: Mode::Exact,
            trials: default_trials(),
            seed: DEFAULT_SEED,
            output_format: OutputFormat::Json,
        }
    }

    pub fn from_config_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("bad config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("request serializes")
    }

    pub fn set_param(&mut self, name: &str, value: ParamValue) {
        self.params.insert(name.to_owned(), value);
    }

    pub fn trial_count(&self) -> Result<u64, CliError> {
        u64::try_from(self.trials)
            .map_err(|_| CliError::invalid("trials", format!("must be >= 0, got {}", self.trials)))
    }

    pub fn validate(&self) -> Result<ProtocolParams, CliError> {
        self.trial_count()?;
        ProtocolParams::from_params(self.protocol, &self.params)
    }
}

/// Parses `key=value`.
pub fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(format!("empty parameter name in `{s}`"));
    }
    Ok((k.to_owned(), v.trim().to_owned()))
}

/// Validated, typed parameters for one protocol.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolParams {
    Ev { reflectivity: f64, object_present: bool },
    RepeatedEv { reflectivity: f64 },
    Zeno(ZenoConfig),
    Xray(CavityConfig),
    Generalized(GeneralizedIfmConfig),
}

impl ProtocolParams {
    pub fn from_params(protocol: Protocol, params: &BTreeMap<String, ParamValue>) -> Result<Self, CliError> {
        let accepted = protocol.params();
        if let Some(name) = params.keys().find(|k| !accepted.iter().any(|(a, _)| a == k)) {
            return Err(CliError::invalid(name, format!("not a parameter of {protocol}")));
        }
        if let Some((name, _)) = accepted.iter().find(|(n, req)| *req && !params.contains_key(*n)) {
            return Err(CliError::invalid(name, format!("required by {protocol}")));
        }
        let get = |name: &str| &params[name];
        let reflectivity = |name: &str| -> Result<f64, CliError> {
            let r = get(name).as_f64(name)?;
            if r <= 0.0 || r >= 1.0 {
                return Err(CliError::invalid(
                    name,
                    format!("must lie strictly between 0 and 1, got {r}"),
                ));
            }
            Ok(r)
        };
        let parsed = match protocol {
            Protocol::Penrose | Protocol::Ev => ProtocolParams::Ev {
                reflectivity: reflectivity("R")?,
                object_present: get("present").as_bool("present")?,
            },
            Protocol::RepeatedEv => ProtocolParams::RepeatedEv {
                reflectivity: reflectivity("R")?,
            },
            Protocol::Zeno => {
                let cycles = get("N").as_u32("N")?;
                if cycles < 1 {
                    return Err(CliError::invalid("N", "must be at least 1"));
                }
                ProtocolParams::Zeno(ZenoConfig {
                    cycles,
                    object_present: get("present").as_bool("present")?,
                })
            }
            Protocol::Xray => {
                let cfg = CavityConfig {
                    coupler_transmission: get("transmission").as_f64("transmission")?,
                    bounces: get("bounces").as_u32("bounces")?,
                    absorber_present: get("absorber").as_bool("absorber")?,
                };
                cfg.validate()
                    .map_err(|_| CliError::invalid("transmission", "must lie strictly between 0 and 1"))?;
                ProtocolParams::Xray(cfg)
            }
            Protocol::Generalized => {
                let part = |name: &str| params.get(name).map_or(Ok(0.0), |v| v.as_f64(name));
                let alpha = Complex64::new(get("alpha").as_f64("alpha")?, part("alpha_im")?);
                let beta = Complex64::new(get("beta").as_f64("beta")?, part("beta_im")?);
                let system = match get("system").as_text().as_str() {
                    "psi" => SystemState::Psi,
                    "psi_perp" => SystemState::PsiPerp,
                    other => {
                        return Err(CliError::invalid(
                            "system",
                            format!("expected psi or psi_perp, got {other}"),
                        ));
                    }
                };
                let cfg = GeneralizedIfmConfig::new(alpha, beta, system)
                    .map_err(|_| CliError::invalid("alpha", "|alpha|^2 + |beta|^2 must equal 1"))?;
                ProtocolParams::Generalized(cfg)
            }
        };
        Ok(parsed)
    }

    /// Parameters as they will be echoed into result documents.
    pub fn echo(&self) -> Vec<(&'static str, serde_json::Value)> {
        use serde_json::json;
        match self {
            ProtocolParams::Ev {
                reflectivity,
                object_present,
            } => vec![("R", json!(reflectivity)), ("present", json!(object_present))],
            ProtocolParams::RepeatedEv { reflectivity } => vec![("R", json!(reflectivity))],
            ProtocolParams::Zeno(cfg) => vec![("N", json!(cfg.cycles)), ("present", json!(cfg.object_present))],
            ProtocolParams::Xray(cfg) => vec![
                ("transmission", json!(cfg.coupler_transmission)),
                ("bounces", json!(cfg.bounces)),
                ("absorber", json!(cfg.absorber_present)),
            ],
            ProtocolParams::Generalized(cfg) => vec![
                ("alpha", json!(cfg.alpha.re)),
                ("alpha_im", json!(cfg.alpha.im)),
                ("beta", json!(cfg.beta.re)),
                ("beta_im", json!(cfg.beta.im)),
                (
                    "system",
                    json!(match cfg.system {
                        SystemState::Psi => "psi",
                        SystemState::PsiPerp => "psi_perp",
                    }),
                ),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, &str)]) -> BTreeMap<String, ParamValue> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), ParamValue::Text(v.to_string())))
            .collect()
    }

    #[test]
    fn ev_params() {
        let p = ProtocolParams::from_params(Protocol::Ev, &params(&[("R", "0.5"), ("present", "true")])).unwrap();
        assert_eq!(
            p,
            ProtocolParams::Ev {
                reflectivity: 0.5,
                object_present: true
            }
        );
    }

    #[test]
    fn diagnostics_name_the_parameter() {
        let err = ProtocolParams::from_params(Protocol::Ev, &params(&[("R", "2.0"), ("present", "true")])).unwrap_err();
        assert!(err.to_string().contains("R"), "{err}");
        let err = ProtocolParams::from_params(Protocol::Ev, &params(&[("R", "0.5")])).unwrap_err();
        assert!(err.to_string().contains("present"), "{err}");
        let err = ProtocolParams::from_params(Protocol::Zeno, &params(&[("N", "0"), ("present", "1")])).unwrap_err();
        assert!(err.to_string().contains("N"), "{err}");
        let err = ProtocolParams::from_params(Protocol::Zeno, &params(&[("N", "2.5"), ("present", "1")])).unwrap_err();
        assert!(err.to_string().contains("N"), "{err}");
        let err = ProtocolParams::from_params(Protocol::RepeatedEv, &params(&[("R", "0.5"), ("Q", "1")])).unwrap_err();
        assert!(err.to_string().contains("Q"), "{err}");
        let err = ProtocolParams::from_params(
            Protocol::Generalized,
            &params(&[("alpha", "0.6"), ("beta", "0.6"), ("system", "psi")]),
        )
        .unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");
    }

    #[test]
    fn config_values_may_be_typed() {
        let req = RunRequest::from_json(
            r#"{"protocol":"xray","params":{"transmission":0.001,"bounces":50,"absorber":true}}"#,
        )
        .unwrap();
        assert_eq!(req.mode, Mode::Exact);
        assert_eq!(req.trials, DEFAULT_TRIALS as i64);
        let p = req.validate().unwrap();
        assert_eq!(
            p,
            ProtocolParams::Xray(CavityConfig {
                coupler_transmission: 0.001,
                bounces: 50,
                absorber_present: true
            })
        );
    }

    #[test]
    fn negative_trials_rejected() {
        let mut req = RunRequest::new(Protocol::RepeatedEv);
        req.set_param("R", ParamValue::Number(0.5));
        req.trials = -1;
        assert!(req.validate().unwrap_err().to_string().contains("trials"));
    }

    #[test]
    fn assignments() {
        assert_eq!(parse_assignment("R=0.5").unwrap(), ("R".into(), "0.5".into()));
        assert!(parse_assignment("R").is_err());
        assert!(parse_assignment("=1").is_err());
    }
}
