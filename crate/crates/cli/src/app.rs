use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::execute::{evaluate, sample_protocol, tune};
use crate::output::{self, SweepRow};
use crate::request::{parse_assignment, Mode, OutputFormat, ParamValue, Protocol, ProtocolParams, RunRequest};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "ifm", version, about = "Interaction-free measurement simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one protocol configuration.
    Run {
        #[command(flatten)]
        request: RequestArgs,
        /// exact propagation or Monte Carlo sampling
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// sampling threads; results do not depend on this
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Evaluate a protocol over a grid of one parameter.
    Sweep {
        #[command(flatten)]
        request: RequestArgs,
        /// NAME=v1,v2,...
        #[arg(long)]
        grid: String,
    },
    /// Sample trials from a protocol's exact distribution.
    Sample {
        #[command(flatten)]
        request: RequestArgs,
        /// sampling threads; results do not depend on this
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Second-splitter transmission that darkens D2 (`--param T1=...`).
    Tune {
        #[arg(long = "param", value_parser = parse_assignment)]
        params: Vec<(String, String)>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
}

#[derive(Debug, Args)]
pub struct RequestArgs {
    #[arg(long, value_enum)]
    pub protocol: Option<Protocol>,
    /// KEY=VALUE, repeatable
    #[arg(long = "param", value_parser = parse_assignment)]
    pub params: Vec<(String, String)>,
    /// Monte Carlo trial count (default 100000)
    #[arg(long, allow_negative_numbers = true)]
    pub trials: Option<i64>,
    /// master seed for sampling (default 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// output format (default json)
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// JSON request file; command-line values take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl RequestArgs {
    /// Merges the config file (if any) with command-line overrides.
    pub fn to_request(&self) -> Result<RunRequest, CliError> {
        let mut req = match (&self.config, self.protocol) {
            (Some(path), _) => RunRequest::from_config_file(path)?,
            (None, Some(p)) => RunRequest::new(p),
            (None, None) => return Err(CliError::Validation("--protocol or --config is required".into())),
        };
        if let Some(p) = self.protocol {
            req.protocol = p;
        }
        for (k, v) in &self.params {
            req.set_param(k, ParamValue::Text(v.clone()));
        }
        if let Some(t) = self.trials {
            req.trials = t;
        }
        if let Some(s) = self.seed {
            req.seed = s;
        }
        if let Some(f) = self.format {
            req.output_format = f;
        }
        Ok(req)
    }
}

/// Executes a complete request and returns the serialized result.
pub fn execute_request(req: &RunRequest, workers: usize) -> Result<String, CliError> {
    let params = req.validate()?;
    match req.mode {
        Mode::Exact => {
            let eval = evaluate(&params)?;
            Ok(match req.output_format {
                OutputFormat::Json => output::exact_json(req.protocol, &params, &eval),
                OutputFormat::Csv => output::exact_csv(req.protocol, &eval),
            })
        }
        Mode::Sample => sample_output("run", req, &params, workers),
    }
}

fn sample_output(command: &str, req: &RunRequest, params: &ProtocolParams, workers: usize) -> Result<String, CliError> {
    let sampled = sample_protocol(params, req.trial_count()?, req.seed, workers)?;
    Ok(match req.output_format {
        OutputFormat::Json => output::sample_json(command, req.protocol, params, &sampled),
        OutputFormat::Csv => output::sample_csv(req.protocol, &sampled),
    })
}

/// Parses `NAME=v1,v2,...`.
pub fn parse_grid(grid: &str) -> Result<(String, Vec<String>), CliError> {
    let (name, values) = parse_assignment(grid).map_err(|e| CliError::Validation(format!("invalid grid: {e}")))?;
    let values: Vec<String> = values.split(',').map(|v| v.trim().to_owned()).collect();
    if values.iter().any(String::is_empty) {
        return Err(CliError::Validation(format!("invalid grid: empty value in `{grid}`")));
    }
    Ok((name, values))
}

pub fn execute_sweep(req: &RunRequest, grid: &str) -> Result<String, CliError> {
    let (name, values) = parse_grid(grid)?;
    if !req.protocol.params().iter().any(|(p, _)| *p == name) {
        return Err(CliError::invalid(&name, format!("not a parameter of {}", req.protocol)));
    }
    // Validate every grid point before evaluating any.
    let points = values
        .iter()
        .map(|v| {
            let mut point = req.clone();
            point.set_param(&name, ParamValue::Text(v.clone()));
            point.validate()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows = points
        .iter()
        .map(|params| {
            let value = params
                .echo()
                .into_iter()
                .find(|(k, _)| *k == name)
                .map_or(Value::Null, |(_, v)| v);
            let value = match value {
                Value::Number(n) if !n.is_u64() => output::number(n.as_f64().unwrap_or(f64::NAN)),
                other => other,
            };
            Ok(SweepRow {
                value,
                eval: evaluate(params)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(match req.output_format {
        OutputFormat::Json => output::sweep_json(req.protocol, &name, &points[0], &rows),
        OutputFormat::Csv => output::sweep_csv(req.protocol, &name, &rows),
    })
}

fn execute_tune(params: &[(String, String)], format: OutputFormat) -> Result<String, CliError> {
    if let Some((k, _)) = params.iter().find(|(k, _)| k != "T1") {
        return Err(CliError::invalid(k, "tune accepts only T1"));
    }
    let (_, raw) = params
        .iter()
        .rev()
        .find(|(k, _)| k == "T1")
        .ok_or_else(|| CliError::invalid("T1", "required by tune"))?;
    let t1: f64 = raw
        .parse()
        .map_err(|_| CliError::invalid("T1", format!("expected a number, got {raw}")))?;
    let t = tune(t1)?;
    Ok(match format {
        OutputFormat::Json => output::tune_json(&t),
        OutputFormat::Csv => output::tune_csv(&t),
    })
}

pub fn dispatch(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Run { request, mode, workers } => {
            let mut req = request.to_request()?;
            if let Some(m) = mode {
                req.mode = *m;
            }
            execute_request(&req, *workers)
        }
        Command::Sweep { request, grid } => {
            let req = request.to_request()?;
            execute_sweep(&req, grid)
        }
        Command::Sample { request, workers } => {
            let mut req = request.to_request()?;
            req.mode = Mode::Sample;
            let params = req.validate()?;
            sample_output("sample", &req, &params, *workers)
        }
        Command::Tune { params, format } => execute_tune(params, *format),
    }
}

/// Runs the command line `args` (including the program name) and returns the
/// exit code together with standard output and standard error text.
pub fn run_cli<I, T>(args: I) -> (u8, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                (0, text, String::new())
            } else {
                (2, String::new(), text)
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => (0, out, String::new()),
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
    }
}
