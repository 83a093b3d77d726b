//! Command-line front end: argument parsing, dispatch, and report output.

pub mod args;
pub mod commands;
pub mod render;

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use ie_core::rational::parse_rational;
use ie_core::{Config, Error, Result};

use args::{Cli, Command, ConfigArgs};
use commands::Report;

pub const SCHEMA_VERSION: u32 = 1;

/// Exit codes: decided or plain success, error, undecided.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn config(a: &ConfigArgs) -> Result<Config> {
    let cfg = Config {
        window: a.window,
        precision: a.precision,
        horizon: a.horizon,
        limit_horizon: a.limit_horizon,
        tol: parse_rational(&a.tol)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cmd: &Command, cfg: &Config) -> Result<Report> {
    use commands as c;
    match cmd {
        Command::Eval { expr, at } => c::eval(expr, at, cfg),
        Command::St { value } => c::st(value, cfg),
        Command::Classify { value } => c::classify(value, cfg),
        Command::Deriv { expr, at } => c::deriv(expr, at, cfg),
        Command::Limit { stream, with } => c::limit_cmd(stream, with, cfg),
        Command::Cont { expr, at } => c::cont(expr, at, cfg),
        Command::Ucont { expr, domain } => c::ucont(expr, domain, cfg),
        Command::Uconv { sum, limit, rule } => c::uconv(sum, limit, rule, cfg),
        Command::Stevin { expr, bracket, digits } => c::stevin(expr, bracket, *digits, cfg),
        Command::Ivt { expr, bracket, m, iters } => c::ivt(expr, bracket, *m, *iters, cfg),
        Command::Delta { expr, at, alpha, eps, ns } => c::delta(expr, at, alpha, eps, ns, cfg),
        Command::Compare { left, right, with } => c::compare(left, right, with, cfg),
    }
}

fn envelope(
    cli: &Cli,
    argv: &[String],
    cfg: Option<&Config>,
    code: i32,
    started: Instant,
) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(cli.command.name()));
    m.insert("argv".into(), json!(argv));
    m.insert("config".into(), cfg.map_or(Value::Null, render::config_json));
    m.insert("exit_code".into(), json!(code));
    m.insert("timing_ms".into(), json!(started.elapsed().as_secs_f64() * 1e3));
    m
}

fn error_json(e: &Error) -> Value {
    json!({ "name": e.name(), "message": e.to_string() })
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let started = Instant::now();
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Execution { code: EXIT_ERROR, stdout: String::new(), stderr: text }
            } else {
                Execution { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let argv: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cfg = config(&cli.config);
    let outcome = cfg.as_ref().map_err(Clone::clone).and_then(|cfg| dispatch(&cli.command, cfg));
    let code = match &outcome {
        Ok(r) if r.undecided => EXIT_UNDECIDED,
        Ok(_) => EXIT_OK,
        Err(_) => EXIT_ERROR,
    };
    let mut out = Execution { code, stdout: String::new(), stderr: String::new() };
    if cli.json {
        let mut m = envelope(&cli, &argv, cfg.as_ref().ok(), code, started);
        match &outcome {
            Ok(r) => {
                m.insert("result".into(), r.payload.clone());
            }
            Err(e) => {
                m.insert("error".into(), error_json(e));
            }
        }
        out.stdout = serde_json::to_string_pretty(&Value::Object(m)).unwrap_or_default() + "\n";
    } else {
        match &outcome {
            Ok(r) => {
                for l in &r.lines {
                    out.stdout.push_str(l);
                    out.stdout.push('\n');
                }
            }
            Err(e) => out.stderr = format!("{e}\n"),
        }
    }
    if let (true, Err(e)) = (cli.json, &outcome) {
        out.stderr = format!("{e}\n");
    }
    out
}
