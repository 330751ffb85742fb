//! Batch front door: model reports, series dumps, invariant tables and
//! verification runs.
//!
//! Exit codes: 0 success (all checks pass), 1 usage error, 2 model
//! invariant violation, 3 verification failure, 4 internal inconsistency.

use crate::cone::{
    inject_fault, regularity_check, ConeError, PipelineOrders, SlotKey, VerifyContext,
};
use crate::ifun::{big_i, small_i, unstable_sum, Chamber, SeriesOrders};
use crate::model::{Epsilon, FermatModel, ModelError, ModelSpec};
use crate::rat::format_rat;
use crate::report::{CheckReport, VerifyReport};
use crate::series::dump_zseries;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "lgcone",
    about = "Exact-arithmetic engine for weighted Landau-Ginzburg correlators and wall-crossing checks"
)]
pub struct Cli {
    /// JSON job config mirroring the flags of one subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Args, Clone, Default)]
pub struct ModelArgs {
    /// Comma-separated weights, e.g. 1,1,1,1,1
    #[arg(long, value_delimiter = ',')]
    pub weights: Vec<u64>,
    #[arg(long)]
    pub degree: Option<u64>,
    /// Model spec file: { "weights": [...], "degree": d }
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dump,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckName {
    Regularity,
    Cor4,
    Transport,
    String,
    Sigma,
    Routes,
    Selection,
}

#[derive(Subcommand)]
pub enum Command {
    /// Validate a model and print charges, narrow set, degrees, pairing and
    /// chamber walls.
    Model {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Dump a hypergeometric series in the stable text format.
    Ifunction {
        #[command(flatten)]
        model: ModelArgs,
        /// Weighted u-degree bound.
        #[arg(long, default_value = "4")]
        order: u32,
        /// Depth of the stored z-window.
        #[arg(long, default_value = "3")]
        zneg: u32,
        /// Restrict to the degree <= 1 block.
        #[arg(long)]
        small: bool,
        /// Cap the sum at the chamber of this stability parameter.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dump")]
        format: Format,
    },
    /// Extract an invariant table for one or more stability parameters.
    Invariants {
        #[command(flatten)]
        model: ModelArgs,
        /// Stability parameter: a rational p/q, "infinity" or "zero".
        #[arg(long, default_value = "infinity")]
        eps: Vec<String>,
        #[arg(long, default_value = "4")]
        order: u32,
        #[arg(long = "t-order", default_value = "3")]
        t_order: u32,
        #[arg(long, default_value = "3")]
        zneg: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run a named verification check and emit a machine-readable report.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        check: Vec<CheckName>,
        #[arg(long)]
        eps: Vec<String>,
        #[arg(long, default_value = "4")]
        order: u32,
        #[arg(long = "t-order", default_value = "2")]
        t_order: u32,
        #[arg(long, default_value = "3")]
        zneg: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

/// JSON mirror of the flags.
#[derive(Deserialize)]
pub struct JobConfig {
    pub command: String,
    #[serde(default)]
    pub weights: Vec<u64>,
    #[serde(default)]
    pub degree: Option<u64>,
    #[serde(default)]
    pub model: Option<PathBuf>,
    #[serde(default)]
    pub eps: Vec<String>,
    #[serde(default)]
    pub order: Option<u32>,
    #[serde(default)]
    pub t_order: Option<u32>,
    #[serde(default)]
    pub zneg: Option<u32>,
    #[serde(default)]
    pub small: bool,
    #[serde(default)]
    pub check: Vec<String>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Model(ModelError),
    VerificationFailed,
    Internal(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Model(_) => 2,
            CliError::VerificationFailed => 3,
            CliError::Internal(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("usage error: {m}"),
            CliError::Model(e) => format!("model invariant violation: {e}"),
            CliError::VerificationFailed => "verification failed".into(),
            CliError::Internal(m) => format!("internal inconsistency: {m}"),
            CliError::Io(e) => format!("io error: {e}"),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Model(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<ConeError> for CliError {
    fn from(e: ConeError) -> Self {
        CliError::Internal(e.to_string())
    }
}

fn resolve_model(args: &ModelArgs) -> Result<FermatModel, CliError> {
    let spec = if let Some(path) = &args.model {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str::<ModelSpec>(&text)
            .map_err(|e| CliError::Usage(format!("bad model file: {e}")))?
    } else {
        let degree = args
            .degree
            .ok_or_else(|| CliError::Usage("--degree (or --model) is required".into()))?;
        ModelSpec {
            weights: args.weights.clone(),
            degree,
        }
    };
    Ok(FermatModel::from_spec(&spec)?)
}

fn parse_eps(label: &str) -> Result<Epsilon, CliError> {
    Epsilon::parse(label).map_err(CliError::Model)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
    }
}

fn cmd_model(model: &FermatModel, out: &Option<PathBuf>, _format: Format) -> Result<(), CliError> {
    let narrow: Vec<u16> = model.narrow().iter().copied().collect();
    let degrees: Vec<(u16, String)> = (0..model.d())
        .map(|k| (k, format_rat(model.state_degree(k))))
        .collect();
    let pairing_matrix: Vec<Vec<u8>> = narrow
        .iter()
        .map(|&i| {
            narrow
                .iter()
                .map(|&j| {
                    if model.pairing(i, j).unwrap() == crate::rat::rat_int(1) {
                        1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let walls: Vec<String> = FermatModel::chamber_walls(6)
        .iter()
        .map(format_rat)
        .collect();
    let doc = serde_json::json!({
        "weights": model.weights(),
        "degree": model.degree(),
        "charges": model.charges().iter().map(format_rat).collect::<Vec<_>>(),
        "total_charge": format_rat(model.total_charge()),
        "narrow": narrow,
        "state_degrees": degrees.iter().map(|(k, d)| serde_json::json!({"sector": k, "degree": d})).collect::<Vec<_>>(),
        "pairing_matrix": pairing_matrix,
        "chamber_walls": walls,
    });
    emit(
        out,
        &(serde_json::to_string_pretty(&doc).expect("serialize") + "\n"),
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_ifunction(
    model: &FermatModel,
    order: u32,
    zneg: u32,
    small: bool,
    eps: &Option<String>,
    out: &Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    let orders = SeriesOrders::new(order, zneg);
    let series = if small {
        small_i(model, &orders).0
    } else if let Some(label) = eps {
        let chamber = Chamber::of(&parse_eps(label)?);
        unstable_sum(model, &chamber, &orders)
    } else {
        big_i(model, &orders).0
    };
    let dump = dump_zseries(&series, model.d());
    match format {
        Format::Dump => emit(out, &dump),
        Format::Json => {
            let lines: Vec<&str> = dump.lines().collect();
            let doc = serde_json::json!({
                "model": { "weights": model.weights(), "degree": model.degree() },
                "order": order,
                "zneg": zneg,
                "terms": lines,
            });
            emit(
                out,
                &(serde_json::to_string_pretty(&doc).expect("serialize") + "\n"),
            )
        }
        Format::Csv => Err(CliError::Usage(
            "csv is not a series dump format; use dump or json".into(),
        )),
    }
}

fn cmd_invariants(
    model: &FermatModel,
    eps_labels: &[String],
    order: u32,
    t_order: u32,
    zneg: u32,
    out: &Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    let orders = PipelineOrders::derive(model, order, t_order, zneg);
    let ctx = VerifyContext::new(model.clone(), orders)?;
    let mut tables = Vec::new();
    for label in eps_labels {
        let eps = parse_eps(label)?;
        tables.push(ctx.table_for(&eps)?);
    }
    match format {
        Format::Json => {
            let docs: Vec<serde_json::Value> = tables.iter().map(|t| t.to_json()).collect();
            let text = if docs.len() == 1 {
                serde_json::to_string_pretty(&docs[0]).expect("serialize")
            } else {
                serde_json::to_string_pretty(&docs).expect("serialize")
            };
            emit(out, &(text + "\n"))
        }
        Format::Csv => {
            let text = tables
                .iter()
                .map(|t| t.to_csv())
                .collect::<Vec<_>>()
                .join("\n");
            emit(out, &text)
        }
        Format::Dump => Err(CliError::Usage(
            "dump is a series format; tables support json or csv".into(),
        )),
    }
}

fn run_check(
    ctx: &VerifyContext,
    name: CheckName,
    eps_labels: &[String],
) -> Result<CheckReport, CliError> {
    let first_eps = || -> Result<Epsilon, CliError> {
        match eps_labels.first() {
            Some(l) => parse_eps(l),
            None => Ok(Epsilon::Finite(crate::rat::rat(1, 2))),
        }
    };
    Ok(match name {
        CheckName::Regularity => {
            let report = ctx.regularity(&first_eps()?)?;
            // a deliberately corrupted coefficient must be detected
            let cp = crate::cone::j_epsilon(&ctx.model, &first_eps()?, &ctx.orders, &ctx.base)?;
            let fault_seen = match cp.point.slots.keys().next() {
                Some(k) => {
                    let key = SlotKey {
                        t: k.t.clone(),
                        u: k.u.clone(),
                        depth: k.depth,
                    };
                    let c = *cp.point.slots[&key].0.keys().next().unwrap();
                    let bad = inject_fault(&cp.point, &key, c);
                    !regularity_check(&ctx.model, &bad).violations.is_empty()
                }
                None => false,
            };
            let details = serde_json::json!({
                "pairs_checked": report.pairs_checked,
                "coefficients_checked": report.coefficients_checked,
                "complete_range": report.complete_note,
                "violations": report.violations,
                "fault_injection_detected": fault_seen,
            });
            if report.passed() && fault_seen {
                CheckReport::pass("regularity", details)
            } else {
                CheckReport::fail("regularity", details)
            }
        }
        CheckName::Cor4 => {
            let report = ctx.round_trip()?;
            let details = serde_json::to_value(&report).expect("serialize");
            if report.passed() {
                CheckReport::pass("cor4", details)
            } else {
                CheckReport::fail("cor4", details)
            }
        }
        CheckName::Transport => {
            let e2 = first_eps()?;
            let report = ctx.transport(&Epsilon::Infinity, &e2)?;
            let details = serde_json::to_value(&report).expect("serialize");
            if report.passed() {
                CheckReport::pass("transport", details)
            } else {
                CheckReport::fail("transport", details)
            }
        }
        CheckName::String => {
            let report = ctx.string_check()?;
            let passed = report.mismatches.is_empty()
                && report.pairs_checked + report.zero_checked > 0;
            let details = serde_json::to_value(&report).expect("serialize");
            if passed {
                CheckReport::pass("string", details)
            } else {
                CheckReport::fail("string", details)
            }
        }
        CheckName::Sigma => {
            let ok = ctx.sigma_check()?;
            let details = serde_json::json!({
                "note": "sigma = u + O(u^2) and the reversion round trip are asserted during slice construction",
            });
            if ok {
                CheckReport::pass("sigma", details)
            } else {
                CheckReport::fail("sigma", details)
            }
        }
        CheckName::Routes => {
            let report = ctx.routes()?;
            let details = serde_json::to_value(&report).expect("serialize");
            if report.passed() {
                CheckReport::pass("routes", details)
            } else {
                CheckReport::fail("routes", details)
            }
        }
        CheckName::Selection => {
            let report = ctx.selection(5, 4)?;
            let passed = report.failures.is_empty() && report.keys_swept > 0;
            let details = serde_json::to_value(&report).expect("serialize");
            if passed {
                CheckReport::pass("selection", details)
            } else {
                CheckReport::fail("selection", details)
            }
        }
    })
}

fn cmd_verify(
    model: &FermatModel,
    checks: &[CheckName],
    eps_labels: &[String],
    order: u32,
    t_order: u32,
    zneg: u32,
    out: &Option<PathBuf>,
    _format: Format,
) -> Result<(), CliError> {
    if checks.is_empty() {
        return Err(CliError::Usage("at least one --check is required".into()));
    }
    let orders = PipelineOrders::derive(model, order, t_order, zneg);
    let ctx = VerifyContext::new(model.clone(), orders)?;
    let mut report = VerifyReport::new(
        model.spec(),
        serde_json::to_value(orders).expect("serialize"),
    );
    for &c in checks {
        report.push(run_check(&ctx, c, eps_labels)?);
    }
    let all = report.all_passed;
    emit(
        out,
        &(serde_json::to_string_pretty(&report).expect("serialize") + "\n"),
    )?;
    if all {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

fn check_name_of(s: &str) -> Result<CheckName, CliError> {
    match s {
        "regularity" => Ok(CheckName::Regularity),
        "cor4" => Ok(CheckName::Cor4),
        "transport" => Ok(CheckName::Transport),
        "string" => Ok(CheckName::String),
        "sigma" => Ok(CheckName::Sigma),
        "routes" => Ok(CheckName::Routes),
        "selection" => Ok(CheckName::Selection),
        other => Err(CliError::Usage(format!("unknown check {other}"))),
    }
}

fn format_of(s: &str) -> Result<Format, CliError> {
    match s {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        "dump" => Ok(Format::Dump),
        other => Err(CliError::Usage(format!("unknown format {other}"))),
    }
}

fn command_of_config(cfg: JobConfig) -> Result<Command, CliError> {
    let model = ModelArgs {
        weights: cfg.weights,
        degree: cfg.degree,
        model: cfg.model,
    };
    let format = cfg.format.as_deref().map(format_of).transpose()?;
    Ok(match cfg.command.as_str() {
        "model" => Command::Model {
            model,
            out: cfg.out,
            format: format.unwrap_or(Format::Json),
        },
        "ifunction" => Command::Ifunction {
            model,
            order: cfg.order.unwrap_or(4),
            zneg: cfg.zneg.unwrap_or(3),
            small: cfg.small,
            eps: cfg.eps.first().cloned(),
            out: cfg.out,
            format: format.unwrap_or(Format::Dump),
        },
        "invariants" => Command::Invariants {
            model,
            eps: if cfg.eps.is_empty() {
                vec!["infinity".into()]
            } else {
                cfg.eps
            },
            order: cfg.order.unwrap_or(4),
            t_order: cfg.t_order.unwrap_or(3),
            zneg: cfg.zneg.unwrap_or(3),
            out: cfg.out,
            format: format.unwrap_or(Format::Json),
        },
        "verify" => Command::Verify {
            model,
            check: cfg
                .check
                .iter()
                .map(|s| check_name_of(s))
                .collect::<Result<Vec<_>, _>>()?,
            eps: cfg.eps,
            order: cfg.order.unwrap_or(4),
            t_order: cfg.t_order.unwrap_or(2),
            zneg: cfg.zneg.unwrap_or(3),
            out: cfg.out,
            format: format.unwrap_or(Format::Json),
        },
        other => return Err(CliError::Usage(format!("unknown command {other}"))),
    })
}

/// Run one parsed invocation.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let command = match (cli.config, cli.command) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path)?;
            let cfg: JobConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("bad config: {e}")))?;
            command_of_config(cfg)?
        }
        (None, Some(c)) => c,
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "pass either --config or a subcommand, not both".into(),
            ))
        }
        (None, None) => return Err(CliError::Usage("a subcommand is required".into())),
    };
    match command {
        Command::Model { model, out, format } => {
            let m = resolve_model(&model)?;
            cmd_model(&m, &out, format)
        }
        Command::Ifunction {
            model,
            order,
            zneg,
            small,
            eps,
            out,
            format,
        } => {
            let m = resolve_model(&model)?;
            cmd_ifunction(&m, order, zneg, small, &eps, &out, format)
        }
        Command::Invariants {
            model,
            eps,
            order,
            t_order,
            zneg,
            out,
            format,
        } => {
            let m = resolve_model(&model)?;
            cmd_invariants(&m, &eps, order, t_order, zneg, &out, format)
        }
        Command::Verify {
            model,
            check,
            eps,
            order,
            t_order,
            zneg,
            out,
            format,
        } => {
            let m = resolve_model(&model)?;
            cmd_verify(&m, &check, &eps, order, t_order, zneg, &out, format)
        }
    }
}

/// Honor the LGCONE_THREADS cap before any parallel work runs.
pub fn init_thread_pool() {
    if let Ok(v) = std::env::var("LGCONE_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}
