//! Command-line front end.
//!
//! ```text
//! lscheck check --model FILE... (--eesl EXPR | --eesl-file FILE) [--testing]
//!               [--ctl AG|EF --property NAME]... [--dot FILE]
//!               [--max-internal-steps N]
//! ```
//!
//! Exit status: 0 consistent, 1 inconsistent, 2 usage, model or grammar
//! error, 3 divergence of internal events.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::builder::TypedValueParser as _;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::eesl::{apply_testing_mode, compile_to_grammar, parse_eesl, EeslError};
use crate::engine::{EngineConfig, EngineError, Simulator, DEFAULT_MAX_INTERNAL_STEPS};
use crate::justify::{
    build_transition_graph, emit_dot, emit_dot_for, eval_ctl, format_trace, CtlMode, CtlQuery,
    GraphError,
};
use crate::model::{parse_model_unchecked, ModelError, SystemModel};
use crate::play::{check_consistency, PlayError, Verdict};

#[derive(Debug, Parser)]
#[command(name = "lscheck", version, about = "Consistency checking of live sequence charts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model against a language of external event sequences.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Chart-language model file; repeat to combine several files.
    #[arg(long = "model", value_name = "FILE", required = true)]
    pub models: Vec<PathBuf>,
    /// External event expression.
    #[arg(long, value_name = "EXPR")]
    pub eesl: Option<String>,
    /// File holding one external event expression.
    #[arg(long, value_name = "FILE")]
    pub eesl_file: Option<PathBuf>,
    /// Inject testSF before every external event and parallel group.
    #[arg(long)]
    pub testing: bool,
    /// Temporal operator, paired in order with --property.
    #[arg(long, value_name = "AG|EF")]
    pub ctl: Vec<CtlMode>,
    /// Testing chart whose propertyHold signals satisfaction.
    #[arg(long, value_name = "NAME")]
    pub property: Vec<String>,
    /// Write the transition graph as DOT when the model is consistent.
    #[arg(long, value_name = "FILE")]
    pub dot: Option<PathBuf>,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_MAX_INTERNAL_STEPS,
          value_parser = clap::value_parser!(u64).range(1..).map(|n| n as usize))]
    pub max_internal_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EeslSource {
    Inline(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub models: Vec<PathBuf>,
    pub eesl: EeslSource,
    pub testing: bool,
    pub queries: Vec<CtlQuery>,
    pub max_internal_steps: usize,
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    ModelFile { path: PathBuf, source: ModelError },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("event expression: {0}")]
    Eesl(#[from] EeslError),
    #[error(transparent)]
    Play(#[from] PlayError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        let divergence = matches!(
            self,
            CliError::Play(PlayError::Engine(EngineError::Divergence { .. }))
                | CliError::Graph(GraphError::Play(PlayError::Engine(
                    EngineError::Divergence { .. }
                )))
        );
        if divergence {
            3
        } else {
            2
        }
    }
}

impl TryFrom<CheckArgs> for RunConfig {
    type Error = CliError;

    fn try_from(args: CheckArgs) -> Result<Self, CliError> {
        let eesl = match (args.eesl, args.eesl_file) {
            (Some(text), _) => EeslSource::Inline(text),
            (None, Some(path)) => EeslSource::File(path),
            (None, None) => {
                return Err(CliError::Usage(
                    "one of --eesl or --eesl-file is required".into(),
                ))
            }
        };
        if args.ctl.len() != args.property.len() {
            return Err(CliError::Usage(
                "every --ctl needs a matching --property".into(),
            ));
        }
        if !args.ctl.is_empty() && !args.testing {
            return Err(CliError::Usage("--ctl requires --testing".into()));
        }
        let queries = args
            .ctl
            .into_iter()
            .zip(&args.property)
            .map(|(mode, p)| CtlQuery::new(mode, p))
            .collect();
        Ok(RunConfig {
            models: args.models,
            eesl,
            testing: args.testing,
            queries,
            max_internal_steps: args.max_internal_steps,
            dot: args.dot,
        })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and merges the model files, then validates the result.
pub fn load_models(paths: &[PathBuf]) -> Result<SystemModel, CliError> {
    let mut model = SystemModel::default();
    for path in paths {
        let part = parse_model_unchecked(&read(path)?).map_err(|source| CliError::ModelFile {
            path: path.clone(),
            source,
        })?;
        model.merge(part);
    }
    Ok(model.validated()?)
}

/// Runs a check and writes the report. Returns the verdict's exit status.
pub fn run_check(cfg: &RunConfig, out: &mut impl Write) -> Result<u8, CliError> {
    let model = load_models(&cfg.models)?;
    let text = match &cfg.eesl {
        EeslSource::Inline(text) => text.clone(),
        EeslSource::File(path) => read(path)?,
    };
    let mut ast = parse_eesl(text.trim(), &model.external_events)?;
    if cfg.testing {
        ast = apply_testing_mode(&ast);
    }
    let grammar = compile_to_grammar(&ast);
    let config = EngineConfig {
        max_internal_steps: cfg.max_internal_steps,
        ..EngineConfig::default()
    };
    let sim = Simulator::with_config(model, config)?;
    let report = check_consistency(&sim, &grammar)?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    let io = |source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    match &report.verdict {
        Verdict::Inconsistent(trace) => {
            writeln!(out, "INCONSISTENT").map_err(io)?;
            writeln!(out, "trace: {}", format_trace(trace)).map_err(io)?;
            Ok(1)
        }
        Verdict::Consistent => {
            writeln!(out, "CONSISTENT").map_err(io)?;
            if cfg.queries.is_empty() && cfg.dot.is_none() {
                return Ok(0);
            }
            let graph = build_transition_graph(&sim, &grammar)?;
            for q in &cfg.queries {
                let value = eval_ctl(&graph, q)?;
                writeln!(out, "{}: {value} ({})", q.mode, q.property).map_err(io)?;
            }
            if let Some(path) = &cfg.dot {
                let dot = match cfg.queries.first() {
                    Some(q) => emit_dot_for(&graph, &q.property)?,
                    None => emit_dot(&graph),
                };
                std::fs::write(path, dot).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
            }
            Ok(0)
        }
    }
}

/// Entry point for the binary.
pub fn run(cli: Cli) -> ExitCode {
    let Command::Check(args) = cli.command;
    let result = RunConfig::try_from(args).and_then(|cfg| run_check(&cfg, &mut std::io::stdout()));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
