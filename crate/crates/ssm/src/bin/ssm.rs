use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ssm::cli::{self, ReportFormat};
use ssm::error::SsmError;
use ssm::verify::{self, RandomModelRequest};
use ssm::Tolerances;

#[derive(Parser)]
#[command(
    name = "ssm",
    version,
    about = "Steady-state manifolds of quantum channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// RNG seed for witness and alignment draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance overrides, e.g. --tol steady=1e-6 (repeatable).
    #[arg(long = "tol", value_parser = parse_tol)]
    tolerances: Vec<(String, f64)>,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a model file and report the steady-state manifold.
    Analyze {
        model: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
        /// Include the manifold operator basis in the report.
        #[arg(long)]
        emit_basis: bool,
        /// Write the report to a file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = ["json", "text"], default_value = "json")]
        format: String,
    },
    /// Analyze one of the builtin example models (1, 2 or 3).
    Example {
        number: u32,
        /// Model parameter overrides, e.g. --param p=0.3 (repeatable).
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        emit_basis: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = ["json", "text"], default_value = "json")]
        format: String,
    },
    /// Validate a model file: shapes, CPTP residuals, steadiness.
    Verify {
        model: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Generate a random model with a prescribed block structure.
    RandomModel {
        /// Blocks as NxD pairs, e.g. --blocks 2x2,1x4.
        #[arg(long, value_parser = parse_blocks)]
        blocks: BlockList,
        /// Embed the support into a larger space with decay (non-unital).
        #[arg(long)]
        embed_dim: Option<usize>,
        /// Number of non-decay Kraus operators.
        #[arg(long, default_value_t = 3)]
        num_kraus: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone)]
struct BlockList(Vec<(usize, usize)>);

fn parse_blocks(s: &str) -> Result<BlockList, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let (n, d) = part
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected NxD, got {part:?}"))?;
        let n: usize = n.trim().parse().map_err(|_| format!("bad multiplicity in {part:?}"))?;
        let d: usize = d.trim().parse().map_err(|_| format!("bad dimension in {part:?}"))?;
        if n == 0 || d == 0 {
            return Err(format!("block sizes must be positive, got {part:?}"));
        }
        out.push((n, d));
    }
    if out.is_empty() {
        return Err("at least one block is required".into());
    }
    Ok(BlockList(out))
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("bad tolerance value in {s:?}"))?;
    Ok((name.trim().to_string(), value))
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    parse_tol(s)
}

fn tolerances_for(common: &CommonOpts) -> Result<Tolerances, SsmError> {
    let map = common.tolerances.iter().cloned().collect();
    Tolerances::default().with_overrides(&map)
}

fn write_out(text: &str, output: Option<&PathBuf>) -> Result<(), SsmError> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn format_of(s: &str) -> ReportFormat {
    if s == "text" {
        ReportFormat::Text
    } else {
        ReportFormat::Json
    }
}

fn run() -> Result<bool, SsmError> {
    match Cli::parse().command {
        Command::Analyze {
            model,
            common,
            emit_basis,
            output,
            format,
        } => {
            let mut request = cli::parse_model(&model)?;
            request.tolerances = request
                .tolerances
                .with_overrides(&common.tolerances.iter().cloned().collect())?;
            request.seed = common.seed;
            request.emit_basis = emit_basis;
            let outcome = cli::run_analysis(&request)?;
            write_out(
                &cli::emit_report(&outcome.report, format_of(&format)),
                output.as_ref(),
            )?;
            Ok(outcome.report.all_checks_pass)
        }
        Command::Example {
            number,
            params,
            common,
            emit_basis,
            output,
            format,
        } => {
            let mut request = cli::builtin_example(number, &params)?;
            request.tolerances = tolerances_for(&common)?;
            request.seed = common.seed;
            request.emit_basis = emit_basis;
            let outcome = cli::run_analysis(&request)?;
            write_out(
                &cli::emit_report(&outcome.report, format_of(&format)),
                output.as_ref(),
            )?;
            Ok(outcome.report.all_checks_pass)
        }
        Command::Verify { model, common } => {
            let request = cli::parse_model(&model)?;
            let tol = request
                .tolerances
                .with_overrides(&common.tolerances.iter().cloned().collect())?;
            let mut report = ssm::model::validate_channel(&request.channel, &tol)?;
            report.extend(verify::check_cptp_unital(&request.channel, &tol)?);
            if let Some(rho) = &request.steady_state {
                report
                    .entries
                    .push(verify::check_steady(&request.channel, rho, &tol)?);
            }
            for e in &report.entries {
                println!(
                    "[{}] {:<28} residual {:.3e}  tol {:.1e}",
                    if e.pass { "PASS" } else { "FAIL" },
                    e.name,
                    e.residual,
                    e.tolerance
                );
            }
            Ok(report.all_pass())
        }
        Command::RandomModel {
            blocks,
            embed_dim,
            num_kraus,
            seed,
            output,
        } => {
            let model = verify::random_model(
                &RandomModelRequest {
                    blocks: blocks.0,
                    embed_dim,
                    num_kraus,
                    seed,
                },
                &Tolerances::default(),
            )?;
            let mut request =
                cli::AnalysisRequest::new(model.channel, Some(model.steady_state));
            request.seed = seed;
            let mut text =
                serde_json::to_string_pretty(&cli::model_to_json(&request)).expect("valid json");
            text.push('\n');
            write_out(&text, output.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                SsmError::Parse { .. }
                | SsmError::Io(_)
                | SsmError::Json(_)
                | SsmError::UnknownTolerance(_)
                | SsmError::Dimension(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
