use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qqoqcp_cli::*;
use qqoqcp_core::{Question, RunConfig};

#[derive(Parser)]
#[command(name = "qqoqcp", version, about = "Explainable 5W1H extraction for French news")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML); defaults apply when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Corpus directory with a manifest.txt and one <id>.json per article.
    #[arg(long)]
    corpus: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, short, default_value_t = 0)]
    jobs: usize,
    /// Threshold override, e.g. `--threshold who=0.4`; repeatable.
    #[arg(long = "threshold", value_name = "QUESTION=VALUE")]
    thresholds: Vec<String>,
    /// Log verbosity: -v info, -vv debug.
    #[arg(long, short, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Annotate articles and write the interchange documents.
    Annotate(Common),
    /// Run the full pipeline and write one answer report per article.
    Extract(Common),
    /// Agreement between the system, the baseline and the annotators.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated participants: `system`, `baseline` or annotator
        /// ids. Defaults to the system and every annotator.
        #[arg(long, value_delimiter = ',')]
        participants: Vec<String>,
    },
    /// Agreement of the system across thresholds for one question.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        question: Question,
        /// Explicit comma-separated thresholds.
        #[arg(long, value_delimiter = ',', conflicts_with = "step")]
        grid: Vec<f64>,
        /// Uniform grid over [0, 1].
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Query the chat model (or replay its cache) and write its answers.
    Baseline(Common),
    /// Factor-by-factor breakdown of one article's answers.
    Explain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        id: String,
        #[arg(long)]
        question: Option<Question>,
    },
    /// Check ids, texts and that gold answers are verbatim.
    ValidateCorpus {
        #[arg(long)]
        corpus: PathBuf,
    },
}

fn setup(common: &Common) -> CliResult<(RunConfig, PathBuf)> {
    env_logger::Builder::new()
        .filter_level(match common.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        })
        .parse_default_env()
        .init();
    let mut config = load_config(common.config.as_deref())?;
    apply_threshold_overrides(&mut config, &common.thresholds)?;
    let out = common.out.clone().unwrap_or_else(|| config.output.dir.clone());
    Ok((config, out))
}

fn report_failures(failures: &[(String, String)]) -> i32 {
    for (id, e) in failures {
        eprintln!("{id}: {e}");
    }
    i32::from(!failures.is_empty())
}

fn print_written(paths: &[PathBuf], out: &Path) {
    println!("wrote {} files to {}", paths.len(), out.display());
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Annotate(common) => {
            let (config, out) = setup(&common)?;
            let p = pipeline(&config)?;
            let summary = with_jobs(common.jobs, || cmd_annotate(&p, &common.corpus, &out))?;
            print_written(&summary.written, &out);
            Ok(report_failures(&summary.failures))
        }
        Command::Extract(common) => {
            let (config, out) = setup(&common)?;
            let p = pipeline(&config)?;
            let summary = with_jobs(common.jobs, || cmd_extract(&p, &common.corpus, &out))?;
            print_written(&summary.written, &out);
            Ok(report_failures(&summary.failures))
        }
        Command::Evaluate { common, participants } => {
            let (config, out) = setup(&common)?;
            let p = pipeline(&config)?;
            let participants = if participants.is_empty() {
                default_participants(&common.corpus)?
            } else {
                participants
            };
            let ev = with_jobs(common.jobs, || cmd_evaluate(&config, &p, &common.corpus, &participants))?;
            print!("{}", write_evaluation(&ev, &out)?);
            Ok(report_failures(&ev.failures))
        }
        Command::Sweep {
            common,
            question,
            grid,
            step,
        } => {
            let (config, out) = setup(&common)?;
            let p = pipeline(&config)?;
            let grid = if grid.is_empty() { uniform_grid(step)? } else { grid };
            let sweep = with_jobs(common.jobs, || cmd_sweep(&config, &p, &common.corpus, question, &grid))?;
            print!("{}", sweep.result.render());
            print!("{}", sweep.result.suggested_config());
            write_sweep(&sweep, &out)?;
            Ok(report_failures(&sweep.failures))
        }
        Command::Baseline(common) => {
            let (config, out) = setup(&common)?;
            let summary = with_jobs(common.jobs, || write_baseline(&config, &common.corpus, &out))?;
            print_written(&summary.written, &out);
            Ok(report_failures(&summary.failures))
        }
        Command::Explain { common, id, question } => {
            let (config, _) = setup(&common)?;
            let p = pipeline(&config)?;
            print!("{}", cmd_explain(&p, &common.corpus, &id, question)?);
            Ok(0)
        }
        Command::ValidateCorpus { corpus } => {
            let issues = cmd_validate_corpus(&corpus)?;
            for i in &issues {
                println!("{i}");
            }
            if issues.is_empty() {
                println!("corpus is valid");
            }
            Ok(i32::from(!issues.is_empty()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
