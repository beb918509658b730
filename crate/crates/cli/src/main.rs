//! `coevo` — mine Java repository histories, distill semantic changes,
//! detect test maintenance, classify commits, and fit the co-evolution
//! models.

mod charts;
mod checkpoint;
mod config;
mod stages;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Errors split by exit code: usage/config problems exit 2, runtime
/// failures exit 1.
#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for AppError {
    fn from(e: E) -> Self {
        AppError::Runtime(e.into())
    }
}

pub type AppResult<T> = Result<T, AppError>;

pub fn usage_error<T>(message: impl Into<String>) -> AppResult<T> {
    Err(AppError::Usage(message.into()))
}

#[derive(Parser)]
#[command(name = "coevo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupByArg {
    Project,
    Developer,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    /// Negative-binomial models for head test-method/class counts.
    TestCounts,
    /// Logistic model for HasTestMaintenance with odds-ratio charts.
    HasMaintenance,
    /// Logistic models for the six binarized test activity metrics.
    ActivityOdds,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StageName {
    Mine,
    Distill,
    Detect,
    Classify,
    Dataset,
    Model,
    Proportions,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate repository histories into commit checkpoints.
    Mine {
        /// File listing one repository path per line (# for comments).
        #[arg(long)]
        repos: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distill semantic changes for every mined commit.
    Distill {
        #[arg(long)]
        out: PathBuf,
    },
    /// Derive per-commit test-maintenance profiles and head test counts.
    Detect {
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the activity classifier and label every commit.
    Classify {
        /// Ground-truth CSV: commit_id,label.
        #[arg(long)]
        ground_truth: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
    /// Build the analysis datasets (commits.csv, projects.csv).
    Dataset {
        #[arg(long)]
        out: PathBuf,
        /// Apply the outlier fence per project instead of pooled.
        #[arg(long)]
        per_project_outliers: bool,
    },
    /// Fit and report one model family.
    Model {
        #[arg(value_enum)]
        kind: ModelKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 17)]
        seed: u64,
        /// Validation holdout size for the test-counts models.
        #[arg(long, default_value_t = 8)]
        holdout: usize,
    },
    /// Test-maintenance proportions per group with box plots and rank tests.
    Proportions {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = GroupByArg::Project)]
        group_by: GroupByArg,
    },
    /// Run the whole pipeline (or one --stage) end to end.
    Run {
        #[arg(long)]
        repos: PathBuf,
        /// Required whenever the classify stage runs.
        #[arg(long)]
        ground_truth: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 17)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        holdout: usize,
        #[arg(long, value_enum)]
        stage: Option<StageName>,
        #[arg(long, value_enum, default_value_t = GroupByArg::Project)]
        group_by: GroupByArg,
        #[arg(long)]
        per_project_outliers: bool,
    },
}

fn dispatch(cli: Cli) -> AppResult<()> {
    match cli.command {
        Command::Mine { repos, out } => stages::mine::run(&repos, &out),
        Command::Distill { out } => stages::distill::run(&out),
        Command::Detect { out } => stages::detect::run(&out),
        Command::Classify { ground_truth, out, seed } => {
            stages::classify::run(&ground_truth, &out, seed)
        }
        Command::Dataset { out, per_project_outliers } => {
            stages::dataset::run(&out, per_project_outliers)
        }
        Command::Model { kind, out, seed, holdout } => match kind {
            ModelKind::TestCounts => stages::model::test_counts(&out, seed, holdout),
            ModelKind::HasMaintenance => stages::model::has_maintenance(&out),
            ModelKind::ActivityOdds => stages::model::activity_odds(&out),
        },
        Command::Proportions { out, group_by } => {
            stages::proportions::run(&out, group_by == GroupByArg::Developer)
        }
        Command::Run {
            repos,
            ground_truth,
            out,
            seed,
            holdout,
            stage,
            group_by,
            per_project_outliers,
        } => {
            let by_developer = group_by == GroupByArg::Developer;
            let all = stage.is_none();
            let want = |s: StageName| all || stage == Some(s);
            if want(StageName::Mine) {
                stages::mine::run(&repos, &out)?;
            }
            if want(StageName::Distill) {
                stages::distill::run(&out)?;
            }
            if want(StageName::Detect) {
                stages::detect::run(&out)?;
            }
            if want(StageName::Classify) {
                let Some(ground_truth) = ground_truth else {
                    return usage_error("--ground-truth is required for the classify stage");
                };
                stages::classify::run(&ground_truth, &out, seed)?;
            }
            if want(StageName::Dataset) {
                stages::dataset::run(&out, per_project_outliers)?;
            }
            if want(StageName::Model) {
                stages::model::test_counts_lenient(&out, seed, holdout)?;
                stages::model::has_maintenance(&out)?;
                stages::model::activity_odds(&out)?;
            }
            if want(StageName::Proportions) {
                stages::proportions::run(&out, by_developer)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(AppError::Runtime(error)) => {
            eprintln!("error: {error:#}");
            ExitCode::from(1)
        }
    }
}
