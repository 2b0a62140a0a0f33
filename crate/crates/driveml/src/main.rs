use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use driveml::artifacts::{ModelsDoc, MODELS_FILE, PIPELINE_FILE};
use driveml::config::{read_file_config, validate_config, RunArgs};
use driveml::core::prep::PrepPipeline;
use driveml::core::table::MissingTokens;
use driveml::core::Column;
use driveml::run::{run, RunError};
use driveml::{artifacts, io, utc_timestamp};

#[derive(Parser)]
#[command(name = "driveml", version, about = "Automated binary classification from a CSV file")]
struct Cli {
    /// Worker threads for model fitting [default: all cores].
    #[arg(long, global = true, env = "DRIVEML_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prepare the data, tune every model and write the report.
    Run(Box<RunArgs>),
    /// Score a CSV with the best model of a finished run.
    Score {
        /// Output directory of a previous run.
        #[arg(long)]
        run_dir: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Where to write the input columns plus a `score` column.
        #[arg(long)]
        output: PathBuf,
        /// Cells read as missing, comma separated [default: ",NA,NaN,null,N/A"].
        #[arg(long, value_delimiter = ',')]
        missing_tokens: Option<Vec<String>>,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn run_command(args: &RunArgs) -> ExitCode {
    let file = match args.config.as_deref().map(read_file_config).transpose() {
        Ok(f) => f,
        Err(e) => return fail(2, e),
    };
    let cfg = match validate_config(args, file) {
        Ok(c) => c,
        Err(e) => return fail(2, RunError::Config(e.0)),
    };
    let out = match run(&cfg) {
        Ok(o) => o,
        Err(e) => return fail(e.exit_code() as u8, e),
    };
    match artifacts::write_all(&out, &cfg.out_dir, &utc_timestamp()) {
        Ok(paths) => {
            let best = out.best_result();
            println!(
                "best model: {} (test AUC {:.3}); artifacts in {}",
                best.model_id,
                best.test_auc().unwrap_or(0.0),
                cfg.out_dir.display()
            );
            for p in paths {
                println!("  {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(3, format!("report: cannot write artifacts: {e}")),
    }
}

fn score_command(run_dir: &Path, input: &Path, output: &Path, tokens: &MissingTokens) -> Result<(), String> {
    let read = |name: &str| std::fs::read_to_string(run_dir.join(name)).map_err(|e| format!("{name}: {e}"));
    let pipeline: PrepPipeline = serde_json::from_str(&read(PIPELINE_FILE)?).map_err(|e| e.to_string())?;
    let models: ModelsDoc = serde_json::from_str(&read(MODELS_FILE)?).map_err(|e| e.to_string())?;
    let model = models
        .models
        .iter()
        .find(|m| m.model_id == models.best_model)
        .ok_or("models.json has no entry for its best model")?;
    let table = io::read_csv(input, tokens).map_err(|e| e.to_string())?;
    let prepared = pipeline.apply(&table).map_err(|e| e.to_string())?;
    let names: Vec<&str> = pipeline.selected.iter().map(String::as_str).collect();
    let x = driveml::core::matrix::feature_matrix(&prepared, &names).map_err(|e| e.to_string())?;
    let scores = model.score(&x).map_err(|e| e.to_string())?;
    let out = table
        .with_column(Column::from_f64("score", scores))
        .map_err(|e| e.to_string())?;
    io::write_csv(&out, output).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers.filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(2, format!("config: cannot start {n} workers: {e}"));
        }
    }
    match &cli.command {
        Command::Run(args) => run_command(args),
        Command::Score {
            run_dir,
            input,
            output,
            missing_tokens,
        } => {
            let tokens = missing_tokens
                .as_ref()
                .map_or_else(MissingTokens::default, |t| MissingTokens::new(t.iter().cloned()));
            match score_command(run_dir, input, output, &tokens) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(3, format!("score: {e}")),
            }
        }
    }
}
