use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use apal::harness::{emit_csv, emit_figures, read_csv, run_ensemble, ConfigFile, Mode};
use apal::Error;

/// Teacher-student perceptron experiments.
///
/// `apal <mode> ...` runs an ensemble and writes `metrics_<mode>_n<N>.csv`
/// plus SVG figures into the output directory. `apal plot <csv>... --out <dir>`
/// redraws figures from one or more metrics files, overlaying sizes and modes.
#[derive(Debug, Parser)]
#[command(name = "apal", version)]
struct Cli {
    /// passive, design, design-ortho, exact-small, exact-passive-small,
    /// deductive, or plot
    command: String,
    /// CSV files for `plot`
    inputs: Vec<PathBuf>,
    /// Odd input dimension
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha_max: Option<f64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Weighting cutoff of the mean-field update
    #[arg(long)]
    w0: Option<f64>,
    /// Orthogonality penalty weight
    #[arg(long)]
    lambda: Option<f64>,
    /// Number of recent patterns in the orthogonality penalty
    #[arg(long)]
    memory: Option<usize>,
    #[arg(long)]
    beta0: Option<f64>,
    #[arg(long)]
    rbeta: Option<f64>,
    #[arg(long)]
    anneal_levels: Option<usize>,
    /// `key = value` file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Skip SVG output
    #[arg(long)]
    no_figures: bool,
}

fn run(cli: Cli) -> Result<(), Error> {
    if cli.command == "plot" {
        let out = cli
            .out
            .ok_or_else(|| Error::Config("plot needs --out".into()))?;
        if cli.inputs.is_empty() {
            return Err(Error::Config("plot needs at least one CSV file".into()));
        }
        let mut rows = Vec::new();
        for path in &cli.inputs {
            rows.extend(read_csv(path)?);
        }
        let files = emit_figures(&rows, &out)?;
        eprintln!("wrote {} figures to {}", files.len(), out.display());
        return Ok(());
    }
    if !cli.inputs.is_empty() {
        return Err(Error::Config(format!(
            "unexpected argument `{}`",
            cli.inputs[0].display()
        )));
    }
    let mode: Mode = cli.command.parse()?;
    let base = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let flags = ConfigFile {
        mode: Some(mode),
        n: cli.n,
        alpha_max: cli.alpha_max,
        runs: cli.runs,
        seed: cli.seed,
        out: cli.out,
        w0: cli.w0,
        lambda: cli.lambda,
        memory: cli.memory,
        beta0: cli.beta0,
        rbeta: cli.rbeta,
        anneal_levels: cli.anneal_levels,
    };
    let cfg = base.merged(flags).resolve()?;

    let rows = run_ensemble(&cfg)?;
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::Io {
        path: cfg.out_dir.clone(),
        source: e,
    })?;
    let csv_path = cfg
        .out_dir
        .join(format!("metrics_{}_n{}.csv", cfg.mode, cfg.n));
    emit_csv(&rows, &csv_path)?;
    eprintln!("wrote {}", csv_path.display());
    if !cli.no_figures {
        let files = emit_figures(&rows, &cfg.out_dir)?;
        eprintln!("wrote {} figures to {}", files.len(), cfg.out_dir.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("apal: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
