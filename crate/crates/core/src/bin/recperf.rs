use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use recperf::cli::{self, exit, Format, MethodChoice, RankOptions};
use recperf::io::{load_tournament, LoadedTournament};
use recperf::simulate::SimulationConfig;
use recperf::solver::DEFAULT_MAX_ITER;
use recperf::{Error, RatingModel};

#[derive(Parser)]
#[command(
    name = "recperf",
    version,
    about = "Recursive-performance tournament ratings"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate and rank the players of a tournament.
    Rank {
        input: PathBuf,
        /// elo, elo:<scale>, logistic:<scale> or gaussian:<sigma>
        #[arg(long, default_value = "elo")]
        model: RatingModel,
        #[arg(long, value_enum, default_value_t = MethodChoice::Direct)]
        method: MethodChoice,
        /// Step-size tolerance for the iterative method [default: 1e-10·max(1, ‖ĉ‖∞)]
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Ratings within this distance are tied [default: 1e-6·scale]
        #[arg(long)]
        tie_tol: Option<f64>,
        /// Pull average scores of 0 or 1 slightly inside (0, 1) instead of failing
        #[arg(long)]
        clamp_scores: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Check connectivity and bipartiteness of the comparison graph.
    Check {
        input: PathBuf,
        /// Also report the spectrum of the normalized matches matrix.
        #[arg(long)]
        spectral: bool,
        /// Tolerance used for the convergence-iterations estimate.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// One-shot performance ratings against the initial ratings.
    Performance {
        input: PathBuf,
        #[arg(long, default_value = "elo")]
        model: RatingModel,
        /// Show the recursive performance alongside.
        #[arg(long)]
        recursive: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Generate a synthetic tournament from a JSON config.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn render<T: serde::Serialize>(
    format: Format,
    report: &T,
    table: impl FnOnce(&T) -> String,
) -> String {
    match format {
        Format::Json => cli::to_json(report) + "\n",
        Format::Table => table(report),
    }
}

fn load(path: &Path) -> Result<LoadedTournament, (Error, Vec<String>)> {
    let loaded = load_tournament(path).map_err(|e| (e, Vec::new()))?;
    for note in &loaded.notes {
        eprintln!("note: {note}");
    }
    Ok(loaded)
}

fn run(args: Args) -> Result<String, (Error, Vec<String>)> {
    match args.command {
        Command::Rank {
            input,
            model,
            method,
            tol,
            max_iter,
            tie_tol,
            clamp_scores,
            format,
        } => {
            let loaded = load(&input)?;
            let opts = RankOptions {
                model,
                method,
                tol,
                max_iter,
                tie_tol,
                clamp_scores,
            };
            let players = loaded.tournament.players().to_vec();
            let report = cli::cmd_rank(&loaded, &opts).map_err(|e| (e, players))?;
            Ok(render(format, &report, cli::RankReport::to_table))
        }
        Command::Check {
            input,
            spectral,
            tol,
            format,
        } => {
            let loaded = load(&input)?;
            let players = loaded.tournament.players().to_vec();
            let report = cli::cmd_check(&loaded, spectral, tol).map_err(|e| (e, players))?;
            Ok(render(format, &report, cli::CheckReport::to_table))
        }
        Command::Performance {
            input,
            model,
            recursive,
            format,
        } => {
            let loaded = load(&input)?;
            let players = loaded.tournament.players().to_vec();
            let report =
                cli::cmd_performance(&loaded, &model, recursive).map_err(|e| (e, players))?;
            Ok(render(format, &report, cli::PerformanceReport::to_table))
        }
        Command::Simulate { config, out, seed } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| (Error::Io(format!("{}: {e}", config.display())), Vec::new()))?;
            let mut cfg: SimulationConfig = serde_json::from_str(&text).map_err(|e| {
                (
                    Error::Parse {
                        line: e.line(),
                        column: e.column(),
                        message: e.to_string(),
                    },
                    Vec::new(),
                )
            })?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let (file, truth) = cli::cmd_simulate(&cfg, &out).map_err(|e| (e, Vec::new()))?;
            Ok(format!(
                "wrote {} and {}\n",
                file.display(),
                truth.display()
            ))
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(out) => {
            print!("{out}");
            ExitCode::from(exit::OK)
        }
        Err((e, players)) => {
            eprintln!("error: {}", cli::describe_error(&e, &players));
            ExitCode::from(cli::exit_code(&e))
        }
    }
}
