//! Subcommand implementations. Each returns the text to print or a
//! [`CliError`] carrying its exit code.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use teachlab::analysis::{classify, solve};
use teachlab::engine::{
    class_average, detect_absorption, limit_of_means, run_repeated, stackelberg_class_average, EngineError, GameClass,
    SweepConfig, DEFAULT_REJECTION_BUDGET, DEFAULT_WINDOW,
};
use teachlab::experiments::{fixtures, run_suite, SuiteConfig};
use teachlab::heuristics::{HeuristicError, HeuristicSpec};
use teachlab::{load_game, Game, Player};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("verification failed")]
    Failed(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Schema(_) => 4,
            CliError::Other(_) => 5,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::InvalidArgument(m) => CliError::Usage(m),
            EngineError::Heuristic(h) => heuristic(h),
            other => CliError::Other(other.to_string()),
        }
    }
}

fn heuristic(e: HeuristicError) -> CliError {
    match e {
        HeuristicError::UnknownKind(_) => CliError::Usage(e.to_string()),
        HeuristicError::MasqueradeShape { .. } => CliError::Schema(e.to_string()),
        other => CliError::Other(other.to_string()),
    }
}

#[derive(Parser, Debug)]
#[command(name = "teachlab", version, about = "Learning dynamics, strategic teaching and exact stage-game analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the class label of a game.
    Classify {
        /// Game JSON file, or `fixture:<name>`.
        game: String,
    },
    /// Print equilibria, dominance, correlated equilibrium and leader values.
    Solve { game: String },
    /// Play a repeated game and report absorption and limits of means.
    Simulate {
        #[arg(long)]
        game: String,
        /// Row heuristic, e.g. `hmc_basic` or `teacher:hmc_basic`.
        #[arg(long)]
        row: String,
        #[arg(long)]
        col: String,
        #[arg(long = "T", default_value_t = 100_000)]
        horizon: u64,
        #[arg(long, env = "TEACHLAB_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        /// Write the full trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Monte Carlo class average of a heuristic pair or of leader values.
    Sweep {
        /// all, generic, pure_nash, wds, ci, pure_nash_generic or fixture:<name>.
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value = "2x2")]
        shape: String,
        #[arg(long, default_value = "hmc_basic")]
        row: String,
        #[arg(long, default_value = "hmc_basic")]
        col: String,
        #[arg(long = "T", default_value_t = 100_000)]
        horizon: u64,
        #[arg(long, default_value_t = 25)]
        reps: usize,
        #[arg(long, env = "TEACHLAB_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_REJECTION_BUDGET)]
        budget: u64,
        /// Average leader values for this seat instead of simulating.
        #[arg(long)]
        stackelberg: Option<String>,
        /// Keep the per-game values in the output.
        #[arg(long)]
        per_game: bool,
    },
    /// Run every verification driver; exits 1 on any failure.
    VerifyPaper {
        #[arg(long)]
        quick: bool,
        #[arg(long, env = "TEACHLAB_SEED", default_value_t = 0)]
        seed: u64,
        /// Print the full reports as JSON instead of one line per check.
        #[arg(long)]
        json: bool,
    },
    /// Start the HTTP session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Append a JSON-lines log per session in this directory.
        #[arg(long)]
        persist: Option<PathBuf>,
        #[arg(long, env = "TEACHLAB_SEED", default_value_t = 0)]
        seed: u64,
    },
}

/// Reads a game from a file, or from the catalog for `fixture:<name>`.
pub fn read_game(arg: &str) -> Result<Game, CliError> {
    if let Some(name) = arg.strip_prefix("fixture:") {
        return fixtures::by_name(name).ok_or_else(|| CliError::Usage(format!("unknown fixture {name:?}")));
    }
    let text = fs::read_to_string(Path::new(arg)).map_err(|e| CliError::Io(format!("{arg}: {e}")))?;
    load_game(&text).map_err(|e| CliError::Schema(format!("{arg}: {e}")))
}

fn spec(arg: &str) -> Result<HeuristicSpec, CliError> {
    arg.parse().map_err(heuristic)
}

fn pretty(v: &impl serde::Serialize) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Other(e.to_string()))
}

fn parse_shape(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("shape must look like 2x3, got {s:?}"));
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_player(s: &str) -> Result<Player, CliError> {
    match s {
        "row" => Ok(Player::Row),
        "col" => Ok(Player::Col),
        _ => Err(CliError::Usage(format!("seat must be row or col, got {s:?}"))),
    }
}

pub fn simulate(
    game: &str,
    row: &str,
    col: &str,
    horizon: u64,
    seed: u64,
    window: usize,
    trace: Option<&Path>,
) -> Result<String, CliError> {
    let g = read_game(game)?;
    let (rs, cs) = (spec(row)?, spec(col)?);
    if window == 0 {
        return Err(CliError::Usage("window must be at least 1".into()));
    }
    let tr = run_repeated(g.clone(), (&rs, &cs), horizon, seed)?;
    if let Some(path) = trace {
        let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        tr.write_csv(BufWriter::new(f)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let conv = detect_absorption(&tr, window);
    let limit = if tr.is_empty() { Value::Null } else { serde_json::to_value(limit_of_means(&tr)?).map_err(|e| CliError::Other(e.to_string()))? };
    let absorbed = conv.absorbed.map(|p| json!([g.label(Player::Row, p.row), g.label(Player::Col, p.col)]));
    pretty(&json!({
        "row": rs.to_string(),
        "col": cs.to_string(),
        "horizon": horizon,
        "seed": seed,
        "convergence": {
            "absorbed": absorbed,
            "absorption_time": conv.absorption_time,
            "window": conv.window,
        },
        "settled": tr.settled(),
        "simulated": tr.simulated(),
        "limit": limit,
    }))
}

#[allow(clippy::too_many_arguments)]
pub fn sweep(
    class: &str,
    n: usize,
    shape: &str,
    row: &str,
    col: &str,
    horizon: u64,
    reps: usize,
    seed: u64,
    budget: u64,
    leader: Option<&str>,
    per_game: bool,
) -> Result<String, CliError> {
    let class: GameClass = class.parse()?;
    let cfg = SweepConfig { shape: parse_shape(shape)?, n, horizon, reps, seed, budget, parallel: true };
    let mut est = match leader {
        Some(seat) => stackelberg_class_average(&class, &cfg, parse_player(seat)?)?,
        None => class_average((&spec(row)?, &spec(col)?), &class, &cfg)?,
    };
    if !per_game {
        est.per_game.clear();
    }
    pretty(&est)
}

pub fn verify_paper(quick: bool, seed: u64, as_json: bool) -> Result<String, CliError> {
    let report = run_suite(&SuiteConfig { quick, seed, parallel: true });
    let text = if as_json {
        pretty(&report)?
    } else {
        let mut lines: Vec<String> = report.reports.iter().flat_map(|r| r.lines()).collect();
        let failed = report.reports.iter().flat_map(|r| r.failures()).count();
        lines.push(format!("{} checks, {failed} failed", lines.len()));
        lines.join("\n")
    };
    if report.passed {
        Ok(text)
    } else {
        Err(CliError::Failed(text))
    }
}

/// Runs every subcommand except `serve`.
pub fn run(cmd: &Command) -> Result<String, CliError> {
    match cmd {
        Command::Classify { game } => pretty(&classify(&read_game(game)?)),
        Command::Solve { game } => pretty(&solve(&read_game(game)?)),
        Command::Simulate { game, row, col, horizon, seed, window, trace } => {
            simulate(game, row, col, *horizon, *seed, *window, trace.as_deref())
        }
        Command::Sweep { class, n, shape, row, col, horizon, reps, seed, budget, stackelberg, per_game } => {
            sweep(class, *n, shape, row, col, *horizon, *reps, *seed, *budget, stackelberg.as_deref(), *per_game)
        }
        Command::VerifyPaper { quick, seed, json } => verify_paper(*quick, *seed, *json),
        Command::Serve { .. } => Err(CliError::Usage("serve is handled by the binary".into())),
    }
}
