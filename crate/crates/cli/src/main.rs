//! `allpay`: command-line front end for the all-pay bidding game solvers.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use allpay::analytic::{sweep, wnr2_strategies, wnr2_value, StepOracle, ValueOracle, Wnr2Oracle};
use allpay::approx::{approx_values, strategy_at, value_bracket_at, ValueTable};
use allpay::format::{load_game, save_game};
use allpay::generators::{race_game, tictactoe, win_n_in_a_row, Objective};
use allpay::matrix::{parse_matrix, solve_matrix_game};
use allpay::playout::{builtin, simulate, PlayoutConfig};
use allpay::ratio::{format_rational, parse_rational, rational_to_f64};
use allpay::sure_win::{thresholds_dag, thresholds_iterative, ThresholdError};
use allpay::{GameGraph, Player, QualitativeView, Ratio, TieRule};
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "allpay", version, about = "Solvers for all-pay bidding games on graphs")]
struct Cli {
    /// Worker threads (default: ALLPAY_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated game file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Surely-winning threshold ratio of every vertex (CSV).
    Thresholds {
        #[arg(long)]
        game: PathBuf,
        /// Use the truncation iteration even on a DAG.
        #[arg(long)]
        iterative: bool,
        #[arg(long, default_value_t = 10_000)]
        max_rounds: usize,
        #[arg(long, default_value = "1/1000000000000")]
        tol: String,
    },
    /// FPTAS value brackets over the budget grid (CSV).
    Values(ValuesArgs),
    /// The closed-form WnR(2) staircase over a budget range (CSV).
    Wnr2 {
        #[arg(long, default_value = "0")]
        from: String,
        #[arg(long, default_value = "3")]
        to: String,
        #[arg(long, default_value = "1/100")]
        step: String,
        #[arg(long, default_value = "p1")]
        ties: String,
        /// Print both players' optimal first-bid mixtures at this budget instead.
        #[arg(long)]
        at: Option<String>,
    },
    /// Sweep for a first-bid strategy guaranteeing a value in WnR(n).
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        b1: String,
        #[arg(long)]
        v: String,
        /// step (n = 2), wnr2 (n = 3), or wnr2-p2 (n = 3, ties to Player 2).
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long, default_value_t = allpay::analytic::DEFAULT_SUPPORT_CAP)]
        cap: usize,
    },
    /// Solve a zero-sum matrix game read from a file (`-` for stdin).
    SolveMatrix {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Monte-Carlo playouts of two strategies.
    Play {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        root: Option<String>,
        #[arg(long)]
        b1: String,
        #[arg(long)]
        p1: String,
        #[arg(long)]
        p2: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_rounds: Option<usize>,
        #[arg(long, default_value = "p1")]
        ties: String,
    },
}

#[derive(Subcommand, Debug)]
enum GenKind {
    /// Race game G(n, m): Player 1 needs n wins, Player 2 needs m.
    Race { n: usize, m: usize },
    /// Win n in a row, i.e. G(n, 1).
    Wnr { n: usize },
    /// Tic-tac-toe with Player 1 as X.
    Tictactoe { objective: String },
}

#[derive(Args, Debug)]
struct ValuesArgs {
    #[arg(long)]
    game: PathBuf,
    #[arg(long, default_value = "1/100")]
    eps: String,
    /// Vertex to tabulate (default: the game's root).
    #[arg(long, conflicts_with = "all")]
    vertex: Option<String>,
    /// Tabulate every non-leaf vertex.
    #[arg(long)]
    all: bool,
    /// Largest budget to tabulate (default: past every vertex's threshold).
    #[arg(long)]
    max_budget: Option<String>,
    /// Dump the stored strategy at VERTEX and grid budget B1 instead.
    #[arg(long, num_args = 2, value_names = ["VERTEX", "B1"])]
    strategy: Option<Vec<String>>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    NotConverged(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::NotConverged(_) => 3,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn rational(flag: &str, s: &str) -> Result<BigRational, CliError> {
    parse_rational(s).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn tie_rule(s: &str) -> Result<TieRule, CliError> {
    s.parse().map_err(|_| CliError::Usage(format!("--ties: expected p1 or p2, got `{s}`")))
}

fn read_game(path: &PathBuf) -> Result<GameGraph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    load_game(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn fixed(x: f64) -> String {
    format!("{x:.9}")
}

fn header(args: &[String]) -> String {
    format!("# allpay {}\n# args: {}\n", env!("CARGO_PKG_VERSION"), args.join(" "))
}

/// Runs one command; the returned text is written after the header.
/// A non-converged threshold run still returns its table alongside the error.
fn run(command: Command) -> Result<String, (String, CliError)> {
    let plain = |r: Result<String, CliError>| r.map_err(|e| (String::new(), e));
    match command {
        Command::Gen { kind } => plain(gen(kind)),
        Command::Thresholds {
            game,
            iterative,
            max_rounds,
            tol,
        } => thresholds(&game, iterative, max_rounds, &tol),
        Command::Values(args) => plain(values(args)),
        Command::Wnr2 {
            from,
            to,
            step,
            ties,
            at,
        } => plain(wnr2(&from, &to, &step, &ties, at.as_deref())),
        Command::Sweep { n, b1, v, oracle, cap } => plain(sweep_cmd(n, &b1, &v, oracle.as_deref(), cap)),
        Command::SolveMatrix { file, tol } => plain(solve_matrix(&file, tol)),
        Command::Play {
            game,
            root,
            b1,
            p1,
            p2,
            trials,
            seed,
            max_rounds,
            ties,
        } => plain(play(&game, root.as_deref(), &b1, &p1, &p2, trials, seed, max_rounds, &ties)),
    }
}

fn gen(kind: GenKind) -> Result<String, CliError> {
    let g = match kind {
        GenKind::Race { n, m } => race_game(n, m).map_err(invalid)?,
        GenKind::Wnr { n } => win_n_in_a_row(n).map_err(invalid)?,
        GenKind::Tictactoe { objective } => {
            let objective: Objective = objective.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
            tictactoe(objective)
        }
    };
    Ok(save_game(&g))
}

fn thresholds(game: &PathBuf, iterative: bool, max_rounds: usize, tol: &str) -> Result<String, (String, CliError)> {
    let g = read_game(game).map_err(|e| (String::new(), e))?;
    let tol = rational("tol", tol).map_err(|e| (String::new(), e))?;
    let q = QualitativeView::top(&g);
    let t = match (iterative, thresholds_dag(&q)) {
        (false, Ok(t)) => t,
        (false, Err(ThresholdError::Cyclic)) | (true, _) => thresholds_iterative(&q, max_rounds, &tol),
        (false, Err(e)) => return Err((String::new(), invalid(e))),
    };
    let mut out = String::from("vertex,numerator,denominator,exact\n");
    for v in g.vertices() {
        let (num, den) = t.values[v].num_den();
        writeln!(out, "{},{num},{den},{}", g.name(v), t.exact).unwrap();
    }
    if t.converged {
        Ok(out)
    } else {
        let msg = format!(
            "thresholds did not converge after {} rounds (last change {})",
            t.iterations, t.residual
        );
        Err((out, CliError::NotConverged(msg)))
    }
}

fn values(args: ValuesArgs) -> Result<String, CliError> {
    let g = read_game(&args.game)?;
    let eps = rational("eps", &args.eps)?;
    let table = approx_values(&g, &eps).map_err(invalid)?;
    if let Some(spec) = &args.strategy {
        let b1 = rational("strategy", &spec[1])?;
        let s = strategy_at(&table, &g, &spec[0], &b1).map_err(invalid)?;
        let mut out = String::from("bid,prob,successor\n");
        for ((bid, u), p) in s.support.iter().zip(&s.probabilities) {
            writeln!(out, "{},{},{}", fixed(rational_to_f64(bid)), fixed(*p), g.name(*u)).unwrap();
        }
        return Ok(out);
    }
    let vertices: Vec<usize> = if args.all {
        g.internal().collect()
    } else {
        let name = match (&args.vertex, g.root()) {
            (Some(v), _) => v.clone(),
            (None, Some(r)) => g.name(r).to_string(),
            (None, None) => return Err(CliError::Usage("the game has no root; pass --vertex or --all".into())),
        };
        let id = g.id(&name).ok_or_else(|| invalid(format!("unknown vertex `{name}`")))?;
        vec![id]
    };
    let top = match &args.max_budget {
        Some(b) => {
            let b = rational("max-budget", b)?;
            allpay::ratio::floor_int(&(b * BigRational::from_integer(table.grid.into())))
                .try_into()
                .map_err(|_| CliError::Usage("--max-budget is out of range".into()))?
        }
        None => default_top(&table, &vertices),
    };
    let mut out = String::from("vertex,B1,lower,upper\n");
    for &v in &vertices {
        for k in 0..=top {
            let b = BigRational::new(k.into(), table.grid.into());
            let (lo, hi) = value_bracket_at(&table, v, &b).map_err(invalid)?;
            writeln!(out, "{},{},{},{}", g.name(v), fixed(rational_to_f64(&b)), fixed(lo), fixed(hi)).unwrap();
        }
    }
    Ok(out)
}

fn default_top(table: &ValueTable, vertices: &[usize]) -> usize {
    let kmax = vertices.iter().map(|&v| table.row(v).kmax).max().unwrap_or(0);
    kmax + table.depth + table.grid / 2
}

fn wnr2(from: &str, to: &str, step: &str, ties: &str, at: Option<&str>) -> Result<String, CliError> {
    if let Some(at) = at {
        let b1 = rational("at", at)?;
        let s = wnr2_strategies(&b1).map_err(invalid)?;
        let mut out = String::from("player,bid,prob\n");
        for (player, m) in [("p1", &s.p1), ("p2", &s.p2)] {
            for (b, p) in m.bids.iter().zip(&m.probabilities) {
                writeln!(out, "{player},{},{}", format_rational(b), format_rational(p)).unwrap();
            }
        }
        let eps = s.epsilon_prime.as_ref().map(format_rational).unwrap_or_else(|| "none".into());
        writeln!(out, "# n {} e {} epsilon_prime {eps}", s.n, format_rational(&s.e)).unwrap();
        return Ok(out);
    }
    let (from, to, step) = (rational("from", from)?, rational("to", to)?, rational("step", step)?);
    if step <= BigRational::from_integer(0.into()) {
        return Err(CliError::Usage("--step must be positive".into()));
    }
    if from < BigRational::from_integer(0.into()) || to < from {
        return Err(CliError::Usage("need 0 <= --from <= --to".into()));
    }
    let tie = tie_rule(ties)?;
    let mut out = String::from("B1,value,left,left_closed,right,right_closed\n");
    let mut b = from;
    while b <= to {
        let s = wnr2_value(&Ratio::Finite(b.clone()), tie);
        let i = &s.interval;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            format_rational(&b),
            format_rational(&s.value),
            format_rational(&i.left),
            i.left_closed,
            i.right,
            i.right_closed
        )
        .unwrap();
        b += &step;
    }
    Ok(out)
}

fn sweep_cmd(n: usize, b1: &str, v: &str, oracle: Option<&str>, cap: usize) -> Result<String, CliError> {
    let b1 = rational("b1", b1)?;
    let v = rational("v", v)?;
    let name = oracle.unwrap_or(match n {
        2 => "step",
        3 => "wnr2",
        _ => "",
    });
    let step = StepOracle;
    let wnr2_p1 = Wnr2Oracle {
        tie_rule: TieRule::Player1Wins,
    };
    let wnr2_p2 = Wnr2Oracle {
        tie_rule: TieRule::Player2Wins,
    };
    let oracle: &dyn ValueOracle = match name {
        "step" => &step,
        "wnr2" => &wnr2_p1,
        "wnr2-p2" => &wnr2_p2,
        "" => return Err(CliError::Usage(format!("no built-in oracle for n = {n}; pass --oracle"))),
        other => return Err(CliError::Usage(format!("unknown oracle `{other}` (step, wnr2, wnr2-p2)"))),
    };
    let s = sweep(n, &b1, &v, oracle, cap).map_err(invalid)?;
    let mut out = String::new();
    let nd = |r: &BigRational| format!("{}/{}", r.numer(), r.denom());
    for (b, m) in s.support.iter().zip(&s.masses) {
        writeln!(out, "bid {} mass {}", nd(b), nd(m)).unwrap();
    }
    writeln!(out, "bid 0/1 mass {}", nd(&s.zero_mass)).unwrap();
    writeln!(out, "status {}", s.status).unwrap();
    Ok(out)
}

fn solve_matrix(file: &PathBuf, tol: f64) -> Result<String, CliError> {
    let text = if file.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Usage(e.to_string()))?
    } else {
        fs::read_to_string(file).map_err(|e| CliError::Usage(format!("{}: {e}", file.display())))?
    };
    let game = parse_matrix(&text).map_err(CliError::Invalid)?;
    let s = solve_matrix_game(&game, tol);
    let join = |v: &[f64]| v.iter().map(|x| fixed(*x)).collect::<Vec<_>>().join(" ");
    Ok(format!(
        "value {}\nrow {}\ncol {}\ngap {:e}\n",
        fixed(s.value),
        join(&s.row_strategy),
        join(&s.col_strategy),
        s.certificate_gap
    ))
}

#[allow(clippy::too_many_arguments)]
fn play(
    game: &PathBuf,
    root: Option<&str>,
    b1: &str,
    p1: &str,
    p2: &str,
    trials: usize,
    seed: u64,
    max_rounds: Option<usize>,
    ties: &str,
) -> Result<String, CliError> {
    let g = read_game(game)?;
    let b1 = rational("b1", b1)?;
    let root = match root {
        Some(name) => g.id(name).ok_or_else(|| invalid(format!("unknown vertex `{name}`")))?,
        None => g
            .root()
            .ok_or_else(|| CliError::Usage("the game has no root; pass --root".into()))?,
    };
    let tie_rule = tie_rule(ties)?;
    let s1 = builtin(p1, &g, root, &b1, Player::One).map_err(invalid)?;
    let s2 = builtin(p2, &g, root, &b1, Player::Two).map_err(invalid)?;
    let cfg = PlayoutConfig {
        trials,
        seed,
        max_rounds,
        tie_rule,
    };
    let r = simulate(&g, root, &b1, s1.as_ref(), s2.as_ref(), &cfg).map_err(invalid)?;
    let mut out = String::new();
    writeln!(out, "seed {seed}").unwrap();
    writeln!(out, "trials {}", r.trials).unwrap();
    writeln!(out, "mean {}", fixed(r.mean)).unwrap();
    writeln!(out, "std_dev {}", fixed(r.std_dev)).unwrap();
    writeln!(out, "ci95 {} {}", fixed(r.confidence.0), fixed(r.confidence.1)).unwrap();
    for (leaf, hits) in &r.leaf_hits {
        writeln!(out, "leaf {leaf} {hits}").unwrap();
    }
    writeln!(out, "illegal_bids {}", r.illegal_bids).unwrap();
    writeln!(out, "truncations {}", r.truncations).unwrap();
    Ok(out)
}

fn configure_threads(flag: Option<usize>) -> Result<(), CliError> {
    let threads = match flag {
        Some(n) => Some(n),
        None => match std::env::var("ALLPAY_THREADS") {
            Ok(s) => Some(
                s.parse()
                    .map_err(|_| CliError::Usage(format!("ALLPAY_THREADS: not a number: `{s}`")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(e.code());
    }
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (body, err) = match run(cli.command) {
        Ok(body) => (body, None),
        Err((body, e)) => (body, Some(e)),
    };
    if !body.is_empty() {
        let text = header(&args) + &body;
        let written = match &cli.out {
            Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        };
        if let Err(msg) = written {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    }
    match err {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
