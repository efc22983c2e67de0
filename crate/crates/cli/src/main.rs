use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use safety_synth::dfa::{DfaError, DEFAULT_STATE_CAP};
use safety_synth::game::FirstMover;
use safety_synth::horn::HornError;
use safety_synth::ltl::{expand_until, parse_ltl, to_nnf, Formula, LtlError, Partition};
use safety_synth::pipeline::{prepare, solve_horn_game, solve_symbolic, SolveError, SolveOptions};
use safety_synth::transducer::{
    validate_with_dfa, ExportFormat, TransducerError, ValidationConfig,
};

const REALIZABLE: u8 = 10;
const UNREALIZABLE: u8 = 20;
const ERROR: u8 = 1;
const FRAGMENT: u8 = 2;
const RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "safety-synth", version, about = "Reactive synthesis for Safety LTL")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide realizability and write a strategy.
    Synth(SynthArgs),
    /// Print the formula with every Until unrolled to a bounded length.
    Expand(ExpandArgs),
    /// Print the minimized bad-prefix automaton.
    Dfa(DfaArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Symbolic,
    Horn,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum First {
    Env,
    Ctrl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Out {
    Dot,
    Json,
}

#[derive(Args, Clone)]
struct Common {
    /// Formula file.
    #[arg(short = 'f', long = "formula", value_name = "PATH")]
    formula: PathBuf,
    /// Unroll each Until this many steps before solving.
    #[arg(long = "expand", value_name = "L")]
    expand: Option<usize>,
    /// Log progress to stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args, Clone)]
struct SynthArgs {
    #[command(flatten)]
    common: Common,
    /// Partition file with `.inputs` and `.outputs` lines.
    #[arg(short = 'p', long = "partition", value_name = "PATH")]
    partition: PathBuf,
    #[arg(long, value_enum, default_value = "symbolic")]
    mode: Mode,
    /// Which player moves first in each round.
    #[arg(long, value_enum, default_value = "env")]
    first: First,
    #[arg(long, value_enum, default_value = "json")]
    out: Out,
    /// Write the strategy here instead of standard output.
    #[arg(long = "out-file", value_name = "PATH")]
    out_file: Option<PathBuf>,
    #[arg(long = "state-cap", value_name = "N", default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
    #[arg(long, value_name = "SECONDS")]
    timeout: Option<f64>,
    /// Seed for the strategy self-check plays.
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone)]
struct ExpandArgs {
    #[arg(short = 'f', long = "formula", value_name = "PATH")]
    formula: PathBuf,
    #[arg(long = "expand", value_name = "L")]
    expand: usize,
}

#[derive(Args, Clone)]
struct DfaArgs {
    #[command(flatten)]
    common: Common,
    #[arg(short = 'p', long = "partition", value_name = "PATH")]
    partition: PathBuf,
    #[arg(long = "state-cap", value_name = "N", default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<DfaError> for Failure {
    fn from(e: DfaError) -> Self {
        let code = match &e {
            DfaError::Ltl(LtlError::NotSafety(_)) => FRAGMENT,
            DfaError::StateCap(_) => RESOURCE,
            _ => ERROR,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Dfa(d) => d.into(),
            SolveError::Horn(HornError::Cap { .. }) | SolveError::Transducer(TransducerError::Cap(_)) => {
                Failure::new(RESOURCE, e.to_string())
            }
            other => Failure::new(ERROR, other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(ERROR, format!("{}: {e}", path.display())))
}

fn load_formula(common: &Common) -> Result<Formula, Failure> {
    let text = read(&common.formula)?;
    let f = parse_ltl(&text).map_err(|e| Failure::new(ERROR, format!("{}: {e}", common.formula.display())))?;
    let f = to_nnf(&f);
    match common.expand {
        Some(l) => expand_until(&f, l).map_err(|e| Failure::new(ERROR, e.to_string())),
        None => Ok(f),
    }
}

fn load_partition(path: &Path) -> Result<Partition, Failure> {
    Partition::parse(&read(path)?).map_err(|e| Failure::new(ERROR, format!("{}: {e}", path.display())))
}

fn synth(args: &SynthArgs) -> Result<u8, Failure> {
    let phi = load_formula(&args.common)?;
    let partition = load_partition(&args.partition)?;
    let first = match args.first {
        First::Env => FirstMover::Environment,
        First::Ctrl => FirstMover::Controller,
    };
    if args.mode != Mode::Symbolic && first == FirstMover::Controller {
        return Err(Failure::new(
            ERROR,
            "--mode horn and --mode both require --first env",
        ));
    }
    let dfa = prepare(&phi, &partition, args.state_cap)?;
    let options = SolveOptions {
        first_mover: first,
        state_cap: args.state_cap,
        ..SolveOptions::default()
    };
    let outcome = match args.mode {
        Mode::Symbolic => solve_symbolic(&dfa, &partition, &options)?,
        Mode::Horn => solve_horn_game(&dfa, &partition, &options)?,
        Mode::Both => {
            let symbolic = solve_symbolic(&dfa, &partition, &options)?;
            let horn = solve_horn_game(&dfa, &partition, &options)?;
            if symbolic.verdict != horn.verdict {
                return Err(Failure::new(
                    ERROR,
                    format!(
                        "solvers disagree: symbolic says {}, Horn says {}",
                        symbolic.verdict, horn.verdict
                    ),
                ));
            }
            info!("both solvers agree");
            symbolic
        }
    };
    println!("{}", outcome.verdict);
    let Some(strategy) = outcome.strategy else {
        return Ok(UNREALIZABLE);
    };
    if first == FirstMover::Environment {
        let config = ValidationConfig {
            random_plays: 100,
            adversarial_plays: 10,
            horizon: 50,
            seed: args.seed,
        };
        let report = validate_with_dfa(&strategy, &dfa, &config);
        info!("self-check: {report}");
        if !report.passed() {
            return Err(Failure::new(ERROR, format!("strategy self-check failed: {report}")));
        }
    }
    let format = match args.out {
        Out::Dot => ExportFormat::Dot,
        Out::Json => ExportFormat::Json,
    };
    let text = strategy.export(format);
    match &args.out_file {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::new(ERROR, format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(REALIZABLE)
}

fn expand(args: &ExpandArgs) -> Result<u8, Failure> {
    let common = Common {
        formula: args.formula.clone(),
        expand: Some(args.expand),
        verbose: false,
    };
    println!("{}", load_formula(&common)?);
    Ok(0)
}

fn dfa(args: &DfaArgs) -> Result<u8, Failure> {
    let phi = load_formula(&args.common)?;
    let partition = load_partition(&args.partition)?;
    let d = prepare(&phi, &partition, args.state_cap)?;
    print!("{d}");
    let accepting: Vec<String> = d.accepting_states().iter().map(|s| s.to_string()).collect();
    println!(
        "# states {}, accepting {{{}}}, bits {}, edges {}",
        d.num_states(),
        accepting.join(", "),
        d.state_bits(),
        d.num_edges()
    );
    if d.is_accepting(d.initial()) {
        println!("# initial state accepting: every trace is a bad prefix");
    }
    Ok(0)
}

fn with_timeout(seconds: Option<f64>, job: impl FnOnce() -> Result<u8, Failure> + Send + 'static) -> Result<u8, Failure> {
    let Some(seconds) = seconds else {
        return job();
    };
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let _ = tx.send(job());
    });
    match rx.recv_timeout(Duration::from_secs_f64(seconds.max(0.0))) {
        Ok(result) => result,
        Err(mpsc::RecvTimeoutError::Timeout) => {
            Err(Failure::new(RESOURCE, format!("timed out after {seconds} s")))
        }
        Err(mpsc::RecvTimeoutError::Disconnected) => Err(Failure::new(ERROR, "solver thread crashed")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verbose = match &cli.command {
        Command::Synth(a) => a.common.verbose,
        Command::Dfa(a) => a.common.verbose,
        Command::Expand(_) => false,
    };
    env_logger::Builder::new()
        .filter_level(if verbose {
            log::LevelFilter::Debug
        } else {
            log::LevelFilter::Warn
        })
        .format_timestamp(None)
        .init();
    let result = match cli.command {
        Command::Synth(args) => {
            let timeout = args.timeout;
            with_timeout(timeout, move || synth(&args))
        }
        Command::Expand(args) => expand(&args),
        Command::Dfa(args) => dfa(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if f.code == RESOURCE {
                warn!("resource limit reached");
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
