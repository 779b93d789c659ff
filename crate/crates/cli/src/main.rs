//! `zxtk`: evaluate, trace, verify and benchmark ZX diagrams from the shell.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on bad input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use zxtk::diagram::cpm_construct;
use zxtk::machine::{
    extract_matrix, extract_matrix_general, g_extract_superoperator, Engine, GroundRules,
    GroundToken, PureRules, Rules, RunConfig, Scheduler, SchedulerKind, State, Token,
};
use zxtk::textio::{
    diagram_to_json, matrix_to_json, read_diagram, replay_jsonl, state_from_json, state_to_json,
    trace_to_jsonl, Format, TokenCodec,
};
use zxtk::verify::{run_suite, sparse_report, Family, GenConfig, Source, Suite};
use zxtk::{interp, interp_cpm, Diagram, Dir, EdgeId};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl From<zxtk::Error> for CliError {
    fn from(e: zxtk::Error) -> Self {
        use zxtk::Error as E;
        match e {
            E::FuseTripped { .. } | E::UnexpectedState(_) | E::NoWitness(_) => {
                CliError::Verification(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "zxtk", version, about = "ZX diagrams and their token machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dense matrix of a diagram (`.mat.json`).
    Interp {
        file: PathBuf,
        /// Doubled interpretation, required for diagrams with grounds.
        #[arg(long)]
        cpm: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Normalizes a boundary seed and writes the final token state.
    Run {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Also write the trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Matrix computed by the token machine from a seed on one edge.
    Extract {
        file: PathBuf,
        /// Edge label to seed. Without it every component is extracted
        /// separately.
        #[arg(long)]
        seed_edge: Option<String>,
        /// Use the ground machine and return the superoperator.
        #[arg(long)]
        ground: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Writes the trace of a run, or checks a recorded one with `--replay`.
    Trace {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Trace to verify instead of recording a new one.
        #[arg(long)]
        replay: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// The doubled diagram (`.zxj`).
    Cpm {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Property suites on random diagrams or on one fixed diagram.
    Check {
        file: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "oracle")]
        suite: Vec<Suite>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Schedulers per confluence trial.
        #[arg(long, default_value_t = 20)]
        schedulers: usize,
        #[arg(long)]
        jobs: Option<usize>,
        /// Random diagrams with grounds (always on for the simulation suite).
        #[arg(long)]
        ground: bool,
        #[arg(long)]
        max_generators: Option<usize>,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Size of the extracted token state next to the dense matrix shape.
    Bench {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value = "lex")]
        strategy: SchedulerKind,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Input bits, one per input wire (two per wire allowed for ground
    /// diagrams), or a `.state.json` file.
    #[arg(long)]
    input: String,
    #[arg(long, default_value = "lex")]
    scheduler: SchedulerKind,
    /// Seed for the random scheduler.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the seed checks and rely on the step fuse.
    #[arg(long)]
    force: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zxtk: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Interp { file, cpm, out } => {
            let d = load_diagram(&file)?;
            let m = if cpm { interp_cpm(&d)? } else { interp(&d)? };
            out.emit(&matrix_to_json(&m)?)
        }
        Command::Run {
            file,
            run,
            trace,
            out,
        } => {
            let d = load_diagram(&file)?;
            let cfg = run_config(&run, trace.is_some())?;
            let (state, trace_text) = if d.has_ground() {
                run_machine(&d, GroundRules, &run, &cfg)?
            } else {
                run_machine(&d, PureRules, &run, &cfg)?
            };
            if let Some(path) = trace {
                write(&path, &trace_text)?;
            }
            out.emit(&state)
        }
        Command::Extract {
            file,
            seed_edge,
            ground,
            out,
        } => {
            let d = load_diagram(&file)?;
            let edge = seed_edge.map(|l| d.edge_by_name(&l)).transpose()?;
            let m = if ground || d.has_ground() {
                g_extract_superoperator(&d, edge.unwrap_or(EdgeId(0)))?
            } else {
                match edge {
                    Some(e) => extract_matrix(&d, e)?,
                    None => extract_matrix_general(&d)?,
                }
            };
            out.emit(&matrix_to_json(&m)?)
        }
        Command::Trace {
            file,
            run,
            replay,
            out,
        } => {
            let d = load_diagram(&file)?;
            match replay {
                Some(path) => {
                    let text = read(&path)?;
                    let state = if d.has_ground() {
                        replay_machine(&d, GroundRules, &run, &text)?
                    } else {
                        replay_machine(&d, PureRules, &run, &text)?
                    };
                    out.emit(&state)
                }
                None => {
                    let cfg = run_config(&run, true)?;
                    let (_, trace) = if d.has_ground() {
                        run_machine(&d, GroundRules, &run, &cfg)?
                    } else {
                        run_machine(&d, PureRules, &run, &cfg)?
                    };
                    out.emit(&trace)
                }
            }
        }
        Command::Cpm { file, out } => {
            let d = load_diagram(&file)?;
            out.emit(&diagram_to_json(&cpm_construct(&d)?)?)
        }
        Command::Check {
            file,
            suite,
            trials,
            seed,
            schedulers,
            jobs,
            ground,
            max_generators,
            json,
            out,
        } => {
            let fixed = file.as_deref().map(load_diagram).transpose()?;
            if let Some(d) = &fixed {
                // the property is vacuous without a cycle to unbalance
                if suite.contains(&Suite::Termination) && d.cycle_basis().is_empty() {
                    return Err(CliError::Input(
                        "the termination suite needs a diagram with a cycle".into(),
                    ));
                }
            }
            let mut reports = Vec::new();
            for s in suite {
                let mut cfg = if ground || s == Suite::Simulation {
                    GenConfig::ground()
                } else {
                    GenConfig::default()
                }
                .with_seed(seed);
                if let Some(g) = max_generators {
                    cfg.max_generators = g;
                }
                let src = match &fixed {
                    Some(d) => Source::Fixed(cfg, d.clone()),
                    None => Source::Random(cfg),
                };
                reports.push(run_suite(s, &src, trials, schedulers, jobs));
            }
            let text = if json {
                let mut t = serde_json::to_string_pretty(&reports).map_err(zxtk::Error::from)?;
                t.push('\n');
                t
            } else {
                reports.iter().map(ToString::to_string).collect()
            };
            out.emit(&text)?;
            match reports.iter().find(|r| !r.ok()) {
                Some(r) => Err(CliError::Verification(format!(
                    "{} suite: {} failing trials",
                    r.suite, r.failed
                ))),
                None => Ok(()),
            }
        }
        Command::Bench {
            family,
            size,
            strategy,
            out,
        } => {
            let r = sparse_report(family, size, strategy)?;
            let mut t = serde_json::to_string_pretty(&r).map_err(zxtk::Error::from)?;
            t.push('\n');
            out.emit(&t)
        }
    }
}

impl Output {
    fn emit(&self, text: &str) -> CliResult<()> {
        match &self.output {
            Some(p) => write(p, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_diagram(path: &Path) -> CliResult<Diagram> {
    let format = Format::from_path(path).ok_or_else(|| {
        CliError::Input(format!("{}: expected a .zxd or .zxj file", path.display()))
    })?;
    Ok(read_diagram(&read(path)?, format)?)
}

/// `ZXTK_FUSE` overrides the default step fuse.
fn run_config(run: &RunArgs, record: bool) -> CliResult<RunConfig> {
    let fuse = match std::env::var("ZXTK_FUSE") {
        Ok(v) => Some(
            v.trim()
                .parse()
                .map_err(|_| CliError::Input(format!("ZXTK_FUSE: {v:?} is not a step count")))?,
        ),
        Err(_) => None,
    };
    Ok(RunConfig {
        fuse,
        force: run.force,
        record,
        ..RunConfig::default()
    })
}

/// Tokens that can be placed on the inputs from a bit string.
trait InputToken: TokenCodec {
    fn from_bits(d: &Diagram, bits: &[u8]) -> CliResult<Vec<Self>>;
}

impl InputToken for Token {
    fn from_bits(d: &Diagram, bits: &[u8]) -> CliResult<Vec<Token>> {
        if bits.len() != d.num_inputs() {
            return Err(CliError::Input(format!(
                "expected {} input bits, got {}",
                d.num_inputs(),
                bits.len()
            )));
        }
        Ok(d.inputs()
            .iter()
            .zip(bits)
            .map(|(&a, &b)| Token::down(a, b))
            .collect())
    }
}

/// `n` bits set both halves of each token; `2n` bits are read as `x y`
/// pairs, wire by wire.
impl InputToken for GroundToken {
    fn from_bits(d: &Diagram, bits: &[u8]) -> CliResult<Vec<GroundToken>> {
        let n = d.num_inputs();
        let pairs: Vec<(u8, u8)> = if bits.len() == n {
            bits.iter().map(|&b| (b, b)).collect()
        } else if bits.len() == 2 * n {
            bits.chunks(2).map(|c| (c[0], c[1])).collect()
        } else {
            return Err(CliError::Input(format!(
                "expected {n} or {} input bits, got {}",
                2 * n,
                bits.len()
            )));
        };
        Ok(d.inputs()
            .iter()
            .zip(pairs)
            .map(|(&a, (x, y))| GroundToken::new(a, Dir::Down, x, y))
            .collect())
    }
}

fn seed_state<T: InputToken>(d: &Diagram, input: &str) -> CliResult<State<T>> {
    if input.ends_with(".json") {
        return Ok(state_from_json(d, &read(Path::new(input))?)?);
    }
    let bits = input
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(CliError::Input(format!(
                "input {input:?} is neither bits nor a .json file"
            ))),
        })
        .collect::<CliResult<Vec<u8>>>()?;
    if bits.is_empty() {
        return Err(CliError::Input("empty input".into()));
    }
    Ok(State::monomial(T::from_bits(d, &bits)?))
}

/// Final state and trace, both serialized.
fn run_machine<R>(
    d: &Diagram,
    rules: R,
    run: &RunArgs,
    cfg: &RunConfig,
) -> CliResult<(String, String)>
where
    R: Rules,
    R::Token: InputToken,
{
    let seed = seed_state::<R::Token>(d, &run.input)?;
    let mut sched = Scheduler::build(run.scheduler, d, run.seed);
    let result = Engine::new(d, rules).normalize(&seed, &mut sched, cfg)?;
    Ok((
        state_to_json(d, &result.state)?,
        trace_to_jsonl(d, &result.trace)?,
    ))
}

fn replay_machine<R>(d: &Diagram, rules: R, run: &RunArgs, text: &str) -> CliResult<String>
where
    R: Rules,
    R::Token: InputToken,
{
    let seed = seed_state::<R::Token>(d, &run.input)?;
    let engine = Engine::new(d, rules);
    let (_, state) = replay_jsonl(&engine, &seed, text)?;
    if !engine.is_normal(&state) {
        return Err(CliError::Verification(
            "trace stops before a normal form".into(),
        ));
    }
    Ok(state_to_json(d, &state)?)
}
