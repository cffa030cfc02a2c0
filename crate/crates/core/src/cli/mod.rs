//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 usage, 2 infeasible size, 3 internal error,
//! 4 golden mismatch.

mod commands;
pub mod render;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::histories::{enumerate, FinalSite, HistorySpace};
use crate::limits::Limits;
use crate::model::{initial_state, LatticeSpec, StateLabel};
use render::{Format, Output};
use report::Golden;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_GOLDEN: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "coevent", version, about = "Exact coevent engine for the n-site quantum hopper")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, global = true, default_value_t = 3)]
    pub sites: usize,
    #[arg(long, global = true, default_value_t = 3)]
    pub steps: usize,
    /// ground | plus | minus | standing | custom:<site terms>
    #[arg(long, global = true, default_value = "plus")]
    pub state: StateLabel,
    /// Final site, or `all`.
    #[arg(long = "final", global = true, default_value = "0")]
    pub final_site: FinalSite,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub max_histories: Option<usize>,
    /// Expand and print every primitive support.
    #[arg(long, global = true)]
    pub emit_supports: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transfer matrix as root-of-unity exponents, with the unitarity check.
    Model,
    /// Histories with their amplitudes and amplitude classes.
    Histories,
    /// Precluded-event count, preclusive-coevent exponent, maximal vectors.
    Preclusion {
        /// Also count by visiting every subset.
        #[arg(long)]
        bruteforce: bool,
    },
    /// Primitive multiplicative coevents.
    Primitives,
    /// Circulation, restlessness and named-event verdicts.
    Classify,
    /// Overlap between two initial states and the events separating them.
    Compare {
        #[arg(long = "with")]
        with: StateLabel,
    },
    /// Every headline number checked against a golden file.
    Report {
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Include the exhaustive precluded count for --state.
        #[arg(long)]
        bruteforce: bool,
    },
}

/// Validated settings shared by all subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec: LatticeSpec,
    pub state: StateLabel,
    pub final_site: FinalSite,
    pub limits: Limits,
    pub emit_supports: bool,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<Self> {
        let spec = LatticeSpec::new(args.sites, args.steps)?;
        if let FinalSite::Site(f) = args.final_site {
            spec.check_site(f)?;
        }
        // reject malformed custom states before any work starts
        initial_state(&spec, args.state.clone())?;
        let mut limits = Limits::from_env();
        if let Some(m) = args.max_histories {
            limits.max_histories = m;
        }
        Ok(RunConfig {
            spec,
            state: args.state.clone(),
            final_site: args.final_site,
            limits,
            emit_supports: args.emit_supports,
        })
    }

    pub fn space(&self, label: &StateLabel) -> Result<HistorySpace> {
        let st = initial_state(&self.spec, label.clone())?;
        enumerate(&self.spec, &st, self.final_site, &self.limits)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible { .. } | Error::Overflow(_) => EXIT_INFEASIBLE,
        Error::InvalidLattice(_)
        | Error::InvalidSite { .. }
        | Error::UnknownState(_)
        | Error::InvalidState(_)
        | Error::UnknownEvent(_)
        | Error::WrongSpace(_) => EXIT_USAGE,
        _ => EXIT_INTERNAL,
    }
}

enum Outcome {
    Done(Output),
    Failed(Output, i32, Vec<String>),
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<Outcome> {
    Ok(match &cli.command {
        Command::Model => {
            let (out, unitary) = commands::model(cfg)?;
            if unitary {
                Outcome::Done(out)
            } else {
                Outcome::Failed(out, EXIT_INTERNAL, vec!["transfer matrix is not unitary".into()])
            }
        }
        Command::Histories => Outcome::Done(commands::histories(cfg)?),
        Command::Preclusion { bruteforce } => Outcome::Done(commands::preclusion(cfg, *bruteforce)?),
        Command::Primitives => Outcome::Done(commands::primitives(cfg)?),
        Command::Classify => Outcome::Done(commands::classify(cfg)?),
        Command::Compare { with } => Outcome::Done(commands::compare(cfg, with)?),
        Command::Report { golden, bruteforce } => {
            let golden = match golden {
                Some(p) => {
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| Error::Output(format!("{}: {e}", p.display())))?;
                    Golden::parse(&text)?
                }
                None => Golden::parse(report::DEFAULT_GOLDEN)?,
            };
            let r = report::report(cfg, &golden, *bruteforce)?;
            if r.failures.is_empty() {
                Outcome::Done(r.output)
            } else {
                Outcome::Failed(r.output, EXIT_GOLDEN, r.failures)
            }
        }
    })
}

fn emit(cli: &Cli, out: &Output, stdout: &mut (dyn Write + Send)) -> Result<()> {
    let body = out.render(cli.common.format)?;
    let io = |e: std::io::Error| Error::Output(e.to_string());
    match &cli.common.out {
        Some(path) => std::fs::write(path, body).map_err(|e| Error::Output(format!("{}: {e}", path.display()))),
        None => stdout.write_all(body.as_bytes()).map_err(io),
    }
}

fn execute(cli: &Cli, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32 {
    let cfg = match RunConfig::from_args(&cli.common) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let (out, code, notes) = match dispatch(cli, &cfg) {
        Ok(Outcome::Done(out)) => (out, EXIT_OK, Vec::new()),
        Ok(Outcome::Failed(out, code, notes)) => (out, code, notes),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = emit(cli, &out, stdout) {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_INTERNAL;
    }
    for n in notes {
        let _ = writeln!(stderr, "mismatch: {n}");
    }
    code
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match cli.common.threads {
        Some(0) => {
            let _ = writeln!(stderr, "error: --threads must be at least 1");
            EXIT_USAGE
        }
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| execute(&cli, stdout, stderr)),
            Err(e) => {
                let _ = writeln!(stderr, "error: thread pool: {e}");
                EXIT_INTERNAL
            }
        },
        None => execute(&cli, stdout, stderr),
    }
}
