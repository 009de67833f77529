//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for bad input (flags, files, configuration),
//! 2 when the simulation itself fails, e.g. every link is down.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use crate::engine::{run, EngineConfig, FailureSchedule, SimulationResult};
use crate::forwarding::{PolicyId, WfqDirection};
use crate::link::AggregationGroup;
use crate::report::{write_comparison, write_report, ReportKind};
use crate::scenario::{Scenario, ScenarioName};
use crate::trace::{links_to_csv, parse_failures, parse_links_with_tick, parse_trace, DemandTrace};

#[derive(Debug, Parser)]
#[command(name = "rla", version, about = "Redundant link aggregation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Link configuration CSV.
    #[arg(long)]
    links: PathBuf,
    /// Demand trace CSV.
    #[arg(long)]
    trace: PathBuf,
    /// Seconds per tick.
    #[arg(long, default_value_t = 1.0)]
    tick: f64,
    /// Megabits per forwarding quantum.
    #[arg(long, default_value_t = 1.0)]
    quantum: f64,
    #[arg(long = "wfq-direction", default_value = "inverse", value_parser = parse_direction)]
    wfq_direction: WfqDirection,
    /// Link failure schedule CSV.
    #[arg(long)]
    failures: Option<PathBuf>,
    /// Output path, `-` for standard output.
    #[arg(long, default_value = "-")]
    out: String,
    /// Prefix the output with a comment line naming the generation time.
    #[arg(long)]
    stamp: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one policy over a trace and write reports.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_parser = parse_policy)]
        policy: PolicyId,
        #[arg(long, default_value = "supply", value_parser = parse_report)]
        report: ReportKind,
    },
    /// Run several policies over the same trace and merge their supply.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated policy names.
        #[arg(long, value_parser = parse_policy, value_delimiter = ',', required = true)]
        policies: Vec<PolicyId>,
    },
    /// Write the link file and synthetic trace of a bundled scenario.
    Scenario {
        #[arg(long)]
        name: String,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
}

fn parse_policy(s: &str) -> Result<PolicyId, String> {
    s.parse()
        .map_err(|e: crate::forwarding::ForwardingError| e.to_string())
}

fn parse_direction(s: &str) -> Result<WfqDirection, String> {
    s.parse()
        .map_err(|e: crate::forwarding::ForwardingError| e.to_string())
}

fn parse_report(s: &str) -> Result<ReportKind, String> {
    s.parse()
}

#[derive(Debug)]
enum Failure {
    Input(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(failure) => {
            let (Failure::Input(e) | Failure::Runtime(e)) = &failure;
            let _ = writeln!(stderr, "error: {e:#}");
            failure.code()
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Simulate {
            run: args,
            policy,
            report,
        } => {
            let inputs = Inputs::load(&args)?;
            let result = inputs.simulate(policy)?;
            let mut buf = Vec::new();
            stamp(&mut buf, args.stamp);
            write_report(&mut buf, report, &result).context("formatting report")?;
            emit(&args.out, &buf, stdout)?;
        }
        Command::Compare {
            run: args,
            policies,
        } => {
            let inputs = Inputs::load(&args)?;
            let results = inputs.compare(&policies)?;
            let mut buf = Vec::new();
            stamp(&mut buf, args.stamp);
            write_comparison(&mut buf, &results).context("formatting comparison")?;
            emit(&args.out, &buf, stdout)?;
        }
        Command::Scenario { name, out_dir } => {
            let name = ScenarioName::parse(&name)
                .ok_or_else(|| anyhow!("unknown scenario '{name}' (expected 1 or 2)"))?;
            write_scenario(name, &out_dir)?;
        }
    }
    Ok(())
}

struct Inputs {
    group: AggregationGroup,
    trace: DemandTrace,
    failures: Option<FailureSchedule>,
    config: EngineConfig,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("{}: cannot read", path.display()))
}

impl Inputs {
    fn load(args: &RunArgs) -> anyhow::Result<Inputs> {
        let group_id = args
            .links
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "group".into());
        let group = parse_links_with_tick(&read(&args.links)?, &group_id, args.tick)
            .with_context(|| args.links.display().to_string())?;
        let trace =
            parse_trace(&read(&args.trace)?).with_context(|| args.trace.display().to_string())?;
        let failures = match &args.failures {
            Some(path) => {
                Some(parse_failures(&read(path)?).with_context(|| path.display().to_string())?)
            }
            None => None,
        };
        let config = EngineConfig {
            tick: args.tick,
            quantum: args.quantum,
            wfq_direction: args.wfq_direction,
            ..Default::default()
        };
        config.validate(&group)?;
        Ok(Inputs {
            group,
            trace,
            failures,
            config,
        })
    }

    fn simulate(&self, policy: PolicyId) -> Result<SimulationResult, Failure> {
        let config = EngineConfig {
            policy,
            ..self.config
        };
        run(&self.group, &config, &self.trace, self.failures.as_ref()).map_err(|e| {
            let input = e.is_input_error();
            let e = anyhow::Error::new(e).context(format!("policy {}", policy.short_name()));
            if input {
                Failure::Input(e)
            } else {
                Failure::Runtime(e)
            }
        })
    }

    /// Runs each policy on its own thread; results keep the requested order.
    fn compare(&self, policies: &[PolicyId]) -> Result<Vec<(PolicyId, SimulationResult)>, Failure> {
        let outcomes: Vec<_> = std::thread::scope(|s| {
            let handles: Vec<_> = policies
                .iter()
                .map(|&p| s.spawn(move || (p, self.simulate(p))))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("simulation thread panicked"))
                .collect()
        });
        outcomes
            .into_iter()
            .map(|(p, r)| r.map(|res| (p, res)))
            .collect()
    }
}

fn stamp(buf: &mut Vec<u8>, enabled: bool) {
    if enabled {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let _ = writeln!(
            buf,
            "# generated by rla {} at unix time {secs}",
            env!("CARGO_PKG_VERSION")
        );
    }
}

fn emit(out: &str, bytes: &[u8], stdout: &mut dyn Write) -> anyhow::Result<()> {
    if out == "-" {
        stdout
            .write_all(bytes)
            .context("writing to standard output")?;
        return Ok(());
    }
    fs::write(out, bytes).with_context(|| format!("{out}: cannot write"))
}

fn write_scenario(name: ScenarioName, dir: &Path) -> anyhow::Result<()> {
    let scenario = Scenario::load(name);
    fs::create_dir_all(dir).with_context(|| format!("{}: cannot create", dir.display()))?;
    let label = name.label();
    let links = dir.join(format!("{label}_links.csv"));
    let trace = dir.join(format!("{label}_trace.csv"));
    fs::write(&links, links_to_csv(&scenario.group))
        .with_context(|| format!("{}: cannot write", links.display()))?;
    fs::write(&trace, scenario.trace().to_csv())
        .with_context(|| format!("{}: cannot write", trace.display()))?;
    Ok(())
}

/// Entry point used by the `rla` binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    main_with_args(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
