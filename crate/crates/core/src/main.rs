use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use sli::bench::{format_summary, run_bench, summarize, write_csv, BenchSpec, Family};
use sli::ground::{ground_problem, write_stats_csv, GroundOptions, Strategy};
use sli::parser::parse_problem_named;
use sli::smt::emit_smt;
use sli::tensor::set_bit_budget;

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "sli",
    version,
    about = "Ground first-order theories over a partial structure and emit SMT-LIB"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Vec,
    Naive,
    Noreduce,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Vec => Strategy::Vec,
            StrategyArg::Naive => Strategy::Naive,
            StrategyArg::Noreduce => Strategy::NoReduce,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Ci,
    Cs,
    Tg,
}

#[derive(Subcommand)]
enum Command {
    /// Ground a problem file and write SMT-LIB.
    Ground {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "vec")]
        strategy: StrategyArg,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-sentence statistics CSV.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Largest tensor, in bits.
        #[arg(long)]
        bit_budget: Option<u64>,
        /// Seconds.
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Generate benchmark instances and time grounding strategies.
    Bench {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, num_args = 1.., required = true)]
        size: Vec<usize>,
        #[arg(long, num_args = 1.., default_values_t = [0.1])]
        ratio: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Generate the UNSAT variant of CI/CS.
        #[arg(long)]
        unsat: bool,
        #[arg(long, default_value_t = 1)]
        instances: usize,
        #[arg(long, value_enum, value_delimiter = ',', default_values = ["vec", "naive", "noreduce"])]
        strategies: Vec<StrategyArg>,
        /// CSV output; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seconds per run.
        #[arg(long, default_value_t = 600.0)]
        timeout: f64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Parse and type-check a problem file.
    Check { file: PathBuf },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("sli: {msg}");
    ExitCode::from(code)
}

fn seconds(s: f64) -> Result<Duration, String> {
    Duration::try_from_secs_f64(s).map_err(|_| format!("invalid timeout {s}"))
}

fn write_output(path: Option<&PathBuf>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match cli.command {
        Command::Check { file } => {
            let text = match fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", file.display())),
            };
            match parse_problem_named(&text, &file.display().to_string()) {
                Ok(p) => {
                    println!("ok: {} sentences", p.theory.len());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(EXIT_INPUT, e),
            }
        }
        Command::Ground {
            file,
            strategy,
            out,
            stats,
            bit_budget,
            timeout,
        } => {
            let text = match fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", file.display())),
            };
            let problem = match parse_problem_named(&text, &file.display().to_string()) {
                Ok(p) => p,
                Err(e) => return fail(EXIT_INPUT, e),
            };
            if let Some(b) = bit_budget {
                set_bit_budget(b);
            }
            let deadline = match timeout.map(seconds).transpose() {
                Ok(d) => d.map(|d| Instant::now() + d),
                Err(e) => return fail(EXIT_USAGE, e),
            };
            let opts = GroundOptions {
                deadline,
                ..Default::default()
            };
            let g = match ground_problem(&problem, strategy.into(), &opts) {
                Ok(g) => g,
                Err(e) if e.is_resource() => return fail(EXIT_RESOURCE, e),
                Err(e) => return fail(EXIT_INPUT, e),
            };
            if let Err(e) = write_output(out.as_ref(), emit_smt(&g.theory).as_bytes()) {
                return fail(EXIT_USAGE, e);
            }
            if let Some(path) = stats {
                let res = fs::File::create(&path)
                    .map_err(csv::Error::from)
                    .and_then(|f| write_stats_csv(&g.stats, f));
                if let Err(e) = res {
                    return fail(EXIT_USAGE, format!("{}: {e}", path.display()));
                }
            }
            ExitCode::SUCCESS
        }
        Command::Bench {
            family,
            size,
            ratio,
            seed,
            unsat,
            instances,
            strategies,
            out,
            timeout,
            jobs,
        } => {
            let family = match family {
                FamilyArg::Ci => Family::Ci,
                FamilyArg::Cs => Family::Cs,
                FamilyArg::Tg => Family::Tg,
            };
            let timeout = match seconds(timeout) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_USAGE, e),
            };
            let specs: Vec<BenchSpec> = size
                .iter()
                .flat_map(|&n| {
                    ratio.iter().map(move |&r| BenchSpec {
                        family,
                        size: n,
                        ratio: r,
                        seed,
                        sat: !unsat,
                    })
                })
                .collect();
            let strategies: Vec<Strategy> = strategies.into_iter().map(Into::into).collect();
            let records = match run_bench(&specs, instances, &strategies, timeout, jobs) {
                Ok(r) => r,
                Err(e) => return fail(EXIT_USAGE, e),
            };
            let mut buf = Vec::new();
            if let Err(e) = write_csv(&records, &mut buf) {
                return fail(EXIT_USAGE, e);
            }
            if let Err(e) = write_output(out.as_ref(), &buf) {
                return fail(EXIT_USAGE, e);
            }
            eprint!("{}", format_summary(&summarize(&records)));
            ExitCode::SUCCESS
        }
    }
}
