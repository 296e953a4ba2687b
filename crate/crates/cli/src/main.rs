use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qcorr::{Execution, SearchConfig};
use qcorr_cli::compute::{cmd_compute, parse_route, parse_side, parse_split, ComputeArgs};
use qcorr_cli::sweep::{parse_axis, parse_fix, run_sweep, Family, SweepSpec};
use qcorr_cli::verify::{cmd_verify, VerifyArgs};
use qcorr_cli::{Failure, Outcome};

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Quantum discord and entanglement of formation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlation report for a state file
    Compute {
        #[arg(long)]
        state: PathBuf,
        /// Bipartition as d_A x d_B, e.g. 4x2
        #[arg(long)]
        split: Option<String>,
        /// Measured party: A or B
        #[arg(long, default_value = "A")]
        measured: String,
        /// auto, analytic or oracle
        #[arg(long, default_value = "auto")]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Parameter sweep written as CSV
    Sweep {
        /// fig1 or fig2
        #[arg(long, conflicts_with = "family")]
        preset: Option<String>,
        /// three-qubit, rank2 or phase-damping
        #[arg(long, required_unless_present = "preset")]
        family: Option<String>,
        /// Fixed parameter, name=value (values may use pi, e.g. pi/3)
        #[arg(long = "fix", conflicts_with = "preset")]
        fixed: Vec<String>,
        /// Swept parameter, name=start:end; repeat for a grid
        #[arg(long = "axis", conflicts_with = "preset")]
        axes: Vec<String>,
        /// Points per axis (presets: 400 for fig1, 101 for fig2)
        #[arg(long)]
        points: Option<usize>,
        /// Output file; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded invariant suite
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Directory for offending states
        #[arg(long, default_value = "verify-failures")]
        dump_dir: PathBuf,
    },
}

fn run(cli: Cli) -> Outcome<String> {
    match cli.command {
        Command::Compute {
            state,
            split,
            measured,
            method,
            seed,
            restarts,
        } => {
            let args = ComputeArgs {
                split: split.as_deref().map(parse_split).transpose()?,
                measured: parse_side(&measured)?,
                route: parse_route(&method)?,
                search: SearchConfig {
                    seed,
                    restarts,
                    ..SearchConfig::default()
                },
            };
            cmd_compute(&state, &args)
        }
        Command::Sweep {
            preset,
            family,
            fixed,
            axes,
            points,
            out,
        } => {
            let mut spec = match (preset, family) {
                (Some(name), _) => SweepSpec::preset(&name)?,
                (None, Some(family)) => SweepSpec {
                    family: family.parse::<Family>()?,
                    fixed: fixed.iter().map(|f| parse_fix(f)).collect::<Outcome<_>>()?,
                    axes: axes
                        .iter()
                        .map(|a| parse_axis(a, points.unwrap_or(101)))
                        .collect::<Outcome<_>>()?,
                    eta_column: true,
                },
                (None, None) => return Err(Failure::Validation("give --preset or --family".into())),
            };
            if let Some(n) = points {
                spec.axes.iter_mut().for_each(|a| a.points = n);
            }
            let csv = run_sweep(&spec, Execution::default())?.to_csv();
            match out {
                Some(path) => {
                    fs::write(&path, csv)?;
                    Ok(format!("wrote {} rows to {}\n", spec.axes.iter().map(|a| a.points).product::<usize>(), path.display()))
                }
                None => Ok(csv),
            }
        }
        Command::Verify {
            seed,
            samples,
            dump_dir,
        } => cmd_verify(&VerifyArgs {
            seed,
            samples,
            dump_dir,
            execution: Execution::default(),
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are validation failures; --help and --version are not
            return ExitCode::from(u8::from(e.use_stderr()));
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
