use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use surface_mmp::document::{parse_input, to_canonical_json, OutputFormat};
use surface_mmp::mmp::MmpMode;
use surface_mmp::report::{dispatch, verify_report, Command};
use surface_mmp::Error;

#[derive(Parser)]
#[command(name = "surface-mmp")]
#[command(about = "Exact birational geometry of surfaces from resolution data")]
#[command(version)]
struct Cli {
    /// Emit the machine report (JSON with certificates) instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Treat INPUT as a directory and run the command on every *.json file in it
    #[arg(long, global = true)]
    batch: bool,

    #[command(subcommand)]
    command: Commands,
}

#[derive(Args, Clone)]
struct Input {
    /// Input document (or directory with --batch)
    input: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Qf,
    Lc,
}

#[derive(Subcommand, Clone)]
enum Commands {
    /// Check the configuration invariants
    Validate(Input),
    /// Singularity class of the pair
    Classify(Input),
    /// Crepant coefficients and (log) discrepancies of the contracted curves
    Discrepancies(Input),
    /// Divisor cutting out the multiplier ideal
    Multiplier(Input),
    /// Curve classes, ρ and (K+Δ)-negative extremal rays
    Rays(Input),
    /// Run the MMP over the declared base
    Mmp {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "lc")]
        mode: ModeArg,
        /// Comma-separated curve ids to contract first when they span negative rays
        #[arg(long, value_delimiter = ',')]
        ray_policy: Option<Vec<String>>,
    },
    /// dlt blowup with its three certificates
    DltBlowup(Input),
    /// Different on a coefficient-one boundary curve
    Diff {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        curve: String,
    },
    /// Inversion of adjunction along a coefficient-one boundary curve
    Ioa {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        curve: String,
    },
    /// Non-klt locus
    Nklt(Input),
    /// Fibrewise connectedness of the non-klt locus
    Connectedness(Input),
    /// Blow up an incidence point
    Blowup {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        point: String,
    },
    /// Re-check a machine report against its input document
    Verify {
        #[command(flatten)]
        input: Input,
        /// Machine report produced with --json
        report: PathBuf,
    },
    /// Print the document in canonical form
    Fmt(Input),
}

impl Commands {
    fn input(&self) -> &Path {
        match self {
            Commands::Validate(i)
            | Commands::Classify(i)
            | Commands::Discrepancies(i)
            | Commands::Multiplier(i)
            | Commands::Rays(i)
            | Commands::DltBlowup(i)
            | Commands::Nklt(i)
            | Commands::Connectedness(i)
            | Commands::Fmt(i) => &i.input,
            Commands::Mmp { input, .. }
            | Commands::Diff { input, .. }
            | Commands::Ioa { input, .. }
            | Commands::Blowup { input, .. }
            | Commands::Verify { input, .. } => &input.input,
        }
    }

    fn to_command(&self) -> Option<Command> {
        Some(match self {
            Commands::Validate(_) => Command::Validate,
            Commands::Classify(_) => Command::Classify,
            Commands::Discrepancies(_) => Command::Discrepancies,
            Commands::Multiplier(_) => Command::Multiplier,
            Commands::Rays(_) => Command::Rays,
            Commands::Mmp { mode, ray_policy, .. } => Command::Mmp {
                mode: match mode {
                    ModeArg::Qf => MmpMode::Qf,
                    ModeArg::Lc => MmpMode::Lc,
                },
                ray_policy: ray_policy.clone(),
            },
            Commands::DltBlowup(_) => Command::DltBlowup,
            Commands::Diff { curve, .. } => Command::Diff { curve: curve.clone() },
            Commands::Ioa { curve, .. } => Command::Ioa { curve: curve.clone() },
            Commands::Nklt(_) => Command::Nklt,
            Commands::Connectedness(_) => Command::Connectedness,
            Commands::Blowup { point, .. } => Command::Blowup { point: point.clone() },
            Commands::Verify { .. } | Commands::Fmt(_) => return None,
        })
    }
}

struct Outcome {
    stdout: String,
    stderr: String,
    code: i32,
}

fn failure(path: &Path, e: Error) -> Outcome {
    Outcome {
        stdout: String::new(),
        stderr: format!("{}: error: {e}\n", path.display()),
        code: e.exit_code(),
    }
}

fn run_one(cmd: &Commands, path: &Path, json: bool) -> Outcome {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return failure(path, Error::Argument(format!("cannot read input: {e}"))),
    };
    let doc = match parse_input(&text) {
        Ok(d) => d,
        Err(e) => return failure(path, e),
    };
    match cmd {
        Commands::Fmt(_) => Outcome {
            stdout: to_canonical_json(&doc),
            stderr: String::new(),
            code: 0,
        },
        Commands::Verify { report, .. } => {
            let parsed = fs::read_to_string(report)
                .map_err(|e| Error::Argument(format!("cannot read report: {e}")))
                .and_then(|t| {
                    serde_json::from_str(&t).map_err(|e| Error::Parse {
                        path: report.display().to_string(),
                        message: e.to_string(),
                    })
                })
                .and_then(|v| verify_report(&doc, &v));
            match parsed {
                Ok(failures) if failures.is_empty() => Outcome {
                    stdout: "report verified\n".into(),
                    stderr: String::new(),
                    code: 0,
                },
                Ok(failures) => Outcome {
                    stdout: failures.iter().map(|f| format!("failed: {f}\n")).collect(),
                    stderr: String::new(),
                    code: 3,
                },
                Err(e) => failure(path, e),
            }
        }
        _ => {
            let command = cmd.to_command().expect("solver command");
            match dispatch(&command, &doc) {
                Ok(r) => {
                    let machine = json || doc.format() == OutputFormat::Json;
                    let stdout = if machine {
                        let mut s = serde_json::to_string_pretty(&r.machine).expect("serializable");
                        s.push('\n');
                        s
                    } else {
                        r.human
                    };
                    Outcome {
                        stdout,
                        stderr: String::new(),
                        code: r.exit_code,
                    }
                }
                Err(e) => failure(path, e),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let input = cli.command.input().to_path_buf();
    let outcomes: Vec<(PathBuf, Outcome)> = if cli.batch {
        let mut files: Vec<PathBuf> = match fs::read_dir(&input) {
            Ok(entries) => entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect(),
            Err(e) => {
                eprintln!("error: cannot read directory {}: {e}", input.display());
                return ExitCode::from(2);
            }
        };
        files.sort();
        files
            .par_iter()
            .map(|p| (p.clone(), run_one(&cli.command, p, cli.json)))
            .collect()
    } else {
        vec![(input.clone(), run_one(&cli.command, &input, cli.json))]
    };
    let mut code = 0;
    for (path, o) in &outcomes {
        if cli.batch && !o.stdout.is_empty() {
            println!("== {}", path.display());
        }
        print!("{}", o.stdout);
        eprint!("{}", o.stderr);
        code = code.max(o.code);
    }
    ExitCode::from(code as u8)
}
