use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dsurf::cli::{self, CliError, FamilyOp, Report};
use dsurf::dnum::DNum;
use dsurf::exec::Exec;
use dsurf::geom::FdConfig;

#[derive(Parser)]
#[command(name = "dsurf", version, about = "Minimal time-like surfaces through double numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Conjugate,
    Associated,
    Homothety,
    Motion,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a surface spec and report its classification.
    Check {
        spec: PathBuf,
        /// Also write the validation record as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Sweep curvature invariants over a grid and write CSV.
    Invariants {
        spec: PathBuf,
        #[arg(long, default_value = "64x64", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "parallel")]
        exec: Exec,
        /// Finite-difference step for the Laplacian column.
        #[arg(long, default_value_t = dsurf::geom::H_FD)]
        h: f64,
        /// Disable Richardson extrapolation of the Laplacian.
        #[arg(long)]
        no_richardson: bool,
    },
    /// Build canonical coordinates and write a JSON report plus a grid CSV.
    Canonize {
        spec: PathBuf,
        #[arg(long, value_parser = parse_point)]
        base: DNum,
        #[arg(long)]
        out: PathBuf,
        /// Relate the chart to a second one built from this base.
        #[arg(long, value_parser = parse_point)]
        reference_base: Option<DNum>,
        #[arg(long, default_value_t = 32)]
        grid: usize,
    },
    /// Derive a related surface and write its spec.
    Family {
        spec: PathBuf,
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<f64>,
        /// JSON file {"A": [[...]], "b": [...]}.
        #[arg(long)]
        motion: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Export x = Re Ψ as a triangulated OBJ mesh.
    Mesh {
        spec: PathBuf,
        #[arg(long, value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long, default_value = "0,1,2", value_parser = parse_project)]
        project: [usize; 3],
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let n = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((n(w)?, n(h)?))
}

fn parse_point(s: &str) -> Result<DNum, String> {
    let (u, v) = s.split_once(',').ok_or_else(|| format!("expected u,v, got {s:?}"))?;
    let n = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok(DNum::new(n(u)?, n(v)?))
}

fn parse_project(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| format!("expected three indices i,j,k, got {s:?}"))
}

fn missing(flag: &str) -> CliError {
    CliError::Validation(format!("--{flag} is required for this operation"))
}

fn run(cli: Cli) -> Result<Report, CliError> {
    match cli.command {
        Command::Check { spec, json } => cli::cmd_check(&spec, json.as_deref()),
        Command::Invariants { spec, grid, out, exec, h, no_richardson } => {
            cli::cmd_invariants(&cli::InvariantsArgs {
                spec,
                grid,
                out,
                exec,
                fd: FdConfig { h, richardson: !no_richardson },
            })
        }
        Command::Canonize { spec, base, out, reference_base, grid } => {
            cli::cmd_canonize(&cli::CanonizeArgs { spec, base, out, reference_base, grid })
        }
        Command::Family { spec, op, theta, k, motion, out, grid } => {
            let op = match op {
                Op::Conjugate => FamilyOp::Conjugate,
                Op::Associated => FamilyOp::Associated { theta: theta.ok_or_else(|| missing("theta"))? },
                Op::Homothety => FamilyOp::Homothety { k: k.ok_or_else(|| missing("k"))? },
                Op::Motion => FamilyOp::Motion { path: motion.ok_or_else(|| missing("motion"))? },
            };
            cli::cmd_family(&cli::FamilyArgs { spec, op, out, grid })
        }
        Command::Mesh { spec, grid, project, out } => {
            cli::cmd_mesh(&cli::MeshArgs { spec, grid, project, out })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            for line in &report.stderr {
                eprintln!("{line}");
            }
            for line in &report.stdout {
                println!("{line}");
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
