use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use isoline_cli::pipeline::{run_lines, run_sweep, run_verify};
use isoline_cli::plot::render_svg;
use isoline_cli::report::format_records;
use isoline_cli::{CliError, RunConfig};

/// Signed isotropic tangent lines through a point to an immersed hypersurface
/// of the standard symplectic space.
#[derive(Parser)]
#[command(name = "isoline", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the isotropic tangent lines through p with their signs.
    Lines { config: PathBuf },
    /// Compare the signed line count with 2 ind - 2 ind_p.
    Verify { config: PathBuf },
    /// Move p along a segment and tabulate ind_p and the line count.
    Sweep {
        config: PathBuf,
        #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
        from: Vec<f64>,
        #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
        to: Vec<f64>,
        #[arg(long)]
        steps: usize,
    },
    /// Draw a plane curve, p and the tangent lines as SVG.
    Plot {
        config: PathBuf,
        /// Output path; defaults to the config's `plot` key.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Lines { config } => {
            let config = RunConfig::from_path(&config)?;
            let records = run_lines(&config)?;
            print!("{}", format_records(&records, config.format));
            Ok(0)
        }
        Command::Verify { config } => {
            let config = RunConfig::from_path(&config)?;
            let report = run_verify(&config)?;
            print!("{}", report.summary());
            print!("{}", report.block().render());
            Ok(if report.pass() { 0 } else { 3 })
        }
        Command::Sweep {
            config,
            from,
            to,
            steps,
        } => {
            let config = RunConfig::from_path(&config)?;
            let result = run_sweep(&config, &from, &to, steps)?;
            print!("{}", result.table());
            let ok = result.jump_law_holds() && result.theorem_failures().is_empty();
            if !ok {
                eprintln!("sweep violates the jump law or the theorem at some step");
            }
            Ok(if ok { 0 } else { 3 })
        }
        Command::Plot { config, out } => {
            let config = RunConfig::from_path(&config)?;
            let out = out
                .or_else(|| config.plot.clone())
                .ok_or_else(|| CliError::Config("no output path: pass --out or set `plot`".into()))?;
            let surface = config.surface()?;
            let p = config.base_point(&surface)?;
            if surface.space.n() != 1 {
                render_svg(&surface, &p, &[])?;
            }
            let records = run_lines(&config)?;
            let svg = render_svg(&surface, &p, &records)?;
            std::fs::write(&out, svg).map_err(|source| CliError::Io { path: out.clone(), source })?;
            println!("wrote {}", out.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
