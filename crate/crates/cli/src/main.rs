use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qcosym_cli::{execute, load, Command};

/// Mechanics on q-cosymplectic manifolds: structure checks, brackets and
/// fast–slow oscillator runs.
#[derive(Debug, Parser)]
#[command(name = "qcosym", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG line plots.
    #[arg(long)]
    svg: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = load(&args.config, Some(args.command), args.out, args.svg).and_then(|cfg| {
        execute(
            &cfg,
            &mut std::io::stdout().lock(),
            &mut std::io::stderr().lock(),
        )
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
