//! `qgeom`: batch runs of the constrained-quantization workbench.
//!
//! Exit codes: 0 success, 1 bad input, 2 a computation failed its
//! integrity check, 3 a physics verdict failed.

mod commands;
mod config;
mod error;
mod output;
mod sample;

use std::path::Path;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use commands::Outcome;
use config::{
    BracketArgs, ConvertArgs, Format, Globals, PotentialArgs, ProjectArgs, RunConfig, SpectrumArgs,
    ThinLayerArgs,
};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qgeom",
    version,
    about = "Geometric potentials and thin-layer spectra of constrained quantum motion"
)]
struct Cli {
    #[command(flatten)]
    globals: Globals,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantum potentials of a surface at points
    Potential(PotentialArgs),
    /// Dirac bracket tables at phase-space points
    Brackets(BracketArgs),
    /// Sphere, effective-curve, annulus or tube spectra
    Spectrum(SpectrumArgs),
    /// Thin-layer limit sweep against the effective theory
    Thinlayer(ThinLayerArgs),
    /// Residual of the abelian conversion ansatz
    ConvertCheck(ConvertArgs),
    /// Closest points on a surface
    Project(ProjectArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Potential(_) => "potential",
            Command::Brackets(_) => "brackets",
            Command::Spectrum(_) => "spectrum",
            Command::Thinlayer(_) => "thinlayer",
            Command::ConvertCheck(_) => "convert-check",
            Command::Project(_) => "project",
        }
    }
}

fn execute(cli: &Cli) -> Result<(RunConfig, Outcome), CliError> {
    let name = cli.command.name();
    let g = &cli.globals;
    macro_rules! go {
        ($args:expr, $f:path) => {{
            let (run, args) = config::resolve(name, g, $args)?;
            let out = $f(&run, &args)?;
            Ok((run, out))
        }};
    }
    match &cli.command {
        Command::Potential(a) => go!(a, commands::potential),
        Command::Brackets(a) => go!(a, commands::brackets),
        Command::Spectrum(a) => go!(a, commands::spectrum),
        Command::Thinlayer(a) => go!(a, commands::thinlayer),
        Command::ConvertCheck(a) => go!(a, commands::convert_check),
        Command::Project(a) => go!(a, commands::project),
    }
}

fn with_suffix(path: &Path, suffix: &str) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

fn write(run: &RunConfig, out: &Outcome) -> Result<(), CliError> {
    let bytes = match run.format {
        Format::Csv => out.table.to_csv()?,
        Format::Json => out.table.to_json(&run.command)?,
    };
    let Some(path) = &run.output else {
        use std::io::Write;
        return std::io::stdout().write_all(&bytes).map_err(CliError::io);
    };
    std::fs::write(path, &bytes).map_err(CliError::io)?;

    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let manifest = json!({
        "tool": "qgeom",
        "version": env!("CARGO_PKG_VERSION"),
        "config": run,
        "output": {
            "path": path.file_name().map(|f| f.to_string_lossy().into_owned()),
            "format": run.format,
            "bytes": bytes.len(),
            "sha256": hex::encode(Sha256::digest(&bytes)),
        },
        "summary": out.table.summary,
        "exit_code": out.failure.as_ref().map_or(0, CliError::exit_code),
        "timestamp_unix": timestamp,
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(CliError::io)? + "\n";
    std::fs::write(with_suffix(path, ".manifest.json"), text).map_err(CliError::io)?;

    if run.gnuplot {
        let data = path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default();
        let script = out.table.gnuplot(&data, out.plot.0, out.plot.1);
        std::fs::write(with_suffix(path, ".gp"), script).map_err(CliError::io)?;
    }
    Ok(())
}

fn report(cli: &Cli, e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    if let CliError::Missing(_) = e {
        let mut cmd = Cli::command();
        cmd.build();
        if let Some(sub) = cmd.find_subcommand_mut(cli.command.name()) {
            eprintln!("\n{}", sub.render_usage());
        }
    }
    ExitCode::from(e.exit_code() as u8)
}

fn configure_threads() {
    if let Some(n) = std::env::var("QGEOM_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    let (run, out) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => return report(&cli, &e),
    };
    if let Err(e) = write(&run, &out) {
        return report(&cli, &e);
    }
    match &out.failure {
        Some(e) => report(&cli, e),
        None => ExitCode::SUCCESS,
    }
}
