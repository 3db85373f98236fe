use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dirac_sea_cli::{cmd_ftable, cmd_oracle, cmd_shift, cmd_vacuum, CliError, CliResult, RunConfig};

#[derive(Parser)]
#[command(name = "dirac-sea", version, about = "Dirac-sea vacuum energy shifts in a periodic box")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory receiving `<command>.csv` and `<command>.json`.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Second-order shifts of single modes against the closed form.
    Shift,
    /// Hole-theory decomposition and field-theory vacuum shifts per cutoff.
    Vacuum {
        /// Also report the 1/N² extrapolation of the total from the two largest cutoffs.
        #[arg(long)]
        extrapolate: bool,
    },
    /// Direct time evolution against perturbation theory.
    Oracle,
    /// Dump the first-order amplitude table.
    Ftable,
}

fn run(cli: &Cli) -> CliResult<()> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    let config = RunConfig::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let potential = config.resolve_potential(base)?;
    let report = match cli.command {
        Command::Shift => cmd_shift(&config, &potential)?,
        Command::Vacuum { extrapolate } => {
            let report = cmd_vacuum(&config, &potential, extrapolate)?;
            if let Some(e) = report.summary.get("extrapolated_total").and_then(|v| v.as_f64()) {
                println!("extrapolated total: {e}");
            }
            report
        }
        Command::Oracle => cmd_oracle(&config, &potential)?,
        Command::Ftable => cmd_ftable(&config, &potential)?,
    };
    report.write(&cli.out)?;
    eprintln!(
        "wrote {} rows to {}",
        report.rows.len(),
        cli.out.join(format!("{}.csv", report.name)).display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dirac-sea: {e}");
            e.exit_code()
        }
    }
}
