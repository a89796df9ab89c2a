use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use blister_cyl::config::{self, ModeSelect};
use blister_cyl::run;
use blister_cyl::Error;

/// Series solver for an axially loaded hollow cylinder.
#[derive(Parser)]
#[command(name = "solve", version, about)]
struct Cli {
    /// Run configuration file (flat key = value lines).
    #[arg(long)]
    config: PathBuf,

    /// Override the configured output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,

    /// Run the collocation-oracle verification pass.
    #[arg(long)]
    verify: bool,

    /// Override the number of Fourier modes M.
    #[arg(long)]
    modes: Option<u32>,

    /// Override the sampling grid, e.g. 200x600.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NRxNZ, got `{s}`"))?;
    let nr = a.trim().parse().map_err(|e| format!("bad NR: {e}"))?;
    let nz = b.trim().parse().map_err(|e| format!("bad NZ: {e}"))?;
    if nr < 2 || nz < 2 {
        return Err("grid must be at least 2x2".into());
    }
    Ok((nr, nz))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::Material { .. }
        | Error::Geometry { .. }
        | Error::NegativePressure(_) => 2,
        Error::VerificationFailed { .. } => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    run::init_threads();

    let mut spec = match config::parse_config(&cli.config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(dir) = cli.output_dir {
        spec.output_dir = dir;
    }
    if cli.verify {
        spec.verify = true;
    }
    if let Some(m) = cli.modes {
        if m == 0 {
            eprintln!("error: --modes must be at least 1");
            return ExitCode::from(2);
        }
        spec.modes = ModeSelect::Explicit(m);
    }
    if let Some((nr, nz)) = cli.grid {
        spec.grid_nrho = nr;
        spec.grid_nz = nz;
    }

    match run::run(&spec) {
        Ok(art) => {
            let t = &art.summary.truncation;
            println!(
                "M = {} modes, N up to {}, p = {:.4} MPa",
                t.m,
                t.modes.iter().map(|r| r.n).max().unwrap_or(0),
                art.summary.p_pa / 1e6
            );
            if let Some(checks) = &art.summary.verification {
                for c in checks {
                    println!(
                        "verify k = {}: deviation {:.3e} (tol {:.1e})",
                        c.k, c.deviation, c.tolerance
                    );
                }
            }
            println!(
                "wrote {}, {}, {}",
                art.field_csv.display(),
                art.extrema_json.display(),
                art.truncation_json.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
