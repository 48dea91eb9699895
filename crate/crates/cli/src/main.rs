use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirac_spectra_cli::config::RunConfig;
use dirac_spectra_cli::{commands, CliError};

#[derive(Parser)]
#[command(name = "dirac-spectra", version, about = "Spectra of 2x2 Dirac-type boundary value problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues in a strip, paired with the unperturbed ones.
    Spectrum(Common),
    /// Strict-regularity verdict for the boundary conditions.
    Classify(Common),
    /// Transformation-operator kernels and their residuals.
    Kernel(Common),
    /// Biorthogonal root functions and Gram diagnostics.
    Basis(Common),
    /// Timoshenko beam reduction and modal spectrum.
    Timoshenko(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    grid_m: Option<usize>,
    #[arg(long)]
    grid_n: Option<usize>,
    /// Real-part window as RE_MIN:RE_MAX.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long)]
    strip: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(&self.config)?;
        cfg.grid_m = self.grid_m.or(cfg.grid_m);
        cfg.grid_n = self.grid_n.or(cfg.grid_n);
        cfg.strip = self.strip.or(cfg.strip);
        if let Some(w) = &self.window {
            let bad = || CliError::Config(format!("window {w:?} is not RE_MIN:RE_MAX"));
            let (lo, hi) = w.split_once(':').ok_or_else(bad)?;
            cfg.window = Some([lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?]);
        }
        Ok(cfg)
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("DIRAC_SPECTRA_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Config(format!("DIRAC_SPECTRA_THREADS={v:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Spectrum(c) => commands::spectrum(&c.load()?, &c.out),
        Command::Classify(c) => {
            print!("{}", commands::classify(&c.load()?, &c.out)?);
            Ok(())
        }
        Command::Kernel(c) => commands::kernel(&c.load()?, &c.out),
        Command::Basis(c) => commands::basis(&c.load()?, &c.out),
        Command::Timoshenko(c) => commands::timoshenko(&c.load()?, &c.out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
