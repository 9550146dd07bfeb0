//! Command-line scenarios for the `fockfield` simulator.
//!
//! Every scenario reads its parameters from flags, a config file (see
//! [`config`]) or built-in defaults, writes CSV artifacts plus a
//! `<scenario>.meta` sidecar into the output directory, and exits with 0 on
//! success, 2 on a validation error and 1 when a computed invariant fails.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod error;
pub mod output;
pub mod scenario;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

pub use error::RunError;

use config::ConfigFile;
use output::OutputDir;

/// Names accepted by `run --scenario` and the `scenario` config key.
pub const SCENARIOS: [&str; 6] = ["fock-check", "wick", "causality", "wavepacket", "entangle", "measure"];

#[derive(Debug, Parser)]
#[command(name = "fockfield", version, about = "Second-quantization scenarios on small lattices")]
pub struct Cli {
    /// Scenario config file: `key = value` lines with `[scenario]` sections.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Artifact directory [default: $FOCKFIELD_OUT_DIR, else ./fockfield-out].
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ladder (anti)commutation relations on random basis states.
    FockCheck(FockCheckArgs),
    /// Normal-order a ladder-operator expression.
    Wick(WickArgs),
    /// Sweep the free-field commutator over spacelike separations.
    Causality(CausalityArgs),
    /// Evolve a Gaussian packet and record X, P, C, H moments.
    Wavepacket(WavepacketArgs),
    /// Entanglement of a two-term bipartite state.
    Entangle(EntangleArgs),
    /// Premeasurement, decoherence and seeded outcome sampling.
    Measure(MeasureArgs),
    /// Run the scenario named in a config file.
    Run(RunArgs),
    /// Reduced-scale invariant suite, one line per equation.
    Verify(VerifyArgs),
}

#[derive(Debug, Default, Args)]
pub struct FockCheckArgs {
    /// bose or fermi [default: bose]
    #[arg(long)]
    pub statistics: Option<String>,
    /// Number of modes [default: 4]
    #[arg(long)]
    pub modes: Option<String>,
    /// Boson truncation [default: 6]
    #[arg(long)]
    pub nmax: Option<String>,
    /// Random basis pairs [default: 200]
    #[arg(long)]
    pub samples: Option<String>,
    /// Generator seed [default: 42]
    #[arg(long)]
    pub seed: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct WickArgs {
    /// Expression such as "bose: a(x1) a+(x2)"
    #[arg(long)]
    pub expr: Option<String>,
    /// File with one expression per line
    #[arg(long)]
    pub file: Option<String>,
    /// Print the vacuum expectation instead of the normal form
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub vacuum: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct CausalityArgs {
    /// Lattice sites [default: 512]
    #[arg(long = "M")]
    pub m: Option<String>,
    /// Lattice spacing [default: 0.25]
    #[arg(long)]
    pub dx: Option<String>,
    /// Field mass [default: 1]
    #[arg(long)]
    pub mass: Option<String>,
    /// lattice or continuum dispersion [default: lattice]
    #[arg(long)]
    pub dispersion: Option<String>,
    /// Largest |dt| and |dx| of the spacelike grid [default: M*dx/4]
    #[arg(long)]
    pub extent: Option<String>,
    /// Explicit time separations (comma list); requires --separations
    #[arg(long)]
    pub dts: Option<String>,
    /// Explicit spatial separations (comma list); requires --dts
    #[arg(long)]
    pub separations: Option<String>,
    /// Spot-check time separation [default: 0.5]
    #[arg(long)]
    pub spot_dt: Option<String>,
    /// Spot-check spatial separation [default: 3.0]
    #[arg(long)]
    pub spot_dx: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct WavepacketArgs {
    /// Lattice sites [default: 256]
    #[arg(long = "M")]
    pub m: Option<String>,
    /// Lattice spacing [default: 1]
    #[arg(long)]
    pub dx: Option<String>,
    /// Particle mass [default: 1]
    #[arg(long)]
    pub mass: Option<String>,
    /// Initial width [default: 8]
    #[arg(long)]
    pub sigma0: Option<String>,
    /// Quadratic phase; positive values start with negative correlation [default: 1]
    #[arg(long)]
    pub chirp: Option<String>,
    /// Mean momentum [default: 0]
    #[arg(long)]
    pub p0: Option<String>,
    /// Initial centre [default: 0]
    #[arg(long)]
    pub x0: Option<String>,
    /// Sample times, start:stop:step or a comma list [default: 0:5:0.01]
    #[arg(long)]
    pub times: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct EntangleArgs {
    /// Dimension of each factor [default: 2]
    #[arg(long)]
    pub dim: Option<String>,
    /// Overlap <phi1, phi2> in [0, 1] [default: 0]
    #[arg(long)]
    pub phi_overlap: Option<String>,
    /// Overlap <psi1, psi2> in [0, 1] [default: 0]
    #[arg(long)]
    pub psi_overlap: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct MeasureArgs {
    /// Expansion coefficients f(lambda), comma list of complex numbers such as 0.6,0.8i
    #[arg(long)]
    pub amplitudes: Option<String>,
    /// Eigenvalues, comma list [default: 1,2,...]
    #[arg(long)]
    pub eigenvalues: Option<String>,
    /// Apparatus energy scale [default: 1]
    #[arg(long)]
    pub energy: Option<String>,
    /// Number of sampled outcomes [default: 100000]
    #[arg(long)]
    pub samples: Option<String>,
    /// Generator seed [default: 42]
    #[arg(long)]
    pub seed: Option<String>,
    /// Goodness-of-fit significance [default: 0.001]
    #[arg(long)]
    pub significance: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// Scenario to run [default: the config file's `scenario` key]
    #[arg(long)]
    pub scenario: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    /// Run a single check: eq3, eq8, eq12, eq13, eq14 or comment6
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

/// What a command printed, which files it wrote, and the first invariant
/// that failed, if any. Artifacts are written even when `violation` is set.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub artifacts: Vec<PathBuf>,
    pub violation: Option<String>,
}

fn unknown_scenario(name: &str) -> RunError {
    RunError::Validation(format!("unknown scenario '{name}'; valid scenarios: {}", SCENARIOS.join(", ")))
}

pub fn execute(cli: &Cli) -> Result<Outcome, RunError> {
    let file = cli.config.as_deref().map(ConfigFile::load).transpose()?;
    let out = OutputDir::resolve(cli.out_dir.as_deref(), file.as_ref().and_then(|f| f.global("out_dir")));
    let file = file.as_ref();
    match &cli.command {
        Command::FockCheck(a) => scenario::fock_check(a, file, &out),
        Command::Wick(a) => scenario::wick(a, file, &out),
        Command::Causality(a) => scenario::causality(a, file, &out),
        Command::Wavepacket(a) => scenario::wavepacket(a, file, &out),
        Command::Entangle(a) => scenario::entangle(a, file, &out),
        Command::Measure(a) => scenario::measure(a, file, &out),
        Command::Run(a) => {
            let file = file.ok_or_else(|| RunError::Validation("run needs --config".into()))?;
            let name = a
                .scenario
                .as_deref()
                .or_else(|| file.global("scenario"))
                .ok_or_else(|| RunError::Validation("no scenario given by --scenario or the config file".into()))?;
            match name {
                "fock-check" => scenario::fock_check(&FockCheckArgs::default(), Some(file), &out),
                "wick" => scenario::wick(&WickArgs::default(), Some(file), &out),
                "causality" => scenario::causality(&CausalityArgs::default(), Some(file), &out),
                "wavepacket" => scenario::wavepacket(&WavepacketArgs::default(), Some(file), &out),
                "entangle" => scenario::entangle(&EntangleArgs::default(), Some(file), &out),
                "measure" => scenario::measure(&MeasureArgs::default(), Some(file), &out),
                other => Err(unknown_scenario(other)),
            }
        }
        Command::Verify(a) => scenario::verify(a),
    }
}

/// Parse arguments, run, print, and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    0
                }
                ErrorKind::InvalidSubcommand => {
                    let name =
                        e.get(clap::error::ContextKind::InvalidSubcommand).map(|v| v.to_string()).unwrap_or_default();
                    eprintln!("error: {}", unknown_scenario(&name));
                    2
                }
                _ => {
                    let _ = e.print();
                    2
                }
            };
        }
    };
    match execute(&cli) {
        Ok(o) => {
            print!("{}", o.stdout);
            for path in &o.artifacts {
                eprintln!("wrote {}", path.display());
            }
            match o.violation {
                Some(msg) => {
                    let e = RunError::Invariant(msg);
                    eprintln!("error: {e}");
                    e.exit_code()
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
