//! `wallsense`: coverage maps, sweeps, placement search and CSI processing
//! from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use wallsense_core::scenario::ModelMode;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: malformed or inconsistent scenario, trace or flags.
    #[error("{0}")]
    Validation(String),
    /// Everything else: unreadable or unwritable files, server failures.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Validation(_) => 2,
            Self::Runtime(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wallsense",
    version,
    about = "Wall-assisted Wi-Fi sensing coverage planner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Simplified,
    Full,
}

impl From<Mode> for ModelMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Simplified => ModelMode::Simplified,
            Mode::Full => ModelMode::Full,
        }
    }
}

/// Scenario source and overrides. Without `--scenario` the built-in
/// canonical scenario is used.
#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Minimum SSNR for reliable sensing, dB.
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub threshold_db: Option<f64>,
    /// Grid cell size, meters.
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub resolution: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Multiplier applied to the simplified model.
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub scale_factor: Option<f64>,
    /// Radius around each device left out of the field, meters.
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub exclusion_radius_m: Option<f64>,
    /// Transmit power, watts.
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub ptx_w: Option<f64>,
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub gain_tx: Option<f64>,
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub gain_rx: Option<f64>,
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub wavelength_m: Option<f64>,
    /// Target radar cross section, square meters.
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub rcs_m2: Option<f64>,
    /// Wall amplitude reflection coefficient; 0 removes the wall echo.
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub r_wall: Option<f64>,
    /// Fraction of line-of-sight power that acts as interference.
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Noise floor, watts.
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub floor_w: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepWhat {
    /// Move both devices relative to the reflective wall.
    Wall,
    /// Move the receiver relative to the transmitter.
    Txrx,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the SSNR field. Writes `x,y,ssnr_db` CSV, or a 16-bit PGM
    /// with a `.range.txt` sidecar when the output ends in `.pgm`.
    Field {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Extract the coverage boundary as `contour,vertex,x,y` CSV.
    Boundary {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Moving-average window in vertices (odd); 1 keeps the raw outline.
        #[arg(long, default_value_t = wallsense_core::coverage::contour::DEFAULT_SMOOTHING_WINDOW)]
        window: usize,
    },
    /// Coverage areas over a list of distances, as CSV.
    Sweep {
        what: SweepWhat,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Comma-separated distances in meters.
        #[arg(long, value_delimiter = ',', value_name = "F,...")]
        distances: Option<Vec<f64>>,
        /// Place the transmitter this far from the wall before sweeping.
        #[arg(long, value_name = "F", allow_negative_numbers = true)]
        wall_distance: Option<f64>,
        /// Set the device separation before sweeping.
        #[arg(long, value_name = "F", allow_negative_numbers = true)]
        txrx_distance: Option<f64>,
    },
    /// Search candidate placements; prints the best placement and its
    /// areas as JSON.
    Optimize {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        leakage_penalty: f64,
        /// Minimum device distance from every wall, meters.
        #[arg(long, default_value_t = 0.1)]
        min_wall_clearance: f64,
        /// Candidate lattice spacing, meters.
        #[arg(long, default_value_t = wallsense_core::placement::DEFAULT_CANDIDATE_STEP_M)]
        step: f64,
        /// Grid cell size used while scoring candidates, meters.
        #[arg(long)]
        eval_resolution: Option<f64>,
    },
    /// Estimate breathing rate from CSI amplitude traces
    /// (`time_s,sc_0,...` CSV); prints JSON.
    Respire {
        /// Trace files.
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
        /// Analysis window from the start of each trace, seconds.
        #[arg(long, default_value_t = 60.0)]
        window_s: f64,
        /// Subcarrier index; the highest-variance one when absent.
        #[arg(long)]
        subcarrier: Option<usize>,
        /// Reference rate for the mean absolute error.
        #[arg(long)]
        truth_bpm: Option<f64>,
    },
    /// Fit the model scale factor from a `measured_db,simulated_db` CSV;
    /// prints JSON.
    SsnrFit {
        /// Paired SSNR values in dB.
        input: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the HTTP/JSON service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: std::net::SocketAddr,
        /// Directory holding named scenarios.
        #[arg(long, default_value = "scenarios")]
        store: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Field { scenario, out } => commands::field(&scenario, &out),
        Command::Boundary {
            scenario,
            out,
            window,
        } => commands::boundary(&scenario, &out, window),
        Command::Sweep {
            what,
            scenario,
            out,
            distances,
            wall_distance,
            txrx_distance,
        } => commands::sweep(
            what,
            &scenario,
            &out,
            distances,
            wall_distance,
            txrx_distance,
        ),
        Command::Optimize {
            scenario,
            out,
            leakage_penalty,
            min_wall_clearance,
            step,
            eval_resolution,
        } => {
            let objective = wallsense_core::placement::PlacementObjective {
                leakage_penalty,
                min_wall_clearance,
                step,
                eval_resolution,
            };
            commands::optimize(&scenario, &out, &objective)
        }
        Command::Respire {
            traces,
            out,
            window_s,
            subcarrier,
            truth_bpm,
        } => commands::respire(&traces, &out, window_s, subcarrier, truth_bpm),
        Command::SsnrFit { input, out } => commands::ssnr_fit(&input, &out),
        Command::Serve { addr, store } => commands::serve(addr, store),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
