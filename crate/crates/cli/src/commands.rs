use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wallsense_core::channel::{db_to_linear, linear_to_db};
use wallsense_core::coverage::export::{
    save_field_pgm, write_contours_csv, write_field_csv, PgmRange,
};
use wallsense_core::coverage::{evaluate_field, extract_boundary, smooth_boundary, threshold_mask};
use wallsense_core::csiproc::{
    fit_model_scale, mean_absolute_error, respiration_rate, CsiError, CsiTrace, Rate,
    RespirationConfig, SubcarrierSelection,
};
use wallsense_core::placement::{
    optimize_placement, sweep_txrx_distance, sweep_wall_distance, PlacementObjective,
};
use wallsense_core::scenario::{load_scenario, Scenario, ScenarioError};
use wallsense_service::OptimizePayload;

use crate::{CliError, OutArgs, ScenarioArgs, SweepWhat};

const DEFAULT_WALL_DISTANCES: [f64; 6] = [0.1, 0.5, 1.0, 1.5, 2.0, 2.5];
const DEFAULT_TXRX_DISTANCES: [f64; 6] = [0.1, 1.0, 2.0, 3.0, 4.0, 5.0];

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        if e.is_validation() {
            Self::Validation(e.to_string())
        } else {
            Self::Runtime(e.to_string())
        }
    }
}

impl From<CsiError> for CliError {
    fn from(e: CsiError) -> Self {
        match e {
            CsiError::Io(_) => Self::Runtime(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

fn runtime(context: &str) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Runtime(format!("{context}: {e}"))
}

/// Loads the scenario (or the canonical one), applies flag overrides and
/// validates the result.
pub fn build_scenario(args: &ScenarioArgs) -> Result<Scenario, CliError> {
    let mut s = match &args.scenario {
        Some(path) => load_scenario(path)?,
        None => Scenario::canonical(),
    };
    if let Some(v) = args.threshold_db {
        s.threshold_db = v;
    }
    if let Some(v) = args.resolution {
        s.grid = s.grid.with_resolution(v);
    }
    if let Some(v) = args.mode {
        s.model = v.into();
    }
    if let Some(v) = args.scale_factor {
        s.scale_factor = v;
    }
    if let Some(v) = args.exclusion_radius_m {
        s.exclusion_radius_m = v;
    }
    let rf = &mut s.rf;
    for (flag, field) in [
        (args.ptx_w, &mut rf.ptx_w),
        (args.gain_tx, &mut rf.gain_tx),
        (args.gain_rx, &mut rf.gain_rx),
        (args.wavelength_m, &mut rf.wavelength_m),
        (args.rcs_m2, &mut rf.rcs_m2),
        (args.r_wall, &mut rf.r_wall),
        (args.gamma, &mut rf.gamma),
        (args.floor_w, &mut rf.floor_w),
    ] {
        if let Some(v) = flag {
            *field = v;
        }
    }
    s.validate()?;
    Ok(s)
}

fn write_output(
    out: &OutArgs,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match &out.out {
        Some(path) => {
            let file = File::create(path).map_err(runtime(&path.display().to_string()))?;
            let mut w = BufWriter::new(file);
            f(&mut w)
                .and_then(|_| w.flush())
                .map_err(runtime(&path.display().to_string()))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w).and_then(|_| w.flush()).map_err(runtime("stdout"))
        }
    }
}

fn csv_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

fn write_json<T: Serialize>(out: &OutArgs, value: &T) -> Result<(), CliError> {
    write_output(out, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

pub fn field(args: &ScenarioArgs, out: &OutArgs) -> Result<(), CliError> {
    let s = build_scenario(args)?;
    let field = evaluate_field(&s, &s.grid);
    if let Some(path) = out
        .out
        .as_deref()
        .filter(|p| p.extension().is_some_and(|e| e == "pgm"))
    {
        return save_field_pgm(&field, PgmRange::for_field(&field), path)
            .map_err(runtime(&path.display().to_string()));
    }
    write_output(out, |w| write_field_csv(&field, w).map_err(csv_io))
}

pub fn boundary(args: &ScenarioArgs, out: &OutArgs, window: usize) -> Result<(), CliError> {
    let s = build_scenario(args)?;
    let field = evaluate_field(&s, &s.grid);
    let raw = extract_boundary(&threshold_mask(&field, s.threshold_db), &s.grid);
    let contours = raw
        .iter()
        .map(|c| smooth_boundary(c, window))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Validation(format!("--window: {e}")))?;
    write_output(out, |w| write_contours_csv(&contours, w).map_err(csv_io))
}

pub fn sweep(
    what: SweepWhat,
    args: &ScenarioArgs,
    out: &OutArgs,
    distances: Option<Vec<f64>>,
    wall_distance: Option<f64>,
    txrx_distance: Option<f64>,
) -> Result<(), CliError> {
    let mut s = build_scenario(args)?;
    if let Some(d) = wall_distance {
        s = s.with_wall_distance(d);
    }
    if let Some(d) = txrx_distance {
        s = s.with_txrx_distance(d);
    }
    s.validate()?;
    let result = match what {
        SweepWhat::Wall => {
            sweep_wall_distance(&s, distances.as_deref().unwrap_or(&DEFAULT_WALL_DISTANCES))
        }
        SweepWhat::Txrx => {
            sweep_txrx_distance(&s, distances.as_deref().unwrap_or(&DEFAULT_TXRX_DISTANCES))
        }
    }
    .map_err(|e| CliError::Validation(e.to_string()))?;
    for (d, reason) in &result.skipped {
        eprintln!("skipped distance {d} m: {reason}");
    }
    write_output(out, |w| result.write_csv(w).map_err(csv_io))
}

pub fn optimize(
    args: &ScenarioArgs,
    out: &OutArgs,
    objective: &PlacementObjective,
) -> Result<(), CliError> {
    let s = build_scenario(args)?;
    let report_every = |done: usize, total: usize| {
        if done.is_multiple_of(1000) || done == total {
            log::info!("evaluated {done} of {total} placements");
        }
    };
    let result = optimize_placement(&s, objective, Some(&report_every))
        .map_err(|e| CliError::Validation(e.to_string()))?;
    write_json(out, &OptimizePayload::from(&result))
}

#[derive(Debug, Serialize)]
struct TraceEstimate {
    trace: PathBuf,
    subcarrier: usize,
    rate: Rate,
    breaths: usize,
}

#[derive(Debug, Serialize)]
struct RespireOutput {
    estimates: Vec<TraceEstimate>,
    /// Over traces with a defined rate; absent without a reference rate.
    mae_bpm: Option<f64>,
}

pub fn respire(
    traces: &[PathBuf],
    out: &OutArgs,
    window_s: f64,
    subcarrier: Option<usize>,
    truth_bpm: Option<f64>,
) -> Result<(), CliError> {
    let selection = subcarrier.map_or(
        SubcarrierSelection::HighestVariance,
        SubcarrierSelection::Index,
    );
    let config = RespirationConfig::default();
    let mut estimates = Vec::new();
    for path in traces {
        let trace = CsiTrace::from_csv_path(path).map_err(|e| with_path(path, e))?;
        let est = respiration_rate(&trace, selection, window_s, &config)
            .map_err(|e| with_path(path, e))?;
        estimates.push(TraceEstimate {
            trace: path.clone(),
            subcarrier: est.subcarrier,
            rate: est.rate,
            breaths: est.peak_indices.len(),
        });
    }
    let mae_bpm = match truth_bpm {
        Some(truth) => {
            let defined: Vec<f64> = estimates.iter().filter_map(|e| e.rate.bpm()).collect();
            mean_absolute_error(&defined, &vec![truth; defined.len()]).ok()
        }
        None => None,
    };
    write_json(out, &RespireOutput { estimates, mae_bpm })
}

fn with_path(path: &Path, e: CsiError) -> CliError {
    match CliError::from(e) {
        CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
        CliError::Runtime(m) => CliError::Runtime(format!("{}: {m}", path.display())),
    }
}

#[derive(Debug, Deserialize)]
struct FitRow {
    measured_db: f64,
    simulated_db: f64,
}

#[derive(Debug, Serialize)]
struct FitOutput {
    pairs: usize,
    scale: f64,
    scale_db: f64,
    rms_residual: f64,
    /// Mean absolute difference in dB after scaling the simulation.
    mae_db: f64,
}

pub fn ssnr_fit(input: &Path, out: &OutArgs) -> Result<(), CliError> {
    let file = File::open(input).map_err(runtime(&input.display().to_string()))?;
    let rows: Vec<FitRow> = csv::Reader::from_reader(file)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Validation(format!("{}: {e}", input.display())))?;
    let measured: Vec<f64> = rows.iter().map(|r| db_to_linear(r.measured_db)).collect();
    let simulated: Vec<f64> = rows.iter().map(|r| db_to_linear(r.simulated_db)).collect();
    let fit = fit_model_scale(&measured, &simulated)?;
    let scale_db = linear_to_db(fit.scale);
    let scaled: Vec<f64> = rows.iter().map(|r| r.simulated_db + scale_db).collect();
    let measured_db: Vec<f64> = rows.iter().map(|r| r.measured_db).collect();
    let output = FitOutput {
        pairs: rows.len(),
        scale: fit.scale,
        scale_db,
        rms_residual: fit.rms_residual,
        mae_db: mean_absolute_error(&scaled, &measured_db)?,
    };
    write_json(out, &output)
}

pub fn serve(addr: SocketAddr, store: PathBuf) -> Result<(), CliError> {
    let runtime =
        tokio::runtime::Runtime::new().map_err(|e| CliError::Runtime(format!("runtime: {e}")))?;
    runtime
        .block_on(wallsense_service::serve(addr, store))
        .map_err(|e| CliError::Runtime(format!("server: {e}")))
}
