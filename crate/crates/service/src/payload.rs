//! Request and response bodies, and the pure functions that turn one into
//! the other.

use axum::http::StatusCode;
use serde::{Deserialize, Serialize};
use wallsense_core::coverage::{CoverageReport, GridSpec, Leakage, ScalarField};
use wallsense_core::geometry::Point;
use wallsense_core::placement::{
    analyze, candidate_points, sweep_txrx_distance, sweep_wall_distance, OptimizationResult,
    PlacementObjective, SweepKind, SweepResult,
};
use wallsense_core::scenario::{ModelMode, Scenario, ScenarioDoc};

use crate::error::ApiError;

/// Largest grid a single request may evaluate.
pub const MAX_CELLS: usize = 1_000_000;

fn check_cells(grid: &GridSpec, field_path: &str) -> Result<(), ApiError> {
    let cells = grid.cell_count_estimate();
    if cells > MAX_CELLS as f64 {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "grid_too_large",
            format!("grid has {cells} cells, the limit is {MAX_CELLS}"),
        )
        .with_field(field_path));
    }
    Ok(())
}

fn scenario_from(doc: &ScenarioDoc) -> Result<Scenario, ApiError> {
    let scenario = Scenario::from_doc(doc).map_err(|e| ApiError::from(e).nested("scenario"))?;
    check_cells(&scenario.grid, "scenario.grid")?;
    Ok(scenario)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRequest {
    pub scenario: ScenarioDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPayload {
    pub origin_m: Point,
    pub width_m: f64,
    pub height_m: f64,
    pub resolution_m: f64,
    pub cols: usize,
    pub rows: usize,
}

impl From<&GridSpec> for GridPayload {
    fn from(g: &GridSpec) -> Self {
        Self {
            origin_m: g.origin,
            width_m: g.width,
            height_m: g.height,
            resolution_m: g.resolution,
            cols: g.cols(),
            rows: g.rows(),
        }
    }
}

/// Cell values are row-major starting at the grid origin (row 0 is the
/// lowest y). `null` marks cells inside a device exclusion disk and cells
/// with no dynamic power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldPayload {
    pub grid: GridPayload,
    pub model: ModelMode,
    pub threshold_db: f64,
    pub values_db: Vec<Option<f64>>,
    /// Smoothed coverage outlines, covered side on the left.
    pub contours: Vec<Vec<Point>>,
    pub indoor_area_m2: f64,
    pub leakage: Leakage,
    pub covered_area_m2: f64,
    pub component_count: usize,
}

impl FieldPayload {
    pub fn new(scenario: &Scenario, field: &ScalarField, report: &CoverageReport) -> Self {
        Self {
            grid: GridPayload::from(&field.grid),
            model: scenario.model,
            threshold_db: scenario.threshold_db,
            values_db: field
                .values
                .iter()
                .map(|v| v.is_finite().then_some(*v))
                .collect(),
            contours: report.contours.iter().map(|c| c.points.clone()).collect(),
            indoor_area_m2: report.indoor_area,
            leakage: report.leakage,
            covered_area_m2: report.covered_area,
            component_count: report.component_count,
        }
    }
}

pub fn compute_field(req: &FieldRequest) -> Result<FieldPayload, ApiError> {
    let scenario = scenario_from(&req.scenario)?;
    let (field, report) = analyze(&scenario);
    Ok(FieldPayload::new(&scenario, &field, &report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRequest {
    pub scenario: ScenarioDoc,
    pub kind: SweepKind,
    pub distances_m: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPointPayload {
    pub distance_m: f64,
    pub tx_m: Point,
    pub rx_m: Point,
    pub indoor_area_m2: f64,
    pub leakage: Leakage,
    pub covered_area_m2: f64,
    pub component_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedDistance {
    pub distance_m: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPayload {
    pub kind: SweepKind,
    pub points: Vec<SweepPointPayload>,
    pub skipped: Vec<SkippedDistance>,
}

impl From<&SweepResult> for SweepPayload {
    fn from(r: &SweepResult) -> Self {
        Self {
            kind: r.kind,
            points: r
                .points
                .iter()
                .map(|p| SweepPointPayload {
                    distance_m: p.distance,
                    tx_m: p.placement.tx,
                    rx_m: p.placement.rx,
                    indoor_area_m2: p.report.indoor_area,
                    leakage: p.report.leakage,
                    covered_area_m2: p.report.covered_area,
                    component_count: p.report.component_count,
                })
                .collect(),
            skipped: r
                .skipped
                .iter()
                .map(|(d, reason)| SkippedDistance {
                    distance_m: *d,
                    reason: reason.clone(),
                })
                .collect(),
        }
    }
}

pub fn compute_sweep(req: &SweepRequest) -> Result<SweepPayload, ApiError> {
    let scenario = scenario_from(&req.scenario)?;
    let result = match req.kind {
        SweepKind::Wall => sweep_wall_distance(&scenario, &req.distances_m)?,
        SweepKind::Txrx => sweep_txrx_distance(&scenario, &req.distances_m)?,
    };
    Ok(SweepPayload::from(&result))
}

/// Search settings with unit-suffixed keys; omitted keys take the
/// library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObjectiveDoc {
    pub leakage_penalty: f64,
    pub min_wall_clearance_m: f64,
    pub step_m: f64,
    pub eval_resolution_m: Option<f64>,
}

impl Default for ObjectiveDoc {
    fn default() -> Self {
        Self::from(&PlacementObjective::default())
    }
}

impl From<&PlacementObjective> for ObjectiveDoc {
    fn from(o: &PlacementObjective) -> Self {
        Self {
            leakage_penalty: o.leakage_penalty,
            min_wall_clearance_m: o.min_wall_clearance,
            step_m: o.step,
            eval_resolution_m: o.eval_resolution,
        }
    }
}

impl From<&ObjectiveDoc> for PlacementObjective {
    fn from(o: &ObjectiveDoc) -> Self {
        Self {
            leakage_penalty: o.leakage_penalty,
            min_wall_clearance: o.min_wall_clearance_m,
            step: o.step_m,
            eval_resolution: o.eval_resolution_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeRequest {
    pub scenario: ScenarioDoc,
    #[serde(default)]
    pub objective: ObjectiveDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizePayload {
    pub tx_m: Point,
    pub rx_m: Point,
    pub objective: f64,
    pub indoor_area_m2: f64,
    pub leakage: Leakage,
    pub covered_area_m2: f64,
    pub component_count: usize,
    pub pairs_evaluated: usize,
}

impl From<&OptimizationResult> for OptimizePayload {
    fn from(r: &OptimizationResult) -> Self {
        Self {
            tx_m: r.placement.tx,
            rx_m: r.placement.rx,
            objective: r.objective,
            indoor_area_m2: r.report.indoor_area,
            leakage: r.report.leakage,
            covered_area_m2: r.report.covered_area,
            component_count: r.report.component_count,
            pairs_evaluated: r.pairs_evaluated,
        }
    }
}

/// Validates an optimization request up front so bad input is rejected
/// before a job is created.
pub fn prepare_optimize(req: &OptimizeRequest) -> Result<(Scenario, PlacementObjective), ApiError> {
    let scenario = scenario_from(&req.scenario)?;
    let objective = PlacementObjective::from(&req.objective);
    objective.validate()?;
    let eval = objective
        .eval_resolution
        .map_or(scenario.grid, |r| scenario.grid.with_resolution(r));
    check_cells(&eval, "objective.eval_resolution_m")?;
    candidate_points(&scenario.room, &objective)?;
    Ok((scenario, objective))
}
