//! Placement sweeps and exhaustive placement search.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverage::{
    coverage_report, evaluate_field, CoverageReport, GridSpec, Leakage, ScalarField,
};
use crate::geometry::{DevicePlacement, Point, RoomLayout};
use crate::scenario::Scenario;

pub const DEFAULT_CANDIDATE_STEP_M: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlacementError {
    #[error("distance list is empty")]
    EmptyDistances,
    #[error("distance {0} is not finite and positive")]
    BadDistance(f64),
    #[error(
        "candidate step {step} m exceeds a quarter of the room's smaller dimension ({limit} m)"
    )]
    StepTooLarge { step: f64, limit: f64 },
    #[error("invalid objective: {0}")]
    InvalidObjective(&'static str),
    #[error("no feasible placement: {candidates} candidate positions after clearance")]
    Infeasible { candidates: usize },
    #[error("leakage penalty needs a grid that extends beyond the reflective wall")]
    LeakageUnknown,
}

/// Field and report for the scenario on its own grid.
pub fn analyze(scenario: &Scenario) -> (ScalarField, CoverageReport) {
    analyze_on(scenario, &scenario.grid)
}

pub fn analyze_on(scenario: &Scenario, grid: &GridSpec) -> (ScalarField, CoverageReport) {
    let field = evaluate_field(scenario, grid);
    let report = coverage_report(&scenario.room, &field, scenario.threshold_db);
    (field, report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    /// Both devices translated along the reflective wall's normal.
    Wall,
    /// Receiver moved along the tx to rx direction.
    Txrx,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub distance: f64,
    pub placement: DevicePlacement,
    pub report: CoverageReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: SweepKind,
    /// Ordered by distance.
    pub points: Vec<SweepPoint>,
    /// Distances whose placement left the room, with the reason.
    pub skipped: Vec<(f64, String)>,
}

impl SweepResult {
    pub fn distances(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.distance).collect()
    }

    pub fn indoor_areas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.report.indoor_area).collect()
    }

    pub fn leakage(&self) -> Vec<Leakage> {
        self.points.iter().map(|p| p.report.leakage).collect()
    }

    pub fn component_counts(&self) -> Vec<usize> {
        self.points
            .iter()
            .map(|p| p.report.component_count)
            .collect()
    }

    /// `distance,indoor_area,leakage_area,components`; unknown leakage is
    /// written as `unknown`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["distance", "indoor_area", "leakage_area", "components"])?;
        for p in &self.points {
            let leakage = match p.report.leakage {
                Leakage::Known(a) => a.to_string(),
                Leakage::Unknown => "unknown".to_string(),
            };
            w.write_record([
                p.distance.to_string(),
                p.report.indoor_area.to_string(),
                leakage,
                p.report.component_count.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

fn sorted_distances(distances: &[f64]) -> Result<Vec<f64>, PlacementError> {
    if distances.is_empty() {
        return Err(PlacementError::EmptyDistances);
    }
    if let Some(&bad) = distances.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(PlacementError::BadDistance(bad));
    }
    let mut sorted = distances.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

fn sweep(
    distances: &[f64],
    kind: SweepKind,
    place: impl Fn(f64) -> Scenario,
) -> Result<SweepResult, PlacementError> {
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for d in sorted_distances(distances)? {
        let scenario = place(d);
        if let Err(e) = scenario.placement.validate(&scenario.room) {
            log::warn!("{kind:?} sweep: skipping distance {d} m: {e}");
            skipped.push((d, e.to_string()));
            continue;
        }
        let (_, report) = analyze(&scenario);
        points.push(SweepPoint {
            distance: d,
            placement: scenario.placement,
            report,
        });
    }
    Ok(SweepResult {
        kind,
        points,
        skipped,
    })
}

/// Moves both devices together so the transmitter sits at each distance
/// from the reflective wall; the tx to rx offset is unchanged.
pub fn sweep_wall_distance(
    template: &Scenario,
    distances: &[f64],
) -> Result<SweepResult, PlacementError> {
    sweep(distances, SweepKind::Wall, |d| {
        template.with_wall_distance(d)
    })
}

/// Keeps the transmitter fixed and moves the receiver along the current
/// tx to rx direction.
pub fn sweep_txrx_distance(
    template: &Scenario,
    distances: &[f64],
) -> Result<SweepResult, PlacementError> {
    sweep(distances, SweepKind::Txrx, |d| {
        template.with_txrx_distance(d)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementObjective {
    /// Weight on leakage area subtracted from indoor area.
    pub leakage_penalty: f64,
    /// Minimum distance from every wall for both devices, meters.
    pub min_wall_clearance: f64,
    /// Spacing of candidate device positions, meters.
    pub step: f64,
    /// Field resolution used while scoring; the scenario grid's own
    /// resolution when absent.
    #[serde(default)]
    pub eval_resolution: Option<f64>,
}

impl Default for PlacementObjective {
    fn default() -> Self {
        Self {
            leakage_penalty: 0.0,
            min_wall_clearance: 0.1,
            step: DEFAULT_CANDIDATE_STEP_M,
            eval_resolution: None,
        }
    }
}

impl PlacementObjective {
    pub fn validate(&self) -> Result<(), PlacementError> {
        if !(self.leakage_penalty.is_finite() && self.leakage_penalty >= 0.0) {
            return Err(PlacementError::InvalidObjective(
                "leakage_penalty must be non-negative",
            ));
        }
        if !(self.min_wall_clearance.is_finite() && self.min_wall_clearance >= 0.0) {
            return Err(PlacementError::InvalidObjective(
                "min_wall_clearance must be non-negative",
            ));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(PlacementError::InvalidObjective("step must be positive"));
        }
        if let Some(r) = self.eval_resolution {
            if !(r.is_finite() && r > 0.0) {
                return Err(PlacementError::InvalidObjective(
                    "eval_resolution must be positive",
                ));
            }
        }
        Ok(())
    }

    pub fn score(&self, report: &CoverageReport) -> Result<f64, PlacementError> {
        let leakage = match report.leakage {
            Leakage::Known(a) => a,
            Leakage::Unknown if self.leakage_penalty == 0.0 => 0.0,
            Leakage::Unknown => return Err(PlacementError::LeakageUnknown),
        };
        Ok(report.indoor_area - self.leakage_penalty * leakage)
    }
}

/// Candidate device positions: lattice points `min + (k, l) * step` of the
/// room's bounding box that lie strictly inside the room and at least the
/// clearance from every wall. Row-major in (y, x).
pub fn candidate_points(
    room: &RoomLayout,
    objective: &PlacementObjective,
) -> Result<Vec<Point>, PlacementError> {
    objective.validate()?;
    let (lo, hi) = room.bounding_box();
    let limit = (hi.x - lo.x).min(hi.y - lo.y) / 4.0;
    if objective.step > limit {
        return Err(PlacementError::StepTooLarge {
            step: objective.step,
            limit,
        });
    }
    let nx = ((hi.x - lo.x) / objective.step + 1e-9).floor() as usize;
    let ny = ((hi.y - lo.y) / objective.step + 1e-9).floor() as usize;
    let mut out = Vec::new();
    for l in 0..=ny {
        for k in 0..=nx {
            let p = Point::new(
                lo.x + k as f64 * objective.step,
                lo.y + l as f64 * objective.step,
            );
            if room.contains(p) && room.distance_to_boundary(p) >= objective.min_wall_clearance {
                out.push(p);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub placement: DevicePlacement,
    pub objective: f64,
    pub report: CoverageReport,
    pub pairs_evaluated: usize,
}

fn eval_grid(template: &Scenario, objective: &PlacementObjective) -> GridSpec {
    objective
        .eval_resolution
        .map_or(template.grid, |r| template.grid.with_resolution(r))
}

/// Objective value and report for one placement under the search settings.
pub fn evaluate_placement(
    template: &Scenario,
    placement: DevicePlacement,
    objective: &PlacementObjective,
) -> Result<(f64, CoverageReport), PlacementError> {
    let mut scenario = template.clone();
    scenario.placement = placement;
    let (_, report) = analyze_on(&scenario, &eval_grid(template, objective));
    Ok((objective.score(&report)?, report))
}

/// Tie-break order for equal objective values: smaller tx x, then tx y,
/// then rx x, then rx y.
fn placement_key(p: &DevicePlacement) -> [f64; 4] {
    [p.tx.x, p.tx.y, p.rx.x, p.rx.y]
}

fn better(a: (f64, &DevicePlacement), b: (f64, &DevicePlacement)) -> bool {
    if a.0 != b.0 {
        return a.0 > b.0;
    }
    let (ka, kb) = (placement_key(a.1), placement_key(b.1));
    ka.iter()
        .zip(&kb)
        .find(|(x, y)| x != y)
        .is_some_and(|(x, y)| x < y)
}

/// Exhaustive search over ordered pairs of distinct candidate positions,
/// maximizing indoor area minus the weighted leakage. `progress` is called
/// with (pairs done, pairs total) from worker threads.
pub fn optimize_placement(
    template: &Scenario,
    objective: &PlacementObjective,
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<OptimizationResult, PlacementError> {
    let candidates = candidate_points(&template.room, objective)?;
    let pairs: Vec<DevicePlacement> = candidates
        .iter()
        .flat_map(|&tx| {
            candidates
                .iter()
                .filter(move |&&rx| rx != tx)
                .map(move |&rx| DevicePlacement::new(tx, rx))
        })
        .collect();
    if pairs.is_empty() {
        return Err(PlacementError::Infeasible {
            candidates: candidates.len(),
        });
    }
    if objective.leakage_penalty > 0.0 {
        let grid = eval_grid(template, objective);
        if !(0..grid.len()).any(|i| template.room.wall_side_distance(grid.center_of(i)) < 0.0) {
            return Err(PlacementError::LeakageUnknown);
        }
    }
    let done = AtomicUsize::new(0);
    let total = pairs.len();
    let scores: Vec<f64> = pairs
        .par_iter()
        .map(|&p| {
            let mut scenario = template.clone();
            scenario.placement = p;
            let (_, report) = analyze_on(&scenario, &eval_grid(template, objective));
            let score = objective.score(&report);
            let n = done.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(cb) = progress {
                cb(n, total);
            }
            score
        })
        .collect::<Result<_, _>>()?;
    let mut best = 0;
    for i in 1..total {
        if better((scores[i], &pairs[i]), (scores[best], &pairs[best])) {
            best = i;
        }
    }
    let (objective_value, report) = evaluate_placement(template, pairs[best], objective)?;
    Ok(OptimizationResult {
        placement: pairs[best],
        objective: objective_value,
        report,
        pairs_evaluated: total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    Empty,
    SingleRegion,
    Split,
}

pub fn classify_topology(report: &CoverageReport) -> Topology {
    match report.component_count {
        0 => Topology::Empty,
        1 => Topology::SingleRegion,
        _ => Topology::Split,
    }
}

/// Covered area on each side of the perpendicular bisector of the two
/// devices: (closer to tx, closer to rx). Cells equidistant from both are
/// counted in neither.
pub fn device_side_areas(
    report: &CoverageReport,
    grid: &GridSpec,
    placement: &DevicePlacement,
) -> (f64, f64) {
    let (mut tx, mut rx) = (0usize, 0usize);
    for (i, &covered) in report.mask.cells.iter().enumerate() {
        if !covered {
            continue;
        }
        let c = grid.center_of(i);
        let (dt, dr) = (c.distance(placement.tx), c.distance(placement.rx));
        if dt < dr {
            tx += 1;
        } else if dr < dt {
            rx += 1;
        }
    }
    (tx as f64 * grid.cell_area(), rx as f64 * grid.cell_area())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse() -> Scenario {
        let mut s = Scenario::canonical();
        s.grid = s.grid.with_resolution(0.2);
        s
    }

    #[test]
    fn sweep_orders_and_skips() {
        let s = coarse();
        let r = sweep_wall_distance(&s, &[2.0, 0.5, 6.0]).unwrap();
        assert_eq!(r.distances(), vec![0.5, 2.0]);
        assert_eq!(r.skipped.len(), 1);
        assert_eq!(r.skipped[0].0, 6.0);
        assert!(sweep_wall_distance(&s, &[]).is_err());
        assert!(sweep_txrx_distance(&s, &[f64::NAN]).is_err());
    }

    #[test]
    fn sweep_csv_header() {
        let r = sweep_txrx_distance(&coarse(), &[1.0]).unwrap();
        let text = r.csv_string();
        assert!(text.starts_with("distance,indoor_area,leakage_area,components\n1,"));
    }

    #[test]
    fn topology_classes() {
        let s = coarse();
        let (_, mut report) = analyze(&s);
        report.component_count = 0;
        assert_eq!(classify_topology(&report), Topology::Empty);
        report.component_count = 1;
        assert_eq!(classify_topology(&report), Topology::SingleRegion);
        report.component_count = 3;
        assert_eq!(classify_topology(&report), Topology::Split);
    }

    #[test]
    fn step_precondition() {
        let room = RoomLayout::rectangle(8.0, 6.0).unwrap();
        let obj = PlacementObjective {
            step: 2.0,
            ..Default::default()
        };
        assert!(matches!(
            candidate_points(&room, &obj),
            Err(PlacementError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn infeasible_when_clearance_excludes_all() {
        let mut s = coarse();
        s.room = RoomLayout::rectangle(1.0, 1.0).unwrap();
        s.placement = DevicePlacement::new(Point::new(0.25, 0.5), Point::new(0.75, 0.5));
        let obj = PlacementObjective {
            step: 0.25,
            min_wall_clearance: 0.5,
            ..Default::default()
        };
        assert!(matches!(
            optimize_placement(&s, &obj, None),
            Err(PlacementError::Infeasible { candidates: 1 })
        ));
    }

    #[test]
    fn tie_break_order() {
        let a = DevicePlacement::new(Point::new(1.0, 2.0), Point::new(3.0, 3.0));
        let b = DevicePlacement::new(Point::new(1.0, 2.0), Point::new(2.0, 9.0));
        assert!(better((1.0, &b), (1.0, &a)));
        assert!(!better((1.0, &a), (1.0, &b)));
        assert!(better((2.0, &a), (1.0, &b)));
        assert!(!better((1.0, &a), (1.0, &a)));
    }
}
