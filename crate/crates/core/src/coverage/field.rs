use rayon::prelude::*;

use super::grid::GridSpec;
use crate::channel::{linear_to_db, ssnr_full, ssnr_simplified};
use crate::geometry::{path_set, Point};
use crate::scenario::{ModelMode, Scenario};

/// Resolution above which fields are too coarse to show the interference
/// fringes or a meaningful boundary.
pub const COARSE_RESOLUTION_M: f64 = 0.5;

/// Gridded SSNR in dB, row-major. Cells inside a device's exclusion radius
/// hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn is_excluded(&self, index: usize) -> bool {
        self.values[index].is_nan()
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[self.grid.index(col, row)]
    }

    /// Smallest and largest finite value, if any.
    pub fn finite_range(&self) -> Option<(f64, f64)> {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(None, |acc, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }
}

/// Linear SSNR at one target position under the scenario's model and scale.
/// `None` when the target falls inside a device's exclusion radius or on a
/// device.
pub fn ssnr_linear_at(scenario: &Scenario, target: Point) -> Option<f64> {
    let placement = &scenario.placement;
    if target.distance(placement.tx) < scenario.exclusion_radius_m
        || target.distance(placement.rx) < scenario.exclusion_radius_m
    {
        return None;
    }
    let paths = path_set(placement, target, &scenario.room).ok()?;
    let raw = match scenario.model {
        ModelMode::Simplified => {
            let rf = &scenario.rf;
            ssnr_simplified(&paths, rf.alpha1(), rf.alpha2(), rf.wavelength_m).ok()?
        }
        ModelMode::Full => ssnr_full(&scenario.rf, &paths).ok()?.linear,
    };
    Some(scenario.scale_factor * raw)
}

/// SSNR in dB at one target position; NaN when excluded. Non-positive linear
/// values (possible only through rounding in a fully cancelled sum) map to
/// negative infinity.
pub fn ssnr_db_at(scenario: &Scenario, target: Point) -> f64 {
    match ssnr_linear_at(scenario, target) {
        None => f64::NAN,
        Some(v) if v > 0.0 => linear_to_db(v),
        Some(_) => f64::NEG_INFINITY,
    }
}

/// Evaluates the scenario at every cell center of `grid`.
pub fn evaluate_field(scenario: &Scenario, grid: &GridSpec) -> ScalarField {
    if grid.resolution > COARSE_RESOLUTION_M {
        log::warn!(
            "grid resolution {} m is coarser than {} m; boundaries and fringes will be unreliable",
            grid.resolution,
            COARSE_RESOLUTION_M
        );
    }
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| ssnr_db_at(scenario, grid.center_of(i)))
        .collect();
    ScalarField {
        grid: *grid,
        values,
    }
}
