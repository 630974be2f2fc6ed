use serde::{Deserialize, Serialize};

use super::contour::{extract_boundary, smooth_boundary, Contour, DEFAULT_SMOOTHING_WINDOW};
use super::field::ScalarField;
use super::mask::{connected_components, threshold_mask, Components, Mask};
use crate::geometry::RoomLayout;

/// Covered area beyond the reflective wall. `Unknown` when no cell of the
/// grid lies beyond the wall line, so nothing could have been observed there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", content = "area_m2", rename_all = "lowercase")]
pub enum Leakage {
    Known(f64),
    Unknown,
}

impl Leakage {
    pub fn area(self) -> Option<f64> {
        match self {
            Self::Known(a) => Some(a),
            Self::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub mask: Mask,
    pub components: Components,
    /// Raw marching-squares outlines.
    pub raw_contours: Vec<Contour>,
    /// Outlines after the moving-average pass. Contours too short to smooth
    /// are passed through unchanged.
    pub contours: Vec<Contour>,
    pub indoor_area: f64,
    pub leakage: Leakage,
    pub covered_area: f64,
    pub component_count: usize,
}

/// Thresholds the field and measures the covered set against the room.
/// Indoor cells have their center inside the room. Leakage cells have
/// their center strictly beyond the reflective wall's line and outside
/// the room.
pub fn coverage_report(
    room: &RoomLayout,
    field: &ScalarField,
    threshold_db: f64,
) -> CoverageReport {
    coverage_report_with_window(room, field, threshold_db, DEFAULT_SMOOTHING_WINDOW)
}

pub fn coverage_report_with_window(
    room: &RoomLayout,
    field: &ScalarField,
    threshold_db: f64,
    window: usize,
) -> CoverageReport {
    let grid = &field.grid;
    let mask = threshold_mask(field, threshold_db);
    let cell_area = grid.cell_area();

    let mut indoor = 0usize;
    let mut beyond = 0usize;
    let mut any_beyond = false;
    for (i, &covered) in mask.cells.iter().enumerate() {
        let center = grid.center_of(i);
        let outside_wall = room.wall_side_distance(center) < 0.0;
        any_beyond |= outside_wall;
        if !covered {
            continue;
        }
        if room.contains(center) {
            indoor += 1;
        } else if outside_wall {
            beyond += 1;
        }
    }

    let components = connected_components(&mask);
    let raw_contours = extract_boundary(&mask, grid);
    let contours = raw_contours
        .iter()
        .map(|c| smooth_boundary(c, window).unwrap_or_else(|_| c.clone()))
        .collect();
    CoverageReport {
        component_count: components.count(),
        covered_area: mask.count() as f64 * cell_area,
        indoor_area: indoor as f64 * cell_area,
        leakage: if any_beyond {
            Leakage::Known(beyond as f64 * cell_area)
        } else {
            Leakage::Unknown
        },
        mask,
        components,
        raw_contours,
        contours,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::grid::GridSpec;
    use crate::geometry::Point;

    fn field_over(grid: GridSpec, f: impl Fn(Point) -> f64) -> ScalarField {
        ScalarField {
            values: (0..grid.len()).map(|i| f(grid.center_of(i))).collect(),
            grid,
        }
    }

    #[test]
    fn empty_mask() {
        let room = RoomLayout::rectangle(4.0, 4.0).unwrap();
        let grid = GridSpec::new(Point::new(-2.0, 0.0), 6.0, 4.0, 0.5);
        let r = coverage_report(&room, &field_over(grid, |_| 0.0), 2.0);
        assert_eq!(r.indoor_area, 0.0);
        assert_eq!(r.leakage, Leakage::Known(0.0));
        assert_eq!(r.component_count, 0);
        assert!(r.contours.is_empty());
    }

    #[test]
    fn areas_split_by_wall() {
        let room = RoomLayout::rectangle(4.0, 4.0).unwrap();
        let grid = GridSpec::new(Point::new(-2.0, 0.0), 6.0, 4.0, 0.5);
        // covered strip -1 <= x <= 1
        let r = coverage_report(
            &room,
            &field_over(grid, |p| if p.x.abs() < 1.0 { 5.0 } else { 0.0 }),
            2.0,
        );
        assert_eq!(r.indoor_area, 4.0);
        assert_eq!(r.leakage, Leakage::Known(4.0));
        assert_eq!(r.covered_area, 8.0);
        assert_eq!(r.component_count, 1);
        assert_eq!(r.contours.len(), 1);
    }

    #[test]
    fn leakage_unknown_without_cells_beyond_wall() {
        let room = RoomLayout::rectangle(4.0, 4.0).unwrap();
        let grid = GridSpec::new(Point::new(0.0, 0.0), 4.0, 4.0, 0.5);
        let r = coverage_report(&room, &field_over(grid, |_| 5.0), 2.0);
        assert_eq!(r.leakage, Leakage::Unknown);
        assert_eq!(r.indoor_area, 16.0);
    }
}
