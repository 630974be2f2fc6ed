use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;

/// Slack when dividing extents by the resolution so that e.g. 12 / 0.05 is
/// not truncated to 239 by rounding.
const CELL_COUNT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid resolution must be positive and finite, got {0}")]
    Resolution(f64),
    #[error("grid {axis} of {extent} m is smaller than one cell of {resolution} m")]
    Extent {
        axis: &'static str,
        extent: f64,
        resolution: f64,
    },
    #[error("grid origin must be finite")]
    Origin,
    #[error("grid has {0} cells, which does not fit in memory")]
    TooLarge(f64),
}

/// Rectangular evaluation region divided into square cells. Values are
/// sampled at cell centers; cell (col, row) has its center at
/// `origin + ((col + 0.5) res, (row + 0.5) res)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Point,
    pub width: f64,
    pub height: f64,
    pub resolution: f64,
}

impl GridSpec {
    pub fn new(origin: Point, width: f64, height: f64, resolution: f64) -> Self {
        Self {
            origin,
            width,
            height,
            resolution,
        }
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(GridError::Resolution(self.resolution));
        }
        if !self.origin.is_finite() {
            return Err(GridError::Origin);
        }
        for (axis, extent) in [("width", self.width), ("height", self.height)] {
            if !extent.is_finite() || extent < self.resolution {
                return Err(GridError::Extent {
                    axis,
                    extent,
                    resolution: self.resolution,
                });
            }
        }
        let cells = self.cell_count_estimate();
        if cells > isize::MAX as f64 / 16.0 {
            return Err(GridError::TooLarge(cells));
        }
        Ok(())
    }

    /// Cell count computed in floating point, usable before validation.
    pub fn cell_count_estimate(&self) -> f64 {
        (self.width / self.resolution + CELL_COUNT_SLACK)
            .floor()
            .max(0.0)
            * (self.height / self.resolution + CELL_COUNT_SLACK)
                .floor()
                .max(0.0)
    }

    pub fn cols(&self) -> usize {
        (self.width / self.resolution + CELL_COUNT_SLACK).floor() as usize
    }

    pub fn rows(&self) -> usize {
        (self.height / self.resolution + CELL_COUNT_SLACK).floor() as usize
    }

    pub fn len(&self) -> usize {
        self.cols() * self.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.resolution * self.resolution
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.cols() + col
    }

    /// (col, row) of a row-major index.
    pub fn position(&self, index: usize) -> (usize, usize) {
        let cols = self.cols();
        (index % cols, index / cols)
    }

    pub fn center(&self, col: usize, row: usize) -> Point {
        Point::new(
            self.origin.x + (col as f64 + 0.5) * self.resolution,
            self.origin.y + (row as f64 + 0.5) * self.resolution,
        )
    }

    pub fn center_of(&self, index: usize) -> Point {
        let (c, r) = self.position(index);
        self.center(c, r)
    }

    pub fn with_resolution(&self, resolution: f64) -> Self {
        Self {
            resolution,
            ..*self
        }
    }
}
