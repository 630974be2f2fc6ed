use std::collections::BTreeMap;

use thiserror::Error;

use super::grid::GridSpec;
use super::mask::Mask;
use crate::geometry::Point;

pub const DEFAULT_SMOOTHING_WINDOW: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContourError {
    #[error("smoothing window must be 1 or an odd number of at least 3, got {0}")]
    Window(usize),
    #[error("contour needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
}

/// Closed polyline. The last vertex connects back to the first; the first
/// vertex is not repeated.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Contour {
    pub points: Vec<Point>,
}

impl Contour {
    pub fn perimeter(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| self.points[i].distance(self.points[(i + 1) % n]))
            .sum()
    }

    /// Shoelace area; positive for counter-clockwise traversal.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        0.5 * (0..n)
            .map(|i| self.points[i].cross(self.points[(i + 1) % n]))
            .sum::<f64>()
    }

    pub fn centroid(&self) -> Point {
        let n = self.points.len() as f64;
        let sum = self.points.iter().fold(Point::default(), |acc, &p| acc + p);
        sum * (1.0 / n)
    }
}

/// Square edges in counter-clockwise order, each as (from corner, to corner).
/// Corners: 0 = (i, j), 1 = (i+1, j), 2 = (i+1, j+1), 3 = (i, j+1).
const CORNERS: [(isize, isize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

/// Contour vertex identified in doubled sample coordinates so that edge
/// midpoints have integer keys.
type Key = (isize, isize);

fn midpoint_key(i: isize, j: isize, edge: usize) -> Key {
    let (a, b) = (CORNERS[edge], CORNERS[(edge + 1) % 4]);
    (2 * i + a.0 + b.0, 2 * j + a.1 + b.1)
}

fn key_to_point(grid: &GridSpec, key: Key) -> Point {
    Point::new(
        grid.origin.x + (key.0 as f64 * 0.5 + 0.5) * grid.resolution,
        grid.origin.y + (key.1 as f64 * 0.5 + 0.5) * grid.resolution,
    )
}

/// Marching squares over the mask sampled at cell centers, with the grid
/// padded by uncovered cells so every contour closes. Crossings sit at
/// sample-edge midpoints, giving the staircase outline of the cell set.
///
/// Contours run with covered cells on the left: outer boundaries are
/// counter-clockwise, holes clockwise. In the two saddle cases the
/// diagonal covered corners are kept apart, matching 4-connectivity.
/// Output order follows the row-major position of each contour's first
/// crossing.
pub fn extract_boundary(mask: &Mask, grid: &GridSpec) -> Vec<Contour> {
    let mut next: BTreeMap<Key, Key> = BTreeMap::new();
    for j in -1..mask.rows as isize {
        for i in -1..mask.cols as isize {
            let covered: [bool; 4] =
                std::array::from_fn(|k| mask.get_padded(i + CORNERS[k].0, j + CORNERS[k].1));
            if covered.iter().all(|&c| c) || covered.iter().all(|&c| !c) {
                continue;
            }
            // An edge leaves the covered set when going from a covered to an
            // uncovered corner in CCW order. Each such exit is joined to the
            // closest entry preceding it, which wraps the segment tightly
            // around the covered corner.
            for exit in 0..4 {
                if !(covered[exit] && !covered[(exit + 1) % 4]) {
                    continue;
                }
                let entry = (1..4)
                    .map(|back| (exit + 4 - back) % 4)
                    .find(|&e| !covered[e] && covered[(e + 1) % 4])
                    .expect("a crossing exit always has a matching entry");
                next.insert(midpoint_key(i, j, exit), midpoint_key(i, j, entry));
            }
        }
    }

    let mut contours = Vec::new();
    while let Some((&start, _)) = next.iter().next() {
        let mut keys = vec![start];
        let mut cur = next.remove(&start).expect("start is present");
        while cur != start {
            keys.push(cur);
            cur = next
                .remove(&cur)
                .expect("marching-squares segments form closed loops");
        }
        contours.push(Contour {
            points: keys.into_iter().map(|k| key_to_point(grid, k)).collect(),
        });
    }
    contours
}

/// Circular moving average of the vertex positions. A window of 1 returns
/// the contour unchanged.
pub fn smooth_boundary(contour: &Contour, window: usize) -> Result<Contour, ContourError> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(ContourError::Window(window));
    }
    let n = contour.points.len();
    if n < 3 {
        return Err(ContourError::TooFewVertices(n));
    }
    if window == 1 {
        return Ok(contour.clone());
    }
    let half = (window / 2) as isize;
    let scale = 1.0 / window as f64;
    let points = (0..n as isize)
        .map(|i| {
            let sum = (-half..=half).fold(Point::default(), |acc, k| {
                acc + contour.points[(i + k).rem_euclid(n as isize) as usize]
            });
            sum * scale
        })
        .collect();
    Ok(Contour { points })
}
