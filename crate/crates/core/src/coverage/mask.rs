use super::field::ScalarField;
use super::grid::GridSpec;

/// Boolean grid, row-major like the field it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub cols: usize,
    pub rows: usize,
    pub cells: Vec<bool>,
}

impl Mask {
    pub fn new(cols: usize, rows: usize) -> Self {
        Self {
            cols,
            rows,
            cells: vec![false; cols * rows],
        }
    }

    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let (cols, rows) = (grid.cols(), grid.rows());
        let mut cells = Vec::with_capacity(cols * rows);
        for r in 0..rows {
            for c in 0..cols {
                cells.push(f(c, r));
            }
        }
        Self { cols, rows, cells }
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.cells[row * self.cols + col]
    }

    /// Like `get` but false outside the grid.
    pub fn get_padded(&self, col: isize, row: isize) -> bool {
        col >= 0
            && row >= 0
            && (col as usize) < self.cols
            && (row as usize) < self.rows
            && self.get(col as usize, row as usize)
    }

    pub fn set(&mut self, col: usize, row: usize, value: bool) {
        self.cells[row * self.cols + col] = value;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Cells set in exactly one of the two masks.
    pub fn symmetric_difference(&self, other: &Mask) -> usize {
        assert_eq!(
            (self.cols, self.rows),
            (other.cols, other.rows),
            "mask shapes differ"
        );
        self.cells
            .iter()
            .zip(&other.cells)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Covered cells: value at or above the threshold. Excluded (NaN) cells are
/// never covered.
pub fn threshold_mask(field: &ScalarField, threshold_db: f64) -> Mask {
    Mask {
        cols: field.grid.cols(),
        rows: field.grid.rows(),
        cells: field.values.iter().map(|&v| v >= threshold_db).collect(),
    }
}

/// 4-connected component labelling of the covered cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Label per cell, `None` for uncovered cells. Labels are numbered in
    /// row-major order of each component's first cell.
    pub labels: Vec<Option<usize>>,
    /// Cell count per label.
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

pub fn connected_components(mask: &Mask) -> Components {
    let mut labels = vec![None; mask.cells.len()];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..mask.cells.len() {
        if !mask.cells[start] || labels[start].is_some() {
            continue;
        }
        let label = sizes.len();
        let mut size = 0;
        labels[start] = Some(label);
        stack.push(start);
        while let Some(i) = stack.pop() {
            size += 1;
            let (c, r) = (i % mask.cols, i / mask.cols);
            let mut visit = |j: usize| {
                if mask.cells[j] && labels[j].is_none() {
                    labels[j] = Some(label);
                    stack.push(j);
                }
            };
            if c > 0 {
                visit(i - 1);
            }
            if c + 1 < mask.cols {
                visit(i + 1);
            }
            if r > 0 {
                visit(i - mask.cols);
            }
            if r + 1 < mask.rows {
                visit(i + mask.cols);
            }
        }
        sizes.push(size);
    }
    Components { labels, sizes }
}
