//! Grid evaluation of SSNR fields and the coverage measures derived from them.

pub mod contour;
pub mod export;
pub mod field;
pub mod grid;
pub mod mask;
pub mod report;

pub use contour::{extract_boundary, smooth_boundary, Contour};
pub use field::{evaluate_field, ssnr_db_at, ScalarField};
pub use grid::GridSpec;
pub use mask::{connected_components, threshold_mask, Mask};
pub use report::{coverage_report, CoverageReport, Leakage};
