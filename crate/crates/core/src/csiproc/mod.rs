//! CSI amplitude processing: outlier removal, smoothing, breathing-rate
//! estimation and empirical SSNR.

pub mod filters;
pub mod peaks;
pub mod respiration;
pub mod ssnr;
pub mod trace;

use thiserror::Error;

pub use filters::{hampel_filter, savitzky_golay};
pub use peaks::detect_peaks;
pub use respiration::{
    respiration_rate, FilterConfig, Rate, RespirationConfig, RespirationEstimate,
    SubcarrierSelection,
};
pub use ssnr::{
    empirical_ssnr, fit_model_scale, mean_absolute_error, EmpiricalSsnr, ScaleFit, SsnrRatio,
};
pub use trace::CsiTrace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CsiError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("trace has no subcarrier columns")]
    NoSubcarriers,
    #[error("timestamps must be finite and strictly increasing (sample {0})")]
    NonMonotoneTime(usize),
    #[error("subcarrier {subcarrier} has {len} samples, expected {expected}")]
    Ragged {
        subcarrier: usize,
        len: usize,
        expected: usize,
    },
    #[error("amplitude at subcarrier {subcarrier}, sample {sample} is negative or not finite")]
    BadAmplitude { subcarrier: usize, sample: usize },
    #[error("bad CSV header: {0}")]
    Header(String),
    #[error("row {row}, column {column} is not a number")]
    Number { row: usize, column: usize },
    #[error("csv: {0}")]
    Csv(String),
    #[error("io: {0}")]
    Io(String),
    #[error("{0}")]
    Parameter(&'static str),
    #[error("trace spans {duration_s} s, shorter than the {window_s} s window")]
    TooShort { duration_s: f64, window_s: f64 },
    #[error("subcarrier {index} out of range for {count} subcarriers")]
    SubcarrierOutOfRange { index: usize, count: usize },
    #[error("lists differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
}

impl From<csv::Error> for CsiError {
    fn from(e: csv::Error) -> Self {
        Self::Csv(e.to_string())
    }
}
