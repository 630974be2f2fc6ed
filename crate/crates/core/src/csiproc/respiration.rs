use serde::{Deserialize, Serialize};

use super::filters::{hampel_filter, savitzky_golay};
use super::peaks::detect_peaks;
use super::trace::CsiTrace;
use super::CsiError;

/// Filter chain applied before peak picking and in the empirical SSNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub hampel_half_window: usize,
    pub hampel_n_sigma: f64,
    pub sg_window: usize,
    pub sg_polyorder: usize,
}

impl Default for FilterConfig {
    /// Tuned for 1 kHz sampling: the 0.5 s smoothing window passes
    /// breathing (0.1 to 0.5 Hz) and removes most wideband noise.
    fn default() -> Self {
        Self {
            hampel_half_window: 50,
            hampel_n_sigma: 3.0,
            sg_window: 501,
            sg_polyorder: 3,
        }
    }
}

impl FilterConfig {
    pub fn apply(&self, series: &[f64]) -> Result<Vec<f64>, CsiError> {
        let cleaned = hampel_filter(series, self.hampel_half_window, self.hampel_n_sigma)?;
        savitzky_golay(&cleaned, self.sg_window, self.sg_polyorder)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RespirationConfig {
    pub filter: FilterConfig,
    /// Minimum spacing between breaths, seconds.
    pub min_peak_distance_s: f64,
    /// Peak prominence threshold as a multiple of the windowed amplitude's
    /// standard deviation.
    pub prominence_factor: f64,
}

impl Default for RespirationConfig {
    fn default() -> Self {
        Self {
            filter: FilterConfig::default(),
            min_peak_distance_s: 1.2,
            prominence_factor: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubcarrierSelection {
    /// The subcarrier whose amplitude varies most over the window; ties go
    /// to the lower index.
    HighestVariance,
    Index(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", content = "bpm", rename_all = "lowercase")]
pub enum Rate {
    Defined(f64),
    /// Fewer than two breaths found.
    Undefined,
}

impl Rate {
    pub fn bpm(self) -> Option<f64> {
        match self {
            Self::Defined(r) => Some(r),
            Self::Undefined => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RespirationEstimate {
    pub rate: Rate,
    /// Sample indices of detected breaths, increasing.
    pub peak_indices: Vec<usize>,
    pub window_s: f64,
    pub subcarrier: usize,
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

pub(crate) fn select_subcarrier(
    trace: &CsiTrace,
    selection: SubcarrierSelection,
    len: usize,
) -> Result<usize, CsiError> {
    match selection {
        SubcarrierSelection::Index(k) if k < trace.subcarrier_count() => Ok(k),
        SubcarrierSelection::Index(k) => Err(CsiError::SubcarrierOutOfRange {
            index: k,
            count: trace.subcarrier_count(),
        }),
        SubcarrierSelection::HighestVariance => {
            let mut best = (0, f64::NEG_INFINITY);
            for k in 0..trace.subcarrier_count() {
                let v = variance(&trace.subcarrier(k)[..len]);
                if v > best.1 {
                    best = (k, v);
                }
            }
            Ok(best.0)
        }
    }
}

pub(crate) fn leading_window(trace: &CsiTrace, window_s: f64) -> Result<usize, CsiError> {
    if !(window_s.is_finite() && window_s > 0.0) {
        return Err(CsiError::Parameter("window must be positive"));
    }
    if trace.duration() < window_s {
        return Err(CsiError::TooShort {
            duration_s: trace.duration(),
            window_s,
        });
    }
    Ok(trace.window_len(window_s))
}

/// Breathing rate over the leading `window_s` seconds: Hampel, then
/// Savitzky-Golay, then peak picking. The rate is the number of
/// breath-to-breath intervals over the time they span.
pub fn respiration_rate(
    trace: &CsiTrace,
    selection: SubcarrierSelection,
    window_s: f64,
    config: &RespirationConfig,
) -> Result<RespirationEstimate, CsiError> {
    let len = leading_window(trace, window_s)?;
    let subcarrier = select_subcarrier(trace, selection, len)?;
    let raw = &trace.subcarrier(subcarrier)[..len];
    let smooth = config.filter.apply(raw)?;
    let min_distance = (config.min_peak_distance_s * trace.sample_rate())
        .round()
        .max(1.0) as usize;
    let min_prominence = config.prominence_factor * variance(raw).sqrt();
    let peaks = if min_prominence > 0.0 {
        detect_peaks(&smooth, min_distance, min_prominence)
    } else {
        Vec::new()
    };
    let rate = match (peaks.first(), peaks.last()) {
        (Some(&a), Some(&b)) if peaks.len() >= 2 => {
            let t = trace.timestamps();
            Rate::Defined(60.0 * (peaks.len() - 1) as f64 / (t[b] - t[a]))
        }
        _ => Rate::Undefined,
    };
    Ok(RespirationEstimate {
        rate,
        peak_indices: peaks,
        window_s,
        subcarrier,
    })
}
