use serde::{Deserialize, Serialize};

use super::respiration::{
    leading_window, mean, select_subcarrier, FilterConfig, SubcarrierSelection,
};
use super::trace::CsiTrace;
use super::CsiError;
use crate::channel::linear_to_db;

/// Ratios above this are reported as saturated: the filter residual is then
/// at the level of numerical smoothing error rather than measured noise.
pub const SATURATION_DB: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum SsnrRatio {
    Finite { linear: f64, db: f64 },
    Saturated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSsnr {
    /// Mean squared deviation of the amplitude from its window average.
    pub dynamic_power: f64,
    /// Mean squared difference between raw and filtered amplitude.
    pub interference_power: f64,
    pub ratio: SsnrRatio,
}

/// Empirical SSNR over the leading `window_s` seconds of one subcarrier.
pub fn empirical_ssnr(
    trace: &CsiTrace,
    selection: SubcarrierSelection,
    window_s: f64,
    filter: &FilterConfig,
) -> Result<EmpiricalSsnr, CsiError> {
    let len = leading_window(trace, window_s)?;
    let k = select_subcarrier(trace, selection, len)?;
    let raw = &trace.subcarrier(k)[..len];
    let filtered = filter.apply(raw)?;
    let avg = mean(raw);
    let dynamic_power = raw.iter().map(|a| (a - avg) * (a - avg)).sum::<f64>() / len as f64;
    let interference_power = raw
        .iter()
        .zip(&filtered)
        .map(|(a, f)| (a - f) * (a - f))
        .sum::<f64>()
        / len as f64;
    let ratio = if interference_power > 0.0 {
        let linear = dynamic_power / interference_power;
        let db = linear_to_db(linear);
        if db > SATURATION_DB {
            SsnrRatio::Saturated
        } else {
            SsnrRatio::Finite { linear, db }
        }
    } else {
        SsnrRatio::Saturated
    };
    Ok(EmpiricalSsnr {
        dynamic_power,
        interference_power,
        ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFit {
    pub scale: f64,
    pub rms_residual: f64,
}

/// Least-squares `s` minimizing `sum (measured - s * simulated)^2`, with the
/// RMS of the remaining residual. Both lists hold linear SSNR values.
pub fn fit_model_scale(measured: &[f64], simulated: &[f64]) -> Result<ScaleFit, CsiError> {
    if measured.len() != simulated.len() {
        return Err(CsiError::LengthMismatch {
            left: measured.len(),
            right: simulated.len(),
        });
    }
    if measured.len() < 2 {
        return Err(CsiError::TooFewSamples(measured.len()));
    }
    if measured.iter().chain(simulated).any(|v| !v.is_finite()) {
        return Err(CsiError::Parameter("SSNR values must be finite"));
    }
    if simulated.iter().any(|&v| v <= 0.0) {
        return Err(CsiError::Parameter(
            "simulated SSNR values must be positive",
        ));
    }
    let sxy: f64 = measured.iter().zip(simulated).map(|(m, s)| m * s).sum();
    let sxx: f64 = simulated.iter().map(|s| s * s).sum();
    let scale = sxy / sxx;
    let sse: f64 = measured
        .iter()
        .zip(simulated)
        .map(|(m, s)| (m - scale * s).powi(2))
        .sum();
    Ok(ScaleFit {
        scale,
        rms_residual: (sse / measured.len() as f64).sqrt(),
    })
}

pub fn mean_absolute_error(estimates: &[f64], truth: &[f64]) -> Result<f64, CsiError> {
    if estimates.len() != truth.len() {
        return Err(CsiError::LengthMismatch {
            left: estimates.len(),
            right: truth.len(),
        });
    }
    if estimates.is_empty() {
        return Err(CsiError::TooFewSamples(0));
    }
    Ok(estimates
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t).abs())
        .sum::<f64>()
        / estimates.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_proportion() {
        let sim = [1.0, 2.0, 5.0];
        let meas = sim.map(|v| 2.0 * v);
        let fit = fit_model_scale(&meas, &sim).unwrap();
        assert_eq!(fit.scale, 2.0);
        assert_eq!(fit.rms_residual, 0.0);
    }

    #[test]
    fn fit_preconditions() {
        assert!(fit_model_scale(&[1.0], &[1.0]).is_err());
        assert!(fit_model_scale(&[1.0, 2.0], &[1.0]).is_err());
        assert!(fit_model_scale(&[1.0, 2.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn mae() {
        assert_eq!(
            mean_absolute_error(&[14.0, 16.5], &[15.0, 15.0]).unwrap(),
            1.25
        );
        assert!(mean_absolute_error(&[], &[]).is_err());
    }

    #[test]
    fn pure_sinusoid_saturates() {
        let fs = 1000.0;
        let sc: Vec<f64> = (0..40_000)
            .map(|i| 5.0 + (2.0 * std::f64::consts::PI * 0.25 * i as f64 / fs).sin())
            .collect();
        let t = CsiTrace::uniform(fs, vec![sc]).unwrap();
        let e = empirical_ssnr(
            &t,
            SubcarrierSelection::Index(0),
            30.0,
            &FilterConfig::default(),
        )
        .unwrap();
        assert_eq!(e.ratio, SsnrRatio::Saturated);
        assert!(e.interference_power < 1e-6 * e.dynamic_power);
    }
}
