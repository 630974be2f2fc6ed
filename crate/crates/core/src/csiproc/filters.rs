use nalgebra::{DMatrix, DVector};

use super::CsiError;

/// Scale turning the median absolute deviation into a Gaussian standard
/// deviation estimate.
pub const MAD_SCALE: f64 = 1.4826;

/// Median of a non-empty slice; even lengths average the two middle values.
/// The slice is reordered.
pub fn median_in_place(values: &mut [f64]) -> f64 {
    let n = values.len();
    let mid = n / 2;
    let (_, &mut upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    if n % 2 == 1 {
        upper
    } else {
        let lower = values[..mid]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Replaces samples that deviate from their window median by more than
/// `n_sigma * 1.4826 * MAD` with that median. Windows are truncated at the
/// series ends.
pub fn hampel_filter(
    series: &[f64],
    half_window: usize,
    n_sigma: f64,
) -> Result<Vec<f64>, CsiError> {
    if half_window < 1 {
        return Err(CsiError::Parameter("hampel half_window must be at least 1"));
    }
    if !(n_sigma.is_finite() && n_sigma > 0.0) {
        return Err(CsiError::Parameter("hampel n_sigma must be positive"));
    }
    let n = series.len();
    let mut window = Vec::with_capacity(2 * half_window + 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(half_window);
        let hi = (i + half_window + 1).min(n);
        window.clear();
        window.extend_from_slice(&series[lo..hi]);
        let median = median_in_place(&mut window);
        for v in window.iter_mut() {
            *v = (*v - median).abs();
        }
        let mad = median_in_place(&mut window);
        let x = series[i];
        out.push(if (x - median).abs() > n_sigma * MAD_SCALE * mad {
            median
        } else {
            x
        });
    }
    Ok(out)
}

/// Weights that evaluate, at `at`, the least-squares polynomial of degree
/// `order` fitted to samples at integer offsets `lo..=hi`.
fn sg_weights(lo: isize, hi: isize, at: isize, order: usize) -> Vec<f64> {
    let m = (hi - lo + 1) as usize;
    let order = order.min(m - 1);
    // Offsets are scaled to [-1, 1] to keep the Vandermonde matrix well
    // conditioned for long windows.
    let center = 0.5 * (lo + hi) as f64;
    let half = (0.5 * (hi - lo) as f64).max(1.0);
    let v = DMatrix::from_fn(m, order + 1, |r, c| {
        ((lo + r as isize) as f64 - center).powi(c as i32) / half.powi(c as i32)
    });
    let t = (at as f64 - center) / half;
    let e = DVector::from_fn(order + 1, |c, _| t.powi(c as i32));
    let qr = v.qr();
    let z = qr
        .r()
        .transpose()
        .solve_lower_triangular(&e)
        .expect("Vandermonde matrix on distinct offsets has full column rank");
    (qr.q() * z).iter().copied().collect()
}

/// Savitzky-Golay smoothing: each sample is replaced by the value at that
/// sample of the least-squares polynomial fitted over the centered window.
/// Near the ends the window is truncated to the available samples and the
/// polynomial is refitted there.
pub fn savitzky_golay(
    series: &[f64],
    window: usize,
    polyorder: usize,
) -> Result<Vec<f64>, CsiError> {
    if window.is_multiple_of(2) {
        return Err(CsiError::Parameter("savitzky-golay window must be odd"));
    }
    if polyorder >= window {
        return Err(CsiError::Parameter(
            "savitzky-golay polyorder must be below the window",
        ));
    }
    let n = series.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let half = (window / 2) as isize;
    let interior = sg_weights(-half, half, 0, polyorder);
    let mut out = Vec::with_capacity(n);
    for i in 0..n as isize {
        let lo = (i - half).max(0);
        let hi = (i + half).min(n as isize - 1);
        let weights = if hi - lo == 2 * half {
            std::borrow::Cow::Borrowed(&interior)
        } else {
            std::borrow::Cow::Owned(sg_weights(lo - i, hi - i, 0, polyorder))
        };
        let value = weights
            .iter()
            .zip(&series[lo as usize..=hi as usize])
            .map(|(w, x)| w * x)
            .sum();
        out.push(value);
    }
    Ok(out)
}
