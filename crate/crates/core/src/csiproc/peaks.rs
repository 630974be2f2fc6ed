/// Local maxima: samples strictly above their left neighbour and strictly
/// above the next sample that differs on the right. For a flat top the
/// middle sample (rounded down) is reported. The first and last samples
/// are never peaks.
pub fn local_maxima(x: &[f64]) -> Vec<usize> {
    let mut peaks = Vec::new();
    let n = x.len();
    if n < 3 {
        return peaks;
    }
    let mut i = 1;
    while i < n - 1 {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead < n - 1 && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                peaks.push((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        i += 1;
    }
    peaks
}

/// Topographic prominence of the sample at `peak`: its height above the
/// higher of the two lowest points reached before meeting a strictly
/// higher sample (or the series end) on either side.
pub fn prominence(x: &[f64], peak: usize) -> f64 {
    let h = x[peak];
    let mut left_min = h;
    for &v in x[..peak].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &x[peak + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Peaks with prominence at least `min_prominence`, then thinned so no two
/// kept peaks are closer than `min_distance` samples: peaks are visited in
/// descending height (ties by index) and each kept peak suppresses its
/// neighbours. Returned in increasing index order.
pub fn detect_peaks(x: &[f64], min_distance: usize, min_prominence: f64) -> Vec<usize> {
    let min_distance = min_distance.max(1);
    let candidates: Vec<usize> = local_maxima(x)
        .into_iter()
        .filter(|&p| prominence(x, p) >= min_prominence)
        .collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        x[candidates[b]]
            .total_cmp(&x[candidates[a]])
            .then(a.cmp(&b))
    });
    let mut keep = vec![true; candidates.len()];
    for &i in &order {
        if !keep[i] {
            continue;
        }
        let p = candidates[i];
        for j in (0..i).rev() {
            if p - candidates[j] >= min_distance {
                break;
            }
            keep[j] = false;
        }
        for j in i + 1..candidates.len() {
            if candidates[j] - p >= min_distance {
                break;
            }
            keep[j] = false;
        }
    }
    candidates
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_has_one_peak() {
        let x: Vec<f64> = (0..21).map(|i| 10.0 - (i as f64 - 10.0).abs()).collect();
        assert_eq!(detect_peaks(&x, 1, 0.0), vec![10]);
        assert_eq!(prominence(&x, 10), 10.0);
    }

    #[test]
    fn plateau_midpoint() {
        assert_eq!(local_maxima(&[0.0, 1.0, 2.0, 2.0, 2.0, 2.0, 1.0]), vec![3]);
        assert_eq!(local_maxima(&[0.0, 2.0, 2.0, 3.0]), Vec::<usize>::new());
        assert_eq!(local_maxima(&[1.0, 1.0, 1.0]), Vec::<usize>::new());
    }

    #[test]
    fn sinusoid_period() {
        let period = 50;
        let x: Vec<f64> = (0..500)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / period as f64).cos())
            .collect();
        let peaks = detect_peaks(&x, 10, 0.5);
        assert!(peaks.len() >= 9);
        for w in peaks.windows(2) {
            assert_eq!(w[1] - w[0], period);
        }
    }

    #[test]
    fn distance_keeps_taller() {
        let x = [0.0, 3.0, 0.0, 5.0, 0.0, 4.0, 0.0];
        assert_eq!(detect_peaks(&x, 3, 0.0), vec![3]);
        assert_eq!(detect_peaks(&x, 2, 0.0), vec![1, 3, 5]);
        assert_eq!(detect_peaks(&x, 1, 3.5), vec![3, 5]);
    }
}
