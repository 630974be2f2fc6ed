use std::io::Read;
use std::path::Path;

use super::CsiError;

/// CSI amplitudes over time. `amplitude[k][i]` is subcarrier `k` at sample `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiTrace {
    timestamps: Vec<f64>,
    amplitude: Vec<Vec<f64>>,
    sample_rate: f64,
}

impl CsiTrace {
    /// Validates and builds a trace. The sample rate is the mean rate over
    /// the whole trace.
    pub fn new(timestamps: Vec<f64>, amplitude: Vec<Vec<f64>>) -> Result<Self, CsiError> {
        if timestamps.len() < 2 {
            return Err(CsiError::TooFewSamples(timestamps.len()));
        }
        if amplitude.is_empty() {
            return Err(CsiError::NoSubcarriers);
        }
        if let Some(i) = timestamps.windows(2).position(|w| {
            w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)
                || !w[0].is_finite()
                || !w[1].is_finite()
        }) {
            return Err(CsiError::NonMonotoneTime(i + 1));
        }
        for (k, column) in amplitude.iter().enumerate() {
            if column.len() != timestamps.len() {
                return Err(CsiError::Ragged {
                    subcarrier: k,
                    len: column.len(),
                    expected: timestamps.len(),
                });
            }
            if let Some(i) = column.iter().position(|a| !(a.is_finite() && *a >= 0.0)) {
                return Err(CsiError::BadAmplitude {
                    subcarrier: k,
                    sample: i,
                });
            }
        }
        let span = timestamps[timestamps.len() - 1] - timestamps[0];
        let sample_rate = (timestamps.len() - 1) as f64 / span;
        Ok(Self {
            timestamps,
            amplitude,
            sample_rate,
        })
    }

    /// Uniformly sampled trace starting at t = 0.
    pub fn uniform(sample_rate: f64, amplitude: Vec<Vec<f64>>) -> Result<Self, CsiError> {
        let n = amplitude.first().map_or(0, Vec::len);
        let timestamps = (0..n).map(|i| i as f64 / sample_rate).collect();
        Self::new(timestamps, amplitude)
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn subcarrier(&self, k: usize) -> &[f64] {
        &self.amplitude[k]
    }

    pub fn subcarrier_count(&self) -> usize {
        self.amplitude.len()
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn duration(&self) -> f64 {
        self.timestamps[self.len() - 1] - self.timestamps[0]
    }

    /// Number of leading samples within `window_s` seconds of the first.
    pub fn window_len(&self, window_s: f64) -> usize {
        let t0 = self.timestamps[0];
        self.timestamps.partition_point(|&t| t - t0 < window_s)
    }

    /// Parses `time_s,sc_0,...,sc_{N-1}` CSV.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, CsiError> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.get(0) != Some("time_s") {
            return Err(CsiError::Header("first column must be time_s".into()));
        }
        for (k, h) in headers.iter().skip(1).enumerate() {
            if h != format!("sc_{k}") {
                return Err(CsiError::Header(format!(
                    "column {} must be sc_{k}, found {h}",
                    k + 1
                )));
            }
        }
        let n_sc = headers.len() - 1;
        let mut timestamps = Vec::new();
        let mut amplitude = vec![Vec::new(); n_sc];
        for (row, record) in r.records().enumerate() {
            let record = record?;
            let parse = |col: usize| -> Result<f64, CsiError> {
                record[col].trim().parse().map_err(|_| CsiError::Number {
                    row: row + 2,
                    column: col + 1,
                })
            };
            timestamps.push(parse(0)?);
            for (k, column) in amplitude.iter_mut().enumerate() {
                column.push(parse(k + 1)?);
            }
        }
        Self::new(timestamps, amplitude)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, CsiError> {
        let file = std::fs::File::open(path.as_ref()).map_err(|e| CsiError::Io(e.to_string()))?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["time_s".to_string()];
        header.extend((0..self.subcarrier_count()).map(|k| format!("sc_{k}")));
        w.write_record(&header).expect("in-memory write");
        for i in 0..self.len() {
            let mut row = vec![self.timestamps[i].to_string()];
            row.extend(self.amplitude.iter().map(|c| c[i].to_string()));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}
