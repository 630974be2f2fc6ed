//! Text and raster writers for fields and contours.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::contour::Contour;
use super::field::ScalarField;

/// Writes `x,y,ssnr_db` rows in row-major cell order. Values use the
/// shortest representation that parses back to the same `f64`; excluded
/// cells are written as `NaN`.
pub fn write_field_csv<W: Write>(field: &ScalarField, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "ssnr_db"])?;
    for (i, v) in field.values.iter().enumerate() {
        let c = field.grid.center_of(i);
        w.write_record([c.x.to_string(), c.y.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn field_csv_string(field: &ScalarField) -> String {
    let mut buf = Vec::new();
    write_field_csv(field, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Reads the `ssnr_db` column back from field CSV text.
pub fn read_field_csv_values(text: &str) -> csv::Result<Vec<f64>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in r.records() {
        let record = record?;
        let v: f64 = record.get(2).unwrap_or("NaN").parse().unwrap_or(f64::NAN);
        out.push(v);
    }
    Ok(out)
}

/// dB values mapped to the 16-bit grey range. Values below `min_db`
/// (including negative infinity) map to 1, above `max_db` to 65535;
/// excluded cells are 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgmRange {
    pub min_db: f64,
    pub max_db: f64,
}

impl PgmRange {
    pub fn for_field(field: &ScalarField) -> Self {
        let (min_db, max_db) = field.finite_range().unwrap_or((0.0, 1.0));
        Self { min_db, max_db }
    }

    pub fn level(&self, db: f64) -> u16 {
        if db.is_nan() {
            return 0;
        }
        let span = self.max_db - self.min_db;
        let t = if span > 0.0 {
            ((db - self.min_db) / span).clamp(0.0, 1.0)
        } else {
            1.0
        };
        1 + (t * 65534.0).round() as u16
    }

    /// Inverse of `level` up to quantization.
    pub fn db(&self, level: u16) -> Option<f64> {
        (level > 0)
            .then(|| self.min_db + (level - 1) as f64 / 65534.0 * (self.max_db - self.min_db))
    }
}

/// Binary PGM (P5, maxval 65535, big-endian samples). The top image row is
/// the grid row with the largest y.
pub fn write_field_pgm<W: Write>(
    field: &ScalarField,
    range: PgmRange,
    mut out: W,
) -> io::Result<()> {
    let (cols, rows) = (field.grid.cols(), field.grid.rows());
    write!(out, "P5\n{cols} {rows}\n65535\n")?;
    let mut row_bytes = Vec::with_capacity(cols * 2);
    for r in (0..rows).rev() {
        row_bytes.clear();
        for c in 0..cols {
            row_bytes.extend_from_slice(&range.level(field.get(c, r)).to_be_bytes());
        }
        out.write_all(&row_bytes)?;
    }
    out.flush()
}

pub fn pgm_sidecar_path(pgm: &Path) -> PathBuf {
    let mut s = pgm.as_os_str().to_owned();
    s.push(".range.txt");
    PathBuf::from(s)
}

pub fn pgm_sidecar_text(range: PgmRange) -> String {
    format!(
        "min_db {}\nmax_db {}\nlevel 0 = excluded cell\nlevel 1..65535 = min_db..max_db, linear\nrows top to bottom = decreasing y\n",
        range.min_db, range.max_db
    )
}

/// Writes the PGM and its range sidecar next to it.
pub fn save_field_pgm(field: &ScalarField, range: PgmRange, path: &Path) -> io::Result<()> {
    let file = io::BufWriter::new(fs::File::create(path)?);
    write_field_pgm(field, range, file)?;
    fs::write(pgm_sidecar_path(path), pgm_sidecar_text(range))
}

/// `contour,vertex,x,y` rows.
pub fn write_contours_csv<W: Write>(contours: &[Contour], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["contour", "vertex", "x", "y"])?;
    for (ci, c) in contours.iter().enumerate() {
        for (vi, p) in c.points.iter().enumerate() {
            w.write_record([
                ci.to_string(),
                vi.to_string(),
                p.x.to_string(),
                p.y.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
