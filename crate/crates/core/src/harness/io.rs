//! Energy-series CSV and field snapshots.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::diagnostics::StepRecord;
use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};

pub const SERIES_HEADER: [&str; 11] = [
    "step", "t", "E_orig", "E_mod", "E2", "D_be", "D_bdf", "r_drift", "mass", "min_phi", "max_phi",
];

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Writes [`StepRecord`]s as CSV rows; missing values are empty fields.
pub struct SeriesWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> SeriesWriter<W> {
    pub fn new(w: W) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(SERIES_HEADER)?;
        Ok(SeriesWriter { inner })
    }

    pub fn write(&mut self, r: &StepRecord) -> Result<()> {
        self.inner.write_record([
            r.step.to_string(),
            num(r.t),
            num(r.e_orig),
            num(r.e_mod),
            opt(r.e2),
            opt(r.d_be),
            opt(r.d_bdf),
            num(r.r_drift),
            num(r.mass),
            num(r.min_phi),
            num(r.max_phi),
        ])?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io("<series>", e))
    }

    pub fn into_inner(self) -> Result<W> {
        self.inner.into_inner().map_err(|e| Error::io("<series>", e.into_error()))
    }
}

pub fn series_to_string(records: &[StepRecord]) -> Result<String> {
    let mut w = SeriesWriter::new(Vec::new())?;
    for r in records {
        w.write(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?).expect("csv output is utf-8"))
}

pub fn write_series(path: &Path, records: &[StepRecord]) -> Result<()> {
    create_parent(path)?;
    std::fs::write(path, series_to_string(records)?).map_err(|e| Error::io(path, e))
}

pub fn read_series(path: &Path) -> Result<Vec<StepRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header = rdr.headers()?.clone();
    if header.iter().ne(SERIES_HEADER) {
        return Err(Error::Snapshot(format!("{}: unexpected series header", path.display())));
    }
    let bad = |what: &str| Error::Snapshot(format!("{}: bad {what}", path.display()));
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let f = |i: usize| -> Result<f64> { row[i].parse().map_err(|_| bad(SERIES_HEADER[i])) };
        let o = |i: usize| -> Result<Option<f64>> {
            if row[i].is_empty() {
                Ok(None)
            } else {
                f(i).map(Some)
            }
        };
        out.push(StepRecord {
            step: row[0].parse().map_err(|_| bad("step"))?,
            t: f(1)?,
            e_orig: f(2)?,
            e_mod: f(3)?,
            e2: o(4)?,
            d_be: o(5)?,
            d_bdf: o(6)?,
            r_drift: f(7)?,
            mass: f(8)?,
            min_phi: f(9)?,
            max_phi: f(10)?,
        });
    }
    Ok(out)
}

pub(crate) fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)),
        _ => Ok(()),
    }
}

/// Writes `nx ny lx ly t` followed by one row of `ny` values per `ix`.
/// Seventeen significant digits make the round trip exact.
pub fn write_snapshot(path: &Path, field: &Field, t: f64) -> Result<()> {
    create_parent(path)?;
    let g = field.grid();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "{} {} {:.16e} {:.16e} {:.16e}", g.nx(), g.ny(), g.lx(), g.ly(), t).map_err(io)?;
    for row in field.values().chunks(g.ny()) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", line.join(" ")).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<(Field, f64)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let bad = |msg: &str| Error::Snapshot(format!("{}: {msg}", path.display()));
    let header = lines.next().ok_or_else(|| bad("empty file"))?.map_err(|e| Error::io(path, e))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 5 {
        return Err(bad("header must be `nx ny lx ly t`"));
    }
    let nx: usize = h[0].parse().map_err(|_| bad("bad nx"))?;
    let ny: usize = h[1].parse().map_err(|_| bad("bad ny"))?;
    let lx: f64 = h[2].parse().map_err(|_| bad("bad lx"))?;
    let ly: f64 = h[3].parse().map_err(|_| bad("bad ly"))?;
    let t: f64 = h[4].parse().map_err(|_| bad("bad t"))?;
    let grid = Grid::new(nx, ny, lx, ly)?;
    let mut values = Vec::with_capacity(grid.len());
    for line in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        for tok in line.split_whitespace() {
            values.push(tok.parse::<f64>().map_err(|_| bad("bad value"))?);
        }
    }
    if values.len() != grid.len() {
        return Err(bad(&format!("expected {} values, found {}", grid.len(), values.len())));
    }
    Ok((Field::new(grid, values)?, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(step: usize) -> StepRecord {
        StepRecord {
            step,
            t: 0.1 * step as f64,
            e_orig: 1.0 / 3.0,
            e_mod: 2.5e-300,
            e2: None,
            d_be: Some(-1.25e-17),
            d_bdf: None,
            r_drift: f64::NAN,
            mass: 0.0,
            min_phi: -1.0,
            max_phi: 1.0,
        }
    }

    #[test]
    fn series_format() {
        let s = series_to_string(&[rec(1)]).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "step,t,E_orig,E_mod,E2,D_be,D_bdf,r_drift,mass,min_phi,max_phi");
        assert_eq!(lines.next().unwrap(), "1,1e-1,3.333333333333333e-1,2.5e-300,,-1.25e-17,,NaN,0e0,-1e0,1e0");
    }

    #[test]
    fn series_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let recs = vec![rec(0), rec(1), rec(2)];
        write_series(&path, &recs).unwrap();
        let back = read_series(&path).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back[1].e_orig, recs[1].e_orig);
        assert_eq!(back[1].d_be, recs[1].d_be);
        assert_eq!(back[1].e2, None);
        assert!(back[2].r_drift.is_nan());
    }

    #[test]
    fn snapshot_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/phi.txt");
        let g = Grid::new(8, 4, std::f64::consts::PI, 6.4).unwrap();
        let f = Field::from_fn(g, |x, y| (x * 1.7).sin() / 3.0 + y.exp() * 1e-9).unwrap();
        write_snapshot(&path, &f, 0.7).unwrap();
        let (back, t) = read_snapshot(&path).unwrap();
        assert_eq!(t, 0.7);
        assert_eq!(back.grid(), f.grid());
        assert!(back.values().iter().zip(f.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn truncated_snapshot_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("phi.txt");
        std::fs::write(&path, "4 4 1 1 0\n1 2 3 4\n").unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::Snapshot(_))));
    }
}
