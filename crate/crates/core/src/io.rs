//! Tidy CSV import and export. Numbers are written with 17 significant
//! digits so that values survive a round trip exactly.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimators::SpectralEstimate;
use crate::fields::FieldGrid;
use crate::lattice::LatticeSpec;
use crate::spectra::PeriodogramGrid;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `t1,t2,value` rows in lattice order.
pub fn write_field<W: Write>(field: &FieldGrid, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t1", "t2", "value"])?;
    for t in field.spec().indices() {
        w.write_record([t.j1.to_string(), t.j2.to_string(), num(field.get(t.j1, t.j2))])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_field_file(field: &FieldGrid, path: &Path) -> Result<()> {
    write_field(field, std::fs::File::create(path)?)
}

/// Reads `t1,t2,value` rows in any order. Without `expected`, the lattice is
/// taken from the largest indices; every site must appear exactly once.
pub fn read_field<R: Read>(input: R, expected: Option<LatticeSpec>) -> Result<FieldGrid> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["t1", "t2", "value"] {
        return Err(Error::Config(format!(
            "field CSV header must be `t1,t2,value`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::Config(format!("field CSV data row {}: {what}", line + 1));
        if rec.len() != 3 {
            return Err(bad("expected 3 columns"));
        }
        let t1: usize = rec[0].trim().parse().map_err(|_| bad("t1 is not a positive integer"))?;
        let t2: usize = rec[1].trim().parse().map_err(|_| bad("t2 is not a positive integer"))?;
        let v: f64 = rec[2].trim().parse().map_err(|_| bad("value is not a number"))?;
        if t1 == 0 || t2 == 0 {
            return Err(bad("indices start at 1"));
        }
        rows.push((t1, t2, v));
    }
    let d1 = rows.iter().map(|r| r.0).max().unwrap_or(0);
    let d2 = rows.iter().map(|r| r.1).max().unwrap_or(0);
    let spec = match expected {
        Some(s) => {
            if d1 > s.d1() || d2 > s.d2() || rows.len() != s.size() {
                return Err(Error::LatticeMismatch(format!(
                    "CSV holds {} rows with indices up to {d1}x{d2}, declared lattice is {s}",
                    rows.len()
                )));
            }
            s
        }
        None => LatticeSpec::new(d1.max(1), d2.max(1))?,
    };
    let mut values = vec![f64::NAN; spec.size()];
    let mut seen = vec![false; spec.size()];
    for (t1, t2, v) in rows {
        let o = spec.offset(t1, t2);
        if seen[o] {
            return Err(Error::LatticeMismatch(format!("site ({t1}, {t2}) appears twice")));
        }
        seen[o] = true;
        values[o] = v;
    }
    if let Some(o) = seen.iter().position(|s| !s) {
        let t = spec.index_at(o);
        return Err(Error::LatticeMismatch(format!("site ({}, {}) is missing for lattice {spec}", t.j1, t.j2)));
    }
    FieldGrid::new(spec, values)
}

pub fn read_field_file(path: &Path, expected: Option<LatticeSpec>) -> Result<FieldGrid> {
    read_field(std::fs::File::open(path)?, expected)
}

/// Writes `j1,j2,lambda1,lambda2,I` rows in lattice order.
pub fn write_periodogram<W: Write>(pg: &PeriodogramGrid, out: W) -> Result<()> {
    let spec = pg.spec();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["j1", "j2", "lambda1", "lambda2", "I"])?;
    for j in spec.indices() {
        let (l1, l2) = spec.frequency_of(j);
        w.write_record([
            j.j1.to_string(),
            j.j2.to_string(),
            num(l1),
            num(l2),
            num(pg.at(j.j1 as i64, j.j2 as i64)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_periodogram_file(pg: &PeriodogramGrid, path: &Path) -> Result<()> {
    write_periodogram(pg, std::fs::File::create(path)?)
}

/// Writes `lambda1,lambda2,f_hat` rows, plus `f_true,abs_err` when the
/// estimate carries the true spectrum.
pub fn write_estimate<W: Write>(est: &SpectralEstimate, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match &est.truth {
        None => {
            w.write_record(["lambda1", "lambda2", "f_hat"])?;
            for (l, v) in est.points.iter().zip(&est.values) {
                w.write_record([num(l.0), num(l.1), num(*v)])?;
            }
        }
        Some(truth) => {
            w.write_record(["lambda1", "lambda2", "f_hat", "f_true", "abs_err"])?;
            for ((l, v), t) in est.points.iter().zip(&est.values).zip(truth) {
                w.write_record([num(l.0), num(l.1), num(*v), num(*t), num((v - t).abs())])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_estimate_file(est: &SpectralEstimate, path: &Path) -> Result<()> {
    write_estimate(est, std::fs::File::create(path)?)
}
