//! CSV writers and readers for the fixed export schemas. Floats serialize
//! with 17 significant digits, which reproduces every `f64` exactly on
//! re-read; each writer has a matching reader so files can prove themselves.
//!
//! Schemas (headers mandatory, UTF-8, LF line endings):
//! - curves (knot, field lines): `t,x,y,z`
//! - zero candidates: `x,y,z,residual,knot_distance,refined`
//! - field glyphs: `x,y,z,Xx,Xy,Xz`
//! - point clouds (boundary samplings): `x,y,z`

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::CliError;

/// 17 significant digits: the shortest length that round-trips every `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Values both sides of a round-trip must agree within (they agree exactly;
/// the slack guards the contract, not the implementation).
pub const ROUNDTRIP_TOL: f64 = 1e-12;

/// One curve sample: parameter and position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// One zero candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateRow {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub residual: f64,
    pub knot_distance: f64,
    pub refined: bool,
}

/// One field glyph: position and vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlyphRow {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub xx: f64,
    pub xy: f64,
    pub xz: f64,
}

/// One bare point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointRow {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

fn open_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn open_reader(path: &Path) -> Result<csv::Reader<BufReader<File>>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Reader::from_reader(BufReader::new(file)))
}

fn csv_err(path: &Path, err: csv::Error) -> CliError {
    match err.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::RoundTrip {
            path: path.to_path_buf(),
            detail: format!("malformed CSV: {other:?}"),
        },
    }
}

fn parse_f64(path: &Path, field: &str) -> Result<f64, CliError> {
    field.parse().map_err(|_| CliError::RoundTrip {
        path: path.to_path_buf(),
        detail: format!("not a number: {field:?}"),
    })
}

fn expect_header(path: &Path, got: &csv::StringRecord, want: &[&str]) -> Result<(), CliError> {
    if got.iter().eq(want.iter().copied()) {
        Ok(())
    } else {
        Err(CliError::RoundTrip {
            path: path.to_path_buf(),
            detail: format!("header {got:?}, expected {want:?}"),
        })
    }
}

fn expect_width(path: &Path, record: &csv::StringRecord, want: usize) -> Result<(), CliError> {
    if record.len() == want {
        Ok(())
    } else {
        Err(CliError::RoundTrip {
            path: path.to_path_buf(),
            detail: format!("row has {} fields, expected {want}", record.len()),
        })
    }
}

pub fn write_curve_csv(path: &Path, rows: &[CurveRow]) -> Result<(), CliError> {
    let mut w = open_writer(path)?;
    w.write_record(["t", "x", "y", "z"])
        .map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([fmt_f64(r.t), fmt_f64(r.x), fmt_f64(r.y), fmt_f64(r.z)])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_curve_csv(path: &Path) -> Result<Vec<CurveRow>, CliError> {
    let mut reader = open_reader(path)?;
    expect_header(path, reader.headers().map_err(|e| csv_err(path, e))?, &["t", "x", "y", "z"])?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        expect_width(path, &record, 4)?;
        rows.push(CurveRow {
            t: parse_f64(path, &record[0])?,
            x: parse_f64(path, &record[1])?,
            y: parse_f64(path, &record[2])?,
            z: parse_f64(path, &record[3])?,
        });
    }
    Ok(rows)
}

pub fn write_candidates_csv(path: &Path, rows: &[CandidateRow]) -> Result<(), CliError> {
    let mut w = open_writer(path)?;
    w.write_record(["x", "y", "z", "residual", "knot_distance", "refined"])
        .map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            fmt_f64(r.x),
            fmt_f64(r.y),
            fmt_f64(r.z),
            fmt_f64(r.residual),
            fmt_f64(r.knot_distance),
            r.refined.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_candidates_csv(path: &Path) -> Result<Vec<CandidateRow>, CliError> {
    let mut reader = open_reader(path)?;
    expect_header(
        path,
        reader.headers().map_err(|e| csv_err(path, e))?,
        &["x", "y", "z", "residual", "knot_distance", "refined"],
    )?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        expect_width(path, &record, 6)?;
        let refined = match &record[5] {
            "true" => true,
            "false" => false,
            other => {
                return Err(CliError::RoundTrip {
                    path: path.to_path_buf(),
                    detail: format!("refined column must be true/false, got {other:?}"),
                })
            }
        };
        rows.push(CandidateRow {
            x: parse_f64(path, &record[0])?,
            y: parse_f64(path, &record[1])?,
            z: parse_f64(path, &record[2])?,
            residual: parse_f64(path, &record[3])?,
            knot_distance: parse_f64(path, &record[4])?,
            refined,
        });
    }
    Ok(rows)
}

pub fn write_glyphs_csv(path: &Path, rows: &[GlyphRow]) -> Result<(), CliError> {
    let mut w = open_writer(path)?;
    w.write_record(["x", "y", "z", "Xx", "Xy", "Xz"])
        .map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            fmt_f64(r.x),
            fmt_f64(r.y),
            fmt_f64(r.z),
            fmt_f64(r.xx),
            fmt_f64(r.xy),
            fmt_f64(r.xz),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_glyphs_csv(path: &Path) -> Result<Vec<GlyphRow>, CliError> {
    let mut reader = open_reader(path)?;
    expect_header(
        path,
        reader.headers().map_err(|e| csv_err(path, e))?,
        &["x", "y", "z", "Xx", "Xy", "Xz"],
    )?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        expect_width(path, &record, 6)?;
        rows.push(GlyphRow {
            x: parse_f64(path, &record[0])?,
            y: parse_f64(path, &record[1])?,
            z: parse_f64(path, &record[2])?,
            xx: parse_f64(path, &record[3])?,
            xy: parse_f64(path, &record[4])?,
            xz: parse_f64(path, &record[5])?,
        });
    }
    Ok(rows)
}

pub fn write_points_csv(path: &Path, rows: &[PointRow]) -> Result<(), CliError> {
    let mut w = open_writer(path)?;
    w.write_record(["x", "y", "z"]).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([fmt_f64(r.x), fmt_f64(r.y), fmt_f64(r.z)])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_points_csv(path: &Path) -> Result<Vec<PointRow>, CliError> {
    let mut reader = open_reader(path)?;
    expect_header(path, reader.headers().map_err(|e| csv_err(path, e))?, &["x", "y", "z"])?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        expect_width(path, &record, 3)?;
        rows.push(PointRow {
            x: parse_f64(path, &record[0])?,
            y: parse_f64(path, &record[1])?,
            z: parse_f64(path, &record[2])?,
        });
    }
    Ok(rows)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= ROUNDTRIP_TOL
}

fn roundtrip_failure(path: &Path, index: usize) -> CliError {
    CliError::RoundTrip {
        path: path.to_path_buf(),
        detail: format!("row {index} deviates beyond {ROUNDTRIP_TOL:e} on re-read"),
    }
}

fn check_len(path: &Path, got: usize, want: usize) -> Result<(), CliError> {
    if got == want {
        Ok(())
    } else {
        Err(CliError::RoundTrip {
            path: path.to_path_buf(),
            detail: format!("re-read produced {got} rows, wrote {want}"),
        })
    }
}

/// Re-reads a written curve file and compares against the source rows.
pub fn verify_curve_csv(path: &Path, rows: &[CurveRow]) -> Result<(), CliError> {
    let back = read_curve_csv(path)?;
    check_len(path, back.len(), rows.len())?;
    for (i, (a, b)) in rows.iter().zip(&back).enumerate() {
        if !(close(a.t, b.t) && close(a.x, b.x) && close(a.y, b.y) && close(a.z, b.z)) {
            return Err(roundtrip_failure(path, i));
        }
    }
    Ok(())
}

pub fn verify_candidates_csv(path: &Path, rows: &[CandidateRow]) -> Result<(), CliError> {
    let back = read_candidates_csv(path)?;
    check_len(path, back.len(), rows.len())?;
    for (i, (a, b)) in rows.iter().zip(&back).enumerate() {
        let ok = close(a.x, b.x)
            && close(a.y, b.y)
            && close(a.z, b.z)
            && close(a.residual, b.residual)
            && close(a.knot_distance, b.knot_distance)
            && a.refined == b.refined;
        if !ok {
            return Err(roundtrip_failure(path, i));
        }
    }
    Ok(())
}

pub fn verify_glyphs_csv(path: &Path, rows: &[GlyphRow]) -> Result<(), CliError> {
    let back = read_glyphs_csv(path)?;
    check_len(path, back.len(), rows.len())?;
    for (i, (a, b)) in rows.iter().zip(&back).enumerate() {
        let ok = close(a.x, b.x)
            && close(a.y, b.y)
            && close(a.z, b.z)
            && close(a.xx, b.xx)
            && close(a.xy, b.xy)
            && close(a.xz, b.xz);
        if !ok {
            return Err(roundtrip_failure(path, i));
        }
    }
    Ok(())
}

pub fn verify_points_csv(path: &Path, rows: &[PointRow]) -> Result<(), CliError> {
    let back = read_points_csv(path)?;
    check_len(path, back.len(), rows.len())?;
    for (i, (a, b)) in rows.iter().zip(&back).enumerate() {
        if !(close(a.x, b.x) && close(a.y, b.y) && close(a.z, b.z)) {
            return Err(roundtrip_failure(path, i));
        }
    }
    Ok(())
}
