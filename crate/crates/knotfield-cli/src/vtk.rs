//! Legacy-VTK ASCII POLYDATA writer and a minimal reader. The legacy format
//! (version 3.0 header) is writable without dependencies and opens in common
//! viewers; the reader exists so every written file can be re-read and
//! compared against the in-memory data.

use std::fs;
use std::path::Path;

use crate::csvio::{fmt_f64, ROUNDTRIP_TOL};
use crate::CliError;

/// In-memory mirror of the subset of POLYDATA the tool writes: points, one
/// optional set of polylines, optional vertex cells, optional per-point
/// vectors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolyData {
    pub points: Vec<[f64; 3]>,
    /// Each polyline as a list of point indices.
    pub lines: Vec<Vec<usize>>,
    /// Indices rendered as free-standing vertices.
    pub vertices: Vec<usize>,
    /// Per-point vector data: (array name, one vector per point).
    pub vectors: Option<(String, Vec<[f64; 3]>)>,
}

impl PolyData {
    /// A polyline through all points that closes back to the first.
    pub fn closed_polyline(points: Vec<[f64; 3]>) -> Self {
        let mut cell: Vec<usize> = (0..points.len()).collect();
        if points.len() > 1 {
            cell.push(0);
        }
        PolyData {
            points,
            lines: vec![cell],
            ..PolyData::default()
        }
    }

    /// A polyline through all points, left open.
    pub fn open_polyline(points: Vec<[f64; 3]>) -> Self {
        let cell: Vec<usize> = (0..points.len()).collect();
        let lines = if points.len() >= 2 { vec![cell] } else { Vec::new() };
        PolyData {
            points,
            lines,
            ..PolyData::default()
        }
    }

    /// Free-standing points (every point becomes a vertex cell).
    pub fn point_cloud(points: Vec<[f64; 3]>) -> Self {
        let vertices = (0..points.len()).collect();
        PolyData {
            points,
            vertices,
            ..PolyData::default()
        }
    }

    /// A point cloud carrying one vector per point.
    pub fn glyphs(points: Vec<[f64; 3]>, name: &str, vectors: Vec<[f64; 3]>) -> Self {
        assert_eq!(points.len(), vectors.len());
        let mut data = PolyData::point_cloud(points);
        data.vectors = Some((name.to_string(), vectors));
        data
    }
}

/// Writes the dataset as legacy ASCII POLYDATA.
pub fn write_polydata(path: &Path, title: &str, data: &PolyData) -> Result<(), CliError> {
    if let Some((_, vectors)) = &data.vectors {
        if vectors.len() != data.points.len() {
            return Err(CliError::RoundTrip {
                path: path.to_path_buf(),
                detail: format!(
                    "{} vectors for {} points",
                    vectors.len(),
                    data.points.len()
                ),
            });
        }
    }
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    let title_line: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    out.push_str(&title_line);
    out.push('\n');
    out.push_str("ASCII\nDATASET POLYDATA\n");
    out.push_str(&format!("POINTS {} double\n", data.points.len()));
    for p in &data.points {
        out.push_str(&format!("{} {} {}\n", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2])));
    }
    if !data.lines.is_empty() {
        let total: usize = data.lines.iter().map(|c| c.len() + 1).sum();
        out.push_str(&format!("LINES {} {}\n", data.lines.len(), total));
        for cell in &data.lines {
            out.push_str(&cell.len().to_string());
            for index in cell {
                out.push(' ');
                out.push_str(&index.to_string());
            }
            out.push('\n');
        }
    }
    if !data.vertices.is_empty() {
        out.push_str(&format!(
            "VERTICES {} {}\n",
            data.vertices.len(),
            2 * data.vertices.len()
        ));
        for index in &data.vertices {
            out.push_str(&format!("1 {index}\n"));
        }
    }
    if let Some((name, vectors)) = &data.vectors {
        out.push_str(&format!("POINT_DATA {}\n", data.points.len()));
        out.push_str(&format!("VECTORS {name} double\n"));
        for v in vectors {
            out.push_str(&format!("{} {} {}\n", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2])));
        }
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

struct Tokens<'a> {
    path: &'a Path,
    items: Vec<&'a str>,
    cursor: usize,
}

impl<'a> Tokens<'a> {
    fn error(&self, detail: String) -> CliError {
        CliError::RoundTrip {
            path: self.path.to_path_buf(),
            detail,
        }
    }

    fn peek(&self) -> Option<&'a str> {
        self.items.get(self.cursor).copied()
    }

    fn next(&mut self, what: &str) -> Result<&'a str, CliError> {
        let token = self
            .peek()
            .ok_or_else(|| self.error(format!("unexpected end of file, wanted {what}")))?;
        self.cursor += 1;
        Ok(token)
    }

    fn expect(&mut self, literal: &str) -> Result<(), CliError> {
        let token = self.next(literal)?;
        if token == literal {
            Ok(())
        } else {
            Err(self.error(format!("expected {literal:?}, found {token:?}")))
        }
    }

    fn usize(&mut self, what: &str) -> Result<usize, CliError> {
        let token = self.next(what)?;
        token
            .parse()
            .map_err(|_| self.error(format!("{what} must be an integer, found {token:?}")))
    }

    fn f64(&mut self, what: &str) -> Result<f64, CliError> {
        let token = self.next(what)?;
        token
            .parse()
            .map_err(|_| self.error(format!("{what} must be a number, found {token:?}")))
    }

    fn triples(&mut self, n: usize, what: &str) -> Result<Vec<[f64; 3]>, CliError> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push([self.f64(what)?, self.f64(what)?, self.f64(what)?]);
        }
        Ok(out)
    }
}

/// Parses a file written by [`write_polydata`] (plus any other legacy ASCII
/// POLYDATA restricted to POINTS/LINES/VERTICES and one VECTORS array).
pub fn read_polydata(path: &Path) -> Result<PolyData, CliError> {
    let body = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |detail: String| CliError::RoundTrip {
        path: path.to_path_buf(),
        detail,
    };

    let mut lines = body.lines();
    let header = lines.next().unwrap_or_default();
    if !header.starts_with("# vtk DataFile Version") {
        return Err(bad(format!("not a VTK file: first line {header:?}")));
    }
    let _title = lines.next().unwrap_or_default();
    let encoding = lines.next().unwrap_or_default().trim();
    if encoding != "ASCII" {
        return Err(bad(format!("expected ASCII encoding, found {encoding:?}")));
    }
    let rest: String = lines.collect::<Vec<_>>().join("\n");
    let mut tokens = Tokens {
        path,
        items: rest.split_whitespace().collect(),
        cursor: 0,
    };
    tokens.expect("DATASET")?;
    tokens.expect("POLYDATA")?;

    let mut data = PolyData::default();
    let mut seen_points = false;
    while let Some(keyword) = tokens.peek() {
        match keyword {
            "POINTS" => {
                tokens.expect("POINTS")?;
                let n = tokens.usize("point count")?;
                let _dtype = tokens.next("point data type")?;
                data.points = tokens.triples(n, "point coordinate")?;
                seen_points = true;
            }
            "LINES" => {
                tokens.expect("LINES")?;
                let n_cells = tokens.usize("line cell count")?;
                let total = tokens.usize("line index total")?;
                let mut consumed = 0usize;
                for _ in 0..n_cells {
                    let len = tokens.usize("polyline length")?;
                    let mut cell = Vec::with_capacity(len);
                    for _ in 0..len {
                        cell.push(tokens.usize("polyline index")?);
                    }
                    consumed += len + 1;
                    data.lines.push(cell);
                }
                if consumed != total {
                    return Err(bad(format!(
                        "LINES advertises {total} integers but cells hold {consumed}"
                    )));
                }
            }
            "VERTICES" => {
                tokens.expect("VERTICES")?;
                let n_cells = tokens.usize("vertex cell count")?;
                let _total = tokens.usize("vertex index total")?;
                for _ in 0..n_cells {
                    let len = tokens.usize("vertex cell length")?;
                    if len != 1 {
                        return Err(bad(format!("vertex cells must hold 1 index, found {len}")));
                    }
                    data.vertices.push(tokens.usize("vertex index")?);
                }
            }
            "POINT_DATA" => {
                tokens.expect("POINT_DATA")?;
                let n = tokens.usize("point data count")?;
                tokens.expect("VECTORS")?;
                let name = tokens.next("vector array name")?.to_string();
                let _dtype = tokens.next("vector data type")?;
                data.vectors = Some((name, tokens.triples(n, "vector component")?));
            }
            other => {
                return Err(bad(format!("unsupported section {other:?}")));
            }
        }
    }
    if !seen_points {
        return Err(bad("file has no POINTS section".to_string()));
    }
    for cell in &data.lines {
        for &index in cell {
            if index >= data.points.len() {
                return Err(bad(format!("line index {index} out of range")));
            }
        }
    }
    for &index in &data.vertices {
        if index >= data.points.len() {
            return Err(bad(format!("vertex index {index} out of range")));
        }
    }
    Ok(data)
}

fn triples_close(a: &[[f64; 3]], b: &[[f64; 3]]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(u, v)| (0..3).all(|i| (u[i] - v[i]).abs() <= ROUNDTRIP_TOL))
}

/// Re-reads a written file and compares it against the source dataset.
pub fn verify_polydata(path: &Path, data: &PolyData) -> Result<(), CliError> {
    let back = read_polydata(path)?;
    let mut detail = None;
    if !triples_close(&back.points, &data.points) {
        detail = Some("points deviate on re-read");
    } else if back.lines != data.lines {
        detail = Some("line connectivity deviates on re-read");
    } else if back.vertices != data.vertices {
        detail = Some("vertex cells deviate on re-read");
    } else {
        match (&back.vectors, &data.vectors) {
            (None, None) => {}
            (Some((bn, bv)), Some((dn, dv))) if bn == dn && triples_close(bv, dv) => {}
            _ => detail = Some("vector data deviates on re-read"),
        }
    }
    match detail {
        None => Ok(()),
        Some(detail) => Err(CliError::RoundTrip {
            path: path.to_path_buf(),
            detail: detail.to_string(),
        }),
    }
}
