//! Subcommand implementations. Each returns `Ok(true)` when every check
//! passed, `Ok(false)` when a mathematical check failed, and `Err` for
//! invalid configuration or filesystem trouble; `main` maps these onto the
//! 0/1/2 exit-code contract. Every written file is re-read and compared
//! against the in-memory data before the command reports success.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use knotfield::fields::{components_from_cartesian, field_x};
use knotfield::geometry::{in_annulus, torus_knot_point, CartesianPoint, KnotSpec};
use knotfield::linalg::Mat3;
use knotfield::metric::{metric_g, volume_element_at};
use knotfield::sample::{annulus_points, Lcg};
use knotfield::zeroset::{certify_zero_set, dist_to_knot, ZeroSetConfig};
use serde::{Deserialize, Serialize};

use crate::checks::run_all_checks;
use crate::config::{
    require_non_negative, require_positive, require_resolution, require_samples, validated_spec,
    EvalArgs, ExportArgs, FieldlinesArgs, Format, KnotArgs, VerifyArgs, ZerosetArgs,
};
use crate::csvio::{
    verify_candidates_csv, verify_curve_csv, verify_glyphs_csv, verify_points_csv,
    write_candidates_csv, write_curve_csv, write_glyphs_csv, write_points_csv, CandidateRow,
    CurveRow, GlyphRow, PointRow,
};
use crate::fieldline::{integrate, FieldLine, Termination};
use crate::report::{
    read_json_file, write_json_file, RangeReport, RunSection, SpecJson, VerifyReport, Versions,
    ZeroSetJson,
};
use crate::vtk::{verify_polydata, write_polydata, PolyData};
use crate::CliError;

/// Sample points for glyph exports keep this margin from the boundary.
const GLYPH_MARGIN: f64 = 1e-3;
/// Radial distances of the two boundary tori around the core circle.
const BOUNDARY_RADII: [(f64, &str); 2] = [(0.5, "inner"), (1.5, "outer")];

fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// Uniform closed sampling of the knot: `n` points, the closure edge implied.
fn knot_rows(p: i64, q: i64, n: usize) -> Vec<CurveRow> {
    (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            let pt = torus_knot_point(p, q, t);
            CurveRow {
                t,
                x: pt.x,
                y: pt.y,
                z: pt.z,
            }
        })
        .collect()
}

fn curve_points(rows: &[CurveRow]) -> Vec<[f64; 3]> {
    rows.iter().map(|r| [r.x, r.y, r.z]).collect()
}

/// A closed curve export in JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct KnotJson {
    p: i64,
    q: i64,
    n_samples: usize,
    closed: bool,
    points: Vec<CurvePointJson>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct CurvePointJson {
    t: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl From<&CurveRow> for CurvePointJson {
    fn from(r: &CurveRow) -> Self {
        CurvePointJson {
            t: r.t,
            x: r.x,
            y: r.y,
            z: r.z,
        }
    }
}

/// A field-line export in JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct FieldLineJson {
    spec: SpecJson,
    start: [f64; 3],
    step: f64,
    span: f64,
    termination: Termination,
    warning: Option<String>,
    n_points: usize,
    arc_length: f64,
    points: Vec<[f64; 3]>,
    speeds: Vec<f64>,
}

/// A boundary-torus point cloud in JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct BoundaryJson {
    rho: f64,
    n_toroidal: usize,
    n_poloidal: usize,
    points: Vec<[f64; 3]>,
}

/// Field glyph samples in JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct GlyphsJson {
    spec: SpecJson,
    seed: u64,
    points: Vec<GlyphPointJson>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct GlyphPointJson {
    x: f64,
    y: f64,
    z: f64,
    #[serde(rename = "Xx")]
    xx: f64,
    #[serde(rename = "Xy")]
    xy: f64,
    #[serde(rename = "Xz")]
    xz: f64,
}

/// Writes JSON, re-reads it, and insists the value survived.
fn write_json_verified<T>(path: &Path, value: &T) -> Result<(), CliError>
where
    T: Serialize + serde::de::DeserializeOwned + PartialEq,
{
    write_json_file(path, value)?;
    let back: T = read_json_file(path)?;
    if back == *value {
        Ok(())
    } else {
        Err(CliError::RoundTrip {
            path: path.to_path_buf(),
            detail: "JSON value deviates on re-read".to_string(),
        })
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<bool, CliError> {
    require_positive("tol-curl", args.tol_curl)?;
    require_positive("tol-zero", args.tol_zero)?;
    require_resolution(args.resolution)?;
    require_samples("samples", args.samples, 8)?;
    ensure_dir(&args.out.out)?;

    let mut runs = Vec::new();
    let mut all_pass = true;
    for k in args.k.k.values() {
        let spec = validated_spec(args.spec.p, args.spec.q, k)?;
        let checks = run_all_checks(
            &spec,
            args.seed,
            args.samples,
            args.resolution,
            args.tol_curl,
            args.tol_zero,
        );
        println!("spec (p={}, q={}, k={}):", spec.p, spec.q, spec.k);
        for check in &checks {
            let tag = if check.pass { "[PASS]" } else { "[FAIL]" };
            all_pass &= check.pass;
            match check.tolerance {
                Some(tol) => println!(
                    "  {tag} {}: max {:.3e} vs tolerance {tol:.1e} ({} samples)",
                    check.name, check.max_residual, check.n_samples
                ),
                None => println!(
                    "  {tag} {}: max {:.3e} (reported, unbounded; {} samples)",
                    check.name, check.max_residual, check.n_samples
                ),
            }
        }
        runs.push(RunSection {
            spec: (&spec).into(),
            checks,
        });
    }

    let path = args.out.out.join(format!(
        "verify_p{}_q{}_{}.json",
        args.spec.p,
        args.spec.q,
        args.k.k.stem()
    ));
    if args.k.k.is_single() {
        let run = runs.pop().expect("single range yields one run");
        let report = VerifyReport {
            spec: run.spec,
            checks: run.checks,
            versions: Versions::current(),
            seed: args.seed,
        };
        write_json_verified(&path, &report)?;
    } else {
        let report = RangeReport {
            versions: Versions::current(),
            seed: args.seed,
            runs,
        };
        write_json_verified(&path, &report)?;
    }
    println!("wrote {}", path.display());
    Ok(all_pass)
}

pub fn cmd_zeroset(args: &ZerosetArgs) -> Result<bool, CliError> {
    require_positive("tol-zero", args.tol_zero)?;
    require_resolution(args.resolution)?;
    if let Some(threshold) = args.threshold {
        require_non_negative("threshold", threshold)?;
    }
    ensure_dir(&args.out.out)?;

    let mut all_pass = true;
    for k in args.k.k.values() {
        let spec = validated_spec(args.spec.p, args.spec.q, k)?;
        let config = ZeroSetConfig {
            resolution: args.resolution,
            forward_tol: args.tol_zero,
            threshold: args.threshold,
            ..ZeroSetConfig::default()
        };
        let report = certify_zero_set(&spec, &config);

        let rows: Vec<CandidateRow> = report
            .candidates
            .iter()
            .map(|c| CandidateRow {
                x: c.point.x,
                y: c.point.y,
                z: c.point.z,
                residual: c.residual,
                knot_distance: c.knot_distance,
                refined: c.refined,
            })
            .collect();
        let stem = format!("p{}_q{}_k{}", spec.p, spec.q, spec.k);
        let csv_path = args.out.out.join(format!("zeros_{stem}.csv"));
        write_candidates_csv(&csv_path, &rows)?;
        verify_candidates_csv(&csv_path, &rows)?;
        let json_path = args.out.out.join(format!("zeroset_{stem}.json"));
        write_json_verified(&json_path, &ZeroSetJson::from_report(&report, &spec, args.seed))?;

        let pass = report.pass && !report.degenerate;
        all_pass &= pass;
        let tag = if pass { "[PASS]" } else { "[FAIL]" };
        println!(
            "{tag} zero set (p={}, q={}, k={}): {} candidates, forward max {:.3e}, \
             reverse max {:.3e}, coverage gap {:.4}{}",
            spec.p,
            spec.q,
            spec.k,
            rows.len(),
            report.forward_max_residual,
            report.max_knot_distance,
            report.max_param_gap,
            if report.degenerate {
                " — degenerate: no candidates survived the threshold"
            } else {
                ""
            }
        );
        println!("wrote {}", csv_path.display());
        println!("wrote {}", json_path.display());
    }
    Ok(all_pass)
}

pub fn cmd_knot(args: &KnotArgs) -> Result<bool, CliError> {
    let spec = validated_spec(args.spec.p, args.spec.q, 0)?;
    require_samples("samples", args.samples, 8)?;
    ensure_dir(&args.out.out)?;

    let rows = knot_rows(spec.p, spec.q, args.samples);
    let path = args.out.out.join(format!(
        "knot_p{}_q{}.{}",
        spec.p,
        spec.q,
        args.format.format.ext()
    ));
    write_knot_file(&path, args.format.format, &spec, &rows)?;
    println!(
        "wrote {} ({} points, closed polyline)",
        path.display(),
        rows.len()
    );
    Ok(true)
}

fn write_knot_file(
    path: &Path,
    format: Format,
    spec: &KnotSpec,
    rows: &[CurveRow],
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            write_curve_csv(path, rows)?;
            verify_curve_csv(path, rows)
        }
        Format::Json => {
            let value = KnotJson {
                p: spec.p,
                q: spec.q,
                n_samples: rows.len(),
                closed: true,
                points: rows.iter().map(CurvePointJson::from).collect(),
            };
            write_json_verified(path, &value)
        }
        Format::Vtk => {
            let data = PolyData::closed_polyline(curve_points(rows));
            write_polydata(
                path,
                &format!("torus knot (p={}, q={})", spec.p, spec.q),
                &data,
            )?;
            verify_polydata(path, &data)
        }
    }
}

pub fn cmd_fieldlines(args: &FieldlinesArgs) -> Result<bool, CliError> {
    let spec = validated_spec(args.spec.p, args.spec.q, args.k.k)?;
    require_positive("step", args.step)?;
    require_positive("span", args.span)?;
    ensure_dir(&args.out.out)?;

    let line = integrate(&spec, args.start.0, args.step, args.span);
    if let Some(warning) = &line.warning {
        eprintln!("warning: {warning}");
    }

    let path = args.out.out.join(format!(
        "fieldline_p{}_q{}_k{}.{}",
        spec.p,
        spec.q,
        spec.k,
        args.format.format.ext()
    ));
    match args.format.format {
        Format::Csv => {
            let rows: Vec<CurveRow> = line
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| CurveRow {
                    t: i as f64 * line.step,
                    x: p[0],
                    y: p[1],
                    z: p[2],
                })
                .collect();
            write_curve_csv(&path, &rows)?;
            verify_curve_csv(&path, &rows)?;
        }
        Format::Json => {
            let value = FieldLineJson {
                spec: (&spec).into(),
                start: line.start,
                step: line.step,
                span: line.span,
                termination: line.termination,
                warning: line.warning.clone(),
                n_points: line.points.len(),
                arc_length: line.arc_length,
                points: line.points.clone(),
                speeds: line.speeds.clone(),
            };
            write_json_verified(&path, &value)?;
        }
        Format::Vtk => {
            let data = if line.points.len() >= 2 {
                PolyData::open_polyline(line.points.clone())
            } else {
                PolyData::point_cloud(line.points.clone())
            };
            write_polydata(
                &path,
                &format!(
                    "field line (p={}, q={}, k={}) from ({}, {}, {})",
                    spec.p, spec.q, spec.k, line.start[0], line.start[1], line.start[2]
                ),
                &data,
            )?;
            verify_polydata(&path, &data)?;
        }
    }
    println!(
        "integrated {} points over arc length {:.6} ({})",
        line.points.len(),
        line.arc_length,
        termination_label(&line)
    );
    println!("wrote {}", path.display());
    Ok(true)
}

fn termination_label(line: &FieldLine) -> &'static str {
    match line.termination {
        Termination::SpanEnd => "span spent",
        Termination::Boundary => "stopped at the domain boundary",
        Termination::Stationary => "stopped at a stationary point",
        Termination::ImmediateExit => "start was outside the domain",
        Termination::StepLimit => "step cap reached",
    }
}

/// One boundary torus at core distance `rho`, sampled on an angle grid.
fn boundary_torus(rho: f64, n_toroidal: usize, n_poloidal: usize) -> Vec<[f64; 3]> {
    let mut points = Vec::with_capacity(n_toroidal * n_poloidal);
    for ia in 0..n_toroidal {
        let a = TAU * ia as f64 / n_toroidal as f64;
        for ic in 0..n_poloidal {
            let c = TAU * ic as f64 / n_poloidal as f64;
            let radial = 2.0 + rho * c.cos();
            points.push([radial * a.cos(), radial * a.sin(), rho * c.sin()]);
        }
    }
    points
}

pub fn cmd_export(args: &ExportArgs) -> Result<bool, CliError> {
    let spec = validated_spec(args.spec.p, args.spec.q, args.k.k)?;
    require_resolution(args.resolution)?;
    require_samples("samples", args.samples, 8)?;
    ensure_dir(&args.out.out)?;
    let format = args.format.format;
    let ext = format.ext();

    let knot = knot_rows(spec.p, spec.q, 8 * args.resolution);
    let knot_path = args
        .out
        .out
        .join(format!("knot_p{}_q{}.{ext}", spec.p, spec.q));
    write_knot_file(&knot_path, format, &spec, &knot)?;
    println!("wrote {}", knot_path.display());

    let n_toroidal = 2 * args.resolution;
    let n_poloidal = args.resolution;
    for (rho, label) in BOUNDARY_RADII {
        let points = boundary_torus(rho, n_toroidal, n_poloidal);
        let path = args.out.out.join(format!("boundary_{label}.{ext}"));
        match format {
            Format::Csv => {
                let rows: Vec<PointRow> = points
                    .iter()
                    .map(|p| PointRow {
                        x: p[0],
                        y: p[1],
                        z: p[2],
                    })
                    .collect();
                write_points_csv(&path, &rows)?;
                verify_points_csv(&path, &rows)?;
            }
            Format::Json => {
                let value = BoundaryJson {
                    rho,
                    n_toroidal,
                    n_poloidal,
                    points: points.clone(),
                };
                write_json_verified(&path, &value)?;
            }
            Format::Vtk => {
                let data = PolyData::point_cloud(points.clone());
                write_polydata(
                    &path,
                    &format!("annulus boundary torus at distance {rho}"),
                    &data,
                )?;
                verify_polydata(&path, &data)?;
            }
        }
        println!("wrote {}", path.display());
    }

    let mut rng = Lcg::new(args.seed);
    let sample_points = annulus_points(&mut rng, args.samples, GLYPH_MARGIN);
    let glyphs: Vec<GlyphRow> = sample_points
        .iter()
        .map(|pt| {
            let x = field_x(pt, &spec).expect("sample points stay in-domain");
            GlyphRow {
                x: pt.x,
                y: pt.y,
                z: pt.z,
                xx: x[0],
                xy: x[1],
                xz: x[2],
            }
        })
        .collect();
    let glyph_path = args.out.out.join(format!(
        "glyphs_p{}_q{}_k{}.{ext}",
        spec.p, spec.q, spec.k
    ));
    match format {
        Format::Csv => {
            write_glyphs_csv(&glyph_path, &glyphs)?;
            verify_glyphs_csv(&glyph_path, &glyphs)?;
        }
        Format::Json => {
            let value = GlyphsJson {
                spec: (&spec).into(),
                seed: args.seed,
                points: glyphs
                    .iter()
                    .map(|g| GlyphPointJson {
                        x: g.x,
                        y: g.y,
                        z: g.z,
                        xx: g.xx,
                        xy: g.xy,
                        xz: g.xz,
                    })
                    .collect(),
            };
            write_json_verified(&glyph_path, &value)?;
        }
        Format::Vtk => {
            let positions: Vec<[f64; 3]> = glyphs.iter().map(|g| [g.x, g.y, g.z]).collect();
            let vectors: Vec<[f64; 3]> = glyphs.iter().map(|g| [g.xx, g.xy, g.xz]).collect();
            let data = PolyData::glyphs(positions, "field", vectors);
            write_polydata(
                &glyph_path,
                &format!(
                    "field glyph samples (p={}, q={}, k={})",
                    spec.p, spec.q, spec.k
                ),
                &data,
            )?;
            verify_polydata(&glyph_path, &data)?;
        }
    }
    println!("wrote {}", glyph_path.display());
    Ok(true)
}

/// Everything `eval` prints for one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct EvalJson {
    spec: SpecJson,
    point: [f64; 3],
    r: f64,
    big_r: f64,
    components: [f64; 3],
    field: [f64; 3],
    field_norm_g: f64,
    metric_g: Mat3,
    det_g: f64,
    cond_estimate: Option<f64>,
    volume_element: f64,
    knot_distance: f64,
}

pub fn cmd_eval(args: &EvalArgs) -> Result<bool, CliError> {
    let spec = validated_spec(args.spec.p, args.spec.q, args.k.k)?;
    let [x, y, z] = args.at.0;
    let pt = CartesianPoint::new(x, y, z);
    if !in_annulus(&pt) {
        return Err(CliError::Config(format!(
            "point ({x}, {y}, {z}) lies outside the open annulus 1/4 < (r−2)² + z² < 9/4"
        )));
    }
    let field = field_x(&pt, &spec).expect("in-domain point evaluates");
    let components = components_from_cartesian(&pt.coords(), &spec);
    let metric = metric_g(&pt, &spec).expect("in-domain point has a metric");
    let value = EvalJson {
        spec: (&spec).into(),
        point: [x, y, z],
        r: pt.r,
        big_r: pt.big_r,
        components,
        field,
        field_norm_g: components.iter().map(|c| c * c).sum::<f64>().sqrt(),
        metric_g: metric.g,
        det_g: metric.det_g,
        cond_estimate: metric.cond_estimate(),
        volume_element: volume_element_at(&pt.coords()),
        knot_distance: dist_to_knot(&pt, spec.p, spec.q),
    };
    let body = serde_json::to_string_pretty(&value).expect("eval output serializes");
    println!("{body}");
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{
        FormatArg, KArg, KRange, OutDirArg, Point3, SingleKArg, SpecArgs,
    };
    use std::path::PathBuf;

    fn tmp_dir(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("knotfield_commands_tests").join(name);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn knot_rows_sample_the_curve_without_duplicate_endpoint() {
        let rows = knot_rows(2, 3, 128);
        assert_eq!(rows.len(), 128);
        assert_eq!(rows[0].t, 0.0);
        assert!(rows.last().unwrap().t < TAU);
        for row in &rows {
            let pt = torus_knot_point(2, 3, row.t);
            assert!((row.x - pt.x).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_torus_lies_on_the_boundary() {
        for (rho, _) in BOUNDARY_RADII {
            for p in boundary_torus(rho, 16, 8) {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                let rr = (r - 2.0).powi(2) + p[2] * p[2];
                assert!((rr - rho * rho).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn knot_command_writes_all_three_formats() {
        for format in [Format::Csv, Format::Json, Format::Vtk] {
            let out = tmp_dir("knot");
            let args = KnotArgs {
                spec: SpecArgs { p: 2, q: 3 },
                samples: 64,
                out: OutDirArg { out: out.clone() },
                format: FormatArg { format },
            };
            assert!(cmd_knot(&args).unwrap());
            let path = out.join(format!("knot_p2_q3.{}", format.ext()));
            assert!(path.is_file(), "{path:?} missing");
        }
    }

    #[test]
    fn eval_rejects_out_of_domain_points() {
        let args = EvalArgs {
            spec: SpecArgs { p: 2, q: 3 },
            k: SingleKArg { k: 0 },
            at: Point3([0.0, 0.0, 0.0]),
        };
        let err = cmd_eval(&args).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn zeroset_threshold_zero_is_degenerate_and_fails() {
        let out = tmp_dir("zeroset_degenerate");
        let args = ZerosetArgs {
            spec: SpecArgs { p: 2, q: 3 },
            k: KArg { k: KRange::single(0) },
            resolution: 8,
            seed: 2024,
            tol_zero: 1e-10,
            threshold: Some(0.0),
            out: OutDirArg { out: out.clone() },
        };
        assert!(!cmd_zeroset(&args).unwrap());
        let csv = fs::read_to_string(out.join("zeros_p2_q3_k0.csv")).unwrap();
        assert_eq!(csv, "x,y,z,residual,knot_distance,refined\n");
        let report: ZeroSetJson =
            read_json_file(&out.join("zeroset_p2_q3_k0.json")).unwrap();
        assert!(report.degenerate);
        assert_eq!(report.n_candidates, 0);
    }
}
