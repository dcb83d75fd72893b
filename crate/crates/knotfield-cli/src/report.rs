//! JSON report types. Field order is fixed by the struct declarations, and
//! floats serialize through shortest-round-trip decimals, so equal runs
//! produce byte-identical files.

use std::fs;
use std::path::Path;

use knotfield::geometry::KnotSpec;
use knotfield::zeroset::ZeroSetReport;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// The knot spec with its derived Bézout data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecJson {
    pub p: i64,
    pub q: i64,
    pub k: i64,
    pub b_k: i64,
    pub d_k: i64,
}

impl From<&KnotSpec> for SpecJson {
    fn from(spec: &KnotSpec) -> Self {
        SpecJson {
            p: spec.p,
            q: spec.q,
            k: spec.k,
            b_k: spec.b_k,
            d_k: spec.d_k,
        }
    }
}

/// One verification check row. `tolerance` is `null` for quantities that are
/// reported but not bounded (the condition estimate).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub pass: bool,
    pub max_residual: f64,
    pub tolerance: Option<f64>,
    pub n_samples: usize,
}

/// Crate versions and the report format revision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Versions {
    pub knotfield: String,
    pub cli: String,
    pub report_format: u32,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            knotfield: knotfield::VERSION.to_string(),
            cli: env!("CARGO_PKG_VERSION").to_string(),
            report_format: 1,
        }
    }
}

/// `verify` report for a single spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub spec: SpecJson,
    pub checks: Vec<CheckJson>,
    pub versions: Versions,
    pub seed: u64,
}

/// One spec's section inside a range report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub spec: SpecJson,
    pub checks: Vec<CheckJson>,
}

/// `verify` report for a twist-index range: one section per spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeReport {
    pub versions: Versions,
    pub seed: u64,
    pub runs: Vec<RunSection>,
}

/// One off-knot field-norm floor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorJson {
    pub delta: f64,
    pub floor: f64,
    pub n_points: usize,
}

/// `zeroset` report: the certification summary (candidates live in the
/// companion CSV).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetJson {
    pub spec: SpecJson,
    pub resolution: usize,
    pub n_grid_in_domain: usize,
    pub median_grid_norm: f64,
    pub threshold: f64,
    pub n_candidates: usize,
    pub n_knot_samples: usize,
    pub forward_max_residual: f64,
    pub forward_tol: f64,
    pub forward_pass: bool,
    pub max_knot_distance: f64,
    pub reverse_tol: f64,
    pub reverse_pass: bool,
    pub n_converged: usize,
    pub n_nonconverged: usize,
    pub floors: Vec<FloorJson>,
    pub floors_pass: bool,
    pub max_param_gap: f64,
    pub degenerate: bool,
    pub pass: bool,
    pub versions: Versions,
    pub seed: u64,
}

impl ZeroSetJson {
    pub fn from_report(report: &ZeroSetReport, spec: &KnotSpec, seed: u64) -> Self {
        debug_assert_eq!((report.p, report.q, report.k), (spec.p, spec.q, spec.k));
        ZeroSetJson {
            spec: spec.into(),
            resolution: report.resolution,
            n_grid_in_domain: report.n_grid_in_domain,
            median_grid_norm: report.median_grid_norm,
            threshold: report.threshold,
            n_candidates: report.candidates.len(),
            n_knot_samples: report.n_knot_samples,
            forward_max_residual: report.forward_max_residual,
            forward_tol: report.forward_tol,
            forward_pass: report.forward_pass,
            max_knot_distance: report.max_knot_distance,
            reverse_tol: report.reverse_tol,
            reverse_pass: report.reverse_pass,
            n_converged: report.n_converged,
            n_nonconverged: report.n_nonconverged,
            floors: report
                .floors
                .iter()
                .map(|f| FloorJson {
                    delta: f.delta,
                    floor: f.floor,
                    n_points: f.n_points,
                })
                .collect(),
            floors_pass: report.floors_pass,
            max_param_gap: report.max_param_gap,
            degenerate: report.degenerate,
            pass: report.pass,
            versions: Versions::current(),
            seed,
        }
    }
}

/// Writes pretty-printed JSON with a trailing newline.
pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut body =
        serde_json::to_string_pretty(value).map_err(|e| CliError::RoundTrip {
            path: path.to_path_buf(),
            detail: format!("serialization failed: {e}"),
        })?;
    body.push('\n');
    fs::write(path, body).map_err(|e| CliError::io(path, e))
}

/// Reads a JSON file back into its type.
pub fn read_json_file<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let body = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&body).map_err(|e| CliError::RoundTrip {
        path: path.to_path_buf(),
        detail: format!("re-read failed to parse: {e}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use knotfield::geometry::make_knot_spec;

    #[test]
    fn spec_json_carries_bezout_data() {
        let spec = make_knot_spec(2, 3, 1).unwrap();
        let json = SpecJson::from(&spec);
        assert_eq!(json.p * json.b_k + json.q * json.d_k, 1);
        assert_eq!(json.k, 1);
    }

    #[test]
    fn verify_report_field_order_is_stable() {
        let spec = make_knot_spec(2, 3, 0).unwrap();
        let report = VerifyReport {
            spec: (&spec).into(),
            checks: vec![CheckJson {
                name: "beltrami-residual".into(),
                pass: true,
                max_residual: 1.5e-12,
                tolerance: Some(1e-8),
                n_samples: 200,
            }],
            versions: Versions::current(),
            seed: 2024,
        };
        let text = serde_json::to_string(&report).unwrap();
        let spec_pos = text.find("\"spec\"").unwrap();
        let checks_pos = text.find("\"checks\"").unwrap();
        let versions_pos = text.find("\"versions\"").unwrap();
        let seed_pos = text.find("\"seed\":").unwrap();
        assert!(spec_pos < checks_pos && checks_pos < versions_pos && versions_pos < seed_pos);
    }

    #[test]
    fn unbounded_tolerance_serializes_as_null() {
        let check = CheckJson {
            name: "metric-condition-estimate".into(),
            pass: true,
            max_residual: 123.0,
            tolerance: None,
            n_samples: 10,
        };
        let text = serde_json::to_string(&check).unwrap();
        assert!(text.contains("\"tolerance\":null"));
    }

    #[test]
    fn json_file_round_trips() {
        let dir = std::env::temp_dir().join("knotfield_report_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("report.json");
        let versions = Versions::current();
        write_json_file(&path, &versions).unwrap();
        let back: Versions = read_json_file(&path).unwrap();
        assert_eq!(back, versions);
        std::fs::remove_file(&path).unwrap();
    }
}
