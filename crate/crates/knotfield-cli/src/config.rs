//! Flag grammar shared by the subcommands: knot selection, the inclusive
//! twist-index range, output destination, and the numeric knobs with their
//! validity checks.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use knotfield::geometry::{make_knot_spec, KnotSpec};

use crate::CliError;

/// Inclusive range of twist indices: `--k 0` or `--k -2..2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KRange {
    pub lo: i64,
    pub hi: i64,
}

impl KRange {
    pub fn single(k: i64) -> Self {
        KRange { lo: k, hi: k }
    }

    pub fn is_single(&self) -> bool {
        self.lo == self.hi
    }

    pub fn values(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    /// File-stem fragment: `k1` for a single index, `k-2to2` for a range.
    pub fn stem(&self) -> String {
        if self.is_single() {
            format!("k{}", self.lo)
        } else {
            format!("k{}to{}", self.lo, self.hi)
        }
    }
}

impl fmt::Display for KRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some((lo, hi)) = s.split_once("..") {
            let lo: i64 = lo
                .trim()
                .parse()
                .map_err(|_| format!("bad range start {lo:?} in {s:?}"))?;
            let hi: i64 = hi
                .trim()
                .parse()
                .map_err(|_| format!("bad range end {hi:?} in {s:?}"))?;
            if lo > hi {
                return Err(format!("empty range {s:?}: start exceeds end"));
            }
            Ok(KRange { lo, hi })
        } else {
            let k: i64 = s
                .trim()
                .parse()
                .map_err(|_| format!("expected an integer or a..b, got {s:?}"))?;
            Ok(KRange::single(k))
        }
    }
}

/// A point given on the command line as `x,y,z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point3(pub [f64; 3]);

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

impl FromStr for Point3 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(format!("expected x,y,z, got {s:?}"));
        }
        let mut coords = [0.0; 3];
        for (slot, part) in coords.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| format!("bad coordinate {part:?} in {s:?}"))?;
        }
        Ok(Point3(coords))
    }
}

/// Export file format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Vtk,
}

impl Format {
    pub fn ext(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Vtk => "vtk",
        }
    }
}

/// Winding numbers shared by every subcommand.
#[derive(Args, Clone, Debug)]
pub struct SpecArgs {
    /// Toroidal winding number (positive, coprime to q).
    #[arg(long, default_value_t = 2)]
    pub p: i64,
    /// Poloidal winding number (positive, coprime to p).
    #[arg(long, default_value_t = 3)]
    pub q: i64,
}

/// Twist index accepting a range.
#[derive(Args, Clone, Debug)]
pub struct KArg {
    /// Twist index: a single integer or an inclusive range a..b.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub k: KRange,
}

/// Twist index restricted to a single value.
#[derive(Args, Clone, Debug)]
pub struct SingleKArg {
    /// Twist index.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub k: i64,
}

/// Output directory.
#[derive(Args, Clone, Debug)]
pub struct OutDirArg {
    /// Directory for generated files (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Output format selector.
#[derive(Args, Clone, Debug)]
pub struct FormatArg {
    /// File format for exports.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Clone, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub k: KArg,
    /// Grid points per axis for zero-set certification (at least 8).
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    /// Seed for the sample-point generator, recorded in the report.
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Sample points per residual sweep.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Bound for the curl and divergence residuals.
    #[arg(long = "tol-curl", default_value_t = 1e-8)]
    pub tol_curl: f64,
    /// Bound for |X| on the knot in the zero-set check.
    #[arg(long = "tol-zero", default_value_t = 1e-10)]
    pub tol_zero: f64,
    #[command(flatten)]
    pub out: OutDirArg,
}

#[derive(Args, Clone, Debug)]
pub struct ZerosetArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub k: KArg,
    /// Grid points per axis (at least 8).
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    /// Seed recorded in the report (the scan itself is deterministic).
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Bound for |X| on the knot (forward check).
    #[arg(long = "tol-zero", default_value_t = 1e-10)]
    pub tol_zero: f64,
    /// Fixed scan threshold overriding the median-based choice (testing aid).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub out: OutDirArg,
}

#[derive(Args, Clone, Debug)]
pub struct KnotArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Number of polyline points (the curve closes back to the first).
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutDirArg,
    #[command(flatten)]
    pub format: FormatArg,
}

#[derive(Args, Clone, Debug)]
pub struct FieldlinesArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub k: SingleKArg,
    /// Integration start point x,y,z.
    #[arg(long, default_value = "0,1.25,0", allow_hyphen_values = true)]
    pub start: Point3,
    /// RK4 step size.
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    /// Arc-length budget before the integration stops.
    #[arg(long, default_value_t = 10.0)]
    pub span: f64,
    #[command(flatten)]
    pub out: OutDirArg,
    #[command(flatten)]
    pub format: FormatArg,
}

#[derive(Args, Clone, Debug)]
pub struct ExportArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub k: SingleKArg,
    /// Boundary-sampling density; the knot polyline gets 8x this many points.
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    /// Seed for the glyph sample points.
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Number of field glyph samples.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutDirArg,
    #[command(flatten)]
    pub format: FormatArg,
}

#[derive(Args, Clone, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub k: SingleKArg,
    /// Evaluation point x,y,z.
    #[arg(long, default_value = "0,1.25,0", allow_hyphen_values = true)]
    pub at: Point3,
}

/// Builds the knot spec, mapping rejection (non-coprime or non-positive
/// winding numbers) to a configuration error.
pub fn validated_spec(p: i64, q: i64, k: i64) -> Result<KnotSpec, CliError> {
    make_knot_spec(p, q, k)
        .map_err(|e| CliError::Config(format!("invalid spec (p={p}, q={q}, k={k}): {e}")))
}

/// Rejects non-positive or non-finite tolerances and step sizes.
pub fn require_positive(name: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

/// Rejects negative or non-finite values (zero allowed).
pub fn require_non_negative(name: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name} must be non-negative and finite, got {value}"
        )))
    }
}

/// Grid resolutions below 8 cannot bracket the knot tube.
pub fn require_resolution(resolution: usize) -> Result<(), CliError> {
    if resolution >= 8 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "resolution must be at least 8, got {resolution}"
        )))
    }
}

/// Lower bound on a sample count.
pub fn require_samples(name: &str, n: usize, min: usize) -> Result<(), CliError> {
    if n >= min {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name} must be at least {min}, got {n}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn krange_parses_single_and_range() {
        assert_eq!("0".parse::<KRange>().unwrap(), KRange::single(0));
        assert_eq!("-3".parse::<KRange>().unwrap(), KRange::single(-3));
        assert_eq!(
            "-2..2".parse::<KRange>().unwrap(),
            KRange { lo: -2, hi: 2 }
        );
        assert_eq!("1..1".parse::<KRange>().unwrap(), KRange::single(1));
        assert!("2..-2".parse::<KRange>().is_err());
        assert!("a..b".parse::<KRange>().is_err());
        assert!("1.5".parse::<KRange>().is_err());
    }

    #[test]
    fn krange_stems_and_values() {
        assert_eq!(KRange::single(-1).stem(), "k-1");
        assert_eq!(KRange { lo: -2, hi: 2 }.stem(), "k-2to2");
        let ks: Vec<i64> = KRange { lo: -1, hi: 1 }.values().collect();
        assert_eq!(ks, [-1, 0, 1]);
    }

    #[test]
    fn point3_parses_with_whitespace_and_signs() {
        assert_eq!(
            " -1 , 0.5 , 2e-1 ".parse::<Point3>().unwrap(),
            Point3([-1.0, 0.5, 0.2])
        );
        assert!("1,2".parse::<Point3>().is_err());
        assert!("1,2,x".parse::<Point3>().is_err());
    }

    #[test]
    fn spec_validation_rejects_bad_winding_numbers() {
        assert!(validated_spec(2, 3, 0).is_ok());
        let err = validated_spec(2, 4, 0).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(validated_spec(0, 3, 0).is_err());
    }

    #[test]
    fn numeric_guards() {
        assert!(require_positive("tol", 1e-8).is_ok());
        assert!(require_positive("tol", 0.0).is_err());
        assert!(require_positive("tol", f64::NAN).is_err());
        assert!(require_non_negative("threshold", 0.0).is_ok());
        assert!(require_non_negative("threshold", -1.0).is_err());
        assert!(require_resolution(8).is_ok());
        assert!(require_resolution(7).is_err());
        assert!(require_samples("samples", 16, 8).is_ok());
        assert!(require_samples("samples", 4, 8).is_err());
    }
}
