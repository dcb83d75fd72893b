//! The verification sweeps behind `knotfield verify`, each summarized as one
//! pass/fail row with its measured extreme, bound, and sample count.

use knotfield::calculus::{curl_g_with_volume, div_g_with_volume, Domain, Jet};
use knotfield::fields::{
    components_from_cartesian, field_x, field_x_at, pushforward_oracle, trefoil_components,
};
use knotfield::geometry::KnotSpec;
use knotfield::linalg::{max_abs_diff, symmetry_defect};
use knotfield::math::norm3;
use knotfield::metric::{metric_g, metric_g_at, pullback_oracle, volume_element_at};
use knotfield::sample::{annulus_points, Lcg};
use knotfield::zeroset::{certify_zero_set, ZeroSetConfig};

use crate::report::CheckJson;

/// Sample points keep this margin from the annulus boundary.
const SWEEP_MARGIN: f64 = 1e-3;

/// Per-check seed offsets keep the sample streams independent of each other
/// while staying reproducible for a fixed base seed.
const OFFSET_BELTRAMI: u64 = 1;
const OFFSET_DIVERGENCE: u64 = 2;
const OFFSET_METRIC: u64 = 3;
const OFFSET_PULLBACK: u64 = 4;
const OFFSET_PUSHFORWARD: u64 = 5;
const OFFSET_TREFOIL: u64 = 6;

/// Bound for the metric symmetry defect (construction is symmetric by form).
const SPD_TOL: f64 = 1e-12;
/// Bound for metric vs numeric pullback agreement.
const PULLBACK_TOL: f64 = 1e-9;
/// Bound for closed-form field vs numeric pushforward agreement.
const PUSHFORWARD_TOL: f64 = 1e-10;
/// Bound for the trefoil closed form vs the generic component path.
const TREFOIL_TOL: f64 = 1e-12;

fn sweep_points(seed: u64, offset: u64, n: usize) -> Vec<knotfield::CartesianPoint> {
    let mut rng = Lcg::new(seed.wrapping_add(offset));
    annulus_points(&mut rng, n, SWEEP_MARGIN)
}

/// Max relative |curl X − X| over seeded in-domain points.
pub fn beltrami_check(spec: &KnotSpec, seed: u64, n: usize, tol: f64) -> CheckJson {
    let field = |j: &[Jet; 3]| field_x_at(j, spec);
    let metric = |j: &[Jet; 3]| metric_g_at(j, spec);
    let volume = |j: &[Jet; 3]| volume_element_at(j);
    let mut worst = 0.0f64;
    for pt in sweep_points(seed, OFFSET_BELTRAMI, n) {
        let x = field_x(&pt, spec).unwrap();
        let curl = curl_g_with_volume(&field, &metric, &volume, pt.coords(), Domain::Annulus)
            .unwrap();
        let defect = norm3([curl[0] - x[0], curl[1] - x[1], curl[2] - x[2]]);
        worst = worst.max(defect / norm3(x).max(1e-8));
    }
    CheckJson {
        name: "beltrami-residual".into(),
        pass: worst <= tol,
        max_residual: worst,
        tolerance: Some(tol),
        n_samples: n,
    }
}

/// Max |div X| over seeded in-domain points.
pub fn divergence_check(spec: &KnotSpec, seed: u64, n: usize, tol: f64) -> CheckJson {
    let field = |j: &[Jet; 3]| field_x_at(j, spec);
    let metric = |j: &[Jet; 3]| metric_g_at(j, spec);
    let volume = |j: &[Jet; 3]| volume_element_at(j);
    let mut worst = 0.0f64;
    for pt in sweep_points(seed, OFFSET_DIVERGENCE, n) {
        let div = div_g_with_volume(&field, &metric, &volume, pt.coords(), Domain::Annulus)
            .unwrap()
            .abs();
        worst = worst.max(div);
    }
    CheckJson {
        name: "divergence".into(),
        pass: worst <= tol,
        max_residual: worst,
        tolerance: Some(tol),
        n_samples: n,
    }
}

/// Symmetric positive definiteness of the metric at seeded points; the
/// residual is the worst symmetry defect.
pub fn metric_spd_check(spec: &KnotSpec, seed: u64, n: usize) -> CheckJson {
    let mut worst_defect = 0.0f64;
    let mut all_spd = true;
    for pt in sweep_points(seed, OFFSET_METRIC, n) {
        let value = metric_g(&pt, spec).unwrap();
        all_spd &= value.is_spd();
        worst_defect = worst_defect.max(symmetry_defect(&value.g));
    }
    CheckJson {
        name: "metric-spd-symmetry".into(),
        pass: all_spd && worst_defect <= SPD_TOL,
        max_residual: worst_defect,
        tolerance: Some(SPD_TOL),
        n_samples: n,
    }
}

/// Frobenius condition estimate of the metric — reported, never bounded.
pub fn condition_check(spec: &KnotSpec, seed: u64, n: usize) -> CheckJson {
    let mut worst = 0.0f64;
    let mut all_finite = true;
    for pt in sweep_points(seed, OFFSET_METRIC, n) {
        match metric_g(&pt, spec).unwrap().cond_estimate() {
            Some(c) if c.is_finite() => worst = worst.max(c),
            _ => all_finite = false,
        }
    }
    CheckJson {
        name: "metric-condition-estimate".into(),
        pass: all_finite,
        max_residual: worst,
        tolerance: None,
        n_samples: n,
    }
}

/// Closed-form metric vs the numeric pullback oracle.
pub fn pullback_check(spec: &KnotSpec, seed: u64, n: usize) -> CheckJson {
    let mut worst = 0.0f64;
    for pt in sweep_points(seed, OFFSET_PULLBACK, n) {
        let g = metric_g(&pt, spec).unwrap().g;
        let pulled = pullback_oracle(&pt, spec).unwrap();
        worst = worst.max(max_abs_diff(&g, &pulled));
    }
    CheckJson {
        name: "metric-pullback-agreement".into(),
        pass: worst <= PULLBACK_TOL,
        max_residual: worst,
        tolerance: Some(PULLBACK_TOL),
        n_samples: n,
    }
}

/// Closed-form field vs the numeric pushforward oracle.
pub fn pushforward_check(spec: &KnotSpec, seed: u64, n: usize) -> CheckJson {
    let mut worst = 0.0f64;
    for pt in sweep_points(seed, OFFSET_PUSHFORWARD, n) {
        let closed = field_x(&pt, spec).unwrap();
        let transported = pushforward_oracle(&pt, spec).unwrap();
        for i in 0..3 {
            worst = worst.max((closed[i] - transported[i]).abs());
        }
    }
    CheckJson {
        name: "field-pushforward-agreement".into(),
        pass: worst <= PUSHFORWARD_TOL,
        max_residual: worst,
        tolerance: Some(PUSHFORWARD_TOL),
        n_samples: n,
    }
}

/// Trefoil closed form vs the generic component path; only meaningful for
/// (p, q) = (2, 3).
pub fn trefoil_check(spec: &KnotSpec, seed: u64, n: usize) -> CheckJson {
    debug_assert_eq!((spec.p, spec.q), (2, 3));
    let mut worst = 0.0f64;
    for pt in sweep_points(seed, OFFSET_TREFOIL, n) {
        let (t1, t2, t3) = trefoil_components(&pt).unwrap();
        let generic = components_from_cartesian(&pt.coords(), spec);
        worst = worst
            .max((t1 - generic[0]).abs())
            .max((t2 - generic[1]).abs())
            .max((t3 - generic[2]).abs());
    }
    CheckJson {
        name: "trefoil-closed-form".into(),
        pass: worst <= TREFOIL_TOL,
        max_residual: worst,
        tolerance: Some(TREFOIL_TOL),
        n_samples: n,
    }
}

/// Two-sided zero-set certification; the residual is the forward max |X| on
/// the knot, and a degenerate (candidate-free) scan fails the check.
pub fn zero_set_check(spec: &KnotSpec, resolution: usize, forward_tol: f64) -> CheckJson {
    let config = ZeroSetConfig {
        resolution,
        forward_tol,
        ..ZeroSetConfig::default()
    };
    let report = certify_zero_set(spec, &config);
    CheckJson {
        name: "zero-set-certification".into(),
        pass: report.pass && !report.degenerate,
        max_residual: report.forward_max_residual,
        tolerance: Some(forward_tol),
        n_samples: report.n_knot_samples,
    }
}

/// Runs the full check battery for one spec, in report order.
pub fn run_all_checks(
    spec: &KnotSpec,
    seed: u64,
    samples: usize,
    resolution: usize,
    tol_curl: f64,
    tol_zero: f64,
) -> Vec<CheckJson> {
    let mut checks = vec![
        beltrami_check(spec, seed, samples, tol_curl),
        divergence_check(spec, seed, samples, tol_curl),
        metric_spd_check(spec, seed, samples),
        pullback_check(spec, seed, samples),
        pushforward_check(spec, seed, samples),
    ];
    if (spec.p, spec.q) == (2, 3) {
        checks.push(trefoil_check(spec, seed, samples));
    }
    checks.push(condition_check(spec, seed, samples));
    checks.push(zero_set_check(spec, resolution, tol_zero));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use knotfield::geometry::make_knot_spec;

    #[test]
    fn trefoil_spec_gets_the_extra_check() {
        let spec = make_knot_spec(2, 3, 0).unwrap();
        let checks = run_all_checks(&spec, 7, 16, 16, 1e-8, 1e-10);
        assert!(checks.iter().any(|c| c.name == "trefoil-closed-form"));

        let spec = make_knot_spec(1, 1, 0).unwrap();
        let checks = run_all_checks(&spec, 7, 16, 16, 1e-8, 1e-10);
        assert!(!checks.iter().any(|c| c.name == "trefoil-closed-form"));
    }

    #[test]
    fn healthy_spec_passes_every_check() {
        let spec = make_knot_spec(2, 3, 0).unwrap();
        for check in run_all_checks(&spec, 11, 32, 32, 1e-8, 1e-10) {
            assert!(check.pass, "{} failed at {}", check.name, check.max_residual);
        }
    }

    #[test]
    fn unreachable_tolerance_fails_the_sweep() {
        let spec = make_knot_spec(2, 3, 1).unwrap();
        let check = beltrami_check(&spec, 11, 16, 1e-18);
        assert!(!check.pass);
        assert_eq!(check.tolerance, Some(1e-18));
    }

    #[test]
    fn checks_are_deterministic_in_the_seed() {
        let spec = make_knot_spec(2, 5, -1).unwrap();
        let a = divergence_check(&spec, 99, 24, 1e-8);
        let b = divergence_check(&spec, 99, 24, 1e-8);
        assert_eq!(a, b);
        let c = divergence_check(&spec, 100, 24, 1e-8);
        assert_ne!(a.max_residual, c.max_residual);
    }

    #[test]
    fn condition_estimate_reports_without_bounding() {
        let spec = make_knot_spec(2, 3, -2).unwrap();
        let check = condition_check(&spec, 5, 32);
        assert!(check.pass);
        assert!(check.tolerance.is_none());
        assert!(check.max_residual > 1.0);
    }
}
