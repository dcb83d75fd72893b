//! Zero-set location and certification: a thresholded grid scan over the
//! annulus, damped least-squares refinement of candidates, point-to-knot
//! distance, and the two-sided check that the located zeros are exactly the
//! (p,q)-torus knot.
//!
//! The zero locus is a curve, so the field Jacobian is rank-deficient along
//! it; refinement therefore runs Levenberg–Marquardt on |X|² rather than a
//! Newton iteration on X.

use crate::calculus::{seed_point, Jet, DERIV_MARGIN};
use crate::fields::{field_x_at, field_x_with_components};
use crate::geometry::{
    in_annulus_margin, knot_curve, torus_knot_point, CartesianPoint, GeometryError, KnotSpec,
};
use crate::linalg::{dot, solve3, Vec3};
use crate::math::norm3;
use alloc::vec::Vec;
use core::f64::consts::TAU;

/// Safety margin from the domain boundary kept by grid scans.
pub const SCAN_MARGIN: f64 = 1e-3;

/// Bounding box of the annulus, scanned by the grid: x and y in
/// [−3.5, 3.5], z in [−1.5, 1.5].
pub const SCAN_BOX: [[f64; 2]; 3] = [[-3.5, 3.5], [-3.5, 3.5], [-1.5, 1.5]];

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (√5 − 1)/2, golden-section ratio

/// A located (or candidate) zero of the field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroCandidate {
    pub point: CartesianPoint,
    /// |X| at the point (Euclidean norm of the field vector).
    pub residual: f64,
    /// Whether refinement ran on this candidate.
    pub refined: bool,
    /// Refinement reached |X| ≤ 1e−12; meaningless when `refined` is false.
    pub converged: bool,
    pub iterations: usize,
    /// Euclidean distance to the parametrized knot.
    pub knot_distance: f64,
}

/// Result of one thresholded grid scan.
#[derive(Clone, Debug)]
pub struct GridScanOutcome {
    pub candidates: Vec<ZeroCandidate>,
    pub n_in_domain: usize,
    pub median_norm: f64,
    pub threshold: f64,
}

/// Controls for [`certify_zero_set`].
#[derive(Clone, Debug)]
pub struct ZeroSetConfig {
    /// Grid points per axis; at least 8.
    pub resolution: usize,
    /// Knot samples for the forward residual check.
    pub n_knot_samples: usize,
    /// Off-knot distances δ whose field-norm floors m(δ) are reported.
    pub deltas: Vec<f64>,
    /// Forward bound: |X| on the knot itself.
    pub forward_tol: f64,
    /// Reverse bound: distance of converged refined zeros to the knot.
    pub reverse_tol: f64,
    /// Fixed scan threshold; `None` selects 0.1 × median grid norm.
    pub threshold: Option<f64>,
    /// Cap on listed offending points.
    pub max_offending: usize,
}

impl Default for ZeroSetConfig {
    fn default() -> Self {
        ZeroSetConfig {
            resolution: 64,
            n_knot_samples: 10_000,
            deltas: Vec::from([0.05, 0.1, 0.2]),
            forward_tol: 1e-10,
            reverse_tol: 1e-6,
            threshold: None,
            max_offending: 32,
        }
    }
}

/// One off-knot floor: the smallest |X| over grid points at distance ≥ δ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloorEntry {
    pub delta: f64,
    pub floor: f64,
    pub n_points: usize,
}

/// Everything the two-sided certification measured.
#[derive(Clone, Debug)]
pub struct ZeroSetReport {
    pub p: i64,
    pub q: i64,
    pub k: i64,
    pub resolution: usize,
    pub n_grid_in_domain: usize,
    pub median_grid_norm: f64,
    pub threshold: f64,
    /// Refined candidates, in grid order.
    pub candidates: Vec<ZeroCandidate>,
    pub n_knot_samples: usize,
    pub forward_max_residual: f64,
    pub forward_tol: f64,
    pub forward_pass: bool,
    /// Max knot distance over converged refined zeros.
    pub max_knot_distance: f64,
    pub reverse_tol: f64,
    pub reverse_pass: bool,
    pub n_converged: usize,
    pub n_nonconverged: usize,
    pub floors: Vec<FloorEntry>,
    pub floors_pass: bool,
    /// Largest gap of scan-candidate projections onto the knot parameter,
    /// over [0, 2π) with wraparound — how densely the located candidates
    /// cover the knot. 2π when the scan found no candidates.
    pub max_param_gap: f64,
    /// No candidates survived the scan threshold.
    pub degenerate: bool,
    pub offending: Vec<ZeroCandidate>,
    pub pass: bool,
}

/// Euclidean distance from a point to the (p,q)-torus knot.
pub fn dist_to_knot(pt: &CartesianPoint, p: i64, q: i64) -> f64 {
    dist_to_knot_with_param(pt, p, q).0
}

/// Distance to the knot together with the minimizing curve parameter in
/// [0, 2π). Coarse scan at 4096 parameters, then golden-section refinement
/// of the squared distance to 1e−12 in the parameter.
pub fn dist_to_knot_with_param(pt: &CartesianPoint, p: i64, q: i64) -> (f64, f64) {
    let target = pt.coords();
    let d2 = |t: f64| -> f64 {
        let k = knot_curve(p, q, t);
        let dx = k[0] - target[0];
        let dy = k[1] - target[1];
        let dz = k[2] - target[2];
        dx * dx + dy * dy + dz * dz
    };

    const COARSE: usize = 4096;
    let step = TAU / COARSE as f64;
    let mut best_t = 0.0;
    let mut best = f64::INFINITY;
    for i in 0..COARSE {
        let t = i as f64 * step;
        let v = d2(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }

    let mut a = best_t - step;
    let mut b = best_t + step;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = d2(c);
    let mut fd = d2(d);
    while b - a > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = d2(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = d2(d);
        }
    }
    let t_min = 0.5 * (a + b);
    let mut t_wrapped = t_min % TAU;
    if t_wrapped < 0.0 {
        t_wrapped += TAU;
    }
    (crate::math::fsqrt(d2(t_min)), t_wrapped)
}

fn grid_coordinate(axis: usize, index: usize, resolution: usize) -> f64 {
    let [lo, hi] = SCAN_BOX[axis];
    lo + (hi - lo) * (index as f64 + 0.5) / resolution as f64
}

/// Length of the cell diagonal at a given resolution.
pub fn grid_cell_diagonal(resolution: usize) -> f64 {
    let mut sum = 0.0;
    for axis in 0..3 {
        let [lo, hi] = SCAN_BOX[axis];
        let h = (hi - lo) / resolution as f64;
        sum += h * h;
    }
    crate::math::fsqrt(sum)
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("grid norms are finite"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Scan the annulus grid for small field norms. The threshold applies to the
/// construction-metric norm of the field — the norm in which the transported
/// base field's smallness tracks distance from the knot uniformly; candidate
/// `residual`s remain Euclidean. A fixed `threshold` overrides the adaptive
/// default of 0.1 × median.
pub fn grid_scan_with_threshold(
    spec: &KnotSpec,
    resolution: usize,
    threshold: Option<f64>,
) -> GridScanOutcome {
    assert!(resolution >= 8, "grid resolution must be at least 8");
    let mut points = Vec::new();
    let mut gnorms = Vec::new();
    for ix in 0..resolution {
        let x = grid_coordinate(0, ix, resolution);
        for iy in 0..resolution {
            let y = grid_coordinate(1, iy, resolution);
            for iz in 0..resolution {
                let z = grid_coordinate(2, iz, resolution);
                let pt = CartesianPoint::new(x, y, z);
                if !in_annulus_margin(&pt, SCAN_MARGIN) {
                    continue;
                }
                let (vec, comps) =
                    field_x_with_components(&pt, spec).expect("margin keeps the point in-domain");
                let gnorm = norm3(comps);
                points.push((pt, gnorm, norm3(vec)));
                gnorms.push(gnorm);
            }
        }
    }
    let median_norm = median(&mut gnorms);
    let threshold = threshold.unwrap_or(0.1 * median_norm);
    let mut candidates = Vec::new();
    for (pt, gnorm, enorm) in &points {
        if *gnorm < threshold {
            candidates.push(ZeroCandidate {
                point: *pt,
                residual: *enorm,
                refined: false,
                converged: false,
                iterations: 0,
                knot_distance: dist_to_knot(pt, spec.p, spec.q),
            });
        }
    }
    GridScanOutcome {
        candidates,
        n_in_domain: points.len(),
        median_norm,
        threshold,
    }
}

/// Grid scan with the adaptive threshold.
pub fn grid_scan(spec: &KnotSpec, resolution: usize) -> Vec<ZeroCandidate> {
    grid_scan_with_threshold(spec, resolution, None).candidates
}

struct LmOutcome {
    point: CartesianPoint,
    residual: f64,
    converged: bool,
    iterations: usize,
}

/// Levenberg–Marquardt on |X|² with the exact jet Jacobian. Accepted steps
/// never increase |X|²; trial points outside the margined domain count as
/// rejections, and eight consecutive such rejections abort the refinement
/// with the last in-domain iterate. The stop rule is |X| ≤ 1e−12, a proposed
/// step ≤ 1e−14, or 100 iterations; `converged` reports the residual test.
fn lm_refine(start: &CartesianPoint, field: &dyn Fn(&[Jet; 3]) -> [Jet; 3]) -> LmOutcome {
    const MAX_ITER: usize = 100;
    const RES_TOL: f64 = 1e-12;
    const STEP_TOL: f64 = 1e-14;

    let eval = |coords: [f64; 3]| -> ([f64; 3], [[f64; 3]; 3]) {
        let jets = field(&seed_point(coords));
        (
            [jets[0].value, jets[1].value, jets[2].value],
            [jets[0].partials, jets[1].partials, jets[2].partials],
        )
    };

    let mut x = start.coords();
    let (mut f, mut jac) = eval(x);
    let mut res2 = dot(&f, &f);
    let mut lambda = 1e-3;
    let mut consecutive_exits = 0usize;
    let mut iterations = 0usize;

    while iterations < MAX_ITER {
        if crate::math::fsqrt(res2) <= RES_TOL {
            break;
        }
        iterations += 1;

        // (JᵀJ + λI)·δ = −Jᵀf
        let mut a = [[0.0; 3]; 3];
        let mut rhs = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = jac[0][i] * jac[0][j] + jac[1][i] * jac[1][j] + jac[2][i] * jac[2][j];
            }
            a[i][i] += lambda;
            rhs[i] = -(jac[0][i] * f[0] + jac[1][i] * f[1] + jac[2][i] * f[2]);
        }
        let Some(step) = solve3(&a, &rhs) else {
            lambda *= 2.0;
            continue;
        };
        if norm3(step) <= STEP_TOL {
            break;
        }
        let trial = [x[0] + step[0], x[1] + step[1], x[2] + step[2]];
        let trial_pt = CartesianPoint::new(trial[0], trial[1], trial[2]);
        if !in_annulus_margin(&trial_pt, DERIV_MARGIN) {
            consecutive_exits += 1;
            lambda *= 2.0;
            if consecutive_exits >= 8 {
                break;
            }
            continue;
        }
        consecutive_exits = 0;
        let (tf, tj) = eval(trial);
        let tres2 = dot(&tf, &tf);
        if tres2 < res2 {
            x = trial;
            f = tf;
            jac = tj;
            res2 = tres2;
            lambda *= 0.5;
        } else {
            lambda *= 2.0;
        }
    }

    let residual = crate::math::fsqrt(res2);
    LmOutcome {
        point: CartesianPoint::new(x[0], x[1], x[2]),
        residual,
        converged: residual <= RES_TOL,
        iterations,
    }
}

/// Refines a starting point toward the zero set of the constructed field.
pub fn refine_zero(start: &CartesianPoint, spec: &KnotSpec) -> Result<ZeroCandidate, GeometryError> {
    refine_zero_with_field(start, &|j| field_x_at(j, spec), spec.p, spec.q)
}

/// Refinement against an arbitrary jet-valued field (the test hook for
/// perturbed inputs); (p, q) fix the knot the distance is measured to.
pub fn refine_zero_with_field(
    start: &CartesianPoint,
    field: &dyn Fn(&[Jet; 3]) -> [Jet; 3],
    p: i64,
    q: i64,
) -> Result<ZeroCandidate, GeometryError> {
    if !in_annulus_margin(start, DERIV_MARGIN) {
        return Err(GeometryError::OutOfDomain {
            x: start.x,
            y: start.y,
            z: start.z,
        });
    }
    let out = lm_refine(start, field);
    Ok(ZeroCandidate {
        knot_distance: dist_to_knot(&out.point, p, q),
        point: out.point,
        residual: out.residual,
        refined: true,
        converged: out.converged,
        iterations: out.iterations,
    })
}

/// Two-sided certification of the constructed field's zero set.
pub fn certify_zero_set(spec: &KnotSpec, config: &ZeroSetConfig) -> ZeroSetReport {
    certify_impl(spec, config, None)
}

/// Certification of an arbitrary jet-valued field against the (p,q) knot —
/// the hook that lets tests prove a broken field fails. The scan threshold
/// falls back to the Euclidean norm, since the component norm is specific to
/// the constructed field.
pub fn certify_zero_set_with_field(
    spec: &KnotSpec,
    config: &ZeroSetConfig,
    field: &dyn Fn(&[Jet; 3]) -> [Jet; 3],
) -> ZeroSetReport {
    certify_impl(spec, config, Some(field))
}

fn certify_impl(
    spec: &KnotSpec,
    config: &ZeroSetConfig,
    field_override: Option<&dyn Fn(&[Jet; 3]) -> [Jet; 3]>,
) -> ZeroSetReport {
    assert!(config.resolution >= 8, "grid resolution must be at least 8");
    let default_field = |j: &[Jet; 3]| field_x_at(j, spec);
    let field: &dyn Fn(&[Jet; 3]) -> [Jet; 3] = match field_override {
        Some(f) => f,
        None => &default_field,
    };
    let field_value = |pt: &CartesianPoint| -> Vec3 {
        let jets = field(&[
            Jet::constant(pt.x),
            Jet::constant(pt.y),
            Jet::constant(pt.z),
        ]);
        [jets[0].value, jets[1].value, jets[2].value]
    };

    let mut offending = Vec::new();

    // Forward: the field must vanish along the knot itself.
    let mut forward_max = 0.0f64;
    for i in 0..config.n_knot_samples {
        let t = i as f64 * TAU / config.n_knot_samples as f64;
        let pt = torus_knot_point(spec.p, spec.q, t);
        let residual = norm3(field_value(&pt));
        if residual > forward_max {
            forward_max = residual;
        }
        if residual > config.forward_tol && offending.len() < config.max_offending {
            offending.push(ZeroCandidate {
                point: pt,
                residual,
                refined: false,
                converged: false,
                iterations: 0,
                knot_distance: 0.0,
            });
        }
    }
    let forward_pass = forward_max <= config.forward_tol;

    // Dense polyline for cheap distance classification in the floor sweep.
    const POLYLINE: usize = 1024;
    let mut polyline = Vec::with_capacity(POLYLINE);
    for i in 0..POLYLINE {
        let t = i as f64 * TAU / POLYLINE as f64;
        polyline.push(torus_knot_point(spec.p, spec.q, t).coords());
    }
    let coarse_dist = |coords: &[f64; 3]| -> f64 {
        let mut best = f64::INFINITY;
        for v in &polyline {
            let dx = v[0] - coords[0];
            let dy = v[1] - coords[1];
            let dz = v[2] - coords[2];
            let d2 = dx * dx + dy * dy + dz * dz;
            if d2 < best {
                best = d2;
            }
        }
        crate::math::fsqrt(best)
    };

    // Grid pass: scan norms for the threshold, Euclidean norms and coarse
    // distances for the off-knot floors.
    let mut grid_points = Vec::new();
    let mut scan_norms = Vec::new();
    let mut floors: Vec<FloorEntry> = config
        .deltas
        .iter()
        .map(|&delta| FloorEntry {
            delta,
            floor: f64::INFINITY,
            n_points: 0,
        })
        .collect();
    for ix in 0..config.resolution {
        let x = grid_coordinate(0, ix, config.resolution);
        for iy in 0..config.resolution {
            let y = grid_coordinate(1, iy, config.resolution);
            for iz in 0..config.resolution {
                let z = grid_coordinate(2, iz, config.resolution);
                let pt = CartesianPoint::new(x, y, z);
                if !in_annulus_margin(&pt, SCAN_MARGIN) {
                    continue;
                }
                let (scan_norm, euclid_norm) = match field_override {
                    None => {
                        let (vec, comps) = field_x_with_components(&pt, spec)
                            .expect("margin keeps the point in-domain");
                        (norm3(comps), norm3(vec))
                    }
                    Some(_) => {
                        let n = norm3(field_value(&pt));
                        (n, n)
                    }
                };
                let dist = coarse_dist(&pt.coords());
                for entry in floors.iter_mut() {
                    if dist >= entry.delta {
                        entry.n_points += 1;
                        if euclid_norm < entry.floor {
                            entry.floor = euclid_norm;
                        }
                    }
                }
                grid_points.push((pt, scan_norm, euclid_norm));
                scan_norms.push(scan_norm);
            }
        }
    }
    let n_grid_in_domain = grid_points.len();
    let median_grid_norm = median(&mut scan_norms);
    let threshold = config.threshold.unwrap_or(0.1 * median_grid_norm);
    let floors_pass = floors.iter().all(|e| e.floor > 0.0);

    // Refine every candidate below the threshold.
    let mut candidates = Vec::new();
    let mut n_converged = 0usize;
    let mut n_nonconverged = 0usize;
    let mut max_knot_distance = 0.0f64;
    let mut params = Vec::new();
    for (pt, scan_norm, _) in &grid_points {
        if *scan_norm >= threshold {
            continue;
        }
        // Coverage is a property of the scan: project the grid candidate
        // itself, so sparse stretches of located candidates are visible
        // regardless of where refinement moves them.
        let (_, raw_param) = dist_to_knot_with_param(pt, spec.p, spec.q);
        params.push(raw_param);
        let out = lm_refine(pt, field);
        let knot_distance = dist_to_knot(&out.point, spec.p, spec.q);
        let candidate = ZeroCandidate {
            point: out.point,
            residual: out.residual,
            refined: true,
            converged: out.converged,
            iterations: out.iterations,
            knot_distance,
        };
        if out.converged {
            n_converged += 1;
            if knot_distance > max_knot_distance {
                max_knot_distance = knot_distance;
            }
            if knot_distance > config.reverse_tol && offending.len() < config.max_offending {
                offending.push(candidate);
            }
        } else {
            n_nonconverged += 1;
        }
        candidates.push(candidate);
    }
    let degenerate = candidates.is_empty();
    let reverse_pass = candidates
        .iter()
        .all(|c| !c.converged || c.knot_distance <= config.reverse_tol);

    // Coverage of the knot parameter by the scan candidates' projections.
    let max_param_gap = if params.is_empty() {
        TAU
    } else {
        params.sort_unstable_by(|a, b| a.partial_cmp(b).expect("parameters are finite"));
        let mut gap = TAU - params[params.len() - 1] + params[0];
        for w in params.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        gap
    };

    let pass = forward_pass && reverse_pass && floors_pass;
    ZeroSetReport {
        p: spec.p,
        q: spec.q,
        k: spec.k,
        resolution: config.resolution,
        n_grid_in_domain,
        median_grid_norm,
        threshold,
        candidates,
        n_knot_samples: config.n_knot_samples,
        forward_max_residual: forward_max,
        forward_tol: config.forward_tol,
        forward_pass,
        max_knot_distance,
        reverse_tol: config.reverse_tol,
        reverse_pass,
        n_converged,
        n_nonconverged,
        floors,
        floors_pass,
        max_param_gap,
        degenerate,
        offending,
        pass,
    }
}
