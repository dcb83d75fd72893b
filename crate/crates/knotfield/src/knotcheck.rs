//! Tameness evidence for the torus knots: closure of the parametrization,
//! injectivity at sample resolution, arc-length reparametrization with a
//! unit-speed check, and finite total curvature — Euclidean and in the
//! construction metric.

use crate::calculus::{seed_curve_param, seed_point, CurveJet, Domain, Jet};
use crate::geometry::{knot_curve, CartesianPoint, KnotSpec};
use crate::linalg::{cross, Mat3, IDENTITY};
use crate::math::{fabs, fsqrt, norm3};
use crate::metric::{christoffel_of, metric_g_at};
use alloc::vec::Vec;
use core::f64::consts::TAU;

/// Uniform-in-parameter samples of the (p,q)-torus knot over one period,
/// with the measured closure and injectivity evidence. The sample arrays
/// have `n + 1` entries; the last parameter is 2π, duplicating the first
/// point up to the reported `closure_gap`.
#[derive(Clone, Debug)]
pub struct CurveSampling {
    pub p: i64,
    pub q: i64,
    pub parameters: Vec<f64>,
    pub points: Vec<[f64; 3]>,
    /// Euclidean speeds |Γ′(t_i)|.
    pub speeds: Vec<f64>,
    /// Cumulative Euclidean arc length, Simpson-integrated per interval.
    pub arc_length: Vec<f64>,
    /// Euclidean curvature κ = |Γ′ × Γ″| / |Γ′|³.
    pub curvature: Vec<f64>,
    /// |Γ(0) − Γ(2π)|.
    pub closure_gap: f64,
    /// Minimum distance between non-adjacent samples (cyclically), the
    /// sample-resolution injectivity certificate.
    pub min_pairwise_distance: f64,
}

fn curve_jets(p: i64, q: i64, t: f64) -> [CurveJet; 3] {
    knot_curve(p, q, seed_curve_param(t))
}

fn euclid_speed(p: i64, q: i64, t: f64) -> f64 {
    let c = curve_jets(p, q, t);
    norm3([c[0].d1, c[1].d1, c[2].d1])
}

/// Samples the knot uniformly in its parameter, including both endpoints.
pub fn knot_sampling(p: i64, q: i64, n_samples: usize) -> CurveSampling {
    assert!(n_samples >= 64, "need at least 64 curve samples");
    let n = n_samples;
    let dt = TAU / n as f64;

    let mut parameters = Vec::with_capacity(n + 1);
    let mut points = Vec::with_capacity(n + 1);
    let mut speeds = Vec::with_capacity(n + 1);
    let mut curvature = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = i as f64 * dt;
        let c = curve_jets(p, q, t);
        let d1 = [c[0].d1, c[1].d1, c[2].d1];
        let d2 = [c[0].d2, c[1].d2, c[2].d2];
        let v = norm3(d1);
        parameters.push(t);
        points.push([c[0].value, c[1].value, c[2].value]);
        speeds.push(v);
        curvature.push(norm3(cross(&d1, &d2)) / (v * v * v));
    }

    let mut arc_length = Vec::with_capacity(n + 1);
    arc_length.push(0.0);
    for i in 0..n {
        let mid = euclid_speed(p, q, (i as f64 + 0.5) * dt);
        let seg = dt / 6.0 * (speeds[i] + 4.0 * mid + speeds[i + 1]);
        arc_length.push(arc_length[i] + seg);
    }

    let closure_gap = {
        let a = points[0];
        let b = points[n];
        norm3([b[0] - a[0], b[1] - a[1], b[2] - a[2]])
    };

    // Distinct samples are indices 0..n; adjacency is cyclic.
    let mut min_pairwise_distance = f64::INFINITY;
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let a = points[i];
            let b = points[j];
            let d = norm3([b[0] - a[0], b[1] - a[1], b[2] - a[2]]);
            if d < min_pairwise_distance {
                min_pairwise_distance = d;
            }
        }
    }

    CurveSampling {
        p,
        q,
        parameters,
        points,
        speeds,
        arc_length,
        curvature,
        closure_gap,
        min_pairwise_distance,
    }
}

/// Total Euclidean curvature ∫ κ ds over one period, integrated as
/// ∫ κ(t) |Γ′(t)| dt by composite Simpson on the uniform parameter grid.
pub fn euclid_total_curvature(p: i64, q: i64, n_samples: usize) -> f64 {
    assert!(n_samples >= 256, "need at least 256 quadrature intervals");
    let dt = TAU / n_samples as f64;
    let integrand = |t: f64| -> f64 {
        let c = curve_jets(p, q, t);
        let d1 = [c[0].d1, c[1].d1, c[2].d1];
        let d2 = [c[0].d2, c[1].d2, c[2].d2];
        let v = norm3(d1);
        norm3(cross(&d1, &d2)) / (v * v)
    };
    let mut total = 0.0;
    let mut left = integrand(0.0);
    for i in 0..n_samples {
        let mid = integrand((i as f64 + 0.5) * dt);
        let right = integrand((i + 1) as f64 * dt);
        total += dt / 6.0 * (left + 4.0 * mid + right);
        left = right;
    }
    total
}

/// Metric access the geodesic computation needs: pointwise values for
/// speeds and norms, jets for derivatives and Christoffel symbols.
struct MetricOps<'a> {
    primal: &'a dyn Fn(&CartesianPoint) -> Mat3,
    jets: &'a dyn Fn(&[Jet; 3]) -> [[Jet; 3]; 3],
}

/// Result of the geodesic-curvature computation.
#[derive(Clone, Copy, Debug)]
pub struct GeodesicReport {
    /// ∫ κ_g ds over one period, Simpson on the uniform arc-length grid.
    pub total: f64,
    /// Arc length of the knot in the metric.
    pub length: f64,
    /// Worst deviation from 1 of the per-interval average speed of the
    /// reparametrized curve, measured by independent quadrature.
    pub max_speed_deviation: f64,
}

/// Cumulative arc-length table on a fine uniform grid, inverted by a
/// bracketed Newton iteration on the per-interval Simpson rule.
struct ArcTable {
    t: Vec<f64>,
    s: Vec<f64>,
    v: Vec<f64>,
    total: f64,
}

impl ArcTable {
    fn build(speed: &dyn Fn(f64) -> f64, n_fine: usize) -> ArcTable {
        let dt = TAU / n_fine as f64;
        let mut t = Vec::with_capacity(n_fine + 1);
        let mut v = Vec::with_capacity(n_fine + 1);
        for i in 0..=n_fine {
            let ti = i as f64 * dt;
            t.push(ti);
            v.push(speed(ti));
        }
        let mut s = Vec::with_capacity(n_fine + 1);
        s.push(0.0);
        for i in 0..n_fine {
            let mid = speed((i as f64 + 0.5) * dt);
            s.push(s[i] + dt / 6.0 * (v[i] + 4.0 * mid + v[i + 1]));
        }
        let total = s[n_fine];
        ArcTable { t, s, v, total }
    }

    fn t_of_s(&self, speed: &dyn Fn(f64) -> f64, s_target: f64) -> f64 {
        if s_target <= 0.0 {
            return 0.0;
        }
        if s_target >= self.total {
            return TAU;
        }
        let idx = self.s.partition_point(|&x| x < s_target);
        let j = idx.saturating_sub(1).min(self.t.len() - 2);
        let (ta, tb) = (self.t[j], self.t[j + 1]);
        let (sa, sb) = (self.s[j], self.s[j + 1]);
        let va = self.v[j];
        let mut t = ta + (tb - ta) * ((s_target - sa) / (sb - sa)).clamp(0.0, 1.0);
        for _ in 0..40 {
            let mid = 0.5 * (ta + t);
            let vt = speed(t);
            let g = sa + (t - ta) / 6.0 * (va + 4.0 * speed(mid) + vt) - s_target;
            let step = g / vt;
            t = (t - step).clamp(ta, tb);
            if fabs(step) <= 1e-14 * (1.0 + self.total) {
                break;
            }
        }
        t
    }
}

/// Composite Simpson of a speed over [a, b] with a fixed panel count —
/// the independent quadrature behind the unit-speed check.
fn integrate_speed(speed: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    let mut left = speed(a);
    for i in 0..panels {
        let mid = speed(a + (i as f64 + 0.5) * h);
        let right = speed(a + (i + 1) as f64 * h);
        total += h / 6.0 * (left + 4.0 * mid + right);
        left = right;
    }
    total
}

fn geodesic_report_with(p: i64, q: i64, n_samples: usize, ops: &MetricOps) -> GeodesicReport {
    assert!(n_samples >= 256, "need at least 256 quadrature intervals");

    let speed = |t: f64| -> f64 {
        let c = curve_jets(p, q, t);
        let pt = CartesianPoint::new(c[0].value, c[1].value, c[2].value);
        let gv = (ops.primal)(&pt);
        let d1 = [c[0].d1, c[1].d1, c[2].d1];
        let mut sum = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                sum += gv[i][j] * d1[i] * d1[j];
            }
        }
        fsqrt(sum)
    };

    // κ_g at a parameter value: reparametrize analytically through the
    // speed, then apply the covariant derivative along the curve.
    let kappa_g = |t: f64| -> f64 {
        let c = curve_jets(p, q, t);
        let pos = [c[0].value, c[1].value, c[2].value];
        let pt = CartesianPoint::new(pos[0], pos[1], pos[2]);
        let d1 = [c[0].d1, c[1].d1, c[2].d1];
        let d2 = [c[0].d2, c[1].d2, c[2].d2];
        let gv = (ops.primal)(&pt);
        let g_jets = (ops.jets)(&seed_point(pos));

        let mut v2 = 0.0;
        let mut dg_contracted = 0.0; // ∂_k g_ij Γ′^k Γ′^i Γ′^j
        let mut g_d2_d1 = 0.0; // g_ij Γ″^i Γ′^j
        for i in 0..3 {
            for j in 0..3 {
                v2 += gv[i][j] * d1[i] * d1[j];
                g_d2_d1 += gv[i][j] * d2[i] * d1[j];
                for k in 0..3 {
                    dg_contracted += g_jets[i][j].partials[k] * d1[k] * d1[i] * d1[j];
                }
            }
        }
        let v = fsqrt(v2);
        let vdot = (dg_contracted + 2.0 * g_d2_d1) / (2.0 * v);

        // d/ds through t(s): Γ̇_s = Γ′/v, Γ̈_s = Γ″/v² − Γ′ v̇/v³.
        let mut t1 = [0.0; 3];
        let mut t2 = [0.0; 3];
        for i in 0..3 {
            t1[i] = d1[i] / v;
            t2[i] = d2[i] / v2 - d1[i] * vdot / (v2 * v);
        }

        let chr = christoffel_of(&|j: &[Jet; 3]| (ops.jets)(j), pos, Domain::Annulus)
            .expect("knot samples are interior points of the annulus");
        let mut ds = [0.0; 3];
        for i in 0..3 {
            let mut correction = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    correction += t1[j] * t1[k] * chr.gamma[i][j][k];
                }
            }
            ds[i] = t2[i] + correction;
        }
        let mut k2 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                k2 += gv[i][j] * ds[i] * ds[j];
            }
        }
        fsqrt(k2)
    };

    let n_fine = (8 * n_samples).max(4096);
    let table = ArcTable::build(&speed, n_fine);
    let length = table.total;
    let ds = length / n_samples as f64;

    // Parameter values of the uniform arc-length nodes and midpoints.
    let mut t_nodes = Vec::with_capacity(n_samples + 1);
    for j in 0..=n_samples {
        t_nodes.push(table.t_of_s(&speed, j as f64 * ds));
    }

    let mut max_speed_deviation = 0.0f64;
    let mut total = 0.0;
    let mut left = kappa_g(t_nodes[0]);
    for j in 0..n_samples {
        let t_mid = table.t_of_s(&speed, (j as f64 + 0.5) * ds);
        let right = kappa_g(t_nodes[j + 1]);
        total += ds / 6.0 * (left + 4.0 * kappa_g(t_mid) + right);
        left = right;

        let avg = integrate_speed(&speed, t_nodes[j], t_nodes[j + 1], 64) / ds;
        let dev = fabs(avg - 1.0);
        if dev > max_speed_deviation {
            max_speed_deviation = dev;
        }
    }

    GeodesicReport {
        total,
        length,
        max_speed_deviation,
    }
}

/// Total curvature of the knot in the construction metric, with the metric
/// arc length and the unit-speed certification of the reparametrization.
pub fn geodesic_curvature_report(spec: &KnotSpec, n_samples: usize) -> GeodesicReport {
    let spec = *spec;
    let primal = move |pt: &CartesianPoint| -> Mat3 {
        crate::metric::metric_g(pt, &spec)
            .expect("knot samples are interior points of the annulus")
            .g
    };
    let jets = move |j: &[Jet; 3]| metric_g_at(j, &spec);
    let ops = MetricOps {
        primal: &primal,
        jets: &jets,
    };
    geodesic_report_with(spec.p, spec.q, n_samples, &ops)
}

/// Total curvature of the knot in the construction metric.
pub fn geodesic_total_curvature(spec: &KnotSpec, n_samples: usize) -> f64 {
    geodesic_curvature_report(spec, n_samples).total
}

/// Test hook: the geodesic pipeline run against the identity metric, which
/// must reproduce the Euclidean total curvature.
pub fn identity_metric_geodesic_report(p: i64, q: i64, n_samples: usize) -> GeodesicReport {
    let primal = |_: &CartesianPoint| -> Mat3 { IDENTITY };
    let jets = |_: &[Jet; 3]| -> [[Jet; 3]; 3] {
        let mut out = [[Jet::constant(0.0); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            row[i] = Jet::constant(1.0);
        }
        out
    };
    let ops = MetricOps {
        primal: &primal,
        jets: &jets,
    };
    geodesic_report_with(p, q, n_samples, &ops)
}
