//! Fixed-step classical RK4 integration of the field, producing in-domain
//! polylines. Every evaluation — Runge–Kutta stages included — is gated on
//! the margin-shrunk annulus, so a trajectory stops cleanly at the boundary
//! instead of sampling the closed form outside its domain.

use knotfield::fields::field_x_at;
use knotfield::geometry::{in_annulus_margin, CartesianPoint, KnotSpec};
use knotfield::math::norm3;
use serde::{Deserialize, Serialize};

/// Accepted points and stage evaluations keep this distance from the
/// annulus boundary.
pub const BOUNDARY_MARGIN: f64 = 1e-3;
/// Speeds below this are treated as a stationary point (zeros of the field
/// are equilibria of the flow).
pub const STATIONARY_TOL: f64 = 1e-13;
/// Hard cap on steps, so a slow crawl near the zero set cannot spin forever.
pub const DEFAULT_MAX_STEPS: usize = 2_000_000;

/// Why the integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The arc-length budget was spent.
    SpanEnd,
    /// The next step would have left the margin-shrunk domain.
    Boundary,
    /// The speed dropped below [`STATIONARY_TOL`].
    Stationary,
    /// The start point itself was outside the domain.
    ImmediateExit,
    /// The step cap was reached before the span.
    StepLimit,
}

/// One integrated trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldLine {
    pub start: [f64; 3],
    pub step: f64,
    pub span: f64,
    /// In-domain points, in integration order; empty only for an
    /// out-of-domain start.
    pub points: Vec<[f64; 3]>,
    /// |X| at each point.
    pub speeds: Vec<f64>,
    /// Total chord length of the polyline.
    pub arc_length: f64,
    pub termination: Termination,
    pub warning: Option<String>,
}

impl FieldLine {
    /// Largest distance between consecutive points.
    pub fn max_chord(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| dist(&w[0], &w[1]))
            .fold(0.0, f64::max)
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    norm3([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

/// One classical RK4 step; `None` when any stage left the field's domain.
pub fn rk4_step<F>(field: &F, y: &[f64; 3], h: f64) -> Option<[f64; 3]>
where
    F: Fn(&[f64; 3]) -> Option<[f64; 3]>,
{
    let k1 = field(y)?;
    let k2 = field(&offset(y, &k1, h / 2.0))?;
    let k3 = field(&offset(y, &k2, h / 2.0))?;
    let k4 = field(&offset(y, &k3, h))?;
    Some(core::array::from_fn(|i| {
        y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

fn offset(y: &[f64; 3], k: &[f64; 3], h: f64) -> [f64; 3] {
    core::array::from_fn(|i| y[i] + h * k[i])
}

/// Integrates until the arc-length budget, the domain boundary, a stationary
/// point, or the step cap — whichever comes first.
pub fn integrate_with<F>(
    field: &F,
    start: [f64; 3],
    step: f64,
    span: f64,
    max_steps: usize,
) -> FieldLine
where
    F: Fn(&[f64; 3]) -> Option<[f64; 3]>,
{
    let base = |termination, points: Vec<[f64; 3]>, speeds: Vec<f64>, warning| FieldLine {
        start,
        step,
        span,
        arc_length: 0.0,
        points,
        speeds,
        termination,
        warning,
    };

    let Some(v0) = field(&start) else {
        return base(
            Termination::ImmediateExit,
            Vec::new(),
            Vec::new(),
            Some(format!(
                "start ({}, {}, {}) lies outside the domain (margin {BOUNDARY_MARGIN:e})",
                start[0], start[1], start[2]
            )),
        );
    };
    let speed0 = norm3(v0);
    if speed0 < STATIONARY_TOL {
        return base(
            Termination::Stationary,
            vec![start],
            vec![speed0],
            Some(format!(
                "stationary start: |X| = {speed0:.3e} — the point sits on the zero set"
            )),
        );
    }

    let mut points = vec![start];
    let mut speeds = vec![speed0];
    let mut arc = 0.0f64;
    let mut y = start;
    let mut termination = Termination::StepLimit;
    let mut warning = None;

    for _ in 0..max_steps {
        let Some(next) = rk4_step(field, &y, step) else {
            termination = Termination::Boundary;
            break;
        };
        let Some(v) = field(&next) else {
            termination = Termination::Boundary;
            break;
        };
        arc += dist(&y, &next);
        y = next;
        points.push(next);
        speeds.push(norm3(v));
        if *speeds.last().unwrap() < STATIONARY_TOL {
            termination = Termination::Stationary;
            break;
        }
        if arc >= span {
            termination = Termination::SpanEnd;
            break;
        }
    }
    if termination == Termination::StepLimit {
        warning = Some(format!(
            "step cap of {max_steps} reached after arc length {arc:.6}"
        ));
    }

    let mut line = base(termination, points, speeds, warning);
    line.arc_length = arc;
    line
}

/// The field closure for a spec: evaluates the closed form inside the
/// margin-shrunk annulus and refuses everywhere else.
pub fn spec_field(spec: &KnotSpec) -> impl Fn(&[f64; 3]) -> Option<[f64; 3]> + '_ {
    move |y: &[f64; 3]| {
        let pt = CartesianPoint::new(y[0], y[1], y[2]);
        if in_annulus_margin(&pt, BOUNDARY_MARGIN) {
            Some(field_x_at(y, spec))
        } else {
            None
        }
    }
}

/// Integrates the constructed field from `start` with the default step cap.
pub fn integrate(spec: &KnotSpec, start: [f64; 3], step: f64, span: f64) -> FieldLine {
    integrate_with(&spec_field(spec), start, step, span, DEFAULT_MAX_STEPS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use knotfield::geometry::{in_annulus, make_knot_spec, torus_knot_point};

    #[test]
    fn endpoint_error_shrinks_at_fourth_order() {
        let spec = make_knot_spec(2, 3, 0).unwrap();
        let field = spec_field(&spec);
        let start = [0.0, 1.25, 0.0];
        let endpoint = |h: f64, n: usize| {
            let mut y = start;
            for _ in 0..n {
                y = rk4_step(&field, &y, h).expect("trajectory stays in-domain");
            }
            y
        };
        // Steps are deliberately coarse: the truncation error must stay well
        // above the accumulated roundoff for the 16x ratio to be visible.
        let coarse = endpoint(2e-2, 25);
        let mid = endpoint(1e-2, 50);
        let fine = endpoint(5e-3, 100);
        let e1 = dist(&coarse, &mid);
        let e2 = dist(&mid, &fine);
        assert!(e1 > 0.0 && e2 > 0.0, "errors must be resolvable");
        let ratio = e1 / e2;
        assert!(
            (12.0..=20.0).contains(&ratio),
            "halving the step should shrink the endpoint error 16x, got {ratio}"
        );
    }

    #[test]
    fn trajectory_stays_in_domain_with_bounded_chords() {
        let spec = make_knot_spec(2, 3, 0).unwrap();
        let line = integrate(&spec, [0.0, 1.25, 0.0], 1e-3, 2.0);
        assert!(line.points.len() > 100);
        for (pt, speed) in line.points.iter().zip(&line.speeds) {
            assert!(in_annulus(&CartesianPoint::new(pt[0], pt[1], pt[2])));
            assert!(*speed > 0.0);
        }
        for (w, s) in line.points.windows(2).zip(line.speeds.windows(2)) {
            let chord = dist(&w[0], &w[1]);
            let bound = line.step * s[0].max(s[1]) * 1.2 + 1e-12;
            assert!(chord > 0.0 && chord <= bound, "chord {chord} vs bound {bound}");
        }
    }

    #[test]
    fn span_budget_terminates_the_run() {
        let spec = make_knot_spec(2, 3, 0).unwrap();
        let line = integrate(&spec, [0.0, 1.25, 0.0], 1e-3, 0.05);
        assert_eq!(line.termination, Termination::SpanEnd);
        assert!(line.arc_length >= line.span);
        assert!(line.arc_length <= line.span + line.max_chord());
        assert!(line.warning.is_none());
    }

    #[test]
    fn knot_start_is_stationary() {
        let spec = make_knot_spec(2, 3, 0).unwrap();
        let start = torus_knot_point(2, 3, 0.0);
        let line = integrate(&spec, start.coords(), 1e-3, 1.0);
        assert_eq!(line.termination, Termination::Stationary);
        assert_eq!(line.points.len(), 1);
        assert!(line.warning.as_deref().unwrap().contains("stationary"));
    }

    #[test]
    fn out_of_domain_start_exits_immediately() {
        let spec = make_knot_spec(2, 3, 0).unwrap();
        let line = integrate(&spec, [0.0, 0.0, 0.0], 1e-3, 1.0);
        assert_eq!(line.termination, Termination::ImmediateExit);
        assert!(line.points.is_empty());
        assert!(line.warning.is_some());
    }

    #[test]
    fn outward_flow_stops_at_the_boundary() {
        let field = |y: &[f64; 3]| {
            let pt = CartesianPoint::new(y[0], y[1], y[2]);
            in_annulus_margin(&pt, BOUNDARY_MARGIN).then_some([1.0, 0.0, 0.0])
        };
        let line = integrate_with(&field, [3.0, 0.0, 0.7], 1e-3, 10.0, DEFAULT_MAX_STEPS);
        assert_eq!(line.termination, Termination::Boundary);
        let last = line.points.last().unwrap();
        assert!(last[0] > 3.2, "should travel outward before exiting");
        assert!(in_annulus(&CartesianPoint::new(last[0], last[1], last[2])));
    }

    #[test]
    fn step_cap_is_reported() {
        let spec = make_knot_spec(2, 3, 0).unwrap();
        let line = integrate_with(&spec_field(&spec), [0.0, 1.25, 0.0], 1e-3, 1e9, 10);
        assert_eq!(line.termination, Termination::StepLimit);
        assert_eq!(line.points.len(), 11);
        assert!(line.warning.as_deref().unwrap().contains("step cap"));
    }

    #[test]
    fn termination_serializes_kebab_case() {
        let json = serde_json::to_string(&Termination::ImmediateExit).unwrap();
        assert_eq!(json, "\"immediate-exit\"");
        let back: Termination = serde_json::from_str("\"span-end\"").unwrap();
        assert_eq!(back, Termination::SpanEnd);
    }
}
