//! The vector fields of the construction: the base field B on the flat
//! model, the closed-form fields X on the annulus, the exact trefoil special
//! case, and the numeric-pushforward oracle that cross-checks them.
//!
//! On the flat model the base field B(P) = (cos(z−1) − cos(y), sin(1−z),
//! −sin(y)) is a curl eigenfield of the flat metric with eigenvalue +1 and
//! vanishes exactly on the circle {([x], [0], 1)}. Transporting B through
//! ψ∘twist produces the annulus field X whose zero set is the (p,q)-torus
//! knot; the closed form expands the transport into the frame vectors
//! e_a, e_c, e_t and three scalar component functions.

use crate::calculus::{jacobian_of_map, CalculusError, CoordMap};
use crate::geometry::{
    in_annulus, psi_inv, twist_inv, CartesianPoint, GeometryError, KnotSpec, ToroidalPoint,
};
use crate::linalg::{det3, mat_vec, transpose, Vec3};
use crate::math::Scalar;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("({cos_v}, {sin_v}) is off the unit circle by {defect}; multiple-angle evaluation needs a normalized pair")]
    NotNormalized { cos_v: f64, sin_v: f64, defect: f64 },
    #[error("multiple-angle count must be a positive integer, got {n}")]
    NonPositiveMultiple { n: i64 },
}

/// Pushforwards of the three flat-model coordinate basis vectors at a point —
/// the columns the closed-form field is assembled from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameTriple {
    pub e_a: Vec3,
    pub e_c: Vec3,
    pub e_t: Vec3,
}

impl FrameTriple {
    /// Determinant of the matrix with columns (e_a, e_c, e_t); nonzero at
    /// every in-domain point.
    pub fn det(&self) -> f64 {
        det3(&transpose(&[self.e_a, self.e_c, self.e_t]))
    }
}

/// The base field on the flat model, on any scalar type. Coordinates are
/// (x, y, z) with z the radial slot: B = (cos(z−1) − cos(y), sin(1−z), −sin(y)).
pub fn base_field_b_at<S: Scalar>(p: &[S; 3]) -> [S; 3] {
    let one = S::from_f64(1.0);
    let y = p[1];
    let z = p[2];
    [(z - one).cos() - y.cos(), (one - z).sin(), -y.sin()]
}

/// The base field at a flat-model point.
pub fn base_field_b(p: &ToroidalPoint) -> Vec3 {
    base_field_b_at(&[p.a, p.c, p.t])
}

/// cos(n·θ) and sin(n·θ) from (cos θ, sin θ) by the Chebyshev three-term
/// recurrence — pure arithmetic, so it runs on jets and avoids branch cuts.
pub fn multiple_angle<S: Scalar>(n: i64, cos_t: S, sin_t: S) -> (S, S) {
    let two_c = cos_t + cos_t;
    let mut c_prev = S::from_f64(1.0);
    let mut s_prev = S::from_f64(0.0);
    let mut c_cur = cos_t;
    let mut s_cur = sin_t;
    for _ in 1..n {
        let c_next = two_c * c_cur - c_prev;
        let s_next = two_c * s_cur - s_prev;
        c_prev = c_cur;
        s_prev = s_cur;
        c_cur = c_next;
        s_cur = s_next;
    }
    (c_cur, s_cur)
}

/// Checked multiple-angle evaluation: rejects pairs off the unit circle by
/// more than 1e−12 and non-positive multiples.
pub fn multiple_angle_eval(n: i64, cos_t: f64, sin_t: f64) -> Result<(f64, f64), FieldError> {
    if n < 1 {
        return Err(FieldError::NonPositiveMultiple { n });
    }
    let defect = (cos_t * cos_t + sin_t * sin_t - 1.0).abs();
    if defect > 1e-12 {
        return Err(FieldError::NotNormalized {
            cos_v: cos_t,
            sin_v: sin_t,
            defect,
        });
    }
    Ok(multiple_angle(n, cos_t, sin_t))
}

/// The three scalar component functions (X¹, X², X³) at a flat-model point
/// P = ψ⁻¹(pt), reading R from the t-coordinate of P:
/// X¹ = cos(R−1) − (cos(qc)cos(pa) + sin(qc)sin(pa)), X² = sin(1−R),
/// X³ = cos(qc)sin(pa) − sin(qc)cos(pa).
pub fn components_x(p: &ToroidalPoint, spec: &KnotSpec) -> (f64, f64, f64) {
    let (cos_pa, sin_pa) = multiple_angle(spec.p, p.a.cos(), p.a.sin());
    let (cos_qc, sin_qc) = multiple_angle(spec.q, p.c.cos(), p.c.sin());
    let big_r = p.t;
    let x1 = (big_r - 1.0).cos() - (cos_qc * cos_pa + sin_qc * sin_pa);
    let x2 = (1.0 - big_r).sin();
    let x3 = cos_qc * sin_pa - sin_qc * cos_pa;
    (x1, x2, x3)
}

/// (X¹, X², X³) straight from Cartesian coordinates, on any scalar type.
/// Uses cos a = x/r, sin a = y/r, cos c = (r−2)/R, sin c = z/R and the
/// multiple-angle recurrence, so no inverse trigonometry is involved.
pub fn components_from_cartesian<S: Scalar>(coords: &[S; 3], spec: &KnotSpec) -> [S; 3] {
    let one = S::from_f64(1.0);
    let two = S::from_f64(2.0);
    let (x, y, z) = (coords[0], coords[1], coords[2]);
    let r = (x * x + y * y).sqrt();
    let rm2 = r - two;
    let big_r = (rm2 * rm2 + z * z).sqrt();
    let (cos_pa, sin_pa) = multiple_angle(spec.p, x / r, y / r);
    let (cos_qc, sin_qc) = multiple_angle(spec.q, rm2 / big_r, z / big_r);
    [
        (big_r - one).cos() - (cos_qc * cos_pa + sin_qc * sin_pa),
        (one - big_r).sin(),
        cos_qc * sin_pa - sin_qc * cos_pa,
    ]
}

fn frame_vectors<S: Scalar>(coords: &[S; 3]) -> [[S; 3]; 3] {
    let two = S::from_f64(2.0);
    let zero = S::from_f64(0.0);
    let (x, y, z) = (coords[0], coords[1], coords[2]);
    let r = (x * x + y * y).sqrt();
    let rm2 = r - two;
    let big_r = (rm2 * rm2 + z * z).sqrt();
    let e_a = [-y, x, zero];
    let e_c = [-z * x / r, -z * y / r, rm2];
    let e_t = [
        x * rm2 / (r * big_r),
        y * rm2 / (r * big_r),
        z / big_r,
    ];
    [e_a, e_c, e_t]
}

/// The frame vectors at an in-domain point.
pub fn frame_at(pt: &CartesianPoint) -> Result<FrameTriple, FieldError> {
    ensure_in_domain(pt)?;
    let [e_a, e_c, e_t] = frame_vectors(&pt.coords());
    Ok(FrameTriple { e_a, e_c, e_t })
}

/// The closed-form field on any scalar type (no domain check — callers
/// guard): X = (qX¹ − b_k X²)·e_a + (pX¹ + d_k X²)·e_c + X³·e_t.
pub fn field_x_at<S: Scalar>(coords: &[S; 3], spec: &KnotSpec) -> [S; 3] {
    let [x1, x2, x3] = components_from_cartesian(coords, spec);
    let [e_a, e_c, e_t] = frame_vectors(coords);
    let coef_a = S::from_f64(spec.q as f64) * x1 - S::from_f64(spec.b_k as f64) * x2;
    let coef_c = S::from_f64(spec.p as f64) * x1 + S::from_f64(spec.d_k as f64) * x2;
    core::array::from_fn(|i| coef_a * e_a[i] + coef_c * e_c[i] + x3 * e_t[i])
}

fn ensure_in_domain(pt: &CartesianPoint) -> Result<(), FieldError> {
    if !in_annulus(pt) {
        return Err(GeometryError::OutOfDomain {
            x: pt.x,
            y: pt.y,
            z: pt.z,
        }
        .into());
    }
    Ok(())
}

/// The constructed field at an in-domain point.
pub fn field_x(pt: &CartesianPoint, spec: &KnotSpec) -> Result<Vec3, FieldError> {
    ensure_in_domain(pt)?;
    Ok(field_x_at(&pt.coords(), spec))
}

/// The field vector together with its scalar components (X¹, X², X³) in one
/// evaluation; the component norm √(X¹²+X²²+X³²) is exactly the norm of X in
/// the construction metric, which the zero-set scan thresholds on.
pub fn field_x_with_components(
    pt: &CartesianPoint,
    spec: &KnotSpec,
) -> Result<(Vec3, [f64; 3]), FieldError> {
    ensure_in_domain(pt)?;
    let coords = pt.coords();
    let comps = components_from_cartesian(&coords, spec);
    let [e_a, e_c, e_t] = frame_vectors(&coords);
    let coef_a = spec.q as f64 * comps[0] - spec.b_k as f64 * comps[1];
    let coef_c = spec.p as f64 * comps[0] + spec.d_k as f64 * comps[1];
    let vec = core::array::from_fn(|i| coef_a * e_a[i] + coef_c * e_c[i] + comps[2] * e_t[i]);
    Ok((vec, comps))
}

/// The exact (2,3) component functions as displayed rational-trigonometric
/// closed forms; must agree with the generic path to 1e−12.
///
/// The middle bracket of X³ carries a z/R prefactor: with z/r the expression
/// disagrees with the generic components by O(1) everywhere off the symmetry
/// planes, while z/R reproduces them to machine precision (a one-character
/// misprint in the source display, repaired here and verified by the
/// property tests).
pub fn trefoil_components(pt: &CartesianPoint) -> Result<(f64, f64, f64), FieldError> {
    ensure_in_domain(pt)?;
    let (x, y, z) = (pt.x, pt.y, pt.z);
    let r = pt.r;
    let big_r = pt.big_r;
    let rm2 = r - 2.0;
    let r2 = r * r;
    let big_r2 = big_r * big_r;
    let big_r3 = big_r2 * big_r;

    let x1 = (big_r - 1.0).cos()
        + 3.0 * x * x * z * z * rm2 / (r2 * big_r3)
        + (rm2 / big_r)
            * ((y * y / r2) * (2.0 - 5.0 * z * z / big_r2) - rm2 * rm2 / big_r2)
        - 2.0 * (x * y * z / (r2 * big_r)) * (4.0 * rm2 * rm2 / big_r2 - 1.0);

    let x2 = (1.0 - big_r).sin();

    let x3 = x * x * z * z * z / (r2 * big_r3)
        + (z / big_r)
            * ((y * y / r2) * (7.0 * rm2 * rm2 / big_r2 - 1.0) - 3.0 * rm2 * rm2 / big_r2)
        + 2.0 * (x * y * rm2 / (r2 * big_r)) * (1.0 - 4.0 * z * z / big_r2);

    Ok((x1, x2, x3))
}

/// The (2,3) field assembled from [`trefoil_components`] — the special-case
/// path the generic field is checked against.
pub fn trefoil_field(pt: &CartesianPoint, spec: &KnotSpec) -> Result<Vec3, FieldError> {
    let (x1, x2, x3) = trefoil_components(pt)?;
    let [e_a, e_c, e_t] = frame_vectors(&pt.coords());
    let coef_a = spec.q as f64 * x1 - spec.b_k as f64 * x2;
    let coef_c = spec.p as f64 * x1 + spec.d_k as f64 * x2;
    Ok(core::array::from_fn(|i| {
        coef_a * e_a[i] + coef_c * e_c[i] + x3 * e_t[i]
    }))
}

/// Independent numeric transport of the base field: pulls the point back
/// through (ψ∘twist)⁻¹, evaluates B there, and pushes it forward with the
/// jet-computed Jacobian of ψ∘twist. The closed-form field must match this
/// to 1e−10.
pub fn pushforward_oracle(pt: &CartesianPoint, spec: &KnotSpec) -> Result<Vec3, CalculusError> {
    let p0 = twist_inv(&psi_inv(pt)?, spec);
    let b = base_field_b(&p0);
    let jac = jacobian_of_map(CoordMap::PsiAfterTwist(*spec), p0.coords())?;
    Ok(mat_vec(&jac, &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_knot_spec, psi, torus_knot_point};
    use crate::math::norm3;
    use crate::sample::Lcg;
    use core::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn base_field_vanishes_on_model_circle() {
        for i in 0..32 {
            let x = i as f64 * 0.2 - 3.0;
            let b = base_field_b(&ToroidalPoint::new(x, 0.0, 1.0));
            assert!(norm3(b) < 1e-15, "B nonzero at ([{x}],[0],1)");
        }
    }

    #[test]
    fn base_field_worked_values() {
        let b = base_field_b(&ToroidalPoint::new(0.0, PI, 1.0));
        assert!((b[0] - 2.0).abs() < 1e-15 && b[1].abs() < 1e-15 && b[2].abs() < 1e-14);

        let b = base_field_b(&ToroidalPoint::new(0.0, FRAC_PI_2, 1.0));
        assert!((b[0] - 1.0).abs() < 1e-15 && b[1].abs() < 1e-15 && (b[2] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn multiple_angle_worked_values() {
        assert_eq!(multiple_angle_eval(1, 0.6, 0.8).unwrap(), (0.6, 0.8));
        let (c, s) = multiple_angle_eval(2, 0.0, 1.0).unwrap();
        assert!((c + 1.0).abs() < 1e-15 && s.abs() < 1e-15);
        let (c, s) = multiple_angle_eval(3, 1.0, 0.0).unwrap();
        assert!((c - 1.0).abs() < 1e-15 && s.abs() < 1e-15);
    }

    #[test]
    fn multiple_angle_matches_direct_trig() {
        let mut rng = Lcg::new(11);
        for _ in 0..200 {
            let theta = (rng.next_f64() - 0.5) * 2.0 * PI;
            for n in 1..=6 {
                let (c, s) = multiple_angle_eval(n, theta.cos(), theta.sin()).unwrap();
                assert!((c - (n as f64 * theta).cos()).abs() < 1e-12);
                assert!((s - (n as f64 * theta).sin()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn multiple_angle_rejects_bad_input() {
        assert!(matches!(
            multiple_angle_eval(2, 0.5, 0.5),
            Err(FieldError::NotNormalized { .. })
        ));
        assert!(matches!(
            multiple_angle_eval(0, 1.0, 0.0),
            Err(FieldError::NonPositiveMultiple { n: 0 })
        ));
    }

    #[test]
    fn components_worked_values() {
        let spec = make_knot_spec(2, 3, 0).unwrap();

        let (x1, x2, x3) = components_x(&ToroidalPoint::new(0.0, 0.0, 1.0), &spec);
        assert!(x1.abs() < 1e-15 && x2.abs() < 1e-15 && x3.abs() < 1e-15);

        // pa = π, qc = 3π: cos difference collapses to cos(0.25) − 1.
        let (x1, x2, x3) = components_x(&ToroidalPoint::new(FRAC_PI_2, PI, 0.75), &spec);
        assert!((x1 - (0.25f64.cos() - 1.0)).abs() < 1e-14);
        assert!((x2 - 0.25f64.sin()).abs() < 1e-14);
        assert!(x3.abs() < 1e-14);

        let (x1, x2, x3) = components_x(&ToroidalPoint::new(0.0, PI, 1.0), &spec);
        assert!((x1 - 2.0).abs() < 1e-14 && x2.abs() < 1e-15 && x3.abs() < 1e-14);
    }

    #[test]
    fn components_equal_base_field_through_inverse_twist() {
        let spec = make_knot_spec(2, 3, 1).unwrap();
        let mut rng = Lcg::new(7);
        for _ in 0..300 {
            let p = ToroidalPoint::new(
                (rng.next_f64() - 0.5) * 2.0 * PI,
                (rng.next_f64() - 0.5) * 2.0 * PI,
                0.55 + 0.9 * rng.next_f64(),
            );
            let (x1, x2, x3) = components_x(&p, &spec);
            let b = base_field_b(&twist_inv(&p, &spec));
            assert!((x1 - b[0]).abs() < 1e-13);
            assert!((x2 - b[1]).abs() < 1e-13);
            assert!((x3 - b[2]).abs() < 1e-13);
        }
    }

    #[test]
    fn field_vanishes_at_knot_origin() {
        for k in -2..=2 {
            let spec = make_knot_spec(2, 3, k).unwrap();
            let x = field_x(&CartesianPoint::new(3.0, 0.0, 0.0), &spec).unwrap();
            assert!(norm3(x) < 1e-14, "k={k}");
        }
    }

    #[test]
    fn field_frozen_reference_value() {
        // Independently recomputed reference for the worked point (0, 1.25, 0):
        // coefficients (3X¹+X², 2X¹+X²) applied to e_a=(−1.25,0,0), e_c=(0,0,−0.75).
        let spec = make_knot_spec(2, 3, 0).unwrap();
        let x = field_x(&CartesianPoint::new(0.0, 1.25, 0.0), &spec).unwrap();
        assert!((x[0] - (-1.9267653048307143e-1)).abs() < 1e-13);
        assert!(x[1].abs() < 1e-13);
        assert!((x[2] - (-1.3892160200685930e-1)).abs() < 1e-13);
    }

    #[test]
    fn field_vanishes_along_knot() {
        for (p, q) in [(1, 1), (2, 3), (3, 2), (2, 5)] {
            let spec = make_knot_spec(p, q, 0).unwrap();
            for i in 0..100 {
                let t = i as f64 * 0.062831853;
                let pt = torus_knot_point(p, q, t);
                let x = field_x(&pt, &spec).unwrap();
                assert!(norm3(x) <= 1e-12, "({p},{q}) at t={t}: |X|={}", norm3(x));
            }
        }
    }

    #[test]
    fn field_rejects_out_of_domain() {
        let spec = make_knot_spec(2, 3, 0).unwrap();
        assert!(field_x(&CartesianPoint::new(2.0, 0.0, 0.0), &spec).is_err());
    }

    #[test]
    fn frame_worked_value_and_nondegeneracy() {
        let frame = frame_at(&CartesianPoint::new(3.0, 0.0, 0.0)).unwrap();
        assert_eq!(frame.e_a, [0.0, 3.0, 0.0]);
        assert_eq!(frame.e_c, [0.0, 0.0, 1.0]);
        assert_eq!(frame.e_t, [1.0, 0.0, 0.0]);
        assert!((frame.det() - 3.0).abs() < 1e-14);

        let mut rng = Lcg::new(23);
        for _ in 0..300 {
            let p = ToroidalPoint::new(
                (rng.next_f64() - 0.5) * 2.0 * PI,
                (rng.next_f64() - 0.5) * 2.0 * PI,
                0.55 + 0.9 * rng.next_f64(),
            );
            let pt = psi(&p);
            let frame = frame_at(&pt).unwrap();
            assert!(frame.det().abs() > 1e-3, "near-degenerate frame at {pt:?}");
        }
    }

    #[test]
    fn trefoil_worked_values() {
        let (x1, x2, x3) = trefoil_components(&CartesianPoint::new(3.0, 0.0, 0.0)).unwrap();
        assert!(x1.abs() < 1e-15 && x2.abs() < 1e-15 && x3.abs() < 1e-15);

        let (x1, x2, x3) = trefoil_components(&CartesianPoint::new(0.0, 1.25, 0.0)).unwrap();
        assert!((x1 - (0.25f64.cos() - 1.0)).abs() < 1e-15);
        assert!((x2 - 0.25f64.sin()).abs() < 1e-15);
        assert!(x3.abs() < 1e-15);
    }

    #[test]
    fn trefoil_matches_generic_components() {
        let spec = make_knot_spec(2, 3, 0).unwrap();
        let mut rng = Lcg::new(41);
        for _ in 0..500 {
            let p = ToroidalPoint::new(
                (rng.next_f64() - 0.5) * 2.0 * PI,
                (rng.next_f64() - 0.5) * 2.0 * PI,
                0.55 + 0.9 * rng.next_f64(),
            );
            let pt = psi(&p);
            let (t1, t2, t3) = trefoil_components(&pt).unwrap();
            let [g1, g2, g3] = components_from_cartesian(&pt.coords(), &spec);
            assert!((t1 - g1).abs() <= 1e-12, "X¹ mismatch at {pt:?}");
            assert!((t2 - g2).abs() <= 1e-12, "X² mismatch at {pt:?}");
            assert!((t3 - g3).abs() <= 1e-12, "X³ mismatch at {pt:?}");
        }
    }

    #[test]
    fn pushforward_oracle_agrees_with_closed_form() {
        let worked = CartesianPoint::new(0.0, 1.25, 0.0);
        for (p, q, k) in [(2, 3, 0), (2, 3, -2), (1, 1, 0), (3, 2, 1), (2, 5, 2)] {
            let spec = make_knot_spec(p, q, k).unwrap();
            let oracle = pushforward_oracle(&worked, &spec).unwrap();
            let closed = field_x(&worked, &spec).unwrap();
            for i in 0..3 {
                assert!(
                    (oracle[i] - closed[i]).abs() <= 1e-10,
                    "({p},{q},{k}) component {i}: oracle {} vs closed {}",
                    oracle[i],
                    closed[i]
                );
            }
        }
    }

    #[test]
    fn pushforward_oracle_vanishes_on_knot() {
        let spec = make_knot_spec(2, 3, 1).unwrap();
        for i in 0..50 {
            let t = i as f64 * 0.12566370614;
            let pt = torus_knot_point(2, 3, t);
            let v = pushforward_oracle(&pt, &spec).unwrap();
            assert!(norm3(v) < 1e-12, "t={t}");
        }
    }
}
