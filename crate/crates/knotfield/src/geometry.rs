//! Integer Bézout data, the (p,q)-torus-knot curve, the solid toroidal
//! annulus, and the two coordinate diffeomorphisms with their inverses.
//!
//! The flat model is `T = R/2πZ × R/2πZ × (1/2, 3/2)` with points
//! `([a], [c], t)`. The chart `ψ([a],[c],t) = (cos a (2 + t cos c),
//! sin a (2 + t cos c), t sin c)` maps it onto the open annulus
//! `1/4 < (r−2)² + z² < 9/4`, where `r = √(x²+y²)`. The integer twist
//! `([a],[c],t) ↦ ([q a − b_k c], [p a + d_k c], t)` precomposes the chart so
//! the transported model zero circle becomes the (p,q)-torus knot.

use crate::math::Scalar;
use thiserror::Error;

/// Lower bound of (r−2)² + z² on the annulus, i.e. (1/2)².
pub const ANNULUS_INNER_SQ: f64 = 0.25;
/// Upper bound of (r−2)² + z² on the annulus, i.e. (3/2)².
pub const ANNULUS_OUTER_SQ: f64 = 2.25;

const TAU: f64 = core::f64::consts::TAU;
const PI: f64 = core::f64::consts::PI;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("p and q must be positive, got ({p}, {q})")]
    NonPositive { p: i64, q: i64 },
    #[error("p and q must be coprime, got ({p}, {q}) with gcd {gcd}")]
    NotCoprime { p: i64, q: i64, gcd: i64 },
    #[error("point ({x}, {y}, {z}) lies outside the open annulus 1/4 < (√(x²+y²)−2)² + z² < 9/4")]
    OutOfDomain { x: f64, y: f64, z: f64 },
}

/// Canonical angle representative in (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let mut r = x % TAU;
    if r < 0.0 {
        r += TAU;
    }
    if r > PI {
        r -= TAU;
    }
    r
}

/// Distance between two angles modulo 2π, in [0, π].
pub fn angle_dist(x: f64, y: f64) -> f64 {
    wrap_angle(x - y).abs()
}

/// Textbook recursive extended Euclid: base case (g, 1, 0) when the second
/// argument is 0, combined as (y, x − ⌊a/b⌋·y) on the way back.
fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Bézout coefficients (b0, d0) with p·b0 + q·d0 = 1.
///
/// The pair is pinned to the textbook recursion so the k-indexing of the
/// derived family is reproducible; other valid pairs would permute it.
pub fn ext_gcd_coeffs(p: i64, q: i64) -> Result<(i64, i64), GeometryError> {
    if p < 1 || q < 1 {
        return Err(GeometryError::NonPositive { p, q });
    }
    let (g, b0, d0) = egcd(p, q);
    if g != 1 {
        return Err(GeometryError::NotCoprime { p, q, gcd: g });
    }
    Ok((b0, d0))
}

/// Integer data (p, q, k, b_k, d_k) driving one construction instance.
///
/// Invariant: p·b_k + q·d_k = 1 exactly, with b_k = b_0 + k·q and
/// d_k = d_0 − k·p from the extended-Euclid output (b_0, d_0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KnotSpec {
    pub p: i64,
    pub q: i64,
    pub k: i64,
    pub b_k: i64,
    pub d_k: i64,
}

/// Builds the spec for (p, q, k); rejects non-coprime or non-positive (p, q).
pub fn make_knot_spec(p: i64, q: i64, k: i64) -> Result<KnotSpec, GeometryError> {
    let (b0, d0) = ext_gcd_coeffs(p, q)?;
    let spec = KnotSpec {
        p,
        q,
        k,
        b_k: b0 + k * q,
        d_k: d0 - k * p,
    };
    debug_assert_eq!(spec.p * spec.b_k + spec.q * spec.d_k, 1);
    Ok(spec)
}

/// Point ([a], [c], t) on the flat model; angles canonical in (−π, π],
/// t strictly inside (1/2, 3/2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToroidalPoint {
    pub a: f64,
    pub c: f64,
    pub t: f64,
}

impl ToroidalPoint {
    /// Canonicalizes the angle representatives; `t` is taken as given.
    pub fn new(a: f64, c: f64, t: f64) -> Self {
        ToroidalPoint {
            a: wrap_angle(a),
            c: wrap_angle(c),
            t,
        }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.a, self.c, self.t]
    }

    /// Equality with angles compared modulo 2π.
    pub fn approx_eq(&self, other: &ToroidalPoint, tol: f64) -> bool {
        angle_dist(self.a, other.a) <= tol
            && angle_dist(self.c, other.c) <= tol
            && (self.t - other.t).abs() <= tol
    }
}

/// Point (x, y, z) with the derived cylinder radius r = √(x²+y²) and the
/// core-circle distance R = √((r−2)² + z²) cached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// √(x²+y²), distance to the z-axis.
    pub r: f64,
    /// √((r−2)²+z²), distance to the core circle {r = 2, z = 0}.
    pub big_r: f64,
}

impl CartesianPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        let r = (x * x + y * y).sqrt();
        let big_r = ((r - 2.0) * (r - 2.0) + z * z).sqrt();
        CartesianPoint { x, y, z, r, big_r }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Strict membership in the open annulus 1/4 < (r−2)² + z² < 9/4.
pub fn in_annulus(pt: &CartesianPoint) -> bool {
    let sq = (pt.r - 2.0) * (pt.r - 2.0) + pt.z * pt.z;
    ANNULUS_INNER_SQ < sq && sq < ANNULUS_OUTER_SQ
}

/// Membership with a safety margin on the radius R: 1/2 + margin < R < 3/2 − margin.
pub fn in_annulus_margin(pt: &CartesianPoint, margin: f64) -> bool {
    0.5 + margin < pt.big_r && pt.big_r < 1.5 - margin
}

/// The (p,q)-torus-knot curve on any scalar type.
pub fn knot_curve<S: Scalar>(p: i64, q: i64, t: S) -> [S; 3] {
    let pt = t * S::from_f64(p as f64);
    let qt = t * S::from_f64(q as f64);
    let ring = S::from_f64(2.0) + pt.cos();
    [qt.cos() * ring, qt.sin() * ring, pt.sin()]
}

/// Point on the (p,q)-torus knot at parameter t; always lands on {R = 1}.
pub fn torus_knot_point(p: i64, q: i64, t: f64) -> CartesianPoint {
    let [x, y, z] = knot_curve(p, q, t);
    CartesianPoint::new(x, y, z)
}

/// The chart ψ on any scalar type: (a, c, t) ↦ (cos a (2 + t cos c), sin a (2 + t cos c), t sin c).
pub fn psi_map<S: Scalar>(a: S, c: S, t: S) -> [S; 3] {
    let ring = S::from_f64(2.0) + t * c.cos();
    [a.cos() * ring, a.sin() * ring, t * c.sin()]
}

/// The inverse chart on any scalar type: a = atan2(y, x), c = atan2(z, r−2), t = R.
///
/// No domain check; the f64 wrapper [`psi_inv`] rejects out-of-domain points.
pub fn psi_inv_map<S: Scalar>(x: S, y: S, z: S) -> [S; 3] {
    let r = (x * x + y * y).sqrt();
    let rm2 = r - S::from_f64(2.0);
    let big_r = (rm2 * rm2 + z * z).sqrt();
    [y.atan2(x), z.atan2(rm2), big_r]
}

/// The integer twist on any scalar type (angles not reduced modulo 2π).
pub fn twist_map<S: Scalar>(a: S, c: S, t: S, spec: &KnotSpec) -> [S; 3] {
    let qa = S::from_f64(spec.q as f64) * a;
    let bc = S::from_f64(spec.b_k as f64) * c;
    let pa = S::from_f64(spec.p as f64) * a;
    let dc = S::from_f64(spec.d_k as f64) * c;
    [qa - bc, pa + dc, t]
}

/// The inverse twist on any scalar type: the integer matrix
/// [[d_k, b_k], [−p, q]] applied to the angles (determinant p·b_k + q·d_k = 1).
pub fn twist_inv_map<S: Scalar>(a: S, c: S, t: S, spec: &KnotSpec) -> [S; 3] {
    let da = S::from_f64(spec.d_k as f64) * a;
    let bc = S::from_f64(spec.b_k as f64) * c;
    let pa = S::from_f64(spec.p as f64) * a;
    let qc = S::from_f64(spec.q as f64) * c;
    [da + bc, qc - pa, t]
}

/// ψ: flat model → annulus.
pub fn psi(p: &ToroidalPoint) -> CartesianPoint {
    let [x, y, z] = psi_map(p.a, p.c, p.t);
    CartesianPoint::new(x, y, z)
}

/// ψ⁻¹: annulus → flat model; rejects points outside the open annulus.
pub fn psi_inv(pt: &CartesianPoint) -> Result<ToroidalPoint, GeometryError> {
    if !in_annulus(pt) {
        return Err(GeometryError::OutOfDomain {
            x: pt.x,
            y: pt.y,
            z: pt.z,
        });
    }
    let [a, c, t] = psi_inv_map(pt.x, pt.y, pt.z);
    Ok(ToroidalPoint::new(a, c, t))
}

/// The twist diffeomorphism; angle components reduced modulo 2π, t unchanged.
pub fn twist(p: &ToroidalPoint, spec: &KnotSpec) -> ToroidalPoint {
    let [a, c, t] = twist_map(p.a, p.c, p.t, spec);
    ToroidalPoint::new(a, c, t)
}

/// Inverse of [`twist`].
pub fn twist_inv(p: &ToroidalPoint, spec: &KnotSpec) -> ToroidalPoint {
    let [a, c, t] = twist_inv_map(p.a, p.c, p.t, spec);
    ToroidalPoint::new(a, c, t)
}
