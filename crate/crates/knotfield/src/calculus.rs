//! Forward-mode automatic differentiation and the differential operators
//! built on it: Jacobians of the coordinate maps, metric-aware curl and
//! divergence, and a finite-difference oracle for cross-checking.
//!
//! [`Jet`] carries a value and its three spatial partials through arithmetic
//! with exact product/chain-rule semantics. [`CurveJet`] does the same for
//! one-parameter curves up to second order. Both implement [`Scalar`], so
//! every closed form in this crate differentiates itself without
//! hand-written derivative code.

use crate::geometry::{
    in_annulus_margin, psi_inv_map, psi_map, twist_inv_map, twist_map, CartesianPoint,
    GeometryError, KnotSpec,
};
use crate::linalg::{spd_leading_minors, Mat3, Vec3};
use crate::math::Scalar;
use thiserror::Error;

/// Safety margin from the domain boundary required by derivative evaluations.
pub const DERIV_MARGIN: f64 = 1e-9;

/// Step used by the central-difference oracle; error is O(step²).
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalculusError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("point ({x}, {y}, {z}) is outside the coordinate map's domain")]
    OutsideMapDomain { x: f64, y: f64, z: f64 },
    #[error("point ({x}, {y}, {z}) is within {margin} of the domain boundary; derivative evaluations need that margin")]
    NearBoundary { x: f64, y: f64, z: f64, margin: f64 },
    #[error("metric is not positive definite at ({x}, {y}, {z})")]
    MetricNotSpd { x: f64, y: f64, z: f64 },
}

/// The region a differential operator is evaluated over; fixes both the
/// boundary-margin test and the meaning of the coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Cartesian (x, y, z) in the open solid toroidal annulus.
    Annulus,
    /// Flat-model coordinates (a, c, t): two angles and t ∈ (1/2, 3/2).
    FlatModel,
}

impl Domain {
    /// True when `point` keeps at least `margin` of slack to the boundary.
    pub fn contains(&self, point: &[f64; 3], margin: f64) -> bool {
        match self {
            Domain::Annulus => in_annulus_margin(
                &CartesianPoint::new(point[0], point[1], point[2]),
                margin,
            ),
            Domain::FlatModel => 0.5 + margin < point[2] && point[2] < 1.5 - margin,
        }
    }
}

/// Value plus first partial derivatives at a point (dual-number semantics).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub partials: [f64; 3],
}

impl Jet {
    pub const fn constant(value: f64) -> Self {
        Jet {
            value,
            partials: [0.0; 3],
        }
    }

    /// Coordinate jet: unit partial in slot `axis`, zero elsewhere.
    pub fn coordinate(value: f64, axis: usize) -> Self {
        let mut partials = [0.0; 3];
        partials[axis] = 1.0;
        Jet { value, partials }
    }
}

/// The three coordinate jets at a point — the seed for any Jacobian.
pub fn seed_point(point: [f64; 3]) -> [Jet; 3] {
    [
        Jet::coordinate(point[0], 0),
        Jet::coordinate(point[1], 1),
        Jet::coordinate(point[2], 2),
    ]
}

impl core::ops::Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet {
            value: self.value + rhs.value,
            partials: [
                self.partials[0] + rhs.partials[0],
                self.partials[1] + rhs.partials[1],
                self.partials[2] + rhs.partials[2],
            ],
        }
    }
}

impl core::ops::Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet {
            value: self.value - rhs.value,
            partials: [
                self.partials[0] - rhs.partials[0],
                self.partials[1] - rhs.partials[1],
                self.partials[2] - rhs.partials[2],
            ],
        }
    }
}

impl core::ops::Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        Jet {
            value: self.value * rhs.value,
            partials: [
                self.partials[0] * rhs.value + self.value * rhs.partials[0],
                self.partials[1] * rhs.value + self.value * rhs.partials[1],
                self.partials[2] * rhs.value + self.value * rhs.partials[2],
            ],
        }
    }
}

impl core::ops::Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let inv_sq = 1.0 / (rhs.value * rhs.value);
        Jet {
            value: self.value / rhs.value,
            partials: [
                (self.partials[0] * rhs.value - self.value * rhs.partials[0]) * inv_sq,
                (self.partials[1] * rhs.value - self.value * rhs.partials[1]) * inv_sq,
                (self.partials[2] * rhs.value - self.value * rhs.partials[2]) * inv_sq,
            ],
        }
    }
}

impl core::ops::Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            value: -self.value,
            partials: [-self.partials[0], -self.partials[1], -self.partials[2]],
        }
    }
}

impl Jet {
    fn chain(self, value: f64, outer: f64) -> Jet {
        Jet {
            value,
            partials: [
                outer * self.partials[0],
                outer * self.partials[1],
                outer * self.partials[2],
            ],
        }
    }
}

impl Scalar for Jet {
    fn from_f64(v: f64) -> Self {
        Jet::constant(v)
    }

    fn primal(self) -> f64 {
        self.value
    }

    fn sin(self) -> Self {
        self.chain(crate::math::fsin(self.value), crate::math::fcos(self.value))
    }

    fn cos(self) -> Self {
        self.chain(crate::math::fcos(self.value), -crate::math::fsin(self.value))
    }

    fn sqrt(self) -> Self {
        let s = crate::math::fsqrt(self.value);
        self.chain(s, 0.5 / s)
    }

    fn atan2(self, x: Self) -> Self {
        let y = self;
        let value = crate::math::fatan2(y.value, x.value);
        let inv_sq = 1.0 / (x.value * x.value + y.value * y.value);
        Jet {
            value,
            partials: [
                (x.value * y.partials[0] - y.value * x.partials[0]) * inv_sq,
                (x.value * y.partials[1] - y.value * x.partials[1]) * inv_sq,
                (x.value * y.partials[2] - y.value * x.partials[2]) * inv_sq,
            ],
        }
    }

    fn abs(self) -> Self {
        if self.value < 0.0 {
            -self
        } else {
            self
        }
    }
}

/// Value plus first and second derivative along a single curve parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl CurveJet {
    pub const fn constant(value: f64) -> Self {
        CurveJet {
            value,
            d1: 0.0,
            d2: 0.0,
        }
    }
}

/// The curve-parameter jet t ↦ (t, 1, 0), seed for curve derivatives.
pub fn seed_curve_param(t: f64) -> CurveJet {
    CurveJet {
        value: t,
        d1: 1.0,
        d2: 0.0,
    }
}

impl core::ops::Add for CurveJet {
    type Output = CurveJet;
    fn add(self, rhs: CurveJet) -> CurveJet {
        CurveJet {
            value: self.value + rhs.value,
            d1: self.d1 + rhs.d1,
            d2: self.d2 + rhs.d2,
        }
    }
}

impl core::ops::Sub for CurveJet {
    type Output = CurveJet;
    fn sub(self, rhs: CurveJet) -> CurveJet {
        CurveJet {
            value: self.value - rhs.value,
            d1: self.d1 - rhs.d1,
            d2: self.d2 - rhs.d2,
        }
    }
}

impl core::ops::Mul for CurveJet {
    type Output = CurveJet;
    fn mul(self, rhs: CurveJet) -> CurveJet {
        CurveJet {
            value: self.value * rhs.value,
            d1: self.d1 * rhs.value + self.value * rhs.d1,
            d2: self.d2 * rhs.value + 2.0 * self.d1 * rhs.d1 + self.value * rhs.d2,
        }
    }
}

impl core::ops::Div for CurveJet {
    type Output = CurveJet;
    fn div(self, rhs: CurveJet) -> CurveJet {
        // w = u/v: from u = w·v, w' = (u' − w·v')/v and w'' = (u'' − 2w'v' − w·v'')/v.
        let w = self.value / rhs.value;
        let w1 = (self.d1 - w * rhs.d1) / rhs.value;
        let w2 = (self.d2 - 2.0 * w1 * rhs.d1 - w * rhs.d2) / rhs.value;
        CurveJet {
            value: w,
            d1: w1,
            d2: w2,
        }
    }
}

impl core::ops::Neg for CurveJet {
    type Output = CurveJet;
    fn neg(self) -> CurveJet {
        CurveJet {
            value: -self.value,
            d1: -self.d1,
            d2: -self.d2,
        }
    }
}

impl Scalar for CurveJet {
    fn from_f64(v: f64) -> Self {
        CurveJet::constant(v)
    }

    fn primal(self) -> f64 {
        self.value
    }

    fn sin(self) -> Self {
        let (s, c) = (crate::math::fsin(self.value), crate::math::fcos(self.value));
        CurveJet {
            value: s,
            d1: self.d1 * c,
            d2: self.d2 * c - self.d1 * self.d1 * s,
        }
    }

    fn cos(self) -> Self {
        let (s, c) = (crate::math::fsin(self.value), crate::math::fcos(self.value));
        CurveJet {
            value: c,
            d1: -self.d1 * s,
            d2: -self.d2 * s - self.d1 * self.d1 * c,
        }
    }

    fn sqrt(self) -> Self {
        let s = crate::math::fsqrt(self.value);
        let d1 = self.d1 / (2.0 * s);
        CurveJet {
            value: s,
            d1,
            d2: self.d2 / (2.0 * s) - self.d1 * self.d1 / (4.0 * s * s * s),
        }
    }

    fn atan2(self, x: Self) -> Self {
        let y = self;
        let value = crate::math::fatan2(y.value, x.value);
        let s = x.value * x.value + y.value * y.value;
        let w = x.value * y.d1 - y.value * x.d1;
        // d/dt of w: the x'·y' cross terms cancel.
        let w1 = x.value * y.d2 - y.value * x.d2;
        let s1 = 2.0 * (x.value * x.d1 + y.value * y.d1);
        CurveJet {
            value,
            d1: w / s,
            d2: (w1 * s - w * s1) / (s * s),
        }
    }

    fn abs(self) -> Self {
        if self.value < 0.0 {
            -self
        } else {
            self
        }
    }
}

/// Determinant of a 3×3 matrix over any scalar type (jets included).
pub fn det3_scalar<S: Scalar>(m: &[[S; 3]; 3]) -> S {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// The flat metric as a jet-valued closure (identity matrix, zero partials).
pub fn identity_metric_jets(_point: &[Jet; 3]) -> [[Jet; 3]; 3] {
    let mut g = [[Jet::constant(0.0); 3]; 3];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = Jet::constant(1.0);
    }
    g
}

/// One of the coordinate maps whose Jacobian the construction needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoordMap {
    /// Flat model → annulus.
    Psi,
    /// Annulus → flat model.
    PsiInv,
    /// Flat model → flat model, the integer angular shear.
    Twist(KnotSpec),
    /// Inverse shear.
    TwistInv(KnotSpec),
    /// The full transport map ψ∘twist: flat model → annulus.
    PsiAfterTwist(KnotSpec),
    /// (ψ∘twist)⁻¹ = twist⁻¹∘ψ⁻¹: annulus → flat model.
    InverseOfPsiAfterTwist(KnotSpec),
}

impl CoordMap {
    fn domain(&self) -> Domain {
        match self {
            CoordMap::Psi
            | CoordMap::Twist(_)
            | CoordMap::TwistInv(_)
            | CoordMap::PsiAfterTwist(_) => Domain::FlatModel,
            CoordMap::PsiInv | CoordMap::InverseOfPsiAfterTwist(_) => Domain::Annulus,
        }
    }

    fn eval_jets(&self, j: &[Jet; 3]) -> [Jet; 3] {
        match self {
            CoordMap::Psi => psi_map(j[0], j[1], j[2]),
            CoordMap::PsiInv => psi_inv_map(j[0], j[1], j[2]),
            CoordMap::Twist(spec) => twist_map(j[0], j[1], j[2], spec),
            CoordMap::TwistInv(spec) => twist_inv_map(j[0], j[1], j[2], spec),
            CoordMap::PsiAfterTwist(spec) => {
                let [a, c, t] = twist_map(j[0], j[1], j[2], spec);
                psi_map(a, c, t)
            }
            CoordMap::InverseOfPsiAfterTwist(spec) => {
                let [a, c, t] = psi_inv_map(j[0], j[1], j[2]);
                twist_inv_map(a, c, t, spec)
            }
        }
    }
}

/// Jacobian matrix of a coordinate map: entry (i, j) = ∂(component i)/∂(coordinate j).
pub fn jacobian_of_map(map: CoordMap, point: [f64; 3]) -> Result<Mat3, CalculusError> {
    if !map.domain().contains(&point, 0.0) {
        return Err(CalculusError::OutsideMapDomain {
            x: point[0],
            y: point[1],
            z: point[2],
        });
    }
    let out = map.eval_jets(&seed_point(point));
    Ok([out[0].partials, out[1].partials, out[2].partials])
}

fn metric_primal_checked(
    g_jets: &[[Jet; 3]; 3],
    point: &[f64; 3],
) -> Result<Mat3, CalculusError> {
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = g_jets[i][j].value;
        }
    }
    if !spd_leading_minors(&g) {
        return Err(CalculusError::MetricNotSpd {
            x: point[0],
            y: point[1],
            z: point[2],
        });
    }
    Ok(g)
}

fn curl_with_orientation<FX, FG>(
    field: &FX,
    metric: &FG,
    volume: Option<&dyn Fn(&[Jet; 3]) -> Jet>,
    point: [f64; 3],
    domain: Domain,
    eps123: f64,
) -> Result<Vec3, CalculusError>
where
    FX: Fn(&[Jet; 3]) -> [Jet; 3],
    FG: Fn(&[Jet; 3]) -> [[Jet; 3]; 3],
{
    if !domain.contains(&point, DERIV_MARGIN) {
        return Err(CalculusError::NearBoundary {
            x: point[0],
            y: point[1],
            z: point[2],
            margin: DERIV_MARGIN,
        });
    }
    let seeds = seed_point(point);
    let x = field(&seeds);
    let g = metric(&seeds);
    let g_primal = metric_primal_checked(&g, &point)?;
    let sqrt_det = match volume {
        Some(v) => v(&seeds).value,
        None => crate::math::fsqrt(crate::linalg::det3(&g_primal)),
    };

    // Covariant components w_k = g_kl X^l, as jets so their partials are exact.
    let mut w = [Jet::constant(0.0); 3];
    for k in 0..3 {
        w[k] = g[k][0] * x[0] + g[k][1] * x[1] + g[k][2] * x[2];
    }

    // (curl X)^i = ε^{ijk} ∂_j w_k / √det g with ε^{123} = +1.
    Ok([
        eps123 * (w[2].partials[1] - w[1].partials[2]) / sqrt_det,
        eps123 * (w[0].partials[2] - w[2].partials[0]) / sqrt_det,
        eps123 * (w[1].partials[0] - w[0].partials[1]) / sqrt_det,
    ])
}

/// Curl of a vector field with respect to an arbitrary metric, in
/// right-handed coordinates: (curl X)^i = (1/√det g)·ε^{ijk}·∂_j(g_{kl} X^l).
///
/// `field` and `metric` are jet-valued closures evaluated once at `point`;
/// metric derivatives come from running its closed form on jets. The volume
/// element √det g is taken from the numeric determinant; when the metric's
/// determinant is known in closed form, prefer [`curl_g_with_volume`].
pub fn curl_g<FX, FG>(
    field: &FX,
    metric: &FG,
    point: [f64; 3],
    domain: Domain,
) -> Result<Vec3, CalculusError>
where
    FX: Fn(&[Jet; 3]) -> [Jet; 3],
    FG: Fn(&[Jet; 3]) -> [[Jet; 3]; 3],
{
    curl_with_orientation(field, metric, None, point, domain, 1.0)
}

/// [`curl_g`] with the volume element √det g supplied as an exact
/// jet-valued closure instead of being recovered from the determinant.
pub fn curl_g_with_volume<FX, FG, FV>(
    field: &FX,
    metric: &FG,
    volume: &FV,
    point: [f64; 3],
    domain: Domain,
) -> Result<Vec3, CalculusError>
where
    FX: Fn(&[Jet; 3]) -> [Jet; 3],
    FG: Fn(&[Jet; 3]) -> [[Jet; 3]; 3],
    FV: Fn(&[Jet; 3]) -> Jet,
{
    curl_with_orientation(field, metric, Some(volume), point, domain, 1.0)
}

fn div_impl<FX, FG>(
    field: &FX,
    metric: &FG,
    volume: Option<&dyn Fn(&[Jet; 3]) -> Jet>,
    point: [f64; 3],
    domain: Domain,
) -> Result<f64, CalculusError>
where
    FX: Fn(&[Jet; 3]) -> [Jet; 3],
    FG: Fn(&[Jet; 3]) -> [[Jet; 3]; 3],
{
    if !domain.contains(&point, DERIV_MARGIN) {
        return Err(CalculusError::NearBoundary {
            x: point[0],
            y: point[1],
            z: point[2],
            margin: DERIV_MARGIN,
        });
    }
    let seeds = seed_point(point);
    let x = field(&seeds);
    let g = metric(&seeds);
    metric_primal_checked(&g, &point)?;
    let sqrt_det = match volume {
        Some(v) => v(&seeds),
        None => det3_scalar(&g).sqrt(),
    };
    let mut div = 0.0;
    for i in 0..3 {
        div += (sqrt_det * x[i]).partials[i];
    }
    Ok(div / sqrt_det.value)
}

/// Divergence with respect to an arbitrary metric:
/// div X = (1/√det g)·∂_i(√det g · X^i).
///
/// The √det g jet comes from the numeric determinant, whose partials lose
/// accuracy to cancellation when the metric's entries are large; when the
/// determinant is known in closed form, prefer [`div_g_with_volume`].
pub fn div_g<FX, FG>(
    field: &FX,
    metric: &FG,
    point: [f64; 3],
    domain: Domain,
) -> Result<f64, CalculusError>
where
    FX: Fn(&[Jet; 3]) -> [Jet; 3],
    FG: Fn(&[Jet; 3]) -> [[Jet; 3]; 3],
{
    div_impl(field, metric, None, point, domain)
}

/// [`div_g`] with the volume element √det g supplied as an exact jet-valued
/// closure instead of being recovered from the determinant.
pub fn div_g_with_volume<FX, FG, FV>(
    field: &FX,
    metric: &FG,
    volume: &FV,
    point: [f64; 3],
    domain: Domain,
) -> Result<f64, CalculusError>
where
    FX: Fn(&[Jet; 3]) -> [Jet; 3],
    FG: Fn(&[Jet; 3]) -> [[Jet; 3]; 3],
    FV: Fn(&[Jet; 3]) -> Jet,
{
    div_impl(field, metric, Some(volume), point, domain)
}

/// Central-difference derivative of a scalar function — the independent
/// oracle for jet arithmetic. Step [`FD_STEP`], error O(step²).
pub fn fd_derivative_oracle<F>(
    scalar: &F,
    point: [f64; 3],
    axis: usize,
    domain: Domain,
) -> Result<f64, CalculusError>
where
    F: Fn([f64; 3]) -> f64,
{
    if !domain.contains(&point, FD_STEP) {
        return Err(CalculusError::NearBoundary {
            x: point[0],
            y: point[1],
            z: point[2],
            margin: FD_STEP,
        });
    }
    let mut hi = point;
    let mut lo = point;
    hi[axis] += FD_STEP;
    lo[axis] -= FD_STEP;
    Ok((scalar(hi) - scalar(lo)) / (2.0 * FD_STEP))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::base_field_b_at;
    use crate::geometry::make_knot_spec;
    use crate::linalg::{mat_mul, max_abs_diff, IDENTITY};

    fn sample_scalar<S: Scalar>(p: &[S; 3]) -> S {
        (p[0] * p[1]).sin() + p[2] * p[2] * p[2] / p[0]
    }

    #[test]
    fn jet_partials_match_hand_derivatives() {
        let (x, y, z) = (1.3, -0.7, 0.9);
        let out = sample_scalar(&seed_point([x, y, z]));
        let c = (x * y).cos();
        let expected = [
            y * c - z * z * z / (x * x),
            x * c,
            3.0 * z * z / x,
        ];
        assert!((out.value - ((x * y).sin() + z * z * z / x)).abs() < 1e-14);
        for i in 0..3 {
            assert!((out.partials[i] - expected[i]).abs() < 1e-13, "axis {i}");
        }
    }

    #[test]
    fn jet_partials_match_finite_differences() {
        let p = [1.1, 0.4, -0.6];
        let jet = sample_scalar(&seed_point(p));
        for axis in 0..3 {
            let mut hi = p;
            let mut lo = p;
            hi[axis] += FD_STEP;
            lo[axis] -= FD_STEP;
            let fd = (sample_scalar(&hi).primal() - sample_scalar(&lo).primal())
                / (2.0 * FD_STEP);
            assert!((jet.partials[axis] - fd).abs() < 1e-8, "axis {axis}");
        }
    }

    #[test]
    fn jet_division_quotient_rule() {
        let p = seed_point([2.0, 3.0, 5.0]);
        let q = p[0] / p[1];
        assert!((q.value - 2.0 / 3.0).abs() < 1e-15);
        assert!((q.partials[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((q.partials[1] + 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(q.partials[2], 0.0);
    }

    #[test]
    fn jet_atan2_gradient() {
        let p = seed_point([1.0, 2.0, 0.0]);
        let theta = p[1].atan2(p[0]);
        // d/dx atan2(y,x) = −y/(x²+y²), d/dy = x/(x²+y²)
        assert!((theta.partials[0] + 2.0 / 5.0).abs() < 1e-15);
        assert!((theta.partials[1] - 1.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn curve_jet_second_derivatives() {
        let t = 0.7;
        let f = seed_curve_param(t);
        let out = (f * CurveJet::constant(2.0)).sin() * f.cos();
        let d1 = 2.0 * (2.0 * t).cos() * t.cos() - (2.0 * t).sin() * t.sin();
        let d2 = -4.0 * (2.0 * t).sin() * t.cos()
            - 2.0 * (2.0 * t).cos() * t.sin()
            - 2.0 * (2.0 * t).cos() * t.sin()
            - (2.0 * t).sin() * t.cos();
        assert!((out.value - (2.0 * t).sin() * t.cos()).abs() < 1e-14);
        assert!((out.d1 - d1).abs() < 1e-13);
        assert!((out.d2 - d2).abs() < 1e-13);
    }

    #[test]
    fn curve_jet_atan2_recovers_parameter() {
        let t = 0.3;
        let f = seed_curve_param(t);
        let theta = f.sin().atan2(f.cos());
        assert!((theta.value - t).abs() < 1e-15);
        assert!((theta.d1 - 1.0).abs() < 1e-13);
        assert!(theta.d2.abs() < 1e-13);
    }

    #[test]
    fn curve_jet_sqrt_and_div() {
        // h(t) = t³/√t = t^{5/2}; h' = 2.5·t^{3/2}, h'' = 3.75·t^{1/2}
        let t = 1.44;
        let f = seed_curve_param(t);
        let h = f * f * f / f.sqrt();
        assert!((h.value - t.powf(2.5)).abs() < 1e-12);
        assert!((h.d1 - 2.5 * t.powf(1.5)).abs() < 1e-12);
        assert!((h.d2 - 3.75 * t.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn psi_jacobian_worked_value() {
        let jac = jacobian_of_map(CoordMap::Psi, [0.0, 0.0, 1.0]).unwrap();
        let expected = [[0.0, 0.0, 1.0], [3.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert!(max_abs_diff(&jac, &expected) < 1e-14);
    }

    #[test]
    fn twist_jacobian_is_constant_integer_matrix() {
        let spec = make_knot_spec(2, 3, 0).unwrap();
        for pt in [[0.0, 0.0, 1.0], [1.0, -2.0, 0.8], [3.0, 2.0, 1.4]] {
            let jac = jacobian_of_map(CoordMap::Twist(spec), pt).unwrap();
            let expected = [[3.0, 1.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            assert!(max_abs_diff(&jac, &expected) < 1e-14, "q=3, −b_k=1, p=2, d_k=1");
        }
    }

    #[test]
    fn inverse_function_theorem_roundtrip() {
        let p = [0.6, -1.1, 1.2];
        let image = crate::geometry::psi(&crate::geometry::ToroidalPoint::new(p[0], p[1], p[2]));
        let j_fwd = jacobian_of_map(CoordMap::Psi, p).unwrap();
        let j_inv = jacobian_of_map(CoordMap::PsiInv, image.coords()).unwrap();
        let prod = mat_mul(&j_inv, &j_fwd);
        assert!(max_abs_diff(&prod, &IDENTITY) < 1e-10);
    }

    #[test]
    fn chain_rule_through_composed_map() {
        let spec = make_knot_spec(2, 3, 1).unwrap();
        let p = [0.9, 0.3, 1.1];
        let composed = jacobian_of_map(CoordMap::PsiAfterTwist(spec), p).unwrap();
        let twisted = crate::geometry::twist_map(p[0], p[1], p[2], &spec);
        let j_psi = jacobian_of_map(CoordMap::Psi, twisted).unwrap();
        let j_twist = jacobian_of_map(CoordMap::Twist(spec), p).unwrap();
        let product = mat_mul(&j_psi, &j_twist);
        assert!(max_abs_diff(&composed, &product) < 1e-12);
    }

    #[test]
    fn flat_curl_of_base_field_is_itself() {
        let points = [
            [0.3, 1.2, 0.8],
            [-2.0, 0.4, 1.3],
            [1.0, -1.0, 1.0],
            [2.5, 3.0, 0.6],
        ];
        for p in points {
            let b = base_field_b_at(&[p[0], p[1], p[2]]);
            let curl = curl_g(
                &|j: &[Jet; 3]| base_field_b_at(j),
                &identity_metric_jets,
                p,
                Domain::FlatModel,
            )
            .unwrap();
            for i in 0..3 {
                assert!((curl[i] - b[i]).abs() <= 1e-12, "component {i} at {p:?}");
            }
            let div = div_g(
                &|j: &[Jet; 3]| base_field_b_at(j),
                &identity_metric_jets,
                p,
                Domain::FlatModel,
            )
            .unwrap();
            assert!(div.abs() <= 1e-12);
        }
    }

    #[test]
    fn flat_curl_of_constant_field_vanishes() {
        let c = Jet::constant(1.0);
        let z = Jet::constant(0.0);
        let curl = curl_g(
            &|_: &[Jet; 3]| [c, z, z],
            &identity_metric_jets,
            [0.1, 0.2, 1.0],
            Domain::FlatModel,
        )
        .unwrap();
        assert_eq!(curl, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn flat_divergence_of_position_field() {
        let div = div_g(
            &|j: &[Jet; 3]| [j[0], j[1], j[2]],
            &identity_metric_jets,
            [0.4, -0.2, 1.1],
            Domain::FlatModel,
        )
        .unwrap();
        assert!((div - 3.0).abs() < 1e-13);
    }

    #[test]
    fn orientation_flip_negates_curl() {
        let p = [0.3, 1.2, 0.8];
        let plus = curl_with_orientation(
            &|j: &[Jet; 3]| base_field_b_at(j),
            &identity_metric_jets,
            None,
            p,
            Domain::FlatModel,
            1.0,
        )
        .unwrap();
        let minus = curl_with_orientation(
            &|j: &[Jet; 3]| base_field_b_at(j),
            &identity_metric_jets,
            None,
            p,
            Domain::FlatModel,
            -1.0,
        )
        .unwrap();
        for i in 0..3 {
            assert_eq!(plus[i], -minus[i]);
        }
    }

    #[test]
    fn closed_form_volume_rescues_divergence_accuracy() {
        // At this point the (2,5,−2) metric's entries reach ~10³ and the
        // numeric determinant's jet partials lose ~1e−9 to cancellation,
        // pushing |div X| near 1e−7; the closed-form volume element keeps
        // the analytically-zero divergence at rounding level.
        use crate::fields::field_x_at;
        use crate::geometry::make_knot_spec;
        use crate::metric::{metric_g_at, volume_element_at};
        let spec = make_knot_spec(2, 5, -2).unwrap();
        let field = |j: &[Jet; 3]| field_x_at(j, &spec);
        let metric = |j: &[Jet; 3]| metric_g_at(j, &spec);
        let volume = |j: &[Jet; 3]| volume_element_at(j);
        let point = [1.930977, 1.504984, 0.345354];
        let with_volume = div_g_with_volume(&field, &metric, &volume, point, Domain::Annulus)
            .unwrap()
            .abs();
        assert!(with_volume <= 1e-11, "div {with_volume}");
        let plain = div_g(&field, &metric, point, Domain::Annulus)
            .unwrap()
            .abs();
        assert!(plain > with_volume, "determinant path should be noisier");

        let x = {
            let j = field(&seed_point(point));
            [j[0].value, j[1].value, j[2].value]
        };
        let curl =
            curl_g_with_volume(&field, &metric, &volume, point, Domain::Annulus).unwrap();
        let defect = crate::math::norm3([curl[0] - x[0], curl[1] - x[1], curl[2] - x[2]]);
        assert!(defect / crate::math::norm3(x).max(1e-8) <= 1e-10);
    }

    #[test]
    fn near_boundary_evaluations_rejected() {
        let err = curl_g(
            &|j: &[Jet; 3]| [j[0], j[1], j[2]],
            &identity_metric_jets,
            [0.0, 0.0, 1.5 - 1e-12],
            Domain::FlatModel,
        );
        assert!(matches!(err, Err(CalculusError::NearBoundary { .. })));

        let err = div_g(
            &|j: &[Jet; 3]| [j[0], j[1], j[2]],
            &identity_metric_jets,
            [3.4999999999, 0.0, 0.0],
            Domain::Annulus,
        );
        assert!(matches!(err, Err(CalculusError::NearBoundary { .. })));
    }

    #[test]
    fn non_spd_metric_rejected() {
        let bad_metric = |_: &[Jet; 3]| {
            let mut g = [[Jet::constant(0.0); 3]; 3];
            g[0][0] = Jet::constant(-1.0);
            g[1][1] = Jet::constant(1.0);
            g[2][2] = Jet::constant(1.0);
            g
        };
        let err = curl_g(
            &|j: &[Jet; 3]| [j[0], j[1], j[2]],
            &bad_metric,
            [0.1, 0.2, 1.0],
            Domain::FlatModel,
        );
        assert!(matches!(err, Err(CalculusError::MetricNotSpd { .. })));
    }

    #[test]
    fn fd_oracle_simple_derivatives() {
        // d/dx of x² at x=1: the point (1,0,0) is in-domain ((1−2)²=1).
        let d = fd_derivative_oracle(&|p| p[0] * p[0], [1.0, 0.0, 0.0], 0, Domain::Annulus)
            .unwrap();
        assert!((d - 2.0).abs() < 1e-9);

        // d/dz of sin(1−R) at (3,0,0) vanishes because ∂R/∂z = z/R = 0 there.
        let scalar = |p: [f64; 3]| {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let big_r = ((r - 2.0) * (r - 2.0) + p[2] * p[2]).sqrt();
            (1.0 - big_r).sin()
        };
        let d = fd_derivative_oracle(&scalar, [3.0, 0.0, 0.0], 2, Domain::Annulus).unwrap();
        assert!(d.abs() < 1e-9);
    }

    #[test]
    fn fd_oracle_rejects_thin_margin() {
        let err = fd_derivative_oracle(
            &|p| p[2],
            [0.0, 0.0, 1.5 - 1e-6],
            2,
            Domain::FlatModel,
        );
        assert!(matches!(err, Err(CalculusError::NearBoundary { .. })));
    }

    #[test]
    fn det_scalar_matches_f64_determinant() {
        let m = [
            [1.0, 2.0, 3.0],
            [0.5, -1.0, 2.0],
            [4.0, 0.0, 1.0],
        ];
        let jets: [[Jet; 3]; 3] = core::array::from_fn(|i| {
            core::array::from_fn(|j| Jet::constant(m[i][j]))
        });
        let d = det3_scalar(&jets);
        assert!((d.value - crate::linalg::det3(&m)).abs() < 1e-13);
    }
}
