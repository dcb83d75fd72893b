//! Small fixed-size linear algebra: 3-vectors and 3×3 matrices, enough for
//! metric evaluations, Jacobians, and the damped least-squares solver.
//!
//! Everything is plain arrays; the 3×3 inverse goes through the closed-form
//! adjugate over the determinant so behavior near small determinants is
//! explicit rather than decomposition-dependent.

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn dot(u: &Vec3, v: &Vec3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

pub fn cross(u: &Vec3, v: &Vec3) -> Vec3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

pub fn norm(v: &Vec3) -> f64 {
    crate::math::fsqrt(dot(v, v))
}

pub fn scale(v: &Vec3, s: f64) -> Vec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

pub fn add(u: &Vec3, v: &Vec3) -> Vec3 {
    [u[0] + v[0], u[1] + v[1], u[2] + v[2]]
}

pub fn sub(u: &Vec3, v: &Vec3) -> Vec3 {
    [u[0] - v[0], u[1] - v[1], u[2] - v[2]]
}

pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

pub fn transpose(m: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            t[j][i] = e;
        }
    }
    t
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    c
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Closed-form inverse via adjugate over determinant; `None` when the
/// determinant vanishes to machine zero.
pub fn inv3(m: &Mat3) -> Option<Mat3> {
    let det = det3(m);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut inv = [[0.0; 3]; 3];
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
    Some(inv)
}

/// Solves m·x = b for a single 3-vector right-hand side.
pub fn solve3(m: &Mat3, b: &Vec3) -> Option<Vec3> {
    inv3(m).map(|inv| mat_vec(&inv, b))
}

/// uᵀ·m·v — the quadratic/bilinear form of a matrix.
pub fn bilinear(m: &Mat3, u: &Vec3, v: &Vec3) -> f64 {
    dot(u, &mat_vec(m, v))
}

/// Positive-definiteness of a symmetric matrix via leading principal minors.
pub fn spd_leading_minors(m: &Mat3) -> bool {
    let m1 = m[0][0];
    let m2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let m3 = det3(m);
    m1 > 0.0 && m2 > 0.0 && m3 > 0.0
}

/// Largest absolute asymmetry |m_ij − m_ji|.
pub fn symmetry_defect(m: &Mat3) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max(crate::math::fabs(m[i][j] - m[j][i]));
        }
    }
    worst
}

/// Largest entrywise |a_ij − b_ij|.
pub fn max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max(crate::math::fabs(a[i][j] - b[i][j]));
        }
    }
    worst
}

pub fn frobenius_norm(m: &Mat3) -> f64 {
    let mut sum = 0.0;
    for row in m {
        for e in row {
            sum += e * e;
        }
    }
    crate::math::fsqrt(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    // SPD matrix with simple fractional entries and determinant 1/9, used
    // across the crate as a hand-checked reference value.
    const G: Mat3 = [
        [1.0, 0.0, 0.0],
        [0.0, 5.0 / 9.0, -7.0 / 3.0],
        [0.0, -7.0 / 3.0, 10.0],
    ];

    #[test]
    fn determinant_of_reference_matrix() {
        // 50/9 − 49/9 cancels to within a few ulps of 1/9.
        assert!((det3(&G) - 1.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let inv = inv3(&G).unwrap();
        let prod = mat_mul(&inv, &G);
        assert!(max_abs_diff(&prod, &IDENTITY) < 1e-12);
    }

    #[test]
    fn solve_recovers_known_vector() {
        let x = [1.0, -2.0, 0.5];
        let b = mat_vec(&G, &x);
        let sol = solve3(&G, &b).unwrap();
        for i in 0..3 {
            assert!((sol[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]];
        assert!(inv3(&m).is_none());
    }

    #[test]
    fn spd_check_accepts_reference_and_rejects_indefinite() {
        assert!(spd_leading_minors(&G));
        let indefinite = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(!spd_leading_minors(&indefinite));
    }

    #[test]
    fn cross_product_right_handed() {
        let c = cross(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]);
        assert_eq!(c, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn bilinear_form_matches_expansion() {
        let u = [1.0, 2.0, 3.0];
        let v = [-1.0, 0.5, 2.0];
        let direct = bilinear(&G, &u, &v);
        let mut expected = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                expected += u[i] * G[i][j] * v[j];
            }
        }
        assert!((direct - expected).abs() < 1e-13);
    }
}
