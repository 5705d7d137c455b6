//! SE(3)/SO(3) manifold algebra: composition, exponential/logarithm maps,
//! boxplus/boxminus local coordinates and numeric-Jacobian utilities.
//!
//! Every optimizer in this crate linearizes over the same 6-dof local
//! coordinates, using the right (local) perturbation `p ⊞ σ = p ∘ exp(σ)`.
//! Twists are ordered `[angular; linear]`.

use nalgebra::{DMatrix, DVector, Matrix3, Quaternion, UnitQuaternion, Vector3, Vector6};
use thiserror::Error;

/// Angle threshold below which exp/log switch to Taylor series.
pub const SMALL_ANGLE: f64 = 1e-8;
/// Rotation angles at or above `π − ANGLE_NEAR_PI_MARGIN` make the log map
/// ill-conditioned and are rejected.
pub const ANGLE_NEAR_PI_MARGIN: f64 = 1e-6;
/// Default finite-difference step for [`numeric_jacobian`].
pub const DEFAULT_JACOBIAN_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ManifoldError {
    /// The rotation angle is within [`ANGLE_NEAR_PI_MARGIN`] of π where the
    /// logarithm is ill-conditioned.
    #[error("rotation angle within {ANGLE_NEAR_PI_MARGIN} of pi; log map ill-conditioned")]
    AngleNearPi,
}

/// Skew-symmetric (hat) matrix of a 3-vector: `hat(v) * w = v × w`.
pub fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Unit-quaternion rotation, canonicalized to the `w ≥ 0` half of the double
/// cover after every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    q: UnitQuaternion<f64>,
}

impl Rotation {
    pub fn identity() -> Self {
        Rotation {
            q: UnitQuaternion::identity(),
        }
    }

    /// Build from raw quaternion coefficients; normalizes and canonicalizes.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        Rotation {
            q: UnitQuaternion::from_quaternion(Quaternion::new(w, x, y, z)),
        }
        .canonicalized()
    }

    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        so3_exp(&(axis.normalize() * angle))
    }

    fn canonicalized(self) -> Self {
        if self.q.w < 0.0 {
            Rotation {
                q: UnitQuaternion::new_unchecked(-self.q.into_inner()),
            }
        } else {
            self
        }
    }

    /// Quaternion coefficients `(w, x, y, z)`.
    pub fn wxyz(&self) -> (f64, f64, f64, f64) {
        let q = self.q.quaternion();
        (q.w, q.i, q.j, q.k)
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        let q = self.q * other.q;
        Rotation {
            q: UnitQuaternion::new_normalize(q.into_inner()),
        }
        .canonicalized()
    }

    pub fn inverse(&self) -> Rotation {
        Rotation { q: self.q.inverse() }.canonicalized()
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.q * v
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        self.q.to_rotation_matrix().into_inner()
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        let q = self.q.quaternion();
        2.0 * q.imag().norm().atan2(q.w.abs())
    }

    pub fn norm_error(&self) -> f64 {
        (self.q.quaternion().norm() - 1.0).abs()
    }
}

/// SO(3) exponential map: rotation vector (axis × angle) to [`Rotation`].
pub fn so3_exp(omega: &Vector3<f64>) -> Rotation {
    let theta = omega.norm();
    let (w, s) = if theta < SMALL_ANGLE {
        // cos(θ/2) ≈ 1 − θ²/8, sin(θ/2)/θ ≈ 1/2 − θ²/48
        (1.0 - theta * theta / 8.0, 0.5 - theta * theta / 48.0)
    } else {
        ((theta / 2.0).cos(), (theta / 2.0).sin() / theta)
    };
    let v = omega * s;
    Rotation {
        q: UnitQuaternion::new_normalize(Quaternion::new(w, v.x, v.y, v.z)),
    }
    .canonicalized()
}

/// SO(3) logarithm map; errors when the angle is within
/// [`ANGLE_NEAR_PI_MARGIN`] of π.
pub fn so3_log(r: &Rotation) -> Result<Vector3<f64>, ManifoldError> {
    let q = r.q.quaternion();
    let w = q.w.abs(); // canonicalized, but guard anyway
    let vec = if q.w < 0.0 { -q.imag() } else { q.imag() };
    let vn = vec.norm();
    let theta = 2.0 * vn.atan2(w);
    if theta >= std::f64::consts::PI - ANGLE_NEAR_PI_MARGIN {
        return Err(ManifoldError::AngleNearPi);
    }
    if vn < 1e-9 {
        // ω = 2·vec/w · (1 − ‖vec‖²/(3w²))
        Ok(vec * (2.0 / w) * (1.0 - vn * vn / (3.0 * w * w)))
    } else {
        Ok(vec * (theta / vn))
    }
}

/// Left Jacobian of SO(3); also the `V` matrix coupling rotation and
/// translation in the SE(3) exponential.
pub fn so3_left_jacobian(omega: &Vector3<f64>) -> Matrix3<f64> {
    let theta = omega.norm();
    let k = hat(omega);
    let (a, b) = if theta < SMALL_ANGLE {
        (0.5 - theta * theta / 24.0, 1.0 / 6.0 - theta * theta / 120.0)
    } else {
        let t2 = theta * theta;
        ((1.0 - theta.cos()) / t2, (theta - theta.sin()) / (t2 * theta))
    };
    Matrix3::identity() + k * a + k * k * b
}

/// Inverse of the SO(3) left Jacobian.
pub fn so3_left_jacobian_inv(omega: &Vector3<f64>) -> Matrix3<f64> {
    let theta = omega.norm();
    let k = hat(omega);
    let c = if theta < SMALL_ANGLE {
        1.0 / 12.0 + theta * theta / 720.0
    } else {
        (1.0 - theta * theta.sin() / (2.0 * (1.0 - theta.cos()))) / (theta * theta)
    };
    Matrix3::identity() - k * 0.5 + k * k * c
}

/// Right Jacobian of SO(3): `Exp(φ + δ) ≈ Exp(φ) Exp(Jr(φ) δ)`.
pub fn so3_right_jacobian(phi: &Vector3<f64>) -> Matrix3<f64> {
    so3_left_jacobian(&-phi)
}

/// Six-dimensional local coordinate `σ = [ω; v]` of SE(3): the motion
/// increment reached by multiplying body rates with a time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub angular: Vector3<f64>,
    pub linear: Vector3<f64>,
}

impl Twist {
    pub fn zero() -> Self {
        Twist {
            angular: Vector3::zeros(),
            linear: Vector3::zeros(),
        }
    }

    pub fn new(angular: Vector3<f64>, linear: Vector3<f64>) -> Self {
        Twist { angular, linear }
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Twist {
            angular: Vector3::new(v[0], v[1], v[2]),
            linear: Vector3::new(v[3], v[4], v[5]),
        }
    }

    pub fn as_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.angular.x,
            self.angular.y,
            self.angular.z,
            self.linear.x,
            self.linear.y,
            self.linear.z,
        )
    }

    pub fn norm(&self) -> f64 {
        self.as_vector().norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Twist {
            angular: self.angular * s,
            linear: self.linear * s,
        }
    }
}

/// Rigid-body transform on SE(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Rotation,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: Rotation::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Rotation, translation: Vector3<f64>) -> Self {
        Pose {
            rotation,
            translation,
        }
    }

    pub fn from_parts(w: f64, x: f64, y: f64, z: f64, t: Vector3<f64>) -> Self {
        Pose {
            rotation: Rotation::from_quaternion(w, x, y, z),
            translation: t,
        }
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation.compose(&other.rotation),
            translation: self.rotation.rotate(&other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let rinv = self.rotation.inverse();
        Pose {
            translation: -rinv.rotate(&self.translation),
            rotation: rinv,
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.rotate(p) + self.translation
    }

    /// Local perturbation: `p ⊞ σ = p ∘ exp(σ)`.
    pub fn boxplus(&self, sigma: &Twist) -> Pose {
        self.compose(&exp(sigma))
    }

    /// Local coordinates of `self` in the chart anchored at `other`:
    /// `log(other⁻¹ ∘ self)`, the inverse of [`Pose::boxplus`].
    pub fn boxminus(&self, other: &Pose) -> Result<Twist, ManifoldError> {
        log(&other.inverse().compose(self))
    }
}

/// SE(3) exponential map (Rodrigues closed form): the rigid transform
/// reached by flowing along `σ` for unit time.
pub fn exp(sigma: &Twist) -> Pose {
    let rotation = so3_exp(&sigma.angular);
    let v_mat = so3_left_jacobian(&sigma.angular);
    Pose {
        rotation,
        translation: v_mat * sigma.linear,
    }
}

/// SE(3) logarithm map, inverse of [`exp`]. Errors for rotation angles
/// within [`ANGLE_NEAR_PI_MARGIN`] of π.
pub fn log(p: &Pose) -> Result<Twist, ManifoldError> {
    let omega = so3_log(&p.rotation)?;
    let v_inv = so3_left_jacobian_inv(&omega);
    Ok(Twist {
        angular: omega,
        linear: v_inv * p.translation,
    })
}

/// Central finite differences of `h` over the 6 boxplus directions at `p0`.
/// Column `k` is `(h(p0 ⊞ step·e_k) − h(p0 ⊞ −step·e_k)) / (2·step)`.
///
/// This is the repo-wide gradient oracle: every analytic Jacobian is tested
/// against it.
pub fn numeric_jacobian<F>(h: F, p0: &Pose, step: f64) -> DMatrix<f64>
where
    F: Fn(&Pose) -> DVector<f64>,
{
    assert!(step > 0.0, "step must be positive");
    let m = h(p0).len();
    let mut jac = DMatrix::zeros(m, 6);
    for k in 0..6 {
        let mut dir = Vector6::zeros();
        dir[k] = step;
        let plus = h(&p0.boxplus(&Twist::from_vector(&dir)));
        dir[k] = -step;
        let minus = h(&p0.boxplus(&Twist::from_vector(&dir)));
        let col = (plus - minus) / (2.0 * step);
        jac.set_column(k, &col);
    }
    jac
}
