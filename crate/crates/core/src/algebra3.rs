//! Three-dimensional vector and matrix algebra, the hat/vee isomorphism
//! between `R^3` and `so(3)`, and `SO(3)` utilities.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Orthogonality/determinant tolerance for admitting a matrix as a rotation.
pub const ROTATION_TOL: f64 = 1e-9;
/// Largest orthogonality defect [`reorthonormalize`] will repair.
pub const REPAIR_THRESHOLD: f64 = 0.1;
/// Antisymmetry tolerance for [`vee`].
pub const ANTISYMMETRY_TOL: f64 = 1e-9;
/// Below this angle `exp_so3` switches to Taylor coefficients.
pub const SMALL_ANGLE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3<T>(pub [T; 3]);

impl<T: Real> Vec3<T> {
    #[inline]
    pub fn new(x: T, y: T, z: T) -> Self {
        Self([x, y, z])
    }

    #[inline]
    pub fn zeros() -> Self {
        Self([T::zero(); 3])
    }

    /// The `i`-th standard basis vector.
    #[inline]
    pub fn unit(i: usize) -> Self {
        let mut v = Self::zeros();
        v.0[i] = T::one();
        v
    }

    pub fn from_slice(s: &[T]) -> Self {
        Self([s[0], s[1], s[2]])
    }

    #[inline]
    pub fn x(&self) -> T {
        self.0[0]
    }
    #[inline]
    pub fn y(&self) -> T {
        self.0[1]
    }
    #[inline]
    pub fn z(&self) -> T {
        self.0[2]
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    #[inline]
    pub fn cross(&self, other: &Self) -> Self {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        Self([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    #[inline]
    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// Returns `self / |self|`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > T::zero()).then(|| *self * n.recip())
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Outer product `self ⊗ other`.
    pub fn outer(&self, other: &Self) -> Mat3<T> {
        Mat3::from_fn(|i, j| self.0[i] * other.0[j])
    }

    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Self {
        Self(self.0.map(f))
    }

    pub fn cast<U: Real>(&self) -> Vec3<U> {
        Vec3(self.0.map(|v| U::from(v).expect("finite value")))
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    #[inline]
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vec3<T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self(self.0.map(|v| -v))
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self(self.0.map(|v| v * s))
    }
}

/// Row-major 3×3 matrix; `m[(i, j)]` is row `i`, column `j`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat3<T>(pub [[T; 3]; 3]);

impl<T: Real> Mat3<T> {
    pub fn zeros() -> Self {
        Self([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> T>(mut f: F) -> Self {
        let mut m = [[T::zero(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(i, j);
            }
        }
        Self(m)
    }

    /// Builds a matrix from nine row-major entries.
    pub fn from_row_major(e: &[T]) -> Self {
        Self::from_fn(|i, j| e[3 * i + j])
    }

    pub fn to_row_major(&self) -> [T; 9] {
        let mut out = [T::zero(); 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.0[i][j];
            }
        }
        out
    }

    pub fn from_columns(c0: Vec3<T>, c1: Vec3<T>, c2: Vec3<T>) -> Self {
        let cols = [c0, c1, c2];
        Self::from_fn(|i, j| cols[j][i])
    }

    #[inline]
    pub fn column(&self, j: usize) -> Vec3<T> {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    #[inline]
    pub fn row(&self, i: usize) -> Vec3<T> {
        Vec3(self.0[i])
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn determinant(&self) -> T {
        self.row(0).dot(&self.row(1).cross(&self.row(2)))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    /// Inverse via the adjugate; `None` for a singular matrix.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.determinant();
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        // Columns of the adjugate are cross products of pairs of rows.
        let (r0, r1, r2) = (self.row(0), self.row(1), self.row(2));
        Some(Mat3::from_columns(r1.cross(&r2), r2.cross(&r0), r0.cross(&r1)).scale(det.recip()))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flatten()
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `max |(M + Mᵀ)_{ij}|`.
    pub fn antisymmetry_defect(&self) -> T {
        (*self + self.transpose()).max_abs()
    }

    /// `max |(MᵀM − I)_{ij}|`.
    pub fn orthogonality_defect(&self) -> T {
        (self.transpose() * *self - Self::identity()).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }
}

impl<T> Index<(usize, usize)> for Mat3<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat3<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + o.0[i][j])
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - o.0[i][j])
    }
}

impl<T: Real> Neg for Mat3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::from_fn(|i, j| {
            self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j] + self.0[i][2] * o.0[2][j]
        })
    }
}

impl<T: Real> Mul<Vec3<T>> for Mat3<T> {
    type Output = Vec3<T>;
    #[inline]
    fn mul(self, v: Vec3<T>) -> Vec3<T> {
        Vec3([
            self.row(0).dot(&v),
            self.row(1).dot(&v),
            self.row(2).dot(&v),
        ])
    }
}

/// The hat map `R^3 → so(3)`: `hat(v)_{kl} = −ε_{ikl} v_i`, so that
/// `hat(v) w = v × w`.
pub fn hat<T: Real>(v: &Vec3<T>) -> Mat3<T> {
    let z = T::zero();
    let [a, b, c] = v.0;
    Mat3([[z, -c, b], [c, z, -a], [-b, a, z]])
}

/// Inverse of [`hat`] on antisymmetric matrices: `v_i = −½ ε_{ikl} M_{kl}`.
pub fn vee<T: Real>(m: &Mat3<T>) -> Result<Vec3<T>> {
    let defect = m.antisymmetry_defect();
    if defect.is_nan() || defect > T::tol(ANTISYMMETRY_TOL) {
        return Err(Error::NotAntisymmetric {
            defect: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    let h = T::half();
    Ok(Vec3([
        h * (m[(2, 1)] - m[(1, 2)]),
        h * (m[(0, 2)] - m[(2, 0)]),
        h * (m[(1, 0)] - m[(0, 1)]),
    ]))
}

/// A proper orthogonal 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation<T>(Mat3<T>);

impl<T: Real> Rotation<T> {
    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Admits `m` if `‖mᵀm − I‖_max` and `|det m − 1|` are within
    /// [`ROTATION_TOL`].
    pub fn new(m: Mat3<T>) -> Result<Self> {
        let tol = T::tol(ROTATION_TOL);
        let orthogonality = m.orthogonality_defect();
        let det = m.determinant();
        if orthogonality <= tol && (det - T::one()).abs() <= tol {
            Ok(Self(m))
        } else {
            Err(Error::NotRotation {
                orthogonality: orthogonality.to_f64().unwrap_or(f64::NAN),
                det: det.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    /// Wraps `m` without checking. Callers guarantee the invariants.
    pub(crate) fn new_unchecked(m: Mat3<T>) -> Self {
        Self(m)
    }

    #[inline]
    pub fn matrix(&self) -> &Mat3<T> {
        &self.0
    }

    #[inline]
    pub fn into_matrix(self) -> Mat3<T> {
        self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Group product `self · other`. The result is not re-checked; products of
    /// rotations accumulate only rounding error.
    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    #[inline]
    pub fn apply(&self, v: &Vec3<T>) -> Vec3<T> {
        self.0 * *v
    }

    pub fn orthogonality_defect(&self) -> T {
        self.0.orthogonality_defect()
    }

    /// Rotation by `angle` about the unit vector `axis`.
    pub fn from_axis_angle(axis: &Vec3<T>, angle: T) -> Self {
        exp_so3(&(*axis * angle))
    }

    /// Rotation by `π` about the unit vector `axis`: `2 n nᵀ − I`.
    pub fn half_turn(axis: &Vec3<T>) -> Self {
        Self(axis.outer(axis).scale(T::two()) - Mat3::identity())
    }

    /// A rotation taking the direction of `from` onto the direction of `to`.
    ///
    /// Built from two reflections through the bisector when the directions
    /// are within a right angle, and from a half turn otherwise, so no branch
    /// divides by a vanishing cross product.
    pub fn aligning(from: &Vec3<T>, to: &Vec3<T>) -> Option<Self> {
        let u = from.normalized()?;
        let v = to.normalized()?;
        if u.dot(&v) >= T::zero() {
            Some(Self::reflection_pair(&u, &v))
        } else {
            // u → -v by reflections, then -v → v by a half turn about an axis ⟂ v.
            let q = Self::reflection_pair(&u, &(-v));
            let n = orthogonal_unit(&v);
            Some(Self::half_turn(&n).compose(&q))
        }
    }

    /// `(I − 2 m mᵀ)(I − 2 u uᵀ)` with `m = (u + v)/|u + v|`; maps `u` to `v`.
    fn reflection_pair(u: &Vec3<T>, v: &Vec3<T>) -> Self {
        let m = (*u + *v)
            .normalized()
            .expect("u·v >= 0 keeps the bisector nonzero");
        let two = T::two();
        let i = Mat3::identity();
        let s1 = i - u.outer(u).scale(two);
        let s2 = i - m.outer(&m).scale(two);
        Self(s2 * s1)
    }
}

/// A unit vector orthogonal to `v`, Gram–Schmidt from the coordinate axis
/// least aligned with `v`.
pub fn orthogonal_unit<T: Real>(v: &Vec3<T>) -> Vec3<T> {
    let a = v.map(|c| c.abs());
    let k = if a[0] <= a[1] && a[0] <= a[2] {
        0
    } else if a[1] <= a[2] {
        1
    } else {
        2
    };
    let e = Vec3::unit(k);
    let vv = v.norm_squared();
    let w = e - *v * (v[k] / vv);
    w.normalized()
        .expect("least-aligned axis is never parallel")
}

/// Exponential map `so(3) → SO(3)` by the Rodrigues formula.
pub fn exp_so3<T: Real>(v: &Vec3<T>) -> Rotation<T> {
    let theta2 = v.norm_squared();
    let theta = theta2.sqrt();
    let (a, b) = if theta < T::lit(SMALL_ANGLE) {
        (
            T::one() - theta2 / T::lit(6.0),
            T::half() - theta2 / T::lit(24.0),
        )
    } else {
        (theta.sin() / theta, (T::one() - theta.cos()) / theta2)
    };
    let k = hat(v);
    Rotation(Mat3::identity() + k.scale(a) + (k * k).scale(b))
}

/// Projects a nearly orthogonal matrix onto `SO(3)` (orthogonal polar factor)
/// by the Newton iteration `M ← ½(M + M⁻ᵀ)`.
pub fn reorthonormalize<T: Real>(m: &Mat3<T>) -> Result<Rotation<T>> {
    let defect = m.orthogonality_defect();
    if defect.is_nan() || defect >= T::lit(REPAIR_THRESHOLD) || m.determinant() <= T::zero() {
        return Err(Error::TooFarFromSO3 {
            defect: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut cur = *m;
    for _ in 0..32 {
        let inv = cur.inverse().ok_or(Error::TooFarFromSO3 {
            defect: defect.to_f64().unwrap_or(f64::NAN),
        })?;
        let next = (cur + inv.transpose()).scale(T::half());
        let change = (next - cur).max_abs();
        cur = next;
        if change <= T::epsilon() * T::lit(4.0) {
            break;
        }
    }
    Rotation::new(cur)
}
