//! Phase-space points for the four spaces of the reduction chain and their
//! flat coordinate charts.
//!
//! Chart layouts (0-based offsets):
//!
//! | space     | dim | layout                          |
//! |-----------|-----|---------------------------------|
//! | `CotSO3`  | 12  | `R` row-major (0..9), `π` (9..12) |
//! | `Se3Dual` | 6   | `ν` (0..3), `π` (3..6)            |
//! | `CotSE3`  | 18  | `x`, `p`, `R` row-major, `π`      |
//! | `Reduced` | 12  | `x`, `p`, `ν`, `π`                |
//!
//! Every other module addresses coordinates through [`Layout`].

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra3::{exp_so3, Mat3, Rotation, Vec3};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unit-norm tolerance for `ν` on `W₁` and `P₁`.
pub const UNIT_NU_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceId {
    /// `T*SO(3)` in right trivialization.
    CotSO3,
    /// `se(3)*` with coordinates `(ν, π)`.
    Se3Dual,
    /// `T*SE(3) ≃ T*R^3 × T*SO(3)`.
    CotSE3,
    /// `P₁ = T*R^3 × W₁`.
    Reduced,
}

impl SpaceId {
    pub const ALL: [SpaceId; 4] = [
        SpaceId::CotSO3,
        SpaceId::Se3Dual,
        SpaceId::CotSE3,
        SpaceId::Reduced,
    ];

    pub const fn layout(self) -> Layout {
        match self {
            SpaceId::CotSO3 => Layout {
                dim: 12,
                x: None,
                p: None,
                rotation: Some(0),
                nu: None,
                pi: 9,
            },
            SpaceId::Se3Dual => Layout {
                dim: 6,
                x: None,
                p: None,
                rotation: None,
                nu: Some(0),
                pi: 3,
            },
            SpaceId::CotSE3 => Layout {
                dim: 18,
                x: Some(0),
                p: Some(3),
                rotation: Some(6),
                nu: None,
                pi: 15,
            },
            SpaceId::Reduced => Layout {
                dim: 12,
                x: Some(0),
                p: Some(3),
                rotation: None,
                nu: Some(6),
                pi: 9,
            },
        }
    }

    #[inline]
    pub const fn dim(self) -> usize {
        self.layout().dim
    }

    /// Whether the chart carries a rotation matrix (as opposed to `ν`).
    pub const fn has_rotation(self) -> bool {
        self.layout().rotation.is_some()
    }

    pub fn check_dim(self, len: usize) -> Result<()> {
        if len == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: len,
            })
        }
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceId::CotSO3 => "T*SO(3)",
            SpaceId::Se3Dual => "se(3)*",
            SpaceId::CotSE3 => "T*SE(3)",
            SpaceId::Reduced => "P1",
        })
    }
}

/// Offsets of each coordinate block in a chart vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub dim: usize,
    pub x: Option<usize>,
    pub p: Option<usize>,
    /// Start of the nine row-major entries of `R`.
    pub rotation: Option<usize>,
    pub nu: Option<usize>,
    pub pi: usize,
}

impl Layout {
    /// Chart index of `R_{jk}`.
    #[inline]
    pub fn r_index(&self, j: usize, k: usize) -> Option<usize> {
        self.rotation.map(|o| o + 3 * j + k)
    }

    /// Chart index of `ν_j`. On rotation charts this is `R_{j3}`.
    #[inline]
    pub fn nu_index(&self, j: usize) -> usize {
        match (self.nu, self.rotation) {
            (Some(o), _) => o + j,
            (None, Some(o)) => o + 3 * j + 2,
            (None, None) => unreachable!("every chart has nu or R"),
        }
    }

    #[inline]
    pub fn pi_index(&self, i: usize) -> usize {
        self.pi + i
    }

    /// Which coordinate function chart index `a` is.
    pub fn classify(&self, a: usize) -> Option<Coordinate> {
        let block =
            |o: Option<usize>, len: usize| o.filter(|&o| a >= o && a < o + len).map(|o| a - o);
        if let Some(i) = block(self.x, 3) {
            Some(Coordinate::X(i))
        } else if let Some(i) = block(self.p, 3) {
            Some(Coordinate::P(i))
        } else if let Some(e) = block(self.rotation, 9) {
            Some(Coordinate::R(e / 3, e % 3))
        } else if let Some(i) = block(self.nu, 3) {
            Some(Coordinate::Nu(i))
        } else {
            block(Some(self.pi), 3).map(Coordinate::Pi)
        }
    }

    pub fn read_vec<T: Real>(&self, z: &[T], offset: usize) -> Vec3<T> {
        Vec3::from_slice(&z[offset..offset + 3])
    }

    pub fn pi_of<T: Real>(&self, z: &[T]) -> Vec3<T> {
        self.read_vec(z, self.pi)
    }

    /// `ν` read from the chart (third column of `R` on rotation charts).
    pub fn nu_of<T: Real>(&self, z: &[T]) -> Vec3<T> {
        Vec3([
            z[self.nu_index(0)],
            z[self.nu_index(1)],
            z[self.nu_index(2)],
        ])
    }

    pub fn x_of<T: Real>(&self, z: &[T]) -> Option<Vec3<T>> {
        self.x.map(|o| self.read_vec(z, o))
    }

    pub fn p_of<T: Real>(&self, z: &[T]) -> Option<Vec3<T>> {
        self.p.map(|o| self.read_vec(z, o))
    }

    pub fn rotation_matrix_of<T: Real>(&self, z: &[T]) -> Option<Mat3<T>> {
        self.rotation.map(|o| Mat3::from_row_major(&z[o..o + 9]))
    }
}

/// A coordinate function of a chart, with 0-based component indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinate {
    X(usize),
    P(usize),
    /// `R_{jk}`.
    R(usize, usize),
    Nu(usize),
    Pi(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CotSO3State<T> {
    pub rotation: Rotation<T>,
    pub pi: Vec3<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Se3DualPoint<T> {
    pub nu: Vec3<T>,
    pub pi: Vec3<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FullState<T> {
    pub x: Vec3<T>,
    pub rotation: Rotation<T>,
    pub p: Vec3<T>,
    pub pi: Vec3<T>,
}

/// A point of `P₁`. Construct through [`ReducedState::new`] to enforce
/// `|ν|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedState<T> {
    pub x: Vec3<T>,
    pub p: Vec3<T>,
    pub nu: Vec3<T>,
    pub pi: Vec3<T>,
}

impl<T: Real> Se3DualPoint<T> {
    pub fn new(nu: Vec3<T>, pi: Vec3<T>) -> Self {
        Self { nu, pi }
    }

    /// Whether the point lies on `W₁ = {|ν|² = 1}`.
    pub fn is_on_w1(&self) -> bool {
        (self.nu.norm_squared() - T::one()).abs() <= T::tol(UNIT_NU_TOL)
    }
}

impl<T: Real> ReducedState<T> {
    pub fn new(x: Vec3<T>, p: Vec3<T>, nu: Vec3<T>, pi: Vec3<T>) -> Result<Self> {
        check_unit(&nu)?;
        Ok(Self { x, p, nu, pi })
    }

    /// The `(ν, π)` component in `W₁`.
    pub fn se3_dual(&self) -> Se3DualPoint<T> {
        Se3DualPoint::new(self.nu, self.pi)
    }
}

pub(crate) fn check_unit<T: Real>(nu: &Vec3<T>) -> Result<()> {
    let n2 = nu.norm_squared();
    if (n2 - T::one()).abs() <= T::tol(UNIT_NU_TOL) {
        Ok(())
    } else {
        Err(Error::NotUnit {
            norm_sq: n2.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// A point of one of the four phase spaces.
pub trait PhaseState<T: Real>: Sized {
    const SPACE: SpaceId;

    fn flatten(&self) -> Vec<T>;

    /// Exact inverse of [`flatten`](PhaseState::flatten). Fails on wrong
    /// length or when the chart violates the state's invariants.
    fn unflatten(z: &[T]) -> Result<Self>;

    /// Sample a generic test point.
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

fn write_vec<T: Real>(out: &mut [T], offset: usize, v: &Vec3<T>) {
    out[offset..offset + 3].copy_from_slice(&v.0);
}

fn write_rotation<T: Real>(out: &mut [T], offset: usize, r: &Rotation<T>) {
    out[offset..offset + 9].copy_from_slice(&r.matrix().to_row_major());
}

impl<T: Real> PhaseState<T> for CotSO3State<T> {
    const SPACE: SpaceId = SpaceId::CotSO3;

    fn flatten(&self) -> Vec<T> {
        let l = Self::SPACE.layout();
        let mut z = vec![T::zero(); l.dim];
        write_rotation(&mut z, l.rotation.unwrap(), &self.rotation);
        write_vec(&mut z, l.pi, &self.pi);
        z
    }

    fn unflatten(z: &[T]) -> Result<Self> {
        Self::SPACE.check_dim(z.len())?;
        let l = Self::SPACE.layout();
        Ok(Self {
            rotation: Rotation::new(l.rotation_matrix_of(z).unwrap())?,
            pi: l.pi_of(z),
        })
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            rotation: uniform_rotation(rng),
            pi: uniform_box(rng),
        }
    }
}

impl<T: Real> PhaseState<T> for Se3DualPoint<T> {
    const SPACE: SpaceId = SpaceId::Se3Dual;

    fn flatten(&self) -> Vec<T> {
        let l = Self::SPACE.layout();
        let mut z = vec![T::zero(); l.dim];
        write_vec(&mut z, l.nu.unwrap(), &self.nu);
        write_vec(&mut z, l.pi, &self.pi);
        z
    }

    fn unflatten(z: &[T]) -> Result<Self> {
        Self::SPACE.check_dim(z.len())?;
        let l = Self::SPACE.layout();
        Ok(Self::new(l.nu_of(z), l.pi_of(z)))
    }

    /// `ν` uniform on `S²` (so the sample lies on `W₁`), `π` uniform in the cube.
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(uniform_sphere(rng), uniform_box(rng))
    }
}

impl<T: Real> PhaseState<T> for FullState<T> {
    const SPACE: SpaceId = SpaceId::CotSE3;

    fn flatten(&self) -> Vec<T> {
        let l = Self::SPACE.layout();
        let mut z = vec![T::zero(); l.dim];
        write_vec(&mut z, l.x.unwrap(), &self.x);
        write_vec(&mut z, l.p.unwrap(), &self.p);
        write_rotation(&mut z, l.rotation.unwrap(), &self.rotation);
        write_vec(&mut z, l.pi, &self.pi);
        z
    }

    fn unflatten(z: &[T]) -> Result<Self> {
        Self::SPACE.check_dim(z.len())?;
        let l = Self::SPACE.layout();
        Ok(Self {
            x: l.x_of(z).unwrap(),
            rotation: Rotation::new(l.rotation_matrix_of(z).unwrap())?,
            p: l.p_of(z).unwrap(),
            pi: l.pi_of(z),
        })
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            x: uniform_box(rng),
            rotation: uniform_rotation(rng),
            p: uniform_box(rng),
            pi: uniform_box(rng),
        }
    }
}

impl<T: Real> PhaseState<T> for ReducedState<T> {
    const SPACE: SpaceId = SpaceId::Reduced;

    fn flatten(&self) -> Vec<T> {
        let l = Self::SPACE.layout();
        let mut z = vec![T::zero(); l.dim];
        write_vec(&mut z, l.x.unwrap(), &self.x);
        write_vec(&mut z, l.p.unwrap(), &self.p);
        write_vec(&mut z, l.nu.unwrap(), &self.nu);
        write_vec(&mut z, l.pi, &self.pi);
        z
    }

    fn unflatten(z: &[T]) -> Result<Self> {
        Self::SPACE.check_dim(z.len())?;
        let l = Self::SPACE.layout();
        Self::new(
            l.x_of(z).unwrap(),
            l.p_of(z).unwrap(),
            l.nu_of(z),
            l.pi_of(z),
        )
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            x: uniform_box(rng),
            p: uniform_box(rng),
            nu: uniform_sphere(rng),
            pi: uniform_box(rng),
        }
    }
}

/// A point of any of the four spaces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum State<T> {
    CotSO3(CotSO3State<T>),
    Se3Dual(Se3DualPoint<T>),
    CotSE3(FullState<T>),
    Reduced(ReducedState<T>),
}

impl<T: Real> State<T> {
    pub fn space(&self) -> SpaceId {
        match self {
            State::CotSO3(_) => SpaceId::CotSO3,
            State::Se3Dual(_) => SpaceId::Se3Dual,
            State::CotSE3(_) => SpaceId::CotSE3,
            State::Reduced(_) => SpaceId::Reduced,
        }
    }

    pub fn flatten(&self) -> Vec<T> {
        match self {
            State::CotSO3(s) => s.flatten(),
            State::Se3Dual(s) => s.flatten(),
            State::CotSE3(s) => s.flatten(),
            State::Reduced(s) => s.flatten(),
        }
    }

    pub fn unflatten(space: SpaceId, z: &[T]) -> Result<Self> {
        Ok(match space {
            SpaceId::CotSO3 => State::CotSO3(CotSO3State::unflatten(z)?),
            SpaceId::Se3Dual => State::Se3Dual(Se3DualPoint::unflatten(z)?),
            SpaceId::CotSE3 => State::CotSE3(FullState::unflatten(z)?),
            SpaceId::Reduced => State::Reduced(ReducedState::unflatten(z)?),
        })
    }

    pub fn sample<R: Rng + ?Sized>(space: SpaceId, rng: &mut R) -> Self {
        match space {
            SpaceId::CotSO3 => State::CotSO3(CotSO3State::sample(rng)),
            SpaceId::Se3Dual => State::Se3Dual(Se3DualPoint::sample(rng)),
            SpaceId::CotSE3 => State::CotSE3(FullState::sample(rng)),
            SpaceId::Reduced => State::Reduced(ReducedState::sample(rng)),
        }
    }
}

/// Deterministic pseudo-random test point of `space`.
pub fn random_state<T: Real>(space: SpaceId, seed: u64) -> State<T> {
    State::sample(space, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Components uniform in `[−1, 1]`.
pub fn uniform_box<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Vec3<T> {
    Vec3(std::array::from_fn(|_| T::lit(rng.gen_range(-1.0..=1.0))))
}

/// Uniform on the unit sphere: rejection-sample the ball, then normalize.
pub fn uniform_sphere<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Vec3<T> {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if n2 > 1e-6 && n2 <= 1.0 {
            let n = n2.sqrt();
            return Vec3(v.map(|c| T::lit(c / n)));
        }
    }
}

/// Haar-uniform rotation: `exp_so3(θ n)` with `n` uniform on `S²` and the
/// angle drawn from the density `(1 − cos θ)/π` on `[0, π]`.
pub fn uniform_rotation<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Rotation<T> {
    let axis: Vec3<T> = uniform_sphere(rng);
    let angle = loop {
        let theta = rng.gen_range(0.0..=std::f64::consts::PI);
        if rng.gen_range(0.0..2.0) <= 1.0 - theta.cos() {
            break theta;
        }
    };
    exp_so3(&(axis * T::lit(angle)))
}
