//! Poisson reduction of rigid-body dynamics from `T*SE(3)` to the phase space
//! of a symmetric top, `T*R^3 × (S² × so(3)*)`, together with numerical
//! certificates for each step: bracket tables, Jacobi identities, Poisson
//! maps, Casimirs, coadjoint orbits and the magnetic term of their
//! symplectic form, and the commutation of dynamics with reduction.
//!
//! All math is generic over [`Real`] (`f32` or `f64`). The aliases below fix
//! the scalar to `f64`, which is what the tolerances in this crate are
//! calibrated for.

pub mod algebra3;
pub mod dynamics;
pub mod error;
pub mod orbits;
pub mod phase;
pub mod poisson;
pub mod reduction;
pub mod scalar;

pub use error::{Error, Result};
pub use phase::SpaceId;
pub use scalar::Real;

pub type Vec3 = algebra3::Vec3<f64>;
pub type Mat3 = algebra3::Mat3<f64>;
pub type Rotation = algebra3::Rotation<f64>;
pub type CotSO3State = phase::CotSO3State<f64>;
pub type Se3DualPoint = phase::Se3DualPoint<f64>;
pub type FullState = phase::FullState<f64>;
pub type ReducedState = phase::ReducedState<f64>;
pub type State = phase::State<f64>;
pub type StructureMatrix = poisson::StructureMatrix<f64>;
pub type ScalarField = poisson::ScalarField<f64>;
pub type S1Element = reduction::S1Element<f64>;
pub type SE3Element = orbits::SE3Element<f64>;
pub type OrbitLevel = orbits::OrbitLevel<f64>;
pub type BodyParams = dynamics::BodyParams<f64>;
pub type Potential = dynamics::Potential<f64>;
pub type SimOptions = dynamics::SimOptions<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;

/// Single-precision aliases.
pub mod f32 {
    pub type Vec3 = crate::algebra3::Vec3<f32>;
    pub type Mat3 = crate::algebra3::Mat3<f32>;
    pub type Rotation = crate::algebra3::Rotation<f32>;
    pub type FullState = crate::phase::FullState<f32>;
    pub type ReducedState = crate::phase::ReducedState<f32>;
    pub type BodyParams = crate::dynamics::BodyParams<f32>;
    pub type Potential = crate::dynamics::Potential<f32>;
}
