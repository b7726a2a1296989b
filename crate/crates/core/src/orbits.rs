//! Casimir functions of `se(3)*`, the coadjoint action of `SE(3)`, explicit
//! transitivity on joint Casimir levels, and the magnetic term of the
//! orbit symplectic form.

use crate::algebra3::{Rotation, Vec3};
use crate::error::{Error, Result};
use crate::phase::{check_unit, Se3DualPoint, SpaceId};
use crate::poisson::ScalarField;
use crate::scalar::Real;

/// Tolerance on Casimir agreement for [`same_orbit_witness`], relative to
/// `max(1, |c|)`.
pub const LEVEL_TOL: f64 = 1e-9;
/// Tangency and unit-length tolerance for [`magnetic_form`].
pub const TANGENT_TOL: f64 = 1e-9;

/// An element `(a, A)` of `SE(3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SE3Element<T> {
    pub translation: Vec3<T>,
    pub rotation: Rotation<T>,
}

impl<T: Real> SE3Element<T> {
    pub fn new(translation: Vec3<T>, rotation: Rotation<T>) -> Self {
        Self {
            translation,
            rotation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Vec3::zeros(), Rotation::identity())
    }

    /// `(a₁, A₁)(a₂, A₂) = (a₁ + A₁a₂, A₁A₂)`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.translation + self.rotation.apply(&other.translation),
            self.rotation.compose(&other.rotation),
        )
    }
}

/// Joint level `(c₁, c₂)` of the Casimirs `C₁ = |ν|²`, `C₂ = ⟨ν, π⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitLevel<T> {
    pub c1: T,
    pub c2: T,
}

impl<T: Real> OrbitLevel<T> {
    fn approx_eq(&self, other: &Self, tol: T) -> bool {
        let close = |a: T, b: T| (a - b).abs() <= tol * T::one().max(a.abs()).max(b.abs());
        close(self.c1, other.c1) && close(self.c2, other.c2)
    }

    fn to_f64(self) -> (f64, f64) {
        (
            self.c1.to_f64().unwrap_or(f64::NAN),
            self.c2.to_f64().unwrap_or(f64::NAN),
        )
    }
}

pub fn casimirs<T: Real>(q: &Se3DualPoint<T>) -> OrbitLevel<T> {
    OrbitLevel {
        c1: q.nu.norm_squared(),
        c2: q.nu.dot(&q.pi),
    }
}

/// `C₁` and `C₂` as fields on `se(3)*` or `P₁`.
pub fn casimir_fields<T: Real>(space: SpaceId) -> Result<[ScalarField<T>; 2]> {
    if space.has_rotation() {
        return Err(Error::InvalidArgument(format!(
            "Casimirs are defined on se(3)* charts, not {space}"
        )));
    }
    let l = space.layout();
    let n = space.dim();
    let c1 = ScalarField::new(
        space,
        move |z| l.nu_of(z).norm_squared(),
        move |z| {
            let nu = l.nu_of(z);
            let mut g = vec![T::zero(); n];
            for j in 0..3 {
                g[l.nu_index(j)] = T::two() * nu[j];
            }
            g
        },
    );
    let c2 = ScalarField::new(
        space,
        move |z| l.nu_of(z).dot(&l.pi_of(z)),
        move |z| {
            let (nu, pi) = (l.nu_of(z), l.pi_of(z));
            let mut g = vec![T::zero(); n];
            for j in 0..3 {
                g[l.nu_index(j)] = pi[j];
                g[l.pi_index(j)] = nu[j];
            }
            g
        },
    );
    Ok([c1, c2])
}

/// Coadjoint action of `(a, A)`: `(ν, π) ↦ (Aν, a × Aν + Aπ)`.
pub fn coadjoint<T: Real>(g: &SE3Element<T>, q: &Se3DualPoint<T>) -> Se3DualPoint<T> {
    let nu = g.rotation.apply(&q.nu);
    Se3DualPoint::new(nu, g.translation.cross(&nu) + g.rotation.apply(&q.pi))
}

/// A group element carrying `q1` to `q2`, which exists whenever both share
/// a Casimir level with `c₁ > 0`.
///
/// `A` aligns `ν₁` with `ν₂`; then `a = ν₂ × (π₂ − Aπ₁) / c₁` absorbs the
/// remaining momentum, since `π₂ − Aπ₁` is orthogonal to `ν₂` on a joint level.
pub fn same_orbit_witness<T: Real>(
    q1: &Se3DualPoint<T>,
    q2: &Se3DualPoint<T>,
) -> Result<SE3Element<T>> {
    let (l1, l2) = (casimirs(q1), casimirs(q2));
    if l1.c1 <= T::tol(LEVEL_TOL) || l2.c1 <= T::tol(LEVEL_TOL) {
        return Err(Error::ZeroNu);
    }
    if !l1.approx_eq(&l2, T::tol(LEVEL_TOL)) {
        return Err(Error::NotSameLevel {
            first: l1.to_f64(),
            second: l2.to_f64(),
        });
    }
    let rotation = Rotation::aligning(&q1.nu, &q2.nu).ok_or(Error::ZeroNu)?;
    let residual = q2.pi - rotation.apply(&q1.pi);
    let translation = q2.nu.cross(&residual) * l2.c1.recip();
    Ok(SE3Element::new(translation, rotation))
}

/// `max(‖Δν‖∞, ‖Δπ‖∞)` between `coadjoint(g, q1)` and `q2`.
pub fn witness_residual<T: Real>(
    g: &SE3Element<T>,
    q1: &Se3DualPoint<T>,
    q2: &Se3DualPoint<T>,
) -> T {
    let image = coadjoint(g, q1);
    (image.nu - q2.nu)
        .max_abs()
        .max((image.pi - q2.pi).max_abs())
}

/// Whether `q` lies on the joint level `level` within `tol`.
pub fn on_level<T: Real>(q: &Se3DualPoint<T>, level: &OrbitLevel<T>, tol: T) -> bool {
    let c = casimirs(q);
    (c.c1 - level.c1).abs() <= tol && (c.c2 - level.c2).abs() <= tol
}

/// The magnetic 2-form `B` at `ν ∈ S²` on tangent vectors `u`, `v`, for the
/// orbit with second Casimir `c2`.
///
/// Tangent vectors are written `u = ξ × ν`, `v = η × ν` with the
/// representatives `ξ = ν × u`, `η = ν × v` orthogonal to `ν`, and
/// `B(u, v) = −c₂ ⟨ξ × η, ν⟩`.
pub fn magnetic_form<T: Real>(nu: &Vec3<T>, u: &Vec3<T>, v: &Vec3<T>, c2: T) -> Result<T> {
    check_unit(nu)?;
    check_tangent(nu, u)?;
    check_tangent(nu, v)?;
    Ok(magnetic_form_on_representatives(
        nu,
        &nu.cross(u),
        &nu.cross(v),
        c2,
    ))
}

/// `−c₂ ⟨ξ × η, ν⟩` for arbitrary representatives `ξ`, `η` of the tangent
/// vectors `ξ × ν`, `η × ν`.
pub fn magnetic_form_on_representatives<T: Real>(
    nu: &Vec3<T>,
    xi: &Vec3<T>,
    eta: &Vec3<T>,
    c2: T,
) -> T {
    -(c2 * xi.cross(eta).dot(nu))
}

fn check_tangent<T: Real>(nu: &Vec3<T>, u: &Vec3<T>) -> Result<()> {
    let dot = u.dot(nu);
    if dot.abs() <= T::tol(TANGENT_TOL) * T::one().max(u.norm()) {
        Ok(())
    } else {
        Err(Error::NotTangent {
            dot: dot.to_f64().unwrap_or(f64::NAN),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra3::exp_so3;
    use crate::phase::{uniform_box, uniform_rotation, uniform_sphere};
    use crate::poisson::bracket;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
        Vec3::new(x, y, z)
    }

    fn q(nu: Vec3<f64>, pi: Vec3<f64>) -> Se3DualPoint<f64> {
        Se3DualPoint::new(nu, pi)
    }

    fn random_element(rng: &mut ChaCha8Rng) -> SE3Element<f64> {
        SE3Element::new(uniform_box::<f64, _>(rng) * 3.0, uniform_rotation(rng))
    }

    #[test]
    fn casimir_examples() {
        let l = casimirs(&q(v(0.0, 0.0, 1.0), v(0.0, 0.0, 3.0)));
        assert_eq!((l.c1, l.c2), (1.0, 3.0));
        let l = casimirs(&q(v(0.0, 0.0, 1.0), v(5.0, 0.0, 0.0)));
        assert_eq!((l.c1, l.c2), (1.0, 0.0));
    }

    #[test]
    fn casimirs_invariant_under_coadjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let g = random_element(&mut rng);
            let p = q(uniform_sphere(&mut rng), uniform_box(&mut rng));
            let (a, b) = (casimirs(&p), casimirs(&coadjoint(&g, &p)));
            assert!((a.c1 - b.c1).abs() <= 1e-12);
            assert!((a.c2 - b.c2).abs() <= 1e-12);
        }
    }

    #[test]
    fn casimirs_are_central() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for space in [SpaceId::Se3Dual, SpaceId::Reduced] {
            let cs = casimir_fields::<f64>(space).unwrap();
            for _ in 0..20 {
                let z: Vec<f64> = (0..space.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                for c in &cs {
                    for a in 0..space.dim() {
                        let coord = ScalarField::coordinate(space, a);
                        assert!(bracket(c, &coord, &z).unwrap().abs() <= 1e-12);
                    }
                }
            }
        }
        assert!(casimir_fields::<f64>(SpaceId::CotSE3).is_err());
    }

    #[test]
    fn coadjoint_examples() {
        let p = q(v(0.3, 0.4, 0.5), v(1.0, 2.0, 3.0));
        assert_eq!(coadjoint(&SE3Element::identity(), &p), p);
        let a = v(1.0, -2.0, 0.5);
        let g = SE3Element::new(a, Rotation::identity());
        let img = coadjoint(&g, &q(v(0.0, 0.0, 1.0), Vec3::zeros()));
        assert_eq!(img.nu, v(0.0, 0.0, 1.0));
        assert_eq!(img.pi, a.cross(&v(0.0, 0.0, 1.0)));
    }

    #[test]
    fn coadjoint_is_an_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let (g1, g2) = (random_element(&mut rng), random_element(&mut rng));
            let p = q(uniform_box(&mut rng), uniform_box(&mut rng));
            let lhs = coadjoint(&g1, &coadjoint(&g2, &p));
            let rhs = coadjoint(&g1.compose(&g2), &p);
            assert!((lhs.nu - rhs.nu).max_abs() <= 1e-12);
            assert!((lhs.pi - rhs.pi).max_abs() <= 1e-12);
        }
    }

    #[test]
    fn witness_examples() {
        let p = q(v(0.0, 0.0, 1.0), v(0.0, 0.0, 2.0));
        let g = same_orbit_witness(&p, &p).unwrap();
        assert!(witness_residual(&g, &p, &p) <= 1e-12);

        let p2 = q(v(1.0, 0.0, 0.0), v(2.0, 0.0, 0.0));
        let g = same_orbit_witness(&p, &p2).unwrap();
        assert!((g.rotation.apply(&v(0.0, 0.0, 1.0)) - v(1.0, 0.0, 0.0)).max_abs() <= 1e-12);
        assert!(g.translation.max_abs() <= 1e-12);
        assert!(witness_residual(&g, &p, &p2) <= 1e-9);

        let p1 = q(v(0.0, 0.0, 1.0), Vec3::zeros());
        let p2 = q(v(0.0, 0.0, 1.0), v(3.0, 0.0, 0.0));
        let g = same_orbit_witness(&p1, &p2).unwrap();
        assert!((*g.rotation.matrix() - *Rotation::identity().matrix()).max_abs() <= 1e-15);
        assert!((g.translation - v(0.0, 3.0, 0.0)).max_abs() <= 1e-15);
        assert!(witness_residual(&g, &p1, &p2) <= 1e-9);
    }

    #[test]
    fn witness_errors() {
        let p1 = q(v(0.0, 0.0, 1.0), v(0.0, 0.0, 1.0));
        let p2 = q(v(0.0, 0.0, 1.0), v(0.0, 0.0, 2.0));
        assert!(matches!(
            same_orbit_witness(&p1, &p2),
            Err(Error::NotSameLevel { .. })
        ));
        let z = q(Vec3::zeros(), v(1.0, 0.0, 0.0));
        assert_eq!(same_orbit_witness(&z, &z), Err(Error::ZeroNu));
    }

    #[test]
    fn witness_on_random_and_antipodal_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..300 {
            let p1 = q(uniform_sphere(&mut rng), uniform_box(&mut rng));
            let p2 = if k % 3 == 0 {
                // antipodal ν: a half turn about an axis ⟂ ν₁ plus a translation
                let n = crate::algebra3::orthogonal_unit(&p1.nu);
                coadjoint(
                    &SE3Element::new(uniform_box(&mut rng), Rotation::half_turn(&n)),
                    &p1,
                )
            } else {
                coadjoint(&random_element(&mut rng), &p1)
            };
            let g = same_orbit_witness(&p1, &p2).unwrap();
            assert!(witness_residual(&g, &p1, &p2) <= 1e-9);
        }
    }

    #[test]
    fn on_level_examples() {
        let p = q(v(0.0, 0.6, 0.8), v(1.0, -1.0, 0.5));
        let l = casimirs(&p);
        assert!(on_level(&p, &l, 1e-9));
        let off = q(p.nu, p.pi + v(0.0, 1e-3, 1e-3));
        assert!(!on_level(&off, &l, 1e-6));
    }

    #[test]
    fn magnetic_form_examples() {
        let e3 = v(0.0, 0.0, 1.0);
        let e1 = v(1.0, 0.0, 0.0);
        assert_eq!(
            magnetic_form(&e3, &Vec3::zeros(), &e1, 2.0).unwrap().abs(),
            0.0
        );
        assert_eq!(
            magnetic_form(&e3, &e1, &v(0.0, 1.0, 0.0), 1.0).unwrap(),
            -1.0
        );
        assert_eq!(
            magnetic_form(&e3, &e1, &v(0.0, 1.0, 0.0), 0.0)
                .unwrap()
                .abs(),
            0.0
        );
    }

    #[test]
    fn magnetic_form_rejects_bad_inputs() {
        let e1 = v(1.0, 0.0, 0.0);
        assert!(matches!(
            magnetic_form(&v(0.0, 0.0, 2.0), &e1, &e1, 1.0),
            Err(Error::NotUnit { .. })
        ));
        assert!(matches!(
            magnetic_form(&v(0.0, 0.0, 1.0), &v(0.0, 0.1, 1.0), &e1, 1.0),
            Err(Error::NotTangent { .. })
        ));
    }

    #[test]
    fn magnetic_form_equals_area_form() {
        // −c₂⟨ξ×η, ν⟩ with ξ = ν×u, η = ν×v reduces to −c₂⟨ν, u×v⟩.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let nu: Vec3<f64> = uniform_sphere(&mut rng);
            let r = exp_so3(&uniform_box(&mut rng));
            let (a, b): (Vec3<f64>, Vec3<f64>) =
                (uniform_box(&mut rng), r.apply(&uniform_box(&mut rng)));
            let u = a - nu * a.dot(&nu);
            let w = b - nu * b.dot(&nu);
            let c2 = rng.gen_range(-2.0..2.0);
            let lhs = magnetic_form(&nu, &u, &w, c2).unwrap();
            assert!((lhs + c2 * nu.dot(&u.cross(&w))).abs() <= 1e-12);
        }
    }
}
