//! The projections `τ`, `τ̃` and `T*SE(3) → P₁`, the right `SO(3)` action,
//! and the checks that the projections are Poisson maps invariant under the
//! `S¹` of rotations about the body symmetry axis.

use crate::algebra3::{exp_so3, orthogonal_unit, Mat3, Rotation, Vec3};
use crate::error::{Error, Result};
use crate::phase::{check_unit, CotSO3State, FullState, ReducedState, Se3DualPoint, SpaceId};
use crate::poisson::{bracket, ScalarField};
use crate::scalar::Real;

/// A rotation about the body axis `E₃`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct S1Element<T> {
    pub angle: T,
}

impl<T: Real> S1Element<T> {
    pub fn new(angle: T) -> Self {
        Self { angle }
    }

    /// `Z(θ) = exp(θ ê₃)`; satisfies `Z_{i3} = δ_{i3}`.
    pub fn rotation(&self) -> Rotation<T> {
        exp_so3(&Vec3::new(T::zero(), T::zero(), self.angle))
    }
}

/// `τ(R)_i = R_{i3}`: the body symmetry axis seen in the inertial frame.
pub fn tau<T: Real>(r: &Rotation<T>) -> Vec3<T> {
    r.matrix().column(2)
}

/// `τ̃(R, π) = (τ(R), π)`.
pub fn tilde_tau<T: Real>(s: &CotSO3State<T>) -> Se3DualPoint<T> {
    Se3DualPoint::new(tau(&s.rotation), s.pi)
}

/// `((x, R), (p, π)) ↦ (x, p, τ(R), π)`.
pub fn project_full<T: Real>(s: &FullState<T>) -> ReducedState<T> {
    ReducedState {
        x: s.x,
        p: s.p,
        nu: tau(&s.rotation),
        pi: s.pi,
    }
}

/// Right translation `R ↦ RB`, all other components unchanged.
pub trait RightAction<T: Real> {
    fn right_action(&self, b: &Rotation<T>) -> Self;
}

impl<T: Real> RightAction<T> for CotSO3State<T> {
    fn right_action(&self, b: &Rotation<T>) -> Self {
        Self {
            rotation: self.rotation.compose(b),
            pi: self.pi,
        }
    }
}

impl<T: Real> RightAction<T> for FullState<T> {
    fn right_action(&self, b: &Rotation<T>) -> Self {
        Self {
            rotation: self.rotation.compose(b),
            ..*self
        }
    }
}

pub fn right_action<T: Real, S: RightAction<T>>(b: &Rotation<T>, s: &S) -> S {
    s.right_action(b)
}

/// The space a projection lands in, for the two projecting charts.
pub fn projected_space(from: SpaceId) -> Option<SpaceId> {
    match from {
        SpaceId::CotSE3 => Some(SpaceId::Reduced),
        SpaceId::CotSO3 => Some(SpaceId::Se3Dual),
        _ => None,
    }
}

/// Applies `τ̃` (from `CotSO3`) or the full projection (from `CotSE3`) to a
/// chart vector, without checking state invariants.
pub fn project_chart<T: Real>(from: SpaceId, z: &[T]) -> Result<Vec<T>> {
    from.check_dim(z.len())?;
    let to = projected_space(from)
        .ok_or_else(|| Error::InvalidArgument(format!("{from} has no projection")))?;
    let (src, dst) = (from.layout(), to.layout());
    let mut out = vec![T::zero(); to.dim()];
    if let (Some(a), Some(b)) = (src.x, dst.x) {
        out[b..b + 3].copy_from_slice(&z[a..a + 3]);
    }
    if let (Some(a), Some(b)) = (src.p, dst.p) {
        out[b..b + 3].copy_from_slice(&z[a..a + 3]);
    }
    for j in 0..3 {
        out[dst.nu_index(j)] = z[src.nu_index(j)];
        out[dst.pi_index(j)] = z[src.pi_index(j)];
    }
    Ok(out)
}

/// Pulls a field on the image space back along the projection out of
/// `from`, with the chain-rule gradient: `∂(F∘P)/∂R_{j3} = ∂F/∂ν_j` and
/// the other entries of `R` do not appear.
pub fn pullback<T: Real>(f: &ScalarField<T>, from: SpaceId) -> Result<ScalarField<T>> {
    let to = projected_space(from)
        .ok_or_else(|| Error::InvalidArgument(format!("{from} has no projection")))?;
    if f.space() != to {
        return Err(Error::InvalidArgument(format!(
            "field on {} cannot be pulled back from {from}",
            f.space()
        )));
    }
    let (f1, f2) = (f.clone(), f.clone());
    Ok(ScalarField::new(
        from,
        move |z| f1.eval(&project_chart(from, z).expect("dimension checked by caller")),
        move |z| {
            let g = f2.gradient(&project_chart(from, z).expect("dimension checked by caller"));
            let (src, dst) = (from.layout(), to.layout());
            let mut out = vec![T::zero(); from.dim()];
            if let (Some(a), Some(b)) = (src.x, dst.x) {
                out[a..a + 3].copy_from_slice(&g[b..b + 3]);
            }
            if let (Some(a), Some(b)) = (src.p, dst.p) {
                out[a..a + 3].copy_from_slice(&g[b..b + 3]);
            }
            for j in 0..3 {
                out[src.nu_index(j)] = g[dst.nu_index(j)];
                out[src.pi_index(j)] = g[dst.pi_index(j)];
            }
            out
        },
    ))
}

/// `{F∘P, G∘P}(z) − {F, G}(P(z))` for the full projection `P`.
pub fn poisson_map_residual<T: Real>(
    f: &ScalarField<T>,
    g: &ScalarField<T>,
    z: &FullState<T>,
) -> Result<T> {
    chart_poisson_map_residual(f, g, SpaceId::CotSE3, &crate::phase::PhaseState::flatten(z))
}

/// Same as [`poisson_map_residual`] for `τ̃ : T*SO(3) → se(3)*`.
pub fn tilde_tau_residual<T: Real>(
    f: &ScalarField<T>,
    g: &ScalarField<T>,
    s: &CotSO3State<T>,
) -> Result<T> {
    chart_poisson_map_residual(f, g, SpaceId::CotSO3, &crate::phase::PhaseState::flatten(s))
}

fn chart_poisson_map_residual<T: Real>(
    f: &ScalarField<T>,
    g: &ScalarField<T>,
    from: SpaceId,
    z: &[T],
) -> Result<T> {
    let upstairs = bracket(&pullback(f, from)?, &pullback(g, from)?, z)?;
    let downstairs = bracket(f, g, &project_chart(from, z)?)?;
    Ok(upstairs - downstairs)
}

/// A rotation whose third column is the unit vector `nu`: a point of the
/// fibre `τ⁻¹(ν)`. The frame is completed from the coordinate axis least
/// aligned with `ν`.
pub fn lift_direction<T: Real>(nu: &Vec3<T>) -> Result<Rotation<T>> {
    check_unit(nu)?;
    let nu = nu.normalized().ok_or(Error::ZeroNu)?;
    let e1 = orthogonal_unit(&nu);
    let e2 = nu.cross(&e1);
    Ok(Rotation::new_unchecked(Mat3::from_columns(e1, e2, nu)))
}

/// A preimage of `(ν, π) ∈ W₁` under `τ̃`.
pub fn lift_se3_dual<T: Real>(q: &Se3DualPoint<T>) -> Result<CotSO3State<T>> {
    Ok(CotSO3State {
        rotation: lift_direction(&q.nu)?,
        pi: q.pi,
    })
}

/// A preimage of a reduced state under the full projection.
pub fn lift_reduced<T: Real>(s: &ReducedState<T>) -> Result<FullState<T>> {
    Ok(FullState {
        x: s.x,
        rotation: lift_direction(&s.nu)?,
        p: s.p,
        pi: s.pi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{random_state, uniform_sphere, PhaseState, State};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn full(seed: u64) -> FullState<f64> {
        match random_state(SpaceId::CotSE3, seed) {
            State::CotSE3(s) => s,
            _ => unreachable!(),
        }
    }

    fn cot_so3(seed: u64) -> CotSO3State<f64> {
        match random_state(SpaceId::CotSO3, seed) {
            State::CotSO3(s) => s,
            _ => unreachable!(),
        }
    }

    #[test]
    fn s1_fixes_third_column() {
        for theta in [0.0, 0.3, -2.0, PI] {
            let z = S1Element::new(theta).rotation();
            for i in 0..3 {
                let expected = if i == 2 { 1.0 } else { 0.0 };
                assert!((z.matrix()[(i, 2)] - expected).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&Rotation::<f64>::identity()), Vec3::new(0.0, 0.0, 1.0));
        let nu = tau(&exp_so3(&Vec3::new(FRAC_PI_2, 0.0, 0.0)));
        assert!((nu - Vec3::new(0.0, -1.0, 0.0)).max_abs() <= 1e-15);
        let s = full(3);
        for theta in [0.1, 1.0, 4.0] {
            let shifted = s.rotation.compose(&S1Element::new(theta).rotation());
            assert!((tau(&shifted) - tau(&s.rotation)).max_abs() <= 1e-15);
        }
    }

    #[test]
    fn tilde_tau_examples() {
        let pi = Vec3::new(0.5, -1.0, 2.0);
        let s = CotSO3State {
            rotation: Rotation::identity(),
            pi,
        };
        assert_eq!(
            tilde_tau(&s),
            Se3DualPoint::new(Vec3::new(0.0, 0.0, 1.0), pi)
        );
        for seed in 0..50 {
            let s = cot_so3(seed);
            let q = tilde_tau(&s);
            assert_eq!(q.pi, s.pi);
            assert!((q.nu.norm_squared() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn project_full_passes_translations_and_momentum() {
        let s = full(8);
        let r = project_full(&s);
        assert_eq!((r.x, r.p, r.pi), (s.x, s.p, s.pi));
        let at_identity = FullState {
            rotation: Rotation::identity(),
            ..s
        };
        assert_eq!(project_full(&at_identity).nu, Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn s1_invariance_of_projection_is_exact_on_third_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for seed in 0..100 {
            let s = full(seed);
            let z = S1Element::new(rng.gen_range(-PI..PI)).rotation();
            let a = project_full(&right_action(&z, &s));
            let b = project_full(&s);
            assert_eq!((a.x, a.p, a.pi), (b.x, b.p, b.pi));
            assert!((a.nu - b.nu).max_abs() <= 1e-15);
        }
    }

    #[test]
    fn right_action_axioms() {
        let s = full(1);
        assert_eq!(right_action(&Rotation::identity(), &s), s);
        let b1 = exp_so3(&Vec3::new(0.2, -0.4, 1.0));
        let b2 = exp_so3(&Vec3::new(-1.1, 0.3, 0.5));
        let lhs = right_action(&b1, &right_action(&b2, &s));
        let rhs = right_action(&b2.compose(&b1), &s);
        assert!((*lhs.rotation.matrix() - *rhs.rotation.matrix()).max_abs() <= 1e-15);
        assert_eq!(lhs.pi, s.pi);
        let c = cot_so3(2);
        assert_eq!(right_action(&b1, &c).pi, c.pi);
    }

    #[test]
    fn poisson_map_examples() {
        let red = SpaceId::Reduced.layout();
        let coord = |a| ScalarField::coordinate(SpaceId::Reduced, a);
        for seed in 0..20 {
            let z = full(seed);
            let r =
                poisson_map_residual(&coord(red.nu_index(0)), &coord(red.pi_index(1)), &z).unwrap();
            assert!(r.abs() <= 1e-10);
            let r = poisson_map_residual(&coord(0), &coord(3), &z).unwrap();
            assert_eq!(r, 0.0);
        }
    }

    #[test]
    fn right_invariance_of_cot_so3_brackets() {
        // {(RB)_ij, (RB)_kl} = 0 and {π_i, (RB)_jn} = ε_ijl (RB)_ln, with the
        // brackets of R ↦ RB computed as pulled-back fields.
        let space = SpaceId::CotSO3;
        let lay = space.layout();
        let b = exp_so3(&Vec3::new(0.7, -0.2, 1.3));
        let bm = *b.matrix();
        let rb_entry = move |j: usize, n: usize| {
            let l = lay;
            ScalarField::new(
                space,
                move |z: &[f64]| {
                    (0..3)
                        .map(|m| z[l.r_index(j, m).unwrap()] * bm[(m, n)])
                        .sum()
                },
                move |_| {
                    let mut g = vec![0.0; 12];
                    for m in 0..3 {
                        g[l.r_index(j, m).unwrap()] = bm[(m, n)];
                    }
                    g
                },
            )
        };
        for seed in 0..10 {
            let s = cot_so3(seed);
            let z = s.flatten();
            let rb = *s.rotation.matrix() * bm;
            for j in 0..3 {
                for n in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            let v = bracket(&rb_entry(j, n), &rb_entry(k, l), &z).unwrap();
                            assert!(v.abs() <= 1e-12);
                        }
                    }
                    for i in 0..3 {
                        let pi = ScalarField::coordinate(space, lay.pi_index(i));
                        let v = bracket(&pi, &rb_entry(j, n), &z).unwrap();
                        let expected: f64 = (0..3)
                            .map(|l| f64::from(crate::scalar::levi_civita(i, j, l)) * rb[(l, n)])
                            .sum();
                        assert!((v - expected).abs() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn tilde_tau_is_poisson() {
        let coords = ScalarField::coordinates(SpaceId::Se3Dual);
        for seed in 0..20 {
            let s = cot_so3(seed);
            for f in &coords {
                for g in &coords {
                    assert!(tilde_tau_residual(f, g, &s).unwrap().abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn pullback_rejects_wrong_space() {
        let f = ScalarField::<f64>::coordinate(SpaceId::Reduced, 0);
        assert!(pullback(&f, SpaceId::CotSO3).is_err());
        assert!(pullback(&f, SpaceId::Reduced).is_err());
    }

    #[test]
    fn lift_is_a_section() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let nu: Vec3<f64> = uniform_sphere(&mut rng);
            let r = lift_direction(&nu).unwrap();
            assert!(Rotation::new(*r.matrix()).is_ok());
            assert!((tau(&r) - nu).max_abs() <= 1e-12);
        }
        for nu in [
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(0.0, -1.0, 0.0),
        ] {
            assert!((tau(&lift_direction(&nu).unwrap()) - nu).max_abs() <= 1e-12);
        }
        assert!(lift_direction(&Vec3::new(0.0, 0.0, 2.0)).is_err());
        let State::Reduced(red) = random_state::<f64>(SpaceId::Reduced, 6) else {
            unreachable!()
        };
        let back = project_full(&lift_reduced(&red).unwrap());
        assert!((back.nu - red.nu).max_abs() <= 1e-12);
        assert_eq!((back.x, back.p, back.pi), (red.x, red.p, red.pi));
    }
}
