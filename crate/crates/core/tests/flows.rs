//! Flow-level properties: level sets are invariant, reduced and full dynamics
//! agree, and Casimir Hamiltonians generate no motion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symtop::dynamics::{commutation_residual, reduced_hamiltonian_field, simulate, Method};
use symtop::orbits::{casimir_fields, casimirs, on_level};
use symtop::phase::{random_state, PhaseState, SpaceId};
use symtop::poisson::{bracket, ham_vector_field};
use symtop::{
    BodyParams, FullState, Potential, ReducedState, ScalarField, Se3DualPoint, SimOptions, State,
    Vec3,
};

fn random_quadratic(space: SpaceId, rng: &mut ChaCha8Rng, scale: f64) -> ScalarField {
    let n = space.dim();
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-scale..scale)).collect();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-scale..scale);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    ScalarField::quadratic(space, 0.0, b, a)
}

#[test]
fn se3_dual_flows_stay_on_their_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for seed in 0..20 {
        let h = random_quadratic(SpaceId::Se3Dual, &mut rng, 0.5);
        let z0 = random_state::<f64>(SpaceId::Se3Dual, seed).flatten();
        let q0 = Se3DualPoint::new(Vec3::from_slice(&z0[0..3]), Vec3::from_slice(&z0[3..6]));
        let level = casimirs(&q0);
        let opts = SimOptions::new(1e-3, 2.0)
            .with_method(Method::Rk4)
            .with_stride(50);
        let tr = simulate(SpaceId::Se3Dual, &h, &z0, &opts).unwrap();
        for s in &tr.samples {
            let q = Se3DualPoint::new(Vec3::from_slice(&s.z[0..3]), Vec3::from_slice(&s.z[3..6]));
            assert!(
                on_level(&q, &level, 1e-9),
                "seed {seed} left its level at t = {}",
                s.t
            );
        }
    }
}

#[test]
fn reduced_trajectories_stay_on_their_leaf() {
    let bp = BodyParams::new(1.5, 0.8, 1.3).unwrap();
    let pot = Potential::LinearGravity {
        g: Vec3::new(0.2, 0.0, -1.0),
        chi: 0.6,
    };
    let h = reduced_hamiltonian_field(&bp, &pot);
    let State::Reduced(s0) = random_state::<f64>(SpaceId::Reduced, 5) else {
        unreachable!()
    };
    let level = casimirs(&s0.se3_dual());
    let tr = simulate(
        SpaceId::Reduced,
        &h,
        &s0.flatten(),
        &SimOptions::new(1e-3, 10.0).with_stride(100),
    )
    .unwrap();
    for s in &tr.samples {
        let q = ReducedState::unflatten(&s.z).unwrap().se3_dual();
        assert!(on_level(&q, &level, 1e-9), "left the leaf at t = {}", s.t);
    }
}

fn commutation_start() -> (FullState, BodyParams) {
    let State::CotSE3(mut s) = random_state::<f64>(SpaceId::CotSE3, 12) else {
        unreachable!()
    };
    s.x = Vec3::new(1.0, -2.0, 0.5);
    (s, BodyParams::new(1.0, 1.2, 0.7).unwrap())
}

#[test]
fn free_top_commutes_with_projection() {
    let (s, bp) = commutation_start();
    let r = commutation_residual(
        &s,
        &bp,
        &Potential::Zero,
        &SimOptions::new(1e-3, 10.0).with_stride(20),
    )
    .unwrap();
    assert!(r <= 1e-7, "residual {r:e}");
}

#[test]
fn gravity_commutes_with_projection() {
    let (s, bp) = commutation_start();
    let pot = Potential::LinearGravity {
        g: Vec3::new(0.0, 0.0, -9.81),
        chi: 0.3,
    };
    let r =
        commutation_residual(&s, &bp, &pot, &SimOptions::new(1e-3, 10.0).with_stride(20)).unwrap();
    assert!(r <= 1e-7, "residual {r:e}");
}

#[test]
fn casimir_hamiltonians_generate_no_motion() {
    for space in [SpaceId::Se3Dual, SpaceId::Reduced] {
        let [c1, c2] = casimir_fields::<f64>(space).unwrap();
        for seed in 0..50 {
            let z = random_state::<f64>(space, seed).flatten();
            for c in [&c1, &c2] {
                let v = ham_vector_field(c, &z).unwrap();
                assert!(v.iter().all(|x| x.abs() <= 1e-12), "{space}: {v:?}");
            }
        }
    }
}

#[test]
fn vector_field_is_bracket_with_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for space in SpaceId::ALL {
        let coords = ScalarField::coordinates(space);
        for seed in 0..20 {
            let h = random_quadratic(space, &mut rng, 1.0);
            let z = random_state::<f64>(space, 100 + seed).flatten();
            let v = ham_vector_field(&h, &z).unwrap();
            for (a, za) in coords.iter().enumerate() {
                let b = bracket(za, &h, &z).unwrap();
                assert!(
                    (v[a] - b).abs() <= 1e-12,
                    "{space} component {a}: {} vs {b}",
                    v[a]
                );
            }
        }
    }
}
