//! Property suites behind `check`.

use std::io::Write;

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symtop::algebra3::orthogonal_unit;
use symtop::dynamics::{full_hamiltonian_field, reduced_hamiltonian_field};
use symtop::orbits::{
    casimir_fields, casimirs, coadjoint, magnetic_form, magnetic_form_on_representatives,
    same_orbit_witness, witness_residual,
};
use symtop::phase::{uniform_box, uniform_rotation, uniform_sphere, PhaseState, SpaceId, State};
use symtop::poisson::{bracket, ham_vector_field, jacobi_residual, structure_matrix};
use symtop::reduction::{
    lift_se3_dual, poisson_map_residual, project_full, right_action, tilde_tau_residual,
};
use symtop::{
    BodyParams, Potential, Rotation, S1Element, SE3Element, ScalarField, Se3DualPoint, Vec3,
};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Brackets,
    Jacobi,
    PoissonMap,
    Casimirs,
    Orbits,
    Gradients,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 6] = [
        Suite::Brackets,
        Suite::Jacobi,
        Suite::PoissonMap,
        Suite::Casimirs,
        Suite::Orbits,
        Suite::Gradients,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Brackets => "brackets",
            Suite::Jacobi => "jacobi",
            Suite::PoissonMap => "poisson-map",
            Suite::Casimirs => "casimirs",
            Suite::Orbits => "orbits",
            Suite::Gradients => "gradients",
            Suite::All => "all",
        }
    }
}

/// One checked property: worst residual against its tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Property {
    pub suite: &'static str,
    pub name: String,
    pub residual: f64,
    pub tol: f64,
}

impl Property {
    pub fn passed(&self) -> bool {
        self.residual <= self.tol
    }
}

struct Collector {
    suite: &'static str,
    out: Vec<Property>,
}

impl Collector {
    fn new(suite: Suite) -> Self {
        Self {
            suite: suite.name(),
            out: Vec::new(),
        }
    }

    fn push(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        self.out.push(Property {
            suite: self.suite,
            name: name.into(),
            residual,
            tol,
        });
    }
}

const POINTS: u64 = 100;

fn state(space: SpaceId, rng: &mut ChaCha8Rng) -> Vec<f64> {
    State::sample(space, rng).flatten()
}

fn random_quadratic(space: SpaceId, rng: &mut ChaCha8Rng) -> ScalarField {
    let n = space.dim();
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-1.0..1.0);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    ScalarField::quadratic(space, rng.gen_range(-1.0..1.0), b, a)
}

fn brackets(rng: &mut ChaCha8Rng) -> Vec<Property> {
    let mut c = Collector::new(Suite::Brackets);
    for space in SpaceId::ALL {
        let n = space.dim();
        let (mut anti, mut consistency, mut leibniz) = (0.0f64, 0.0f64, 0.0f64);
        let coords = ScalarField::coordinates(space);
        for _ in 0..POINTS {
            let z = state(space, rng);
            let lambda = structure_matrix(space, &z).expect("sampled point has chart length");
            for a in 0..n {
                for b in 0..n {
                    anti = anti.max((lambda.get(a, b) + lambda.get(b, a)).abs());
                }
            }
            let (f, g, h) = (
                random_quadratic(space, rng),
                random_quadratic(space, rng),
                random_quadratic(space, rng),
            );
            let v = ham_vector_field(&h, &z).expect("field matches space");
            for (a, za) in coords.iter().enumerate() {
                consistency =
                    consistency.max((v[a] - bracket(za, &h, &z).expect("same space")).abs());
            }
            let lhs = bracket(&f.product(&g), &h, &z).expect("same space");
            let rhs = f.eval(&z) * bracket(&g, &h, &z).expect("same space")
                + g.eval(&z) * bracket(&f, &h, &z).expect("same space");
            leibniz = leibniz.max((lhs - rhs).abs());
        }
        c.push(
            format!("{space}: antisymmetry of the structure matrix"),
            anti,
            0.0,
        );
        c.push(
            format!("{space}: vector field equals coordinate brackets"),
            consistency,
            1e-12,
        );
        c.push(format!("{space}: Leibniz rule"), leibniz, 1e-9);
    }
    c.out
}

fn jacobi(rng: &mut ChaCha8Rng) -> Vec<Property> {
    let mut c = Collector::new(Suite::Jacobi);
    for space in SpaceId::ALL {
        let n = space.dim();
        let mut worst = 0.0f64;
        for _ in 0..POINTS {
            let z = state(space, rng);
            for a in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        worst = worst.max(
                            jacobi_residual(space, a, b, d, &z)
                                .expect("valid indices")
                                .abs(),
                        );
                    }
                }
            }
        }
        c.push(
            format!("{space}: Jacobi identity, all coordinate triples"),
            worst,
            1e-10,
        );
    }
    c.out
}

fn poisson_map(rng: &mut ChaCha8Rng) -> Vec<Property> {
    let mut c = Collector::new(Suite::PoissonMap);
    let reduced = ScalarField::coordinates(SpaceId::Reduced);
    let dual = ScalarField::coordinates(SpaceId::Se3Dual);
    let (mut full_map, mut tt_map, mut s1) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..POINTS {
        let State::CotSE3(s) = State::sample(SpaceId::CotSE3, rng) else {
            unreachable!("sampled the full space")
        };
        for f in &reduced {
            for g in &reduced {
                full_map = full_map.max(poisson_map_residual(f, g, &s).expect("same space").abs());
            }
        }
        let State::CotSO3(r) = State::sample(SpaceId::CotSO3, rng) else {
            unreachable!("sampled the rotation space")
        };
        for f in &dual {
            for g in &dual {
                tt_map = tt_map.max(tilde_tau_residual(f, g, &r).expect("same space").abs());
            }
        }
        let z =
            S1Element::new(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).rotation();
        let (a, b) = (
            project_full(&s).flatten(),
            project_full(&right_action(&z, &s)).flatten(),
        );
        s1 = a.iter().zip(&b).fold(s1, |m, (u, v)| m.max((u - v).abs()));
    }
    c.push(
        "projection of the full space is a Poisson map",
        full_map,
        1e-10,
    );
    c.push(
        "projection of the rotation space is a Poisson map",
        tt_map,
        1e-10,
    );
    c.push("projection is invariant under the S1 action", s1, 0.0);
    c.out
}

fn se3_element(rng: &mut ChaCha8Rng) -> SE3Element {
    SE3Element::new(uniform_box::<f64, _>(rng) * 2.0, uniform_rotation(rng))
}

fn casimirs_suite(rng: &mut ChaCha8Rng) -> Vec<Property> {
    let mut c = Collector::new(Suite::Casimirs);
    let mut action = 0.0f64;
    for _ in 0..10 * POINTS {
        let q = Se3DualPoint::new(uniform_box(rng), uniform_box(rng));
        let (a, b) = (casimirs(&q), casimirs(&coadjoint(&se3_element(rng), &q)));
        action = action.max((a.c1 - b.c1).abs()).max((a.c2 - b.c2).abs());
    }
    c.push("C1, C2 invariant under the coadjoint action", action, 1e-12);
    for space in [SpaceId::Se3Dual, SpaceId::Reduced] {
        let cs = casimir_fields::<f64>(space).expect("space carries Casimirs");
        let mut central = 0.0f64;
        for _ in 0..POINTS {
            let f = random_quadratic(space, rng);
            let z = state(space, rng);
            for k in &cs {
                central = central.max(bracket(k, &f, &z).expect("same space").abs());
            }
        }
        c.push(
            format!("{space}: C1, C2 Poisson-commute with every function"),
            central,
            1e-12,
        );
    }
    c.out
}

fn orbits(rng: &mut ChaCha8Rng) -> Vec<Property> {
    let mut c = Collector::new(Suite::Orbits);
    let (mut witness, mut failures) = (0.0f64, 0usize);
    for k in 0..10 * POINTS {
        let q1 = Se3DualPoint::new(uniform_sphere(rng), uniform_box::<f64, _>(rng) * 2.0);
        let g = if k % 4 == 0 {
            SE3Element::new(
                uniform_box(rng),
                Rotation::half_turn(&orthogonal_unit(&q1.nu)),
            )
        } else {
            se3_element(rng)
        };
        let q2 = coadjoint(&g, &q1);
        match same_orbit_witness(&q1, &q2) {
            Ok(w) => witness = witness.max(witness_residual(&w, &q1, &q2)),
            Err(_) => failures += 1,
        }
    }
    c.push("same-level pairs have a verified witness", witness, 1e-9);
    c.push("same-level pairs without a witness", failures as f64, 0.0);

    let (mut anti, mut repr, mut type2) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10 * POINTS {
        let nu: Vec3 = uniform_sphere(rng);
        let mut tangent = || {
            let a: Vec3 = uniform_box(rng);
            a - nu * a.dot(&nu)
        };
        let (u, v) = (tangent(), tangent());
        let (c2, lambda, mu) = (
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
        );
        let b = magnetic_form(&nu, &u, &v, c2).expect("unit direction, tangent inputs");
        anti = anti.max(
            (b + magnetic_form(&nu, &v, &u, c2).expect("unit direction, tangent inputs")).abs(),
        );
        let shifted = magnetic_form_on_representatives(
            &nu,
            &(nu.cross(&u) + nu * lambda),
            &(nu.cross(&v) + nu * mu),
            c2,
        );
        repr = repr.max((shifted - b).abs());
        type2 = type2.max(
            magnetic_form(&nu, &u, &v, 0.0)
                .expect("unit direction, tangent inputs")
                .abs(),
        );
    }
    c.push("magnetic form is antisymmetric", anti, 0.0);
    c.push(
        "magnetic form is independent of representatives",
        repr,
        1e-12,
    );
    c.push("magnetic form vanishes at C2 = 0", type2, 0.0);
    c.out
}

fn gradients(rng: &mut ChaCha8Rng) -> Vec<Property> {
    let mut c = Collector::new(Suite::Gradients);
    let bp = BodyParams::new(1.3, 0.9, 1.7).expect("positive parameters");
    let gravity = Potential::LinearGravity {
        g: Vec3::new(0.1, -0.2, -1.0),
        chi: 0.7,
    };
    let dipole = Potential::Dipole {
        moment: 0.8,
        source: Vec3::new(0.3, 0.0, 1.0),
    };
    let presets = [
        ("zero", Potential::Zero),
        ("linear gravity", gravity.clone()),
        ("dipole", dipole.clone()),
        ("sum", Potential::Sum(vec![gravity, dipole])),
    ];
    for (name, pot) in &presets {
        let reduced = reduced_hamiltonian_field(&bp, pot);
        let full = full_hamiltonian_field(&bp, pot);
        let (mut r_err, mut f_err) = (0.0f64, 0.0f64);
        for _ in 0..POINTS {
            // keep x away from the dipole singularity at the origin
            let mut z = state(SpaceId::Reduced, rng);
            let x = Vec3::from_slice(&z[0..3]);
            let x = orthogonal_unit(&x) * 0.5 + x;
            z[..3].copy_from_slice(&x.0);
            r_err = r_err.max(reduced.gradient_error(&z, 1e-6));
            let mut w = state(SpaceId::CotSE3, rng);
            w[..3].copy_from_slice(&x.0);
            f_err = f_err.max(full.gradient_error(&w, 1e-6));
        }
        c.push(
            format!("{name}: reduced Hamiltonian gradient matches finite differences"),
            r_err,
            1e-5,
        );
        c.push(
            format!("{name}: full Hamiltonian gradient matches finite differences"),
            f_err,
            1e-5,
        );
    }
    let mut lift = 0.0f64;
    for _ in 0..POINTS {
        let q = Se3DualPoint::new(uniform_sphere(rng), uniform_box(rng));
        let s = lift_se3_dual(&q).expect("unit direction");
        lift = lift.max((s.rotation.matrix().column(2) - q.nu).max_abs());
    }
    c.push("unit directions lift to rotations", lift, 1e-12);
    c.out
}

/// Runs one suite (or all of them, in parallel) with a fixed seed.
pub fn run_suite(suite: Suite, seed: u64) -> Vec<Property> {
    let one = |s: Suite| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match s {
            Suite::Brackets => brackets(&mut rng),
            Suite::Jacobi => jacobi(&mut rng),
            Suite::PoissonMap => poisson_map(&mut rng),
            Suite::Casimirs => casimirs_suite(&mut rng),
            Suite::Orbits => orbits(&mut rng),
            Suite::Gradients => gradients(&mut rng),
            Suite::All => unreachable!("expanded by the caller"),
        }
    };
    match suite {
        Suite::All => std::thread::scope(|scope| {
            let handles: Vec<_> = Suite::INDIVIDUAL
                .iter()
                .map(|&s| scope.spawn(move || one(s)))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("suite thread panicked"))
                .collect()
        }),
        s => one(s),
    }
}

pub fn cmd_check(suite: Suite, seed: u64, report: &mut dyn Write) -> Result<(), CliError> {
    let props = run_suite(suite, seed);
    for p in &props {
        writeln!(
            report,
            "[{}] {:<12} {}: max residual {:.3e} ({})",
            if p.passed() { "PASS" } else { "FAIL" },
            p.suite,
            p.name,
            p.residual,
            if p.tol == 0.0 {
                "exact".to_string()
            } else {
                format!("tol {:.0e}", p.tol)
            }
        )?;
    }
    let failed = props.iter().filter(|p| !p.passed()).count();
    writeln!(report, "{} properties, {failed} failed", props.len())?;
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{failed} properties failed")))
    }
}
