//! Symmetric-top Hamiltonians, potentials, time stepping of `ż = Λ(z)∇H`,
//! invariant monitors and the closed-form free-top solution.

use crate::algebra3::{exp_so3, reorthonormalize, Vec3};
use crate::error::{Error, Result};
use crate::phase::{FullState, PhaseState, ReducedState, SpaceId};
use crate::poisson::{ham_vector_field, ScalarField};
use crate::reduction::{project_chart, project_full, tau};
use crate::scalar::Real;

/// Mass and principal moments of a symmetric top (`I₁ = I₂`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodyParams<T> {
    pub mass: T,
    /// Transverse moment `I₁ = I₂`.
    pub i1: T,
    /// Axial moment `I₃`.
    pub i3: T,
}

impl<T: Real> BodyParams<T> {
    pub fn new(mass: T, i1: T, i3: T) -> Result<Self> {
        for (name, v) in [("mass", mass), ("I1", i1), ("I3", i3)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self { mass, i1, i3 })
    }

    /// Coefficient `1/(2I₃) − 1/(2I₁)` of `⟨ν, π⟩²` in the full Hamiltonian.
    pub fn axial_coefficient(&self) -> T {
        T::half() * (self.i3.recip() - self.i1.recip())
    }
}

/// External potential `V(x, ν)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential<T> {
    Zero,
    /// `V = M⟨g, x⟩ + χ⟨ν, ĝ⟩`: uniform field acting on the centre of mass and
    /// on an offset along the symmetry axis.
    LinearGravity {
        g: Vec3<T>,
        chi: T,
    },
    /// `V = −m⟨ν, b(x)⟩` with the point-dipole field
    /// `b(x) = (3x̂⟨μ, x̂⟩ − μ)/|x|³` of a moment `μ` at the origin.
    Dipole {
        moment: T,
        source: Vec3<T>,
    },
    Sum(Vec<Potential<T>>),
}

/// Value and gradients of a potential at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialEval<T> {
    pub value: T,
    pub grad_x: Vec3<T>,
    pub grad_nu: Vec3<T>,
}

impl<T: Real> PotentialEval<T> {
    fn zero() -> Self {
        Self {
            value: T::zero(),
            grad_x: Vec3::zeros(),
            grad_nu: Vec3::zeros(),
        }
    }
}

impl<T: Real> Potential<T> {
    pub fn value(&self, x: &Vec3<T>, nu: &Vec3<T>, bp: &BodyParams<T>) -> T {
        self.eval(x, nu, bp).value
    }

    pub fn eval(&self, x: &Vec3<T>, nu: &Vec3<T>, bp: &BodyParams<T>) -> PotentialEval<T> {
        match self {
            Potential::Zero => PotentialEval::zero(),
            Potential::LinearGravity { g, chi } => {
                let g_hat = g.normalized().unwrap_or_else(Vec3::zeros);
                PotentialEval {
                    value: bp.mass * g.dot(x) + *chi * nu.dot(&g_hat),
                    grad_x: *g * bp.mass,
                    grad_nu: g_hat * *chi,
                }
            }
            Potential::Dipole { moment, source } => {
                let r2 = x.norm_squared();
                let r = r2.sqrt();
                let r3 = r2 * r;
                let r5 = r3 * r2;
                let r7 = r5 * r2;
                let three = T::lit(3.0);
                let (mx, nx, nm) = (source.dot(x), nu.dot(x), nu.dot(source));
                let field = *x * (three * mx / r5) - *source * r3.recip();
                let m = *moment;
                PotentialEval {
                    value: -m * nu.dot(&field),
                    grad_x: -(*nu * (three * mx / r5)
                        + *source * (three * nx / r5)
                        + *x * (three * nm / r5 - T::lit(15.0) * nx * mx / r7))
                        * m,
                    grad_nu: -field * m,
                }
            }
            Potential::Sum(terms) => terms.iter().fold(PotentialEval::zero(), |acc, t| {
                let e = t.eval(x, nu, bp);
                PotentialEval {
                    value: acc.value + e.value,
                    grad_x: acc.grad_x + e.grad_x,
                    grad_nu: acc.grad_nu + e.grad_nu,
                }
            }),
        }
    }

    /// Whether `∂V/∂ν` vanishes identically, so the free-top solution applies.
    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Sum(terms) => terms.iter().all(Potential::is_zero),
            _ => false,
        }
    }
}

/// `h = |p|²/(2M) + |π|²/(2I₁) + V(x, ν)` on `P₁`.
pub fn reduced_hamiltonian<T: Real>(
    s: &ReducedState<T>,
    bp: &BodyParams<T>,
    v: &Potential<T>,
) -> T {
    s.p.norm_squared() / (T::two() * bp.mass)
        + s.pi.norm_squared() / (T::two() * bp.i1)
        + v.value(&s.x, &s.nu, bp)
}

/// `H = |p|²/(2M) + |π|²/(2I₁) + (1/(2I₃) − 1/(2I₁))⟨ν, π⟩² + V(x, ν)` with
/// `ν = τ(R)`.
pub fn full_hamiltonian<T: Real>(s: &FullState<T>, bp: &BodyParams<T>, v: &Potential<T>) -> T {
    let nu = tau(&s.rotation);
    let c = nu.dot(&s.pi);
    s.p.norm_squared() / (T::two() * bp.mass)
        + s.pi.norm_squared() / (T::two() * bp.i1)
        + bp.axial_coefficient() * c * c
        + v.value(&s.x, &nu, bp)
}

/// Shared chart form of both Hamiltonians: the `⟨ν, π⟩²` term is weighted by
/// `axial` (zero for the reduced Hamiltonian).
fn top_hamiltonian_field<T: Real>(
    space: SpaceId,
    bp: BodyParams<T>,
    v: Potential<T>,
    axial: T,
) -> ScalarField<T> {
    let l = space.layout();
    let n = space.dim();
    let v2 = v.clone();
    ScalarField::new(
        space,
        move |z| {
            let (x, p, nu, pi) = (
                l.x_of(z).unwrap(),
                l.p_of(z).unwrap(),
                l.nu_of(z),
                l.pi_of(z),
            );
            let c = nu.dot(&pi);
            p.norm_squared() / (T::two() * bp.mass)
                + pi.norm_squared() / (T::two() * bp.i1)
                + axial * c * c
                + v.value(&x, &nu, &bp)
        },
        move |z| {
            let (x, p, nu, pi) = (
                l.x_of(z).unwrap(),
                l.p_of(z).unwrap(),
                l.nu_of(z),
                l.pi_of(z),
            );
            let c = nu.dot(&pi);
            let e = v2.eval(&x, &nu, &bp);
            let mut g = vec![T::zero(); n];
            let (xo, po) = (l.x.unwrap(), l.p.unwrap());
            let twice_axial_c = T::two() * axial * c;
            for j in 0..3 {
                g[xo + j] = e.grad_x[j];
                g[po + j] = p[j] / bp.mass;
                g[l.nu_index(j)] = twice_axial_c * pi[j] + e.grad_nu[j];
                g[l.pi_index(j)] = pi[j] / bp.i1 + twice_axial_c * nu[j];
            }
            g
        },
    )
}

/// The reduced Hamiltonian as a field on the `Reduced` chart.
pub fn reduced_hamiltonian_field<T: Real>(bp: &BodyParams<T>, v: &Potential<T>) -> ScalarField<T> {
    top_hamiltonian_field(SpaceId::Reduced, *bp, v.clone(), T::zero())
}

/// The full Hamiltonian as a field on the `CotSE3` chart.
pub fn full_hamiltonian_field<T: Real>(bp: &BodyParams<T>, v: &Potential<T>) -> ScalarField<T> {
    top_hamiltonian_field(SpaceId::CotSE3, *bp, v.clone(), bp.axial_coefficient())
}

/// Time-stepping scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Classical fourth-order Runge–Kutta on the chart.
    Rk4,
    /// RK4 followed by projection back onto the constraint manifold:
    /// `R` is reorthonormalized, `ν` is rescaled (to unit length on `P₁`, to
    /// its pre-step length on `se(3)*`).
    Rk4Repair,
}

/// One step of `method` for `ż = Λ(z)∇H(z)`.
pub fn step<T: Real>(
    space: SpaceId,
    h: &ScalarField<T>,
    z: &[T],
    dt: T,
    method: Method,
) -> Result<Vec<T>> {
    if dt.is_nan() || dt <= T::zero() {
        return Err(Error::InvalidArgument(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if h.space() != space {
        return Err(Error::InvalidArgument(format!(
            "Hamiltonian on {} stepped on {space}",
            h.space()
        )));
    }
    let axpy =
        |a: T, k: &[T]| -> Vec<T> { z.iter().zip(k).map(|(zi, ki)| *zi + a * *ki).collect() };
    let half = dt * T::half();
    let k1 = ham_vector_field(h, z)?;
    let k2 = ham_vector_field(h, &axpy(half, &k1))?;
    let k3 = ham_vector_field(h, &axpy(half, &k2))?;
    let k4 = ham_vector_field(h, &axpy(dt, &k3))?;
    let sixth = dt / T::lit(6.0);
    let mut out: Vec<T> = (0..z.len())
        .map(|i| z[i] + sixth * (k1[i] + T::two() * (k2[i] + k3[i]) + k4[i]))
        .collect();
    if !out.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite { t: f64::NAN });
    }
    if method == Method::Rk4Repair {
        repair(space, z, &mut out)?;
    }
    Ok(out)
}

fn repair<T: Real>(space: SpaceId, before: &[T], z: &mut [T]) -> Result<()> {
    let l = space.layout();
    if let Some(o) = l.rotation {
        let r = reorthonormalize(&l.rotation_matrix_of(z).unwrap())?;
        z[o..o + 9].copy_from_slice(&r.matrix().to_row_major());
    } else {
        let target = match space {
            SpaceId::Se3Dual => l.nu_of(before).norm(),
            _ => T::one(),
        };
        let nu = l.nu_of(z);
        let n = nu.norm();
        if n > T::zero() {
            for j in 0..3 {
                z[l.nu_index(j)] = nu[j] * (target / n);
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimOptions<T> {
    pub dt: T,
    /// Total time `T`; the run takes `round(T/dt)` steps.
    pub duration: T,
    pub method: Method,
    /// Record every `sample_stride`-th step (the final step is always kept).
    pub sample_stride: usize,
}

impl<T: Real> SimOptions<T> {
    pub fn new(dt: T, duration: T) -> Self {
        Self {
            dt,
            duration,
            method: Method::Rk4Repair,
            sample_stride: 1,
        }
    }

    pub fn with_method(self, method: Method) -> Self {
        Self { method, ..self }
    }

    pub fn with_stride(self, sample_stride: usize) -> Self {
        Self {
            sample_stride,
            ..self
        }
    }

    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.duration > T::zero() && self.duration.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidArgument(
                "sample_stride must be at least 1".into(),
            ));
        }
        let n = (self.duration / self.dt).round().to_usize().unwrap_or(0);
        Ok(n.max(1))
    }
}

/// Invariants recorded at each sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monitors<T> {
    pub energy: T,
    pub c1: T,
    pub c2: T,
    /// `‖RᵀR − I‖_max`; zero on charts without `R`.
    pub ortho_defect: T,
}

pub fn monitors<T: Real>(space: SpaceId, h: &ScalarField<T>, z: &[T]) -> Monitors<T> {
    let l = space.layout();
    let (nu, pi) = (l.nu_of(z), l.pi_of(z));
    Monitors {
        energy: h.eval(z),
        c1: nu.norm_squared(),
        c2: nu.dot(&pi),
        ortho_defect: l
            .rotation_matrix_of(z)
            .map_or(T::zero(), |m| m.orthogonality_defect()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    pub t: T,
    pub z: Vec<T>,
    pub monitors: Monitors<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub space: SpaceId,
    pub samples: Vec<Sample<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn first(&self) -> &Sample<T> {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample<T> {
        self.samples
            .last()
            .expect("trajectories hold at least the initial sample")
    }

    fn max_over<F: Fn(&Sample<T>) -> T>(&self, f: F) -> T {
        self.samples.iter().fold(T::zero(), |m, s| m.max(f(s)))
    }

    /// `max_t |h(t) − h(0)|`.
    pub fn energy_drift(&self) -> T {
        let e0 = self.first().monitors.energy;
        self.max_over(|s| (s.monitors.energy - e0).abs())
    }

    pub fn c1_drift(&self) -> T {
        let c0 = self.first().monitors.c1;
        self.max_over(|s| (s.monitors.c1 - c0).abs())
    }

    pub fn c2_drift(&self) -> T {
        let c0 = self.first().monitors.c2;
        self.max_over(|s| (s.monitors.c2 - c0).abs())
    }

    pub fn max_ortho_defect(&self) -> T {
        self.max_over(|s| s.monitors.ortho_defect)
    }
}

/// Integrates `ż = Λ(z)∇H` from `z0` and records monitored samples.
pub fn simulate<T: Real>(
    space: SpaceId,
    h: &ScalarField<T>,
    z0: &[T],
    opts: &SimOptions<T>,
) -> Result<Trajectory<T>> {
    space.check_dim(z0.len())?;
    let steps = opts.steps()?;
    let mut samples = Vec::with_capacity(steps / opts.sample_stride + 2);
    let mut z = z0.to_vec();
    samples.push(Sample {
        t: T::zero(),
        monitors: monitors(space, h, &z),
        z: z.clone(),
    });
    for k in 1..=steps {
        z = step(space, h, &z, opts.dt, opts.method).map_err(|e| match e {
            Error::NonFinite { .. } => Error::NonFinite {
                t: (T::from_usize(k).unwrap() * opts.dt)
                    .to_f64()
                    .unwrap_or(f64::NAN),
            },
            other => other,
        })?;
        if k % opts.sample_stride == 0 || k == steps {
            samples.push(Sample {
                t: T::from_usize(k).unwrap() * opts.dt,
                monitors: monitors(space, h, &z),
                z: z.clone(),
            });
        }
    }
    Ok(Trajectory { space, samples })
}

/// Exact flow of the reduced system for `V = 0`: `x` moves uniformly, `p`
/// and `π` are constant, and `ν` rotates about `π₀` with angular velocity
/// `π₀/I₁` (`ν̇ = ω × ν`).
pub fn free_top_analytic<T: Real>(
    s0: &ReducedState<T>,
    t: T,
    bp: &BodyParams<T>,
) -> ReducedState<T> {
    let spin = exp_so3(&(s0.pi * (t / bp.i1)));
    ReducedState {
        x: s0.x + s0.p * (t / bp.mass),
        p: s0.p,
        nu: spin.apply(&s0.nu),
        pi: s0.pi,
    }
}

/// Simulates the full system from `z0` and the reduced system from its
/// projection with identical options, and returns the largest sup-norm
/// distance between the projected full samples and the reduced samples.
pub fn commutation_residual<T: Real>(
    z0: &FullState<T>,
    bp: &BodyParams<T>,
    v: &Potential<T>,
    opts: &SimOptions<T>,
) -> Result<T> {
    let full = simulate(
        SpaceId::CotSE3,
        &full_hamiltonian_field(bp, v),
        &z0.flatten(),
        opts,
    )?;
    let reduced = simulate(
        SpaceId::Reduced,
        &reduced_hamiltonian_field(bp, v),
        &project_full(z0).flatten(),
        opts,
    )?;
    trajectory_distance(&full, &reduced)
}

/// Sup-norm distance between a `CotSE3` trajectory, projected, and a
/// `Reduced` trajectory sampled at the same times.
pub fn trajectory_distance<T: Real>(full: &Trajectory<T>, reduced: &Trajectory<T>) -> Result<T> {
    if full.samples.len() != reduced.samples.len() {
        return Err(Error::DimensionMismatch {
            expected: full.samples.len(),
            got: reduced.samples.len(),
        });
    }
    let mut worst = T::zero();
    for (a, b) in full.samples.iter().zip(&reduced.samples) {
        let projected = project_chart(full.space, &a.z)?;
        for (u, w) in projected.iter().zip(&b.z) {
            worst = worst.max((*u - *w).abs());
        }
    }
    Ok(worst)
}
