//! Poisson structures as point-dependent structure matrices.
//!
//! Every coordinate bracket on the four charts is either zero, `±1`, or `±`
//! a single coordinate, so the table is stored symbolically
//! ([`BracketEntry`]) and evaluated on demand. Brackets of arbitrary
//! functions are `∇F · Λ(z) · ∇G`, and Hamiltonian flow is `ż = Λ(z) ∇H`,
//! which with `{x_i, p_j} = δ_ij` gives `ẋ = ∂H/∂p`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::phase::{Coordinate, SpaceId};
use crate::scalar::{complete_triple, Real};

/// Step used by [`ScalarField::finite_difference`] and gradient checks.
pub const FD_STEP: f64 = 1e-6;

/// Symbolic value of a coordinate bracket `{z_a, z_b}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketEntry {
    Zero,
    /// A constant `±1`.
    Const(i8),
    /// `sign · z_index`.
    Linear(i8, usize),
}

impl BracketEntry {
    #[inline]
    pub fn eval<T: Real>(self, z: &[T]) -> T {
        match self {
            BracketEntry::Zero => T::zero(),
            BracketEntry::Const(s) => signed(s, T::one()),
            BracketEntry::Linear(s, d) => signed(s, z[d]),
        }
    }

    /// `∂/∂z_d` of the entry, which is constant because every entry is affine.
    #[inline]
    pub fn derivative<T: Real>(self, d: usize) -> T {
        match self {
            BracketEntry::Linear(s, e) if e == d => signed(s, T::one()),
            _ => T::zero(),
        }
    }

    fn negate(self) -> Self {
        match self {
            BracketEntry::Zero => BracketEntry::Zero,
            BracketEntry::Const(s) => BracketEntry::Const(-s),
            BracketEntry::Linear(s, d) => BracketEntry::Linear(-s, d),
        }
    }
}

#[inline]
fn signed<T: Real>(s: i8, v: T) -> T {
    match s {
        1 => v,
        -1 => -v,
        _ => T::zero(),
    }
}

/// The bracket table `{z_a, z_b}` of `space`.
///
/// * `{x_i, p_j} = δ_ij`
/// * `{π_i, π_j} = ε_ijl π_l`
/// * `{π_i, ν_j} = ε_ijl ν_l`
/// * `{π_i, R_jk} = ε_ijl R_lk` (each column of `R` couples like `ν`)
///
/// with the transposed entries fixed by antisymmetry and all others zero.
pub fn coordinate_bracket(space: SpaceId, a: usize, b: usize) -> BracketEntry {
    use Coordinate::*;
    let layout = space.layout();
    let (Some(ca), Some(cb)) = (layout.classify(a), layout.classify(b)) else {
        return BracketEntry::Zero;
    };
    let pi_rule = |i: usize, j: usize, target: &dyn Fn(usize) -> usize| match complete_triple(i, j)
    {
        Some((l, s)) => BracketEntry::Linear(s, target(l)),
        None => BracketEntry::Zero,
    };
    match (ca, cb) {
        (X(i), P(j)) if i == j => BracketEntry::Const(1),
        (P(j), X(i)) if i == j => BracketEntry::Const(-1),
        (Pi(i), Pi(j)) => pi_rule(i, j, &|l| layout.pi_index(l)),
        (Pi(i), Nu(j)) => pi_rule(i, j, &|l| layout.nu_index(l)),
        (Nu(j), Pi(i)) => pi_rule(i, j, &|l| layout.nu_index(l)).negate(),
        (Pi(i), R(j, k)) => pi_rule(i, j, &|l| layout.r_index(l, k).unwrap()),
        (R(j, k), Pi(i)) => pi_rule(i, j, &|l| layout.r_index(l, k).unwrap()).negate(),
        _ => BracketEntry::Zero,
    }
}

/// `Λ(z)` with `Λ_ab = {z_a, z_b}(z)`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> StructureMatrix<T> {
    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> T {
        self.data[a * self.n + b]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.n)
    }

    /// `Λ v`.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.rows().map(|row| dot(row, v)).collect()
    }

    /// `uᵀ Λ v`, summed over the upper triangle as `Λ_ab (u_a v_b − u_b v_a)`
    /// so that swapping `u` and `v` negates the result exactly.
    pub fn pair(&self, u: &[T], v: &[T]) -> T {
        let mut acc = T::zero();
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                let l = self.get(a, b);
                if l != T::zero() {
                    acc = acc + l * (u[a] * v[b] - u[b] * v[a]);
                }
            }
        }
        acc
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Evaluates the bracket table of `space` at the chart point `z`.
///
/// `z` need not satisfy the state invariants; the entries are polynomial in
/// the chart coordinates.
pub fn structure_matrix<T: Real>(space: SpaceId, z: &[T]) -> Result<StructureMatrix<T>> {
    space.check_dim(z.len())?;
    let n = space.dim();
    let mut data = vec![T::zero(); n * n];
    for a in 0..n {
        for b in (a + 1)..n {
            let v = coordinate_bracket(space, a, b).eval(z);
            data[a * n + b] = v;
            data[b * n + a] = -v;
        }
    }
    Ok(StructureMatrix { n, data })
}

/// How a [`ScalarField`] obtains its gradient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientKind {
    Analytic,
    FiniteDifference,
}

type ValueFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
type GradientFn<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

/// A smooth function on a chart together with its gradient.
#[derive(Clone)]
pub struct ScalarField<T> {
    space: SpaceId,
    value: ValueFn<T>,
    gradient: GradientFn<T>,
    kind: GradientKind,
}

impl<T> fmt::Debug for ScalarField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("space", &self.space)
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

impl<T: Real> ScalarField<T> {
    /// A field with an analytic gradient.
    pub fn new<V, G>(space: SpaceId, value: V, gradient: G) -> Self
    where
        V: Fn(&[T]) -> T + Send + Sync + 'static,
        G: Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    {
        Self {
            space,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            kind: GradientKind::Analytic,
        }
    }

    /// A field whose gradient is taken by central differences.
    pub fn finite_difference<V>(space: SpaceId, value: V) -> Self
    where
        V: Fn(&[T]) -> T + Send + Sync + 'static,
    {
        let value: ValueFn<T> = Arc::new(value);
        let f = value.clone();
        Self {
            space,
            value,
            gradient: Arc::new(move |z| central_difference(&*f, z, T::lit(FD_STEP))),
            kind: GradientKind::FiniteDifference,
        }
    }

    /// The coordinate function `z ↦ z_a`.
    pub fn coordinate(space: SpaceId, a: usize) -> Self {
        let n = space.dim();
        assert!(a < n, "coordinate index {a} out of range for {space}");
        Self::new(
            space,
            move |z| z[a],
            move |_| {
                let mut g = vec![T::zero(); n];
                g[a] = T::one();
                g
            },
        )
    }

    /// All coordinate functions of `space`, in chart order.
    pub fn coordinates(space: SpaceId) -> Vec<Self> {
        (0..space.dim())
            .map(|a| Self::coordinate(space, a))
            .collect()
    }

    pub fn constant(space: SpaceId, c: T) -> Self {
        let n = space.dim();
        Self::new(space, move |_| c, move |_| vec![T::zero(); n])
    }

    /// `c + bᵀz + ½ zᵀAz` for symmetric `A` (row-major, `n × n`).
    pub fn quadratic(space: SpaceId, c: T, b: Vec<T>, a: Vec<T>) -> Self {
        let n = space.dim();
        assert_eq!(b.len(), n);
        assert_eq!(a.len(), n * n);
        let (b, a) = (Arc::new(b), Arc::new(a));
        let (b2, a2) = (b.clone(), a.clone());
        Self::new(
            space,
            move |z| {
                let az: Vec<T> = a.chunks(n).map(|row| dot(row, z)).collect();
                c + dot(&b, z) + T::half() * dot(z, &az)
            },
            move |z| {
                a2.chunks(n)
                    .zip(b2.iter())
                    .map(|(row, bi)| *bi + dot(row, z))
                    .collect()
            },
        )
    }

    #[inline]
    pub fn space(&self) -> SpaceId {
        self.space
    }

    #[inline]
    pub fn kind(&self) -> GradientKind {
        self.kind
    }

    #[inline]
    pub fn eval(&self, z: &[T]) -> T {
        (self.value)(z)
    }

    #[inline]
    pub fn gradient(&self, z: &[T]) -> Vec<T> {
        (self.gradient)(z)
    }

    /// Pointwise product, with the Leibniz-rule gradient.
    pub fn product(&self, other: &Self) -> Self {
        assert_eq!(self.space, other.space);
        let (f, g) = (self.clone(), other.clone());
        let (f2, g2) = (self.clone(), other.clone());
        let kind = self.combined_kind(other);
        Self {
            kind,
            ..Self::new(
                self.space,
                move |z| f.eval(z) * g.eval(z),
                move |z| {
                    let (fv, gv) = (f2.eval(z), g2.eval(z));
                    f2.gradient(z)
                        .into_iter()
                        .zip(g2.gradient(z))
                        .map(|(df, dg)| fv * dg + gv * df)
                        .collect()
                },
            )
        }
    }

    /// Pointwise sum.
    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.space, other.space);
        let (f, g) = (self.clone(), other.clone());
        let (f2, g2) = (self.clone(), other.clone());
        let kind = self.combined_kind(other);
        Self {
            kind,
            ..Self::new(
                self.space,
                move |z| f.eval(z) + g.eval(z),
                move |z| {
                    f2.gradient(z)
                        .into_iter()
                        .zip(g2.gradient(z))
                        .map(|(a, b)| a + b)
                        .collect()
                },
            )
        }
    }

    fn combined_kind(&self, other: &Self) -> GradientKind {
        if self.kind == GradientKind::Analytic && other.kind == GradientKind::Analytic {
            GradientKind::Analytic
        } else {
            GradientKind::FiniteDifference
        }
    }

    /// Largest deviation of the gradient from central differences with step
    /// `h`, relative to `max(1, ‖∇F‖∞)`.
    pub fn gradient_error(&self, z: &[T], h: T) -> T {
        let g = self.gradient(z);
        let fd = central_difference(&*self.value, z, h);
        let scale = g.iter().fold(T::one(), |m, v| m.max(v.abs()));
        g.iter()
            .zip(&fd)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
            / scale
    }
}

/// Central-difference gradient of `f` at `z`.
pub fn central_difference<T: Real, F: Fn(&[T]) -> T + ?Sized>(f: &F, z: &[T], h: T) -> Vec<T> {
    let mut work = z.to_vec();
    (0..z.len())
        .map(|a| {
            let orig = work[a];
            work[a] = orig + h;
            let plus = f(&work);
            work[a] = orig - h;
            let minus = f(&work);
            work[a] = orig;
            (plus - minus) / (h + h)
        })
        .collect()
}

fn check_field<T: Real>(f: &ScalarField<T>, space: SpaceId, z: &[T]) -> Result<()> {
    if f.space != space {
        return Err(Error::InvalidArgument(format!(
            "field on {} evaluated on {space}",
            f.space
        )));
    }
    space.check_dim(z.len())
}

/// `{F, G}(z) = ∇F(z)ᵀ Λ(z) ∇G(z)`.
pub fn bracket<T: Real>(f: &ScalarField<T>, g: &ScalarField<T>, z: &[T]) -> Result<T> {
    check_field(f, f.space, z)?;
    check_field(g, f.space, z)?;
    let lambda = structure_matrix(f.space, z)?;
    Ok(lambda.pair(&f.gradient(z), &g.gradient(z)))
}

/// `ż = Λ(z) ∇H(z)`; component `a` equals `{z_a, H}(z)`.
pub fn ham_vector_field<T: Real>(h: &ScalarField<T>, z: &[T]) -> Result<Vec<T>> {
    check_field(h, h.space, z)?;
    Ok(structure_matrix(h.space, z)?.apply(&h.gradient(z)))
}

/// `{z_a, {z_b, z_c}} + {z_b, {z_c, z_a}} + {z_c, {z_a, z_b}}` at `z`.
///
/// Coordinate brackets are affine, so the nested bracket
/// `{z_a, Λ_bc} = Σ_d Λ_ad ∂Λ_bc/∂z_d` is evaluated exactly.
pub fn jacobi_residual<T: Real>(
    space: SpaceId,
    a: usize,
    b: usize,
    c: usize,
    z: &[T],
) -> Result<T> {
    space.check_dim(z.len())?;
    let nested = |a: usize, b: usize, c: usize| match coordinate_bracket(space, b, c) {
        BracketEntry::Linear(s, d) => signed(s, coordinate_bracket(space, a, d).eval(z)),
        _ => T::zero(),
    };
    Ok(nested(a, b, c) + nested(b, c, a) + nested(c, a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{random_state, SpaceId::*};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn point(space: SpaceId, seed: u64) -> Vec<f64> {
        random_state::<f64>(space, seed).flatten()
    }

    fn random_quadratic(space: SpaceId, rng: &mut ChaCha8Rng) -> ScalarField<f64> {
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

    #[test]
    fn cot_se3_translational_block() {
        let z = point(CotSE3, 1);
        let l = structure_matrix(CotSE3, &z).unwrap();
        let lay = CotSE3.layout();
        let (xo, po) = (lay.x.unwrap(), lay.p.unwrap());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.get(xo + i, po + j), if i == j { 1.0 } else { 0.0 });
                assert_eq!(l.get(xo + i, xo + j), 0.0);
                assert_eq!(l.get(po + i, po + j), 0.0);
            }
            for b in 6..18 {
                assert_eq!(l.get(xo + i, b), 0.0);
                assert_eq!(l.get(po + i, b), 0.0);
            }
        }
    }

    #[test]
    fn se3_dual_example() {
        let z = [0.3, -0.2, 0.9, 0.0, 0.0, 1.0];
        let l = structure_matrix(Se3Dual, &z).unwrap();
        assert_eq!(l.get(3, 4), 1.0);
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(l.get(i, k), 0.0);
            }
        }
    }

    #[test]
    fn cot_so3_pi_r_at_identity() {
        let mut z = vec![0.0; 12];
        z[..9].copy_from_slice(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let l = structure_matrix(CotSO3, &z).unwrap();
        let lay = CotSO3.layout();
        // {π₁, R₂₃} = ε₁₂₃ R₃₃ = 1
        assert_eq!(l.get(lay.pi_index(0), lay.r_index(1, 2).unwrap()), 1.0);
    }

    #[test]
    fn structure_matrix_rejects_wrong_length() {
        assert!(structure_matrix(Reduced, &[0.0; 6]).is_err());
    }

    #[test]
    fn antisymmetry_is_exact() {
        for space in SpaceId::ALL {
            for seed in 0..50 {
                let z = point(space, seed);
                let l = structure_matrix(space, &z).unwrap();
                for a in 0..space.dim() {
                    for b in 0..space.dim() {
                        assert_eq!(l.get(a, b), -l.get(b, a));
                    }
                }
            }
        }
    }

    #[test]
    fn bracket_examples() {
        let z = point(CotSE3, 5);
        let x1 = ScalarField::coordinate(CotSE3, 0);
        let p1 = ScalarField::coordinate(CotSE3, 3);
        assert_eq!(bracket(&x1, &p1, &z).unwrap(), 1.0);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_quadratic(CotSE3, &mut rng);
        assert_eq!(bracket(&f, &f, &z).unwrap(), 0.0);
        let g = random_quadratic(CotSE3, &mut rng);
        assert_eq!(bracket(&f, &g, &z).unwrap(), -bracket(&g, &f, &z).unwrap());

        let mut z = point(CotSO3, 2);
        z[9..12].copy_from_slice(&[1.0, 1.0, 5.0]);
        let p1 = ScalarField::coordinate(CotSO3, 9);
        let p2 = ScalarField::coordinate(CotSO3, 10);
        assert_eq!(bracket(&p1, &p2, &z).unwrap(), 5.0);
    }

    #[test]
    fn bracket_rejects_mismatched_point() {
        let f = ScalarField::<f64>::coordinate(Reduced, 0);
        assert!(bracket(&f, &f, &[0.0; 18]).is_err());
    }

    #[test]
    fn free_particle_flow() {
        let m = 2.0;
        let lay = CotSE3.layout();
        let po = lay.p.unwrap();
        let h = ScalarField::new(
            CotSE3,
            move |z: &[f64]| {
                (z[po] * z[po] + z[po + 1] * z[po + 1] + z[po + 2] * z[po + 2]) / (2.0 * m)
            },
            move |z: &[f64]| {
                let mut g = vec![0.0; 18];
                for i in 0..3 {
                    g[po + i] = z[po + i] / m;
                }
                g
            },
        );
        let z = point(CotSE3, 11);
        let v = ham_vector_field(&h, &z).unwrap();
        for i in 0..3 {
            assert_eq!(v[i], z[po + i] / m);
        }
        assert!(v[3..].iter().all(|c| *c == 0.0));
    }

    #[test]
    fn vector_field_matches_coordinate_brackets() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for space in SpaceId::ALL {
            let h = random_quadratic(space, &mut rng);
            let z = point(space, rng.gen());
            let v = ham_vector_field(&h, &z).unwrap();
            for (a, coord) in ScalarField::coordinates(space).iter().enumerate() {
                assert!((v[a] - bracket(coord, &h, &z).unwrap()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        let z = point(Se3Dual, 3);
        assert!(jacobi_residual(Se3Dual, 3, 4, 5, &z).unwrap().abs() <= 1e-12);
        let z = point(CotSE3, 3);
        assert_eq!(jacobi_residual(CotSE3, 0, 3, 16, &z).unwrap(), 0.0);
        let z = point(CotSO3, 3);
        let l = CotSO3.layout();
        let (r13, r23) = (l.r_index(0, 2).unwrap(), l.r_index(1, 2).unwrap());
        assert!(jacobi_residual(CotSO3, 9, r13, r23, &z).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn jacobi_for_all_triples() {
        for space in SpaceId::ALL {
            let n = space.dim();
            for seed in 0..5 {
                let z = point(space, seed);
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            assert!(jacobi_residual(space, a, b, c, &z).unwrap().abs() <= 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn jacobi_residual_matches_nested_field_brackets() {
        // Nesting through ScalarFields whose gradients are the structure
        // matrix rows: an independent route to the same number.
        let space = Se3Dual;
        let z = point(space, 8);
        let entry_field = |b: usize, c: usize| {
            ScalarField::new(
                space,
                move |z: &[f64]| coordinate_bracket(space, b, c).eval(z),
                move |_| {
                    (0..6)
                        .map(|d| coordinate_bracket(space, b, c).derivative(d))
                        .collect()
                },
            )
        };
        let coord = |a| ScalarField::coordinate(space, a);
        let (a, b, c) = (3, 4, 0);
        let nested = bracket(&coord(a), &entry_field(b, c), &z).unwrap()
            + bracket(&coord(b), &entry_field(c, a), &z).unwrap()
            + bracket(&coord(c), &entry_field(a, b), &z).unwrap();
        assert!((nested - jacobi_residual(space, a, b, c, &z).unwrap()).abs() <= 1e-15);
    }

    #[test]
    fn leibniz_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for space in SpaceId::ALL {
            for _ in 0..20 {
                let (f, g, k) = (
                    random_quadratic(space, &mut rng),
                    random_quadratic(space, &mut rng),
                    random_quadratic(space, &mut rng),
                );
                let z = point(space, rng.gen());
                let lhs = bracket(&f.product(&g), &k, &z).unwrap();
                let rhs = f.eval(&z) * bracket(&g, &k, &z).unwrap()
                    + g.eval(&z) * bracket(&f, &k, &z).unwrap();
                assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for space in SpaceId::ALL {
            let f = random_quadratic(space, &mut rng);
            let g = f.product(&random_quadratic(space, &mut rng));
            let z = point(space, 1);
            assert!(f.gradient_error(&z, FD_STEP) <= 1e-5);
            assert!(g.gradient_error(&z, FD_STEP) <= 1e-5);
            assert_eq!(g.kind(), GradientKind::Analytic);
        }
    }

    #[test]
    fn finite_difference_field_agrees_with_analytic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_quadratic(Reduced, &mut rng);
        let f2 = f.clone();
        let fd = ScalarField::finite_difference(Reduced, move |z| f2.eval(z));
        assert_eq!(fd.kind(), GradientKind::FiniteDifference);
        let z = point(Reduced, 0);
        let (a, b) = (f.gradient(&z), fd.gradient(&z));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-6));
    }
}
