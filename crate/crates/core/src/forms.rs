//! Nonlocal conductivity and Schrödinger forms, the Liouville potential and
//! exterior value problems.
//!
//! With `g = gamma^{1/2}` and `m = g - 1`, the conductivity form
//! `B_gamma(u, phi) = 1/2 sum_ij w_ij g_i g_j (u_i - u_j)(phi_i - phi_j)`
//! equals the Schrödinger form `B_q(g u, g phi)` for the potential
//! `q = -(L m) / g` exactly, because `L` annihilates constants.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen, LU};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::{apply_graph_laplacian, KernelWeights};
use crate::geometry::GridDomain;
use crate::scalar::Real;

/// Singular value ratio below which the interior block counts as singular.
pub const SINGULAR_RATIO: f64 = 1e-10;

/// Nodal conductivity with its square root and background deviation.
#[derive(Clone, Debug)]
pub struct ConductivityField<T: Real> {
    gamma: Vec<T>,
    sqrt: Vec<T>,
    deviation: Vec<T>,
    gamma0: T,
}

impl<T: Real> ConductivityField<T> {
    /// Validates `gamma0 <= gamma_i <= 1/gamma0` with `gamma0 in (0, 1)`.
    pub fn new(gamma: Vec<T>, gamma0: T) -> Result<Self> {
        if !(gamma0 > T::zero() && gamma0 < T::one()) {
            return Err(Error::Config(format!("gamma0 = {gamma0} must lie in (0, 1)")));
        }
        let upper = T::one() / gamma0;
        // values within a few ulps of the bounds are accepted
        let slack = T::of(8.0) * T::eps();
        for (i, &g) in gamma.iter().enumerate() {
            if !(g > T::zero()) || !g.is_finite() {
                return Err(Error::Assumption {
                    assumption: "(ii) positivity".into(),
                    detail: format!("gamma[{i}] = {g} is not positive"),
                });
            }
            if g < gamma0 * (T::one() - slack) || g > upper * (T::one() + slack) {
                return Err(Error::Assumption {
                    assumption: "(ii) gamma0 <= gamma <= 1/gamma0".into(),
                    detail: format!("gamma[{i}] = {g} outside [{gamma0}, {upper}]"),
                });
            }
        }
        let sqrt: Vec<T> = gamma.iter().map(|g| g.sqrt()).collect();
        let deviation = sqrt.iter().map(|&g| g - T::one()).collect();
        Ok(ConductivityField { gamma, sqrt, deviation, gamma0 })
    }

    /// Builds `gamma = (1 + m)^2` from a background deviation.
    pub fn from_deviation(m: &[T], gamma0: T) -> Result<Self> {
        let gamma = m.iter().map(|&x| (T::one() + x) * (T::one() + x)).collect();
        Self::new(gamma, gamma0)
    }

    /// Constant conductivity.
    pub fn constant(len: usize, value: T, gamma0: T) -> Result<Self> {
        Self::new(vec![value; len], gamma0)
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.gamma
    }

    /// `gamma^{1/2}`.
    pub fn sqrt(&self) -> &[T] {
        &self.sqrt
    }

    /// Background deviation `m = gamma^{1/2} - 1`.
    pub fn deviation(&self) -> &[T] {
        &self.deviation
    }

    pub fn gamma0(&self) -> T {
        self.gamma0
    }

    /// Smallest `gamma0` for which the field satisfies the two-sided bound.
    pub fn tightest_gamma0(&self) -> T {
        self.gamma.iter().fold(T::one(), |acc, &g| acc.min(g).min(T::one() / g))
    }
}

/// Which equation a form discretizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Conductivity,
    Schroedinger,
}

/// Sign convention for the Liouville potential.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialSign {
    /// `q = -(-Delta)^s m / gamma^{1/2}`; makes the reduction exact.
    #[default]
    Negative,
    /// `q = +(-Delta)^s m / gamma^{1/2}`; kept as a negative control.
    Positive,
}

/// Symmetric matrix of a nonlocal bilinear form.
#[derive(Debug)]
pub struct NonlocalForm<T: Real> {
    equation: Equation,
    matrix: DMatrix<T>,
    weights_id: u64,
    cell_volume: T,
    potential: Option<Vec<T>>,
    solver: OnceLock<Result<InteriorSolver<T>>>,
}

impl<T: Real> Clone for NonlocalForm<T> {
    fn clone(&self) -> Self {
        NonlocalForm {
            equation: self.equation,
            matrix: self.matrix.clone(),
            weights_id: self.weights_id,
            cell_volume: self.cell_volume,
            potential: self.potential.clone(),
            solver: OnceLock::new(),
        }
    }
}

/// Factorized interior block `A_{Omega Omega}` with its conditioning.
#[derive(Debug)]
pub struct InteriorSolver<T: Real> {
    interior: Vec<usize>,
    exterior: Vec<usize>,
    lu: LU<T, Dyn, Dyn>,
    sigma_min: T,
    sigma_max: T,
    lowest_eigenvalue: T,
}

impl<T: Real> InteriorSolver<T> {
    pub fn sigma_min(&self) -> T {
        self.sigma_min
    }

    pub fn sigma_max(&self) -> T {
        self.sigma_max
    }

    pub fn lowest_eigenvalue(&self) -> T {
        self.lowest_eigenvalue
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn exterior(&self) -> &[usize] {
        &self.exterior
    }

    /// Solves `A_OO x = rhs` for several right-hand sides.
    pub fn solve_interior(&self, rhs: &DMatrix<T>) -> DMatrix<T> {
        self.lu.solve(rhs).expect("interior block was checked to be nonsingular")
    }
}

impl<T: Real> NonlocalForm<T> {
    pub fn equation(&self) -> Equation {
        self.equation
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    pub fn potential(&self) -> Option<&[T]> {
        self.potential.as_deref()
    }

    pub fn weights_id(&self) -> u64 {
        self.weights_id
    }

    pub fn cell_volume(&self) -> T {
        self.cell_volume
    }

    /// `phi^T A u`.
    pub fn bilinear(&self, u: &[T], phi: &[T]) -> T {
        let u = DVector::from_column_slice(u);
        let phi = DVector::from_column_slice(phi);
        phi.dot(&(&self.matrix * u))
    }

    fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<T> {
        DMatrix::from_fn(rows.len(), cols.len(), |a, b| self.matrix[(rows[a], cols[b])])
    }

    /// Factorizes the interior block once and caches it. Fails when zero is
    /// numerically a Dirichlet eigenvalue.
    pub fn interior_solver(&self, domain: &GridDomain<T>) -> Result<&InteriorSolver<T>> {
        let cached = self.solver.get_or_init(|| self.factorize(domain));
        match cached {
            Ok(s) if s.interior == domain.omega() => Ok(s),
            Ok(_) => Err(Error::Config("form solver cached for a different domain".into())),
            Err(Error::DirichletEigenvalue { ratio, threshold }) => {
                Err(Error::DirichletEigenvalue { ratio: *ratio, threshold: *threshold })
            }
            Err(e) => Err(Error::Config(e.to_string())),
        }
    }

    fn factorize(&self, domain: &GridDomain<T>) -> Result<InteriorSolver<T>> {
        if domain.node_count() != self.len() {
            return Err(Error::Shape { expected: self.len(), got: domain.node_count() });
        }
        let interior = domain.omega().to_vec();
        let exterior = domain.exterior().to_vec();
        let block = self.block(&interior, &interior);
        let eig = SymmetricEigen::new(block.clone());
        let mut sigma_min = T::max_value().unwrap_or_else(|| T::of(f64::MAX));
        let mut sigma_max = T::zero();
        let mut lowest = T::max_value().unwrap_or_else(|| T::of(f64::MAX));
        for &l in eig.eigenvalues.iter() {
            sigma_min = sigma_min.min(l.abs());
            sigma_max = sigma_max.max(l.abs());
            lowest = lowest.min(l);
        }
        let ratio = if sigma_max > T::zero() { sigma_min / sigma_max } else { T::zero() };
        if ratio < T::of(SINGULAR_RATIO) {
            return Err(Error::DirichletEigenvalue { ratio: ratio.as_f64(), threshold: SINGULAR_RATIO });
        }
        Ok(InteriorSolver { interior, exterior, lu: block.lu(), sigma_min, sigma_max, lowest_eigenvalue: lowest })
    }

    /// Interior-exterior coupling block `A_{Omega E}`.
    pub fn coupling(&self, domain: &GridDomain<T>) -> DMatrix<T> {
        self.block(domain.omega(), domain.exterior())
    }

    /// Exterior block `A_{E E}`.
    pub fn exterior_block(&self, domain: &GridDomain<T>) -> DMatrix<T> {
        self.block(domain.exterior(), domain.exterior())
    }
}

fn check_len<T>(expected: usize, v: &[T]) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(Error::Shape { expected, got: v.len() })
    }
}

/// Matrix of `B_gamma`.
pub fn assemble_conductivity_form<T: Real>(
    weights: &KernelWeights<T>,
    gamma: &ConductivityField<T>,
) -> Result<NonlocalForm<T>> {
    let n = weights.len();
    check_len(n, gamma.values())?;
    let g = gamma.sqrt();
    let w = weights.matrix();
    let mut a = DMatrix::from_fn(n, n, |i, j| if i == j { T::zero() } else { -(w[(i, j)] * g[i] * g[j]) });
    for i in 0..n {
        let diag = (0..n).fold(T::zero(), |acc, j| acc - a[(i, j)]);
        a[(i, i)] = diag;
    }
    Ok(NonlocalForm {
        equation: Equation::Conductivity,
        matrix: a,
        weights_id: weights.id(),
        cell_volume: weights.cell_volume(),
        potential: None,
        solver: OnceLock::new(),
    })
}

/// Liouville potential `q = -(L m) / gamma^{1/2}` from the graph operator.
pub fn liouville_potential<T: Real>(weights: &KernelWeights<T>, gamma: &ConductivityField<T>) -> Result<Vec<T>> {
    liouville_potential_signed(weights, gamma, PotentialSign::Negative)
}

/// Liouville potential with an explicit sign convention.
pub fn liouville_potential_signed<T: Real>(
    weights: &KernelWeights<T>,
    gamma: &ConductivityField<T>,
    sign: PotentialSign,
) -> Result<Vec<T>> {
    let lm = apply_graph_laplacian(weights, gamma.deviation())?;
    let q = lm
        .iter()
        .zip(gamma.sqrt())
        .map(|(&l, &g)| match sign {
            PotentialSign::Negative => -l / g,
            PotentialSign::Positive => l / g,
        })
        .collect();
    Ok(q)
}

/// Matrix of `B_q`: graph stiffness plus `h^n diag(q)`.
pub fn assemble_schrodinger_form<T: Real>(weights: &KernelWeights<T>, q: &[T]) -> Result<NonlocalForm<T>> {
    let n = weights.len();
    check_len(n, q)?;
    if q.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config("potential has non-finite entries".into()));
    }
    let mut a = weights.form_matrix();
    let vol = weights.cell_volume();
    for i in 0..n {
        a[(i, i)] += vol * q[i];
    }
    Ok(NonlocalForm {
        equation: Equation::Schroedinger,
        matrix: a,
        weights_id: weights.id(),
        cell_volume: weights.cell_volume(),
        potential: Some(q.to_vec()),
        solver: OnceLock::new(),
    })
}

/// Relative residual `|B_gamma(u, phi) - B_q(g u, g phi)|` of the Liouville
/// reduction, normalized by the magnitudes of the terms involved.
pub fn verify_liouville_identity<T: Real>(
    conductivity: &NonlocalForm<T>,
    schrodinger: &NonlocalForm<T>,
    gamma: &ConductivityField<T>,
    u: &[T],
    phi: &[T],
) -> Result<T> {
    if conductivity.weights_id != schrodinger.weights_id {
        return Err(Error::WeightsMismatch);
    }
    if conductivity.equation != Equation::Conductivity || schrodinger.equation != Equation::Schroedinger {
        return Err(Error::Config("expected a conductivity and a Schrödinger form".into()));
    }
    let n = conductivity.len();
    check_len(n, u)?;
    check_len(n, phi)?;
    let g = gamma.sqrt();
    let gu: Vec<T> = u.iter().zip(g).map(|(&a, &b)| a * b).collect();
    let gphi: Vec<T> = phi.iter().zip(g).map(|(&a, &b)| a * b).collect();
    let lhs = conductivity.bilinear(u, phi);
    let rhs = schrodinger.bilinear(&gu, &gphi);
    let q = schrodinger.potential().unwrap_or(&[]);
    let potential_term =
        q.iter().zip(gu.iter().zip(&gphi)).fold(T::zero(), |acc, (&qi, (&a, &b))| acc + (qi * a * b).abs())
            * schrodinger.cell_volume;
    let scale = lhs.abs().max(rhs.abs()).max(potential_term).max(T::of(f64::MIN_POSITIVE));
    Ok((lhs - rhs).abs() / scale)
}

/// Convenience: assembles both forms from one weight object and returns the
/// Liouville residual.
pub fn liouville_residual<T: Real>(
    weights: &KernelWeights<T>,
    gamma: &ConductivityField<T>,
    sign: PotentialSign,
    u: &[T],
    phi: &[T],
) -> Result<T> {
    let a = assemble_conductivity_form(weights, gamma)?;
    let q = liouville_potential_signed(weights, gamma, sign)?;
    let b = assemble_schrodinger_form(weights, &q)?;
    verify_liouville_identity(&a, &b, gamma, u, phi)
}

/// Solves `A u = 0` in `Omega`, `u = f` on the exterior nodes. `f` is a full
/// nodal field whose interior values are ignored.
pub fn solve_exterior_problem<T: Real>(form: &NonlocalForm<T>, domain: &GridDomain<T>, f: &[T]) -> Result<Vec<T>> {
    check_len(form.len(), f)?;
    let solver = form.interior_solver(domain)?;
    let fe = DVector::from_iterator(solver.exterior.len(), solver.exterior.iter().map(|&i| f[i]));
    let coupling = form.coupling(domain);
    let rhs = -(coupling * fe);
    let rhs = DMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice());
    let x = solver.solve_interior(&rhs);
    let mut u = f.to_vec();
    for (k, &i) in solver.interior.iter().enumerate() {
        u[i] = x[(k, 0)];
    }
    Ok(u)
}

/// Relative residual of the interior equations `(A u)_i = 0`, `i in Omega`.
pub fn interior_residual<T: Real>(form: &NonlocalForm<T>, domain: &GridDomain<T>, u: &[T]) -> T {
    let au = form.matrix() * DVector::from_column_slice(u);
    let scale = form.matrix().abs().max() * u.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
    let worst = domain.omega().iter().fold(T::zero(), |a, &i| a.max(au[i].abs()));
    if scale > T::zero() {
        worst / scale
    } else {
        worst
    }
}

/// Conditioning of the interior block.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DirichletMargin {
    /// Smallest singular value of `A_{Omega Omega}` divided by `h^n`.
    pub margin: f64,
    /// Smallest eigenvalue divided by `h^n` (signed).
    pub lowest_eigenvalue: f64,
    /// `sigma_min / sigma_max`.
    pub ratio: f64,
}

impl DirichletMargin {
    pub fn solvable(&self) -> bool {
        self.ratio >= SINGULAR_RATIO
    }
}

/// Smallest singular value of the interior block, scaled by `h^n`.
pub fn check_dirichlet_eigenvalue<T: Real>(form: &NonlocalForm<T>, domain: &GridDomain<T>) -> DirichletMargin {
    let block = form.block(domain.omega(), domain.omega());
    let eig = SymmetricEigen::new(block);
    let vol = domain.cell_volume().as_f64();
    let (mut smin, mut smax, mut low) = (f64::INFINITY, 0.0f64, f64::INFINITY);
    for &l in eig.eigenvalues.iter() {
        let l = l.as_f64();
        smin = smin.min(l.abs());
        smax = smax.max(l.abs());
        low = low.min(l);
    }
    DirichletMargin {
        margin: smin / vol,
        lowest_eigenvalue: low / vol,
        ratio: if smax > 0.0 { smin / smax } else { 0.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::assemble_weights;
    use crate::geometry::{build_grid, DomainConfig, GeometryMode, ShapeSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(h: f64) -> (GridDomain<f64>, KernelWeights<f64>) {
        let cfg = DomainConfig {
            n: 1,
            half_width: 4.0,
            h,
            omega: ShapeSpec::Interval { lo: -1.0, hi: 1.0 },
            w1: ShapeSpec::Interval { lo: 1.5, hi: 2.5 },
            w2: Some(ShapeSpec::Interval { lo: -2.5, hi: -1.5 }),
            w: None,
            sigma: None,
            mode: GeometryMode::ExteriorAgreement,
        };
        let d = build_grid(&cfg).unwrap();
        let w = assemble_weights(&d, 0.25).unwrap();
        (d, w)
    }

    fn random_gamma(d: &GridDomain<f64>, rng: &mut ChaCha8Rng) -> ConductivityField<f64> {
        let g = (0..d.node_count()).map(|i| if d.is_interior(i) { rng.random_range(0.5..2.0) } else { 1.0 }).collect();
        ConductivityField::new(g, 0.5).unwrap()
    }

    fn random_field(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    /// Pairwise evaluation of `B_gamma`.
    fn naive_conductivity(w: &KernelWeights<f64>, g: &[f64], u: &[f64], phi: &[f64]) -> f64 {
        let n = w.len();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += w.weight(i, j) * g[i] * g[j] * (u[i] - u[j]) * (phi[i] - phi[j]);
            }
        }
        0.5 * acc
    }

    #[test]
    fn bounds_are_enforced() {
        assert!(ConductivityField::new(vec![1.0, 0.4], 0.5).is_err());
        assert!(ConductivityField::new(vec![1.0, 2.1], 0.5).is_err());
        assert!(ConductivityField::new(vec![1.0, -1.0], 0.5).is_err());
        assert!(ConductivityField::new(vec![1.0], 1.5).is_err());
        let f = ConductivityField::new(vec![0.5, 2.0, 1.0], 0.5).unwrap();
        assert_eq!(f.deviation()[2], 0.0);
        assert_eq!(f.tightest_gamma0(), 0.5);
    }

    #[test]
    fn unit_conductivity_gives_graph_form() {
        let (d, w) = setup(0.25);
        let gamma = ConductivityField::constant(d.node_count(), 1.0, 0.5).unwrap();
        let a = assemble_conductivity_form(&w, &gamma).unwrap();
        assert_eq!(a.matrix(), &w.form_matrix());
    }

    #[test]
    fn constants_are_in_the_kernel() {
        let (d, w) = setup(0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gamma = random_gamma(&d, &mut rng);
        let a = assemble_conductivity_form(&w, &gamma).unwrap();
        let ones = vec![1.0; d.node_count()];
        let phi = random_field(d.node_count(), &mut rng);
        assert!(a.bilinear(&ones, &phi).abs() < 1e-14);
    }

    #[test]
    fn conductivity_form_matches_double_loop() {
        let (d, w) = setup(0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gamma = random_gamma(&d, &mut rng);
        let a = assemble_conductivity_form(&w, &gamma).unwrap();
        let u = random_field(d.node_count(), &mut rng);
        let phi = random_field(d.node_count(), &mut rng);
        let naive = naive_conductivity(&w, gamma.sqrt(), &u, &phi);
        assert!((a.bilinear(&u, &phi) - naive).abs() <= 1e-12 * naive.abs());
    }

    #[test]
    fn schrodinger_form_matches_pairwise_plus_pointwise() {
        let (d, w) = setup(0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_field(d.node_count(), &mut rng);
        let b = assemble_schrodinger_form(&w, &q).unwrap();
        let u = random_field(d.node_count(), &mut rng);
        let phi = random_field(d.node_count(), &mut rng);
        let naive =
            w.dirichlet_form(&u, &phi) + 0.25 * q.iter().zip(&u).zip(&phi).map(|((a, b), c)| a * b * c).sum::<f64>();
        assert!((b.bilinear(&u, &phi) - naive).abs() <= 1e-12 * naive.abs());

        let zero = assemble_schrodinger_form(&w, &vec![0.0; d.node_count()]).unwrap();
        assert_eq!(zero.matrix(), &w.form_matrix());

        let mut e = vec![0.0; d.node_count()];
        e[7] = 2.0;
        let single = b.bilinear(&e, &e);
        assert!((single - (w.dirichlet_form(&e, &e) + 0.25 * q[7] * 4.0)).abs() < 1e-12);
    }

    #[test]
    fn liouville_potential_trivial_cases() {
        let (d, w) = setup(0.25);
        let one = ConductivityField::constant(d.node_count(), 1.0, 0.5).unwrap();
        assert!(liouville_potential(&w, &one).unwrap().iter().all(|&q| q == 0.0));
        let c = ConductivityField::constant(d.node_count(), 1.7, 0.5).unwrap();
        assert!(liouville_potential(&w, &c).unwrap().iter().all(|&q| q == 0.0));
    }

    #[test]
    fn liouville_potential_of_single_bump() {
        let (d, w) = setup(0.25);
        let mut m = vec![0.0; d.node_count()];
        let k = d.omega()[3];
        m[k] = 0.2;
        let gamma = ConductivityField::from_deviation(&m, 0.5).unwrap();
        let q = liouville_potential(&w, &gamma).unwrap();
        // (L m)_k = 0.2 sum_j w_kj / h > 0, (L m)_i = -0.2 w_ik / h < 0 elsewhere
        let row: f64 = (0..d.node_count()).map(|j| w.weight(k, j)).sum();
        assert!((q[k] + 0.2 * row / 0.25 / 1.2).abs() < 1e-12 * q[k].abs());
        assert!(q[k] < 0.0);
        for (i, &qi) in q.iter().enumerate().filter(|&(i, _)| i != k) {
            assert!(qi > 0.0);
            assert!((qi - 0.2 * w.weight(i, k) / 0.25).abs() < 1e-12 * qi);
        }
    }

    #[test]
    fn liouville_identity_is_exact_and_sign_sensitive() {
        let (d, w) = setup(0.125);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let gamma = random_gamma(&d, &mut rng);
            let u = random_field(d.node_count(), &mut rng);
            let phi = random_field(d.node_count(), &mut rng);
            let r = liouville_residual(&w, &gamma, PotentialSign::Negative, &u, &phi).unwrap();
            assert!(r < 1e-12, "residual {r}");
            let scaled: Vec<f64> = u.iter().map(|x| 1e3 * x).collect();
            let r2 = liouville_residual(&w, &gamma, PotentialSign::Negative, &scaled, &phi).unwrap();
            assert!(r2 < 1e-12);
            let flipped = liouville_residual(&w, &gamma, PotentialSign::Positive, &u, &phi).unwrap();
            assert!(flipped > 1e-3, "flipped {flipped}");
        }
    }

    #[test]
    fn mismatched_weights_are_rejected() {
        let (d, w) = setup(0.25);
        let w2 = assemble_weights(&d, 0.25).unwrap();
        let gamma = ConductivityField::constant(d.node_count(), 1.0, 0.5).unwrap();
        let a = assemble_conductivity_form(&w, &gamma).unwrap();
        let b = assemble_schrodinger_form(&w2, &vec![0.0; d.node_count()]).unwrap();
        let u = vec![1.0; d.node_count()];
        assert!(matches!(verify_liouville_identity(&a, &b, &gamma, &u, &u), Err(Error::WeightsMismatch)));
    }

    #[test]
    fn exterior_problem_basic_solutions() {
        let (d, w) = setup(0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gamma = random_gamma(&d, &mut rng);
        let a = assemble_conductivity_form(&w, &gamma).unwrap();
        let c = solve_exterior_problem(&a, &d, &vec![2.5; d.node_count()]).unwrap();
        assert!(c.iter().all(|&x| (x - 2.5).abs() < 1e-12));
        let z = solve_exterior_problem(&a, &d, &vec![0.0; d.node_count()]).unwrap();
        assert!(z.iter().all(|&x| x == 0.0));

        let f = random_field(d.node_count(), &mut rng);
        let u = solve_exterior_problem(&a, &d, &f).unwrap();
        assert!(interior_residual(&a, &d, &u) < 1e-10);
        for &i in d.exterior() {
            assert_eq!(u[i], f[i]);
        }
        for &k in d.omega() {
            let mut phi = vec![0.0; d.node_count()];
            phi[k] = 1.0;
            assert!(a.bilinear(&u, &phi).abs() < 1e-12);
        }
    }

    #[test]
    fn dirichlet_margin_matches_dense_eigensolver_for_zero_potential() {
        let (d, w) = setup(0.25);
        let b = assemble_schrodinger_form(&w, &vec![0.0; d.node_count()]).unwrap();
        let margin = check_dirichlet_eigenvalue(&b, &d);
        let k = w.form_matrix();
        let om = d.omega();
        let block = DMatrix::from_fn(om.len(), om.len(), |a, c| k[(om[a], om[c])]);
        let smallest = block.symmetric_eigenvalues().min();
        assert!((margin.margin - smallest / 0.25).abs() < 1e-12 * margin.margin);
        assert!(margin.margin > 0.0 && margin.solvable());
    }

    #[test]
    fn negative_potential_crossing_zero_triggers_eigenvalue_error() {
        let (d, w) = setup(0.25);
        let n = d.node_count();
        let lowest = |c: f64| {
            let b = assemble_schrodinger_form(&w, &vec![c; n]).unwrap();
            check_dirichlet_eigenvalue(&b, &d).lowest_eigenvalue
        };
        let (mut lo, mut hi) = (-100.0, 0.0);
        assert!(lowest(lo) < 0.0 && lowest(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if lowest(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let b = assemble_schrodinger_form(&w, &vec![hi; n]).unwrap();
        assert!(!check_dirichlet_eigenvalue(&b, &d).solvable());
        let f: Vec<f64> = (0..n).map(|i| i as f64).collect();
        assert!(matches!(solve_exterior_problem(&b, &d, &f), Err(Error::DirichletEigenvalue { .. })));
    }
}
