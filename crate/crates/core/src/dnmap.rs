//! Exterior Dirichlet-to-Neumann maps, partial-data operator norms and the
//! identities linking the conductivity and Schrödinger maps.
//!
//! An element of the quotient space `H^s / H~^s(Omega)` is represented by
//! its exterior nodal values (the representative vanishing on `Omega`), so a
//! DN map is a square matrix over the exterior nodes: the Schur complement
//! `A_EE - A_EO A_OO^{-1} A_OE` of the form matrix.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{
    assemble_conductivity_form, assemble_schrodinger_form, liouville_potential, ConductivityField, Equation,
    NonlocalForm,
};
use crate::fracops::{KernelWeights, SobolevMetric};
use crate::geometry::GridDomain;
use crate::scalar::Real;

/// Matrix of an exterior DN map over the exterior nodal basis.
#[derive(Clone, Debug)]
pub struct DnMap<T: Real> {
    equation: Equation,
    matrix: DMatrix<T>,
    /// `A_OO^{-1} A_OE`; the interior values of the solution with exterior
    /// data `f` are `-extension * f`.
    extension: DMatrix<T>,
    exterior: Vec<usize>,
    position: Vec<Option<usize>>,
}

/// Schur complement of the form on the exterior nodes.
pub fn dn_map<T: Real>(form: &NonlocalForm<T>, domain: &GridDomain<T>) -> Result<DnMap<T>> {
    let solver = form.interior_solver(domain)?;
    let coupling = form.coupling(domain);
    let extension = solver.solve_interior(&coupling);
    let matrix = form.exterior_block(domain) - coupling.transpose() * &extension;
    Ok(DnMap {
        equation: form.equation(),
        matrix,
        extension,
        exterior: domain.exterior().to_vec(),
        position: domain.exterior_positions(),
    })
}

impl<T: Real> DnMap<T> {
    pub fn equation(&self) -> Equation {
        self.equation
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn exterior(&self) -> &[usize] {
        &self.exterior
    }

    /// Position of a global node index in the exterior basis.
    pub fn position(&self, node: usize) -> Result<usize> {
        self.position.get(node).copied().flatten().ok_or(Error::NotExterior(node))
    }

    /// Exterior coordinates of a full nodal field.
    pub fn exterior_values(&self, field: &[T]) -> DVector<T> {
        DVector::from_iterator(self.exterior.len(), self.exterior.iter().map(|&i| field[i]))
    }

    /// `<Lambda [f], [g]>` for full nodal fields (interior values ignored).
    pub fn pairing(&self, f: &[T], g: &[T]) -> T {
        let fe = self.exterior_values(f);
        let ge = self.exterior_values(g);
        ge.dot(&(&self.matrix * fe))
    }

    /// Full nodal solution with exterior data `f`.
    pub fn solution(&self, domain: &GridDomain<T>, f: &[T]) -> Vec<T> {
        let fe = self.exterior_values(f);
        let interior = -(&self.extension * fe);
        let mut u = vec![T::zero(); f.len()];
        for &i in &self.exterior {
            u[i] = f[i];
        }
        for (k, &i) in domain.omega().iter().enumerate() {
            u[i] = interior[k];
        }
        u
    }

    /// Full nodal solutions for unit exterior data at each of `sources`
    /// (one column per source node).
    pub fn solution_operator(&self, domain: &GridDomain<T>, sources: &[usize]) -> Result<DMatrix<T>> {
        let n = domain.node_count();
        let mut u = DMatrix::zeros(n, sources.len());
        for (c, &src) in sources.iter().enumerate() {
            let k = self.position(src)?;
            u[(src, c)] = T::one();
            for (r, &i) in domain.omega().iter().enumerate() {
                u[(i, c)] = -self.extension[(r, k)];
            }
        }
        Ok(u)
    }

    /// `max |Lambda - Lambda^T| / max |Lambda|`.
    pub fn asymmetry(&self) -> T {
        let scale = self.matrix.abs().max();
        let defect = (&self.matrix - self.matrix.transpose()).abs().max();
        if scale > T::zero() {
            defect / scale
        } else {
            defect
        }
    }

    /// Entrywise difference of two maps on the same exterior basis.
    pub fn difference(&self, other: &DnMap<T>) -> Result<DMatrix<T>> {
        if self.exterior != other.exterior {
            return Err(Error::Config("DN maps live on different exterior sets".into()));
        }
        Ok(&self.matrix - &other.matrix)
    }
}

/// Block of a DN-type matrix with rows on `to` and columns on `from`
/// (exciting data in `from`, testing functions in `to`).
pub fn restrict_dn<T: Real>(map: &DnMap<T>, from: &[usize], to: &[usize]) -> Result<DMatrix<T>> {
    restrict_matrix(map, map.matrix(), from, to)
}

/// [`restrict_dn`] applied to an arbitrary matrix on the exterior basis of
/// `map` (for instance a difference of two maps).
pub fn restrict_matrix<T: Real>(
    map: &DnMap<T>,
    matrix: &DMatrix<T>,
    from: &[usize],
    to: &[usize],
) -> Result<DMatrix<T>> {
    let cols: Vec<usize> = from.iter().map(|&i| map.position(i)).collect::<Result<_>>()?;
    let rows: Vec<usize> = to.iter().map(|&i| map.position(i)).collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(rows.len(), cols.len(), |a, b| matrix[(rows[a], cols[b])]))
}

/// `sup |<A f1, f2>|` over `||f_j||_{H^s} = 1` supported in the windows:
/// the largest singular value of `L2^{-1} A L1^{-T}` with `G_j = L_j L_j^T`.
pub fn dn_operator_norm<T: Real>(block: &DMatrix<T>, from: &SobolevMetric<T>, to: &SobolevMetric<T>) -> Result<T> {
    if block.nrows() != to.dim() {
        return Err(Error::Shape { expected: to.dim(), got: block.nrows() });
    }
    if block.ncols() != from.dim() {
        return Err(Error::Shape { expected: from.dim(), got: block.ncols() });
    }
    if block.iter().all(|&x| x == T::zero()) {
        return Ok(T::zero());
    }
    let left = to.whiten_rows(block);
    let both = from.whiten_rows(&left.transpose());
    Ok(both.singular_values().max())
}

/// Quotient-space pairing evaluated from a solve: `B(u_f, g)` where `g` may
/// carry arbitrary interior values.
pub fn dn_pairing_by_solution<T: Real>(form: &NonlocalForm<T>, domain: &GridDomain<T>, f: &[T], g: &[T]) -> Result<T> {
    let u = crate::forms::solve_exterior_problem(form, domain, f)?;
    Ok(form.bilinear(&u, g))
}

/// Both sides of the DN reduction identity.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DnReduction {
    /// `<(Lambda_{q1} - Lambda_{q2}) f, g>`.
    pub schrodinger_side: f64,
    /// `<(Lambda_{gamma1} - Lambda_{gamma2}) gamma1^{-1/2} f, gamma2^{-1/2} g>`.
    pub conductivity_side: f64,
    pub residual: f64,
}

fn check_support<T: Real>(field: &[T], window: &[usize], name: &str) -> Result<()> {
    let outside = field.iter().enumerate().any(|(i, &v)| v != T::zero() && window.binary_search(&i).is_err());
    if outside {
        Err(Error::Config(format!("{name} is not supported in its window")))
    } else {
        Ok(())
    }
}

/// Checks that two conductivities agree on every exterior node.
pub fn exterior_agreement<T: Real>(domain: &GridDomain<T>, a: &ConductivityField<T>, b: &ConductivityField<T>) -> bool {
    domain.exterior().iter().all(|&i| a.values()[i] == b.values()[i])
}

/// Verifies `<(Lambda_{q1}-Lambda_{q2}) f, g> = <(Lambda_{g1}-Lambda_{g2}) g1^{-1/2} f, g2^{-1/2} g>`
/// with separately computed conductivity and Schrödinger maps.
pub fn verify_dn_reduction<T: Real>(
    weights: &KernelWeights<T>,
    domain: &GridDomain<T>,
    gamma1: &ConductivityField<T>,
    gamma2: &ConductivityField<T>,
    f: &[T],
    g: &[T],
    windows: (&[usize], &[usize]),
) -> Result<DnReduction> {
    if !exterior_agreement(domain, gamma1, gamma2) {
        return Err(Error::Assumption {
            assumption: "(i) gamma1 = gamma2 in the exterior".into(),
            detail: "conductivities differ on exterior nodes".into(),
        });
    }
    check_support(f, windows.0, "f")?;
    check_support(g, windows.1, "g")?;
    dn_reduction_sides(weights, domain, gamma1, gamma2, f, g)
}

/// Evaluates both sides of the DN reduction without checking its
/// hypotheses (used for negative controls).
pub fn dn_reduction_sides<T: Real>(
    weights: &KernelWeights<T>,
    domain: &GridDomain<T>,
    gamma1: &ConductivityField<T>,
    gamma2: &ConductivityField<T>,
    f: &[T],
    g: &[T],
) -> Result<DnReduction> {
    let n = domain.node_count();
    if f.len() != n || g.len() != n {
        return Err(Error::Shape { expected: n, got: f.len().min(g.len()) });
    }
    let schr = |gamma: &ConductivityField<T>| -> Result<DnMap<T>> {
        let q = liouville_potential(weights, gamma)?;
        dn_map(&assemble_schrodinger_form(weights, &q)?, domain)
    };
    let cond = |gamma: &ConductivityField<T>| -> Result<DnMap<T>> {
        dn_map(&assemble_conductivity_form(weights, gamma)?, domain)
    };
    let (lq1, lq2) = (schr(gamma1)?, schr(gamma2)?);
    let (lg1, lg2) = (cond(gamma1)?, cond(gamma2)?);

    let a1 = lq1.pairing(f, g);
    let a2 = lq2.pairing(f, g);
    let schrodinger_side = a1 - a2;

    let fs: Vec<T> = f.iter().zip(gamma1.sqrt()).map(|(&x, &s)| x / s).collect();
    let gs: Vec<T> = g.iter().zip(gamma2.sqrt()).map(|(&x, &s)| x / s).collect();
    let conductivity_side = lg1.pairing(&fs, &gs) - lg2.pairing(&fs, &gs);

    let scale =
        a1.abs().max(a2.abs()).max(schrodinger_side.abs()).max(conductivity_side.abs()).max(T::of(f64::MIN_POSITIVE));
    Ok(DnReduction {
        schrodinger_side: schrodinger_side.as_f64(),
        conductivity_side: conductivity_side.as_f64(),
        residual: ((schrodinger_side - conductivity_side).abs() / scale).as_f64(),
    })
}

/// Terms of the Alessandrini splitting formula.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AlessandriniGap {
    /// `int_W (q1 - q2) f1 f2`.
    pub lhs: f64,
    /// `<(Lambda_{q1} - Lambda_{q2}) f1, f2>`.
    pub dn_term: f64,
    /// `int_Omega (q1 - q2) u1 u2`.
    pub interior_term: f64,
    /// `dn_term - interior_term`.
    pub rhs: f64,
    pub residual: f64,
}

/// Evaluates both sides of the Alessandrini splitting formula for exterior
/// data supported in `window`.
pub fn alessandrini_gap<T: Real>(
    weights: &KernelWeights<T>,
    domain: &GridDomain<T>,
    q1: &[T],
    q2: &[T],
    f1: &[T],
    f2: &[T],
    window: &[usize],
) -> Result<AlessandriniGap> {
    check_support(f1, window, "f1")?;
    check_support(f2, window, "f2")?;
    let form1 = assemble_schrodinger_form(weights, q1)?;
    let form2 = assemble_schrodinger_form(weights, q2)?;
    let map1 = dn_map(&form1, domain)?;
    let map2 = dn_map(&form2, domain)?;
    let u1 = map1.solution(domain, f1);
    let u2 = map2.solution(domain, f2);
    let vol = domain.cell_volume();

    let lhs = window.iter().fold(T::zero(), |acc, &i| acc + (q1[i] - q2[i]) * f1[i] * f2[i]) * vol;
    let dn_term = map1.pairing(f1, f2) - map2.pairing(f1, f2);
    let interior_term = domain.omega().iter().fold(T::zero(), |acc, &i| acc + (q1[i] - q2[i]) * u1[i] * u2[i]) * vol;
    let rhs = dn_term - interior_term;
    let scale = lhs.abs().max(dn_term.abs()).max(interior_term.abs()).max(T::of(f64::MIN_POSITIVE));
    Ok(AlessandriniGap {
        lhs: lhs.as_f64(),
        dn_term: dn_term.as_f64(),
        interior_term: interior_term.as_f64(),
        rhs: rhs.as_f64(),
        residual: ((lhs - rhs).abs() / scale).as_f64(),
    })
}

/// Lower bound of the Sobolev multiplier norm with its maximizing pair.
#[derive(Clone, Debug)]
pub struct MultiplierNorm<T: Real> {
    pub value: T,
    pub u1: DVector<T>,
    pub u2: DVector<T>,
}

/// Minimum number of random starts used by [`multiplier_norm`].
pub const MULTIPLIER_STARTS: usize = 20;

/// `sup |<f, u1 u2>|` over `||u_j||_G = 1` supported in the window, by
/// alternating maximization from several random starts. The result is a
/// certified lower bound: it is attained by the returned pair.
pub fn multiplier_norm<T: Real>(
    qdiff: &[T],
    window: &[usize],
    metric: &SobolevMetric<T>,
    cell_volume: T,
    seed: u64,
) -> Result<MultiplierNorm<T>> {
    if metric.nodes() != window {
        return Err(Error::Config("metric is not defined on the multiplier window".into()));
    }
    let k = window.len();
    let weights = DVector::from_iterator(k, window.iter().map(|&i| cell_volume * qdiff[i]));
    let normalize = |v: DVector<T>| -> DVector<T> {
        let n = metric.quadratic(&v).sqrt();
        if n > T::zero() {
            v / n
        } else {
            v
        }
    };
    let apply = |v: &DVector<T>| -> DVector<T> { normalize(metric.solve(&weights.component_mul(v))) };
    let value = |a: &DVector<T>, b: &DVector<T>| weights.component_mul(a).dot(b).abs();

    let mut best = MultiplierNorm { value: T::zero(), u1: DVector::zeros(k), u2: DVector::zeros(k) };
    if weights.iter().all(|&x| x == T::zero()) {
        return Ok(best);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = T::of(1e-13);
    for _ in 0..MULTIPLIER_STARTS {
        let start = DVector::from_fn(k, |_, _| T::of(rng.random_range(-1.0..1.0)));
        let mut u1 = normalize(start);
        let mut u2 = apply(&u1);
        let mut current = value(&u1, &u2);
        for _ in 0..1000 {
            u1 = apply(&u2);
            u2 = apply(&u1);
            let next = value(&u1, &u2);
            let done = (next - current).abs() <= tol * next;
            current = next;
            if done {
                break;
            }
        }
        if current > best.value {
            best = MultiplierNorm { value: current, u1, u2 };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::solve_exterior_problem;
    use crate::fracops::{assemble_weights, gram_matrix};
    use crate::geometry::{build_grid, DomainConfig, GeometryMode, ShapeSpec};

    fn setup() -> (GridDomain<f64>, KernelWeights<f64>) {
        let cfg = DomainConfig {
            n: 1,
            half_width: 4.0,
            h: 0.25,
            omega: ShapeSpec::Interval { lo: -1.0, hi: 1.0 },
            w1: ShapeSpec::Interval { lo: 1.5, hi: 2.6 },
            w2: Some(ShapeSpec::Interval { lo: -2.6, hi: -1.5 }),
            w: None,
            sigma: None,
            mode: GeometryMode::ExteriorAgreement,
        };
        let d = build_grid(&cfg).unwrap();
        let w = assemble_weights(&d, 0.25).unwrap();
        (d, w)
    }

    fn bumpy_gamma(d: &GridDomain<f64>, amp: f64) -> ConductivityField<f64> {
        let g = d.sample(|p| if p[0].abs() < 1.0 { 1.0 + amp * (1.0 - p[0] * p[0]) } else { 1.0 });
        ConductivityField::new(g, 0.5).unwrap()
    }

    #[test]
    fn unit_conductivity_map_equals_free_schrodinger_map() {
        let (d, w) = setup();
        let one = ConductivityField::constant(d.node_count(), 1.0, 0.5).unwrap();
        let a = dn_map(&assemble_conductivity_form(&w, &one).unwrap(), &d).unwrap();
        let b = dn_map(&assemble_schrodinger_form(&w, &vec![0.0; d.node_count()]).unwrap(), &d).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn conductivity_map_is_symmetric_positive_and_kills_constants() {
        let (d, w) = setup();
        let gamma = bumpy_gamma(&d, 0.6);
        let map = dn_map(&assemble_conductivity_form(&w, &gamma).unwrap(), &d).unwrap();
        assert!(map.asymmetry() < 1e-12);
        let ones = DVector::from_element(map.exterior().len(), 1.0);
        let image = map.matrix() * ones;
        assert!(image.amax() < 1e-12 * map.matrix().amax());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let f: Vec<f64> = (0..d.node_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert!(map.pairing(&f, &f) >= 0.0);
        }
    }

    #[test]
    fn restriction_cases() {
        let (d, w) = setup();
        let gamma = bumpy_gamma(&d, 0.3);
        let map = dn_map(&assemble_conductivity_form(&w, &gamma).unwrap(), &d).unwrap();
        let all = restrict_dn(&map, d.exterior(), d.exterior()).unwrap();
        assert_eq!(&all, map.matrix());
        let (a, b) = (d.w1()[0], d.w2()[1]);
        let single = restrict_dn(&map, &[a], &[b]).unwrap();
        assert_eq!(single[(0, 0)], map.matrix()[(map.position(b).unwrap(), map.position(a).unwrap())]);
        let forward = restrict_dn(&map, d.w1(), d.w2()).unwrap();
        let backward = restrict_dn(&map, d.w2(), d.w1()).unwrap();
        assert!((forward.transpose() - backward).amax() < 1e-12 * map.matrix().amax());
        assert!(matches!(restrict_dn(&map, &[d.omega()[0]], d.w2()), Err(Error::NotExterior(_))));
    }

    #[test]
    fn operator_norm_closed_forms() {
        let g1 = SobolevMetric::<f64>::from_matrix(0.0, vec![0], DMatrix::from_element(1, 1, 4.0)).unwrap();
        let g2 = SobolevMetric::from_matrix(0.0, vec![1], DMatrix::from_element(1, 1, 9.0)).unwrap();
        let a = DMatrix::from_element(1, 1, -3.0);
        assert!((dn_operator_norm(&a, &g1, &g2).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(dn_operator_norm(&DMatrix::zeros(1, 1), &g1, &g2).unwrap(), 0.0);
        assert!(dn_operator_norm(&DMatrix::zeros(2, 1), &g1, &g2).is_err());
    }

    #[test]
    fn gauge_invariance_of_the_quotient_pairing() {
        let (d, w) = setup();
        let gamma = bumpy_gamma(&d, 0.4);
        let form = assemble_conductivity_form(&w, &gamma).unwrap();
        let map = dn_map(&form, &d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let f: Vec<f64> =
            (0..d.node_count()).map(|i| if d.is_interior(i) { 0.0 } else { rng.random_range(-1.0..1.0) }).collect();
        let g: Vec<f64> =
            (0..d.node_count()).map(|i| if d.is_interior(i) { 0.0 } else { rng.random_range(-1.0..1.0) }).collect();
        let reference = map.pairing(&f, &g);
        let g_shifted: Vec<f64> = g
            .iter()
            .enumerate()
            .map(|(i, &v)| if d.is_interior(i) { rng.random_range(-5.0..5.0) } else { v })
            .collect();
        let f_shifted: Vec<f64> = f
            .iter()
            .enumerate()
            .map(|(i, &v)| if d.is_interior(i) { rng.random_range(-5.0..5.0) } else { v })
            .collect();
        let by_solve = dn_pairing_by_solution(&form, &d, &f_shifted, &g_shifted).unwrap();
        assert!((reference - by_solve).abs() < 1e-10 * reference.abs().max(1e-12));
        let u = solve_exterior_problem(&form, &d, &f).unwrap();
        let v = map.solution(&d, &f);
        for (a, b) in u.iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dn_reduction_holds_and_needs_exterior_agreement() {
        let (d, w) = setup();
        let g1 = bumpy_gamma(&d, 0.5);
        let g2 = bumpy_gamma(&d, -0.3);
        let f = d.sample_on(d.w1(), |p| p[0] - 1.0);
        let g = d.sample_on(d.w2(), |_| 1.0);
        let r = verify_dn_reduction(&w, &d, &g1, &g2, &f, &g, (d.w1(), d.w2())).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
        assert!(r.schrodinger_side.abs() > 0.0);

        let same = verify_dn_reduction(&w, &d, &g1, &g1, &f, &g, (d.w1(), d.w2())).unwrap();
        assert_eq!(same.schrodinger_side, 0.0);
        assert_eq!(same.conductivity_side, 0.0);

        let f3: Vec<f64> = f.iter().map(|x| 3.0 * x).collect();
        let scaled = verify_dn_reduction(&w, &d, &g1, &g2, &f3, &g, (d.w1(), d.w2())).unwrap();
        assert!((scaled.schrodinger_side - 3.0 * r.schrodinger_side).abs() < 1e-12 * scaled.schrodinger_side.abs());
        assert!(scaled.residual < 1e-10);

        let mut off = g2.values().to_vec();
        off[d.w1()[0]] = 1.3;
        let g2_off = ConductivityField::new(off, 0.5).unwrap();
        assert!(matches!(
            verify_dn_reduction(&w, &d, &g1, &g2_off, &f, &g, (d.w1(), d.w2())),
            Err(Error::Assumption { .. })
        ));
    }

    #[test]
    fn alessandrini_identity_cases() {
        let (d, w) = setup();
        let window = crate::geometry::union(d.w1(), d.w2());
        let q1 = d.sample(|p| 0.5 * (-(p[0] * p[0])).exp() + if p[0] > 1.6 { 0.3 } else { 0.0 });
        let q2 = d.sample(|p| 0.2 * p[0].cos().abs());
        let f1 = d.sample_on(d.w1(), |_| 1.0);
        let f2 = d.sample_on(&window, |p| p[0]);
        let gap = alessandrini_gap(&w, &d, &q1, &q2, &f1, &f2, &window).unwrap();
        assert!(gap.residual < 1e-10, "{gap:?}");

        let same = alessandrini_gap(&w, &d, &q1, &q1, &f1, &f2, &window).unwrap();
        assert_eq!(same.lhs, 0.0);
        assert_eq!(same.rhs, 0.0);

        let inside = d.sample(|p| if p[0].abs() < 1.0 { 0.7 } else { 0.0 });
        let gap = alessandrini_gap(&w, &d, &inside, &vec![0.0; d.node_count()], &f1, &f2, &window).unwrap();
        assert_eq!(gap.lhs, 0.0);
        assert!((gap.dn_term - gap.interior_term).abs() < 1e-10 * gap.dn_term.abs());
    }

    #[test]
    fn multiplier_norm_trivial_cases() {
        let (d, _) = setup();
        let window = vec![d.w1()[0]];
        let metric = gram_matrix(&d, &window, 0.25).unwrap();
        let zero = multiplier_norm(&vec![0.0; d.node_count()], &window, &metric, 0.25, 1).unwrap();
        assert_eq!(zero.value, 0.0);
        let q = d.sample(|_| -2.0);
        let single = multiplier_norm(&q, &window, &metric, 0.25, 1).unwrap();
        let expected = 0.25 * 2.0 / metric.gram()[(0, 0)];
        assert!((single.value - expected).abs() < 1e-12 * expected);
    }
}
