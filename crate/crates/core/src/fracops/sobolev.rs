//! `H^t` Gram metrics of piecewise-constant nodal bases and dual norms.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::spectral::Spectrum;
use crate::error::{Error, Result};
use crate::geometry::GridDomain;
use crate::scalar::Real;

/// Gram matrix of the `H^t` inner product restricted to a node subset.
#[derive(Clone, Debug)]
pub struct SobolevMetric<T: Real> {
    order: T,
    nodes: Vec<usize>,
    gram: DMatrix<T>,
    chol: Cholesky<T, Dyn>,
}

impl<T: Real> SobolevMetric<T> {
    /// Wraps an explicit SPD matrix (used for restricted or synthetic metrics).
    pub fn from_matrix(order: T, nodes: Vec<usize>, gram: DMatrix<T>) -> Result<Self> {
        if gram.nrows() != gram.ncols() || gram.nrows() != nodes.len() {
            return Err(Error::Shape { expected: nodes.len(), got: gram.nrows() });
        }
        let chol = Cholesky::new(gram.clone())
            .ok_or_else(|| Error::NotPositiveDefinite(format!("order {order}, {} nodes", nodes.len())))?;
        Ok(SobolevMetric { order, nodes, gram, chol })
    }

    pub fn order(&self) -> T {
        self.order
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn gram(&self) -> &DMatrix<T> {
        &self.gram
    }

    /// Lower Cholesky factor `L` with `G = L L^T`.
    pub fn factor(&self) -> DMatrix<T> {
        self.chol.l()
    }

    pub fn solve(&self, p: &DVector<T>) -> DVector<T> {
        self.chol.solve(p)
    }

    /// `G^{-1} M` column by column.
    pub fn solve_matrix(&self, m: &DMatrix<T>) -> DMatrix<T> {
        self.chol.solve(m)
    }

    /// `x^T G x`.
    pub fn quadratic(&self, x: &DVector<T>) -> T {
        x.dot(&(&self.gram * x))
    }

    /// Metric restricted to a sub-list of its nodes.
    pub fn restrict(&self, nodes: &[usize]) -> Result<Self> {
        let pos: Vec<usize> = nodes
            .iter()
            .map(|n| {
                self.nodes.iter().position(|m| m == n).ok_or(Error::Config(format!("node {n} not in metric support")))
            })
            .collect::<Result<_>>()?;
        let g = DMatrix::from_fn(pos.len(), pos.len(), |a, b| self.gram[(pos[a], pos[b])]);
        Self::from_matrix(self.order, nodes.to_vec(), g)
    }

    /// Whitening `L^{-1} M`, used to map metric coordinates to Euclidean ones.
    pub fn whiten_rows(&self, m: &DMatrix<T>) -> DMatrix<T> {
        let l = self.chol.l();
        l.solve_lower_triangular(m).expect("Cholesky factor is nonsingular")
    }
}

/// Gram matrix `G_ij = <phi_i, phi_j>_{H^t}` of the nodal indicators on
/// `subset`, evaluated through the Bessel multiplier on the periodic box.
pub fn gram_matrix<T: Real>(domain: &GridDomain<T>, subset: &[usize], t: T) -> Result<SobolevMetric<T>> {
    if subset.is_empty() {
        return Err(Error::EmptyRegion("metric subset".into()));
    }
    let spectrum = Spectrum::new(domain);
    gram_matrix_with(&spectrum, domain, subset, t)
}

/// [`gram_matrix`] reusing a cached spectrum.
pub fn gram_matrix_with<T: Real>(
    spectrum: &Spectrum<T>,
    domain: &GridDomain<T>,
    subset: &[usize],
    t: T,
) -> Result<SobolevMetric<T>> {
    if subset.is_empty() {
        return Err(Error::EmptyRegion("metric subset".into()));
    }
    let vol = domain.cell_volume();
    let m = domain.per_axis();
    let n = domain.dim();
    let g = if t == T::zero() {
        DMatrix::from_diagonal_element(subset.len(), subset.len(), vol)
    } else {
        // the operator is circulant: one column determines all entries
        let kernel = spectrum.bessel_kernel(t);
        let wrap = |a: usize, b: usize| (a + m - b) % m;
        let offset = |i: usize, j: usize| {
            if n == 1 {
                wrap(i, j)
            } else {
                wrap(i / m, j / m) * m + wrap(i % m, j % m)
            }
        };
        let mut g = DMatrix::from_fn(subset.len(), subset.len(), |a, b| vol * kernel[offset(subset[a], subset[b])]);
        // exact symmetry; the kernel is even up to FFT rounding
        let gt = g.transpose();
        g += gt;
        g *= T::of(0.5);
        g
    };
    SobolevMetric::from_matrix(t, subset.to_vec(), g)
}

/// Pairing of a nodal density with the indicator basis of `subset`:
/// `p_i = h^n f_i`.
pub fn functional_covector<T: Real>(domain: &GridDomain<T>, field: &[T], subset: &[usize]) -> DVector<T> {
    let vol = domain.cell_volume();
    DVector::from_iterator(subset.len(), subset.iter().map(|&i| vol * field[i]))
}

/// Dual norm `sqrt(p^T G^{-1} p)`.
pub fn dual_norm<T: Real>(functional: &DVector<T>, metric: &SobolevMetric<T>) -> Result<T> {
    if functional.len() != metric.dim() {
        return Err(Error::Shape { expected: metric.dim(), got: functional.len() });
    }
    if functional.iter().all(|&x| x == T::zero()) {
        return Ok(T::zero());
    }
    let y = metric.solve(functional);
    Ok(functional.dot(&y).max(T::zero()).sqrt())
}
