//! Regularized reconstruction of the background deviation from a partial
//! DN block, by projected gradient descent with an adjoint-state gradient.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dnmap::{dn_map, restrict_dn, DnMap};
use crate::error::{Error, Result};
use crate::forms::{assemble_conductivity_form, ConductivityField};
use crate::fracops::{KernelWeights, SobolevMetric};
use crate::geometry::GridDomain;
use crate::scalar::Real;

/// Fixed data of a reconstruction: where `m` may vary, the known
/// deviation elsewhere, the windows and the measured block.
pub struct ReconstructionProblem<'a, T: Real> {
    pub domain: &'a GridDomain<T>,
    pub weights: &'a KernelWeights<T>,
    /// Nodes carrying unknowns (Omega or Sigma).
    pub support: Vec<usize>,
    /// Deviation on all nodes; values on `support` are overwritten.
    pub background: Vec<T>,
    /// Exciting window (columns of the block).
    pub from: &'a SobolevMetric<T>,
    /// Testing window (rows of the block).
    pub to: &'a SobolevMetric<T>,
    pub measured: DMatrix<T>,
    pub gamma0: T,
}

/// Iteration controls.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ReconstructConfig {
    pub alpha: f64,
    pub max_iter: usize,
    /// Stop when the relative decrease of `J` falls below this.
    pub tol: f64,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        ReconstructConfig { alpha: 1e-4, max_iter: 200, tol: 1e-12 }
    }
}

/// One accepted iterate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IterateRecord {
    pub iter: usize,
    pub objective: f64,
    pub misfit: f64,
    pub step: f64,
    pub projected_gradient: f64,
}

/// Outcome of [`reconstruct`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Reconstruction {
    /// Estimated deviation on all nodes.
    pub m: Vec<f64>,
    /// `(1 + m)^2`.
    pub gamma: Vec<f64>,
    pub history: Vec<IterateRecord>,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub converged: bool,
    pub line_search_failed: bool,
}

/// Objective value split into its parts.
#[derive(Clone, Copy, Debug)]
pub struct Objective<T> {
    pub total: T,
    pub misfit: T,
}

impl<'a, T: Real> ReconstructionProblem<'a, T> {
    pub fn validate(&self) -> Result<()> {
        let n = self.domain.node_count();
        if self.background.len() != n {
            return Err(Error::Shape { expected: n, got: self.background.len() });
        }
        if self.measured.nrows() != self.to.dim() {
            return Err(Error::Shape { expected: self.to.dim(), got: self.measured.nrows() });
        }
        if self.measured.ncols() != self.from.dim() {
            return Err(Error::Shape { expected: self.from.dim(), got: self.measured.ncols() });
        }
        if self.support.is_empty() {
            return Err(Error::EmptyRegion("reconstruction support".into()));
        }
        Ok(())
    }

    /// Admissible range of `m` implied by the bound `gamma0`.
    pub fn bounds(&self) -> (T, T) {
        let r = self.gamma0.sqrt();
        (r - T::one(), T::one() / r - T::one())
    }

    pub fn project(&self, x: &mut [T]) {
        let (lo, hi) = self.bounds();
        for v in x.iter_mut() {
            *v = v.max(lo).min(hi);
        }
    }

    /// Full deviation from the unknowns on the support.
    pub fn field(&self, x: &[T]) -> Vec<T> {
        let mut m = self.background.clone();
        for (&i, &v) in self.support.iter().zip(x) {
            m[i] = v;
        }
        m
    }

    fn map(&self, x: &[T]) -> Result<(DnMap<T>, Vec<T>)> {
        let m = self.field(x);
        let gamma = ConductivityField::from_deviation(&m, self.gamma0)?;
        let map = dn_map(&assemble_conductivity_form(self.weights, &gamma)?, self.domain)?;
        Ok((map, m))
    }

    /// Predicted block for the unknowns `x`.
    pub fn predicted(&self, x: &[T]) -> Result<DMatrix<T>> {
        let (map, _) = self.map(x)?;
        restrict_dn(&map, self.from.nodes(), self.to.nodes())
    }

    fn misfit_of(&self, block: &DMatrix<T>) -> T {
        let r = block - &self.measured;
        let white = self.from.whiten_rows(&self.to.whiten_rows(&r).transpose());
        white.norm_squared() * T::of(0.5)
    }

    fn penalty(&self, x: &[T], x0: &[T], alpha: T) -> T {
        let sq = x.iter().zip(x0).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
        alpha * self.domain.cell_volume() * sq
    }

    /// `J(x) = 1/2 ||L_to^{-1} (B(x) - B_meas) L_from^{-T}||_F^2 + alpha ||x - x0||_{L^2}^2`.
    pub fn objective(&self, x: &[T], x0: &[T], alpha: T) -> Result<Objective<T>> {
        let misfit = self.misfit_of(&self.predicted(x)?);
        Ok(Objective { total: misfit + self.penalty(x, x0, alpha), misfit })
    }

    /// Objective and its gradient with respect to `x`.
    pub fn gradient(&self, x: &[T], x0: &[T], alpha: T) -> Result<(Objective<T>, Vec<T>)> {
        let (map, m) = self.map(x)?;
        let block = restrict_dn(&map, self.from.nodes(), self.to.nodes())?;
        let misfit = self.misfit_of(&block);
        let residual = block - &self.measured;
        // adjoint weights G_to^{-1} R G_from^{-1}
        let left = self.to.solve_matrix(&residual);
        let adjoint = self.from.solve_matrix(&left.transpose()).transpose();
        let u_to = map.solution_operator(self.domain, self.to.nodes())?;
        let u_from = map.solution_operator(self.domain, self.from.nodes())?;
        let mm = &u_to * adjoint * u_from.transpose();

        let w = self.weights.matrix();
        let n = self.domain.node_count();
        let vol = self.domain.cell_volume();
        let two_alpha_vol = T::of(2.0) * alpha * vol;
        let grad = self
            .support
            .iter()
            .zip(x.iter().zip(x0))
            .map(|(&p, (&xp, &x0p))| {
                let mut acc = T::zero();
                for l in 0..n {
                    if l == p {
                        continue;
                    }
                    let g = T::one() + m[l];
                    acc += w[(p, l)] * g * (mm[(p, p)] - mm[(p, l)] - mm[(l, p)] + mm[(l, l)]);
                }
                acc + two_alpha_vol * (xp - x0p)
            })
            .collect();
        Ok((Objective { total: misfit + self.penalty(x, x0, alpha), misfit }, grad))
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// Projected gradient descent with Barzilai-Borwein steps and a monotone
/// Armijo backtracking line search. Starts from and regularizes toward
/// `x0` (the unknowns on the support).
pub fn reconstruct<T: Real>(
    problem: &ReconstructionProblem<'_, T>,
    x0: &[T],
    config: &ReconstructConfig,
) -> Result<Reconstruction> {
    problem.validate()?;
    if !(config.alpha > 0.0) {
        return Err(Error::Config(format!("alpha = {} must be positive", config.alpha)));
    }
    if x0.len() != problem.support.len() {
        return Err(Error::Shape { expected: problem.support.len(), got: x0.len() });
    }
    let mut projected = x0.to_vec();
    problem.project(&mut projected);
    if projected != x0 {
        return Err(Error::Assumption {
            assumption: "(ii) gamma0 <= gamma <= 1/gamma0".into(),
            detail: "initial deviation violates the bound".into(),
        });
    }
    let alpha = T::of(config.alpha);
    let mut x = x0.to_vec();
    let (mut obj, mut grad) = problem.gradient(&x, x0, alpha)?;
    let initial = obj.total.as_f64();
    let pg = |x: &[T], g: &[T]| -> f64 {
        let mut trial: Vec<T> = x.iter().zip(g).map(|(&a, &b)| a - b).collect();
        problem.project(&mut trial);
        x.iter().zip(&trial).fold(0.0f64, |acc, (&a, &b)| acc.max((a - b).abs().as_f64()))
    };
    let mut history = vec![IterateRecord {
        iter: 0,
        objective: initial,
        misfit: obj.misfit.as_f64(),
        step: 0.0,
        projected_gradient: pg(&x, &grad),
    }];
    let gmax = grad.iter().fold(T::zero(), |acc, g| acc.max(g.abs()));
    let mut step = if gmax > T::zero() { T::of(1e-3) / gmax } else { T::one() };
    let mut converged = gmax == T::zero();
    let mut line_search_failed = false;

    for iter in 1..=config.max_iter {
        if converged {
            break;
        }
        let mut t = step;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let mut trial: Vec<T> = x.iter().zip(&grad).map(|(&a, &g)| a - t * g).collect();
            problem.project(&mut trial);
            let decrease =
                grad.iter().zip(x.iter().zip(&trial)).fold(T::zero(), |acc, (&g, (&a, &b))| acc + g * (a - b));
            if decrease <= T::zero() {
                converged = true;
                break;
            }
            if let Ok(o) = problem.objective(&trial, x0, alpha) {
                if o.total <= obj.total - T::of(ARMIJO) * decrease {
                    accepted = Some((trial, t));
                    break;
                }
            }
            t *= T::of(0.5);
        }
        let Some((next, t_used)) = accepted else {
            if !converged {
                line_search_failed = true;
            }
            break;
        };
        let (next_obj, next_grad) = problem.gradient(&next, x0, alpha)?;
        let (mut ss, mut sy) = (T::zero(), T::zero());
        for k in 0..x.len() {
            let sk = next[k] - x[k];
            ss += sk * sk;
            sy += sk * (next_grad[k] - grad[k]);
        }
        step = if sy > T::zero() { ss / sy } else { t_used * T::of(2.0) };
        let rel = ((obj.total - next_obj.total) / obj.total.max(T::of(f64::MIN_POSITIVE))).as_f64();
        x = next;
        obj = next_obj;
        grad = next_grad;
        history.push(IterateRecord {
            iter,
            objective: obj.total.as_f64(),
            misfit: obj.misfit.as_f64(),
            step: t_used.as_f64(),
            projected_gradient: pg(&x, &grad),
        });
        if rel <= config.tol {
            converged = true;
        }
    }

    let m: Vec<f64> = problem.field(&x).iter().map(|v| v.as_f64()).collect();
    let gamma = m.iter().map(|v| (1.0 + v) * (1.0 + v)).collect();
    Ok(Reconstruction {
        m,
        gamma,
        history,
        initial_objective: initial,
        final_objective: obj.total.as_f64(),
        converged,
        line_search_failed,
    })
}
