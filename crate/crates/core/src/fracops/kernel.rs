//! Singular-kernel quadrature weights and the graph fractional Laplacian.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::geometry::GridDomain;
use crate::scalar::Real;

/// Largest node count for which dense assembly is attempted by default.
pub const DEFAULT_NODE_CAP: usize = 8000;

/// Image shells summed explicitly for the periodic kernel (1D, 2D).
const IMAGES_1D: i64 = 64;
const IMAGES_2D: i64 = 12;

/// Checks `0 < s < min(1, n/2)`.
pub fn check_order(n: usize, s: f64) -> Result<()> {
    let max = f64::min(1.0, n as f64 / 2.0);
    if s > 0.0 && s < max && s.is_finite() {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange { s, max })
    }
}

/// Normalization `C_{n,s}` of the singular integral representation, chosen
/// so that the two-point form reproduces the Fourier multiplier `|xi|^{2s}`.
pub fn cns_constant(n: usize, s: f64) -> Result<f64> {
    check_order(n, s)?;
    let nf = n as f64;
    Ok(4f64.powf(s) * gamma(nf / 2.0 + s) * s / (std::f64::consts::PI.powf(nf / 2.0) * gamma(1.0 - s)))
}

/// Same constant evaluated through log-Gamma.
pub fn cns_constant_log(n: usize, s: f64) -> Result<f64> {
    check_order(n, s)?;
    let nf = n as f64;
    let log =
        s * 4f64.ln() + ln_gamma(nf / 2.0 + s) + s.ln() - 0.5 * nf * std::f64::consts::PI.ln() - ln_gamma(1.0 - s);
    Ok(log.exp())
}

/// How the kernel treats interactions leaving the box `[-R, R]^n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Sum the kernel over all periodic images of the box (the torus that
    /// the spectral operator lives on).
    #[default]
    Periodic,
    /// Keep only pairs of box nodes.
    Box,
}

/// Symmetric nonnegative pair weights `w_ij ~ C_{n,s} h^{2n} |x_i - x_j|^{-n-2s}`.
#[derive(Clone, Debug)]
pub struct KernelWeights<T: Real> {
    order: T,
    cns: T,
    cell_volume: T,
    truncation: Truncation,
    weights: DMatrix<T>,
    id: u64,
}

static NEXT_WEIGHTS_ID: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(1);

/// Periodized `sum_k |z + k P|^{-1-2s}` with a midpoint tail beyond `K` images.
fn image_sum_1d(z: f64, period: f64, s: f64) -> f64 {
    let e = 1.0 + 2.0 * s;
    let mut acc = 0.0;
    for k in -IMAGES_1D..=IMAGES_1D {
        let d = (z + k as f64 * period).abs();
        if d > 0.0 {
            acc += d.powf(-e);
        }
    }
    let a = (IMAGES_1D as f64 + 0.5) * period;
    acc + ((a + z).powf(-2.0 * s) + (a - z).powf(-2.0 * s)) / (2.0 * s * period)
}

/// `int_0^{pi/4} cos(theta)^{2s} dtheta`, composite Simpson.
fn square_tail_angle(s: f64) -> f64 {
    let m = 2000;
    let b = std::f64::consts::FRAC_PI_4;
    let step = b / m as f64;
    let f = |t: f64| t.cos().powf(2.0 * s);
    let mut acc = f(0.0) + f(b);
    for i in 1..m {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * step);
    }
    acc * step / 3.0
}

/// Periodized `sum_k |z + k P|^{-2-2s}` over the square lattice of images.
fn image_sum_2d(z: [f64; 2], period: f64, s: f64, tail_angle: f64) -> f64 {
    let e = 1.0 + s;
    let mut acc = 0.0;
    for a in -IMAGES_2D..=IMAGES_2D {
        let x = z[0] + a as f64 * period;
        for b in -IMAGES_2D..=IMAGES_2D {
            let y = z[1] + b as f64 * period;
            let r2 = x * x + y * y;
            if r2 > 0.0 {
                acc += r2.powf(-e);
            }
        }
    }
    // integral of |y|^{-2-2s} outside the square of half-side A, divided by P^2
    let a = (IMAGES_2D as f64 + 0.5) * period;
    acc + 8.0 * tail_angle * a.powf(-2.0 * s) / (2.0 * s * period * period)
}

/// Assembles the dense weight matrix with the default node cap and
/// periodic images.
pub fn assemble_weights<T: Real>(domain: &GridDomain<T>, s: f64) -> Result<KernelWeights<T>> {
    assemble_weights_with(domain, s, Truncation::default(), DEFAULT_NODE_CAP)
}

/// Assembles the dense weight matrix.
pub fn assemble_weights_with<T: Real>(
    domain: &GridDomain<T>,
    s: f64,
    truncation: Truncation,
    node_cap: usize,
) -> Result<KernelWeights<T>> {
    let n = domain.dim();
    let cns = cns_constant(n, s)?;
    let nodes = domain.node_count();
    if nodes > node_cap {
        return Err(Error::Capacity { nodes, cap: node_cap });
    }
    let m = domain.per_axis();
    let h = domain.spacing().as_f64();
    let period = m as f64 * h;
    let scale = cns * h.powi(2 * n as i32);

    // The kernel only depends on the per-axis lattice offset.
    let table: Vec<f64> = match (n, truncation) {
        (1, Truncation::Periodic) => (0..m)
            .into_par_iter()
            .map(|d| if d == 0 { 0.0 } else { scale * image_sum_1d(d as f64 * h, period, s) })
            .collect(),
        (1, Truncation::Box) => {
            (0..m).map(|d| if d == 0 { 0.0 } else { scale * (d as f64 * h).powf(-1.0 - 2.0 * s) }).collect()
        }
        (_, Truncation::Periodic) => {
            let tail = square_tail_angle(s);
            (0..m * m)
                .into_par_iter()
                .map(|k| {
                    let (a, b) = (k / m, k % m);
                    if a == 0 && b == 0 {
                        0.0
                    } else {
                        scale * image_sum_2d([a as f64 * h, b as f64 * h], period, s, tail)
                    }
                })
                .collect()
        }
        (_, Truncation::Box) => (0..m * m)
            .map(|k| {
                let (a, b) = ((k / m) as f64 * h, (k % m) as f64 * h);
                let r2 = a * a + b * b;
                if r2 == 0.0 {
                    0.0
                } else {
                    scale * r2.powf(-1.0 - s)
                }
            })
            .collect(),
    };

    let offset = |i: usize, j: usize| -> usize {
        if n == 1 {
            i.abs_diff(j)
        } else {
            let (ia, ib) = (i / m, i % m);
            let (ja, jb) = (j / m, j % m);
            ia.abs_diff(ja) * m + ib.abs_diff(jb)
        }
    };
    let rows: Vec<T> = (0..nodes)
        .into_par_iter()
        .flat_map_iter(|i| (0..nodes).map(move |j| (i, j)))
        .map(|(i, j)| if i == j { T::zero() } else { T::of(table[offset(i, j)]) })
        .collect();
    let weights = DMatrix::from_row_slice(nodes, nodes, &rows);

    Ok(KernelWeights {
        order: T::of(s),
        cns: T::of(cns),
        cell_volume: domain.cell_volume(),
        truncation,
        weights,
        id: NEXT_WEIGHTS_ID.fetch_add(1, std::sync::atomic::Ordering::Relaxed),
    })
}

impl<T: Real> KernelWeights<T> {
    pub fn order(&self) -> T {
        self.order
    }

    pub fn cns(&self) -> T {
        self.cns
    }

    pub fn cell_volume(&self) -> T {
        self.cell_volume
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.weights.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.nrows() == 0
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> T {
        self.weights[(i, j)]
    }

    /// Identity token used to check that two forms share one weight object.
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Stiffness matrix `K = diag(sum_j w_ij) - W` of the Dirichlet form
    /// `E(u, v) = 1/2 sum_ij w_ij (u_i - u_j)(v_i - v_j) = v^T K u`.
    pub fn form_matrix(&self) -> DMatrix<T> {
        let mut k = -self.weights.clone();
        for i in 0..self.len() {
            let row_sum = self.weights.row(i).iter().fold(T::zero(), |acc, &w| acc + w);
            k[(i, i)] = row_sum;
        }
        k
    }

    /// `E(u, v)` evaluated pairwise from differences.
    pub fn dirichlet_form(&self, u: &[T], v: &[T]) -> T {
        let n = self.len();
        let mut acc = T::zero();
        for i in 0..n {
            let mut row = T::zero();
            for j in 0..n {
                row += self.weights[(i, j)] * (u[i] - u[j]) * (v[i] - v[j]);
            }
            acc += row;
        }
        acc * T::of(0.5)
    }
}

/// `(L u)_i = sum_j w_ij (u_i - u_j) / h^n`.
pub fn apply_graph_laplacian<T: Real>(weights: &KernelWeights<T>, u: &[T]) -> Result<Vec<T>> {
    let n = weights.len();
    if u.len() != n {
        return Err(Error::Shape { expected: n, got: u.len() });
    }
    let inv_vol = T::one() / weights.cell_volume;
    let out = (0..n)
        .into_par_iter()
        .map(|i| {
            let row = weights.weights.row(i);
            let mut acc = T::zero();
            for j in 0..n {
                acc += row[j] * (u[i] - u[j]);
            }
            acc * inv_vol
        })
        .collect();
    Ok(out)
}
