//! Fourier multipliers on the periodic box surrogate.
//!
//! The lattice with `M` nodes per axis is treated as one period of length
//! `P = M h`; frequencies are `xi = 2 pi k / P` with `k` in the symmetric
//! range (M is odd, so there is no Nyquist ambiguity).

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::geometry::GridDomain;
use crate::scalar::Real;

/// Cached FFT plans and squared frequencies for one domain.
pub struct Spectrum<T: Real> {
    dim: usize,
    per_axis: usize,
    cell_volume: T,
    xi2: Vec<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn new(domain: &GridDomain<T>) -> Self {
        let m = domain.per_axis();
        let dim = domain.dim();
        let period = T::of_usize(m) * domain.spacing();
        let two_pi = T::two_pi();
        let freq = |k: usize| -> T {
            let signed = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
            two_pi * T::of(signed) / period
        };
        let xi2 = if dim == 1 {
            (0..m).map(|k| freq(k) * freq(k)).collect()
        } else {
            (0..m * m)
                .map(|k| {
                    let (a, b) = (freq(k / m), freq(k % m));
                    a * a + b * b
                })
                .collect()
        };
        let mut planner = FftPlanner::new();
        Spectrum {
            dim,
            per_axis: m,
            cell_volume: domain.cell_volume(),
            xi2,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub fn len(&self) -> usize {
        self.xi2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi2.is_empty()
    }

    /// Squared frequency `|xi|^2` of each Fourier coefficient.
    pub fn xi_squared(&self) -> &[T] {
        &self.xi2
    }

    fn transform(&self, data: &mut [Complex<T>], inverse: bool) {
        let plan = if inverse { &self.inverse } else { &self.forward };
        let m = self.per_axis;
        // rows (last axis, contiguous)
        plan.process(data);
        if self.dim == 2 {
            let mut col = vec![Complex::new(T::zero(), T::zero()); m];
            for b in 0..m {
                for a in 0..m {
                    col[a] = data[a * m + b];
                }
                plan.process(&mut col);
                for a in 0..m {
                    data[a * m + b] = col[a];
                }
            }
        }
        if inverse {
            let norm = T::one() / T::of_usize(self.len());
            for c in data.iter_mut() {
                *c = c.scale(norm);
            }
        }
    }

    /// Applies the real even multiplier `symbol(|xi|^2)` and returns the real
    /// part of the result.
    pub fn apply<F: Fn(T) -> T>(&self, u: &[T], symbol: F) -> Result<Vec<T>> {
        if u.len() != self.len() {
            return Err(Error::Shape { expected: self.len(), got: u.len() });
        }
        let mut data: Vec<Complex<T>> = u.iter().map(|&x| Complex::new(x, T::zero())).collect();
        self.transform(&mut data, false);
        for (c, &k2) in data.iter_mut().zip(&self.xi2) {
            *c = c.scale(symbol(k2));
        }
        self.transform(&mut data, true);
        Ok(data.into_iter().map(|c| c.re).collect())
    }

    /// `(-Delta)^t` with symbol `|xi|^{2t}`; the zero mode is kept for
    /// `t = 0` and dropped otherwise.
    pub fn fractional_laplacian(&self, t: T, u: &[T]) -> Result<Vec<T>> {
        self.apply(u, |k2| {
            if t == T::zero() {
                T::one()
            } else if k2 == T::zero() {
                T::zero()
            } else {
                k2.powf(t)
            }
        })
    }

    /// Bessel potential `(1 + |xi|^2)^{t/2}`.
    pub fn bessel(&self, t: T, u: &[T]) -> Result<Vec<T>> {
        let half = t * T::of(0.5);
        self.apply(u, |k2| (T::one() + k2).powf(half))
    }

    /// `||J^t u||_{L^p}` with lattice quadrature.
    pub fn bessel_norm(&self, u: &[T], t: T, p: T) -> Result<T> {
        if u.iter().all(|&x| x == T::zero()) {
            return Ok(T::zero());
        }
        let v = self.bessel(t, u)?;
        Ok(lattice_lp_norm(&v, self.cell_volume, p))
    }

    /// Kernel of `J^{2t}` centred at the corner node: `(J^{2t} delta_0)_k`.
    pub fn bessel_kernel(&self, t: T) -> Vec<T> {
        let mut delta = vec![T::zero(); self.len()];
        delta[0] = T::one();
        self.apply(&delta, |k2| (T::one() + k2).powf(t)).expect("delta has the spectrum length")
    }
}

/// `(h^n sum |v_i|^p)^{1/p}`.
pub fn lattice_lp_norm<T: Real>(v: &[T], cell_volume: T, p: T) -> T {
    let sum = v.iter().fold(T::zero(), |acc, &x| acc + x.abs().powf(p));
    (cell_volume * sum).powf(T::one() / p)
}

/// Spectral `(-Delta)^t u` on the periodic box.
pub fn apply_spectral_laplacian<T: Real>(domain: &GridDomain<T>, t: T, u: &[T]) -> Result<Vec<T>> {
    Spectrum::new(domain).fractional_laplacian(t, u)
}

/// Bessel potential norm `||F^{-1} (1 + |xi|^2)^{t/2} F u||_{L^p}`.
pub fn bessel_norm<T: Real>(domain: &GridDomain<T>, u: &[T], t: T, p: T) -> Result<T> {
    if !(p >= T::one()) {
        return Err(Error::Config(format!("exponent p = {p} must be at least 1")));
    }
    Spectrum::new(domain).bessel_norm(u, t, p)
}
