//! Quantitative unique continuation probe: a field supported away from a
//! window against the dual norm of its fractional Laplacian on the window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::{apply_graph_laplacian, dual_norm, functional_covector, KernelWeights, SobolevMetric, Spectrum};
use crate::geometry::GridDomain;
use crate::scalar::Real;

/// One probe evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UcpRecord {
    /// Distance between `supp v` and the window.
    pub distance: f64,
    /// `||v||_{H^{s'}}`.
    pub lhs: f64,
    /// `||(-Delta)^s v||_{H^{-s}(W')}`.
    pub rhs: f64,
    /// `||v||_{H^s}`.
    pub hs_norm: f64,
    pub energy: f64,
}

/// Evaluates both sides of the unique-continuation inequality. The metric
/// defines the window `W'` (its nodes) and must have order `s`.
pub fn ucp_probe<T: Real>(
    domain: &GridDomain<T>,
    weights: &KernelWeights<T>,
    spectrum: &Spectrum<T>,
    window: &SobolevMetric<T>,
    v: &[T],
    s_prime: f64,
    energy: f64,
) -> Result<UcpRecord> {
    let s = weights.order();
    if !(T::of(s_prime) < s) {
        return Err(Error::Config(format!("s' = {s_prime} must be below s = {s}")));
    }
    if window.order() != s {
        return Err(Error::Config("window metric order differs from the operator order".into()));
    }
    if let Some(&i) = window.nodes().iter().find(|&&i| v[i] != T::zero()) {
        return Err(Error::Assumption {
            assumption: "supp(v) disjoint from W'".into(),
            detail: format!("v is nonzero at window node {i}"),
        });
    }
    let two = T::of(2.0);
    let hs_norm = spectrum.bessel_norm(v, s, two)?.as_f64();
    if hs_norm > energy {
        return Err(Error::Assumption {
            assumption: "||v||_{H^s} <= E".into(),
            detail: format!("{hs_norm:e} > E = {energy:e}"),
        });
    }
    let support: Vec<usize> = (0..v.len()).filter(|&i| v[i] != T::zero()).collect();
    let distance =
        if support.is_empty() { f64::INFINITY } else { domain.set_distance(&support, window.nodes()).as_f64() };
    let lv = apply_graph_laplacian(weights, v)?;
    let rhs = dual_norm(&functional_covector(domain, &lv, window.nodes()), window)?.as_f64();
    let lhs = spectrum.bessel_norm(v, T::of(s_prime), two)?.as_f64();
    Ok(UcpRecord { distance, lhs, rhs, hs_norm, energy })
}

/// Envelope `(C, sigma)` of `lhs <= C E log(C E / rhs)^{-sigma}` over a family.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct UcpEnvelope {
    pub c: f64,
    pub sigma: f64,
    /// Every record satisfies the inequality with the reported constants.
    pub covered: bool,
}

fn ucp_bound(c: f64, sigma: f64, r: &UcpRecord) -> f64 {
    let arg = c * r.energy / r.rhs;
    if arg <= 1.0 {
        f64::INFINITY
    } else {
        c * r.energy * arg.ln().powf(-sigma)
    }
}

/// Fits the exponent on `x = rhs/E`, `y = lhs/E` in log coordinates and
/// then searches the smallest `C >= 1` covering the family.
pub fn ucp_envelope(records: &[UcpRecord]) -> Result<UcpEnvelope> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.lhs > 0.0 && r.rhs > 0.0 && r.rhs < r.energy)
        .map(|r| (r.rhs / r.energy, r.lhs / r.energy))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData("unique-continuation envelope needs two nontrivial records".into()));
    }
    let sigma = super::fit::fit_log(&pts)?.sigma.max(0.0);
    let covers = |c: f64| records.iter().all(|r| r.lhs == 0.0 || r.lhs <= ucp_bound(c, sigma, r));
    let mut hi = 1.0;
    while !covers(hi) && hi < 1e300 {
        hi *= 2.0;
    }
    let mut lo = if hi == 1.0 { 1.0 } else { hi / 2.0 };
    if hi > 1.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if covers(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    Ok(UcpEnvelope { c: hi, sigma, covered: covers(hi) })
}
