//! Smooth field specifications and admissible conductivity pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::ConductivityField;
use crate::fracops::Spectrum;
use crate::geometry::{GeometryMode, GridDomain};
use crate::scalar::Real;

/// `height * exp(1 - 1 / (1 - |x - center|^2 / radius^2))` inside the ball,
/// zero outside. The peak value is `height`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub height: f64,
}

impl Bump {
    pub fn eval(&self, p: &[f64]) -> f64 {
        let r2: f64 =
            p.iter().zip(&self.center).map(|(x, c)| (x - c) * (x - c)).sum::<f64>() / (self.radius * self.radius);
        if r2 >= 1.0 {
            0.0
        } else {
            self.height * (1.0 - 1.0 / (1.0 - r2)).exp()
        }
    }
}

/// A constant plus a sum of bumps.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub bumps: Vec<Bump>,
}

impl FieldSpec {
    pub fn constant(value: f64) -> Self {
        FieldSpec { constant: value, bumps: Vec::new() }
    }

    pub fn bump(center: Vec<f64>, radius: f64, height: f64) -> Self {
        FieldSpec { constant: 0.0, bumps: vec![Bump { center, radius, height }] }
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        self.constant + self.bumps.iter().map(|b| b.eval(p)).sum::<f64>()
    }

    pub fn sample<T: Real>(&self, domain: &GridDomain<T>) -> Vec<T> {
        domain.sample(|p| self.eval(p))
    }
}

/// Assumption audit of a conductivity pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairAudit {
    /// (i): exterior agreement (theorem-1) or support in Sigma (theorem-2).
    pub support: bool,
    /// (ii): two-sided bound with the configured `gamma0`.
    pub bounds: bool,
    /// (iii): `||m_j||_{H^{2s+eps, n/s}} <= C1` for both deviations.
    pub regularity: bool,
    pub regularity_norms: [f64; 2],
    pub c1: f64,
    /// Smallest `gamma0` admitted by the pair.
    pub tightest_gamma0: f64,
}

/// Parameters of the regularity assumption (iii).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RegularityBound {
    pub s: f64,
    /// Extra smoothness `eps > 0` in `H^{2s+eps, n/s}`.
    pub epsilon: f64,
    pub c1: f64,
}

/// An admissible pair `gamma2 = gamma1 + eps * rho` with its audit.
#[derive(Clone, Debug)]
pub struct ConductivityPair<T: Real> {
    pub gamma1: ConductivityField<T>,
    pub gamma2: ConductivityField<T>,
    pub audit: PairAudit,
}

/// `||m||_{H^{2s+eps, n/s}}`.
pub fn regularity_norm<T: Real>(spectrum: &Spectrum<T>, n: usize, bound: &RegularityBound, m: &[T]) -> Result<f64> {
    let t = T::of(2.0 * bound.s + bound.epsilon);
    let p = T::of(n as f64 / bound.s);
    Ok(spectrum.bessel_norm(m, t, p)?.as_f64())
}

/// Builds `gamma1 = base`, `gamma2 = base + eps * rho`. Violations of
/// (i) and (ii) are rejected; (iii) is recorded in the audit only.
#[allow(clippy::too_many_arguments)]
pub fn gen_pair<T: Real>(
    domain: &GridDomain<T>,
    spectrum: &Spectrum<T>,
    base: &FieldSpec,
    profile: &FieldSpec,
    eps: f64,
    mode: GeometryMode,
    gamma0: f64,
    bound: &RegularityBound,
) -> Result<ConductivityPair<T>> {
    let g1 = base.sample(domain);
    let rho: Vec<T> = profile.sample(domain);

    let allowed: Vec<bool> = match mode {
        GeometryMode::ExteriorAgreement => (0..domain.node_count()).map(|i| domain.is_interior(i)).collect(),
        GeometryMode::CompactDifference => {
            let sigma = domain.sigma().ok_or_else(|| Error::Config("mode theorem-2 needs a sigma region".into()))?;
            let mut mask = vec![false; domain.node_count()];
            for &i in sigma {
                mask[i] = true;
            }
            mask
        }
    };
    if eps != 0.0 {
        if let Some(i) = rho.iter().enumerate().position(|(i, &r)| r != T::zero() && !allowed[i]) {
            let assumption = match mode {
                GeometryMode::ExteriorAgreement => "(i) gamma1 = gamma2 in the exterior",
                GeometryMode::CompactDifference => "(i) supp(gamma1 - gamma2) = Sigma",
            };
            return Err(Error::Assumption {
                assumption: assumption.into(),
                detail: format!("perturbation profile is nonzero at node {i} outside its admissible support"),
            });
        }
    }

    let e = T::of(eps);
    let g2: Vec<T> = g1.iter().zip(&rho).map(|(&a, &r)| a + e * r).collect();
    let g0 = T::of(gamma0);
    let gamma1 = ConductivityField::new(g1, g0)?;
    let gamma2 = ConductivityField::new(g2, g0)?;

    let n1 = regularity_norm(spectrum, domain.dim(), bound, gamma1.deviation())?;
    let n2 = regularity_norm(spectrum, domain.dim(), bound, gamma2.deviation())?;
    let audit = PairAudit {
        support: true,
        bounds: true,
        regularity: n1 <= bound.c1 && n2 <= bound.c1,
        regularity_norms: [n1, n2],
        c1: bound.c1,
        tightest_gamma0: gamma1.tightest_gamma0().min(gamma2.tightest_gamma0()).as_f64(),
    };
    Ok(ConductivityPair { gamma1, gamma2, audit })
}
