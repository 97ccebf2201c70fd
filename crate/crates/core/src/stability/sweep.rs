//! Amplitude sweeps over admissible pairs and the partial-data reduction
//! inequality.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::{gen_pair, FieldSpec, RegularityBound};
use crate::dnmap::{dn_map, dn_operator_norm, restrict_matrix, DnMap};
use crate::error::{Error, Result};
use crate::forms::{assemble_conductivity_form, assemble_schrodinger_form, liouville_potential, ConductivityField};
use crate::fracops::{
    assemble_weights, dual_norm, functional_covector, gram_matrix_with, lattice_lp_norm, KernelWeights, SobolevMetric,
    Spectrum,
};
use crate::geometry::{validate_geometry, GeometryMode, GridDomain};
use crate::scalar::Real;

/// Parameters of a stability sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepConfig {
    pub mode: GeometryMode,
    /// Amplitudes `eps` of `gamma2 = gamma1 + eps * rho`.
    pub amplitudes: Vec<f64>,
    /// `gamma1`.
    pub base: FieldSpec,
    /// `rho`.
    pub profile: FieldSpec,
    pub gamma0: f64,
    /// Extra smoothness in assumption (iii).
    #[serde(default = "default_reg_eps")]
    pub regularity_eps: f64,
    /// `C1` in assumption (iii).
    #[serde(default = "default_c1")]
    pub c1: f64,
    /// Interpolation exponent of the partial-data reduction, `s/n < theta0 < 1`.
    pub theta0: f64,
    /// Exponent of the `L^p` distance, `1 <= p < 2n/(n-2s)`.
    pub p: f64,
    /// Order `s' < s` of the unique-continuation probe.
    pub s_prime: f64,
}

fn default_reg_eps() -> f64 {
    0.1
}

fn default_c1() -> f64 {
    10.0
}

impl SweepConfig {
    /// Checks the parameter ranges for order `s` in dimension `n`.
    pub fn validate(&self, n: usize, s: f64) -> Result<()> {
        let nf = n as f64;
        if !(self.theta0 > s / nf && self.theta0 < 1.0) {
            return Err(Error::Config(format!("theta0 = {} must lie in (s/n, 1) = ({}, 1)", self.theta0, s / nf)));
        }
        let p_max = 2.0 * nf / (nf - 2.0 * s);
        if !(self.p >= 1.0 && self.p < p_max) {
            return Err(Error::Config(format!("p = {} must lie in [1, {p_max})", self.p)));
        }
        if !(self.s_prime < s) {
            return Err(Error::Config(format!("s' = {} must be below s = {s}", self.s_prime)));
        }
        if !(self.gamma0 > 0.0 && self.gamma0 < 1.0) {
            return Err(Error::Config(format!("gamma0 = {} must lie in (0, 1)", self.gamma0)));
        }
        if !(self.regularity_eps > 0.0) || !(self.c1 > 0.0) {
            return Err(Error::Config("regularity bound needs eps > 0 and C1 > 0".into()));
        }
        if self.amplitudes.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::Config("amplitudes must be finite and nonnegative".into()));
        }
        Ok(())
    }

    pub fn regularity(&self, s: f64) -> RegularityBound {
        RegularityBound { s, epsilon: self.regularity_eps, c1: self.c1 }
    }
}

/// One observation of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityRecord {
    pub eps: f64,
    /// Data gap in the norm of the selected theorem: `W1 -> W2*` (theorem-1)
    /// or `W -> W*` (theorem-2).
    pub delta: f64,
    /// `||Lambda_g1 - Lambda_g2||_{W -> W*}`.
    pub delta_w: f64,
    /// `||g1 - g2||_{H^s}` (full-space norm of the difference).
    pub d_hs: f64,
    /// `||g1 - g2||_{L^p}`.
    pub d_lp: f64,
    /// `||g1^{1/2} - g2^{1/2}||_{H^s}`.
    pub d_sqrt_hs: f64,
    /// `||Lambda_q1 - Lambda_q2||_{W1 -> W2*}`.
    pub q_gap: f64,
    /// `||q1 - q2||_{H^{-s}(W)}`.
    pub q_dual: f64,
    pub support_ok: bool,
    pub bounds_ok: bool,
    pub regularity_ok: bool,
    pub solver_ok: bool,
    pub note: String,
}

impl StabilityRecord {
    /// A record carrying only the fitted quantities (used for synthetic data).
    pub fn observation(eps: f64, delta: f64, d_hs: f64, d_lp: f64, q_dual: f64) -> Self {
        StabilityRecord {
            eps,
            delta,
            delta_w: delta,
            d_hs,
            d_lp,
            d_sqrt_hs: d_hs,
            q_gap: 0.0,
            q_dual,
            support_ok: true,
            bounds_ok: true,
            regularity_ok: true,
            solver_ok: true,
            note: String::new(),
        }
    }

    fn failed(eps: f64, error: &Error) -> Self {
        let mut r = Self::observation(eps, f64::NAN, f64::NAN, f64::NAN, f64::NAN);
        r.delta_w = f64::NAN;
        r.d_sqrt_hs = f64::NAN;
        r.q_gap = f64::NAN;
        r.solver_ok = false;
        if let Error::Assumption { assumption, .. } = error {
            if assumption.starts_with("(i)") {
                r.support_ok = false;
            } else if assumption.starts_with("(ii)") {
                r.bounds_ok = false;
            }
        }
        r.note = error.to_string();
        r
    }
}

/// Shared discretization used by every member of a sweep.
pub struct SweepContext<T: Real> {
    pub domain: GridDomain<T>,
    pub weights: KernelWeights<T>,
    pub spectrum: Spectrum<T>,
    pub s: f64,
    pub g1: SobolevMetric<T>,
    pub g2: SobolevMetric<T>,
    pub gw: SobolevMetric<T>,
}

impl<T: Real> SweepContext<T> {
    pub fn new(domain: GridDomain<T>, s: f64) -> Result<Self> {
        let weights = assemble_weights(&domain, s)?;
        Self::with_weights(domain, weights)
    }

    pub fn with_weights(domain: GridDomain<T>, weights: KernelWeights<T>) -> Result<Self> {
        let spectrum = Spectrum::new(&domain);
        let s = weights.order().as_f64();
        let t = T::of(s);
        let g1 = gram_matrix_with(&spectrum, &domain, domain.w1(), t)?;
        let g2 = gram_matrix_with(&spectrum, &domain, domain.w2(), t)?;
        let gw = gram_matrix_with(&spectrum, &domain, domain.window(), t)?;
        Ok(SweepContext { domain, weights, spectrum, s, g1, g2, gw })
    }

    fn conductivity_map(&self, gamma: &ConductivityField<T>) -> Result<DnMap<T>> {
        dn_map(&assemble_conductivity_form(&self.weights, gamma)?, &self.domain)
    }

    fn schrodinger_map(&self, q: &[T]) -> Result<DnMap<T>> {
        dn_map(&assemble_schrodinger_form(&self.weights, q)?, &self.domain)
    }
}

/// Operator maps of one conductivity, reused across a family.
struct Reference<T: Real> {
    gamma: ConductivityField<T>,
    q: Vec<T>,
    cond: DnMap<T>,
    schr: DnMap<T>,
}

impl<T: Real> Reference<T> {
    fn new(ctx: &SweepContext<T>, gamma: ConductivityField<T>) -> Result<Self> {
        let q = liouville_potential(&ctx.weights, &gamma)?;
        let cond = ctx.conductivity_map(&gamma)?;
        let schr = ctx.schrodinger_map(&q)?;
        Ok(Reference { gamma, q, cond, schr })
    }
}

fn pair_norm<T: Real>(
    map: &DnMap<T>,
    diff: &DMatrix<T>,
    from: &SobolevMetric<T>,
    to: &SobolevMetric<T>,
) -> Result<f64> {
    let block = restrict_matrix(map, diff, from.nodes(), to.nodes())?;
    Ok(dn_operator_norm(&block, from, to)?.as_f64())
}

fn measure<T: Real>(
    ctx: &SweepContext<T>,
    mode: GeometryMode,
    p: f64,
    first: &Reference<T>,
    second: &Reference<T>,
) -> Result<[f64; 7]> {
    let dg = first.cond.difference(&second.cond)?;
    let dq = first.schr.difference(&second.schr)?;
    let delta_12 = pair_norm(&first.cond, &dg, &ctx.g1, &ctx.g2)?;
    let delta_w = pair_norm(&first.cond, &dg, &ctx.gw, &ctx.gw)?;
    let q_gap = pair_norm(&first.schr, &dq, &ctx.g1, &ctx.g2)?;
    let delta = match mode {
        GeometryMode::ExteriorAgreement => delta_12,
        GeometryMode::CompactDifference => delta_w,
    };
    let t = T::of(ctx.s);
    let diff: Vec<T> = first.gamma.values().iter().zip(second.gamma.values()).map(|(&a, &b)| a - b).collect();
    let sdiff: Vec<T> = first.gamma.sqrt().iter().zip(second.gamma.sqrt()).map(|(&a, &b)| a - b).collect();
    let d_hs = ctx.spectrum.bessel_norm(&diff, t, T::of(2.0))?.as_f64();
    let d_sqrt_hs = ctx.spectrum.bessel_norm(&sdiff, t, T::of(2.0))?.as_f64();
    let d_lp = lattice_lp_norm(&diff, ctx.domain.cell_volume(), T::of(p)).as_f64();
    let qd: Vec<T> = first.q.iter().zip(&second.q).map(|(&a, &b)| a - b).collect();
    let q_dual = dual_norm(&functional_covector(&ctx.domain, &qd, ctx.gw.nodes()), &ctx.gw)?.as_f64();
    Ok([delta, delta_w, d_hs, d_lp, d_sqrt_hs, q_gap, q_dual])
}

/// Runs the sweep. Members are computed in parallel; records come back
/// sorted by amplitude. A member whose pair is inadmissible or whose solve
/// fails is returned flagged rather than aborting the sweep.
pub fn stability_sweep<T: Real>(ctx: &SweepContext<T>, config: &SweepConfig) -> Result<Vec<StabilityRecord>> {
    let n = ctx.domain.dim();
    config.validate(n, ctx.s)?;
    let audit = validate_geometry(&ctx.domain, config.mode);
    if !audit.passed {
        let names: Vec<&str> = audit.failures().map(|f| f.hypothesis.as_str()).collect();
        return Err(Error::Config(format!("geometry fails for the selected mode: {}", names.join("; "))));
    }
    let bound = config.regularity(ctx.s);
    let base =
        gen_pair(&ctx.domain, &ctx.spectrum, &config.base, &config.profile, 0.0, config.mode, config.gamma0, &bound)?;
    let reference = Reference::new(ctx, base.gamma1)?;

    let mut records: Vec<StabilityRecord> = config
        .amplitudes
        .par_iter()
        .map(|&eps| {
            let attempt = || -> Result<StabilityRecord> {
                let pair = gen_pair(
                    &ctx.domain,
                    &ctx.spectrum,
                    &config.base,
                    &config.profile,
                    eps,
                    config.mode,
                    config.gamma0,
                    &bound,
                )?;
                let other = Reference::new(ctx, pair.gamma2)?;
                let [delta, delta_w, d_hs, d_lp, d_sqrt_hs, q_gap, q_dual] =
                    measure(ctx, config.mode, config.p, &reference, &other)?;
                Ok(StabilityRecord {
                    eps,
                    delta,
                    delta_w,
                    d_hs,
                    d_lp,
                    d_sqrt_hs,
                    q_gap,
                    q_dual,
                    support_ok: pair.audit.support,
                    bounds_ok: pair.audit.bounds,
                    regularity_ok: pair.audit.regularity,
                    solver_ok: true,
                    note: if pair.audit.regularity {
                        String::new()
                    } else {
                        format!(
                            "(iii) exceeded: norms {:.3e}, {:.3e} > C1 = {}",
                            pair.audit.regularity_norms[0], pair.audit.regularity_norms[1], pair.audit.c1
                        )
                    },
                })
            };
            attempt().unwrap_or_else(|e| StabilityRecord::failed(eps, &e))
        })
        .collect();
    records.sort_by(|a, b| a.eps.total_cmp(&b.eps));
    Ok(records)
}

/// Both sides of the partial-data reduction inequality for one pair.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PartialReduction {
    /// `||Lambda_q1 - Lambda_q2||_{W1,W2}` from the Schrödinger maps.
    pub lhs: f64,
    /// The same norm through the conductivity maps and the DN reduction.
    pub lhs_via_conductivity: f64,
    /// `||Lambda_g1 - Lambda_g2||_W`.
    pub delta_w: f64,
    /// `t + t^{(1 - theta0)/2}` with `t = delta_w`.
    pub rhs: f64,
}

/// `t + t^{(1-theta0)/2}`.
pub fn reduction_rhs(t: f64, theta0: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t + t.powf((1.0 - theta0) / 2.0)
    }
}

/// Evaluates the partial-data reduction for a pair agreeing on `W`.
pub fn check_partial_reduction<T: Real>(
    ctx: &SweepContext<T>,
    gamma1: &ConductivityField<T>,
    gamma2: &ConductivityField<T>,
    theta0: f64,
) -> Result<PartialReduction> {
    let window = ctx.domain.window();
    let nested = ctx.domain.w1().iter().chain(ctx.domain.w2()).all(|i| window.binary_search(i).is_ok());
    if !nested {
        return Err(Error::Config("W1 and W2 must be contained in W".into()));
    }
    if window.iter().any(|&i| gamma1.values()[i] != gamma2.values()[i]) {
        return Err(Error::Assumption {
            assumption: "gamma1 = gamma2 in W".into(),
            detail: "conductivities differ on the window".into(),
        });
    }
    let a = Reference::new(ctx, gamma1.clone())?;
    let b = Reference::new(ctx, gamma2.clone())?;
    let dq = a.schr.difference(&b.schr)?;
    let dg = a.cond.difference(&b.cond)?;
    let lhs = pair_norm(&a.schr, &dq, &ctx.g1, &ctx.g2)?;
    let delta_w = pair_norm(&a.cond, &dg, &ctx.gw, &ctx.gw)?;

    // DN reduction: the Schrödinger block equals the conductivity block
    // scaled by gamma^{-1/2} on both windows
    let block = restrict_matrix(&a.cond, &dg, ctx.g1.nodes(), ctx.g2.nodes())?;
    let (w1, w2) = (ctx.g1.nodes(), ctx.g2.nodes());
    let scaled = DMatrix::from_fn(block.nrows(), block.ncols(), |r, c| {
        block[(r, c)] / (gamma2.sqrt()[w2[r]] * gamma1.sqrt()[w1[c]])
    });
    let lhs_via_conductivity = dn_operator_norm(&scaled, &ctx.g1, &ctx.g2)?.as_f64();
    Ok(PartialReduction { lhs, lhs_via_conductivity, delta_w, rhs: reduction_rhs(delta_w, theta0) })
}

/// Smallest `C` with `lhs <= C * rhs` over a family. Pairs with `rhs = 0`
/// must have `lhs = 0` (to `1e-12` relative to the family scale) and do
/// not constrain `C`.
pub fn reduction_envelope(samples: &[(f64, f64)]) -> Result<f64> {
    let scale = samples.iter().map(|s| s.0.abs()).fold(0.0, f64::max);
    let mut c: f64 = 0.0;
    for &(lhs, rhs) in samples {
        if rhs > 0.0 {
            c = c.max(lhs / rhs);
        } else if lhs > 1e-12 * scale {
            return Err(Error::Assumption {
                assumption: "partial-data reduction".into(),
                detail: format!("lhs = {lhs:e} with vanishing right-hand side"),
            });
        }
    }
    Ok(c)
}

/// Envelope constant of the reduction over the records of a sweep.
pub fn records_reduction_envelope(records: &[StabilityRecord], theta0: f64) -> Result<f64> {
    let samples: Vec<(f64, f64)> =
        records.iter().filter(|r| r.solver_ok).map(|r| (r.q_gap, reduction_rhs(r.delta_w, theta0))).collect();
    reduction_envelope(&samples)
}

/// Spearman rank correlation; ties receive averaged ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let k = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / k, ry.iter().sum::<f64>() / k);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    cov / (vx * vy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, DomainConfig, ShapeSpec};

    fn ctx() -> SweepContext<f64> {
        let d = build_grid(&DomainConfig {
            n: 1,
            half_width: 4.0,
            h: 0.125,
            omega: ShapeSpec::Interval { lo: -1.0, hi: 1.0 },
            w1: ShapeSpec::Interval { lo: 1.5, hi: 2.5 },
            w2: Some(ShapeSpec::Interval { lo: -2.5, hi: -1.5 }),
            w: None,
            sigma: None,
            mode: GeometryMode::ExteriorAgreement,
        })
        .unwrap();
        SweepContext::new(d, 0.25).unwrap()
    }

    fn config(amplitudes: Vec<f64>) -> SweepConfig {
        SweepConfig {
            mode: GeometryMode::ExteriorAgreement,
            amplitudes,
            base: FieldSpec::constant(1.0),
            profile: FieldSpec::bump(vec![0.0], 0.9, 1.0),
            gamma0: 0.5,
            regularity_eps: 0.1,
            c1: 10.0,
            theta0: 0.5,
            p: 2.0,
            s_prime: 0.2,
        }
    }

    #[test]
    fn zero_ladder_gives_zero_record() {
        let c = ctx();
        let recs = stability_sweep(&c, &config(vec![0.0])).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].delta, 0.0);
        assert_eq!(recs[0].d_hs, 0.0);
        assert_eq!(recs[0].q_gap, 0.0);
    }

    #[test]
    fn records_sorted_and_monotone() {
        let c = ctx();
        let recs = stability_sweep(&c, &config(vec![0.25, 0.0625, 0.5, 0.125])).unwrap();
        let eps: Vec<f64> = recs.iter().map(|r| r.eps).collect();
        assert_eq!(eps, vec![0.0625, 0.125, 0.25, 0.5]);
        for w in recs.windows(2) {
            assert!(w[1].delta > w[0].delta && w[1].d_hs > w[0].d_hs);
        }
    }

    #[test]
    fn inadmissible_member_is_flagged_not_fatal() {
        let c = ctx();
        let recs = stability_sweep(&c, &config(vec![0.1, 4.0])).unwrap();
        assert!(recs[0].solver_ok);
        assert!(!recs[1].solver_ok && !recs[1].bounds_ok);
        assert!(recs[1].note.contains("(ii)"));
    }

    #[test]
    fn config_ranges() {
        let mut cfg = config(vec![0.1]);
        assert!(cfg.validate(1, 0.25).is_ok());
        cfg.theta0 = 0.2;
        assert!(cfg.validate(1, 0.25).is_err());
        cfg.theta0 = 0.5;
        cfg.p = 4.0;
        assert!(cfg.validate(1, 0.25).is_err());
        cfg.p = 2.0;
        cfg.s_prime = 0.25;
        assert!(cfg.validate(1, 0.25).is_err());
    }

    #[test]
    fn partial_reduction_trivial_and_cross_checked() {
        let c = ctx();
        let g1 = ConductivityField::new(
            c.domain.sample(|p| if p[0].abs() < 1.0 { 1.0 + 0.3 * (1.0 - p[0] * p[0]) } else { 1.0 }),
            0.5,
        )
        .unwrap();
        let same = check_partial_reduction(&c, &g1, &g1, 0.5).unwrap();
        assert_eq!((same.lhs, same.rhs), (0.0, 0.0));
        let g2 = ConductivityField::constant(c.domain.node_count(), 1.0, 0.5).unwrap();
        let r = check_partial_reduction(&c, &g1, &g2, 0.5).unwrap();
        assert!(r.lhs > 0.0 && r.rhs > 0.0);
        assert!((r.lhs - r.lhs_via_conductivity).abs() <= 0.02 * r.lhs);
    }

    #[test]
    fn envelope_and_spearman() {
        assert_eq!(reduction_envelope(&[(1.0, 2.0), (3.0, 4.0), (0.0, 0.0)]).unwrap(), 0.75);
        assert!(reduction_envelope(&[(1.0, 0.0)]).is_err());
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), -1.0);
        assert!(spearman(&[1.0, 2.0, 3.0], &[1.0, 1.0, 2.0]) < 1.0);
    }
}
