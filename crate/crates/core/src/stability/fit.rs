//! Logarithmic and log-logarithmic modulus fits with covering envelopes.

use serde::{Deserialize, Serialize};

use super::sweep::StabilityRecord;
use crate::error::{Error, Result};

/// Functional form of the modulus of continuity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusModel {
    /// `d <= C |log delta|^{-sigma}`.
    Log,
    /// `d <= C1 |log(C0 |log delta|^{-sigma0})|^{-sigma1}`.
    #[serde(rename = "loglog")]
    LogLog,
}

/// Least-squares fit of `y = C |log x|^{-sigma}` in log coordinates plus
/// the smallest constant covering every point at the fitted exponent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub c: f64,
    pub sigma: f64,
    pub envelope_c: f64,
    /// RMS residual in `log y`.
    pub residual: f64,
}

impl LogFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.c * x.ln().abs().powf(-self.sigma)
    }

    pub fn envelope(&self, x: f64) -> f64 {
        self.envelope_c * x.ln().abs().powf(-self.sigma)
    }
}

/// Fits `y = C |log x|^{-sigma}` to points with `x in (0, 1)` and `y > 0`.
pub fn fit_log(points: &[(f64, f64)]) -> Result<LogFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!("{} points, need at least 2", points.len())));
    }
    // y = log d, t = log |log delta|:  y = log C - sigma t
    let ts: Vec<f64> = points.iter().map(|&(x, _)| x.ln().abs().ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let k = points.len() as f64;
    let tm = ts.iter().sum::<f64>() / k;
    let ym = ys.iter().sum::<f64>() / k;
    let stt: f64 = ts.iter().map(|t| (t - tm) * (t - tm)).sum();
    if stt <= 0.0 {
        return Err(Error::InsufficientData("all data values coincide in |log delta|".into()));
    }
    let sty: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let slope = sty / stt;
    let log_c = ym - slope * tm;
    let sigma = -slope;
    let residual = (ts.iter().zip(&ys).map(|(t, y)| (y - log_c - slope * t).powi(2)).sum::<f64>() / k).sqrt();
    let envelope_c = points.iter().map(|&(x, y)| y / x.ln().abs().powf(-sigma)).fold(0.0, f64::max);
    Ok(LogFit { c: log_c.exp(), sigma, envelope_c, residual })
}

/// Parameters of a fitted modulus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModulusParams {
    Log(LogFit),
    #[serde(rename = "loglog")]
    LogLog {
        /// `r = C0 |log delta|^{-sigma0}` on the intermediate potential gap.
        inner: LogFit,
        /// `d = C1 |log r|^{-sigma1}`.
        outer: LogFit,
    },
}

/// Smallest exponent treated as a genuine decay rate.
pub const SIGMA_FLOOR: f64 = 1e-6;

/// Fitted modulus of continuity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModulusFit {
    pub params: ModulusParams,
    /// Largest `delta` used in the fit.
    pub lambda: f64,
    pub residual: f64,
    pub used: usize,
    /// Records left out because `delta >= 1`, `delta = 0` or `d = 0`.
    pub excluded: usize,
    /// All fitted exponents exceed [`SIGMA_FLOOR`].
    pub conforming: bool,
}

impl ModulusFit {
    pub fn model(&self) -> ModulusModel {
        match self.params {
            ModulusParams::Log(_) => ModulusModel::Log,
            ModulusParams::LogLog { .. } => ModulusModel::LogLog,
        }
    }

    /// Least-squares model value at `delta`.
    pub fn fitted(&self, delta: f64) -> f64 {
        match &self.params {
            ModulusParams::Log(f) => f.eval(delta),
            ModulusParams::LogLog { inner, outer } => outer.eval(inner.eval(delta)),
        }
    }

    /// Envelope modulus `omega(delta)`; `NaN` where it is undefined.
    pub fn envelope(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        match &self.params {
            ModulusParams::Log(f) => f.envelope(delta),
            ModulusParams::LogLog { inner, outer } => {
                let r = inner.envelope(delta);
                if r < 1.0 {
                    outer.envelope(r)
                } else {
                    f64::NAN
                }
            }
        }
    }
}

fn distance(r: &StabilityRecord, model: ModulusModel) -> f64 {
    match model {
        ModulusModel::Log => r.d_hs,
        ModulusModel::LogLog => r.d_lp,
    }
}

fn usable(r: &StabilityRecord, model: ModulusModel) -> bool {
    r.solver_ok && r.delta > 0.0 && r.delta < 1.0 && distance(r, model) > 0.0
}

/// Fits the modulus to a family of records. The log model uses `d_hs`;
/// the log-log model uses `d_lp` and fits the inner stage on the
/// intermediate potential gap `q_dual` first.
pub fn fit_modulus(records: &[StabilityRecord], model: ModulusModel) -> Result<ModulusFit> {
    let used: Vec<&StabilityRecord> = records.iter().filter(|r| usable(r, model)).collect();
    let excluded = records.len() - used.len();
    if used.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} usable records with 0 < delta < 1, need at least 4",
            used.len()
        )));
    }
    let lambda = used.iter().map(|r| r.delta).fold(0.0, f64::max);
    let (params, residual, conforming) = match model {
        ModulusModel::Log => {
            let pts: Vec<(f64, f64)> = used.iter().map(|r| (r.delta, r.d_hs)).collect();
            let f = fit_log(&pts)?;
            (ModulusParams::Log(f), f.residual, f.sigma > SIGMA_FLOOR)
        }
        ModulusModel::LogLog => {
            if used.iter().any(|r| !(r.q_dual > 0.0 && r.q_dual < 1.0)) {
                return Err(Error::InsufficientData(
                    "log-log fit needs an intermediate gap in (0, 1) on every record".into(),
                ));
            }
            let inner = fit_log(&used.iter().map(|r| (r.delta, r.q_dual)).collect::<Vec<_>>())?;
            let outer = fit_log(&used.iter().map(|r| (r.q_dual, r.d_lp)).collect::<Vec<_>>())?;
            // the composite envelope is evaluated at the inner envelope, which
            // dominates every measured gap; refit the outer constant there
            let mut outer_env = outer;
            outer_env.envelope_c = used
                .iter()
                .map(|r| {
                    let rr = inner.envelope(r.delta);
                    if rr < 1.0 {
                        r.d_lp / rr.ln().abs().powf(-outer.sigma)
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(0.0, f64::max);
            let conforming = inner.sigma > SIGMA_FLOOR && outer.sigma > SIGMA_FLOOR && outer_env.envelope_c.is_finite();
            let residual = (inner.residual.powi(2) + outer.residual.powi(2)).sqrt();
            (ModulusParams::LogLog { inner, outer: outer_env }, residual, conforming)
        }
    };
    Ok(ModulusFit { params, lambda, residual, used: used.len(), excluded, conforming })
}

/// Per-record outcome of the envelope check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeLine {
    pub eps: f64,
    pub delta: f64,
    pub distance: f64,
    pub bound: f64,
    /// `bound - distance`; negative means violated.
    pub slack: f64,
    /// Whether the record lies in the validity range `0 < delta <= lambda`.
    pub checked: bool,
    pub ok: bool,
}

/// Report of [`theorem_inequality_probe`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeReport {
    pub passed: bool,
    pub lines: Vec<ProbeLine>,
    /// Envelope `C'` of `||g1 - g2||_{H^s} <= C' ||g1^{1/2} - g2^{1/2}||_{H^s}`.
    pub chain_constant: f64,
    pub chain_holds: bool,
    /// Every record satisfied the theorem's hypotheses; otherwise the
    /// report is informational only.
    pub hypotheses_hold: bool,
    pub notes: Vec<String>,
}

/// Relative rounding allowance when comparing data against an envelope
/// built from the same data.
const ENVELOPE_ROUNDING: f64 = 1e-12;

/// Checks `d <= omega(delta)` on every record with `0 < delta <= lambda`
/// and the square-root chain envelope.
pub fn theorem_inequality_probe(records: &[StabilityRecord], fit: &ModulusFit) -> ProbeReport {
    let model = fit.model();
    let mut notes = Vec::new();
    let mut passed = fit.conforming;
    if !fit.conforming {
        notes.push("fitted exponent not positive: modulus does not decay".into());
    }
    let lines: Vec<ProbeLine> = records
        .iter()
        .map(|r| {
            let d = distance(r, model);
            let checked = r.solver_ok && r.delta <= fit.lambda;
            let bound = if r.delta == 0.0 { 0.0 } else { fit.envelope(r.delta) };
            let ok = !checked || d <= bound * (1.0 + ENVELOPE_ROUNDING) + f64::MIN_POSITIVE;
            ProbeLine { eps: r.eps, delta: r.delta, distance: d, bound, slack: bound - d, checked, ok }
        })
        .collect();
    if lines.iter().any(|l| !l.ok) {
        passed = false;
        notes.push("envelope violated by at least one record".into());
    }

    let chain: Vec<(f64, f64)> = records.iter().filter(|r| r.solver_ok).map(|r| (r.d_hs, r.d_sqrt_hs)).collect();
    let chain_constant = chain.iter().filter(|(_, b)| *b > 0.0).map(|(a, b)| a / b).fold(0.0, f64::max);
    let chain_holds =
        chain.iter().all(|&(a, b)| a <= chain_constant * b * (1.0 + ENVELOPE_ROUNDING) + f64::MIN_POSITIVE);
    if !chain_holds {
        passed = false;
        notes.push("square-root chain: a record has d_hs > 0 with zero square-root gap".into());
    }

    let hypotheses_hold = records.iter().all(|r| r.support_ok && r.bounds_ok && r.regularity_ok);
    if !hypotheses_hold {
        notes.push("assumption (iii) or another hypothesis fails on some record; result is informational only".into());
    }
    ProbeReport { passed, lines, chain_constant, chain_holds, hypotheses_hold, notes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth_log(c: f64, sigma: f64) -> Vec<StabilityRecord> {
        (1..=8)
            .map(|k| {
                let delta = 2f64.powi(-4 * k);
                StabilityRecord::observation(2f64.powi(-k), delta, c * delta.ln().abs().powf(-sigma), 0.0, 0.0)
            })
            .collect()
    }

    #[test]
    fn log_model_recovers_parameters() {
        let fit = fit_modulus(&synth_log(2.0, 0.5), ModulusModel::Log).unwrap();
        let ModulusParams::Log(f) = fit.params else { panic!() };
        assert!((f.c - 2.0).abs() < 1e-6 && (f.sigma - 0.5).abs() < 1e-6);
        assert!(fit.conforming);
        assert_eq!(fit.lambda, 2f64.powi(-4));
    }

    #[test]
    fn flat_data_is_non_conforming() {
        let recs: Vec<StabilityRecord> =
            (1..=6).map(|k| StabilityRecord::observation(1.0, 2f64.powi(-2 * k), 0.3, 0.0, 0.0)).collect();
        let fit = fit_modulus(&recs, ModulusModel::Log).unwrap();
        let ModulusParams::Log(f) = fit.params else { panic!() };
        assert!(f.sigma.abs() < 1e-12);
        assert!(!fit.conforming);
        assert!(!theorem_inequality_probe(&recs, &fit).passed);
    }

    #[test]
    fn large_delta_is_excluded_and_too_few_records_rejected() {
        let mut recs = synth_log(1.0, 1.0);
        recs.push(StabilityRecord::observation(1.0, 2.0, 5.0, 0.0, 0.0));
        let fit = fit_modulus(&recs, ModulusModel::Log).unwrap();
        assert_eq!(fit.excluded, 1);
        assert!(matches!(fit_modulus(&recs[..3], ModulusModel::Log), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn envelope_covers_noisy_data() {
        let mut recs = synth_log(1.0, 0.7);
        for (k, r) in recs.iter_mut().enumerate() {
            r.d_hs *= 1.0 + 0.1 * ((k as f64) * 1.7).sin();
        }
        let fit = fit_modulus(&recs, ModulusModel::Log).unwrap();
        let report = theorem_inequality_probe(&recs, &fit);
        assert!(report.passed, "{report:?}");
        assert!(report.lines.iter().all(|l| l.ok && l.checked));
    }

    #[test]
    fn single_record_family_passes_through_the_point() {
        let r = StabilityRecord::observation(0.5, 0.01, 0.2, 0.0, 0.0);
        let f = fit_log(&[(0.01, 0.2), (0.001, 0.1)]).unwrap();
        let fit = ModulusFit {
            params: ModulusParams::Log(f),
            lambda: 0.01,
            residual: 0.0,
            used: 1,
            excluded: 0,
            conforming: true,
        };
        let report = theorem_inequality_probe(&[r], &fit);
        assert!(report.passed);
    }
}
