use fraccal::geometry::GeometryMode;
use fraccal::io::{fmt_f64, write_records, write_table};
use fraccal::stability::{
    fit_modulus, records_reduction_envelope, stability_sweep, theorem_inequality_probe, ModulusFit, ModulusModel,
    ModulusParams, ProbeReport, StabilityRecord, SweepContext,
};
use serde::Serialize;

use super::{to_bytes, Common, Setup};
use crate::error::{CliError, CliResult};
use crate::manifest::Output;

/// Contents of `fit.json`. A fit that could not be computed is reported
/// through `error` rather than failing the run.
#[derive(Debug, Serialize)]
pub struct FitReport {
    pub model: ModulusModel,
    pub fit: Option<ModulusFit>,
    pub probe: Option<ProbeReport>,
    /// Envelope of the partial-data reduction (second geometry only).
    pub reduction_envelope: Option<f64>,
    pub error: Option<String>,
}

pub fn default_model(mode: GeometryMode) -> ModulusModel {
    match mode {
        GeometryMode::ExteriorAgreement => ModulusModel::Log,
        GeometryMode::CompactDifference => ModulusModel::LogLog,
    }
}

pub fn fit_report(records: &[StabilityRecord], model: ModulusModel, theta0: Option<f64>) -> FitReport {
    let reduction_envelope = theta0.and_then(|t| records_reduction_envelope(records, t).ok());
    match fit_modulus(records, model) {
        Ok(fit) => {
            let probe = theorem_inequality_probe(records, &fit);
            FitReport { model, fit: Some(fit), probe: Some(probe), reduction_envelope, error: None }
        }
        Err(e) => FitReport { model, fit: None, probe: None, reduction_envelope, error: Some(e.to_string()) },
    }
}

/// Two-column plot data: the fitted modulus variable against the distance.
pub fn plot_bytes(records: &[StabilityRecord], fit: &ModulusFit) -> CliResult<Vec<u8>> {
    let (label, distance): (&str, fn(&StabilityRecord) -> f64) = match fit.model() {
        ModulusModel::Log => ("abs_log_delta_pow", |r| r.d_hs),
        ModulusModel::LogLog => ("omega", |r| r.d_lp),
    };
    let rows: Vec<Vec<String>> = records
        .iter()
        .filter(|r| r.solver_ok && r.delta > 0.0 && r.delta < 1.0)
        .map(|r| {
            let x = match &fit.params {
                ModulusParams::Log(f) => r.delta.ln().abs().powf(-f.sigma),
                ModulusParams::LogLog { .. } => fit.envelope(r.delta),
            };
            vec![fmt_f64(x), fmt_f64(distance(r))]
        })
        .collect();
    to_bytes(|buf| write_table(buf, None, &[label, "d"], rows))
}

pub fn run(common: &Common) -> CliResult<()> {
    let setup = Setup::load(common)?;
    let sweep =
        setup.config.sweep.clone().ok_or_else(|| CliError::Usage("configuration has no `sweep` section".into()))?;
    if sweep.amplitudes.is_empty() {
        return Err(CliError::Usage("sweep ladder is empty: nothing to do".into()));
    }
    let provenance = setup.provenance();
    let manifest = setup.manifest("sweep");
    let ctx = SweepContext::with_weights(setup.domain, setup.weights)?;
    let records = stability_sweep(&ctx, &sweep)?;

    let mut out = Output::create(&common.out)?;
    out.write("records.csv", &to_bytes(|b| write_records(b, Some(&provenance), &records))?)?;
    let theta0 = (sweep.mode == GeometryMode::CompactDifference).then_some(sweep.theta0);
    let report = fit_report(&records, default_model(sweep.mode), theta0);
    out.write_json("fit.json", &report)?;
    if let Some(fit) = &report.fit {
        out.write("envelope.csv", &plot_bytes(&records, fit)?)?;
    }
    out.finish(manifest)?;

    let ok = records.iter().filter(|r| r.solver_ok).count();
    eprintln!("{ok}/{} records succeeded", records.len());
    if let Some(e) = &report.error {
        eprintln!("fit skipped: {e}");
    }
    if ok == 0 {
        return Err(CliError::Scientific("no sweep record succeeded".into()));
    }
    Ok(())
}
