//! Refits a records file written by `sweep`.

use std::io::BufReader;
use std::path::Path;

use fraccal::io::read_records;
use fraccal::stability::ModulusModel;

use super::sweep::{fit_report, plot_bytes};
use super::Common;
use crate::config::sha256_hex;
use crate::error::{CliError, CliResult};
use crate::manifest::{Output, RunManifest};

pub fn run(common: &Common, records_path: &Path, model: ModulusModel, theta0: Option<f64>) -> CliResult<()> {
    let bytes =
        std::fs::read(records_path).map_err(|source| CliError::Read { path: records_path.to_path_buf(), source })?;
    let records = read_records(BufReader::new(bytes.as_slice()))?;
    if records.is_empty() {
        return Err(CliError::Usage(format!("{} holds no records", records_path.display())));
    }
    let report = fit_report(&records, model, theta0);

    let mut manifest = RunManifest::new("fit", common.seed.unwrap_or(0));
    manifest.config_hash = Some(sha256_hex(&bytes));
    let header = fraccal::io::read_table(BufReader::new(bytes.as_slice()))?;
    manifest.s = header.header_value("s").and_then(|v| v.parse().ok());
    manifest.h = header.header_value("h").and_then(|v| v.parse().ok());

    let mut out = Output::create(&common.out)?;
    out.write_json("fit.json", &report)?;
    if let Some(fit) = &report.fit {
        out.write("envelope.csv", &plot_bytes(&records, fit)?)?;
    }
    out.finish(manifest)?;
    match report.error {
        Some(e) => Err(CliError::Scientific(e)),
        None => Ok(()),
    }
}
