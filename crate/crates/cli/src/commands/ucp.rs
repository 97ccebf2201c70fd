use fraccal::fracops::{gram_matrix_with, Spectrum};
use fraccal::io::{fmt_f64, write_table};
use fraccal::stability::{ucp_envelope, ucp_probe, UcpEnvelope, UcpRecord};
use serde::Serialize;

use super::{to_bytes, Common, Setup};
use crate::error::{CliError, CliResult};
use crate::manifest::Output;

#[derive(Debug, Serialize)]
pub struct UcpReport {
    pub records: Vec<UcpRecord>,
    pub envelope: Option<UcpEnvelope>,
    pub error: Option<String>,
}

pub fn run(common: &Common) -> CliResult<()> {
    let setup = Setup::load(common)?;
    let section =
        setup.config.ucp.clone().ok_or_else(|| CliError::Usage("configuration has no `ucp` section".into()))?;
    if section.fields.is_empty() {
        return Err(CliError::Usage("ucp.fields is empty: nothing to do".into()));
    }
    let d = &setup.domain;
    let spectrum = Spectrum::new(d);
    let window = gram_matrix_with(&spectrum, d, section.window.nodes(d), setup.s())?;
    let records: Vec<UcpRecord> = section
        .fields
        .iter()
        .map(|spec| {
            let v: Vec<f64> = spec.sample(d);
            ucp_probe(d, &setup.weights, &spectrum, &window, &v, section.s_prime, section.energy)
        })
        .collect::<fraccal::Result<_>>()?;
    let (envelope, error) = match ucp_envelope(&records) {
        Ok(e) => (Some(e), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let rows = records
        .iter()
        .map(|r| [r.distance, r.lhs, r.rhs, r.hs_norm, r.energy].iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>());
    let csv = to_bytes(|b| {
        write_table(b, Some(&setup.provenance()), &["distance", "lhs", "rhs", "hs_norm", "energy"], rows)
    })?;
    let mut out = Output::create(&common.out)?;
    out.write("ucp.csv", &csv)?;
    out.write_json("ucp.json", &UcpReport { records, envelope, error })?;
    out.finish(setup.manifest("ucp-probe"))
}
