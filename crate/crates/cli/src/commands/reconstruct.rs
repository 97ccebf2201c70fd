//! Regularized reconstruction from a measured DN block.

use std::io::BufReader;
use std::path::Path;

use fraccal::fracops::{gram_matrix_with, Spectrum};
use fraccal::geometry::GeometryMode;
use fraccal::io::{read_block, write_nodal};
use fraccal::stability::{reconstruct, FieldSpec, IterateRecord, ReconstructConfig, ReconstructionProblem};
use serde::Serialize;

use super::{to_bytes, Common, Setup};
use crate::error::{CliError, CliResult};
use crate::manifest::Output;

#[derive(Debug, Serialize)]
pub struct History {
    pub alpha: f64,
    pub unknowns: usize,
    pub converged: bool,
    pub line_search_failed: bool,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub initial_misfit: f64,
    pub final_misfit: f64,
    /// `||gamma_hat - gamma_init|| / ||gamma_init||` over the unknowns.
    pub relative_change: f64,
    pub iterates: Vec<IterateRecord>,
}

fn deviation(gamma: &[f64]) -> Vec<f64> {
    gamma.iter().map(|g| g.sqrt() - 1.0).collect()
}

pub fn run(common: &Common, data: &Path) -> CliResult<()> {
    let setup = Setup::load(common)?;
    let section = setup
        .config
        .reconstruct
        .clone()
        .ok_or_else(|| CliError::Usage("configuration has no `reconstruct` section".into()))?;
    let bytes = std::fs::read(data).map_err(|source| CliError::Read { path: data.to_path_buf(), source })?;
    let (_, block) = read_block(BufReader::new(bytes.as_slice()))
        .map_err(|e| CliError::Usage(format!("{}: {e}", data.display())))?;

    let d = &setup.domain;
    let windows = setup.config.windows;
    let (from, to) = (windows.from.nodes(d), windows.to.nodes(d));
    if block.rows != to || block.cols != from {
        return Err(CliError::Usage(format!(
            "data block is {}x{} on nodes that do not match the configured windows ({}x{})",
            block.rows.len(),
            block.cols.len(),
            to.len(),
            from.len()
        )));
    }
    if block.values.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Usage("data block has non-finite entries".into()));
    }

    let support = match setup.config.domain.mode {
        GeometryMode::ExteriorAgreement => d.omega().to_vec(),
        GeometryMode::CompactDifference => {
            d.sigma().ok_or_else(|| CliError::Usage("second geometry needs `sigma`".into()))?.to_vec()
        }
    };
    let spectrum = Spectrum::new(d);
    let g_from = gram_matrix_with(&spectrum, d, from, setup.s())?;
    let g_to = gram_matrix_with(&spectrum, d, to, setup.s())?;
    let background = deviation(setup.field(&setup.config.conductivities.gamma1)?.values());
    let initial_spec = section.initial.clone().unwrap_or_else(|| FieldSpec::constant(1.0));
    let initial = setup.field(&initial_spec)?;
    let initial_m = deviation(initial.values());
    let x0: Vec<f64> = support.iter().map(|&i| initial_m[i]).collect();

    let problem = ReconstructionProblem {
        domain: d,
        weights: &setup.weights,
        support: support.clone(),
        background,
        from: &g_from,
        to: &g_to,
        measured: block.values,
        gamma0: setup.gamma0(),
    };
    let config = ReconstructConfig { alpha: section.alpha, max_iter: section.max_iter, tol: section.tol };
    let rec = reconstruct(&problem, &x0, &config)?;

    let mut gamma_init = rec.gamma.clone();
    for &i in &support {
        gamma_init[i] = initial.values()[i];
    }
    let num: f64 = support.iter().map(|&i| (rec.gamma[i] - gamma_init[i]).powi(2)).sum();
    let den: f64 = support.iter().map(|&i| gamma_init[i].powi(2)).sum();
    let misfit = |x: &[f64]| problem.objective(x, x, section.alpha).map(|o| o.misfit);
    let x_final: Vec<f64> = support.iter().map(|&i| rec.m[i]).collect();
    let history = History {
        alpha: section.alpha,
        unknowns: support.len(),
        converged: rec.converged,
        line_search_failed: rec.line_search_failed,
        initial_objective: rec.initial_objective,
        final_objective: rec.final_objective,
        initial_misfit: misfit(&x0)?,
        final_misfit: misfit(&x_final)?,
        relative_change: (num / den).sqrt(),
        iterates: rec.history.clone(),
    };

    let provenance = setup.provenance();
    let mut out = Output::create(&common.out)?;
    let fields: [(&str, &[f64]); 3] = [("m", &rec.m), ("gamma", &rec.gamma), ("gamma_initial", &gamma_init)];
    out.write("gamma.csv", &to_bytes(|b| write_nodal(b, Some(&provenance), d, &fields))?)?;
    out.write_json("history.json", &history)?;
    out.finish(setup.manifest("reconstruct"))?;
    eprintln!(
        "misfit {:.3e} -> {:.3e} in {} iterations",
        history.initial_misfit,
        history.final_misfit,
        history.iterates.len()
    );
    Ok(())
}
