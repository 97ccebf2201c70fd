//! Emits the DN block of `gamma1` on the configured windows, the full
//! exterior map, and comparisons against `gamma2` when present.

use fraccal::dnmap::{dn_map, dn_operator_norm, restrict_dn, DnMap};
use fraccal::forms::assemble_conductivity_form;
use fraccal::fracops::{gram_matrix_with, Spectrum};
use fraccal::io::{write_block, write_matrix_bin, NodeBlock};
use fraccal::stability::FieldSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{to_bytes, Common, Setup};
use crate::error::{CliError, CliResult};
use crate::manifest::Output;

#[derive(Debug, Serialize)]
pub struct DnReport {
    pub exterior_nodes: usize,
    pub from_nodes: Vec<usize>,
    pub to_nodes: Vec<usize>,
    pub asymmetry: f64,
    /// `H^s(from) -> H^{-s}(to)` norm of the block.
    pub block_norm: f64,
    /// Relative level of the additive noise on the written block.
    pub noise: f64,
    /// Norm of the block difference against `gamma2`.
    pub difference_norm: Option<f64>,
}

fn map_for(setup: &Setup, spec: &FieldSpec) -> CliResult<DnMap<f64>> {
    let gamma = setup.field(spec)?;
    Ok(dn_map(&assemble_conductivity_form(&setup.weights, &gamma)?, &setup.domain)?)
}

pub fn run(common: &Common, noise: f64) -> CliResult<()> {
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(CliError::Usage(format!("noise level {noise} must be a nonnegative number")));
    }
    let setup = Setup::load(common)?;
    let d = &setup.domain;
    let windows = setup.config.windows;
    let (from, to) = (windows.from.nodes(d), windows.to.nodes(d));
    let spectrum = Spectrum::new(d);
    let s = setup.s();
    let g_from = gram_matrix_with(&spectrum, d, from, s)?;
    let g_to = gram_matrix_with(&spectrum, d, to, s)?;

    let map = map_for(&setup, &setup.config.conductivities.gamma1)?;
    let mut block = restrict_dn(&map, from, to)?;
    let block_norm = dn_operator_norm(&block, &g_from, &g_to)?;
    if noise > 0.0 {
        let scale = noise * block.amax();
        let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
        block.apply(|x| *x += scale * rng.random_range(-1.0..1.0));
    }
    let provenance = setup.provenance();
    let mut out = Output::create(&common.out)?;
    let nb = NodeBlock { rows: to.to_vec(), cols: from.to_vec(), values: block };
    out.write("dn_block.csv", &to_bytes(|b| write_block(b, Some(&provenance), &nb))?)?;
    out.write("dn_full.bin", &to_bytes(|b| write_matrix_bin(b, map.matrix()))?)?;

    let difference_norm = match &setup.config.conductivities.gamma2 {
        Some(spec) => {
            let other = map_for(&setup, spec)?;
            let diff = map.difference(&other)?;
            let diff_block = fraccal::dnmap::restrict_matrix(&map, &diff, from, to)?;
            let nb2 = NodeBlock { rows: to.to_vec(), cols: from.to_vec(), values: restrict_dn(&other, from, to)? };
            out.write("dn_block_gamma2.csv", &to_bytes(|b| write_block(b, Some(&provenance), &nb2))?)?;
            Some(dn_operator_norm(&diff_block, &g_from, &g_to)?)
        }
        None => None,
    };
    let report = DnReport {
        exterior_nodes: map.exterior().len(),
        from_nodes: from.to_vec(),
        to_nodes: to.to_vec(),
        asymmetry: map.asymmetry(),
        block_norm,
        noise,
        difference_norm,
    };
    out.write_json("dnmap.json", &report)?;
    out.finish(setup.manifest("dnmap"))
}
