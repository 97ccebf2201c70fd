//! Identity suite: Liouville reduction, DN reduction, Alessandrini
//! identity, DN symmetry and gauge invariance on random draws.

use fraccal::dnmap::{alessandrini_gap, dn_map, dn_pairing_by_solution, verify_dn_reduction};
use fraccal::forms::{
    assemble_conductivity_form, assemble_schrodinger_form, liouville_potential, liouville_residual, ConductivityField,
    PotentialSign,
};
use fraccal::geometry::union;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Common, Setup};
use crate::error::{CliError, CliResult};
use crate::manifest::Output;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub draws: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub q_sign: PotentialSign,
    pub seed: u64,
    pub checks: Vec<Check>,
}

fn uniform(rng: &mut ChaCha8Rng, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(lo..hi)).collect()
}

fn supported(rng: &mut ChaCha8Rng, len: usize, nodes: &[usize]) -> Vec<f64> {
    let mut f = vec![0.0; len];
    for &i in nodes {
        f[i] = rng.random_range(-1.0..1.0);
    }
    f
}

/// Conductivity values admissible for `gamma0`, kept within `[1/2, 2]`.
fn value_range(gamma0: f64) -> (f64, f64) {
    (gamma0.max(0.5), (1.0 / gamma0).min(2.0))
}

pub fn run(common: &Common) -> CliResult<()> {
    let setup = Setup::load(common)?;
    let report = suite(&setup)?;
    let mut out = Output::create(&common.out)?;
    out.write_json("verify.json", &report)?;
    out.finish(setup.manifest("verify"))?;
    for c in &report.checks {
        eprintln!(
            "{} {:<14} max residual {:.3e} (tol {:.0e}, {} draws)",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.max_residual,
            c.tolerance,
            c.draws
        );
    }
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        Err(CliError::Scientific(format!("identity check failed: {}", failed.join(", "))))
    }
}

pub fn suite(setup: &Setup) -> CliResult<VerifyReport> {
    let d = &setup.domain;
    let w = &setup.weights;
    let v = &setup.config.verify;
    if v.draws == 0 {
        return Err(CliError::Usage("verify.draws must be positive".into()));
    }
    let gamma0 = setup.gamma0();
    let (lo, hi) = value_range(gamma0);
    let n = d.node_count();
    let windows = setup.config.windows;
    let (from, to) = (windows.from.nodes(d), windows.to.nodes(d));
    let joint = union(from, to);
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
    let mut worst = [0.0f64; 5];

    for _ in 0..v.draws {
        // Liouville reduction with the configured sign
        let gamma = ConductivityField::new(uniform(&mut rng, n, lo, hi), gamma0)?;
        let u = uniform(&mut rng, n, -1.0, 1.0);
        let phi = uniform(&mut rng, n, -1.0, 1.0);
        worst[0] = worst[0].max(liouville_residual(w, &gamma, v.q_sign, &u, &phi)?);

        // DN reduction for a pair agreeing on the exterior
        let exterior = uniform(&mut rng, n, lo, hi);
        let (mut g1, mut g2) = (exterior.clone(), exterior);
        for &i in d.omega() {
            g1[i] = rng.random_range(lo..hi);
            g2[i] = rng.random_range(lo..hi);
        }
        let g1 = ConductivityField::new(g1, gamma0)?;
        let g2 = ConductivityField::new(g2, gamma0)?;
        let f = supported(&mut rng, n, from);
        let g = supported(&mut rng, n, to);
        worst[1] = worst[1].max(verify_dn_reduction(w, d, &g1, &g2, &f, &g, (from, to))?.residual);

        // Alessandrini identity for nonnegative potentials
        let q1 = uniform(&mut rng, n, 0.0, 2.0);
        let q2 = uniform(&mut rng, n, 0.0, 2.0);
        let f1 = supported(&mut rng, n, &joint);
        let f2 = supported(&mut rng, n, &joint);
        worst[2] = worst[2].max(alessandrini_gap(w, d, &q1, &q2, &f1, &f2, &joint)?.residual);

        // symmetry and gauge on the conductivity and Liouville maps
        let cond = assemble_conductivity_form(w, &g1)?;
        let schr = assemble_schrodinger_form(w, &liouville_potential(w, &g1)?)?;
        for form in [&cond, &schr] {
            let map = dn_map(form, d)?;
            worst[3] = worst[3].max(map.asymmetry());
            let f = supported(&mut rng, n, d.exterior());
            let g = supported(&mut rng, n, d.exterior());
            let reference = map.pairing(&f, &g);
            let (mut fs, mut gs) = (f, g);
            for &i in d.omega() {
                fs[i] = rng.random_range(-10.0..10.0);
                gs[i] = rng.random_range(-10.0..10.0);
            }
            let shifted = dn_pairing_by_solution(form, d, &fs, &gs)?;
            let scale = reference.abs().max(shifted.abs()).max(f64::MIN_POSITIVE);
            worst[4] = worst[4].max((reference - shifted).abs() / scale);
        }
    }

    let names = ["liouville", "dn_reduction", "alessandrini", "dn_symmetry", "gauge"];
    let checks: Vec<Check> = names
        .iter()
        .zip(worst)
        .map(|(&name, r)| Check {
            name,
            draws: v.draws,
            max_residual: r,
            tolerance: v.tolerance,
            passed: r < v.tolerance,
        })
        .collect();
    Ok(VerifyReport { passed: checks.iter().all(|c| c.passed), q_sign: v.q_sign, seed: setup.seed, checks })
}
