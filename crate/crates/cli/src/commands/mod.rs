//! One module per subcommand. Each returns `Ok(())` on success and a
//! [`CliError`](crate::error::CliError) whose exit code classifies failures.

pub mod dnmap;
pub mod fit;
pub mod reconstruct;
pub mod sweep;
pub mod ucp;
pub mod verify;

use std::path::{Path, PathBuf};

use fraccal::forms::ConductivityField;
use fraccal::fracops::{assemble_weights_with, KernelWeights, DEFAULT_NODE_CAP};
use fraccal::geometry::{build_grid, GridDomain};
use fraccal::io::Provenance;
use fraccal::stability::FieldSpec;

use crate::config::{geometry_hash, load, RunConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

/// Options shared by all subcommands.
#[derive(Clone, Debug)]
pub struct Common {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

/// Parsed configuration with the assembled lattice and kernel.
pub struct Setup {
    pub config: RunConfig,
    pub hash: String,
    pub seed: u64,
    pub domain: GridDomain<f64>,
    pub weights: KernelWeights<f64>,
}

impl Setup {
    pub fn load(common: &Common) -> CliResult<Self> {
        let path = common.config.as_deref().ok_or_else(|| CliError::Usage("--config is required".into()))?;
        Self::from_path(path, common.seed)
    }

    fn from_path(path: &Path, seed: Option<u64>) -> CliResult<Self> {
        let loaded = load(path)?;
        let config = loaded.config;
        let domain: GridDomain<f64> = build_grid(&config.domain)?;
        let weights = assemble_weights_with(&domain, config.operator.s, config.operator.truncation, DEFAULT_NODE_CAP)?;
        let seed = seed.unwrap_or(config.seed);
        Ok(Setup { config, hash: loaded.sha256, seed, domain, weights })
    }

    pub fn s(&self) -> f64 {
        self.config.operator.s
    }

    pub fn gamma0(&self) -> f64 {
        self.config.conductivities.gamma0
    }

    pub fn manifest(&self, command: &str) -> RunManifest {
        RunManifest::new(command, self.seed).with_domain(&self.config.domain, self.s(), &self.hash)
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            s: self.s(),
            h: self.config.domain.h,
            gamma0: Some(self.gamma0()),
            geometry_hash: geometry_hash(&self.config.domain),
        }
    }

    pub fn field(&self, spec: &FieldSpec) -> CliResult<ConductivityField<f64>> {
        Ok(ConductivityField::new(spec.sample(&self.domain), self.gamma0())?)
    }
}

/// Serializes a table-writing closure into bytes.
pub fn to_bytes<F>(f: F) -> CliResult<Vec<u8>>
where
    F: FnOnce(&mut Vec<u8>) -> fraccal::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}
