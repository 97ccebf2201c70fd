//! The JSON run configuration.

use std::path::Path;

use fraccal::forms::PotentialSign;
use fraccal::fracops::Truncation;
use fraccal::geometry::{DomainConfig, GridDomain};
use fraccal::stability::{FieldSpec, SweepConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub operator: OperatorSection,
    #[serde(default)]
    pub conductivities: ConductivitySection,
    #[serde(default)]
    pub windows: WindowSection,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub reconstruct: Option<ReconstructSection>,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub ucp: Option<UcpSection>,
    /// Overridden by `--seed`.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSection {
    pub s: f64,
    #[serde(default)]
    pub truncation: Truncation,
}

/// `gamma1` is the reference (or true) conductivity, `gamma2` an optional
/// second one for comparisons.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConductivitySection {
    #[serde(default = "default_gamma0")]
    pub gamma0: f64,
    #[serde(default = "unit_field")]
    pub gamma1: FieldSpec,
    #[serde(default)]
    pub gamma2: Option<FieldSpec>,
}

impl Default for ConductivitySection {
    fn default() -> Self {
        ConductivitySection { gamma0: default_gamma0(), gamma1: unit_field(), gamma2: None }
    }
}

fn default_gamma0() -> f64 {
    0.5
}

fn unit_field() -> FieldSpec {
    FieldSpec::constant(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowName {
    W1,
    W2,
    W,
}

impl WindowName {
    pub fn nodes<'a>(&self, domain: &'a GridDomain<f64>) -> &'a [usize] {
        match self {
            WindowName::W1 => domain.w1(),
            WindowName::W2 => domain.w2(),
            WindowName::W => domain.window(),
        }
    }
}

/// Exciting (`from`) and testing (`to`) windows of DN blocks.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    pub from: WindowName,
    pub to: WindowName,
}

impl Default for WindowSection {
    fn default() -> Self {
        WindowSection { from: WindowName::W1, to: WindowName::W2 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructSection {
    pub alpha: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Initial conductivity on the unknown nodes; `gamma1` when absent.
    #[serde(default)]
    pub initial: Option<FieldSpec>,
}

fn default_max_iter() -> usize {
    200
}

fn default_tol() -> f64 {
    1e-12
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default)]
    pub q_sign: PotentialSign,
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection { q_sign: PotentialSign::default(), draws: default_draws(), tolerance: default_tolerance() }
    }
}

fn default_draws() -> usize {
    20
}

fn default_tolerance() -> f64 {
    1e-10
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UcpSection {
    pub s_prime: f64,
    pub energy: f64,
    #[serde(default = "default_ucp_window")]
    pub window: WindowName,
    /// Probe fields `v`, each supported away from the window.
    pub fields: Vec<FieldSpec>,
}

fn default_ucp_window() -> WindowName {
    WindowName::W1
}

/// A parsed configuration together with the hash of its bytes.
pub struct LoadedConfig {
    pub config: RunConfig,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load(path: &Path) -> CliResult<LoadedConfig> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    let config: RunConfig =
        serde_json::from_slice(&bytes).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })?;
    Ok(LoadedConfig { config, sha256: sha256_hex(&bytes) })
}

/// Short hash identifying the geometry in CSV headers.
pub fn geometry_hash(domain: &DomainConfig) -> String {
    let json = serde_json::to_vec(domain).expect("domain config serializes");
    sha256_hex(&json)[..16].to_string()
}
