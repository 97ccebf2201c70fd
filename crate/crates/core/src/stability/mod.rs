//! Admissible pairs, stability sweeps, modulus fits, the unique-continuation
//! probe and regularized reconstruction.

mod fit;
mod profile;
mod reconstruct;
mod sweep;
mod ucp;

pub use fit::{
    fit_log, fit_modulus, theorem_inequality_probe, LogFit, ModulusFit, ModulusModel, ModulusParams, ProbeLine,
    ProbeReport, SIGMA_FLOOR,
};
pub use profile::{gen_pair, regularity_norm, Bump, ConductivityPair, FieldSpec, PairAudit, RegularityBound};
pub use reconstruct::{
    reconstruct, IterateRecord, Objective, ReconstructConfig, Reconstruction, ReconstructionProblem,
};
pub use sweep::{
    check_partial_reduction, records_reduction_envelope, reduction_envelope, reduction_rhs, spearman, stability_sweep,
    PartialReduction, StabilityRecord, SweepConfig, SweepContext,
};
pub use ucp::{ucp_envelope, ucp_probe, UcpEnvelope, UcpRecord};
