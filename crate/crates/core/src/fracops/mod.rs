//! Discrete fractional operators.
//!
//! Two discretizations coexist. The graph operator built from
//! [`KernelWeights`] carries the exact algebraic identities (symmetry,
//! annihilation of constants, Liouville reduction). The spectral operator on
//! the periodic box defines the Bessel potential norms and Gram metrics and
//! doubles as a consistency oracle for the graph operator.

mod kernel;
mod sobolev;
mod spectral;

pub use kernel::{
    apply_graph_laplacian, assemble_weights, assemble_weights_with, check_order, cns_constant, cns_constant_log,
    KernelWeights, Truncation, DEFAULT_NODE_CAP,
};
pub use sobolev::{dual_norm, functional_covector, gram_matrix, gram_matrix_with, SobolevMetric};
pub use spectral::{apply_spectral_laplacian, bessel_norm, lattice_lp_norm, Spectrum};
