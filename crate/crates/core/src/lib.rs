//! Fixed points of enriched and modified-enriched nonexpansive mappings on
//! finite-dimensional real spaces.
//!
//! * [`spaces`]: vectors, matrices, l1/l2/linf norms and operator norms.
//! * [`mappings`]: the mapping algebra (affine, rotation, box projection,
//!   linear combination with the identity, composition) and its JSON form.
//! * [`enrichment`]: enrichment conditions, the reductions to nonexpansive
//!   maps, sampled verification and exact minimal constants for affine maps.
//! * [`iteration`]: Picard and Krasnoselskij iteration, the contraction
//!   solver with `λ = 1/(b+1)`, a-priori bounds and rate diagnostics.
//! * [`harness`]: config-driven experiments, seeded affine families, CSV and
//!   JSON artifacts.

pub mod enrichment;
pub mod error;
pub mod harness;
pub mod iteration;
pub mod mappings;
pub mod spaces;

pub use enrichment::{
    averaged, enriched_reduction, min_b_affine, modified_shift, verify_condition, ConditionKind,
    EnrichmentReport, PairSampler,
};
pub use error::{Error, Result};
pub use iteration::{
    apriori_iterations, check_fixed_point, empirical_ratio, krasnoselskij, picard, solve_modified,
    IterationTrace, SolveResult, Status, StopRule,
};
pub use mappings::{parse_mapping, Mapping};
pub use spaces::{norm, operator_norm, Matrix, NormKind, Vector};
