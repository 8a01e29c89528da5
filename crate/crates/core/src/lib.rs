//! Boundary-divisor lattices of the moduli space of scaled marked lines.
//!
//! The local picture is a toric variety attached to each colored tree: its
//! cone generators, invariant Weil divisors (minimally complete edge sets)
//! and the Cartier sublattice. The global picture indexes boundary divisors
//! by subsets and set partitions of the markings; a divisor is Cartier
//! exactly when its partition part lies in the image of the push-pull map
//! from subsets to partitions.
//!
//! All arithmetic is exact. Each structural fact the computations rely on has an
//! independent brute-force check somewhere in this crate or its tests.

pub mod cones;
pub mod global_divisors;
pub mod intlinalg;
pub mod local_divisors;
pub mod sets;
pub mod trees;
pub mod weights;

pub use cones::{generators, pair, ray_count, verify_duality, DualityReport, RayVector};
pub use global_divisors::{
    cartier_witness, enumerate_strata, enumerate_strata_multi, is_cartier_global,
    local_global_crosscheck, pullback_fij, pullback_fij_type_i, pullback_forgetful,
    pushpull_matrix, relations_basis, simple_partitions, CartierLattice, CrosscheckReport,
    DivisorVector, PushPull, Strata,
};
pub use intlinalg::{IntMatrix, LinalgError};
pub use local_divisors::{
    is_cartier_local, local_cartier_generators, minimally_complete_subsets, partition_of_subset,
    ray_of_subset, subset_of_partition, EdgeSet, LocalCartierDecision, LocalDivisorVector,
};
pub use sets::{Partition, Subset};
pub use trees::{
    enumerate_trees, is_compatible, principal_subtrees, reduce_tree, tree_for_partition,
    validate_tree, ColoredTree, EdgeId, RawTree, ValidationReport,
};
pub use weights::{
    label_weights, pairing_certificate, total_weight, weight_sum_equal, EdgeMultiset,
    PairingCertificate, WeightVector,
};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("partition {0} is not compatible with the tree")]
    NotCompatible(String),
    #[error("divisor is not Cartier: {0}")]
    NotCartier(String),
    /// Two independent computations of the same quantity disagreed.
    #[error("property violation: {0}")]
    PropertyViolation(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
