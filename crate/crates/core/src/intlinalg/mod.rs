//! Exact integer matrix algebra.
//!
//! Hermite and Smith normal forms, integer kernels, integer solving,
//! image-lattice membership and saturation. Entries are arbitrary precision;
//! the eliminations run in checked `i64` first and redo the work in `BigInt`
//! only when an intermediate value overflows.

mod hermite;
mod matrix;
mod scalar;
mod smith;

use std::sync::atomic::{AtomicUsize, Ordering};

pub use hermite::{
    hermite_form, hermite_normal_form, image_contains, kernel_basis, rank, reverse_hermite_basis,
    row_lattice_basis, same_row_lattice, saturation, solve_integer, Hermite, Solver,
};
pub use matrix::IntMatrix;
pub use smith::{smith_normal_form, Smith};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix with {entries} entries exceeds the configured limit of {limit}")]
    TooLarge { entries: usize, limit: usize },
}

/// Default cap on `rows * cols` for any eliminated matrix.
pub const DEFAULT_MAX_ENTRIES: usize = 200_000_000;

static MAX_ENTRIES: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_ENTRIES);

/// Changes the process-wide cap on matrix size. Returns the previous value.
pub fn set_max_entries(limit: usize) -> usize {
    MAX_ENTRIES.swap(limit, Ordering::Relaxed)
}

pub fn max_entries() -> usize {
    MAX_ENTRIES.load(Ordering::Relaxed)
}

pub(crate) fn check_size(rows: usize, cols: usize) -> Result<(), LinalgError> {
    let entries = rows.saturating_mul(cols);
    let limit = max_entries();
    if entries > limit {
        Err(LinalgError::TooLarge { entries, limit })
    } else {
        Ok(())
    }
}

/// Converts an `i64` vector to arbitrary precision.
pub fn to_big(v: &[i64]) -> Vec<num_bigint::BigInt> {
    v.iter().map(|&x| num_bigint::BigInt::from(x)).collect()
}
