//! Altered Hamiltonian families.

mod local;
mod sparse;

pub use local::{altered_local_sum, assemble_altered, sample_local_alteration, LocalAlteration};
pub(crate) use sparse::clean_energies;
pub use sparse::{
    assemble_sparse_altered, pattern_columns, sample_sparse_alteration, PatternKind, SparseAlteration, SparseBase,
    SparsityPattern,
};
