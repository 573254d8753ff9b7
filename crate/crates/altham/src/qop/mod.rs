//! Qudit register algebra.

mod basis;
pub mod dense;
mod local;
mod operator;
mod projector;
pub(crate) mod register;
mod spectral;
mod state;

pub use basis::{generator_terms, operator_basis, site_basis};
pub use local::{Apply, Embedded, LocalOp, LocalSum};
pub use operator::{embed, HermitianOperator};
pub use projector::{haar_in_range, Projector};
pub use register::RegisterShape;
pub use spectral::{spectral, EigenSystem};
pub(crate) use spectral::group_levels;
pub use state::{
    measure_in_basis, partial_trace_ensemble, partial_trace_to_support, sample_index, ClassicalMixture, Ensemble,
    Sampler, StateVector,
};
