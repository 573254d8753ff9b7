//! Alternating-minimization drivers: best-of-K measurement and variational descent,
//! switching between the base Hamiltonian and freshly sampled altered ones.

mod diagnostics;
mod initial;
mod measurement;
mod trace;
mod variational;

pub use diagnostics::{appendix_b_diagnostics, AppendixB, DiagnosticRow};
pub use initial::InitialState;
pub use measurement::{altmin_measurement, AltMinConfig, AltMinMode, BaseModel, Family, FamilySampler, Sampled};
pub use trace::{physical_copy_count, RunTrace, TraceRow};
pub use variational::{altmin_variational, ScheduleKind, StallRule, VariationalConfig, VariationalRow, VariationalTrace};

#[cfg(test)]
mod tests;
