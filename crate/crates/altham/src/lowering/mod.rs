//! Energy-lowering primitives: best-of-K measurement and signed-gradient variational steps.

mod measurement;
mod propagate;
mod variational;

pub use measurement::{energy_measurement_distribution, energy_measurement_step, min_of_k, MeasurementOutcome};
pub use propagate::expm_i_multi;
pub use variational::{variational_gradient, variational_update, GeneratorBasis, ThetaMode, VariationalStep};
