//! Hamiltonian instances: Max-Cut, quantum Max-Cut, AKLT, Grover and energy-well landscapes.

mod graph;
mod hamiltonian;
mod landscape;

pub use graph::{random_regular_graph, Graph};
pub use hamiltonian::{aklt_bond_projector, aklt_hamiltonian, maxcut_hamiltonian, qmc_hamiltonian, LocalHamiltonian, QmcForm, Term};
pub(crate) use landscape::csv_err;
pub use landscape::{grover_hamiltonian, well_landscape, well_landscape_with, AnchorPlacement, DiagonalLandscape, WellSpec};
