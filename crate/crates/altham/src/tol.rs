//! Process-wide numeric tolerances.

use std::sync::RwLock;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Max-norm slack for `A = A†`.
    pub hermitian: f64,
    /// Max-norm slack for `P² = P`.
    pub projector: f64,
    /// Slack on `‖ψ‖² = 1` and on probability vectors summing to one.
    pub norm: f64,
    /// Relative gap below which two eigenvalues share a level.
    pub degeneracy: f64,
    /// Slack on the 3/4 mass threshold of the quartile.
    pub quartile_mass: f64,
    /// Gradient components at or below this are dropped from the generator.
    pub gradient_zero: f64,
    /// Truncation error of the Chebyshev propagator.
    pub propagator: f64,
    /// Largest register dimension accepted.
    pub dim_cap: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-10,
        projector: 1e-10,
        norm: 1e-10,
        degeneracy: 1e-9,
        quartile_mass: 1e-12,
        gradient_zero: 1e-12,
        propagator: 1e-14,
        dim_cap: 1 << 13,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

static TOLERANCES: RwLock<Tolerances> = RwLock::new(Tolerances::DEFAULT);

pub fn tolerances() -> Tolerances {
    *TOLERANCES.read().unwrap_or_else(|e| e.into_inner())
}

pub fn set_tolerances(t: Tolerances) {
    *TOLERANCES.write().unwrap_or_else(|e| e.into_inner()) = t;
}
