use rand::Rng;

use crate::qop::{RegisterShape, StateVector};
use crate::{Error, Result, C64};

/// Named starting states.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// Equal superposition on every site: `|+⟩^⊗n` for qubits.
    UniformProduct,
    Haar,
    Basis(usize),
    /// Bit string, site 0 first.
    Bits(Vec<usize>),
    Amplitudes(Vec<C64>),
}

impl InitialState {
    pub fn build<R: Rng + ?Sized>(&self, shape: &RegisterShape, rng: &mut R) -> Result<StateVector> {
        match self {
            InitialState::UniformProduct => Ok(StateVector::uniform_product(shape)),
            InitialState::Haar => Ok(StateVector::haar(shape, rng)),
            InitialState::Basis(i) => StateVector::basis(shape, *i),
            InitialState::Bits(b) => {
                if b.len() != shape.n_sites() || b.iter().zip(shape.site_dims()).any(|(v, d)| v >= d) {
                    return Err(Error::InvalidArgument("basis string does not fit the register".into()));
                }
                StateVector::basis(shape, shape.index_of(b))
            }
            InitialState::Amplitudes(a) => StateVector::normalized(shape, a.clone()),
        }
    }
}
