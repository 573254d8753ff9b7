use rand::Rng;

use crate::models::LocalHamiltonian;
use crate::qop::{haar_in_range, HermitianOperator, LocalSum, Projector};
use crate::{Error, Result};

/// One rank-one projector `φ_i` inside the range of each term `Π_i`.
#[derive(Clone, Debug)]
pub struct LocalAlteration {
    phis: Vec<Projector>,
}

impl LocalAlteration {
    pub fn phis(&self) -> &[Projector] {
        &self.phis
    }

    /// Checks that `φ_i` matches `Π_i` term-for-term.
    pub fn check(&self, h: &LocalHamiltonian) -> Result<()> {
        let pis = h.projectors()?;
        if pis.len() != self.phis.len() {
            return Err(Error::DimensionMismatch { expected: pis.len(), got: self.phis.len() });
        }
        for (p, f) in pis.iter().zip(&self.phis) {
            if p.support() != f.support() {
                return Err(Error::InvalidArgument("alteration support differs from its term".into()));
            }
        }
        Ok(())
    }
}

/// `φ_i = |v_i⟩⟨v_i|` with `v_i` Haar-random in range(Π_i), independently per term.
pub fn sample_local_alteration<R: Rng + ?Sized>(h: &LocalHamiltonian, rng: &mut R) -> Result<LocalAlteration> {
    Ok(LocalAlteration { phis: h.projectors()?.into_iter().map(|p| haar_in_range(p, rng)).collect() })
}

/// `H_φ = Σ (Π_i + φ_i)` as a local sum.
pub fn altered_local_sum(h: &LocalHamiltonian, a: &LocalAlteration) -> Result<LocalSum> {
    a.check(h)?;
    let pis = h.projectors()?;
    LocalSum::new(h.shape(), pis.iter().map(|p| (1.0, p.op())).chain(a.phis.iter().map(|f| (1.0, f.op()))))
}

pub fn assemble_altered(h: &LocalHamiltonian, a: &LocalAlteration) -> Result<HermitianOperator> {
    HermitianOperator::from_local_sum(&altered_local_sum(h, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{maxcut_hamiltonian, Graph};
    use crate::qop::dense::max_abs_diff;
    use crate::rng::stream;

    #[test]
    fn rank_one_terms_double() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)], 2).unwrap();
        // |11⟩⟨11| terms
        let mut d = [0.0; 16];
        d[15] = 1.0;
        let terms = g
            .edges()
            .iter()
            .map(|&(u, v)| Projector::new(crate::qop::LocalOp::from_real(vec![u, v], vec![2, 2], &d).unwrap()).unwrap())
            .collect();
        let h = LocalHamiltonian::from_projectors(&crate::qop::RegisterShape::qubits(3).unwrap(), terms, "t").unwrap();
        let a = sample_local_alteration(&h, &mut stream(0, 0)).unwrap();
        let hphi = assemble_altered(&h, &a).unwrap();
        let twice = h.assemble().unwrap().add(&h.assemble().unwrap()).unwrap();
        assert!(max_abs_diff(hphi.matrix(), twice.matrix()) < 1e-14);
    }

    #[test]
    fn mismatched_alteration_is_rejected() {
        let g1 = Graph::new(3, vec![(0, 1)], 2).unwrap();
        let g2 = Graph::new(3, vec![(0, 1), (1, 2)], 2).unwrap();
        let (h1, h2) = (maxcut_hamiltonian(&g1).unwrap(), maxcut_hamiltonian(&g2).unwrap());
        let a = sample_local_alteration(&h1, &mut stream(0, 0)).unwrap();
        assert!(assemble_altered(&h2, &a).is_err());
    }
}
