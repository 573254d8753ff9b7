use std::f64::consts::SQRT_2;

use super::graph::Graph;
use crate::qop::{Apply, HermitianOperator, LocalOp, LocalSum, Projector, RegisterShape};
use crate::{Error, Result, C64};

/// One Hamiltonian term: a projector, or an arbitrary Hermitian operator.
#[derive(Clone, Debug)]
pub enum Term {
    Projector(Projector),
    Hermitian(LocalOp),
}

impl Term {
    pub fn op(&self) -> &LocalOp {
        match self {
            Term::Projector(p) => p.op(),
            Term::Hermitian(o) => o,
        }
    }
}

/// `H = Σ_i Π_i` on a qudit register.
#[derive(Clone, Debug)]
pub struct LocalHamiltonian {
    shape: RegisterShape,
    terms: Vec<Term>,
    label: String,
    sum: LocalSum,
}

impl LocalHamiltonian {
    pub fn new(shape: &RegisterShape, terms: Vec<Term>, label: impl Into<String>) -> Result<Self> {
        for t in &terms {
            let op = t.op();
            let d = shape.check_support(op.support())?;
            if d != op.dim() {
                return Err(Error::DimensionMismatch { expected: d, got: op.dim() });
            }
        }
        let sum = LocalSum::new(shape, terms.iter().map(|t| (1.0, t.op())))?;
        Ok(Self { shape: shape.clone(), terms, label: label.into(), sum })
    }

    pub fn from_projectors(shape: &RegisterShape, terms: Vec<Projector>, label: impl Into<String>) -> Result<Self> {
        Self::new(shape, terms.into_iter().map(Term::Projector).collect(), label)
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest support size.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.op().support().len()).max().unwrap_or(0)
    }

    /// The projector terms; fails if any term is not a projector.
    pub fn projectors(&self) -> Result<Vec<&Projector>> {
        self.terms
            .iter()
            .map(|t| match t {
                Term::Projector(p) => Ok(p),
                Term::Hermitian(_) => Err(Error::InvalidArgument(format!("`{}` has non-projector terms", self.label))),
            })
            .collect()
    }

    pub fn local_sum(&self) -> &LocalSum {
        &self.sum
    }

    pub fn assemble(&self) -> Result<HermitianOperator> {
        HermitianOperator::from_local_sum(&self.sum)
    }

    /// Computational-basis energies when every term is diagonal.
    pub fn diagonal(&self) -> Option<Vec<f64>> {
        self.sum.diagonal()
    }

    /// Distinct supports with their site dimensions, in term order.
    pub fn supports(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for t in &self.terms {
            let s = (t.op().support().to_vec(), t.op().site_dims().to_vec());
            if !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }
}

impl Apply for LocalHamiltonian {
    fn dim(&self) -> usize {
        self.shape.total_dim()
    }

    fn apply_add(&self, x: &[C64], y: &mut [C64]) {
        self.sum.apply_add(x, y)
    }
}

fn qubit_shape(g: &Graph) -> Result<RegisterShape> {
    RegisterShape::qubits(g.n_vertices())
}

/// `(1/2)(I + Z⊗Z)` per edge.
pub fn maxcut_hamiltonian(g: &Graph) -> Result<LocalHamiltonian> {
    let shape = qubit_shape(g)?;
    let mut d = [0.0; 16];
    d[0] = 1.0;
    d[15] = 1.0;
    let terms = g
        .edges()
        .iter()
        .map(|&(u, v)| Projector::new(LocalOp::from_real(vec![u, v], vec![2, 2], &d)?))
        .collect::<Result<Vec<_>>>()?;
    LocalHamiltonian::from_projectors(&shape, terms, "maxcut")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QmcForm {
    /// `(1/4)(I + XX + YY + ZZ) = Swap/2`.
    Literal,
    /// `(I + Swap)/2`, the projector onto the triplet space.
    Projector,
}

pub fn qmc_hamiltonian(g: &Graph, form: QmcForm) -> Result<LocalHamiltonian> {
    let shape = qubit_shape(g)?;
    let mut swap = [0.0; 16];
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        swap[i * 4 + j] = 1.0;
    }
    let terms = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let data: Vec<f64> = match form {
                QmcForm::Literal => swap.iter().map(|s| s / 2.0).collect(),
                QmcForm::Projector => (0..16).map(|k| (swap[k] + if k % 5 == 0 { 1.0 } else { 0.0 }) / 2.0).collect(),
            };
            let op = LocalOp::from_real(vec![u, v], vec![2, 2], &data)?;
            Ok(match form {
                QmcForm::Literal => Term::Hermitian(op),
                QmcForm::Projector => Term::Projector(Projector::new(op)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let label = match form {
        QmcForm::Literal => "qmc-literal",
        QmcForm::Projector => "qmc",
    };
    LocalHamiltonian::new(&shape, terms, label)
}

/// Projector onto total spin 2 of two spin-1 sites, basis (|1⟩, |0⟩, |−1⟩) per site.
pub fn aklt_bond_projector() -> Vec<C64> {
    let z = C64::default();
    let r = C64::new(SQRT_2, 0.0);
    let sz = [1.0, 0.0, -1.0];
    let mut sp = [z; 9];
    sp[1] = r; // |1⟩⟨0|
    sp[5] = r; // |0⟩⟨−1|
    let mut sm = [z; 9];
    for i in 0..3 {
        for j in 0..3 {
            sm[i * 3 + j] = sp[j * 3 + i].conj();
        }
    }
    // S·S = Sz⊗Sz + (S+⊗S− + S−⊗S+)/2
    let mut ss = vec![z; 81];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let row = a * 3 + b;
                    let col = c * 3 + d;
                    let mut v = z;
                    if a == c && b == d {
                        v += C64::new(sz[a] * sz[b], 0.0);
                    }
                    v += (sp[a * 3 + c] * sm[b * 3 + d] + sm[a * 3 + c] * sp[b * 3 + d]) * 0.5;
                    ss[row * 9 + col] = v;
                }
            }
        }
    }
    let mut ss2 = vec![z; 81];
    for i in 0..9 {
        for j in 0..9 {
            ss2[i * 9 + j] = (0..9).map(|k| ss[i * 9 + k] * ss[k * 9 + j]).sum();
        }
    }
    (0..81)
        .map(|k| {
            let id = if k % 10 == 0 { 1.0 / 3.0 } else { 0.0 };
            C64::new(id, 0.0) + ss[k] * 0.5 + ss2[k] / 6.0
        })
        .collect()
}

pub fn aklt_hamiltonian(n_sites: usize, periodic: bool) -> Result<LocalHamiltonian> {
    if n_sites < 2 {
        return Err(Error::InvalidArgument(format!("AKLT chain needs at least 2 sites, got {n_sites}")));
    }
    let shape = RegisterShape::qutrits(n_sites)?;
    let p = aklt_bond_projector();
    let mut bonds: Vec<(usize, usize)> = (0..n_sites - 1).map(|i| (i, i + 1)).collect();
    if periodic && n_sites > 2 {
        bonds.push((n_sites - 1, 0));
    }
    let terms = bonds
        .into_iter()
        .map(|(u, v)| Projector::new(LocalOp::new(vec![u, v], vec![3, 3], p.clone())?))
        .collect::<Result<Vec<_>>>()?;
    LocalHamiltonian::from_projectors(&shape, terms, if periodic { "aklt-periodic" } else { "aklt" })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qop::{spectral, StateVector};

    #[test]
    fn single_edge_terms() {
        let g = Graph::new(2, vec![(0, 1)], 1).unwrap();
        let h = maxcut_hamiltonian(&g).unwrap();
        assert_eq!(h.diagonal().unwrap(), vec![1.0, 0.0, 0.0, 1.0]);
        let q = qmc_hamiltonian(&g, QmcForm::Projector).unwrap();
        let es = spectral(&q.assemble().unwrap()).unwrap();
        let e: Vec<f64> = es.energies().iter().map(|x| (x * 1e12).round() / 1e12).collect();
        assert_eq!(e, vec![0.0, 1.0, 1.0, 1.0]);
        let lit = qmc_hamiltonian(&g, QmcForm::Literal).unwrap();
        assert!(lit.projectors().is_err());
    }

    #[test]
    fn aklt_bond_is_rank_five_projector() {
        let h = aklt_hamiltonian(2, false).unwrap();
        assert_eq!(h.projectors().unwrap()[0].rank(), 5);
    }

    #[test]
    fn plus_state_energies() {
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], 2).unwrap();
        let plus = StateVector::uniform_product(&RegisterShape::qubits(4).unwrap());
        let q = qmc_hamiltonian(&g, QmcForm::Projector).unwrap();
        assert!((plus.expectation(&q).unwrap() - 4.0).abs() < 1e-12);
        let mc = maxcut_hamiltonian(&g).unwrap();
        assert!((plus.expectation(&mc).unwrap() - 2.0).abs() < 1e-12);
    }
}
