use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;

use crate::qop::{EigenSystem, HermitianOperator, RegisterShape};
use crate::{Error, Result};

/// Diagonal Hamiltonian `Σ_i E_i |i⟩⟨i|` on `n_bits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalLandscape {
    n_bits: usize,
    energies: Vec<f64>,
    anchors: Vec<(usize, f64)>,
}

impl DiagonalLandscape {
    pub fn new(n_bits: usize, energies: Vec<f64>, anchors: Vec<(usize, f64)>) -> Result<Self> {
        let shape = RegisterShape::qubits(n_bits)?;
        if energies.len() != shape.total_dim() {
            return Err(Error::DimensionMismatch { expected: shape.total_dim(), got: energies.len() });
        }
        if let Some(&e) = energies.iter().find(|e| !(**e >= 0.0)) {
            return Err(Error::NegativeEnergy(e));
        }
        Ok(Self { n_bits, energies, anchors })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn anchors(&self) -> &[(usize, f64)] {
        &self.anchors
    }

    pub fn shape(&self) -> RegisterShape {
        RegisterShape::qubits(self.n_bits).expect("validated at construction")
    }

    pub fn min_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn ground_indices(&self) -> Vec<usize> {
        let m = self.min_energy();
        (0..self.energies.len()).filter(|&i| self.energies[i] == m).collect()
    }

    pub fn to_operator(&self) -> HermitianOperator {
        HermitianOperator::from_diagonal(&self.shape(), &self.energies).expect("length checked")
    }

    /// Eigenbasis is the computational basis; no eigensolver involved.
    pub fn eigensystem(&self) -> EigenSystem {
        EigenSystem::computational(&self.shape(), &self.energies).expect("length checked")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(["index", "energy"]).map_err(csv_err)?;
        for (i, e) in self.energies.iter().enumerate() {
            w.write_record([i.to_string(), e.to_string()]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
        let mut pairs = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let bad = |m: &str| Error::Parse { line: k + 2, msg: m.to_string() };
            let i: usize = rec.get(0).and_then(|x| x.trim().parse().ok()).ok_or_else(|| bad("bad index"))?;
            let e: f64 = rec.get(1).and_then(|x| x.trim().parse().ok()).ok_or_else(|| bad("bad energy"))?;
            pairs.push((i, e));
        }
        let n = pairs.len();
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::Parse { line: 0, msg: format!("{n} rows is not a power of two ≥ 2") });
        }
        let mut energies = vec![f64::NAN; n];
        for (i, e) in pairs {
            *energies.get_mut(i).ok_or(Error::Parse { line: 0, msg: format!("index {i} out of range") })? = e;
        }
        if energies.iter().any(|e| e.is_nan()) {
            return Err(Error::Parse { line: 0, msg: "missing indices".into() });
        }
        Self::new(n.trailing_zeros() as usize, energies, Vec::new())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse { line: 0, msg: format!("{other:?}") },
    }
}

/// `I − |marked⟩⟨marked|`.
pub fn grover_hamiltonian(n_bits: usize, marked: usize) -> Result<DiagonalLandscape> {
    let dim = RegisterShape::qubits(n_bits)?.total_dim();
    if marked >= dim {
        return Err(Error::InvalidArgument(format!("marked index {marked} ≥ 2^{n_bits}")));
    }
    let mut e = vec![1.0; dim];
    e[marked] = 0.0;
    DiagonalLandscape::new(n_bits, e, vec![(marked, 0.0)])
}

/// Where the energy-1 anchors of a well landscape go.
#[derive(Clone, Debug, PartialEq)]
pub enum AnchorPlacement {
    /// Uniformly random distinct indices other than the two ground anchors.
    Random(usize),
    /// Random single-bit neighbours of the two ground anchors (no barrier between them).
    AdjacentToGround(usize),
    Explicit(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct WellSpec {
    pub n_bits: usize,
    pub placement: AnchorPlacement,
    pub anchor_energy: f64,
    pub distance_multiplier: f64,
}

impl WellSpec {
    pub fn standard(n_bits: usize, n_anchors: usize) -> Self {
        Self { n_bits, placement: AnchorPlacement::Random(n_anchors), anchor_energy: 1.0, distance_multiplier: 2.0 }
    }
}

/// Ground anchors at `0` and `2^n − 1` plus `n_anchors` random energy-1 anchors;
/// every index takes the energy of its nearest anchor plus twice the Hamming distance.
pub fn well_landscape<R: Rng + ?Sized>(n_bits: usize, n_anchors: usize, rng: &mut R) -> Result<DiagonalLandscape> {
    well_landscape_with(&WellSpec::standard(n_bits, n_anchors), rng)
}

pub fn well_landscape_with<R: Rng + ?Sized>(spec: &WellSpec, rng: &mut R) -> Result<DiagonalLandscape> {
    let n = spec.n_bits;
    if n < 2 {
        return Err(Error::InvalidArgument("well landscape needs n_bits ≥ 2".into()));
    }
    let dim = RegisterShape::qubits(n)?.total_dim();
    let top = dim - 1;
    let extra: Vec<usize> = match &spec.placement {
        AnchorPlacement::Random(m) => {
            if *m > dim - 2 {
                return Err(Error::InvalidArgument(format!("{m} anchors do not fit in {dim} indices")));
            }
            sample(rng, dim - 2, *m).into_iter().map(|i| i + 1).collect()
        }
        AnchorPlacement::AdjacentToGround(m) => {
            let cand: Vec<usize> = (0..n).map(|b| 1usize << b).chain((0..n).map(|b| top ^ (1 << b))).collect();
            if *m > cand.len() {
                return Err(Error::InvalidArgument(format!("{m} anchors exceed the {} ground neighbours", cand.len())));
            }
            sample(rng, cand.len(), *m).into_iter().map(|i| cand[i]).collect()
        }
        AnchorPlacement::Explicit(list) => list.clone(),
    };
    let mut anchors = vec![(0usize, 0.0), (top, 0.0)];
    for a in extra {
        if a >= dim || anchors.iter().any(|&(b, _)| b == a) {
            return Err(Error::InvalidArgument(format!("anchor {a} collides or is out of range")));
        }
        anchors.push((a, spec.anchor_energy));
    }
    let energies = (0..dim)
        .map(|i| {
            let mut best = (u32::MAX, 0.0);
            for &(a, e) in &anchors {
                let d = (i ^ a).count_ones();
                if d < best.0 {
                    best = (d, e);
                }
            }
            best.1 + spec.distance_multiplier * best.0 as f64
        })
        .collect();
    DiagonalLandscape::new(n, energies, anchors)
}
