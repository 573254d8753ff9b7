use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;

use super::local::Apply;
use super::register::{Embedding, RegisterShape};
use super::spectral::EigenSystem;
use crate::tol::tolerances;
use crate::{Error, Result, C64};

/// Normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    shape: RegisterShape,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(shape: &RegisterShape, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != shape.total_dim() {
            return Err(Error::DimensionMismatch { expected: shape.total_dim(), got: amps.len() });
        }
        let n2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > tolerances().norm {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { shape: shape.clone(), amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(shape: &RegisterShape, mut amps: Vec<C64>) -> Result<Self> {
        let n2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::NotNormalized(n2));
        }
        let s = n2.sqrt().recip();
        amps.iter_mut().for_each(|z| *z *= s);
        Self::new(shape, amps)
    }

    pub(crate) fn from_normalized_unchecked(shape: &RegisterShape, amps: Vec<C64>) -> Self {
        Self { shape: shape.clone(), amps }
    }

    pub fn basis(shape: &RegisterShape, index: usize) -> Result<Self> {
        if index >= shape.total_dim() {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { shape: shape.clone(), amps })
    }

    /// Product state from one (unnormalized) vector per site.
    pub fn product(shape: &RegisterShape, sites: &[Vec<C64>]) -> Result<Self> {
        if sites.len() != shape.n_sites() {
            return Err(Error::DimensionMismatch { expected: shape.n_sites(), got: sites.len() });
        }
        let mut amps = vec![C64::new(1.0, 0.0)];
        for (k, v) in sites.iter().enumerate() {
            if v.len() != shape.site_dim(k) {
                return Err(Error::DimensionMismatch { expected: shape.site_dim(k), got: v.len() });
            }
            amps = amps.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        }
        Self::normalized(shape, amps)
    }

    /// Equal superposition on every site: |+⟩^⊗n for qubits, (|1⟩+|0⟩+|−1⟩)/√3 per qutrit.
    pub fn uniform_product(shape: &RegisterShape) -> Self {
        let sites: Vec<Vec<C64>> = shape.site_dims().iter().map(|&d| vec![C64::new(1.0, 0.0); d]).collect();
        Self::product(shape, &sites).expect("uniform product is well formed")
    }

    pub fn haar<R: Rng + ?Sized>(shape: &RegisterShape, rng: &mut R) -> Self {
        let amps = (0..shape.total_dim())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(shape, amps).expect("gaussian vector is non-zero")
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn check(&self, op: &dyn Apply) -> Result<()> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: op.dim() });
        }
        Ok(())
    }

    /// `⟨ψ|A|ψ⟩` and `⟨ψ|A²|ψ⟩`.
    pub fn moments(&self, op: &dyn Apply) -> Result<(f64, f64)> {
        self.check(op)?;
        let av = op.apply(&self.amps);
        let m1 = self.amps.iter().zip(&av).map(|(a, b)| (a.conj() * b).re).sum();
        let m2 = av.iter().map(|z| z.norm_sqr()).sum();
        Ok((m1, m2))
    }

    pub fn expectation(&self, op: &dyn Apply) -> Result<f64> {
        Ok(self.moments(op)?.0)
    }

    /// `Tr(A²ψ) − Tr(Aψ)²`.
    pub fn variance(&self, op: &dyn Apply) -> Result<f64> {
        let (m1, m2) = self.moments(op)?;
        Ok(m2 - m1 * m1)
    }
}

/// Probability vector over the eigenbasis of one [`EigenSystem`].
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalMixture {
    basis_id: u64,
    weights: Vec<f64>,
}

impl ClassicalMixture {
    pub fn new(es: &EigenSystem, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != es.dim() {
            return Err(Error::DimensionMismatch { expected: es.dim(), got: weights.len() });
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(Error::BadWeights(format!("negative or NaN weight {w}")));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > tolerances().norm {
            return Err(Error::BadWeights(format!("weights sum to {s}")));
        }
        Ok(Self { basis_id: es.id(), weights })
    }

    pub fn pure(es: &EigenSystem, alpha: usize) -> Result<Self> {
        let mut w = vec![0.0; es.dim()];
        *w.get_mut(alpha).ok_or_else(|| Error::InvalidArgument("eigen-index out of range".into()))? = 1.0;
        Self::new(es, w)
    }

    /// Dephased `state` in the eigenbasis of `es`.
    pub fn from_state(es: &EigenSystem, state: &StateVector) -> Result<Self> {
        Ok(Self { basis_id: es.id(), weights: es.probabilities(state.amplitudes())? })
    }

    pub fn basis_id(&self) -> u64 {
        self.basis_id
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn check_basis(&self, es: &EigenSystem) -> Result<()> {
        if self.basis_id != es.id() {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }

    /// `Σ q_α E_α`.
    pub fn mean(&self, es: &EigenSystem) -> Result<f64> {
        self.check_basis(es)?;
        Ok(self.weights.iter().zip(es.energies()).map(|(q, e)| q * e).sum())
    }
}

/// Mixed state as a finite ensemble `ρ = Σ_k w_k |ψ_k⟩⟨ψ_k|`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    shape: RegisterShape,
    parts: Vec<(f64, StateVector)>,
}

impl Ensemble {
    pub fn new(parts: Vec<(f64, StateVector)>) -> Result<Self> {
        let shape = parts.first().ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?.1.shape().clone();
        if parts.iter().any(|(w, s)| !(*w >= 0.0) || s.shape() != &shape) {
            return Err(Error::BadWeights("negative weight or mixed shapes".into()));
        }
        let total: f64 = parts.iter().map(|p| p.0).sum();
        if (total - 1.0).abs() > tolerances().norm {
            return Err(Error::BadWeights(format!("weights sum to {total}")));
        }
        Ok(Self { shape, parts })
    }

    pub fn pure(state: StateVector) -> Self {
        Self { shape: state.shape().clone(), parts: vec![(1.0, state)] }
    }

    /// `rank` Haar-random pure states with Dirichlet(1) weights.
    pub fn random_mixed<R: Rng + ?Sized>(shape: &RegisterShape, rank: usize, rng: &mut R) -> Self {
        let raw: Vec<f64> = (0..rank.max(1)).map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
        let s: f64 = raw.iter().sum();
        let parts = raw.into_iter().map(|w| (w / s, StateVector::haar(shape, rng))).collect();
        Self { shape: shape.clone(), parts }
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn parts(&self) -> &[(f64, StateVector)] {
        &self.parts
    }

    pub fn is_pure(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn expectation(&self, op: &dyn Apply) -> Result<f64> {
        self.parts.iter().map(|(w, s)| Ok(w * s.expectation(op)?)).sum()
    }

    pub fn variance(&self, op: &dyn Apply) -> Result<f64> {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (w, s) in &self.parts {
            let (a, b) = s.moments(op)?;
            m1 += w * a;
            m2 += w * b;
        }
        Ok(m2 - m1 * m1)
    }

    pub fn density_matrix(&self) -> Mat<C64> {
        let n = self.shape.total_dim();
        let mut rho = Mat::zeros(n, n);
        for (w, s) in &self.parts {
            let a = s.amplitudes();
            for j in 0..n {
                for i in 0..n {
                    rho[(i, j)] += a[i] * a[j].conj() * *w;
                }
            }
        }
        rho
    }
}

/// Reduced density matrix on `support` (in the given site order).
pub fn partial_trace_to_support(state: &StateVector, support: &[usize]) -> Result<Mat<C64>> {
    partial_trace_ensemble(&Ensemble::pure(state.clone()), support)
}

pub fn partial_trace_ensemble(rho: &Ensemble, support: &[usize]) -> Result<Mat<C64>> {
    let emb = Embedding::new(rho.shape(), support)?;
    let d = emb.offsets.len();
    let mut out = Mat::<C64>::zeros(d, d);
    for (w, s) in rho.parts() {
        let a = s.amplitudes();
        for &b in &emb.bases {
            for i in 0..d {
                let ai = a[b + emb.offsets[i]];
                if ai == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += ai * a[b + emb.offsets[j]].conj() * *w;
                }
            }
        }
    }
    Ok(out)
}

/// Projective measurement in the eigenbasis: returns `(α, E_α)`.
pub fn measure_in_basis<R: Rng + ?Sized>(state: &StateVector, es: &EigenSystem, rng: &mut R) -> Result<(usize, f64)> {
    let p = es.probabilities(state.amplitudes())?;
    let a = sample_index(&p, rng);
    Ok((a, es.energies()[a]))
}

/// Draws an index with probability proportional to `p` (inverse CDF on a linear scan).
pub fn sample_index<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let total: f64 = p.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &w) in p.iter().enumerate() {
        if w > 0.0 {
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    last
}

/// Cumulative table for repeated draws from one distribution.
#[derive(Clone, Debug)]
pub struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    pub fn new(p: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = p
            .iter()
            .map(|&w| {
                acc += w.max(0.0);
                acc
            })
            .collect();
        Self { cdf }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().unwrap_or(&0.0);
        let u = rng.random::<f64>() * total;
        let mut i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        while i > 0 && self.cdf[i] == self.cdf[i - 1] {
            i -= 1;
        }
        i
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn product_state_trace_is_pure() {
        let shape = RegisterShape::qubits(2).unwrap();
        let s = StateVector::basis(&shape, 1).unwrap(); // |01⟩
        let r = partial_trace_to_support(&s, &[1]).unwrap();
        assert_eq!(r[(1, 1)].re, 1.0);
        assert_eq!(r[(0, 0)].re, 0.0);
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        let shape = RegisterShape::qubits(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = StateVector::new(&shape, vec![C64::new(h, 0.0), C64::default(), C64::default(), C64::new(h, 0.0)]).unwrap();
        let r = partial_trace_to_support(&s, &[0]).unwrap();
        assert!((r[(0, 0)].re - 0.5).abs() < 1e-15 && (r[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(r[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn partial_trace_matches_index_contraction() {
        let shape = RegisterShape::qubits(3).unwrap();
        let s = StateVector::haar(&shape, &mut stream(3, 0));
        let r = partial_trace_to_support(&s, &[0, 2]).unwrap();
        let a = s.amplitudes();
        for i0 in 0..2 {
            for i2 in 0..2 {
                for j0 in 0..2 {
                    for j2 in 0..2 {
                        let mut acc = C64::default();
                        for k in 0..2 {
                            acc += a[i0 * 4 + k * 2 + i2] * a[j0 * 4 + k * 2 + j2].conj();
                        }
                        assert!((r[(i0 * 2 + i2, j0 * 2 + j2)] - acc).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn sampler_skips_zero_mass() {
        let s = Sampler::new(&[0.0, 0.5, 0.0, 0.5]);
        let mut r = stream(1, 1);
        for _ in 0..1000 {
            let i = s.sample(&mut r);
            assert!(i == 1 || i == 3);
        }
    }

    #[test]
    fn normalization_is_enforced() {
        let shape = RegisterShape::qubits(1).unwrap();
        assert!(matches!(StateVector::new(&shape, vec![C64::new(1.0, 0.0); 2]), Err(Error::NotNormalized(_))));
    }
}
