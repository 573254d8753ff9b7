use rand::Rng;

use crate::qop::{ClassicalMixture, EigenSystem, Sampler, StateVector};
use crate::{Error, Result};

/// Outcome of one best-of-K energy measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOutcome {
    pub chosen_index: usize,
    pub chosen_energy: f64,
    pub all_indices: Vec<usize>,
    pub all_energies: Vec<f64>,
    pub measurement_count: usize,
}

/// Measures `k` copies of `state` in the eigenbasis and keeps the lowest-energy outcome.
/// Eigen-indices are sorted by energy, so the minimum index wins ties.
pub fn energy_measurement_step<R: Rng + ?Sized>(
    state: &StateVector,
    es: &EigenSystem,
    k: usize,
    rng: &mut R,
) -> Result<(StateVector, MeasurementOutcome)> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be ≥ 1".into()));
    }
    let p = es.probabilities(state.amplitudes())?;
    let sampler = Sampler::new(&p);
    let all_indices: Vec<usize> = (0..k).map(|_| sampler.sample(rng)).collect();
    let chosen = *all_indices.iter().min().expect("k ≥ 1");
    let outcome = MeasurementOutcome {
        chosen_index: chosen,
        chosen_energy: es.energies()[chosen],
        all_energies: all_indices.iter().map(|&a| es.energies()[a]).collect(),
        all_indices,
        measurement_count: k,
    };
    Ok((es.eigenvector(chosen), outcome))
}

/// Law of the minimum of `k` independent draws from `p` (index order).
///
/// `out_β = S_β^k − S_{β+1}^k` with `S_β = Σ_{γ≥β} p_γ`.
pub fn min_of_k(p: &[f64], k: usize) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    let mut out = vec![0.0; p.len()];
    let mut tail_next = 0.0f64;
    for b in (0..p.len()).rev() {
        let tail = (tail_next + p[b] / total).min(1.0);
        out[b] = (tail.powi(k as i32) - tail_next.powi(k as i32)).max(0.0);
        tail_next = tail;
    }
    out
}

/// Exact best-of-K step on a mixture: transfer to the new basis, then take the min-of-K law.
pub fn energy_measurement_distribution(
    mix: &ClassicalMixture,
    old_es: &EigenSystem,
    new_es: &EigenSystem,
    k: usize,
) -> Result<ClassicalMixture> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be ≥ 1".into()));
    }
    mix.check_basis(old_es)?;
    let p = if old_es.id() == new_es.id() { mix.weights().to_vec() } else { new_es.transfer_from(old_es, mix.weights())? };
    let mut q = min_of_k(&p, k);
    let s: f64 = q.iter().sum();
    q.iter_mut().for_each(|x| *x /= s);
    ClassicalMixture::new(new_es, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_equal_levels_k2() {
        let q = min_of_k(&[0.5, 0.5], 2);
        assert!((q[0] - 0.75).abs() < 1e-15 && (q[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn k1_is_identity() {
        let p = [0.1, 0.0, 0.6, 0.3];
        let q = min_of_k(&p, 1);
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
