//! Quartile statistic, spectral profiles, mean energy and variance.

use std::path::Path;

use crate::models::csv_err;
use crate::qop::{group_levels, Apply, ClassicalMixture, EigenSystem, StateVector};
use crate::tol::tolerances;
use crate::{Error, Result};

/// Smallest energy level `E` such that the mass strictly above `E` is at most 3/4.
///
/// `energies` must be non-decreasing and `p` a distribution over them; equal energies
/// (within the degeneracy tolerance) form one level.
pub fn quartile_of_distribution(energies: &[f64], p: &[f64]) -> Result<f64> {
    if energies.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: energies.len(), got: p.len() });
    }
    let levels = group_levels(energies);
    let total: f64 = p.iter().sum();
    let slack = tolerances().quartile_mass;
    let mut below_or_at = 0.0;
    for lv in &levels {
        below_or_at += p[lv.clone()].iter().sum::<f64>();
        let above = total - below_or_at;
        if above <= 0.75 * total + slack {
            return Ok(energies[lv.start]);
        }
    }
    Ok(energies.last().copied().unwrap_or(f64::NAN))
}

/// `Quar_H(ψ)` for a pure state against the eigensystem of `H`.
pub fn quartile(state: &StateVector, es: &EigenSystem) -> Result<f64> {
    quartile_of_distribution(es.energies(), &es.probabilities(state.amplitudes())?)
}

/// `Quar_H(ρ)` for a mixture diagonal in `basis`.
pub fn quartile_mixture(mix: &ClassicalMixture, basis: &EigenSystem, es: &EigenSystem) -> Result<f64> {
    mix.check_basis(basis)?;
    let p = if basis.id() == es.id() { mix.weights().to_vec() } else { es.transfer_from(basis, mix.weights())? };
    quartile_of_distribution(es.energies(), &p)
}

/// `Tr(Hψ)`.
pub fn mean_energy(state: &StateVector, op: &dyn Apply) -> Result<f64> {
    state.expectation(op)
}

/// `Σ_α p_α E_α`.
pub fn mean_of_distribution(energies: &[f64], p: &[f64]) -> f64 {
    energies.iter().zip(p).map(|(e, q)| e * q).sum()
}

/// `Tr(H²ψ) − Tr(Hψ)²`.
pub fn variance(state: &StateVector, op: &dyn Apply) -> Result<f64> {
    state.variance(op)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralProfileRow {
    pub index: usize,
    pub base_energy: f64,
    pub mean: f64,
    pub quartile: f64,
}

/// Mean and quartile, against `target`, of every `stride`-th eigenvector of `source`.
pub fn spectral_profile(source: &EigenSystem, target: &EigenSystem, stride: usize) -> Result<Vec<SpectralProfileRow>> {
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be ≥ 1".into()));
    }
    if source.dim() != target.dim() {
        return Err(Error::DimensionMismatch { expected: source.dim(), got: target.dim() });
    }
    let picks: Vec<usize> = (0..source.dim()).step_by(stride).collect();
    let rows = target.overlap_rows(source, &picks)?;
    picks
        .iter()
        .zip(rows)
        .map(|(&a, p)| {
            Ok(SpectralProfileRow {
                index: a,
                base_energy: source.energies()[a],
                mean: mean_of_distribution(target.energies(), &p),
                quartile: quartile_of_distribution(target.energies(), &p)?,
            })
        })
        .collect()
}

pub fn write_profile_csv(rows: &[SpectralProfileRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["index", "base_energy", "mean", "quartile"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([r.index.to_string(), r.base_energy.to_string(), r.mean.to_string(), r.quartile.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenstate_quartile_is_its_energy() {
        let e = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(quartile_of_distribution(&e, &[0.0, 0.0, 1.0, 0.0]).unwrap(), 2.0);
        assert_eq!(quartile_of_distribution(&e, &[0.0, 0.0, 0.0, 1.0]).unwrap(), 3.0);
    }

    #[test]
    fn uniform_four_levels_sits_on_the_boundary() {
        // mass strictly above e1 is exactly 3/4
        let e = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quartile_of_distribution(&e, &[0.25; 4]).unwrap(), 1.0);
        assert_eq!(quartile_of_distribution(&e, &[0.2, 0.3, 0.25, 0.25]).unwrap(), 2.0);
    }

    #[test]
    fn degenerate_levels_are_grouped() {
        let e = [0.0, 1.0, 1.0, 5.0];
        // mass above 0 is 0.9 > 3/4; above level 1 is 0.5
        assert_eq!(quartile_of_distribution(&e, &[0.1, 0.2, 0.2, 0.5]).unwrap(), 1.0);
    }
}
