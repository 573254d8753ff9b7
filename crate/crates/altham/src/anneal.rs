//! Simulated annealing on diagonal landscapes with single-bit-flip Metropolis moves.

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;

use crate::models::{csv_err, DiagonalLandscape};
use crate::rng::{ids, stream};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Schedule {
    Linear,
    #[default]
    Geometric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AnnealMode {
    /// One Markov chain from a uniformly random bit string.
    #[default]
    Chain,
    /// Exact evolution of the chain's distribution from the uniform distribution;
    /// `current` is the expected energy.
    Distribution,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealConfig {
    pub steps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub schedule: Schedule,
    pub mode: AnnealMode,
    pub seed: u64,
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidArgument("steps must be ≥ 1".into()));
        }
        if !(self.beta_start > 0.0 && self.beta_start <= self.beta_end && self.beta_end.is_finite()) {
            return Err(Error::InvalidArgument("need 0 < beta_start ≤ beta_end".into()));
        }
        Ok(())
    }

    /// Inverse temperature at step `s` (0-based).
    pub fn beta(&self, s: usize) -> f64 {
        if self.steps == 1 {
            return self.beta_start;
        }
        let x = s as f64 / (self.steps - 1) as f64;
        match self.schedule {
            Schedule::Linear => self.beta_start + (self.beta_end - self.beta_start) * x,
            Schedule::Geometric => self.beta_start * (self.beta_end / self.beta_start).powf(x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealRow {
    pub step: usize,
    pub current: f64,
    pub best: f64,
}

/// One row per step, `1..=steps`.
pub fn anneal(land: &DiagonalLandscape, cfg: &AnnealConfig) -> Result<Vec<AnnealRow>> {
    cfg.validate()?;
    match cfg.mode {
        AnnealMode::Chain => Ok(anneal_chain(land, cfg)),
        AnnealMode::Distribution => Ok(anneal_distribution(land, cfg)),
    }
}

fn accept_prob(beta: f64, de: f64) -> f64 {
    if de <= 0.0 {
        1.0
    } else {
        (-beta * de).exp()
    }
}

fn anneal_chain(land: &DiagonalLandscape, cfg: &AnnealConfig) -> Vec<AnnealRow> {
    let e = land.energies();
    let n = land.n_bits();
    let mut rng = stream(cfg.seed, ids::ANNEAL);
    let mut x = rng.random_range(0..e.len());
    let mut best = e[x];
    let mut rows = Vec::with_capacity(cfg.steps);
    for s in 0..cfg.steps {
        let beta = cfg.beta(s);
        let y = x ^ (1 << rng.random_range(0..n));
        let de = e[y] - e[x];
        if de <= 0.0 || rng.random::<f64>() < accept_prob(beta, de) {
            x = y;
        }
        best = best.min(e[x]);
        rows.push(AnnealRow { step: s + 1, current: e[x], best });
    }
    rows
}

fn anneal_distribution(land: &DiagonalLandscape, cfg: &AnnealConfig) -> Vec<AnnealRow> {
    let e = land.energies();
    let n = land.n_bits();
    let dim = e.len();
    // distinct energy differences, so each step needs one exponential per value
    let mut key: HashMap<u64, u32> = HashMap::new();
    let mut values: Vec<f64> = Vec::new();
    let mut slot = vec![0u32; dim * n];
    for x in 0..dim {
        for k in 0..n {
            let de = e[x ^ (1 << k)] - e[x];
            let id = *key.entry(de.to_bits()).or_insert_with(|| {
                values.push(de);
                (values.len() - 1) as u32
            });
            slot[x * n + k] = id;
        }
    }
    let mut p = vec![1.0 / dim as f64; dim];
    let mut next = vec![0.0; dim];
    let mut acc = vec![0.0; values.len()];
    let mut best = f64::INFINITY;
    let mut rows = Vec::with_capacity(cfg.steps);
    let inv_n = 1.0 / n as f64;
    for s in 0..cfg.steps {
        let beta = cfg.beta(s);
        for (a, &v) in acc.iter_mut().zip(&values) {
            *a = accept_prob(beta, v) * inv_n;
        }
        next.iter_mut().for_each(|v| *v = 0.0);
        for x in 0..dim {
            let px = p[x];
            if px == 0.0 {
                continue;
            }
            let mut moved = 0.0;
            for k in 0..n {
                let a = acc[slot[x * n + k] as usize];
                next[x ^ (1 << k)] += px * a;
                moved += a;
            }
            next[x] += px * (1.0 - moved);
        }
        std::mem::swap(&mut p, &mut next);
        let current: f64 = p.iter().zip(e).map(|(a, b)| a * b).sum();
        best = best.min(current);
        rows.push(AnnealRow { step: s + 1, current, best });
    }
    rows
}

pub fn write_anneal_csv(rows: &[AnnealRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["step", "current", "best"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([r.step.to_string(), format!("{:.12e}", r.current), format!("{:.12e}", r.best)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{well_landscape_with, AnchorPlacement, WellSpec};

    fn cfg(steps: usize, b0: f64, b1: f64, mode: AnnealMode) -> AnnealConfig {
        AnnealConfig { steps, beta_start: b0, beta_end: b1, schedule: Schedule::Geometric, mode, seed: 4 }
    }

    #[test]
    fn flat_landscape() {
        let land = DiagonalLandscape::new(4, vec![0.0; 16], vec![]).unwrap();
        for mode in [AnnealMode::Chain, AnnealMode::Distribution] {
            let rows = anneal(&land, &cfg(10, 0.1, 50.0, mode)).unwrap();
            assert_eq!(rows[0].step, 1);
            assert_eq!(rows[0].best, 0.0);
        }
    }

    #[test]
    fn greedy_limit_reaches_ground_anchor() {
        let spec = WellSpec { placement: AnchorPlacement::Explicit(vec![]), ..WellSpec::standard(8, 0) };
        let land = well_landscape_with(&spec, &mut stream(0, 0)).unwrap();
        for seed in 0..5 {
            let c = AnnealConfig { seed, ..cfg(400, 1e9, 1e9, AnnealMode::Chain) };
            let rows = anneal(&land, &c).unwrap();
            assert_eq!(rows.last().unwrap().current, 0.0);
            assert!(rows.windows(2).all(|w| w[1].current <= w[0].current));
        }
    }

    #[test]
    fn best_is_monotone() {
        let land = crate::models::well_landscape(6, 4, &mut stream(1, 0)).unwrap();
        for mode in [AnnealMode::Chain, AnnealMode::Distribution] {
            let rows = anneal(&land, &cfg(500, 0.1, 5.0, mode)).unwrap();
            assert!(rows.windows(2).all(|w| w[1].best <= w[0].best));
        }
    }

    #[test]
    fn schedules_hit_endpoints() {
        for schedule in [Schedule::Linear, Schedule::Geometric] {
            let c = AnnealConfig { schedule, ..cfg(50000, 0.1, 50.0, AnnealMode::Chain) };
            assert!((c.beta(0) - 0.1).abs() < 1e-15);
            assert!((c.beta(49999) - 50.0).abs() < 1e-12);
        }
    }

    #[test]
    fn distribution_step_lowers_mean() {
        let land = crate::models::well_landscape(6, 4, &mut stream(2, 0)).unwrap();
        let rows = anneal(&land, &cfg(1, 0.5, 0.5, AnnealMode::Distribution)).unwrap();
        // one step from uniform: mean energy can only move by the accepted flux
        let mean0: f64 = land.energies().iter().sum::<f64>() / 64.0;
        assert!(rows[0].current <= mean0);
    }

    #[test]
    fn rejects_bad_config() {
        let land = DiagonalLandscape::new(2, vec![0.0; 4], vec![]).unwrap();
        assert!(anneal(&land, &cfg(0, 0.1, 1.0, AnnealMode::Chain)).is_err());
        assert!(anneal(&land, &cfg(5, 2.0, 1.0, AnnealMode::Chain)).is_err());
        assert!(anneal(&land, &cfg(5, 0.0, 1.0, AnnealMode::Chain)).is_err());
    }
}
