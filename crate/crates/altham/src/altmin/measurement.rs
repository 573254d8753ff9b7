use std::collections::BTreeMap;

use crate::altered::{
    altered_local_sum, assemble_sparse_altered, sample_local_alteration, sample_sparse_alteration, SparseBase,
    SparsityPattern,
};
use crate::lowering::min_of_k;
use crate::models::{DiagonalLandscape, LocalHamiltonian};
use crate::qop::{spectral, Apply, EigenSystem, HermitianOperator, LocalSum, RegisterShape, Sampler, StateVector};
use crate::rng::{derive_seed, ids, stream, Stream};
use crate::stats::{mean_of_distribution, quartile_of_distribution};
use crate::{Error, Result};

use super::diagnostics::DiagnosticRow;
use super::trace::{physical_copy_count, RunTrace, TraceRow};

/// Which altered family the Hamiltonians are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Local,
    SparseBand { t: usize },
    SparseHamming,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AltMinMode {
    /// Full copy tree: `K^{L−i}` independent copies before iteration `i`, reduced in batches of `K`.
    Trajectory,
    /// One realized state per iteration, measured `K` times.
    SinglePath,
    /// Deterministic evolution of the eigenbasis distribution.
    ExactDistribution,
}

#[derive(Clone, Copy, Debug)]
pub enum BaseModel<'a> {
    Local(&'a LocalHamiltonian),
    Landscape(&'a DiagonalLandscape),
}

impl BaseModel<'_> {
    pub fn shape(&self) -> RegisterShape {
        match self {
            BaseModel::Local(h) => h.shape().clone(),
            BaseModel::Landscape(l) => l.shape(),
        }
    }

    fn diagonal(&self) -> Option<Vec<f64>> {
        match self {
            BaseModel::Local(h) => h.diagonal(),
            BaseModel::Landscape(l) => Some(l.energies().to_vec()),
        }
    }

    pub fn eigensystem(&self) -> Result<EigenSystem> {
        match self.diagonal() {
            Some(d) => EigenSystem::computational(&self.shape(), &d),
            None => match self {
                BaseModel::Local(h) => spectral(&h.assemble()?),
                BaseModel::Landscape(_) => unreachable!(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AltMinConfig {
    pub l: usize,
    pub k: usize,
    pub family: Family,
    pub mode: AltMinMode,
    /// Keys the Hamiltonian sequence; shared by every replicate.
    pub seed: u64,
    /// Keys the measurement outcomes.
    pub replicate: u64,
    /// Largest copy population `K^L` accepted in trajectory mode.
    pub population_cap: usize,
    pub diagnostics: bool,
    /// Computational-basis index whose weight is recorded per row.
    pub watch: Option<usize>,
}

impl AltMinConfig {
    pub fn new(l: usize, k: usize, family: Family, mode: AltMinMode, seed: u64) -> Self {
        Self { l, k, family, mode, seed, replicate: 0, population_cap: 1 << 20, diagnostics: false, watch: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.k == 0 {
            return Err(Error::InvalidArgument("L and K must be ≥ 1".into()));
        }
        if let Family::SparseBand { t: 0 } = self.family {
            return Err(Error::InvalidArgument("band width t must be ≥ 1".into()));
        }
        if self.mode == AltMinMode::Trajectory {
            let pop = (self.k as u128).checked_pow(self.l as u32).unwrap_or(u128::MAX);
            if pop > self.population_cap as u128 {
                return Err(Error::DimensionCap { dim: pop.min(usize::MAX as u128) as usize, cap: self.population_cap });
            }
        }
        Ok(())
    }
}

/// `ψ_i` as weights over the eigenvectors of the previous Hamiltonian.
enum Ensemble<'a> {
    Initial(&'a StateVector),
    Weights(Vec<f64>),
}

enum BaseOp<'a> {
    Diag(Vec<f64>),
    Sum(&'a LocalSum),
}

fn weighted(es: &EigenSystem, w: &[f64], vals: impl Fn(&[bool]) -> Result<Vec<f64>>) -> Result<f64> {
    let mask: Vec<bool> = w.iter().map(|&x| x > 0.0).collect();
    let v = vals(&mask)?;
    let _ = es;
    Ok(w.iter().zip(&v).filter(|(x, _)| **x > 0.0).map(|(x, y)| x * y).sum())
}

fn expect_op(es: &EigenSystem, w: &[f64], op: &dyn Apply) -> Result<f64> {
    weighted(es, w, |m| es.expectations(op, Some(m)))
}

fn expect_base(es: &EigenSystem, w: &[f64], op: &BaseOp) -> Result<f64> {
    match op {
        BaseOp::Diag(d) => weighted(es, w, |_| es.diagonal_expectations(d)),
        BaseOp::Sum(s) => expect_op(es, w, *s),
    }
}

fn expect_state(psi: &StateVector, op: &BaseOp) -> Result<f64> {
    match op {
        BaseOp::Diag(d) => Ok(psi.amplitudes().iter().zip(d).map(|(a, e)| a.norm_sqr() * e).sum()),
        BaseOp::Sum(s) => psi.expectation(*s),
    }
}

fn watch_weight(es: Option<&EigenSystem>, ens: &Ensemble, idx: usize) -> f64 {
    match ens {
        Ensemble::Initial(psi) => psi.amplitudes()[idx].norm_sqr(),
        Ensemble::Weights(w) => {
            let es = es.expect("weights live in a basis");
            w.iter()
                .enumerate()
                .filter(|(_, x)| **x > 0.0)
                .map(|(a, x)| x * es.eigenvector_amplitudes(a)[idx].norm_sqr())
                .sum()
        }
    }
}

/// An eigensystem drawn from an altered family.
pub struct Sampled {
    pub es: EigenSystem,
    /// `Σ_j v_{i,j}` for the local family.
    pub alteration: Option<LocalSum>,
}

/// Draws altered Hamiltonians for a base model and diagonalizes them.
///
/// Sparse families act on the base spectrum shifted so its minimum is 0.
pub struct FamilySampler<'a> {
    base: BaseModel<'a>,
    family: Family,
    shifted: Option<DiagonalLandscape>,
    pattern: Option<SparsityPattern>,
    rng: Stream,
    keep_alteration: bool,
}

impl<'a> FamilySampler<'a> {
    /// `seed` keys the Hamiltonian stream; `keep_alteration` retains `Σ_j v_j` (local family).
    pub fn new(base: BaseModel<'a>, family: Family, seed: u64, keep_alteration: bool) -> Result<Self> {
        let shape = base.shape();
        let (shifted, pattern) = match family {
            Family::Local => {
                match base {
                    BaseModel::Local(h) => {
                        h.projectors()?;
                    }
                    BaseModel::Landscape(_) => {
                        return Err(Error::InvalidArgument("local family needs a local Hamiltonian".into()))
                    }
                }
                (None, None)
            }
            Family::SparseBand { .. } | Family::SparseHamming => {
                let d = base
                    .diagonal()
                    .ok_or_else(|| Error::InvalidArgument("sparse families need a diagonal base".into()))?;
                if shape.site_dims().iter().any(|&x| x != 2) {
                    return Err(Error::InvalidArgument("sparse families need a qubit register".into()));
                }
                let n = shape.n_sites();
                let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
                let land = DiagonalLandscape::new(n, d.iter().map(|e| e - lo).collect(), vec![])?;
                let pat = match family {
                    Family::SparseBand { t } => SparsityPattern::band(n, t)?,
                    _ => SparsityPattern::hamming(n)?,
                };
                (Some(land), Some(pat))
            }
        };
        Ok(Self {
            base,
            family,
            shifted,
            pattern,
            rng: stream(seed, ids::HAMILTONIAN),
            keep_alteration,
        })
    }

    pub fn sample(&mut self) -> Result<Sampled> {
        match (self.family, self.base) {
            (Family::Local, BaseModel::Local(h)) => {
                let a = sample_local_alteration(h, &mut self.rng)?;
                let sum = altered_local_sum(h, &a)?;
                let es = spectral(&HermitianOperator::from_local_sum(&sum)?)?;
                let alteration = if self.keep_alteration {
                    Some(LocalSum::new(h.shape(), a.phis().iter().map(|p| (1.0, p.op())))?)
                } else {
                    None
                };
                Ok(Sampled { es, alteration })
            }
            _ => {
                let land = self.shifted.as_ref().expect("sparse family");
                let pat = self.pattern.as_ref().expect("sparse family");
                let s = sample_sparse_alteration(land.energies(), pat, &mut self.rng)?;
                let es = spectral(&assemble_sparse_altered(SparseBase::Diagonal(land), &s)?)?;
                Ok(Sampled { es, alteration: None })
            }
        }
    }
}

/// Best-of-K measurement alternating with resampled altered Hamiltonians.
///
/// Row `i` describes `ψ_i`; iteration `i` measures it against `H_i`, where `H_0` is the
/// base and `H_1, H_2, …` are drawn from the family. The Hamiltonian sequence depends only
/// on `cfg.seed`, so modes and replicates see the same Hamiltonians.
pub fn altmin_measurement(base: BaseModel<'_>, initial: &StateVector, cfg: &AltMinConfig) -> Result<RunTrace> {
    cfg.validate()?;
    let shape = base.shape();
    if *initial.shape() != shape {
        return Err(Error::DimensionMismatch { expected: shape.total_dim(), got: initial.dim() });
    }
    if let Some(w) = cfg.watch {
        if w >= shape.total_dim() {
            return Err(Error::InvalidArgument(format!("watch index {w} out of range")));
        }
    }
    let base_op = match (base, base.diagonal()) {
        (_, Some(d)) => BaseOp::Diag(d),
        (BaseModel::Local(h), None) => BaseOp::Sum(h.local_sum()),
        (BaseModel::Landscape(_), None) => unreachable!(),
    };
    let mut source = FamilySampler::new(base, cfg.family, cfg.seed, cfg.diagnostics)?;
    let diag_op = if cfg.diagnostics {
        match base {
            BaseModel::Local(h) if cfg.family == Family::Local => {
                let pis = h.projectors()?;
                Some(LocalSum::new(h.shape(), pis.iter().map(|p| (1.0 / p.rank() as f64, p.op())))?)
            }
            _ => return Err(Error::InvalidArgument("diagnostics need the local family".into())),
        }
    } else {
        None
    };
    let mut mrng = stream(derive_seed(cfg.seed, cfg.replicate), ids::MEASURE);

    let mut rows = Vec::with_capacity(cfg.l + 1);
    let mut diag_rows = Vec::new();
    let mut prev: Option<EigenSystem> = None;
    let mut ens = Ensemble::Initial(initial);
    // trajectory population, as eigen-indices of `prev`
    let mut pop: Vec<usize> = Vec::new();

    for i in 0..=cfg.l {
        let energy_base = match &ens {
            Ensemble::Initial(psi) => expect_state(psi, &base_op)?,
            Ensemble::Weights(w) => expect_base(prev.as_ref().expect("basis"), w, &base_op)?,
        };
        let watch = cfg.watch.map(|x| watch_weight(prev.as_ref(), &ens, x));
        if i == cfg.l {
            rows.push(TraceRow {
                iteration: i,
                energy_base,
                energy_current: None,
                quartile: None,
                measurement_count: 0,
                hamiltonian_id: None,
                watch,
            });
            break;
        }
        let cur = if i == 0 { Sampled { es: base.eigensystem()?, alteration: None } } else { source.sample()? };
        let es = &cur.es;
        let n_copies = match cfg.mode {
            AltMinMode::Trajectory => cfg.k.pow((cfg.l - i) as u32),
            _ => 1,
        };

        // Distribution of each distinct copy in the new eigenbasis.
        let (distinct, counts, dist_rows): (Vec<usize>, Vec<usize>, Vec<Vec<f64>>) = match (&ens, cfg.mode) {
            (Ensemble::Initial(psi), _) => (vec![0], vec![n_copies], vec![es.probabilities(psi.amplitudes())?]),
            (Ensemble::Weights(w), AltMinMode::ExactDistribution) => {
                (vec![0], vec![1], vec![es.transfer_from(prev.as_ref().expect("basis"), w)?])
            }
            (Ensemble::Weights(_), _) => {
                let mut c: BTreeMap<usize, usize> = BTreeMap::new();
                for &a in &pop {
                    *c.entry(a).or_default() += 1;
                }
                let d: Vec<usize> = c.keys().copied().collect();
                let r = es.overlap_rows(prev.as_ref().expect("basis"), &d)?;
                (d, c.values().copied().collect(), r)
            }
        };
        let total: usize = counts.iter().sum();
        let mut energy_current = 0.0;
        let mut quartile = 0.0;
        for (c, r) in counts.iter().zip(&dist_rows) {
            let f = *c as f64 / total as f64;
            energy_current += f * mean_of_distribution(es.energies(), r);
            quartile += f * quartile_of_distribution(es.energies(), r)?;
        }

        // Next ensemble.
        let next = match cfg.mode {
            AltMinMode::ExactDistribution => {
                let mut q = min_of_k(&dist_rows[0], cfg.k);
                let s: f64 = q.iter().sum();
                q.iter_mut().for_each(|x| *x /= s);
                q
            }
            _ => {
                let samplers: Vec<Sampler> = dist_rows.iter().map(|r| Sampler::new(r)).collect();
                let copy_row: Vec<usize> = match &ens {
                    Ensemble::Initial(_) => vec![0; n_copies],
                    Ensemble::Weights(_) => {
                        let pos: BTreeMap<usize, usize> = distinct.iter().enumerate().map(|(j, &a)| (a, j)).collect();
                        pop.iter().map(|a| pos[a]).collect()
                    }
                };
                let next_pop: Vec<usize> = match cfg.mode {
                    AltMinMode::Trajectory => copy_row
                        .chunks(cfg.k)
                        .map(|batch| batch.iter().map(|&j| samplers[j].sample(&mut mrng)).min().expect("K ≥ 1"))
                        .collect(),
                    _ => vec![(0..cfg.k).map(|_| samplers[copy_row[0]].sample(&mut mrng)).min().expect("K ≥ 1")],
                };
                let mut w = vec![0.0; es.dim()];
                for &a in &next_pop {
                    w[a] += 1.0 / next_pop.len() as f64;
                }
                pop = next_pop;
                w
            }
        };

        if let Some(op) = &diag_op {
            let (a, c, b) = match &cur.alteration {
                Some(v) => {
                    let (a, c) = match &ens {
                        Ensemble::Initial(psi) => (psi.expectation(op)?, psi.expectation(v)?),
                        Ensemble::Weights(w) => {
                            let p = prev.as_ref().expect("basis");
                            (expect_op(p, w, op)?, expect_op(p, w, v)?)
                        }
                    };
                    (a, c, expect_op(es, &next, v)?)
                }
                None => (0.0, 0.0, 0.0),
            };
            diag_rows.push(DiagnosticRow { iteration: i, k: energy_current - quartile, a, b, c });
        }

        rows.push(TraceRow {
            iteration: i,
            energy_base,
            energy_current: Some(energy_current),
            quartile: Some(quartile),
            measurement_count: cfg.k,
            hamiltonian_id: Some(i as u64),
            watch,
        });
        ens = Ensemble::Weights(next);
        prev = Some(cur.es);
    }
    Ok(RunTrace {
        rows,
        physical_copy_count: physical_copy_count(cfg.k, cfg.l),
        diagnostics: cfg.diagnostics.then_some(diag_rows),
    })
}
