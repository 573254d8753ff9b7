use std::path::Path;

use crate::altered::{altered_local_sum, sample_local_alteration};
use crate::lowering::{variational_update, GeneratorBasis, ThetaMode};
use crate::models::{csv_err, LocalHamiltonian};
use crate::qop::{LocalSum, StateVector};
use crate::rng::{ids, stream};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScheduleKind {
    /// Always descend on `H`.
    Standard,
    /// Descend on `H` until stalled, then on one sampled `H_φ` until stalled, and so on.
    Hybrid,
    /// Fresh `H_φ` every step.
    Altered,
}

impl ScheduleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleKind::Standard => "standard",
            ScheduleKind::Hybrid => "hybrid",
            ScheduleKind::Altered => "altered",
        }
    }
}

/// Stalled when the relative drop over the last `window` steps is below `rel_tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StallRule {
    pub window: usize,
    pub rel_tol: f64,
}

impl Default for StallRule {
    fn default() -> Self {
        Self { window: 5, rel_tol: 1e-4 }
    }
}

impl StallRule {
    fn stalled(&self, history: &[f64]) -> bool {
        if history.len() <= self.window {
            return false;
        }
        let old = history[history.len() - 1 - self.window];
        let new = history[history.len() - 1];
        old - new <= self.rel_tol * old.abs().max(1e-12)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationalConfig {
    pub steps: usize,
    pub schedule: ScheduleKind,
    pub theta: ThetaMode,
    pub seed: u64,
    pub stall: StallRule,
}

impl VariationalConfig {
    pub fn new(steps: usize, schedule: ScheduleKind, seed: u64) -> Self {
        Self { steps, schedule, theta: ThetaMode::line_search(), seed, stall: StallRule::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationalRow {
    pub step: usize,
    pub energy_base: f64,
    /// Energy against the Hamiltonian the step descended on.
    pub energy_current: f64,
    pub theta: f64,
    pub local_variance: f64,
    pub hamiltonian_id: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationalTrace {
    pub schedule: ScheduleKind,
    pub rows: Vec<VariationalRow>,
}

impl VariationalTrace {
    pub fn final_energy(&self) -> f64 {
        self.rows.last().map(|r| r.energy_base).unwrap_or(f64::NAN)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(["step", "schedule", "energy_base", "energy_current", "theta", "local_variance", "hamiltonian_id"])
            .map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.step.to_string(),
                self.schedule.name().to_string(),
                format!("{:.12e}", r.energy_base),
                format!("{:.12e}", r.energy_current),
                format!("{:.6e}", r.theta),
                format!("{:.12e}", r.local_variance),
                r.hamiltonian_id.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Signed-gradient descent under one of the three schedules. Energies in `energy_base`
/// are always against `h`.
pub fn altmin_variational(h: &LocalHamiltonian, initial: &StateVector, cfg: &VariationalConfig) -> Result<VariationalTrace> {
    if initial.shape() != h.shape() {
        return Err(Error::DimensionMismatch { expected: h.shape().total_dim(), got: initial.dim() });
    }
    if cfg.stall.window == 0 {
        return Err(Error::InvalidArgument("stall window must be ≥ 1".into()));
    }
    if cfg.schedule != ScheduleKind::Standard {
        h.projectors()?;
    }
    let supports: Vec<Vec<usize>> = h.supports().into_iter().map(|(s, _)| s).collect();
    let basis = GeneratorBasis::on_supports(h.shape(), &supports)?;
    let mut rng = stream(cfg.seed, ids::HAMILTONIAN);
    let mut sample = |id: &mut u64| -> Result<LocalSum> {
        *id += 1;
        altered_local_sum(h, &sample_local_alteration(h, &mut rng)?)
    };

    let mut id = 0u64;
    let mut current: Option<LocalSum> = match cfg.schedule {
        ScheduleKind::Altered => Some(sample(&mut id)?),
        _ => None,
    };
    let base = h.local_sum();
    let mut psi = initial.clone();
    let e0 = psi.expectation(base)?;
    let mut rows = vec![VariationalRow {
        step: 0,
        energy_base: e0,
        energy_current: match &current {
            Some(c) => psi.expectation(c)?,
            None => e0,
        },
        theta: 0.0,
        local_variance: 0.0,
        hamiltonian_id: id,
    }];
    let mut history = vec![rows[0].energy_current];
    for step in 1..=cfg.steps {
        match cfg.schedule {
            ScheduleKind::Standard => {}
            ScheduleKind::Altered => {
                if step > 1 {
                    current = Some(sample(&mut id)?);
                }
            }
            ScheduleKind::Hybrid => {
                if cfg.stall.stalled(&history) {
                    current = Some(sample(&mut id)?);
                    history.clear();
                    history.push(psi.expectation(current.as_ref().expect("sampled"))?);
                }
            }
        }
        let op: &LocalSum = current.as_ref().unwrap_or(base);
        let (next, st) = variational_update(&psi, op, &basis, &cfg.theta)?;
        psi = next;
        history.push(st.energy_after);
        rows.push(VariationalRow {
            step,
            energy_base: psi.expectation(base)?,
            energy_current: st.energy_after,
            theta: st.theta,
            local_variance: st.local_variance,
            hamiltonian_id: id,
        });
    }
    Ok(VariationalTrace { schedule: cfg.schedule, rows })
}
