use std::path::Path;

use crate::models::csv_err;
use crate::Result;

use super::DiagnosticRow;

/// One row per state `ψ_i`, `i = 0..=L`. The last row has no current Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub energy_base: f64,
    pub energy_current: Option<f64>,
    pub quartile: Option<f64>,
    pub measurement_count: usize,
    /// 0 for the base Hamiltonian, `i` for the `i`-th sampled one.
    pub hamiltonian_id: Option<u64>,
    /// Weight of the watched basis state, when one is set.
    pub watch: Option<f64>,
}

impl TraceRow {
    /// `k_i = Tr(ψ_i H_i) − Quar_{H_i}(ψ_i)`.
    pub fn k(&self) -> Option<f64> {
        Some(self.energy_current? - self.quartile?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
    pub physical_copy_count: u128,
    pub diagnostics: Option<Vec<DiagnosticRow>>,
}

/// `K^L + K^{L−1} + … + 1`.
pub fn physical_copy_count(k: usize, l: usize) -> u128 {
    (0..=l).map(|i| (k as u128).pow(i as u32)).sum()
}

impl RunTrace {
    pub fn final_energy(&self) -> f64 {
        self.rows.last().map(|r| r.energy_base).unwrap_or(f64::NAN)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(["iteration", "energy_base", "energy_current", "quartile", "k", "measurements", "hamiltonian_id", "watch"])
            .map_err(csv_err)?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.iteration.to_string(),
                format!("{:.12e}", r.energy_base),
                opt(r.energy_current),
                opt(r.quartile),
                opt(r.k()),
                r.measurement_count.to_string(),
                r.hamiltonian_id.map(|h| h.to_string()).unwrap_or_default(),
                opt(r.watch),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}
