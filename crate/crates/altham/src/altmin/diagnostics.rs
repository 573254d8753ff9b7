use crate::{Error, Result};

use super::RunTrace;

/// Per-iteration quantities behind the convergence heuristic.
///
/// `a = Tr(ψ_i Σ_j Π_j/d_j)`, which equals `E Tr(ψ_i Σ_j v_{i,j})` over the alteration;
/// `c = Tr(ψ_i Σ_j v_{i,j})` for the realized alteration; `b = Tr(ψ_{i+1} Σ_j v_{i,j})`.
/// All three are 0 on iterations that use the base Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticRow {
    pub iteration: usize,
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AppendixB {
    pub mean_k: f64,
    /// `(1/L) Σ_i a_i − (1/L) Σ_i b_i`.
    pub correlation: f64,
    pub mean_a: f64,
    pub mean_b: f64,
}

pub fn appendix_b_diagnostics(trace: &RunTrace) -> Result<AppendixB> {
    let d = trace.diagnostics.as_ref().ok_or(Error::MissingDiagnostics)?;
    if d.is_empty() {
        return Err(Error::MissingDiagnostics);
    }
    let l = d.len() as f64;
    let mean = |f: fn(&super::DiagnosticRow) -> f64| d.iter().map(f).sum::<f64>() / l;
    let (mean_a, mean_b) = (mean(|r| r.a), mean(|r| r.b));
    Ok(AppendixB { mean_k: mean(|r| r.k), correlation: mean_a - mean_b, mean_a, mean_b })
}
