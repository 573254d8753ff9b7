//! Expected-variance identities for the altered families, checked against Monte Carlo.

mod fit;
mod local;
mod sparse;

pub use fit::{loglog_slope, mean_stderr};
pub use local::{expected_variance_local_closed_form, local_variance_mc, theorem1_bound_check};
pub use sparse::{sparse_moment_closed_forms, sparse_moments_mc, theorem2_bound_check, SparseMoments, SparseMomentsMc};

/// Monte Carlo estimate of an expected variance next to its closed form and bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceReport {
    pub mc_estimate: f64,
    pub stderr: f64,
    pub closed_form: f64,
    /// The bound as stated for the family.
    pub lower_bound: f64,
    /// A bound that follows from the closed form.
    pub corrected_bound: f64,
    pub n_samples: usize,
}

impl VarianceReport {
    /// `mc_estimate < lower_bound − 3·stderr`.
    pub fn violates_bound(&self) -> bool {
        self.mc_estimate < self.lower_bound - 3.0 * self.stderr
    }

    pub fn violates_corrected_bound(&self) -> bool {
        self.mc_estimate < self.corrected_bound - 3.0 * self.stderr
    }

    /// `|mc − closed| ≤ 3·stderr` (with a small absolute floor for zero-variance cases).
    pub fn matches_closed_form(&self) -> bool {
        (self.mc_estimate - self.closed_form).abs() <= 3.0 * self.stderr + 1e-12 * (1.0 + self.closed_form.abs())
    }

    pub fn csv_header() -> [&'static str; 7] {
        ["mc_estimate", "stderr", "closed_form", "lower_bound", "corrected_bound", "n_samples", "violates_bound"]
    }

    pub fn csv_record(&self) -> [String; 7] {
        [
            format!("{:.12e}", self.mc_estimate),
            format!("{:.12e}", self.stderr),
            format!("{:.12e}", self.closed_form),
            format!("{:.12e}", self.lower_bound),
            format!("{:.12e}", self.corrected_bound),
            self.n_samples.to_string(),
            self.violates_bound().to_string(),
        ]
    }
}
