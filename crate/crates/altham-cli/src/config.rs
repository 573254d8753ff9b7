//! Experiment configuration: a TOML file with one top-level `kind` and a section per experiment.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_cap: Option<usize>,
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub altmin: Option<AltminSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variational: Option<VariationalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anneal: Option<AnnealSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory: Option<TheorySpec>,
}

fn one() -> usize {
    1
}

fn four() -> usize {
    4
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Profile,
    Altmin,
    Variational,
    Anneal,
    TheoryCheck,
    ModelDump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    /// `Σ_(i,j) (I + Z_iZ_j)/2` on a random regular graph, or on an edge list.
    Maxcut {
        n: usize,
        degree: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edges: Option<String>,
    },
    /// Heisenberg coupling on a random regular graph.
    Qmc {
        n: usize,
        degree: usize,
        #[serde(default)]
        form: QmcFormSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edges: Option<String>,
    },
    Aklt {
        n: usize,
        #[serde(default)]
        periodic: bool,
    },
    Well {
        n: usize,
        anchors: usize,
        #[serde(default)]
        placement: PlacementSpec,
    },
    Grover {
        n: usize,
        #[serde(default)]
        marked: usize,
    },
    /// `E_i = scale · i`.
    Ramp { n: usize, scale: f64 },
}

impl ModelSpec {
    pub fn n(&self) -> usize {
        match self {
            ModelSpec::Maxcut { n, .. }
            | ModelSpec::Qmc { n, .. }
            | ModelSpec::Aklt { n, .. }
            | ModelSpec::Well { n, .. }
            | ModelSpec::Grover { n, .. }
            | ModelSpec::Ramp { n, .. } => *n,
        }
    }

    pub fn site_dim(&self) -> usize {
        match self {
            ModelSpec::Aklt { .. } => 3,
            _ => 2,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, ModelSpec::Maxcut { .. } | ModelSpec::Well { .. } | ModelSpec::Grover { .. } | ModelSpec::Ramp { .. })
    }

    pub fn is_local(&self) -> bool {
        matches!(self, ModelSpec::Maxcut { .. } | ModelSpec::Qmc { .. } | ModelSpec::Aklt { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QmcFormSpec {
    /// `(I + SWAP)/2` per edge: projector terms, usable with the local family.
    #[default]
    Projector,
    /// `(I + XX + YY + ZZ)/4` per edge.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementSpec {
    #[default]
    Random,
    /// Energy-1 anchors next to the ground anchors.
    Adjacent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Local,
    Hamming,
    Band,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Base,
    Altered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub stride: usize,
    pub source: Side,
    pub target: Side,
    pub family: FamilyName,
    #[serde(default = "four")]
    pub band_t: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSpec {
    Exact,
    Trajectory,
    SinglePath,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialSpec {
    /// Equal superposition on every site.
    #[default]
    Uniform,
    Haar,
    Basis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AltminSpec {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub families: Vec<FamilyName>,
    #[serde(default = "four")]
    pub band_t: usize,
    pub mode: ModeSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population_cap: Option<usize>,
    #[serde(default)]
    pub diagnostics: bool,
    /// Measurement replicates per Hamiltonian sequence (trajectory modes).
    #[serde(default = "one")]
    pub replicates: usize,
    /// Computational-basis index whose weight is recorded per row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub watch: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleName {
    Standard,
    Hybrid,
    Altered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaSpec {
    #[default]
    LineSearch,
    /// `θ = c·Σ|g_i|/m` with `c = theta_value`.
    Prescribed,
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationalSpec {
    pub steps: usize,
    pub schedules: Vec<ScheduleName>,
    #[serde(default)]
    pub theta: ThetaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_value: Option<f64>,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_index: Option<usize>,
    #[serde(default = "stall_window")]
    pub stall_window: usize,
    #[serde(default = "stall_tol")]
    pub stall_tol: f64,
}

fn stall_window() -> usize {
    5
}

fn stall_tol() -> f64 {
    1e-4
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleSpec {
    Linear,
    #[default]
    Geometric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnnealModeSpec {
    #[default]
    Chain,
    Distribution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealSpec {
    pub steps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub mode: AnnealModeSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    /// Local family: expected variance vs closed form and bounds.
    Local,
    /// Sparse family: moments vs closed forms and bounds.
    Sparse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheorySpec {
    pub check: CheckName,
    pub samples: usize,
    pub states: usize,
    /// 0 for pure states, otherwise the number of mixed components.
    #[serde(default)]
    pub mixed_rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<FamilyName>,
    #[serde(default = "four")]
    pub band_t: usize,
}

/// A schema violation, naming the offending key.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemaError {
    pub key: String,
    pub msg: String,
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.key, self.msg)
    }
}

fn bad<T>(key: &str, msg: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError { key: key.into(), msg: msg.into() })
}

pub fn parse(text: &str) -> Result<ExperimentConfig, SchemaError> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let key = e
            .span()
            .map(|s| text[..s.start].lines().count().max(1))
            .map(|line| format!("line {line}"))
            .unwrap_or_else(|| "config".into());
        SchemaError { key, msg }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn to_toml(cfg: &ExperimentConfig) -> String {
    toml::to_string_pretty(cfg).expect("config serializes")
}

impl ExperimentConfig {
    /// Checks every cross-field constraint that parsing alone cannot.
    pub fn validate(&self) -> Result<(), SchemaError> {
        if self.repetitions == 0 {
            return bad("repetitions", "must be ≥ 1");
        }
        self.validate_model()?;
        match self.kind {
            Kind::Profile => {
                let Some(p) = &self.profile else { return bad("profile", "missing section for kind = \"profile\"") };
                if p.stride == 0 {
                    return bad("profile.stride", "must be ≥ 1");
                }
                self.check_family(p.family, p.band_t, "profile.family")?;
            }
            Kind::Altmin => {
                let Some(a) = &self.altmin else { return bad("altmin", "missing section for kind = \"altmin\"") };
                if a.l == 0 {
                    return bad("altmin.L", "must be ≥ 1");
                }
                if a.k == 0 {
                    return bad("altmin.K", "must be ≥ 1");
                }
                if a.families.is_empty() {
                    return bad("altmin.families", "must list at least one family");
                }
                for f in &a.families {
                    self.check_family(*f, a.band_t, "altmin.families")?;
                }
                if a.diagnostics && a.families.iter().any(|f| *f != FamilyName::Local) {
                    return bad("altmin.diagnostics", "only available for the local family");
                }
                if a.replicates == 0 {
                    return bad("altmin.replicates", "must be ≥ 1");
                }
                check_initial(a.initial, a.basis_index, self.total_dim(), "altmin.basis_index")?;
                if a.replicates > 1 && a.mode == ModeSpec::Exact {
                    return bad("altmin.replicates", "exact mode is deterministic; use 1");
                }
                if let Some(w) = a.watch {
                    if w >= self.total_dim() {
                        return bad("altmin.watch", "index out of range");
                    }
                }
            }
            Kind::Variational => {
                let Some(v) = &self.variational else {
                    return bad("variational", "missing section for kind = \"variational\"");
                };
                if !self.model.is_local() {
                    return bad("model.type", "variational runs need a local model");
                }
                if v.schedules.is_empty() {
                    return bad("variational.schedules", "must list at least one schedule");
                }
                if v.schedules.iter().any(|s| *s != ScheduleName::Standard) && matches!(self.model, ModelSpec::Qmc { form: QmcFormSpec::Literal, .. }) {
                    return bad("model.form", "altered schedules need projector terms");
                }
                match (v.theta, v.theta_value) {
                    (ThetaSpec::LineSearch, None) => {}
                    (ThetaSpec::LineSearch, Some(_)) => return bad("variational.theta_value", "not used with line-search"),
                    (_, None) => return bad("variational.theta_value", "required for this theta mode"),
                    (ThetaSpec::Fixed, Some(t)) if !(t.abs() < 1.0) => return bad("variational.theta_value", "|θ| must be < 1"),
                    (_, Some(t)) if !t.is_finite() => return bad("variational.theta_value", "must be finite"),
                    _ => {}
                }
                if v.stall_window == 0 {
                    return bad("variational.stall_window", "must be ≥ 1");
                }
                check_initial(v.initial, v.basis_index, self.total_dim(), "variational.basis_index")?;
            }
            Kind::Anneal => {
                let Some(a) = &self.anneal else { return bad("anneal", "missing section for kind = \"anneal\"") };
                if !self.model.is_diagonal() {
                    return bad("model.type", "annealing needs a diagonal model");
                }
                if a.steps == 0 {
                    return bad("anneal.steps", "must be ≥ 1");
                }
                if !(a.beta_start > 0.0) {
                    return bad("anneal.beta_start", "must be > 0");
                }
                if !(a.beta_end >= a.beta_start && a.beta_end.is_finite()) {
                    return bad("anneal.beta_end", "must be finite and ≥ beta_start");
                }
            }
            Kind::TheoryCheck => {
                let Some(t) = &self.theory else { return bad("theory", "missing section for kind = \"theory-check\"") };
                if t.samples < 100 {
                    return bad("theory.samples", "must be ≥ 100");
                }
                if t.states == 0 {
                    return bad("theory.states", "must be ≥ 1");
                }
                match t.check {
                    CheckName::Local => {
                        if !self.model.is_local() || matches!(self.model, ModelSpec::Qmc { form: QmcFormSpec::Literal, .. }) {
                            return bad("model.type", "local check needs a model with projector terms");
                        }
                        if t.pattern.is_some() {
                            return bad("theory.pattern", "only used by the sparse check");
                        }
                    }
                    CheckName::Sparse => {
                        match t.pattern {
                            Some(FamilyName::Hamming) => {}
                            Some(FamilyName::Band) if t.band_t >= 1 => {}
                            Some(FamilyName::Band) => return bad("theory.band_t", "must be ≥ 1"),
                            _ => return bad("theory.pattern", "sparse check needs pattern = \"hamming\" or \"band\""),
                        }
                        if !self.model.is_diagonal() {
                            return bad("model.type", "sparse check needs a diagonal model");
                        }
                        if t.mixed_rank != 0 {
                            return bad("theory.mixed_rank", "sparse check takes pure states");
                        }
                    }
                }
            }
            Kind::ModelDump => {}
        }
        Ok(())
    }

    fn validate_model(&self) -> Result<(), SchemaError> {
        let m = &self.model;
        let n = m.n();
        let min_n = if matches!(m, ModelSpec::Aklt { .. } | ModelSpec::Maxcut { .. } | ModelSpec::Qmc { .. }) { 2 } else { 1 };
        if n < min_n {
            return bad("model.n", format!("must be ≥ {min_n}"));
        }
        match m {
            ModelSpec::Maxcut { degree, edges, .. } | ModelSpec::Qmc { degree, edges, .. } => {
                if edges.is_none() && (*degree == 0 || *degree >= n || (n * degree) % 2 == 1) {
                    return bad("model.degree", format!("no {degree}-regular graph on {n} vertices"));
                }
            }
            ModelSpec::Well { anchors, placement, .. } => {
                if n < 2 {
                    return bad("model.n", "must be ≥ 2");
                }
                let room = match placement {
                    PlacementSpec::Random => (1usize << n.min(40)) - 2,
                    PlacementSpec::Adjacent => 2 * n,
                };
                if *anchors > room {
                    return bad("model.anchors", format!("at most {room} fit"));
                }
            }
            ModelSpec::Grover { marked, .. } => {
                if n < 64 && *marked >= 1usize << n {
                    return bad("model.marked", "out of range");
                }
            }
            ModelSpec::Ramp { scale, .. } => {
                if !(*scale >= 0.0 && scale.is_finite()) {
                    return bad("model.scale", "must be finite and ≥ 0");
                }
            }
            ModelSpec::Aklt { .. } => {}
        }
        Ok(())
    }

    fn check_family(&self, f: FamilyName, t: usize, key: &str) -> Result<(), SchemaError> {
        match f {
            FamilyName::Local => {
                if !self.model.is_local() {
                    return bad(key, "local family needs a local model");
                }
                if matches!(self.model, ModelSpec::Qmc { form: QmcFormSpec::Literal, .. }) {
                    return bad("model.form", "local family needs projector terms");
                }
            }
            FamilyName::Hamming | FamilyName::Band => {
                if !self.model.is_diagonal() {
                    return bad(key, "sparse families need a diagonal model");
                }
                if f == FamilyName::Band && t == 0 {
                    return bad("band_t", "must be ≥ 1");
                }
            }
        }
        Ok(())
    }

    /// Register dimension implied by the model, saturating.
    pub fn total_dim(&self) -> usize {
        (self.model.site_dim() as u128).checked_pow(self.model.n() as u32).map_or(usize::MAX, |d| d.min(usize::MAX as u128) as usize)
    }
}

fn check_initial(init: InitialSpec, idx: Option<usize>, dim: usize, key: &str) -> Result<(), SchemaError> {
    match (init, idx) {
        (InitialSpec::Basis, None) => bad(key, "required when initial = \"basis\""),
        (InitialSpec::Basis, Some(i)) if i >= dim => bad(key, format!("out of range for dimension {dim}")),
        (InitialSpec::Basis, Some(_)) => Ok(()),
        (_, Some(_)) => bad(key, "only used when initial = \"basis\""),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALTMIN: &str = r#"
kind = "altmin"
seed = 7

[model]
type = "well"
n = 6
anchors = 3

[altmin]
L = 3
K = 2
families = ["hamming"]
mode = "exact"
"#;

    #[test]
    fn parses_and_defaults() {
        let c = parse(ALTMIN).unwrap();
        assert_eq!(c.repetitions, 1);
        let a = c.altmin.unwrap();
        assert_eq!((a.l, a.k, a.band_t, a.replicates), (3, 2, 4, 1));
        assert_eq!(a.initial, InitialSpec::Uniform);
        assert_eq!(c.model, ModelSpec::Well { n: 6, anchors: 3, placement: PlacementSpec::Random });
    }

    #[test]
    fn unknown_key_is_rejected() {
        let e = parse(&ALTMIN.replace("K = 2", "K = 2\nQ = 1")).unwrap_err();
        assert!(e.msg.contains("unknown field"), "{e}");
    }

    #[test]
    fn cross_field_errors_name_the_key() {
        let cases = [
            (ALTMIN.replace("\"hamming\"", "\"local\""), "altmin.families"),
            (ALTMIN.replace("L = 3", "L = 0"), "altmin.L"),
            (ALTMIN.replace("anchors = 3", "anchors = 99"), "model.anchors"),
            (ALTMIN.replace("mode = \"exact\"", "mode = \"exact\"\nreplicates = 2"), "altmin.replicates"),
            (ALTMIN.replace("[altmin]", "[anneal]\nsteps = 1\nbeta_start = 1.0\nbeta_end = 2.0\n[altmin]").replace("kind = \"altmin\"", "kind = \"profile\""), "profile"),
            (ALTMIN.replace("mode = \"exact\"", "mode = \"exact\"\ninitial = \"basis\""), "altmin.basis_index"),
        ];
        for (text, key) in cases {
            assert_eq!(parse(&text).unwrap_err().key, key, "{text}");
        }
    }

    #[test]
    fn dimension_is_saturating() {
        let mut c = parse(ALTMIN).unwrap();
        assert_eq!(c.total_dim(), 64);
        c.model = ModelSpec::Aklt { n: 200, periodic: false };
        assert_eq!(c.total_dim(), usize::MAX);
    }
}
