//! Named configurations for the standard figures.

use crate::config::*;

pub const NAMES: &[&str] = &[
    "fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig5c", "fig5d", "fig6a",
    "fig6b", "fig8a", "fig8b", "fig9a", "fig9b", "fig9c", "check-local", "check-sparse",
];

fn base(kind: Kind, model: ModelSpec) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        seed: 0,
        repetitions: 1,
        out_dir: None,
        dim_cap: None,
        model,
        profile: None,
        altmin: None,
        variational: None,
        anneal: None,
        theory: None,
    }
}

fn qmc(n: usize, degree: usize) -> ModelSpec {
    ModelSpec::Qmc { n, degree, form: QmcFormSpec::Projector, edges: None }
}

fn maxcut(n: usize, degree: usize) -> ModelSpec {
    ModelSpec::Maxcut { n, degree, edges: None }
}

fn well(placement: PlacementSpec) -> ModelSpec {
    ModelSpec::Well { n: 12, anchors: 10, placement }
}

fn profile(model: ModelSpec, source: Side, target: Side, family: FamilyName) -> ExperimentConfig {
    let mut c = base(Kind::Profile, model);
    c.profile = Some(ProfileSpec { stride: 50, source, target, family, band_t: 4 });
    c
}

fn altmin(model: ModelSpec, families: Vec<FamilyName>, l: usize) -> ExperimentConfig {
    let mut c = base(Kind::Altmin, model);
    c.altmin = Some(AltminSpec {
        l,
        k: 3,
        families,
        band_t: 4,
        mode: ModeSpec::Exact,
        initial: InitialSpec::Uniform,
        basis_index: None,
        population_cap: None,
        diagnostics: false,
        replicates: 1,
        watch: None,
    });
    c
}

fn variational(model: ModelSpec, steps: usize, initial: InitialSpec, theta: ThetaSpec, theta_value: Option<f64>) -> ExperimentConfig {
    let mut c = base(Kind::Variational, model);
    c.variational = Some(VariationalSpec {
        steps,
        schedules: vec![ScheduleName::Standard, ScheduleName::Hybrid, ScheduleName::Altered],
        theta,
        theta_value,
        initial,
        basis_index: None,
        stall_window: 5,
        stall_tol: 1e-4,
    });
    c
}

/// The configuration behind `name`; `full` selects the long variants where one exists.
pub fn preset(name: &str, full: bool) -> Option<ExperimentConfig> {
    use FamilyName::*;
    use Side::*;
    Some(match name {
        "fig1a" => profile(qmc(12, 4), Base, Altered, Local),
        "fig1b" => profile(qmc(12, 4), Altered, Altered, Local),
        "fig2a" => profile(ModelSpec::Aklt { n: 8, periodic: false }, Base, Altered, Local),
        "fig2b" => profile(ModelSpec::Aklt { n: 8, periodic: false }, Altered, Altered, Local),
        "fig3a" => profile(maxcut(12, 4), Base, Altered, Local),
        "fig3b" => profile(maxcut(12, 4), Altered, Altered, Local),
        "fig4a" => profile(maxcut(12, 4), Base, Altered, Hamming),
        "fig4b" => profile(maxcut(12, 4), Altered, Altered, Band),
        "fig5a" => altmin(well(PlacementSpec::Random), vec![Hamming], 8),
        "fig5b" => {
            let mut c = base(Kind::Anneal, well(PlacementSpec::Random));
            c.anneal = Some(AnnealSpec {
                steps: 50_000,
                beta_start: 0.1,
                beta_end: 50.0,
                schedule: ScheduleSpec::Linear,
                mode: AnnealModeSpec::Distribution,
            });
            c
        }
        "fig5c" => base(Kind::ModelDump, well(PlacementSpec::Adjacent)),
        "fig5d" => altmin(well(PlacementSpec::Random), vec![Band], 4),
        "fig6a" => variational(ModelSpec::Aklt { n: 8, periodic: false }, 200, InitialSpec::Uniform, ThetaSpec::Prescribed, Some(0.1)),
        "fig6b" => {
            let mut c =
                variational(ModelSpec::Aklt { n: 10, periodic: false }, 200, InitialSpec::Uniform, ThetaSpec::Prescribed, Some(0.1));
            c.dim_cap = Some(1 << 16);
            c
        }
        "fig8a" => altmin(maxcut(12, 4), vec![Local, Hamming, Band], 5),
        "fig8b" => variational(maxcut(10, 6), 50, InitialSpec::Uniform, ThetaSpec::LineSearch, None),
        "fig9a" => altmin(qmc(11, 4), vec![Local], if full { 10 } else { 6 }),
        "fig9b" => variational(qmc(10, 6), 50, InitialSpec::Haar, ThetaSpec::LineSearch, None),
        "fig9c" => variational(qmc(10, 6), 50, InitialSpec::Uniform, ThetaSpec::LineSearch, None),
        "check-local" => {
            let mut c = base(Kind::TheoryCheck, maxcut(8, 3));
            c.theory = Some(TheorySpec { check: CheckName::Local, samples: 2000, states: 5, mixed_rank: 0, pattern: None, band_t: 4 });
            c
        }
        "check-sparse" => {
            let mut c = base(Kind::TheoryCheck, ModelSpec::Ramp { n: 8, scale: 1.0 / 16.0 });
            c.theory = Some(TheorySpec {
                check: CheckName::Sparse,
                samples: 2000,
                states: 5,
                mixed_rank: 0,
                pattern: Some(Band),
                band_t: 4,
            });
            c
        }
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates_and_round_trips() {
        for name in NAMES {
            for full in [false, true] {
                let c = preset(name, full).unwrap();
                c.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
                let back = parse(&to_toml(&c)).unwrap();
                assert_eq!(back, c, "{name}");
            }
        }
        assert!(preset("fig7", false).is_none());
    }

    #[test]
    fn full_extends_fig9a() {
        assert_eq!(preset("fig9a", false).unwrap().altmin.unwrap().l, 6);
        assert_eq!(preset("fig9a", true).unwrap().altmin.unwrap().l, 10);
    }
}
