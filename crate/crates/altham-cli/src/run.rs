//! Executes a validated configuration and writes its artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use altham::altered::SparsityPattern;
use altham::altmin::{
    altmin_measurement, altmin_variational, appendix_b_diagnostics, AltMinConfig, AltMinMode, BaseModel, Family,
    FamilySampler, InitialState, RunTrace, ScheduleKind, StallRule, VariationalConfig,
};
use altham::anneal::{anneal, write_anneal_csv, AnnealConfig, AnnealMode, Schedule};
use altham::lowering::ThetaMode;
use altham::models::{
    aklt_hamiltonian, grover_hamiltonian, maxcut_hamiltonian, qmc_hamiltonian, random_regular_graph,
    well_landscape_with, AnchorPlacement, DiagonalLandscape, Graph, LocalHamiltonian, QmcForm, WellSpec,
};
use altham::qop::{Ensemble, EigenSystem, StateVector};
use altham::rng::{derive_seed, ids, stream, Stream};
use altham::stats::{spectral_profile, write_profile_csv};
use altham::theory::{theorem1_bound_check, theorem2_bound_check, VarianceReport};
use altham::tol::{set_tolerances, tolerances};
use altham::Error;

use crate::config::*;

#[derive(Debug)]
pub enum Failure {
    Schema(SchemaError),
    Numerical(Error),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Schema(_) => 1,
            Failure::Numerical(Error::DimensionCap { .. }) => 3,
            Failure::Numerical(_) | Failure::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Schema(e) => write!(f, "config error: {e}"),
            Failure::Numerical(e) => write!(f, "run failed: {e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numerical(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// One artifact with its headline numbers.
#[derive(Clone, Debug)]
pub struct Record {
    pub repetition: usize,
    pub seed: u64,
    pub variant: String,
    pub file: String,
    pub summary: Vec<(String, f64)>,
    pub physical_copy_count: Option<u128>,
}

impl Record {
    pub fn line(&self, kind: Kind) -> String {
        let mut s = format!("{} rep={} seed={} {}", kind_name(kind), self.repetition, self.seed, self.variant);
        for (k, v) in &self.summary {
            if v.fract() == 0.0 && v.abs() < 1e15 {
                s.push_str(&format!(" {k}={v}"));
            } else {
                s.push_str(&format!(" {k}={v:.6}"));
            }
        }
        if let Some(c) = self.physical_copy_count {
            s.push_str(&format!(" physical_copy_count={c}"));
        }
        s.push_str(&format!(" -> {}", self.file));
        s
    }
}

pub fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::Profile => "profile",
        Kind::Altmin => "altmin",
        Kind::Variational => "variational",
        Kind::Anneal => "anneal",
        Kind::TheoryCheck => "theory-check",
        Kind::ModelDump => "model-dump",
    }
}

pub struct Options {
    pub out_dir: PathBuf,
    pub workers: usize,
    /// Directory that relative paths in the config resolve against.
    pub base_dir: PathBuf,
}

/// Checks limits that can be decided before any artifact is written.
pub fn preflight(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let dim = cfg.total_dim();
    let cap = cfg.dim_cap.unwrap_or(tolerances().dim_cap);
    if dim > cap {
        return Err(Failure::Numerical(Error::DimensionCap { dim, cap }));
    }
    if let (Kind::Altmin, Some(a)) = (cfg.kind, &cfg.altmin) {
        for f in &a.families {
            altmin_config(a, *f, 0, 0).validate()?;
        }
    }
    Ok(())
}

pub fn execute(cfg: &ExperimentConfig, opts: &Options) -> Result<Vec<Record>, Failure> {
    preflight(cfg)?;
    if let Some(c) = cfg.dim_cap {
        set_tolerances(altham::tol::Tolerances { dim_cap: c, ..tolerances() });
    }
    fs::create_dir_all(&opts.out_dir)?;

    let reps = cfg.repetitions;
    let results: Mutex<Vec<Option<Result<Vec<Record>, Failure>>>> = Mutex::new((0..reps).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let work = || loop {
        let r = next.fetch_add(1, Ordering::SeqCst);
        if r >= reps {
            break;
        }
        let out = run_repetition(cfg, r, opts);
        results.lock().unwrap()[r] = Some(out);
    };
    let workers = opts.workers.clamp(1, reps);
    if workers == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(work);
            }
        });
    }

    let mut records = Vec::new();
    for r in results.into_inner().unwrap() {
        records.extend(r.expect("every repetition ran")?);
    }
    write_manifest(cfg, &records, &opts.out_dir.join("manifest.toml"))?;
    Ok(records)
}

fn write_manifest(cfg: &ExperimentConfig, records: &[Record], path: &Path) -> Result<(), Failure> {
    let mut echo = cfg.clone();
    echo.out_dir = None;
    let mut doc = toml::Table::new();
    doc.insert("config".into(), toml::Value::try_from(&echo).map_err(|e| Failure::Io(e.to_string()))?);
    let runs = records
        .iter()
        .map(|r| {
            let mut t = toml::Table::new();
            t.insert("repetition".into(), (r.repetition as i64).into());
            t.insert("seed".into(), r.seed.to_string().into());
            t.insert("variant".into(), r.variant.clone().into());
            t.insert("file".into(), r.file.clone().into());
            if let Some(c) = r.physical_copy_count {
                t.insert("physical_copy_count".into(), i64::try_from(c).map_or_else(|_| c.to_string().into(), toml::Value::from));
            }
            let mut s = toml::Table::new();
            for (k, v) in &r.summary {
                s.insert(k.clone(), (*v).into());
            }
            t.insert("summary".into(), s.into());
            toml::Value::Table(t)
        })
        .collect::<Vec<_>>();
    doc.insert("runs".into(), runs.into());
    fs::write(path, toml::to_string_pretty(&doc).map_err(|e| Failure::Io(e.to_string()))?)?;
    Ok(())
}

enum Built {
    Local { h: LocalHamiltonian, graph: Option<Graph> },
    Land(DiagonalLandscape),
}

impl Built {
    fn base(&self) -> BaseModel<'_> {
        match self {
            Built::Local { h, .. } => BaseModel::Local(h),
            Built::Land(l) => BaseModel::Landscape(l),
        }
    }

    fn local(&self) -> Result<&LocalHamiltonian, Failure> {
        match self {
            Built::Local { h, .. } => Ok(h),
            Built::Land(_) => Err(Failure::Numerical(Error::InvalidArgument("model is not local".into()))),
        }
    }

    fn landscape(&self) -> Result<DiagonalLandscape, Failure> {
        match self {
            Built::Land(l) => Ok(l.clone()),
            Built::Local { h, .. } => {
                let d = h.diagonal().ok_or_else(|| Error::InvalidArgument("model is not diagonal".into()))?;
                Ok(DiagonalLandscape::new(h.shape().n_sites(), d, vec![])?)
            }
        }
    }
}

fn graph(n: usize, degree: usize, edges: &Option<String>, base_dir: &Path, rng: &mut Stream) -> Result<Graph, Failure> {
    Ok(match edges {
        Some(p) => Graph::read_edge_list(&base_dir.join(p), Some(n), Some(degree))?,
        None => random_regular_graph(n, degree, rng)?,
    })
}

fn build_model(spec: &ModelSpec, seed: u64, base_dir: &Path) -> Result<Built, Failure> {
    let mut rng = stream(seed, ids::MODEL);
    Ok(match spec {
        ModelSpec::Maxcut { n, degree, edges } => {
            let g = graph(*n, *degree, edges, base_dir, &mut rng)?;
            Built::Local { h: maxcut_hamiltonian(&g)?, graph: Some(g) }
        }
        ModelSpec::Qmc { n, degree, form, edges } => {
            let g = graph(*n, *degree, edges, base_dir, &mut rng)?;
            let form = match form {
                QmcFormSpec::Projector => QmcForm::Projector,
                QmcFormSpec::Literal => QmcForm::Literal,
            };
            Built::Local { h: qmc_hamiltonian(&g, form)?, graph: Some(g) }
        }
        ModelSpec::Aklt { n, periodic } => Built::Local { h: aklt_hamiltonian(*n, *periodic)?, graph: None },
        ModelSpec::Well { n, anchors, placement } => {
            let placement = match placement {
                PlacementSpec::Random => AnchorPlacement::Random(*anchors),
                PlacementSpec::Adjacent => AnchorPlacement::AdjacentToGround(*anchors),
            };
            Built::Land(well_landscape_with(&WellSpec { placement, ..WellSpec::standard(*n, *anchors) }, &mut rng)?)
        }
        ModelSpec::Grover { n, marked } => Built::Land(grover_hamiltonian(*n, *marked)?),
        ModelSpec::Ramp { n, scale } => {
            let e = (0..1usize << n).map(|i| scale * i as f64).collect();
            Built::Land(DiagonalLandscape::new(*n, e, vec![(0, 0.0)])?)
        }
    })
}

fn family(f: FamilyName, t: usize) -> Family {
    match f {
        FamilyName::Local => Family::Local,
        FamilyName::Hamming => Family::SparseHamming,
        FamilyName::Band => Family::SparseBand { t },
    }
}

fn family_label(f: FamilyName) -> &'static str {
    match f {
        FamilyName::Local => "local",
        FamilyName::Hamming => "hamming",
        FamilyName::Band => "band",
    }
}

fn initial(spec: InitialSpec, idx: Option<usize>) -> InitialState {
    match spec {
        InitialSpec::Uniform => InitialState::UniformProduct,
        InitialSpec::Haar => InitialState::Haar,
        InitialSpec::Basis => InitialState::Basis(idx.expect("validated")),
    }
}

fn altmin_config(a: &AltminSpec, f: FamilyName, seed: u64, replicate: u64) -> AltMinConfig {
    let mode = match a.mode {
        ModeSpec::Exact => AltMinMode::ExactDistribution,
        ModeSpec::Trajectory => AltMinMode::Trajectory,
        ModeSpec::SinglePath => AltMinMode::SinglePath,
    };
    let mut c = AltMinConfig::new(a.l, a.k, family(f, a.band_t), mode, seed);
    c.replicate = replicate;
    if let Some(p) = a.population_cap {
        c.population_cap = p;
    }
    c.diagnostics = a.diagnostics;
    c.watch = a.watch;
    c
}

fn run_repetition(cfg: &ExperimentConfig, r: usize, opts: &Options) -> Result<Vec<Record>, Failure> {
    let seed = derive_seed(cfg.seed, r as u64);
    let model = build_model(&cfg.model, seed, &opts.base_dir)?;
    let out = &opts.out_dir;
    let rec = |variant: String, file: String, summary: Vec<(String, f64)>, pcc: Option<u128>| Record {
        repetition: r,
        seed,
        variant,
        file,
        summary,
        physical_copy_count: pcc,
    };
    let mut records = Vec::new();
    match cfg.kind {
        Kind::Profile => {
            let p = cfg.profile.as_ref().expect("validated");
            let base = model.base();
            let mut sampler = FamilySampler::new(base, family(p.family, p.band_t), seed, false)?;
            let mut base_es: Option<EigenSystem> = None;
            let mut side = |s: Side| -> Result<EigenSystem, Failure> {
                Ok(match s {
                    Side::Base => match &base_es {
                        Some(es) => es.clone(),
                        None => {
                            let es = base.eigensystem()?;
                            base_es = Some(es.clone());
                            es
                        }
                    },
                    Side::Altered => sampler.sample()?.es,
                })
            };
            let src = side(p.source)?;
            let tgt = side(p.target)?;
            let rows = spectral_profile(&src, &tgt, p.stride)?;
            let file = format!("profile_rep{r}.csv");
            write_profile_csv(&rows, &out.join(&file))?;
            let gap = rows.iter().map(|x| x.mean - x.quartile).sum::<f64>() / rows.len().max(1) as f64;
            records.push(rec(
                format!("family={}", family_label(p.family)),
                file,
                vec![("rows".into(), rows.len() as f64), ("mean_minus_quartile".into(), gap)],
                None,
            ));
        }
        Kind::Altmin => {
            let a = cfg.altmin.as_ref().expect("validated");
            let base = model.base();
            let psi0 = initial(a.initial, a.basis_index).build(&base.shape(), &mut stream(seed, ids::INITIAL))?;
            for &f in &a.families {
                for j in 0..a.replicates {
                    let c = altmin_config(a, f, seed, j as u64);
                    let trace = altmin_measurement(base, &psi0, &c)?;
                    let stem = if a.replicates > 1 {
                        format!("altmin_{}_rep{r}_m{j}", family_label(f))
                    } else {
                        format!("altmin_{}_rep{r}", family_label(f))
                    };
                    let file = format!("{stem}.csv");
                    trace.write_csv(&out.join(&file))?;
                    let mut summary = vec![
                        ("initial_energy".into(), trace.rows[0].energy_base),
                        ("final_energy".into(), trace.final_energy()),
                    ];
                    if let Some(w) = trace.rows.last().and_then(|x| x.watch) {
                        summary.push(("final_watch".into(), w));
                    }
                    if a.diagnostics {
                        write_diagnostics(&trace, &out.join(format!("{stem}_diagnostics.csv")))?;
                        let d = appendix_b_diagnostics(&trace)?;
                        summary.push(("mean_k".into(), d.mean_k));
                        summary.push(("correlation".into(), d.correlation));
                    }
                    records.push(rec(
                        format!("family={} replicate={j}", family_label(f)),
                        file,
                        summary,
                        Some(trace.physical_copy_count),
                    ));
                }
            }
        }
        Kind::Variational => {
            let v = cfg.variational.as_ref().expect("validated");
            let h = model.local()?;
            let psi0 = initial(v.initial, v.basis_index).build(h.shape(), &mut stream(seed, ids::INITIAL))?;
            let theta = match (v.theta, v.theta_value) {
                (ThetaSpec::LineSearch, _) => ThetaMode::line_search(),
                (ThetaSpec::Prescribed, Some(c)) => ThetaMode::Prescribed { c },
                (ThetaSpec::Fixed, Some(t)) => ThetaMode::Fixed(t),
                _ => unreachable!("validated"),
            };
            for &s in &v.schedules {
                let schedule = match s {
                    ScheduleName::Standard => ScheduleKind::Standard,
                    ScheduleName::Hybrid => ScheduleKind::Hybrid,
                    ScheduleName::Altered => ScheduleKind::Altered,
                };
                let c = VariationalConfig {
                    steps: v.steps,
                    schedule,
                    theta: theta.clone(),
                    seed,
                    stall: StallRule { window: v.stall_window, rel_tol: v.stall_tol },
                };
                let trace = altmin_variational(h, &psi0, &c)?;
                let file = format!("variational_{}_rep{r}.csv", schedule.name());
                trace.write_csv(&out.join(&file))?;
                records.push(rec(
                    format!("schedule={}", schedule.name()),
                    file,
                    vec![
                        ("initial_energy".into(), trace.rows[0].energy_base),
                        ("final_energy".into(), trace.final_energy()),
                    ],
                    None,
                ));
            }
        }
        Kind::Anneal => {
            let a = cfg.anneal.as_ref().expect("validated");
            let land = model.landscape()?;
            let c = AnnealConfig {
                steps: a.steps,
                beta_start: a.beta_start,
                beta_end: a.beta_end,
                schedule: match a.schedule {
                    ScheduleSpec::Linear => Schedule::Linear,
                    ScheduleSpec::Geometric => Schedule::Geometric,
                },
                mode: match a.mode {
                    AnnealModeSpec::Chain => AnnealMode::Chain,
                    AnnealModeSpec::Distribution => AnnealMode::Distribution,
                },
                seed,
            };
            let rows = anneal(&land, &c)?;
            let file = format!("anneal_rep{r}.csv");
            write_anneal_csv(&rows, &out.join(&file))?;
            let last = rows.last().expect("steps ≥ 1");
            records.push(rec(
                "anneal".into(),
                file,
                vec![("final_energy".into(), last.current), ("best_energy".into(), last.best)],
                None,
            ));
        }
        Kind::TheoryCheck => {
            let t = cfg.theory.as_ref().expect("validated");
            let mut rng = stream(seed, ids::MONTE_CARLO);
            let mut reports = Vec::with_capacity(t.states);
            match t.check {
                CheckName::Local => {
                    let h = model.local()?;
                    for _ in 0..t.states {
                        let rho = if t.mixed_rank == 0 {
                            Ensemble::pure(StateVector::haar(h.shape(), &mut rng))
                        } else {
                            Ensemble::random_mixed(h.shape(), t.mixed_rank, &mut rng)
                        };
                        reports.push(theorem1_bound_check(h, &rho, t.samples, &mut rng)?);
                    }
                }
                CheckName::Sparse => {
                    let land = model.landscape()?;
                    let lo = land.min_energy();
                    let land = DiagonalLandscape::new(land.n_bits(), land.energies().iter().map(|e| e - lo).collect(), vec![])?;
                    let pattern = match t.pattern {
                        Some(FamilyName::Band) => SparsityPattern::band(land.n_bits(), t.band_t)?,
                        _ => SparsityPattern::hamming(land.n_bits())?,
                    };
                    for _ in 0..t.states {
                        let psi = StateVector::haar(&land.shape(), &mut rng);
                        reports.push(theorem2_bound_check(&land, &pattern, &psi, t.samples, &mut rng)?);
                    }
                }
            }
            let file = format!("theory_rep{r}.csv");
            write_reports(&reports, &out.join(&file))?;
            let count = |f: fn(&VarianceReport) -> bool| reports.iter().filter(|x| f(x)).count() as f64;
            records.push(rec(
                format!("check={}", if t.check == CheckName::Local { "local" } else { "sparse" }),
                file,
                vec![
                    ("states".into(), reports.len() as f64),
                    ("closed_form_matches".into(), count(VarianceReport::matches_closed_form)),
                    ("bound_violations".into(), count(VarianceReport::violates_bound)),
                    ("corrected_bound_violations".into(), count(VarianceReport::violates_corrected_bound)),
                ],
                None,
            ));
        }
        Kind::ModelDump => match &model {
            Built::Local { graph: Some(g), h } => {
                let file = format!("edges_rep{r}.txt");
                g.write_edge_list(&out.join(&file))?;
                let mut summary = vec![("edges".into(), g.edges().len() as f64)];
                if h.diagonal().is_some() {
                    summary.push(("max_cut".into(), g.max_cut() as f64));
                }
                records.push(rec(h.label().into(), file, summary, None));
            }
            Built::Local { h, graph: None } => {
                let es = model.base().eigensystem()?;
                let file = format!("spectrum_rep{r}.csv");
                write_spectrum(es.energies(), &out.join(&file))?;
                records.push(rec(h.label().into(), file, vec![("ground_energy".into(), es.energies()[0])], None));
            }
            Built::Land(l) => {
                let file = format!("landscape_rep{r}.csv");
                l.write_csv(&out.join(&file))?;
                records.push(rec(
                    "landscape".into(),
                    file,
                    vec![("min_energy".into(), l.min_energy()), ("ground_states".into(), l.ground_indices().len() as f64)],
                    None,
                ));
            }
        },
    }
    Ok(records)
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn write_diagnostics(trace: &RunTrace, path: &Path) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(csv_failure)?;
    w.write_record(["iteration", "k", "a", "b", "c"]).map_err(csv_failure)?;
    for d in trace.diagnostics.as_deref().unwrap_or(&[]) {
        w.write_record([d.iteration.to_string(), d.k.to_string(), d.a.to_string(), d.b.to_string(), d.c.to_string()])
            .map_err(csv_failure)?;
    }
    w.flush()?;
    Ok(())
}

fn write_reports(reports: &[VarianceReport], path: &Path) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(csv_failure)?;
    let mut header = vec!["state"];
    header.extend(VarianceReport::csv_header());
    header.extend(["matches_closed_form", "violates_corrected_bound"]);
    w.write_record(&header).map_err(csv_failure)?;
    for (i, r) in reports.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(r.csv_record());
        row.push(r.matches_closed_form().to_string());
        row.push(r.violates_corrected_bound().to_string());
        w.write_record(&row).map_err(csv_failure)?;
    }
    w.flush()?;
    Ok(())
}

fn write_spectrum(e: &[f64], path: &Path) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(csv_failure)?;
    w.write_record(["index", "energy"]).map_err(csv_failure)?;
    for (i, x) in e.iter().enumerate() {
        w.write_record([i.to_string(), x.to_string()]).map_err(csv_failure)?;
    }
    w.flush()?;
    Ok(())
}
