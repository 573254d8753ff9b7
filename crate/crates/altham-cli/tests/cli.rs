use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn altham(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_altham")).args(args).output().expect("binary runs")
}

fn run_config(dir: &Path, text: &str, out: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("cfg.toml");
    fs::write(&cfg, text).unwrap();
    let out = dir.join(out);
    let mut args = vec!["run", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()];
    args.extend(extra);
    altham(&args)
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

const ALTMIN: &str = r#"
kind = "altmin"
seed = 11
repetitions = 3

[model]
type = "well"
n = 6
anchors = 4

[altmin]
L = 3
K = 3
families = ["hamming", "band"]
mode = "trajectory"
replicates = 2
"#;

#[test]
fn same_seed_gives_identical_artifacts_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_config(dir.path(), ALTMIN, "a", &["--workers", "1"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run_config(dir.path(), ALTMIN, "b", &["--workers", "3"]);
    assert!(b.status.success());
    let (la, lb) = (listing(&dir.path().join("a")), listing(&dir.path().join("b")));
    assert_eq!(la.len(), 3 * 2 * 2 + 1);
    assert_eq!(la, lb);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().count(), 12);

    let c = run_config(dir.path(), ALTMIN, "c", &["--seed", "12"]);
    assert!(c.status.success());
    assert_ne!(listing(&dir.path().join("c")), la);
}

#[test]
fn malformed_config_exits_1_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    for (text, needle) in [
        (ALTMIN.replace("K = 3", "K = 3\nbogus = 1"), "bogus"),
        (ALTMIN.replace("L = 3", "L = 0"), "altmin.L"),
        (ALTMIN.replace("type = \"well\"", "type = \"nope\""), "nope"),
        ("kind = \"altmin\"\n[model\n".to_string(), "line"),
    ] {
        let o = run_config(dir.path(), &text, "out", &[]);
        assert_eq!(o.status.code(), Some(1), "{text}");
        assert!(String::from_utf8_lossy(&o.stderr).contains(needle), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(!dir.path().join("out").exists());
    }
    let o = altham(&["run", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(altham(&["preset", "fig0"]).status.code(), Some(1));
}

#[test]
fn dimension_cap_exits_3_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = \"model-dump\"\n[model]\ntype = \"aklt\"\nn = 10\n";
    let o = run_config(dir.path(), text, "out", &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!dir.path().join("out").exists());
    let pop = ALTMIN.replace("replicates = 2", "replicates = 2\npopulation_cap = 20");
    assert_eq!(run_config(dir.path(), &pop, "out", &[]).status.code(), Some(3));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn emitted_preset_runs_like_the_preset() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = altham(&["preset", "fig5c", "--emit-config"]);
    assert!(emitted.status.success());
    let text = String::from_utf8(emitted.stdout).unwrap();
    assert!(text.contains("placement = \"adjacent\""));
    let a = run_config(dir.path(), &text, "a", &[]);
    assert!(a.status.success());
    let out_b = dir.path().join("b");
    let b = altham(&["preset", "fig5c", "--run", "--out-dir", out_b.to_str().unwrap()]);
    assert!(b.status.success());
    assert_eq!(listing(&dir.path().join("a")), listing(&out_b));
    let land = fs::read_to_string(out_b.join("landscape_rep0.csv")).unwrap();
    assert_eq!(land.lines().count(), 4097);
    assert_eq!(land.lines().nth(1), Some("0,0"));
}

#[test]
fn manifest_records_the_physical_copy_count() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = \"altmin\"\n[model]\ntype = \"well\"\nn = 5\nanchors = 3\n\
                [altmin]\nL = 8\nK = 3\nfamilies = [\"hamming\"]\nmode = \"exact\"\n";
    let o = run_config(dir.path(), text, "out", &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m: toml::Table = fs::read_to_string(dir.path().join("out/manifest.toml")).unwrap().parse().unwrap();
    let run = &m["runs"].as_array().unwrap()[0];
    assert_eq!(run["physical_copy_count"].as_integer(), Some(9841));
    assert_eq!(m["config"]["altmin"]["L"].as_integer(), Some(8));
    assert!(String::from_utf8_lossy(&o.stdout).contains("physical_copy_count=9841"));
    let trace = fs::read_to_string(dir.path().join("out/altmin_hamming_rep0.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 9);
    assert!(trace.starts_with("iteration,energy_base,energy_current,quartile,k,measurements,hamiltonian_id,watch"));
}

#[test]
fn each_kind_writes_its_table() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &str, &str); 4] = [
        (
            "kind = \"profile\"\n[model]\ntype = \"maxcut\"\nn = 6\ndegree = 3\n\
             [profile]\nstride = 5\nsource = \"base\"\ntarget = \"altered\"\nfamily = \"local\"\n",
            "profile_rep0.csv",
            "index,base_energy,mean,quartile",
        ),
        (
            "kind = \"variational\"\n[model]\ntype = \"qmc\"\nn = 4\ndegree = 2\n\
             [variational]\nsteps = 6\nschedules = [\"standard\", \"altered\"]\ntheta = \"prescribed\"\ntheta_value = 0.1\n",
            "variational_altered_rep0.csv",
            "step,schedule,energy_base,energy_current,theta,local_variance,hamiltonian_id",
        ),
        (
            "kind = \"anneal\"\n[model]\ntype = \"grover\"\nn = 4\nmarked = 3\n\
             [anneal]\nsteps = 50\nbeta_start = 0.1\nbeta_end = 5.0\n",
            "anneal_rep0.csv",
            "step,current,best",
        ),
        (
            "kind = \"model-dump\"\n[model]\ntype = \"maxcut\"\nn = 6\ndegree = 3\n",
            "edges_rep0.txt",
            "",
        ),
    ];
    for (i, (text, file, header)) in cases.iter().enumerate() {
        let out = format!("o{i}");
        let o = run_config(dir.path(), text, &out, &[]);
        assert!(o.status.success(), "{text}: {}", String::from_utf8_lossy(&o.stderr));
        let body = fs::read_to_string(dir.path().join(&out).join(file)).unwrap();
        if header.is_empty() {
            assert_eq!(body.lines().count(), 9);
        } else {
            assert_eq!(body.lines().next(), Some(*header));
        }
    }
    let profile = fs::read_to_string(dir.path().join("o0/profile_rep0.csv")).unwrap();
    assert_eq!(profile.lines().count(), 1 + 13);
}
