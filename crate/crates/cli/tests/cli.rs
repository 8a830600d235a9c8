use std::path::Path;
use std::process::{Command, Output};

const EQUILIBRIUM: &str = r#"
name = "eq"
experiment = "equilibrium"
resolutions = [8, 16]
t_final = 0.02
save_every = 0.01

[grid]
dim = 2
boundary = ["no_slip", "periodic"]

[fluid.viscosity]
mu = 0.05
eta = 0.0
beta = 0.0

[fluid.law]
a = 1.0
gamma = 2.0
rho_bar = 1.0

[pair]
family = "equilibrium"
"#;

const VORTEX: &str = r#"
name = "vx"
experiment = "mms_convergence"
resolutions = [8, 16]
t_final = 0.02
save_every = 0.01
seed = 5

[grid]
dim = 2
boundary = ["periodic", "periodic"]

[fluid.viscosity]
mu = 0.05
eta = 0.0
beta = 0.0

[fluid.law]
a = 1.0
gamma = 1.6666666666666667
rho_bar = 1.0

[pair]
family = "periodic_vortex"
"#;

fn relent(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_relent"));
    cmd.args(args).env_remove("RELENT_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("RELENT_OUT_DIR", d);
    }
    cmd.output().expect("relent runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn lists_every_experiment() {
    let o = relent(&["list-experiments"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in relent_core::harness::EXPERIMENTS {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn validate_accepts_good_and_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.toml", EQUILIBRIUM);
    assert_eq!(relent(&["validate", &good], None).status.code(), Some(0));
    let typo = write(dir.path(), "typo.toml", &EQUILIBRIUM.replace("t_final", "t_finale"));
    assert_eq!(relent(&["validate", &typo], None).status.code(), Some(2));
    let missing = dir.path().join("nope.toml");
    assert_eq!(relent(&["validate", missing.to_str().unwrap()], None).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(relent(&[], None).status.code(), Some(2));
    assert_eq!(relent(&["frobnicate"], None).status.code(), Some(2));
}

#[test]
fn run_writes_outputs_to_the_env_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "eq.toml", EQUILIBRIUM);
    let out = dir.path().join("out");
    let o = relent(&["run", &cfg], Some(&out));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let manifest = relent_core::harness::RunManifest::read(&out.join("eq_manifest.json")).unwrap();
    assert!(manifest.passed);
    assert!(manifest.series().count() == 2);
    for f in &manifest.outputs {
        assert!(f.path.exists());
    }
}

#[test]
fn failed_checks_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let strict = format!("{VORTEX}\n[tolerances]\nmin_order = 10.0\n");
    let cfg = write(dir.path(), "vx.toml", &strict);
    let out = dir.path().join("out");
    let o = relent(&["run", &cfg, "--out-dir", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL order_rho"));
}

#[test]
fn solver_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // The viscous step limit drops below the collapse threshold at once.
    let cfg = write(dir.path(), "stiff.toml", &EQUILIBRIUM.replace("mu = 0.05", "mu = 1e12"));
    let out = dir.path().join("out");
    let o = relent(&["run", &cfg, "--out-dir", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "vx.toml", VORTEX);
    let mut csvs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("t{threads}"));
        let o = relent(&["run", &cfg, "--threads", threads, "--out-dir", out.to_str().unwrap()], None);
        assert!(matches!(o.status.code(), Some(0 | 1)));
        csvs.push(std::fs::read(out.join("vx_n16.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn seed_override_changes_the_hash_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "vx.toml", VORTEX);
    let a = stdout(&relent(&["validate", &cfg], None));
    let b = stdout(&relent(&["validate", &cfg, "--seed", "6"], None));
    assert_ne!(a, b);
}

#[test]
fn order_reads_series_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "vx.toml", VORTEX);
    let out = dir.path().join("out");
    relent(&["run", &cfg, "--out-dir", out.to_str().unwrap()], None);
    let a = out.join("vx_n8.csv");
    let b = out.join("vx_n16.csv");
    let o = relent(&["order", a.to_str().unwrap(), b.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let order: f64 = stdout(&o).trim().parse().unwrap();
    let manifest = relent_core::harness::RunManifest::read(&out.join("vx_manifest.json")).unwrap();
    assert!((order - manifest.metrics["order_rel_entropy"]).abs() < 1e-6);

    let renamed = dir.path().join("vortex.csv");
    std::fs::copy(&a, &renamed).unwrap();
    let o = relent(&["order", renamed.to_str().unwrap(), b.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}
