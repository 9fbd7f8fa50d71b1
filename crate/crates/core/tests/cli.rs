use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dqc(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dqc"));
    cmd.args(args).env_remove("DQC_OUTPUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("DQC_OUTPUT_DIR", d);
    }
    cmd.output().expect("spawn dqc")
}

fn bundled(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).display().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn pump_writes_csv_to_env_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dqc(&["pump", &bundled("fig3b_pumping.cfg")], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("dark ground levels: [1]"));
    let csv = std::fs::read_to_string(dir.path().join("fig3b_decays_on_pumping.csv")).unwrap();
    let header = csv.lines().nth(1).unwrap();
    assert!(header.starts_with("t,re_rho_11,im_rho_11,"));
    assert!(header.ends_with(",re_rho_66,im_rho_66,purity_deficit,renyi_entropy"));
    let last: Vec<f64> = csv.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[0] - 30.0).abs() < 1e-12);
    assert!(last[1] > 0.99);
}

#[test]
fn output_dir_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sim.cfg", "[state]\nlevel = 2\n[rates]\ndecay = 0.1\ndephasing = 0.05\n[integrator]\nhorizon = 1\n[output]\ndir = \"never\"\n");
    let target = dir.path().join("flag");
    let out = dqc(&["simulate", &cfg, "--output-dir", target.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(target.join("simulate_trajectory.csv").exists());
    assert!(!Path::new("never").exists());
}

#[test]
fn malformed_config_exits_one_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "[pulse]\nduration = 50\narea_pi = \"half\"\n");
    let out_dir = dir.path().join("out");
    let out = dqc(&["simulate", &cfg], Some(&out_dir));
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 3"), "{stderr}");
    assert!(!out_dir.exists());

    let missing = dqc(&["simulate", "/nonexistent/x.cfg"], Some(&out_dir));
    assert_eq!(missing.status.code(), Some(1));

    let cfg = write(dir.path(), "field.cfg", "[optimize]\narea_pi = [1.0, 0.0]\n[pulse]\nduration = 1\narea_pi = 1\n");
    let out = dqc(&["optimize", &cfg], Some(&out_dir));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("optimize.area_pi"));
    assert!(!out_dir.exists());
}

#[test]
fn physics_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cp.cfg", "[rates]\ndecay = 1.0\ndephasing = 0.1\n[integrator]\nhorizon = 1\n");
    let out_dir = dir.path().join("out");
    let out = dqc(&["simulate", &cfg], Some(&out_dir));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("complete positivity"));
    assert!(!out_dir.exists());
}

#[test]
fn check_suites() {
    let ok = dqc(&["check", &bundled("check_default.cfg")], None);
    assert_eq!(ok.status.code(), Some(0));
    let stdout = String::from_utf8(ok.stdout).unwrap();
    for name in ["lindblad_equivalence", "support_disjointness", "trace_conservation", "closed_system_purity"] {
        assert!(stdout.lines().any(|l| l.starts_with("PASS") && l.contains(name)), "{name}: {stdout}");
    }

    let bad = dqc(&["check", &bundled("check_cp_violation.cfg")], None);
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL complete_positivity"));

    let closed = dqc(&["check", &bundled("check_closed.cfg")], None);
    assert_eq!(closed.status.code(), Some(0));

    assert_eq!(dqc(&["check"], None).status.code(), Some(0));
}

#[test]
fn scenario_must_match_subcommand() {
    let out = dqc(&["simulate", &bundled("fig3b_pumping.cfg")], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = dqc(&["optimize", &bundled("sec51_dephasing.cfg")], Some(d));
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["sec51_history.csv", "sec51_trajectory.csv", "sec51_summary.txt"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn optimize_reports_history() {
    let dir = tempfile::tempdir().unwrap();
    let out = dqc(&["optimize", &bundled("sec51_dephasing.cfg")], Some(dir.path()));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("optimum area_pi="), "{stdout}");
    let history = std::fs::read_to_string(dir.path().join("sec51_history.csv")).unwrap();
    assert_eq!(history.lines().next().unwrap(), "evaluation,area_pi,objective,best_so_far");
    let best: Vec<f64> = history.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(best.windows(2).all(|w| w[1] <= w[0]));
}
