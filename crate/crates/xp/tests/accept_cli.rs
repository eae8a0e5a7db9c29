//! Command-line behaviour, artifacts and the pinned SVG rendering.

use std::path::Path;
use std::process::Command;

use dbm_xp::manifest::RunManifest;
use dbm_xp::svg::emit_svg;

fn xp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dbm-xp")).args(args).output().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn svg_matches_golden_file() {
    let profile = [(0.5, 0.21), (1.0, 0.083), (2.0, 0.013)];
    let theory: Vec<(f64, f64)> = (1..=8).map(|k| {
        let b = k as f64 * 0.25;
        (b, 0.5 * (-2.0 * b).exp())
    }).collect();
    let svg = emit_svg(&profile, &theory);
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/profile_small.svg");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &svg).unwrap();
    }
    assert_eq!(svg, std::fs::read_to_string(&golden).unwrap());
}

#[test]
fn subcritical_label_is_refused_for_small_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let out = xp(&[
        "profile", "--n", "4000", "--m", "2", "--alpha", "0.002", "--regime", "subcritical",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not subcritical"), "{err}");
    // nothing is computed or written
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn qsd_without_rewiring_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = xp(&["qsd", "--alpha", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn profile_run_writes_referenced_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = xp(&[
        "profile", "--n", "500", "--alpha", "0.01", "--betas", "0.5,1", "--seeds", "0..2", "--starts", "16",
        "--threads", "2", "--out", d,
    ]);
    assert!(out.status.code() == Some(0) || out.status.code() == Some(1), "{out:?}");
    let m = RunManifest::read(&dir.path().join("manifest_profile.json")).unwrap();
    assert_eq!(m.seeds_used, vec![0, 1]);
    assert_eq!(m.verdicts.len(), 2);
    assert!(m.verdicts.iter().all(|v| v.tolerance.starts_with('<')));
    assert!(!m.timings.is_empty());
    for a in ["profile.csv", "profile_mean.csv", "profile.svg", "profile_seed0.csv", "profile_seed1.csv", "masses.csv"] {
        assert!(m.artifacts.iter().any(|x| x == a), "{a} missing from {:?}", m.artifacts);
        assert!(dir.path().join(a).exists());
    }
    let rows = read(dir.path(), "profile.csv");
    assert!(rows.starts_with("seed,beta,t,t_ent,distance,theory\n"));
    assert_eq!(rows.lines().count(), 5);
    // exit status follows the verdicts
    assert_eq!(out.status.code() == Some(0), m.all_passed());

    let rep = xp(&["report", "--out", d]);
    assert_eq!(rep.status.code() == Some(0), m.all_passed());
    assert_eq!(read(dir.path(), "report.csv").lines().count(), 3);
}

#[test]
fn config_file_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = dbm_xp::ExperimentConfig::preset("proxy").unwrap();
    cfg.n = 600;
    cfg.alpha = 0.4;
    cfg.deterministic = true;
    cfg.out = dir.path().join("run");
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    let out = xp(&["proxy", "--config", path.to_str().unwrap()]);
    assert!(out.status.code().is_some_and(|c| c < 2), "{}", String::from_utf8_lossy(&out.stderr));
    let m = RunManifest::read(&cfg.out.join("manifest_proxy.json")).unwrap();
    assert_eq!(m.config_hash, cfg.hash());
    assert!(m.timings.is_empty());
    let csv = read(&cfg.out, "proxy_seed0.csv");
    assert!(csv.starts_with("i,tv_to_nu,tv_nu_to_pi,eps,h_eps,s_eps\n"));
}

#[test]
fn generate_saves_loadable_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let out = xp(&[
        "generate", "--n", "300", "--alpha", "0.05", "--seeds", "4", "--binary", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (params, g) = dbm_core::graph::load_graph(&dir.path().join("graph_seed4.dbmb")).unwrap();
    assert_eq!(params.n, 300);
    assert_eq!(g.vertex_count(), 600);
    let summary = read(dir.path(), "degrees.csv");
    assert_eq!(summary.lines().count(), 2);
}

#[test]
fn annealed_run_reports_marginal_and_joint() {
    let dir = tempfile::tempdir().unwrap();
    let out = xp(&["annealed", "--replicas", "2000", "--deterministic", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.code().is_some_and(|c| c < 2));
    let m = RunManifest::read(&dir.path().join("manifest_annealed.json")).unwrap();
    // two communities, the cycle-free rate and the survival check
    assert_eq!(m.verdicts.len(), 4);
    for a in ["annealed_law.csv", "annealed_marginal.csv", "annealed_survival.csv"] {
        assert!(m.artifacts.iter().any(|x| x == a));
    }
}
