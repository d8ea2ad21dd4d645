use std::path::Path;
use std::process::{Command, Output};

fn twotier(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_twotier"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("RAYON_NUM_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let common = ["--seed", "1", "--trials", "3000"];
    let out = twotier(&[&["simulate", "--out", a.to_str().unwrap()], &common[..]].concat(), Some("1"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = twotier(&[&["simulate", "--out", b.to_str().unwrap()], &common[..]].concat(), Some("4"));
    assert!(out.status.success());
    for f in ["samples.csv", "cdf_r.csv", "cdf_tau_u.csv"] {
        assert_eq!(read(&a, f), read(&b, f), "{f}");
    }
    let samples = String::from_utf8(read(&a, "samples.csv")).unwrap();
    assert!(samples.starts_with("trial,n,turn,r,tau_u,i_m,i_mu,tau_d\n"));
}

#[test]
fn manifest_replays_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let cfg = tmp.path().join("c.toml");
    std::fs::write(&cfg, "load.zeta = 0.02\nrun.trials = 1500\nrun.seed = 77\noutput.cdf_points = 51\n").unwrap();
    let out = twotier(&["simulate", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()], None);
    assert!(out.status.success());
    let manifest = a.join("manifest.json");
    let b = tmp.path().join("b");
    let out = twotier(
        &["simulate", "--config", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()],
        Some("3"),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["samples.csv", "cdf_r.csv", "cdf_tau_u.csv"] {
        assert_eq!(read(&a, f), read(&b, f), "{f}");
    }
    let m: serde_json::Value = serde_json::from_slice(&read(&a, "manifest.json")).unwrap();
    let digest = m["outputs"]["cdf_r.csv"].as_str().unwrap();
    assert_eq!(digest, format!("sha256:{}", twotier_cli::manifest::sha256_hex(&read(&a, "cdf_r.csv"))));
    assert_eq!(m["seed"], 77);
}

#[test]
fn cdf_files_are_nondecreasing() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let out = twotier(&["simulate", "--trials", "2000", "--out", d.to_str().unwrap()], None);
    assert!(out.status.success());
    for f in ["cdf_r.csv", "cdf_tau_u.csv"] {
        let text = String::from_utf8(read(d, f)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("value,F_sim,F_analytic"));
        let mut prev = [0.0, 0.0];
        let mut rows = 0;
        for line in lines {
            let v: Vec<f64> = line.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
            for k in 0..2 {
                assert!(v[k] >= prev[k] && v[k] <= 1.0, "{f}: {line}");
                prev[k] = v[k];
            }
            rows += 1;
        }
        assert_eq!(rows, 201);
    }
}

#[test]
fn sweep_zeta_default_grid_has_25_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let out = twotier(&["sweep-zeta", "--trials", "500", "--out", d.to_str().unwrap()], None);
    assert!(out.status.success());
    let text = String::from_utf8(read(d, "sweep_zeta.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("zeta,N,E_tau_u_sim,E_tau_d_sim,E_tau_u_analytic,E_tau_d_analytic,mean_n,q")
    );
    assert_eq!(lines.count(), 25);
    assert!(read(d, "fig4.svg").starts_with(b"<svg"));
}

#[test]
fn analyze_with_no_dap_users_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = twotier(&["analyze", "--zeta", "1e-300", "--out", tmp.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NoDapUsers"));
}

#[test]
fn negative_region_side_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    std::fs::write(&cfg, "[geometry]\nregion_side_L = -5\n").unwrap();
    let out = twotier(&["analyze", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("region_side_L") && err.contains("line 2"), "{err}");
}

#[test]
fn unknown_key_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    std::fs::write(&cfg, "propagation.sigma_db = 8\n").unwrap();
    let out = twotier(&["simulate", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma_db"));
}

#[test]
fn analyze_writes_fits() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let out = twotier(&["analyze", "--out", d.to_str().unwrap()], None);
    assert!(out.status.success());
    let moments = String::from_utf8(read(d, "moments.csv")).unwrap();
    assert_eq!(moments.lines().count(), 1 + 27);
    let p_sum: f64 = moments
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((p_sum - 1.0).abs() < 1e-12);
    for f in ["analytic_cdf_r.csv", "analytic_cdf_tau_u.csv", "manifest.json"] {
        assert!(d.join(f).exists());
    }
}
