use std::path::PathBuf;
use std::process::{Command, Output};

fn dualpair(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dualpair"));
    cmd.args(args).env_remove(dualpair_cli::OUT_DIR_ENV);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dualpair-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(name: &str, text: &str) -> String {
    let path = scratch(name).join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn zero_denominator_is_a_config_error() {
    let cfg = write_config("zero", "[jumps]\npoint = { eps = -1, plus = [\"1/0\"] }\n");
    let out = dualpair(&["jumps", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("jumps.point.plus[0]"));
}

#[test]
fn unknown_keys_are_config_errors() {
    let cfg = write_config("unknown", "[classify]\nmax_rank = 2\ncolour = 1\n");
    let out = dualpair(&["classify", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn out_of_range_rank_is_rejected() {
    let out = dualpair(&["classify", "--max-rank", "7"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_bundled_symplectic_orthogonal_instance() {
    let out = dualpair(&["verify", "--config", "bundled:sp2-o3"], &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["summary"]["verdict"], "pass");
    assert_eq!(report["command"], "verify");
}

#[test]
fn empty_config_uses_defaults() {
    let cfg = write_config("empty", "");
    let out = dualpair(&["jumps", "--config", &cfg, "--format", "md"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("# dualpair jumps"));
}

#[test]
fn reports_land_in_the_output_directory() {
    let dir = scratch("out");
    let out = dualpair(&["jumps", "--out", dir.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let json = std::fs::read(dir.join("jumps.json")).unwrap();
    assert_eq!(json, out.stdout);
    assert!(dir.join("jumps.md").exists());

    let env_dir = scratch("env");
    let out = dualpair(
        &["jumps"],
        &[(dualpair_cli::OUT_DIR_ENV, env_dir.to_str().unwrap())],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(env_dir.join("jumps.json").exists());
}

#[test]
fn jumps_with_partner_reports_splitting() {
    let cfg = write_config(
        "partner",
        "[jumps]\nm = 2\npoint = { eps = -1, plus = [\"1/4\"] }\npartner = { eps = 1, plus = [\"1/2\"], aniso = [\"0\"] }\n",
    );
    let out = dualpair(&["jumps", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        report["data"]["splitting"]["dim_w"],
        2 * report["data"]["splitting"]["dim_y"].as_u64().unwrap()
    );
}

#[test]
fn sign_flipped_star_is_caught() {
    let cfg = write_config(
        "inject",
        "[selftest]\nsamples = 100\ninject = \"star-sign\"\n",
    );
    let out = dualpair(&["selftest", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("pairing-moment") && err.contains("<X.w, w> = 2B(M(w), X)"),
        "{err}"
    );
    assert!(err.contains("star-adjoint"));
}
