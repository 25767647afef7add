use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nls_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nls-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn bounds_reports_the_reference_value() {
    let out = nls_lab(&["bounds"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!((field(&text, "bound_value") - 0.5).abs() < 1e-12);
    assert!((field(&text, "tau0") - 0.25).abs() < 1e-12);
}

#[test]
fn shipped_configs_parse() {
    for name in ["desk.toml", "quick.toml", "critical.toml"] {
        let path = shipped(name);
        let out = nls_lab(&["--config", path.to_str().unwrap(), "bounds"]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
    }
}

#[test]
fn unitary_run_conserves_mass() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[grid]\ndim = 1\nn = 256\nhalf_width = 30.0\n\n\
         [equation]\nlambda_re = 0.0\nlambda_im = 0.0\ntheta = 0.5\n\n\
         [solver]\neps = 0.5\nt_max = 2.0\n",
    );
    let out_dir = dir.path().join("out");
    let out = nls_lab(&[
        "--config",
        &config,
        "--out",
        out_dir.to_str().unwrap(),
        "simulate",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("unitary run"));
    assert!(field(&text, "l2_drift").abs() < 1e-10, "{text}");
    assert!(out_dir.join("summary.csv").exists());
}

#[test]
fn sweep_writes_summary_with_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sweep");
    let config = shipped("quick.toml");
    let out = nls_lab(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "sweep",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 3 + 1, "{csv}");
    assert!(lines[0].starts_with("eps,T_eps,q_eps,bound_value,status,fingerprint"));
    assert!(lines[4].starts_with("# verdict: PASS"));
    assert!(stdout(&out).contains("verdict: PASS"));
    assert!(out_dir.join("sweep.json").exists());
}

#[test]
fn sweep_without_valid_rungs_is_inconclusive() {
    // the box is so small that the wave reaches its edge long before blow-up
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[grid]\ndim = 1\nn = 64\nhalf_width = 4.0\n\n\
         [solver]\nt_max = 50.0\n\n\
         [sweep]\neps_ladder = [0.05]\n",
    );
    let out = nls_lab(&[
        "--config",
        &config,
        "--out",
        dir.path().join("o").to_str().unwrap(),
        "sweep",
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}\n{}",
        stdout(&out),
        stderr(&out)
    );
    assert!(stdout(&out).contains("INCONCLUSIVE"));
}

#[test]
fn malformed_config_names_line_and_key() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[solver]\neps = 0.2\nepss = 0.3\n");
    let out = nls_lab(&["--config", &config, "bounds"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("epss") && err.contains("line 3"), "{err}");

    let config = write_config(
        dir.path(),
        "[grid]\ndim = 1\nn = \"many\"\nhalf_width = 4.0\n",
    );
    let out = nls_lab(&["--config", &config, "bounds"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn non_dissipative_coupling_is_rejected_by_bounds() {
    let dir = tempfile::tempdir().unwrap();
    for im in ["0.0", "-1.0"] {
        let config = write_config(dir.path(), &format!("[equation]\nlambda_im = {im}\n"));
        let out = nls_lab(&["--config", &config, "bounds"]);
        assert_eq!(out.status.code(), Some(1));
        assert!(stderr(&out).contains("Im lambda > 0"), "{}", stderr(&out));
    }
}

#[test]
fn printed_config_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = nls_lab(&["print-config"]);
    assert!(out.status.success());
    let config = write_config(dir.path(), &stdout(&out));
    let again = nls_lab(&["--config", &config, "--jobs", "2", "print-config"]);
    assert!(again.status.success(), "{}", stderr(&again));
    let canonical = write_config(dir.path(), &stdout(&again));
    let third = nls_lab(&["--config", &canonical, "--jobs", "2", "print-config"]);
    assert_eq!(stdout(&third), stdout(&again));
    assert!(stdout(&again).contains("jobs = 2"));
}
