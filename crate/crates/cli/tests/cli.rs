use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hybrid-degen"))
}

fn config(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", name]
        .iter()
        .collect()
}

#[test]
fn writes_csv_json_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["na-measure", "--jobs", "1", "--config"])
        .arg(config("na_square.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("gauss_mass = 1.0"), "{stdout}");
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(names.iter().any(|n| n.ends_with(".csv")));
    assert!(names.iter().any(|n| n.ends_with(".json")));
    assert!(names.iter().any(|n| n == "records.jsonl"));
    let csv = names.iter().find(|n| n.ends_with(".csv")).unwrap();
    let body = std::fs::read_to_string(dir.path().join(csv)).unwrap();
    assert!(body.starts_with("# schema: hybrid-degen/na-measure/v1\n"));
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "family = \"z^2\"\nunknown_key = 3\n").unwrap();
    let status = bin()
        .args(["na-measure", "--config"])
        .arg(&bad)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bin().arg("na-measure").status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn degenerate_parameter_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("degenerate.toml");
    // both components gain the factor w0 + w1 at t = 1/2
    std::fs::write(
        &cfg,
        "family = \"[w0^2 + w0*w1 : w1^2 + 2*t*w0*w1]\"\n\
         [t_grid]\nmoduli = [0.5, 0.05, 0.005]\nphases = 1\n\
         [sampler]\nn_keep = 100\n",
    )
    .unwrap();
    let out = bin()
        .args(["lyap-slope", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
