use std::path::Path;
use std::process::{Command, Output};

fn pfo2d(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfo2d"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn verify_reports_each_convention() {
    let dir = tempfile::tempdir().unwrap();
    let out = pfo2d(
        &["verify", "--t", "0.8824", "--power", "3", "--out", "c.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let certs: serde_json::Value = serde_json::from_str(&read(dir.path(), "c.json")).unwrap();
    let certs = certs.as_array().unwrap();
    let by = |name: &str| {
        certs
            .iter()
            .find(|c| c["norm_convention"] == name)
            .unwrap_or_else(|| panic!("{name} missing"))
    };
    assert_eq!(by("PaperFormula")["satisfied"], true);
    assert_eq!(by("Spectral")["satisfied"], false);
    assert!(by("Spectral")["K1"].is_null());
    let keys: Vec<&String> = certs[0].as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 13);
}

#[test]
fn uniform_density_heatmap_at_t1() {
    let dir = tempfile::tempdir().unwrap();
    let out = pfo2d(
        &[
            "density",
            "--t",
            "1.0",
            "--resolution",
            "64",
            "--format",
            "svg",
            "--out",
            "h.svg",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let svg = read(dir.path(), "h.svg");
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("1.000000 – 1.000000"));
    assert_eq!(svg.matches("<path").count(), 64 * 65);
}

#[test]
fn sweep_rows_decrease_towards_reference() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--t0",
        "1.0",
        "--tmin",
        "0.9",
        "--tmax",
        "0.99",
        "--steps",
        "5",
        "--resolution",
        "64",
        "--out",
        "s.csv",
    ];
    let out = pfo2d(&args, dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = read(dir.path(), "s.csv");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,t0,power,resolution,iterations,residual,l1_dist,gap_1,gap_x,gap_y,gap_x2,gap_xy,gap_y2"
    );
    let l1: Vec<f64> = lines
        .map(|l| l.split(',').nth(6).unwrap().parse().unwrap())
        .collect();
    assert_eq!(l1.len(), 5);
    assert!(l1.windows(2).all(|w| w[1] < w[0]), "{l1:?}");
}

#[test]
fn density_csv_round_trips_floats() {
    let dir = tempfile::tempdir().unwrap();
    let out = pfo2d(
        &[
            "density",
            "--t",
            "0.9",
            "--resolution",
            "16",
            "--out",
            "h.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = read(dir.path(), "h.csv");
    let mut mass = 0.0;
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let area: f64 = f[1].parse().unwrap();
        let value: f64 = f[4].parse().unwrap();
        assert_eq!(format!("{value:.16e}"), f[4]);
        mass += area * value;
    }
    assert!((mass - 1.0).abs() < 1e-9);
}

#[test]
fn unconverged_runs_exit_2_and_still_write() {
    let dir = tempfile::tempdir().unwrap();
    let out = pfo2d(
        &[
            "density",
            "--t",
            "0.9",
            "--resolution",
            "16",
            "--max-iter",
            "3",
            "--out",
            "h.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("h.csv").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("residual="));
}

#[test]
fn invalid_input_names_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = pfo2d(&["sweep", "--tmin", "0.5", "--tmax", "0.9"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--tmin"));
    let out = pfo2d(
        &[
            "sweep",
            "--tmin",
            "0.9",
            "--tmax",
            "0.95",
            "--resolution",
            "8",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--resolution"));
    let out = pfo2d(&["lycheck", "--convention", "spectral"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn orbit_and_oracle_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = pfo2d(
        &["orbit", "--n", "5000", "--runs", "2", "--seed", "5"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,seed,n,lyapunov,birkhoff_1,birkhoff_x,birkhoff_y,birkhoff_x2,birkhoff_xy,birkhoff_y2"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[1], "5");
    assert!((row[3].parse::<f64>().unwrap() - 0.5 * std::f64::consts::LN_2).abs() < 1e-12);
    assert_eq!(row[4].parse::<f64>().unwrap(), 1.0);

    let out = pfo2d(
        &["oracle1d", "--resolution", "4", "--matrix-out", "m.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read(dir.path(), "m.csv").lines().count(), 1 + 8);
}
