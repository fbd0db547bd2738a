use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn phasecell(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasecell"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn ops_check_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = phasecell(dir.path(), &["ops-check"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let rows = csv_rows(&dir.path().join("reports.csv"));
    assert_eq!(rows[0], ["test", "norm_interior", "norm_full", "tolerance", "pass"]);
    let commutator = rows.iter().find(|r| r[0] == "commutator_sharp_circ").unwrap();
    assert!(commutator[2].parse::<f64>().unwrap() > 1.0);
    let manifest = fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
    assert!(manifest.contains("n_max = 64"));
}

#[test]
fn ops_check_rejects_tiny_basis() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&phasecell(dir.path(), &["ops-check", "--nmax", "1"])), 2);
    assert_eq!(code(&phasecell(dir.path(), &["ops-check", "--format", "xml"])), 2);
}

#[test]
fn oscillator_explicit_units() {
    let dir = tempfile::tempdir().unwrap();
    let out = phasecell(
        dir.path(),
        &["oscillator", "--units", "explicit", "--hbar", "2", "--nu", "3", "--format", "json"],
    );
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&dir.path().join("spectrum.csv"));
    assert_eq!(rows[0], ["representation", "N", "E_N"]);
    for rep in ["discrete", "position", "y"] {
        let e0: f64 = rows.iter().find(|r| r[0] == rep && r[1] == "0").unwrap()[2].parse().unwrap();
        assert!((e0 - 3.0).abs() < 1e-12, "{rep}: {e0}");
    }
    let eig = csv_rows(&dir.path().join("eigenfunctions.csv"));
    assert_eq!(eig.len(), 102);
    assert!(eig[1..].iter().all(|r| r[0] == "2"));
    let reports: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("reports.json")).unwrap()).unwrap();
    assert!(reports.as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn oscillator_fundamental_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&phasecell(dir.path(), &["oscillator"])), 0);
    let rows = csv_rows(&dir.path().join("spectrum.csv"));
    let discrete: Vec<_> = rows.iter().filter(|r| r[0] == "discrete").collect();
    assert_eq!(discrete.len(), 63);
    for r in discrete {
        let (n, e): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!((e - (n + 0.5)).abs() < 1e-10);
    }
}

#[test]
fn kg_runs_and_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["kg", "--nmax", "4", "--steps", "200"];
    assert_eq!(code(&phasecell(a.path(), &args)), 0);
    assert_eq!(code(&phasecell(b.path(), &args)), 0);
    for file in ["trajectory.csv", "energy.csv", "reports.csv"] {
        assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap(), "{file}");
    }
    let rows = csv_rows(&a.path().join("energy.csv"));
    assert_eq!(rows[0], ["t", "energy", "modified_energy"]);
    assert_eq!(rows.len(), 202);
}

#[test]
fn kg_zero_data_and_unstable_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = phasecell(dir.path(), &["kg", "--nmax", "3", "--steps", "20", "--initial", "zero"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&dir.path().join("trajectory.csv"));
    assert!(rows[1..].iter().all(|r| r[4].parse::<f64>().unwrap() == 0.0));

    let out = phasecell(dir.path(), &["kg", "--nmax", "3", "--dt", "5"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("try dt"));
    assert!(dir.path().join("manifest.toml").exists());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "n_max = 3\nsteps = 10\ninitial = \"random\"\nseed = 7\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_phasecell"))
        .args(["kg", "--config"])
        .arg(&config)
        .args(["--steps", "12", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = fs::read_to_string(out_dir.join("manifest.toml")).unwrap();
    assert!(manifest.contains("n_max = 3") && manifest.contains("steps = 12") && manifest.contains("seed = 7"));

    // the manifest reproduces the run
    let again = dir.path().join("again");
    let out = Command::new(env!("CARGO_BIN_EXE_phasecell"))
        .args(["kg", "--config"])
        .arg(out_dir.join("manifest.toml"))
        .arg("--out")
        .arg(&again)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(
        fs::read(out_dir.join("trajectory.csv")).unwrap(),
        fs::read(again.join("trajectory.csv")).unwrap()
    );

    fs::write(&config, "n_max = 3\nunknown_key = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_phasecell"))
        .args(["kg", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn poincare_zero_params_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = phasecell(dir.path(), &["poincare", "--nmax", "4", "--c-mu", "0,0,0,0", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let reports: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("reports.json")).unwrap()).unwrap();
    let reports = reports.as_array().unwrap();
    for r in reports {
        assert_eq!(r.as_object().unwrap().len(), 5);
    }
    let identity = reports.iter().find(|r| r["test"] == "transform_zero_identity").unwrap();
    assert_eq!(identity["norm_interior"], 0.0);

    let out = phasecell(dir.path(), &["poincare", "--nmax", "20"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bytes required"));
}

#[test]
fn geometry_radii_and_empty_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = phasecell(dir.path(), &["geometry", "--objects", "circle,ellipse,cylinder", "--samples", "12"]);
    assert_eq!(code(&out), 0);
    let summary = csv_rows(&dir.path().join("summary.csv"));
    let radii: Vec<f64> = summary[1..6].iter().map(|r| r[5].parse().unwrap()).collect();
    for (r, n) in radii.iter().zip(0..) {
        assert!((r * r - (2 * n + 1) as f64).abs() < 1e-13);
    }
    let points = csv_rows(&dir.path().join("geometry.csv"));
    assert_eq!(points[0], ["kind", "N", "q", "p", "t"]);
    let ellipse: Vec<_> = points.iter().filter(|r| r[0] == "ellipse").collect();
    let circle0: Vec<_> = points.iter().filter(|r| r[0] == "circle" && r[1] == "0").collect();
    assert_eq!(ellipse.len(), 12);
    for (e, c) in ellipse.iter().zip(&circle0) {
        assert_eq!(e[2..4], c[2..4]);
    }

    let config = dir.path().join("empty.toml");
    fs::write(&config, "levels = []\n").unwrap();
    let out = phasecell(dir.path(), &["geometry", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}
