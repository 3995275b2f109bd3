use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn niph(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_niph"))
        .args(args)
        .current_dir(dir)
        .env_remove("NIPH_THREADS")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("niph-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

fn grid(dir: &Path) {
    let out = niph(
        &[
            "generate", "--shape", "grid", "--n1", "6", "--n2", "5", "--phi", "20", "--noise",
            "0.05", "--seed", "3", "-o", "grid.csv",
        ],
        dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn generate_shape_field_with_sidecar() {
    let dir = scratch("generate");
    let out = niph(
        &[
            "generate", "--shape", "ellipse", "--count", "20", "--points", "10", "--region", "300",
            "--s", "2", "-o", "e.csv",
        ],
        &dir,
    );
    assert!(out.status.success());
    let rows = fs::read_to_string(dir.join("e.csv")).unwrap();
    assert_eq!(rows.lines().filter(|l| !l.starts_with('#')).count(), 200);
    let meta = json(&fs::read(dir.join("e.json")).unwrap());
    assert_eq!(meta["points"], 200);
    assert_eq!(meta["spec"]["shape"], "ellipse");
}

#[test]
fn niph_report_plot_and_fit_round_trip() {
    let dir = scratch("niph");
    grid(&dir);
    let args = [
        "niph",
        "grid.csv",
        "--dim",
        "0",
        "--directions",
        "8",
        "--scales",
        "1.7",
        "--seed",
        "1",
        "-o",
        "r.json",
        "--shifts",
        "s.csv",
        "--peaks",
        "p.csv",
    ];
    let out = niph(&args, &dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let first = fs::read(dir.join("r.json")).unwrap();
    let report = json(&first);
    assert_eq!(report["probes"].as_array().unwrap().len(), 8);
    let phi = report["fit"]["phi"].as_f64().unwrap();
    assert!((phi.to_degrees() - 20.0).abs() < 3.0, "{phi}");
    // identical inputs give a byte-identical report
    assert!(niph(&args, &dir).status.success());
    assert_eq!(first, fs::read(dir.join("r.json")).unwrap());

    let out = niph(&["plot", "s.csv", "-o", "s.svg"], &dir);
    assert!(out.status.success());
    let svg = fs::read_to_string(dir.join("s.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 8);

    let out = niph(&["fit", "p.csv"], &dir);
    assert!(out.status.success());
    let fit = json(&out.stdout);
    for key in [
        "phi_rad",
        "phi_deg",
        "sqrt_var",
        "s",
        "residual",
        "evaluations",
        "config_echo",
    ] {
        assert!(!fit[key].is_null(), "missing {key}");
    }
}

#[test]
fn ph_formats_and_probe() {
    let dir = scratch("ph");
    fs::write(dir.join("sq.csv"), "0,0\n1,0\n1,1\n0,1\n").unwrap();
    let out = niph(&["ph", "sq.csv", "--dim", "1", "--rmax", "3"], &dir);
    assert!(out.status.success());
    let pairs = json(&out.stdout);
    let death = pairs[0]["death"].as_f64().unwrap();
    assert!((death - 2f64.sqrt()).abs() < 1e-8);
    // stretching x by 2 turns the square into a 2 x 1 rectangle
    let out = niph(
        &[
            "ph",
            "sq.csv",
            "--probe-angle",
            "0",
            "--probe-scale",
            "2",
            "-o",
            "d.csv",
        ],
        &dir,
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.join("d.csv")).unwrap();
    assert!(csv.starts_with('#'));
    // MST of the 2 x 1 rectangle: two unit edges and one of length 2
    assert_eq!(csv.lines().filter(|l| l.starts_with("0,1,")).count(), 2);
    assert_eq!(csv.lines().filter(|l| l.starts_with("0,2,")).count(), 1);
}

#[test]
fn pca_reports_angle() {
    let dir = scratch("pca");
    fs::write(dir.join("line.csv"), "0,0\n1,1\n2,2.1\n3,2.9\n").unwrap();
    let out = niph(&["pca", "line.csv"], &dir);
    assert!(out.status.success());
    let v = json(&out.stdout);
    assert!((v["angle_deg"].as_f64().unwrap() - 45.0).abs() < 3.0);
}

#[test]
fn sample_network_records_projection() {
    let dir = scratch("sample");
    let fixture =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/grid_city.geojson");
    let out = niph(
        &[
            "sample-network",
            fixture.to_str().unwrap(),
            "--count",
            "300",
            "--filter",
            "residential",
            "-o",
            "pts.csv",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let meta = json(&fs::read(dir.join("pts.json")).unwrap());
    assert!(meta["projection"]["lat0"].is_number());
    let out = niph(
        &[
            "sample-network",
            fixture.to_str().unwrap(),
            "--count",
            "3",
            "--filter",
            "motorway",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_flags() {
    let dir = scratch("config");
    grid(&dir);
    fs::write(
        dir.join("run.conf"),
        "# plan\ndirections = 4\nscales = 1.5, 1.8\n",
    )
    .unwrap();
    let out = niph(&["niph", "grid.csv", "--config", "run.conf"], &dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out.stdout)["probes"].as_array().unwrap().len(), 8);
    // the command line wins over the file
    let out = niph(
        &[
            "niph",
            "grid.csv",
            "--config",
            "run.conf",
            "--directions",
            "3",
        ],
        &dir,
    );
    assert_eq!(json(&out.stdout)["probes"].as_array().unwrap().len(), 6);
}

#[test]
fn exit_codes() {
    let dir = scratch("codes");
    grid(&dir);
    assert_eq!(niph(&["--help"], &dir).status.code(), Some(0));
    assert_eq!(niph(&["--version"], &dir).status.code(), Some(0));
    assert_eq!(
        niph(&["niph", "grid.csv", "--bogus"], &dir).status.code(),
        Some(1)
    );
    assert_eq!(
        niph(&["ph", "grid.csv", "--dim", "1"], &dir).status.code(),
        Some(1)
    );
    assert_eq!(
        niph(&["niph", "grid.csv", "--scales", "0.5"], &dir)
            .status
            .code(),
        Some(1)
    );
    let missing = niph(&["pca", "nope.csv"], &dir);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.csv"));
    fs::write(dir.join("bad.csv"), "1,2\nx,y,z\n").unwrap();
    assert_eq!(niph(&["pca", "bad.csv"], &dir).status.code(), Some(2));
    let budget = niph(
        &[
            "niph",
            "grid.csv",
            "--dim",
            "1",
            "--rmax",
            "5",
            "--max-edges",
            "10",
        ],
        &dir,
    );
    assert_eq!(budget.status.code(), Some(3));
    let env = Command::new(env!("CARGO_BIN_EXE_niph"))
        .args(["niph", "grid.csv"])
        .current_dir(&dir)
        .env("NIPH_THREADS", "two")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(1));
}
