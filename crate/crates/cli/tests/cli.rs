use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use ftqc_threshold::{threshold_value, CodeParametersF64, ScheduleQueryF64};
use ftqc_threshold_cli::output::sci;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftqc-threshold"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).filter(|rest| rest.starts_with(' ')))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .trim()
}

fn round_sig(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits - 1, x)
}

#[test]
fn threshold_goldens_to_nine_digits() {
    for (r, want) in [("7", "4.25170068e-4"), ("1", "1.86011905e-4")] {
        let o = bin(&["threshold", "--code", "steane", "--k", "1", "--r", r]);
        assert_eq!(o.status.code(), Some(0));
        let p: f64 = field(&stdout(&o), "p_th").parse().unwrap();
        assert_eq!(round_sig(p, 9), want);
    }
}

#[test]
fn threshold_output_matches_library() {
    let o = bin(&["threshold", "--k", "3", "--r", "4.5"]);
    let text = stdout(&o);
    let lib = threshold_value(
        &CodeParametersF64::steane(),
        &ScheduleQueryF64::new(3, 4.5).unwrap(),
    )
    .unwrap();
    assert_eq!(field(&text, "p_th"), sci(lib.p_th));
    assert_eq!(field(&text, "log_p_th"), sci(lib.log_p_th));
    assert_eq!(field(&text, "depth"), lib.depth.to_string());
    assert!(field(&text, "regime").starts_with("valid"));
}

#[test]
fn threshold_rejects_zero_period() {
    let o = bin(&["threshold", "--code", "steane", "--k", "1", "--r", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("r >= 1"), "{}", stderr(&o));
}

#[test]
fn optimal_period_output() {
    let o = bin(&["optimal-period", "--code", "steane", "--k", "1"]);
    let text = stdout(&o);
    assert_eq!(field(&text, "r_continuous").parse::<f64>().unwrap(), 7.0);
    assert_eq!(field(&text, "r_integer"), "7");
    assert_eq!(field(&text, "concavity_ok"), "true");

    let o = bin(&["optimal-period", "--code", "steane", "--k", "4"]);
    let text = stdout(&o);
    let r: f64 = field(&text, "r_continuous").parse().unwrap();
    assert!((r - 1.8667).abs() < 1e-4);
    assert_eq!(field(&text, "r_integer"), "2");

    assert_eq!(bin(&["optimal-period", "--k", "0"]).status.code(), Some(2));
}

#[test]
fn scan_single_point_matches_threshold() {
    let o = bin(&[
        "scan", "--k", "2", "--r-min", "5", "--r-max", "5", "--r-step", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "k,r,depth,p_th");
    let t = stdout(&bin(&["threshold", "--k", "2", "--r", "5"]));
    assert_eq!(lines[1], format!("2,5,38,{}", field(&t, "p_th")));
}

#[test]
fn scan_validation_and_io_errors() {
    assert_eq!(bin(&["scan", "--r-step", "0"]).status.code(), Some(2));
    assert_eq!(
        bin(&["scan", "--r-min", "5", "--r-max", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(bin(&["scan", "--k", "0"]).status.code(), Some(2));
    let o = bin(&["scan", "-o", "/nonexistent-dir/for/sure/fig.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn scan_csv_round_trips_through_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = bin(&[
        "scan",
        "--k",
        "1,3,5",
        "--r-min",
        "0.5",
        "--r-max",
        "12",
        "--r-step",
        "0.25",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(&path).unwrap();
    let code = CodeParametersF64::steane();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let k: u32 = f[0].parse().unwrap();
        let r: f64 = f[1].parse().unwrap();
        let lib = threshold_value(&code, &ScheduleQueryF64::new(k, r).unwrap()).unwrap();
        assert_eq!(f[2], lib.depth.to_string());
        assert_eq!(f[3], sci(lib.p_th));
        rows += 1;
    }
    assert_eq!(rows, 3 * 47);
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
}

#[test]
fn scan_writes_svg_and_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig1.csv");
    let svg = dir.path().join("fig1.svg");
    let o = bin(&[
        "scan",
        "-o",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let svg_text = fs::read_to_string(&svg).unwrap();
    assert_eq!(svg_text.matches("<polyline").count(), 4);
    assert!(dir.path().join("fig1.csv.manifest.json").exists());
    assert!(dir.path().join("fig1.svg.manifest.json").exists());
}

fn replay_reproduces(args: &[&str], outputs: &[&Path]) {
    let o = bin(args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let before: Vec<Vec<u8>> = outputs.iter().map(|p| fs::read(p).unwrap()).collect();
    for p in outputs {
        fs::remove_file(p).unwrap();
    }
    let manifest = format!("{}.manifest.json", outputs[0].display());
    let r = bin(&["replay", &manifest]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    let after: Vec<Vec<u8>> = outputs.iter().map(|p| fs::read(p).unwrap()).collect();
    assert_eq!(before, after);
}

#[test]
fn manifests_replay_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let svg = dir.path().join("scan.svg");
    replay_reproduces(
        &[
            "scan",
            "--k",
            "1,2",
            "-o",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ],
        &[&csv, &svg],
    );
    let sim = dir.path().join("sim.csv");
    replay_reproduces(
        &[
            "simulate",
            "--k",
            "2",
            "--r",
            "3",
            "--p",
            "3e-2",
            "--trials",
            "20000",
            "--seed",
            "5",
            "--bottom-mode",
            "exact-depth",
            "-o",
            sim.to_str().unwrap(),
        ],
        &[&sim],
    );
}

#[test]
fn simulate_zero_noise() {
    let o = bin(&["simulate", "--p", "0", "--trials", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(field(&text, "estimate").parse::<f64>().unwrap(), 0.0);
    assert_eq!(field(&text, "exact").parse::<f64>().unwrap(), 0.0);
    assert_eq!(field(&text, "in_ci"), "true");
}

#[test]
fn simulate_csv_schema_and_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sim.csv");
    let args = [
        "simulate",
        "--code",
        "steane",
        "--k",
        "1",
        "--r",
        "7",
        "--p",
        "1e-2",
        "--trials",
        "100000",
        "--seed",
        "42",
        "-o",
        path.to_str().unwrap(),
    ];
    let first = bin(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(field(&stdout(&first), "in_ci"), "true");
    let csv1 = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv1.lines().collect();
    assert_eq!(
        lines[0],
        "p,k,r,trials,failures,estimate,ci_low,ci_high,exact,seed"
    );
    let f: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(f.len(), 10);
    assert_eq!((f[1], f[2], f[3], f[9]), ("1", "7", "100000", "42"));
    let (lo, hi, exact): (f64, f64, f64) = (
        f[6].parse().unwrap(),
        f[7].parse().unwrap(),
        f[8].parse().unwrap(),
    );
    assert!(lo <= exact && exact <= hi);

    let second = bin(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(csv1, fs::read_to_string(&path).unwrap());
}

#[test]
fn simulate_validation() {
    assert_eq!(bin(&["simulate", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(
        bin(&["simulate", "--p", "0.1", "--trials", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bin(&["simulate", "--p", "0.1", "--r", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(bin(&["simulate"]).status.code(), Some(2));
}

#[test]
fn verify_passes_on_steane() {
    let o = bin(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("all 11 checks passed"));
}

#[test]
fn verify_quick_is_fast() {
    let start = Instant::now();
    let o = bin(&["verify", "--quick"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn verify_reports_corrupt_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{"name":"steane","m":7,"alpha":4,"beta":10,"delta":0}"#,
    )
    .unwrap();
    let o = bin(&["verify", "--quick", "--code-config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let line = text
        .lines()
        .find(|l| l.starts_with("code-parameters"))
        .unwrap();
    assert!(line.contains("FAIL") && line.contains("delta"), "{line}");
}

#[test]
fn code_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("steane.json");
    fs::write(
        &good,
        r#"{"name":"steane","m":7,"alpha":4,"beta":10,"delta":2}"#,
    )
    .unwrap();
    let a = bin(&[
        "threshold",
        "--code-config",
        good.to_str().unwrap(),
        "--k",
        "1",
        "--r",
        "7",
    ]);
    let b = bin(&["threshold", "--code", "steane", "--k", "1", "--r", "7"]);
    assert_eq!(a.stdout, b.stdout);

    let missing = dir.path().join("missing.json");
    fs::write(
        &missing,
        "{\"name\":\"x\",\n\"alpha\":4,\"beta\":10,\"delta\":2}",
    )
    .unwrap();
    let o = bin(&[
        "threshold",
        "--code-config",
        missing.to_str().unwrap(),
        "--k",
        "1",
        "--r",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing field `m`"));

    let pair = dir.path().join("pair.json");
    fs::write(
        &pair,
        r#"{"name":"pair","m":2,"alpha":1,"beta":1,"delta":1,"c":1}"#,
    )
    .unwrap();
    let o = bin(&[
        "threshold",
        "--code-config",
        pair.to_str().unwrap(),
        "--k",
        "1",
        "--r",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning: m = 2"));
}

#[test]
fn codes_list() {
    let o = bin(&["codes", "list"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("steane (m=7, c=21, alpha=4, beta=10, delta=2)"));
}
