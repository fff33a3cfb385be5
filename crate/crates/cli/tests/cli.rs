use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fcsent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcsent")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn value_after(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(key)).expect(key);
    line.rsplit('=').next().unwrap().trim().parse().unwrap()
}

fn simulate(dir: &tempfile::TempDir, name: &str, state: [&str; 4], shots: &str, seed: &str) -> String {
    let out = path(dir, name);
    let o = fcsent(&[
        "simulate", "--n1", state[0], "--n2", state[1], "--mpair", state[2], "--mcoh", state[3], "--shots", shots,
        "--seed", seed, "--out", &out,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

fn analyze(data: &str, out: &str, extra: &[&str]) -> Output {
    let mut args = vec!["analyze", "--data", data, "--eta", "1", "--out", out];
    args.extend_from_slice(extra);
    fcsent(&args)
}

fn read_csv(p: &str) -> Vec<Vec<String>> {
    std::fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn thresholds_examples() {
    let o = fcsent(&["thresholds", "--n1", "1", "--n2", "1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(value_after(&text, "g2_E"), 2.0);
    assert!((value_after(&text, "g2_S") - 1.875).abs() < 1e-12);
    assert!(text.contains("2 + 1/sqrt(n1 n2) = 3"));

    let text = stdout(&fcsent(&["thresholds", "--n1", "0.001", "--n2", "0.001"]));
    assert!((value_after(&text, "g2_E") - 3.0).abs() < 5e-3);
    let text = stdout(&fcsent(&["thresholds", "--n1", "0.4", "--n2", "0.4"]));
    assert_eq!(value_after(&text, "g2_S"), 2.0);
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(code(&fcsent(&["thresholds", "--n1", "-1", "--n2", "1"])), 1);
    assert_eq!(code(&fcsent(&["thresholds", "--n1", "0", "--n2", "1"])), 1);
    assert_eq!(code(&fcsent(&["thresholds", "--n1", "1"])), 1);
    assert_eq!(code(&fcsent(&["no-such-command"])), 1);
    assert_eq!(code(&fcsent(&["--help"])), 0);
}

#[test]
fn simulate_vacuum_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let vac = simulate(&dir, "vac.csv", ["0", "0", "0", "0"], "10", "1");
    let rows = read_csv(&vac);
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[1] == "0" && r[2] == "0"));
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(path(&dir, "vac.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["source"], "synthetic");

    let pair = "1.4142135623730951";
    let a = simulate(&dir, "a.csv", ["1", "1", pair, "0"], "1000000", "9");
    let b = simulate(&dir, "b.csv", ["1", "1", pair, "0"], "1000000", "9");
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn simulate_prints_tail_mass() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "t.csv");
    let o = fcsent(&["simulate", "--n1", "0.5", "--n2", "0.5", "--shots", "5", "--out", &out]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("tail mass"));
}

#[test]
fn simulate_unphysical_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "bad.csv");
    let o = fcsent(&["simulate", "--n1", "0.5", "--n2", "0.5", "--mcoh", "0.6", "--shots", "10", "--out", &out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("Cauchy-Schwarz"));
    assert!(!Path::new(&out).exists());
}

#[test]
fn analyze_tmsv_and_thermal_product() {
    let dir = tempfile::tempdir().unwrap();
    let tmsv = simulate(&dir, "tmsv.csv", ["1", "1", "1.4142135623730951", "0"], "1000000", "5");
    let before = std::fs::read(&tmsv).unwrap();
    let out = path(&dir, "tmsv.json");
    let o = analyze(&tmsv, &out, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(std::fs::read(&tmsv).unwrap(), before);
    let text = std::fs::read_to_string(&out).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["schema_version"], "1");
    assert_eq!(doc["class"], "Entangled");
    assert_eq!(doc["inputs"]["shots"], 1_000_000);
    assert!(doc["warnings"].is_array());

    let again = path(&dir, "again.json");
    assert_eq!(code(&analyze(&tmsv, &again, &[])), 0);
    assert_eq!(std::fs::read_to_string(&again).unwrap(), text);

    let product = simulate(&dir, "prod.csv", ["0.8", "0.5", "0", "0"], "200000", "2");
    let out = path(&dir, "prod.json");
    assert_eq!(code(&analyze(&product, &out, &[])), 0);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["class"], "Separable");
}

#[test]
fn analyze_malformed_row() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(&dir, "m.csv");
    std::fs::write(&data, "shot_id,n1,n2\n0,1,2\n1,x,3\n").unwrap();
    let o = analyze(&data, &path(&dir, "m.json"), &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3"));
    assert_eq!(code(&analyze(&path(&dir, "missing.csv"), &path(&dir, "x.json"), &[])), 1);
}

#[test]
fn analyze_non_thermal_needs_override() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(&dir, "p.csv");
    // joint histogram of two independent Poisson(1) counts, 10^4 shots
    let p = |k: u64| (-1.0f64).exp() / (1..=k).map(|i| i as f64).product::<f64>();
    let mut csv = String::from("shot_id,n1,n2\n");
    let mut id = 0;
    for a in 0..8 {
        for b in 0..8 {
            for _ in 0..(1e4 * p(a) * p(b)).round() as u64 {
                csv += &format!("{id},{a},{b}\n");
                id += 1;
            }
        }
    }
    std::fs::write(&data, csv).unwrap();
    let o = analyze(&data, &path(&dir, "p.json"), &[]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("not thermal"));

    let out = path(&dir, "o.json");
    let o = analyze(&data, &out, &["--override-thermal"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let warnings = doc["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().contains("hypothesis override")));
    assert_eq!(doc["inputs"]["override_thermal"], true);
}

#[test]
fn analyze_too_few_replicates() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate(&dir, "d.csv", ["0.5", "0.5", "0.3", "0"], "1000", "1");
    let o = analyze(&data, &path(&dir, "d.json"), &["--bootstrap", "10"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn regions_efficiency_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "r.csv");
    let o = fcsent(&[
        "regions", "--fix", "n=0.3", "--g2-range", "1.9:2.5", "--other-range", "0.4:0.6", "--resolution", "61",
        "--out", &out,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let header = std::fs::read_to_string(&out).unwrap().lines().next().unwrap().to_owned();
    assert_eq!(header, "x,y,lambda_minus,log_negativity,class");
    let row: Vec<(f64, String)> = read_csv(&out)
        .into_iter()
        .filter(|r| (r[1].parse::<f64>().unwrap() - 0.5).abs() < 1e-9)
        .map(|r| (r[0].parse().unwrap(), r[4].clone()))
        .collect();
    assert_eq!(row.len(), 61);
    let at = row.iter().find(|(g, _)| (g - 2.03).abs() < 1e-9).unwrap();
    assert_eq!(at.1, "Separable");
    let border = row.iter().find(|(_, c)| c == "Entangled").unwrap().0;
    assert!(border > 2.03);
}

#[test]
fn regions_unphysical_above_tmsv() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "t.csv");
    let o = fcsent(&[
        "regions", "--fix", "theta=0", "--other-range", "0.1:2", "--g2-range", "1:6", "--resolution", "31", "--out",
        &out,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut checked = 0;
    for r in read_csv(&out) {
        let (n, g2): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let bound = 2.0 + 1.0 / n;
        if (g2 - bound).abs() < 1e-9 {
            continue;
        }
        assert_eq!(r[4] == "Unphysical", g2 > bound, "n {n}, g2 {g2}: {}", r[4]);
        checked += 1;
    }
    assert!(checked > 900);
}

#[test]
fn regions_log_negativity_slice_increases() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "s.csv");
    let o = fcsent(&[
        "regions", "--fix", "n=0.9", "--g2-range", "1.9:2.4", "--other-range", "0.3:0.4", "--resolution", "51",
        "--out", &out,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let slice: Vec<(f64, f64)> = read_csv(&out)
        .into_iter()
        .filter(|r| r[1].parse::<f64>().unwrap() == 0.3 && r[4] == "Entangled")
        .map(|r| (r[0].parse().unwrap(), r[3].parse().unwrap()))
        .collect();
    assert!(slice.len() > 10);
    assert!(slice.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1));
}

#[test]
fn regions_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "x.csv");
    assert_eq!(code(&fcsent(&["regions", "--fix", "n=0.3", "--resolution", "0", "--out", &out])), 1);
    assert_eq!(code(&fcsent(&["regions", "--fix", "n=-1", "--out", &out])), 1);
    assert_eq!(code(&fcsent(&["regions", "--fix", "m=1", "--out", &out])), 1);
    assert_eq!(code(&fcsent(&["regions", "--fix", "n=0.3", "--g2-range", "3:2", "--out", &out])), 1);
}

#[test]
fn oracle_check_passes() {
    let o = fcsent(&["oracle-check", "--grid-resolution", "1"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("wick") && text.contains("ppt"));
}

#[test]
fn oracle_check_small_cutoff_fails() {
    let o = fcsent(&["oracle-check", "--grid-resolution", "1", "--cutoff", "3"]);
    assert_eq!(code(&o), 3);
    let err = stderr(&o);
    assert!(err.contains("violation: n1=1 n2=1"));
    assert!(err.contains("tail mass"));
}

#[test]
fn oracle_check_unattainable_tolerance() {
    let o = fcsent(&["oracle-check", "--grid-resolution", "1", "--cutoff", "40", "--tolerance", "1e-15"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("deviation"));
}

#[test]
fn thread_count_from_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_fcsent"))
            .args(["thresholds", "--n1", "1", "--n2", "1"])
            .env("GE_THREADS", v)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("1")), 0);
    assert_eq!(code(&run("0")), 0);
    assert_eq!(code(&run("many")), 1);
}
