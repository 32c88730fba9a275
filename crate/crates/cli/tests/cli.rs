use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../core/scenarios/{name}.scenario"))
}

fn prbdim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prbdim"))
        .args(args)
        .env_remove("PRBDIM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a rendered table, split on commas.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn congestion_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario("fig2_tau30");
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let path = dir.path().join(format!("run{i}.csv"));
        let out = Command::new(env!("CARGO_BIN_EXE_prbdim"))
            .args(["congestion", "--scenario", s.to_str().unwrap(), "--m-max", "250", "--realizations", "500"])
            .args(["--out", path.to_str().unwrap()])
            .env("PRBDIM_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn congestion_column_is_nonincreasing_probability() {
    let s = scenario("fig7");
    let out = prbdim(&["congestion", "--scenario", s.to_str().unwrap(), "--m-max", "300", "--realizations", "200"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# seed: 1"));
    assert!(text.contains("# realizations: 200"));
    assert!(text.contains("# sampler: paper"));
    let pi: Vec<f64> = rows(&text).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(pi.len(), 300);
    assert!(pi.iter().all(|p| (0.0..=1.0).contains(p)));
    assert!(pi.windows(2).all(|w| w[1] <= w[0]));
    assert!(pi[299] < 0.05);
}

#[test]
fn zero_m_max_writes_header_only() {
    let s = scenario("fig4");
    let out = prbdim(&["congestion", "--scenario", s.to_str().unwrap(), "--m-max", "0", "--realizations", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>(), ["M,pi_analytic,stderr"]);
}

#[test]
fn with_mc_adds_interval_columns() {
    let s = scenario("fig2_tau14");
    let out = prbdim(&[
        "congestion", "--scenario", s.to_str().unwrap(), "--m-max", "150", "--realizations", "300", "--with-mc",
        "--replications", "300",
    ]);
    assert!(out.status.success());
    for r in rows(&stdout(&out)) {
        let v: Vec<f64> = r[3..].iter().map(|c| c.parse().unwrap()).collect();
        assert!(v[1] <= v[0] && v[0] <= v[2], "{r:?}");
    }
}

#[test]
fn out_of_range_target_is_a_validation_error() {
    let s = scenario("fig7");
    let out = prbdim(&["dimension", "--scenario", s.to_str().unwrap(), "--target", "1.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(0, 1)"));
}

#[test]
fn ceiling_is_reported_with_its_own_code() {
    let s = scenario("fig7");
    let out = prbdim(&[
        "dimension", "--scenario", s.to_str().unwrap(), "--target", "0.05", "--realizations", "50", "--m-ceiling",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(prbdim(&["congestion", "--m-max", "3"]).status.code(), Some(2));
    assert_eq!(prbdim(&["validate", "--suite", "nonsense"]).status.code(), Some(2));
}

#[test]
fn missing_file_is_an_io_error() {
    let out = prbdim(&["congestion", "--scenario", "/nonexistent/x.scenario", "--m-max", "3"]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn malformed_scenario_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scenario");
    let text = std::fs::read_to_string(scenario("fig4")).unwrap().replace("seed = 1", "seed = 1\nsead = 2");
    std::fs::write(&path, text).unwrap();
    let out = prbdim(&["congestion", "--scenario", path.to_str().unwrap(), "--m-max", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sead"));
}

#[test]
fn sweep_has_one_row_per_throughput() {
    let s = scenario("fig2_tau30");
    let out = prbdim(&[
        "sweep", "--scenario", s.to_str().unwrap(), "--target", "0.05", "--tau-grid", "10:30:10", "--realizations",
        "200",
    ]);
    assert!(out.status.success());
    let table = rows(&stdout(&out));
    assert_eq!(table.len(), 3);
    let m: Vec<usize> = table.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(m.windows(2).all(|w| w[0] <= w[1]), "{m:?}");
    assert!(table.iter().all(|r| r[6] == "ok"));
}

#[test]
fn simulate_reports_wilson_columns() {
    let s = scenario("fig2_tau14");
    let out = prbdim(&["simulate", "--scenario", s.to_str().unwrap(), "--m-max", "120", "--replications", "2000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "M,pi_mc,ci_lower,ci_upper"));
    assert!(text.contains("# mean_gamma: "));
    for r in rows(&text) {
        let v: Vec<f64> = r[1..].iter().map(|c| c.parse().unwrap()).collect();
        assert!(v[1] <= v[0] && v[0] <= v[2]);
    }
}

#[test]
fn identity_suite_passes_and_summarizes() {
    let out = prbdim(&["validate", "--suite", "identities", "--seed", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().last().unwrap().contains("\"failed\":0"));
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 5);
}
