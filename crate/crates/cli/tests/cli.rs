use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dnml-sbm"))
}

fn karate() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/karate.txt")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn selected_k(csv_text: &str) -> usize {
    let mut lines = csv_text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k_col = header.iter().position(|&h| h == "k").unwrap();
    let sel_col = header.iter().position(|&h| h == "selected").unwrap();
    let hits: Vec<usize> = lines
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f[sel_col] == "true")
        .map(|f| f[k_col].parse().unwrap())
        .collect();
    assert_eq!(hits.len(), 1);
    hits[0]
}

#[test]
fn karate_selects_one() {
    let out = run(&[
        "estimate",
        "--input",
        karate().to_str().unwrap(),
        "--seed",
        "0",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# dnml-sbm estimate v1\n"));
    assert_eq!(selected_k(&text), 1);
}

#[test]
fn json_mirrors_csv() {
    let karate = karate();
    let path = karate.to_str().unwrap();
    let csv_out = run(&["estimate", "--input", path, "--seed", "4", "--method", "il"]);
    let json_out = run(&[
        "estimate", "--input", path, "--seed", "4", "--method", "il", "--json",
    ]);
    let value: serde_json::Value = serde_json::from_slice(&json_out.stdout).unwrap();
    let rows = value["rows"].as_array().unwrap();
    let text = String::from_utf8(csv_out.stdout).unwrap();
    let mut lines = text.lines().skip(1);
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let csv_rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), csv_rows.len());
    for row in rows {
        let keys: Vec<&str> = row
            .as_object()
            .unwrap()
            .keys()
            .map(|s| s.as_str())
            .collect();
        let mut sorted_header = header.clone();
        sorted_header.sort();
        let mut sorted_keys = keys.clone();
        sorted_keys.sort();
        assert_eq!(sorted_keys, sorted_header);
    }
    assert_eq!(value["k_hat"].as_u64().unwrap() as usize, selected_k(&text));
}

#[test]
fn output_file_and_generated_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("k.csv");
    let out = run(&[
        "estimate",
        "--input",
        karate().to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed: "));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "k_hat = 1");
    assert_eq!(selected_k(&std::fs::read_to_string(out_path).unwrap()), 1);
}

#[test]
fn bad_flags_exit_one() {
    let karate = karate();
    let path = karate.to_str().unwrap();
    for args in [
        vec!["estimate", "--input", path, "--kmax", "0"],
        vec!["estimate", "--input", path, "--kmax", "35"],
        vec!["estimate", "--input", path, "--method", "aic"],
        vec!["estimate", "--input", path, "--epsilon", "-1"],
        vec!["estimate"],
        vec!["frobnicate"],
        vec!["simulate", "--scenario", "vary-b", "--seed", "1"],
        vec![
            "simulate",
            "--scenario",
            "custom",
            "--n",
            "50,60",
            "--seed",
            "1",
        ],
        vec!["simulate", "--scenario", "custom", "-r", "0", "--seed", "1"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn unreadable_input_exits_two() {
    let out = run(&["estimate", "--input", "/no/such/graph.txt", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/graph.txt"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 2\nx y\n").unwrap();
    let out = run(&["estimate", "--input", bad.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn adjacency_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    std::fs::write(&path, "0,1,1\n1,0,1\n1,1,0\n").unwrap();
    let out = run(&["estimate", "--input", path.to_str().unwrap(), "--seed", "1"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(selected_k(&String::from_utf8(out.stdout).unwrap()), 1);
}

#[test]
fn simulate_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let main = dir.path().join(format!("sim{i}.csv"));
        let summary = dir.path().join(format!("sum{i}.csv"));
        let out = run(&[
            "simulate",
            "--scenario",
            "vary-n",
            "--n",
            "40,60",
            "-r",
            "1",
            "--seed",
            "11",
            "--methods",
            "dnml,cbic,il",
            "--output",
            main.to_str().unwrap(),
            "--summary",
            summary.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push((
            std::fs::read(main).unwrap(),
            std::fs::read(summary).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert!(text.starts_with("# dnml-sbm simulate v1\n"));
    assert_eq!(text.lines().count(), 2 + 2 * 3);
}

#[test]
fn sparsity_scenario_and_timings() {
    let dir = tempfile::tempdir().unwrap();
    let timings = dir.path().join("t.csv");
    let out = run(&[
        "simulate",
        "--scenario",
        "sparsity",
        "--n",
        "50",
        "--a",
        "5",
        "--b",
        "1",
        "--rho-grid",
        "0.05,0.1",
        "-r",
        "2",
        "--seed",
        "3",
        "--timings",
        timings.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2 + 2 * 2);
    assert!(text.contains(",0.05,"));
    let t = std::fs::read_to_string(timings).unwrap();
    assert!(t.lines().nth(1).unwrap().contains("detection_ns"));
}

#[test]
fn bench_grid() {
    assert_eq!(run(&["bench", "--seed", "1"]).status.code(), Some(1));
    assert_eq!(
        run(&["bench", "--n-grid", "", "--seed", "1"]).status.code(),
        Some(1)
    );
    let out = run(&[
        "bench",
        "--n-grid",
        "30,60",
        "--kmax",
        "4",
        "--seed",
        "1",
        "--repeats",
        "1",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# dnml-sbm bench v1\n"));
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "n,k_max,edges,k_hat,detection_ns,criterion_ns"
    );
    assert_eq!(text.lines().count(), 4);
}
