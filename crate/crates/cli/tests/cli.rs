use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deficiency"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn antitree_writes_graph_and_sphere_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    let o = run(&["antitree", "--alpha", "2", "--depth", "4", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read_to_string(out.join("spheres.csv")).unwrap(),
        "n,s_n\n0,1\n1,1\n2,4\n3,9\n4,16\n"
    );
    let g: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("antitree.json")).unwrap()).unwrap();
    assert_eq!(g["vertex_count"], 31);
    assert_eq!(g["boundary"].as_array().unwrap().len(), 16);

    let out = dir.path().join("b");
    run(&["antitree", "--alpha", "1.5", "--depth", "3", "--out", p(&out)]);
    assert_eq!(
        fs::read_to_string(out.join("spheres.csv")).unwrap(),
        "n,s_n\n0,1\n1,1\n2,2\n3,5\n"
    );
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    for args in [
        vec!["antitree", "--alpha", "0", "--depth", "4", "--out", p(&out)],
        vec!["antitree", "--alpha", "-1", "--out", p(&out)],
        vec!["solve", "--alpha", "2", "--n-max", "0"],
        vec!["analyze"],
        vec!["glue", "--alpha", "2", "--copies", "0"],
        vec!["check-reduction", "--alpha", "2", "--depth", "2"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&run(&["analyze", "--descriptor", p(&bad)])), 2);
}

#[test]
fn analyze_reports_indices() {
    for (args, eta) in [
        (vec!["--alpha", "2"], 1),
        (vec!["--alpha", "2", "--copies", "4"], 4),
        (vec!["--alpha", "1"], 0),
    ] {
        let mut full = vec!["analyze", "--antitree"];
        full.extend(args);
        let o = run(&full);
        assert_eq!(code(&o), 0);
        assert_eq!(stdout_json(&o)["eta"], eta);
    }
}

#[test]
fn analyze_undetermined_exits_three() {
    let o = run(&["analyze", "--antitree", "--sizes", "1,2,3"]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout_json(&o)["eta"], "undetermined");
}

#[test]
fn descriptor_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.json");
    fs::write(
        &d,
        r#"{"kind":"disjoint_union","components":[
            {"kind":"finite_graph","graph":{"vertex_count":3,"edges":[[0,1],[1,2]],"boundary":[]}},
            {"kind":"antitree","spec":{"kind":"power_law","alpha":1.5,"depth":4}},
            {"kind":"glued","base":{"kind":"antitree","spec":{"kind":"power_law","alpha":3.0,"depth":4}},"copies":2}
        ]}"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["analyze", "--descriptor", p(&d), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["eta"], 3);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.find("\"eta\"").unwrap() < text.find("\"trace\"").unwrap());
    assert!(text.find("\"trace\"").unwrap() < text.find("\"diagnostics\"").unwrap());
}

#[test]
fn contradictory_analysis_exits_four() {
    // For alpha = 2, sum 1/a_n = 2 by the registered rule; a divergence
    // threshold below 2 makes the numerical scan contradict the rule.
    let o = run(&["analyze", "--antitree", "--alpha", "2", "--divergence-threshold", "1.5"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn solve_traces() {
    let o = run(&["solve", "--alpha", "2", "--z", "0,1", "--n-max", "10000"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("n,log10_abs_u,log10_partial_sum\n"));
    let s = csv_column(&text, 2);
    assert_eq!(s.len(), 10_001);
    assert!(s[9_900..].iter().all(|x| (x - s[10_000]).abs() < 1e-6));

    let o = run(&["solve", "--alpha", "1", "--n-max", "10000"]);
    let s = csv_column(&String::from_utf8(o.stdout).unwrap(), 2);
    assert!(s[9_000..].windows(2).all(|w| w[1] > w[0]));

    let o = run(&["solve", "--constant", "1,0", "--z", "-0.5,0.25", "--n-max", "10"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn check_reduction_and_fault_injection() {
    let o = run(&["check-reduction", "--alpha", "2", "--depth", "8", "--trials", "100"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert!(r["max_deviation"].as_f64().unwrap() < 1e-12);
    assert!(r.get("failing_identity").is_none());

    let o = run(&[
        "check-reduction",
        "--alpha",
        "2",
        "--perturb-index",
        "3",
        "--perturb-delta",
        "1e-3",
    ]);
    assert_eq!(code(&o), 4);
    let d = stdout_json(&o)["max_deviation"].as_f64().unwrap();
    assert!(d > 0.5e-3 && d < 2e-3);
}

#[test]
fn glue_counts_edges() {
    let o = run(&["glue", "--alpha", "2", "--depth", "3", "--copies", "3"]);
    assert_eq!(code(&o), 0);
    let g = stdout_json(&o);
    assert_eq!(g["vertex_count"], 45);
    assert_eq!(g["edges"].as_array().unwrap().len(), 3 * 41 + 2);
}
