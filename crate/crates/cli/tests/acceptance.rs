//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p deficiency-cli --test acceptance`.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use deficiency_core::jacobi::criteria::reciprocal_partial_sum;
use deficiency_core::jacobi::Coefficients;
use deficiency_core::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deficiency"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn parse(o: &Output) -> Result<Value, String> {
    serde_json::from_slice(&o.stdout).map_err(|e| format!("stdout is not JSON: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn trace_verdicts<'a>(report: &'a Value, rule: &str) -> Vec<&'a str> {
    report["trace"]
        .as_array()
        .into_iter()
        .flatten()
        .filter(|e| e["rule"] == rule)
        .filter_map(|e| e["verdict"].as_str())
        .collect()
}

fn analytic_decision(report: &Value) -> bool {
    report["trace"]
        .as_array()
        .into_iter()
        .flatten()
        .any(|e| e["evidence"] == "exact")
}

fn criterion_1() -> Check {
    let budget = Duration::from_secs(5);
    let mut slowest = Duration::ZERO;
    for (alpha, eta) in [
        ("0.3", 0),
        ("0.5", 0),
        ("0.8", 0),
        ("1.0", 0),
        ("1.3", 1),
        ("1.5", 1),
        ("2", 1),
        ("3", 1),
    ] {
        let start = Instant::now();
        let o = run(&["analyze", "--antitree", "--alpha", alpha]);
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        ensure(exit_code(&o) == 0, || format!("alpha {alpha}: exit {}", exit_code(&o)))?;
        ensure(elapsed < budget, || format!("alpha {alpha}: took {elapsed:?}"))?;
        let r = parse(&o)?;
        ensure(r["eta"] == eta, || format!("alpha {alpha}: eta {}", r["eta"]))?;
        ensure(analytic_decision(&r), || format!("alpha {alpha}: no analytic decision"))?;
        let expected = if eta == 0 { "limit_point" } else { "limit_circle" };
        let classifier = trace_verdicts(&r, "limit_classifier");
        ensure(classifier == [expected], || {
            format!("alpha {alpha}: classifier said {classifier:?}")
        })?;
    }
    Ok(format!("8 exponents decided, classifier agrees, slowest {slowest:.2?}"))
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize, cut: bool) -> Value {
    let edges: Vec<[usize; 2]> = (1..n).map(|v| [rng.gen_range(0..v), v]).collect();
    let boundary: Vec<usize> = if cut { vec![n - 1] } else { vec![] };
    serde_json::json!({ "vertex_count": n, "edges": edges, "boundary": boundary })
}

fn analyze_descriptor(dir: &Path, name: &str, descriptor: &Value) -> Result<(i32, Value), String> {
    let path = dir.join(name);
    fs::write(&path, descriptor.to_string()).map_err(|e| e.to_string())?;
    let o = run(&["analyze", "--descriptor", path.to_str().unwrap()]);
    Ok((exit_code(&o), parse(&o)?))
}

fn criterion_2() -> Check {
    for n in 1..=5 {
        let copies = n.to_string();
        let o = run(&["analyze", "--antitree", "--alpha", "2", "--copies", &copies]);
        let r = parse(&o)?;
        ensure(exit_code(&o) == 0 && r["eta"] == n, || {
            format!("{n} copies: exit {}, eta {}", exit_code(&o), r["eta"])
        })?;
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let finite = serde_json::json!({
        "kind": "finite_graph",
        "graph": { "vertex_count": 4, "edges": [[0, 1], [1, 2], [2, 3], [3, 0]], "boundary": [] }
    });
    let (code, r) = analyze_descriptor(dir.path(), "finite.json", &finite)?;
    ensure(code == 0 && r["eta"] == 0, || format!("finite graph: exit {code}, eta {}", r["eta"]))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let trees = 40;
    for k in 0..trees {
        let size = rng.gen_range(2..60);
        let cut = k % 2 == 1;
        let tree = serde_json::json!({ "kind": "tree", "graph": random_tree(&mut rng, size, cut) });
        let (code, r) = analyze_descriptor(dir.path(), "tree.json", &tree)?;
        let eta = &r["eta"];
        let finite_nonzero = eta.as_u64().is_some_and(|e| e != 0);
        ensure(!finite_nonzero, || format!("tree {k}: eta {eta}"))?;
        ensure(matches!(code, 0 | 3), || format!("tree {k}: exit {code}"))?;
    }
    Ok(format!("glued 1..5 give 1..5, finite graph gives 0, {trees} trees never finite nonzero"))
}

fn criterion_3() -> Check {
    let n_max = 1_000_000;
    let j = JacobiMatrix::antitree_floor(2.0).map_err(|e| e.to_string())?;
    let partial = reciprocal_partial_sum(&j, n_max).map_err(|e| e.to_string())?;
    let closed_form = 2.0 - 1.0 / (n_max as f64 + 1.0);
    ensure((partial - closed_form).abs() < 1e-9, || {
        format!("partial sum {partial} vs closed form {closed_form}")
    })?;
    let r = carleman_test(&j, n_max, 1e4).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Fails, || format!("carleman verdict {:?}", r.verdict))?;
    let tail = r.witness.tail_exact.ok_or("no exact tail reported")?;
    let total = r.witness.partial_sum.unwrap_or(f64::NAN) + tail;
    ensure((total - 2.0).abs() < 1e-9, || format!("partial + tail = {total}"))?;
    Ok(format!(
        "sum to 1e6 = {partial:.12}, |2 - (partial + tail)| = {:.1e}",
        (total - 2.0).abs()
    ))
}

fn criterion_4() -> Check {
    let o = run(&["check-reduction", "--alpha", "2", "--depth", "8", "--trials", "100"]);
    ensure(exit_code(&o) == 0, || format!("clean run exit {}", exit_code(&o)))?;
    let clean = parse(&o)?["max_deviation"].as_f64().ok_or("no max_deviation")?;
    ensure(clean < 1e-12, || format!("clean deviation {clean:e}"))?;

    let o = run(&[
        "check-reduction",
        "--alpha",
        "2",
        "--depth",
        "8",
        "--trials",
        "100",
        "--perturb-index",
        "3",
        "--perturb-delta",
        "1e-3",
    ]);
    ensure(exit_code(&o) == 4, || format!("faulty run exit {}", exit_code(&o)))?;
    let r = parse(&o)?;
    let faulty = r["max_deviation"].as_f64().ok_or("no max_deviation")?;
    ensure((0.5e-3..=2e-3).contains(&faulty), || format!("faulty deviation {faulty:e}"))?;
    ensure(r["failing_identity"].is_string(), || "no failing identity".into())?;
    Ok(format!("clean {clean:.1e}, injected fault detected at {faulty:.3e}"))
}

type Gaussian = (BigRational, BigRational);

fn exact_alpha_two_solution(len: usize) -> Vec<Complex64> {
    let int = |k: u64| BigRational::from_integer(BigInt::from(k));
    let a = |n: u64| if n == 0 { int(1) } else { int(n * (n + 1)) };
    let mut u: Vec<Gaussian> = vec![(int(1), BigRational::zero()), (BigRational::zero(), int(1))];
    for n in 1..len as u64 - 1 {
        let (cur, prev) = (&u[n as usize], &u[n as usize - 1]);
        // a_n u(n+1) = i u(n) - a_(n-1) u(n-1)
        let re = (-&cur.1 - &prev.0 * a(n - 1)) / a(n);
        let im = (&cur.0 - &prev.1 * a(n - 1)) / a(n);
        u.push((re, im));
    }
    u.iter()
        .map(|(re, im)| Complex64::new(re.to_f64().unwrap(), im.to_f64().unwrap()))
        .collect()
}

fn criterion_5() -> Check {
    let err = |e: JacobiError| e.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let z = Complex64::new(0.0, 1.0);
    let n_max = 10_000;
    let (mut worst_drift, mut worst_residual) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let p = rng.gen_range(1.5..3.0);
        let c = rng.gen_range(0.5..2.0);
        let a: Vec<f64> = (0..n_max + 2).map(|n| c * ((n + 1) as f64).powf(p)).collect();
        let b: Vec<f64> = (0..n_max + 2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let j = JacobiMatrix::from_sequences(a, b).map_err(err)?;
        let mut pick = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (u0, u1, v0, v1) = (pick(), pick(), pick(), pick());
        let u = solve_recurrence(&j, z, (u0, u1), n_max).map_err(err)?;
        let v = solve_recurrence(&j, z, (v0, v1), n_max).map_err(err)?;
        worst_residual = worst_residual
            .max(u.max_relative_residual(&j).map_err(err)?)
            .max(v.max_relative_residual(&j).map_err(err)?);
        let w0 = wronskian(&j, &u, &v, 0).map_err(err)?;
        for n in 1..n_max {
            let w = wronskian(&j, &u, &v, n).map_err(err)?;
            worst_drift = worst_drift.max(w.relative_difference(w0));
        }
    }
    ensure(worst_drift < 1e-10, || format!("Wronskian drift {worst_drift:e}"))?;
    ensure(worst_residual < 1e-10, || format!("residual {worst_residual:e}"))?;

    let exact = exact_alpha_two_solution(51);
    let j = JacobiMatrix::antitree_floor(2.0).map_err(err)?;
    let sol = solve_recurrence(&j, z, (Complex64::new(1.0, 0.0), z), 50).map_err(err)?;
    let mut worst_trace = 0.0f64;
    for (n, e) in exact.iter().enumerate() {
        worst_trace = worst_trace.max((sol.value(n).to_complex() - e).norm() / e.norm());
    }
    ensure(worst_trace < 1e-8, || format!("trace vs exact oracle {worst_trace:e}"))?;
    Ok(format!(
        "drift {worst_drift:.1e}, residual {worst_residual:.1e}, trace vs exact {worst_trace:.1e}"
    ))
}

fn criterion_6() -> Check {
    let err = |e: JacobiError| e.to_string();
    let tol = ClassifierTolerances::default();
    let base = JacobiMatrix::antitree_floor(2.0).map_err(err)?;
    let diagonals: [(&str, Coefficients); 4] = [
        ("+10", Coefficients::Constant(10.0)),
        ("-10", Coefficients::Constant(-10.0)),
        ("10 sin n", Coefficients::rule(|n| Ok(10.0 * (n as f64).sin()))),
        ("alternating 10", Coefficients::rule(|n| Ok(if n % 2 == 0 { 10.0 } else { -10.0 }))),
    ];
    for (name, b) in diagonals {
        let j = base.clone().with_diagonal(b, Some(10.0));
        let c = classify_limit(&j, &tol).map_err(err)?;
        ensure(c.class == LimitClass::LimitCircle, || format!("diagonal {name}: {:?}", c.class))?;
    }
    let mut sups = Vec::new();
    for alpha in [2.0, 1.5, 2.5] {
        let floor = JacobiMatrix::antitree_floor(alpha).map_err(err)?;
        let exact = JacobiMatrix::antitree_exact(alpha);
        let bound = bounded_difference(&floor, &exact, 1_000_000).map_err(err)?;
        // Only alpha = 2 is held to the limiting value; elsewhere the finite-n
        // supremum may overshoot 1 while staying bounded.
        ensure(alpha != 2.0 || bound.sup_estimate <= 1.0 + 1e-6, || {
            format!("alpha {alpha}: sup {}", bound.sup_estimate)
        })?;
        ensure(bound.certified, || format!("alpha {alpha}: difference not certified"))?;
        sups.push(format!("{alpha}: {:.6}", bound.sup_estimate));
    }
    Ok(format!(
        "4 diagonals stay limit circle, floor vs exact sup {}",
        sups.join(", ")
    ))
}

fn criterion_7() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let descriptor = dir.path().join("d.json");
    fs::write(
        &descriptor,
        r#"{"kind":"disjoint_union","components":[
            {"kind":"antitree","spec":{"kind":"power_law","alpha":1.5,"depth":4}},
            {"kind":"antitree","spec":{"kind":"power_law","alpha":0.8,"depth":4}}]}"#,
    )
    .map_err(|e| e.to_string())?;
    let d = descriptor.to_str().unwrap();
    let commands: [&[&str]; 7] = [
        &["glue", "--alpha", "2", "--depth", "3", "--copies", "3"],
        &["analyze", "--antitree", "--alpha", "2", "--copies", "2"],
        &["analyze", "--descriptor", d],
        &["solve", "--alpha", "2", "--n-max", "2000"],
        &["solve", "--alpha", "1.5", "--exact", "--z", "0.5,-1", "--n-max", "500"],
        &["check-reduction", "--alpha", "2", "--seed", "11"],
        &["check-reduction", "--alpha", "2", "--perturb-index", "2", "--perturb-delta", "1e-3"],
    ];
    for args in commands {
        let (first, second) = (run(args), run(args));
        ensure(first.stdout == second.stdout && !first.stdout.is_empty(), || {
            format!("{args:?} differs between runs")
        })?;
    }
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        run(&["antitree", "--alpha", "1.5", "--depth", "5", "--out", out.to_str().unwrap()]);
    }
    for file in ["antitree.json", "spheres.csv"] {
        let read = |p: &Path| fs::read(p.join(file)).unwrap_or_default();
        ensure(read(&a) == read(&b) && !read(&a).is_empty(), || format!("{file} differs"))?;
    }
    Ok(format!("{} invocations byte-identical", commands.len() + 1))
}

fn criterion_8() -> Check {
    let mut outcomes = Vec::new();
    for (alpha, eta) in [("0.97", 0), ("1.03", 1)] {
        let o = run(&["analyze", "--antitree", "--alpha", alpha]);
        let r = parse(&o)?;
        let outcome = match exit_code(&o) {
            0 if r["eta"] == eta => "correct",
            3 if r["eta"] == "undetermined" => "undetermined",
            code => return Err(format!("alpha {alpha}: exit {code}, eta {}", r["eta"])),
        };
        outcomes.push(format!("{alpha} {outcome}"));
    }
    Ok(outcomes.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("power-law antitree indices", criterion_1),
        ("glued copies, finite graphs, trees", criterion_2),
        ("telescoping reciprocal sum", criterion_3),
        ("radial reduction consistency", criterion_4),
        ("solver integrity", criterion_5),
        ("perturbation invariance", criterion_6),
        ("determinism", criterion_7),
        ("near-critical honesty", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
