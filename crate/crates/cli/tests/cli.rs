use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gramops"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn report(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    v["result"].clone()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn no_arguments_prints_usage() {
    let (code, _, err) = run(&[]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"));
    assert_eq!(run(&["frobnicate"]).0, 2);
}

#[test]
fn theta_on_graph_files() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = json!({"n": 5, "edges": [[0,1],[1,2],[2,3],[3,4],[4,0]]}).to_string();
    let r = report(&["theta", &write(dir.path(), "c5.json", &c5)]);
    assert!((r["objective"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-5);
    assert_eq!(r["status"], "converged");
    let dimacs = "c pentagon\np edge 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 1\n";
    let d = report(&["theta", &write(dir.path(), "c5.col", dimacs)]);
    assert_eq!(d["graph_id"], r["graph_id"]);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["theta", "/nonexistent/graph.json"]).0, 2);
    assert_eq!(run(&["theta", &write(dir.path(), "bad.json", "{\"n\": 2, \"edges\": [[0, 5]]}")]).0, 2);
    assert_eq!(run(&["theta", &write(dir.path(), "trunc.json", "{\"n\": 2,")]).0, 2);
    let coeffs = write(dir.path(), "j.json", "[1, 2]");
    assert_eq!(run(&["sdp-h", "cycle:5", "--coeffs", &coeffs]).0, 2);
    assert_eq!(run(&["syk", "gen", "--n", "7", "--q", "4"]).0, 2);
}

#[test]
fn capacity_errors_exit_with_three() {
    let out = Command::new(env!("CARGO_BIN_EXE_gramops"))
        .args(["psi", "empty:12"])
        .env("GRAMOPS_CAPACITY", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let coeffs: Vec<Value> = (0..30).map(|i| json!([i as f64 + 0.5, 1.0])).collect();
    let file = write(dir.path(), "s.json", &json!({"c": [0, 0], "coeffs": coeffs}).to_string());
    assert_eq!(run(&["knapsack", "subset-sum", &file]).0, 3);
}

#[test]
fn non_convergence_exits_with_four() {
    let (code, out, _) = run(&["theta", "cycle:7", "--tol", "1e-300"]);
    assert_eq!(code, 4);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["status"], "max_iter");
}

#[test]
fn verify_passes_and_detects_tampering() {
    let r = report(&["verify", "paper-example"]);
    assert_eq!(r["passed"], true);
    assert_eq!(r["checks"].as_array().unwrap().len(), 4);

    let (code, table, _) = run(&["verify", "paper-example", "--format", "table"]);
    assert_eq!(code, 0);
    assert!(table.contains("norm_squared") && table.contains("true"));

    // rebuild the complement matrix from the edge list (unit-weight blow-up is the graph itself)
    let g = report(&["graph", "info", "paper-example"]);
    assert_eq!(g["vertices"], 12);
    let (_, info, _) = run(&["blowup", "paper-example"]);
    let edges = serde_json::from_str::<Value>(&info).unwrap()["result"]["edges"].clone();
    let mut rows = vec![vec![1u8; 12]; 12];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in edges.as_array().unwrap() {
        let (u, v) = (e[0].as_u64().unwrap() as usize, e[1].as_u64().unwrap() as usize);
        rows[u][v] = 0;
        rows[v][u] = 0;
    }
    let dir = tempfile::tempdir().unwrap();
    let clean = write(dir.path(), "clean.json", &json!(rows).to_string());
    assert_eq!(run(&["verify", "paper-example", "--complement", &clean]).0, 0);
    // join two vertices with a common neighbour, closing a triangle
    let (u, v) = (0..12)
        .flat_map(|u| (u + 1..12).map(move |v| (u, v)))
        .find(|&(u, v)| rows[u][v] == 0 && (0..12).any(|w| rows[u][w] == 1 && rows[v][w] == 1))
        .unwrap();
    rows[u][v] = 1;
    rows[v][u] = 1;
    let tampered = write(dir.path(), "tampered.json", &json!(rows).to_string());
    let (code, out, _) = run(&["verify", "paper-example", "--complement", &tampered]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    let failed: Vec<&str> = v["result"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"complement_triangle_free") || failed.contains(&"independence_number"), "{failed:?}");
}

#[test]
fn knapsack_commands() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "k0.json", r#"{"c": [3, 4], "pairs": []}"#);
    assert_eq!(report(&["knapsack", "bound", &empty])["lower_bound"], 5.0);
    let raw = write(
        dir.path(),
        "raw.json",
        r#"{"c": [0.3, 0], "qubits": [{"matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]}, {"matrix": [[[0,0],[0,0]],[[1,0],[0,0]]]}]}"#,
    );
    let b = report(&["knapsack", "bound", &raw, "--exact", "--leaves", "--orders"]);
    assert!(b["lower_bound"].as_f64().unwrap() <= b["exact_sigma_min"].as_f64().unwrap() + 1e-9);
    assert_eq!(b["leaf_values"].as_array().unwrap().len(), 4);
    let e = report(&["knapsack", "exact", &raw]);
    let s = e["sigma_min"].as_f64().unwrap();
    assert!((e["hamiltonian_ground"].as_f64().unwrap() - s * s).abs() < 1e-9);
    let ss = write(dir.path(), "ss.json", r#"{"c": [0, 0], "coeffs": [[1, 0], [1, 0]]}"#);
    let r = report(&["knapsack", "subset-sum", &ss]);
    assert_eq!(r["value"], 0.0);
    assert_eq!(r["signs"], json!([1, -1]));
}

#[test]
fn syk_commands() {
    let gen = report(&["syk", "gen", "--n", "6", "--q", "4", "--seed", "3"]);
    assert_eq!(gen["couplings"].as_array().unwrap().len(), 15);
    assert_eq!(report(&["syk", "gen", "--n", "6", "--q", "4", "--seed", "3"]), gen);

    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", &gen.to_string());
    let w = report(&["syk", "wick", "--n", "6", "--instance", &inst, "--random-sign"]);
    assert!(w["sign_matched_energy"].as_f64().unwrap() <= w["wick_energy"].as_f64().unwrap() + 1e-12);

    let g = report(&["syk", "graph", "--n", "4", "--q", "2"]);
    assert_eq!(g["vertices"], 6);
    let free = report(&["syk", "free-energy", "--n", "8"]);
    assert!((free["ground_energy"].as_f64().unwrap() + 4.0).abs() < 1e-9);
    let j0 = report(&["syk", "j0", "--n", "8"]);
    assert!(j0["wick_energy"].as_f64().unwrap() < 0.0);
    let ex = report(&["syk", "exact", "--n", "8", "--q", "4"]);
    assert!(ex["ground_energy"].as_f64().unwrap() < 0.0);
}

#[test]
fn graph_programs_and_psi() {
    let h = report(&["sdp-h", "cycle:5"]);
    assert!((h["objective"].as_f64().unwrap() + 5f64.powf(0.25)).abs() < 1e-4);
    assert_eq!(h["vector_part"].as_array().unwrap().len(), 5);
    let h2 = report(&["sdp-h2", "cycle:5"]);
    assert!((h2["objective"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-4);

    let p = report(&["psi", "paper-example", "--theta"]);
    assert!(p["norm_squared"].as_f64().unwrap() >= 2.005);
    assert!(p["theta"].as_f64().unwrap() >= p["norm_squared"].as_f64().unwrap());

    let dir = tempfile::tempdir().unwrap();
    let wg = write(
        dir.path(),
        "w.json",
        &json!({"n": 5, "edges": [[0,1],[1,2],[2,3],[3,4],[4,0]], "weights": [2, 1, 1, 1, 1]}).to_string(),
    );
    let opt = report(&["psi", &wg, "--optimize", "5"]);
    assert!(opt["norm_squared"].as_f64().unwrap() >= opt["initial_norm_squared"].as_f64().unwrap());
    let b = report(&["blowup", &wg]);
    assert_eq!(b["n"], 6);
    assert_eq!(b["edges"].as_array().unwrap().len(), 7);
}

#[test]
fn search_reports_trials_in_order() {
    let r = report(&["search", "triangle-free", "--n", "8", "--trials", "3", "--seed", "11"]);
    let trials: Vec<u64> = r["reports"].as_array().unwrap().iter().map(|t| t["trial"].as_u64().unwrap()).collect();
    assert_eq!(trials, vec![0, 1, 2]);
    for t in r["reports"].as_array().unwrap() {
        assert!(t["alpha"].as_i64().unwrap() <= 2);
    }
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let (code, out, _) = run(&["graph", "info", "cycle:5", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["result"]["independence"]["value"], 2);
}
