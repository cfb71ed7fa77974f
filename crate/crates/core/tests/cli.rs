use std::path::PathBuf;
use std::process::Command;

use holoprop::cli::run;
use holoprop::format::{parse_model_str, ModelFile};
use holoprop::model::{classical_partition_oracle, exact_value};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn holoprop(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("holoprop").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no `{key}` in report:\n{report}"))
        .parse()
        .unwrap()
}

#[test]
fn exact_single_edge_prints_eleven() {
    let (code, out, _) = holoprop(&["exact", &fixture("single_edge.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "11\n");
}

#[test]
fn loop_report_on_four_cycle() {
    let (code, out, _) = holoprop(&["loop", &fixture("four_cycle.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("bethe "));
    assert!(out.contains("terms "));
    assert!((field(&out, "partial_sum") - 2.0).abs() < 1e-6);

    let (code, json, _) = holoprop(&["loop", &fixture("four_cycle.json"), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!((v["partial_sum"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(v["terms"].as_array().unwrap().len(), 1);
}

#[test]
fn truncated_loop_series_is_marked() {
    let (code, out, _) = holoprop(&["loop", &fixture("four_cycle.json"), "--max-support", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("exhaustive false"));
    assert_eq!(field(&out, "partial_sum"), 1.0);
}

#[test]
fn bp_on_zero_tensor_is_a_numerical_failure() {
    let (code, _, err) = holoprop(&["bp", &fixture("zero_g.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("NonpositiveNormalizer"), "{err}");
}

#[test]
fn bp_without_convergence_exits_two() {
    let (code, out, err) = holoprop(&["bp", &fixture("factor_graph.json"), "--max-iters", "1"]);
    assert_eq!(code, 2);
    assert!(out.contains("converged false"));
    assert!(err.contains("did not converge"));
}

#[test]
fn bp_flags() {
    let (code, out, _) =
        holoprop(&["bp", &fixture("factor_graph.json"), "--schedule", "sequential", "--damping", "0.3", "--tol", "1e-12"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("converged true"));
    let (code, _, _) = holoprop(&["bp", &fixture("factor_graph.json"), "--damping", "1.5"]);
    assert_eq!(code, 1);
    let (code, _, _) = holoprop(&["bp", &fixture("factor_graph.json"), "--schedule", "random"]);
    assert_eq!(code, 1);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["exact", "factor_graph.json"],
        vec!["bp", "factor_graph.json"],
        vec!["loop", "factor_graph.json", "--json"],
        vec!["holant", "factor_graph.json", "--seed", "7"],
        vec!["mbqc", "graph_state.json"],
        vec!["convert", "factor_graph.json"],
    ] {
        let path = fixture(args[1]);
        let mut argv = args.clone();
        argv[1] = &path;
        let first = holoprop(&argv);
        assert_eq!(first.0, 0, "{args:?}: {}", first.2);
        assert_eq!(first, holoprop(&argv), "{args:?}");
    }
}

#[test]
fn holant_reports_matching_values() {
    let (code, out, _) = holoprop(&["holant", &fixture("factor_graph.json"), "--seed", "3"]);
    assert_eq!(code, 0);
    assert!(field(&out, "relative_gap") < 1e-9);
    assert!((field(&out, "original") - field(&out, "gauged")).abs() < 1e-9 * field(&out, "original"));
}

#[test]
fn holant_with_gauge_file() {
    let dir = std::env::temp_dir().join(format!("holoprop-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let gauge = dir.join("swap.json");
    std::fs::write(&gauge, r#"{"edges":[{"left":"v","right":"w","matrix":[0,1,1,0]}]}"#).unwrap();
    let (code, out, _) =
        holoprop(&["holant", &fixture("single_edge.json"), "--gauge", gauge.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "gauged"), 11.0);

    std::fs::write(&gauge, r#"{"edges":[{"left":"v","right":"w","matrix":[1,1,1,1]}]}"#).unwrap();
    let (code, _, err) =
        holoprop(&["holant", &fixture("single_edge.json"), "--gauge", gauge.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn mbqc_matches_statevector() {
    let (code, out, _) = holoprop(&["mbqc", &fixture("graph_state.json")]);
    assert_eq!(code, 0);
    assert!(field(&out, "relative_gap") < 1e-10);
    let (code, _, err) = holoprop(&["mbqc", &fixture("single_edge.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("graph_state"));
}

#[test]
fn convert_output_reparses_to_the_classical_value() {
    let text = std::fs::read_to_string(fixture("factor_graph.json")).unwrap();
    let ModelFile::FactorGraph(fg) = parse_model_str(&text).unwrap() else { panic!() };
    let z = classical_partition_oracle(&fg).unwrap();

    let (code, out, _) = holoprop(&["convert", &fixture("factor_graph.json")]);
    assert_eq!(code, 0);
    let ModelFile::Bipartite(m) = parse_model_str(&out).unwrap() else { panic!() };
    assert!((exact_value(&m).unwrap() - z).abs() < 1e-12 * z);
}

#[test]
fn malformed_input_exits_one() {
    let dir = std::env::temp_dir().join(format!("holoprop-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"kind":"bipartite","left":["v"],"right":["w"],
        "edges":[{"left":"v","right":"w","dim":2}],"tensors":{"v":[1,2,3],"w":[3,4]}}"#)
        .unwrap();
    let (code, _, err) = holoprop(&["exact", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("tensor v"), "{err}");

    std::fs::write(&bad, "{\"kind\": \"bipartite\",\n  \"left\": [}").unwrap();
    let (code, _, err) = holoprop(&["exact", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_wires_exit_codes_and_streams() {
    let bin = env!("CARGO_BIN_EXE_holoprop");
    let ok = Command::new(bin).args(["exact", &fixture("single_edge.json")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "11\n");
    let bad = Command::new(bin).args(["bp", &fixture("zero_g.json")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("NonpositiveNormalizer"));
}
