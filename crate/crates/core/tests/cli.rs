//! End-to-end checks of the command-line interface: exit codes, report
//! shape, determinism, and the CSV contract.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn netctrl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netctrl"))
        .args(args)
        .env_remove("NETCTRL_SEED")
        .output()
        .expect("spawn netctrl")
}

fn json_stdout(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_controllable_fixture_exits_zero() {
    let out = netctrl(&["analyze", fixture("seven_node.graph").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["rank"]["dim"], 2);
    assert_eq!(v["verdict"]["status"], "TARGET_CONTROLLABLE");
}

#[test]
fn analyze_deficient_fixture_exits_three_with_certificate() {
    let out = netctrl(&["analyze", fixture("four_node_fan.graph").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let v = json_stdout(&out);
    assert_eq!(v["rank"]["dim"], 1);
    assert!(!v["verdict"]["certificates"].as_array().unwrap().is_empty());
}

#[test]
fn analyze_missing_and_empty_files_exit_one() {
    let out = netctrl(&["analyze", "/nonexistent/file.graph"]);
    assert_eq!(out.status.code(), Some(1));

    let dir = std::env::temp_dir().join("netctrl-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let empty = dir.join("empty.graph");
    std::fs::write(&empty, "").unwrap();
    let out = netctrl(&["analyze", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn analyze_parse_error_names_the_line() {
    let dir = std::env::temp_dir().join("netctrl-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.graph");
    std::fs::write(&bad, "n 2\nleaders 1\ntargets 2\nedge 1 1 1\n").unwrap();
    let out = netctrl(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("self-loop"), "{err}");
}

#[test]
fn analyze_no_exact_degrades_to_undetermined() {
    let out = netctrl(&[
        "analyze",
        fixture("seven_node.graph").to_str().unwrap(),
        "--no-exact",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let v = json_stdout(&out);
    assert!(v["rank"].is_null());
}

#[test]
fn analyze_reports_are_byte_identical() {
    let path = fixture("nine_node.graph");
    let a = netctrl(&["analyze", path.to_str().unwrap()]);
    let b = netctrl(&["analyze", path.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn partition_lists_expected_cells() {
    let out = netctrl(&["partition", fixture("six_node.graph").to_str().unwrap()]);
    let v = json_stdout(&out);
    assert_eq!(
        v["cells"],
        serde_json::json!([[1], [2], [3, 4], [5, 6]])
    );
    assert_eq!(v["controllable"], true);
}

#[test]
fn select_targets_enumerates_admissible_sets() {
    let out = netctrl(&[
        "select-targets",
        fixture("seven_node.graph").to_str().unwrap(),
        "--count",
        "3",
    ]);
    let v = json_stdout(&out);
    assert_eq!(
        v["sets"],
        serde_json::json!([[1, 2, 6], [1, 2, 7], [1, 3, 6], [1, 3, 7]])
    );
    assert_eq!(v["kappa"], 3);

    let capped = netctrl(&[
        "select-targets",
        fixture("seven_node.graph").to_str().unwrap(),
        "--count",
        "3",
        "--cap",
        "1",
    ]);
    let v = json_stdout(&capped);
    assert_eq!(v["sets"], serde_json::json!([[1, 2, 6]]));
    assert_eq!(v["truncated"], true);

    let too_many = netctrl(&[
        "select-targets",
        fixture("seven_node.graph").to_str().unwrap(),
        "--count",
        "4",
    ]);
    let v = json_stdout(&too_many);
    assert_eq!(v["sets"], serde_json::json!([]));
}

#[test]
fn simulate_emits_csv_with_footer() {
    let out = netctrl(&[
        "simulate",
        fixture("seven_node.graph").to_str().unwrap(),
        "--yf",
        "0.5,-0.5",
        "--steps",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x1,x2,x3,x4,x5,x6,x7,u1,y1,y2");
    assert_eq!(lines.len(), 2003);
    assert!(lines[2001].starts_with("# gramian_condition "));
    let footer = lines.last().unwrap();
    assert!(footer.starts_with("# terminal_error "));
    let err: f64 = footer.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(err <= 1e-6, "terminal error {err}");
}

#[test]
fn simulate_refuses_unsteerable_outputs_with_exit_three() {
    let out = netctrl(&[
        "simulate",
        fixture("four_node_fan.graph").to_str().unwrap(),
        "--yf",
        "1,-1",
        "--steps",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Gramian"), "{err}");
}

#[test]
fn simulate_second_order_meets_tolerance() {
    let out = netctrl(&[
        "simulate",
        fixture("seven_node.graph").to_str().unwrap(),
        "--yf",
        "1,2",
        "--order",
        "2",
        "--steps",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let footer = text.lines().last().unwrap();
    let err: f64 = footer.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(err <= 1e-6, "terminal error {err}");
}

#[test]
fn partition_output_matches_library_results() {
    // On a generated fixture the command must agree with the library
    // call field for field, and repeat runs byte for byte.
    use rand::SeedableRng;
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let g = netctrl::gen::random_graph(&mut rng, 7);
    let dir = std::env::temp_dir().join("netctrl-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("random.graph");
    std::fs::write(&path, g.to_canonical_string()).unwrap();

    let a = netctrl(&["partition", path.to_str().unwrap()]);
    let b = netctrl(&["partition", path.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);

    let v = json_stdout(&a);
    let (partition, verdict) = netctrl::partition::partition_check(&g).unwrap();
    let cells: Vec<Vec<usize>> = partition
        .cells()
        .iter()
        .map(|c| c.iter().map(|x| x + 1).collect())
        .collect();
    assert_eq!(v["cells"], serde_json::json!(cells));
    assert_eq!(v["applicable"], verdict.applicable);
    assert_eq!(
        v["rank_cross_check"].as_u64().unwrap() as usize,
        verdict.rank_cross_check
    );
}

#[test]
fn decompose_reports_basis_and_selection() {
    let out = netctrl(&["decompose", fixture("seven_node.graph").to_str().unwrap()]);
    let v = json_stdout(&out);
    assert_eq!(v["kappa"], 3);
    assert_eq!(v["p1"][0], serde_json::json!(["1", "0", "0"]));
    assert_eq!(v["p1"][1], serde_json::json!(["0", "1", "-3"]));
    assert_eq!(v["selection_admissible"], true);
}

#[test]
fn gen_random_respects_seed_env() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_netctrl"))
            .args(["gen-random", "--nodes", "6"])
            .env("NETCTRL_SEED", seed)
            .output()
            .expect("spawn netctrl")
    };
    let a = run("42");
    let b = run("42");
    let c = run("43");
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    // Output parses back as a graph.
    let text = String::from_utf8(a.stdout).unwrap();
    netctrl::graph::Graph::parse(&text).unwrap();
}

#[test]
fn lift_and_scc_commands_report_fixture_facts() {
    let out = netctrl(&["lift", fixture("seven_node.graph").to_str().unwrap(), "--order", "3"]);
    let v = json_stdout(&out);
    assert_eq!(v["equal"], true);

    let out = netctrl(&["scc", fixture("ten_node_ltf.graph").to_str().unwrap()]);
    let v = json_stdout(&out);
    assert_eq!(v["target_only_independent"], serde_json::json!([[4, 8, 9]]));
    assert_eq!(v["ltf_connected"], true);
}

#[test]
fn analyze_with_general_linear_sidecar() {
    let dir = std::env::temp_dir().join("netctrl-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let sidecar = dir.join("double_integrator.json");
    std::fs::write(
        &sidecar,
        r#"{"sigma":2,"A":[[0,1],[0,0]],"M":[[0],[1]],"N":[[0],[1]],"K":[[1,0]]}"#,
    )
    .unwrap();
    let out = netctrl(&[
        "analyze",
        fixture("seven_node.graph").to_str().unwrap(),
        "--general-linear",
        sidecar.to_str().unwrap(),
        "--order",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["general_linear"]["sigma"], 2);
    assert_eq!(v["general_linear"]["state_dim"], 14);
    assert_eq!(v["lift"]["equal"], true);
}
