use std::io::Write;
use std::process::{Command, Output, Stdio};

fn toyfield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toyfield")).args(args).output().expect("binary runs")
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_toyfield"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).expect("json output")
}

#[test]
fn pi_phase_json() {
    let o = toyfield(&["run", "mzi_phase", "--phase", "pi", "--engine", "toy", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o), serde_json::json!({"detector_R": "1"}));
}

#[test]
fn quantum_engine_matches_toy_on_json() {
    for scenario in [["bomb_tester", "--functional"], ["quantum_eraser", "--ancilla-after-ports"]] {
        let mut toy = vec!["run", scenario[0], scenario[1], "--format", "json"];
        let t = json(&toyfield(&toy));
        toy.extend(["--engine", "quantum"]);
        assert_eq!(json(&toyfield(&toy)), t);
    }
    let o = toyfield(&["run", "bomb_tester", "--functional", "--format", "json"]);
    assert_eq!(json(&o)["exploded"], "1/2");
}

#[test]
fn bomb_montecarlo_frequencies() {
    let o = toyfield(&["run", "bomb_tester", "--functional", "--engine", "montecarlo", "--shots", "100000", "--seed", "7", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["shots"], 100000);
    let f = |label: &str| v["counts"][label].as_f64().unwrap() / 100000.0;
    for (label, p) in [("exploded", 0.5), ("safe & detector_L", 0.25), ("safe & detector_R", 0.25)] {
        let z = (f(label) - p) / (p * (1.0 - p) / 100000.0f64).sqrt();
        assert!(z.abs() <= 3.0, "{label}: z = {z}");
    }
    assert_eq!(v["exact"]["exploded"], "1/2");
}

#[test]
fn automaton_engine_runs_the_interferometer() {
    let o = toyfield(&["run", "mzi_phase", "--engine", "ca", "--shots", "300", "--seed", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["counts"], serde_json::json!({"detector_L": 300}));
}

#[test]
fn program_files_and_stdin() {
    let dir = std::env::temp_dir().join(format!("toyfield-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pi.mzi");
    std::fs::write(&path, "mode L R;\nsource L;\nbs L R;\nphase R pi;\nbs L R;\ndetect L as detector_L;\ndetect R as detector_R;\n").unwrap();
    let o = toyfield(&["run", path.to_str().unwrap(), "--engine", "quantum", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o), serde_json::json!({"detector_R": "1"}));
    let text = std::fs::read_to_string(&path).unwrap();
    let o = with_stdin(&["run", "-", "--format", "json"], &text);
    assert_eq!(json(&o), serde_json::json!({"detector_R": "1"}));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    // usage errors
    assert_eq!(toyfield(&["run", "mzi_phase", "--engine", "ca"]).status.code(), Some(2));
    assert_eq!(toyfield(&["run", "mzi_phase", "--shots", "5", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(toyfield(&["run", "no_such_scenario"]).status.code(), Some(2));
    assert_eq!(toyfield(&["run", "mzi_phase", "--phase", "pi/2"]).status.code(), Some(2));
    assert_eq!(toyfield(&["frobnicate"]).status.code(), Some(2));
    // parse and compile errors
    let o = with_stdin(&["run", "-"], "mode L R;\nsource L\nbs L R;\n");
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3, column 1"));
    let o = toyfield(&["run", "quantum_eraser", "--engine", "ca", "--shots", "5", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn checks_pass() {
    for suite in ["equivalence", "coarse-grain", "destructive", "locality"] {
        let o = toyfield(&["check", suite]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("PASS"));
    }
}

#[test]
fn grids_follow_the_documented_axes() {
    let o = toyfield(&["grid", "mzi_phase", "--step", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("rows: (N_L,Φ_L)  columns: (N_R,Φ_R)  order 00 01 10 11"));
    // After the first beamsplitter: N_L = ΔΦ, Φ_L = 1 ⊕ Φ_R, N_R = 1 ⊕ ΔΦ.
    let rows: Vec<&str> = out.lines().filter(|l| l.starts_with("  L ")).collect();
    assert_eq!(rows, ["  L 00   ·  ·  ·  ■ ", "  L 01   ·  ·  ■  · ", "  L 10   ·  ■  ·  · ", "  L 11   ■  ·  ·  · "]);

    let o = toyfield(&["grid", "mzi_whichway"]);
    let out = stdout(&o);
    // Prepared state: L occupied, R empty, both phases unknown.
    let prepared: Vec<&str> = out.split("step 1").next().unwrap().lines().filter(|l| l.starts_with("  L ")).collect();
    assert_eq!(prepared, ["  L 00   ·  ·  ·  · ", "  L 01   ·  ·  ·  · ", "  L 10   ■  ■  ·  · ", "  L 11   ■  ■  ·  · "]);
    // Outcome 0 of the arm detector returns to the prepared pattern.
    let step2 = out.split("step 2").nth(1).unwrap().split("step 3").next().unwrap();
    let silent = step2.split("record silent").nth(1).unwrap();
    let rows: Vec<&str> = silent.lines().filter(|l| l.starts_with("  L ")).take(4).collect();
    assert_eq!(rows, prepared);

    let o = toyfield(&["run", "mzi_phase", "--format", "grids"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("step 5"));
}
