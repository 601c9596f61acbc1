use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hodgecheck"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&o.stdout)
        )
    })
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/schema/report.schema.json"),
    )
    .unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&v).expect("schema compiles")
}

fn assert_schema_valid(v: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(v) {
        Ok(()) => return,
        Err(errors) => errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect(),
    };
    panic!("report violates the schema: {msgs:?}");
}

fn check(name: &str, file: &str, extra: &[&str]) -> Output {
    let f = fixture(file);
    let mut args = vec!["check", name, f.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn validate_exterior_passes() {
    let o = run(&[
        "validate",
        fixture("exterior3.json").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json_of(&o);
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["report"]["betti"], serde_json::json!([1, 3, 3, 1]));
    assert_schema_valid(&v);
}

#[test]
fn validate_broken_duality_reports_failure_with_exit_zero() {
    let o = run(&[
        "validate",
        fixture("broken_duality.json").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json_of(&o);
    assert_eq!(v["verdict"], "FAIL");
    assert!(v["summary"].as_str().unwrap().contains("perfect_pairing"));
    assert_schema_valid(&v);
}

#[test]
fn validate_missing_file_exits_two() {
    let o = run(&["validate", fixture("no_such_file.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no_such_file.json"));
}

#[test]
fn malformed_spec_points_at_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(
        &p,
        "{\n  \"kind\": \"exterior\",\n  \"generators\": 3,\n  \"colour\": 1\n}\n",
    )
    .unwrap();
    let o = run(&["validate", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn even_rank_fixture_with_expect() {
    let o = check(
        "even-rank",
        "torus_rank11.json",
        &["--expect", "obstructed", "--json"],
    );
    assert_eq!(code(&o), 0);
    let v = json_of(&o);
    assert_eq!(v["report"]["certificate"]["rank"], 11);
    assert_schema_valid(&v);
    let o = check("even-rank", "torus_rank11.json", &["--expect", "clear"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn lefschetz_on_the_symplectic_torus() {
    let o = check(
        "lefschetz",
        "torus_symplectic.json",
        &["--expect", "pass", "--json"],
    );
    assert_eq!(code(&o), 0);
    assert_schema_valid(&json_of(&o));
}

#[test]
fn hr_check_on_the_square_torus() {
    let o = check("hr-check", "square_torus_hr.json", &["--json"]);
    assert_eq!(code(&o), 0);
    let v = json_of(&o);
    assert_eq!(v["verdict"], "POLARIZED");
    assert!(v["report"]["blocks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|b| b["ok"] == true));
    assert_schema_valid(&v);
}

#[test]
fn remaining_checks_run() {
    for (name, file, verdict) in [
        ("signature", "p2_signature.json", "PASS"),
        ("tensor-split", "p2_elliptic.json", "CLEAR"),
        ("projbundle-transfer", "bundle_rank2.json", "CLEAR"),
        ("component", "component_line.json", "COMPONENT"),
        ("half-subspace", "mu_symplectic.json", "CLEAR"),
    ] {
        let o = check(name, file, &["--json", "--trials", "5"]);
        assert_eq!(
            code(&o),
            0,
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let v = json_of(&o);
        assert_eq!(v["verdict"], verdict, "{name}");
        assert_schema_valid(&v);
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&check("no-such-check", "exterior3.json", &[])), 2);
    assert_eq!(code(&run(&["gallery", "no-such-case"])), 2);
    assert_eq!(
        code(&run(&["gallery", "torus-rank11", "--params", "bogus=1"])),
        2
    );
    // lefschetz needs ω
    assert_eq!(code(&check("lefschetz", "exterior3.json", &[])), 2);
    // a cap on a kind without one
    assert_eq!(
        code(&check("signature", "p2_signature.json", &["--cap", "2"])),
        2
    );
}

#[test]
fn dump_spec_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for file in [
        "exterior3.json",
        "broken_duality.json",
        "bundle_rank2.json",
        "p2_signature.json",
    ] {
        let first = run(&["validate", fixture(file).to_str().unwrap(), "--dump-spec"]);
        assert_eq!(code(&first), 0, "{file}");
        let p = dir.path().join(file);
        std::fs::write(&p, &first.stdout).unwrap();
        let second = run(&["validate", p.to_str().unwrap(), "--dump-spec"]);
        assert_eq!(first.stdout, second.stdout, "{file}");
        let a = json_of(&run(&[
            "validate",
            fixture(file).to_str().unwrap(),
            "--json",
        ]));
        let b = json_of(&run(&["validate", p.to_str().unwrap(), "--json"]));
        assert_eq!(a["report"]["betti"], b["report"]["betti"], "{file}");
        assert_eq!(a["verdict"], b["verdict"], "{file}");
    }
}

#[test]
fn gallery_lists_cases() {
    let o = run(&["gallery"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for name in [
        "torus-rank11",
        "blowup-rangpair",
        "k3-signature",
        "fibered-projector",
        "tensor-split",
        "generic-mu",
    ] {
        assert!(text.contains(name));
    }
}

#[test]
fn gallery_torus_rank11() {
    let o = run(&[
        "gallery",
        "torus-rank11",
        "--json",
        "--expect",
        "obstructed",
    ]);
    assert_eq!(code(&o), 0);
    let v = json_of(&o);
    assert_eq!(v["report"]["certificate"]["rank"], 11);
    assert_eq!(v["report"]["certificate"]["kernel_dim"], 1);
}

#[test]
fn gallery_k3_difference() {
    let v = json_of(&run(&["gallery", "k3-signature", "--json"]));
    assert_eq!(v["report"]["certificate"]["tau_difference"], -4);
}

#[test]
fn gallery_skip_heavy_marks_skipped() {
    let o = run(&[
        "gallery",
        "fibered-projector",
        "--skip-heavy",
        "--json",
        "--expect",
        "clear",
    ]);
    assert_eq!(code(&o), 0);
    let v = json_of(&o);
    let c = &v["report"]["certificate"];
    assert_eq!(c["heavy"]["status"], "SKIPPED");
    assert_eq!(c["checks"]["p_wedge_p_nonzero"], "SKIPPED");
    assert_eq!(c["checks"]["fibered_relation"], "PASS");
    assert_schema_valid(&v);
}

#[test]
fn gallery_params_flow_into_the_report() {
    let o = run(&[
        "gallery",
        "blowup-rangpair",
        "--params",
        "N=4,epsilon=2",
        "--json",
        "--expect",
        "obstructed",
    ]);
    assert_eq!(code(&o), 0);
    let v = json_of(&o);
    assert_eq!(v["parameters"]["N"], 4);
    assert_eq!(v["parameters"]["epsilon"], "2");
}

#[test]
fn gallery_reports_match_golden_files() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for case in [
        "torus-rank11",
        "blowup-rangpair",
        "k3-signature",
        "fibered-projector",
        "tensor-split",
        "generic-mu",
    ] {
        let o = run(&["gallery", case, "--json"]);
        assert_eq!(code(&o), 0, "{case}");
        let expected = std::fs::read(golden.join(format!("{case}.json"))).unwrap();
        assert!(o.stdout == expected, "{case} differs from its golden file");
        assert_schema_valid(&json_of(&o));
    }
}
