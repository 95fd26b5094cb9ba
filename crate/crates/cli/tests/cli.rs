//! End-to-end tests of the binary: golden JSON reports, exit codes, and
//! output-file semantics.
//!
//! Golden files live in `tests/goldens/expected/`. To regenerate them after
//! an intentional change, run the suite once with `QCANCEL_BLESS=1`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qcancel"))
}

fn goldens_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/goldens")
}

fn spec(name: &str) -> PathBuf {
    goldens_dir().join(name)
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

/// Compare a JSON report against its golden, or rewrite the golden when
/// blessing is requested.
fn check_golden(golden_name: &str, args: &[&str]) {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        stderr_of(&out)
    );
    let got = stdout_of(&out);
    let path = goldens_dir().join("expected").join(golden_name);
    if std::env::var_os("QCANCEL_BLESS").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &got).unwrap();
        return;
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|_| {
        panic!("missing golden {path:?}; run with QCANCEL_BLESS=1 to create it")
    });
    assert_eq!(got, want, "golden mismatch for {golden_name}; if the change is intentional rerun with QCANCEL_BLESS=1");
}

#[test]
fn golden_reports() {
    let plane = spec("minus_one_plane.json");
    let plane = plane.to_str().unwrap();
    let three = spec("uniform_three_m2.json");
    let three = three.to_str().unwrap();
    let weyl = spec("weyl_minus_one.json");
    let weyl = weyl.to_str().unwrap();
    let generic = spec("generic_plane.json");
    let generic = generic.to_str().unwrap();
    let tensor = spec("tensor_two_planes.json");
    let tensor = tensor.to_str().unwrap();

    check_golden("center_minus_one_plane.json", &["center", "--format", "json", plane]);
    check_golden("discriminant_minus_one_plane.json", &["discriminant", "--format", "json", plane]);
    check_golden("verdict_minus_one_plane.json", &["verdict", "--format", "json", plane]);
    check_golden("tsets_uniform_three_m2.json", &["tsets", "--format", "json", three]);
    check_golden("ml_uniform_three_m2.json", &["ml", "--format", "json", three]);
    check_golden("verdict_uniform_three_m2.json", &["verdict", "--format", "json", three]);
    check_golden(
        "witness_x2_uniform_three_m2.json",
        &["witness", "--generator", "x2", "--format", "json", three],
    );
    check_golden("verdict_weyl_minus_one.json", &["verdict", "--format", "json", weyl]);
    check_golden("effectiveness_weyl_minus_one.json", &["effectiveness", "--format", "json", weyl]);
    check_golden("ml_weyl_minus_one.json", &["ml", "--format", "json", weyl]);
    check_golden("center_generic_plane.json", &["center", "--format", "json", generic]);
    check_golden("verdict_generic_plane.json", &["verdict", "--format", "json", generic]);
    check_golden("discriminant_tensor_two_planes.json", &["discriminant", "--format", "json", tensor]);
}

#[test]
fn reruns_are_byte_identical() {
    let three = spec("uniform_three_m2.json");
    let args = ["verdict", "--format", "json", three.to_str().unwrap()];
    let first = stdout_of(&run(&args));
    let second = stdout_of(&run(&args));
    assert_eq!(first, second);
    assert!(!first.contains("time"), "reports carry no timestamps");
}

#[test]
fn out_file_semantics() {
    let dir = std::env::temp_dir().join(format!("qcancel-out-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let target = dir.join("report.json");
    let _ = fs::remove_file(&target);
    let plane = spec("minus_one_plane.json");
    let base = [
        "center",
        "--format",
        "json",
        plane.to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ];

    let first = run(&base);
    assert!(first.status.success());
    let written = fs::read_to_string(&target).unwrap();
    assert!(written.contains("\"command\": \"center\""));

    // A second run must refuse to clobber the file and exit with the
    // input-error code.
    let refused = run(&base);
    assert_eq!(refused.status.code(), Some(2));
    assert!(stderr_of(&refused).contains("--bless"));
    assert_eq!(fs::read_to_string(&target).unwrap(), written);

    // Blessing replaces it.
    let mut blessed_args = base.to_vec();
    blessed_args.push("--bless");
    let blessed = run(&blessed_args);
    assert!(blessed.status.success());
    assert_eq!(fs::read_to_string(&target).unwrap(), written);

    let _ = fs::remove_file(&target);
    let _ = fs::remove_dir(&dir);
}

#[test]
fn exit_codes_separate_input_from_computation() {
    // Missing file: input error.
    let out = run(&["center", "/no/such/file.json"]);
    assert_eq!(out.status.code(), Some(2));

    // Malformed document: input error, and the JSON error body says so.
    let dir = std::env::temp_dir().join(format!("qcancel-bad-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    fs::write(&bad, "{ \"spec_version\": 1 }").unwrap();
    let out = run(&["center", "--format", "json", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_str(&stderr_of(&out)).unwrap();
    assert_eq!(err["error"]["class"], "input");
    let _ = fs::remove_file(&bad);
    let _ = fs::remove_dir(&dir);

    // Unknown generator: input error.
    let three = spec("uniform_three_m2.json");
    let out = run(&[
        "witness",
        "--generator",
        "zz",
        three.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Analysis that fails honestly: computation error.
    let generic = spec("generic_plane.json");
    let out = run(&["discriminant", generic.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("roots of unity"));

    // Verifying a witness that cannot exist: computation error.
    let plane = spec("minus_one_plane.json");
    let out = run(&[
        "verify-witness",
        "--generator",
        "x1",
        plane.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn text_format_is_readable() {
    let plane = spec("minus_one_plane.json");
    let out = run(&["verdict", plane.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("strongly-cancellative"));
    assert!(text.contains("t-set-rigidity"));

    let three = spec("uniform_three_m2.json");
    let out = run(&[
        "verify-witness",
        "--generator",
        "x1",
        "--degree-bound",
        "3",
        "--index-bound",
        "6",
        three.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("overall: PASS"));
    assert!(text.contains("relation-preservation"));
}

#[test]
fn bound_flags_respect_environment() {
    let three = spec("uniform_three_m2.json");
    let out = binary()
        .args([
            "verify-witness",
            "--generator",
            "x1",
            "--format",
            "json",
            three.to_str().unwrap(),
        ])
        .env("QCANCEL_DEGREE_BOUND", "2")
        .env("QCANCEL_INDEX_BOUND", "5")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["result"]["degree_bound"], 2);
    assert_eq!(doc["result"]["index_bound"], 5);
}
