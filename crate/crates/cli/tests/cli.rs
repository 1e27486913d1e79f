//! Black-box tests of the `ptorus` binary: exit codes, schema shape,
//! determinism across runs and parallelism, and config-file precedence.

use std::process::{Command, Output};

fn ptorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptorus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn count_examples_and_exit_codes() {
    let out = ptorus(&["count", "--triple", "modular", "--L", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "L,N,N_over_L2\n2.000000000,3,0.7500000000\n");

    let out = ptorus(&["count", "--triple", "modular", "--L", "1"]);
    assert_eq!(stdout(&out), "L,N,N_over_L2\n1.000000000,0,0.000000000\n");

    let out = ptorus(&["count", "--triple", "3,3,4", "--L", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("InvalidTriple"));
}

#[test]
fn spectrum_schema_and_empty_case() {
    let out = ptorus(&["spectrum", "--triple", "modular", "--L", "2"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("m,n,trace,length"));
    assert_eq!(text.lines().count(), 4); // header + 3 systoles

    // below the systole: header-only CSV
    let out = ptorus(&["spectrum", "--triple", "modular", "--L", "1"]);
    assert_eq!(stdout(&out), "m,n,trace,length\n");

    let out = ptorus(&["spectrum", "--triple", "modular", "--L", "4", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = doc.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        for key in ["m", "n", "trace", "length"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn exact_mode_requires_integer_triple() {
    let out = ptorus(&[
        "spectrum",
        "--triple",
        "3,3.5,7.118033988749895",
        "--mode",
        "exact",
        "--L",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ball_summary_shape() {
    let out = ptorus(&["ball", "--depth", "0"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("x,y"));
    assert_eq!(text.lines().count(), 9); // header + 8 vertices

    let out = ptorus(&["ball", "--depth", "3", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["depth"], 3);
    let unoriented = doc["c_unoriented"].as_f64().unwrap();
    let oriented = doc["c_oriented"].as_f64().unwrap();
    assert!((oriented - 2.0 * unoriented).abs() < 1e-15);

    // nesting: area is nondecreasing in depth
    let area = |d: &str| {
        let out = ptorus(&["ball", "--depth", d, "--format", "json"]);
        serde_json::from_str::<serde_json::Value>(&stdout(&out)).unwrap()["area"]
            .as_f64()
            .unwrap()
    };
    assert!(area("5") >= area("4"));
}

#[test]
fn verify_passes_and_fails_by_suite() {
    let out = ptorus(&[
        "verify", "--suite", "all", "--triple", "modular", "--word-bound", "4",
        "--conj-depth", "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["passed"], true);

    let out = ptorus(&["verify", "--suite", "cusp", "--triple", "3,3,6"]);
    assert!(out.status.success());

    let out = ptorus(&["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn deterministic_across_runs_and_parallelism() {
    let base = stdout(&ptorus(&["spectrum", "--triple", "3,3,6", "--L", "9"]));
    for _ in 0..2 {
        assert_eq!(stdout(&ptorus(&["spectrum", "--triple", "3,3,6", "--L", "9"])), base);
    }
    for threads in ["2", "5"] {
        let par = stdout(&ptorus(&[
            "spectrum", "--triple", "3,3,6", "--L", "9", "--parallel", threads,
        ]));
        assert_eq!(par, base, "parallel {threads} changed output");
    }
}

#[test]
fn cusp_report_schema() {
    let out = ptorus(&["cusp", "--word-bound", "3", "--conj-depth", "2"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("slope_m,slope_n,max_height,conj_depth"));
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        let h: f64 = fields[2].parse().unwrap();
        assert!(h > 0.0 && h < 0.5);
        assert_eq!(fields[3], "2");
    }
}

#[test]
fn config_file_with_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        r#"{"triple": "3,3,6", "L": [2.0], "format": "csv"}"#,
    )
    .unwrap();
    let cfg = path.to_str().unwrap();

    // config alone: (3,3,6) at L=2 has systoles (1,0), (0,1), (-1,1)
    let out = ptorus(&["spectrum", "--config", cfg]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("\n-1,1,"));

    // flags win over the file: the modular systoles include (1,1) instead
    let out = ptorus(&["spectrum", "--config", cfg, "--triple", "modular"]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("\n1,1,") && !text.contains("\n-1,1,"));

    let out = ptorus(&["spectrum", "--config", cfg, "--L", "4", "--triple", "modular"]);
    assert_eq!(stdout(&out).lines().count(), 7);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.csv");
    let out = ptorus(&[
        "spectrum", "--triple", "modular", "--L", "2", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written.lines().next(), Some("m,n,trace,length"));
}
