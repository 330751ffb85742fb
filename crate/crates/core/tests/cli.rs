//! End-to-end checks of the batch interface: exit codes, determinism and
//! the wire formats.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lgcone"))
}

#[test]
fn model_report_and_exit_codes() {
    let out = bin()
        .args(["model", "--weights", "1", "--degree", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["narrow"], serde_json::json!([0, 1]));
    assert_eq!(doc["charges"], serde_json::json!(["1/3"]));
    assert_eq!(doc["chamber_walls"][1], "1/2");

    // gcd violation: model invariant error, exit code 2
    let out = bin()
        .args(["model", "--weights", "2,2", "--degree", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // usage error: exit code 1
    let out = bin().args(["model"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .args([
            "invariants",
            "--weights",
            "1",
            "--degree",
            "3",
            "--format",
            "dump",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ifunction_dump_golden_lines() {
    let out = bin()
        .args([
            "ifunction",
            "--weights",
            "1,1,1,1,1",
            "--degree",
            "5",
            "--small",
            "--order",
            "6",
            "--zneg",
            "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("z^1 u^(0,5,0,0,0) phi_0 : 1/375000"));
    assert!(text.contains("z^0 u^(0,6,0,0,0) phi_1 : 2/140625"));

    // order 0 keeps only the leading term
    let out = bin()
        .args([
            "ifunction", "--weights", "1", "--degree", "3", "--order", "0", "--zneg", "0",
        ])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "z^1 phi_0 : 1\n");

    // cap-1 chamber sum for any eps above 1
    let out = bin()
        .args([
            "ifunction", "--weights", "1", "--degree", "3", "--eps", "2", "--order", "2",
            "--zneg", "1",
        ])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "z^0 u^(0,1,0) phi_1 : 1\nz^0 u^(1,0,0) phi_0 : 1\nz^1 phi_0 : 1\n"
    );
}

#[test]
fn determinism_byte_identical() {
    let run = || {
        bin()
            .args([
                "invariants",
                "--weights",
                "1",
                "--degree",
                "3",
                "--eps",
                "1/2",
                "--order",
                "4",
                "--t-order",
                "2",
                "--zneg",
                "3",
            ])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn invariants_table_content() {
    let out = bin()
        .args([
            "invariants",
            "--weights",
            "1",
            "--degree",
            "3",
            "--eps",
            "infinity",
            "--order",
            "5",
            "--t-order",
            "3",
            "--zneg",
            "3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = doc["entries"].as_array().unwrap();
    let three_point = entries.iter().find(|e| {
        e["heavy"] == serde_json::json!([[0, 0], [0, 0], [1, 0]]) && e["light"].as_array().unwrap().is_empty()
    });
    assert_eq!(three_point.unwrap()["value"], "1");

    // csv carries the same columns
    let out = bin()
        .args([
            "invariants",
            "--weights",
            "1",
            "--degree",
            "3",
            "--eps",
            "infinity",
            "--order",
            "5",
            "--t-order",
            "3",
            "--zneg",
            "3",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("heavy,light,value,provenance\n"));
    assert!(text.contains("0:0|0:0|1:0,,1,big_j"));
}

#[test]
fn verify_and_config_files() {
    let dir = std::env::temp_dir().join("lgcone_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let model_path = dir.join("model.json");
    std::fs::write(&model_path, r#"{ "weights": [1], "degree": 3 }"#).unwrap();
    let out_path = dir.join("report.json");
    let config_path = dir.join("job.json");
    std::fs::write(
        &config_path,
        serde_json::json!({
            "command": "verify",
            "model": model_path,
            "check": ["regularity", "cor4", "sigma", "string", "routes"],
            "eps": ["1/2"],
            "order": 5,
            "t_order": 2,
            "zneg": 3,
            "out": out_path,
        })
        .to_string(),
    )
    .unwrap();
    let out = bin()
        .args(["--config", config_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "verify failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["all_passed"], true);
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 5);
    for c in checks {
        assert_eq!(c["status"], "pass", "check {:?}", c["check"]);
    }
    let reg = checks.iter().find(|c| c["check"] == "regularity").unwrap();
    assert_eq!(reg["details"]["fault_injection_detected"], true);
}

#[test]
fn verify_transport_and_selection() {
    let out = bin()
        .args([
            "verify", "--weights", "1", "--degree", "3", "--check", "transport", "--check",
            "selection", "--eps", "1/2", "--order", "5", "--t-order", "2", "--zneg", "3",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["all_passed"], true);
}
