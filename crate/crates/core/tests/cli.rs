use std::process::{Command, Output};

use seqweak::cli::{CSV_HEADER, OUT_DIR_ENV};

fn seqweak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqweak"))
        .args(args)
        .env_remove(OUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_and_usage_errors() {
    let help = seqweak(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("paradox"));

    for bad in [
        &["nonsense"][..],
        &["abl", "--theta", "0"],
        &["abl", "--theta", "zero", "--phi", "0"],
        &["circuit", "--theta", "0", "--phi", "0", "--path", "E"],
        &["circuit", "--theta", "0", "--phi", "0", "--path", "A", "--strength", "1.5"],
        &["circuit", "--theta", "0", "--phi", "0", "--path", "A", "--strength", "1", "--g", "0.3"],
        &["sweep", "--param", "theta", "--from", "1", "--to", "0"],
        &["sweep", "--param", "g", "--from", "0", "--to", "3"],
        &["paradox", "--root", "x"],
        &["resch", "--theta", "0", "--phi", "0", "--a1", "Q", "--a2", "X"],
    ] {
        let o = seqweak(bad);
        assert_eq!(o.status.code(), Some(2), "{bad:?}");
        assert!(o.stdout.is_empty(), "{bad:?}");
        assert!(!o.stderr.is_empty(), "{bad:?}");
    }
}

#[test]
fn physics_errors_exit_one() {
    // ψ = |0⟩ and Φ = −|1⟩
    let o = seqweak(&["weakvalue", "--theta", "0", "--phi", "2.356194490192345", "--op", "B"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn every_command_starts_with_the_header() {
    let runs: [&[&str]; 6] = [
        &["paradox", "--shots", "2000"],
        &["sweep", "--param", "phi", "--from", "0", "--to", "3", "--steps", "7"],
        &["circuit", "--theta", "golden", "--phi", "golden", "--path", "MO", "--strength", "0.3", "--shots", "500"],
        &["abl", "--theta", "0.3", "--phi", "-1.2"],
        &["weakvalue", "--theta", "golden-", "--phi", "golden-", "--op", "sigmaXZ"],
        &["resch", "--theta", "0.6", "--phi", "0.2", "--a1", "Z", "--a2", "P+"],
    ];
    for args in runs {
        let o = seqweak(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert_eq!(text.lines().next(), Some(CSV_HEADER), "{args:?}");
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
        for line in text.lines().skip(1) {
            assert_eq!(line.split(',').count(), 7, "{line}");
        }
    }
}

#[test]
fn documented_examples() {
    let o = seqweak(&["weakvalue", "--theta", "golden", "--phi", "golden", "--op", "D"]);
    assert!(stdout(&o).contains(",D,weakValueRe,-1.618033989,closedForm\n"));

    let o = seqweak(&["abl", "--theta", "0", "--phi", "0", "--scheme", "sequence"]);
    let text = stdout(&o);
    for (label, p) in [("A", "1"), ("B", "0"), ("C", "0"), ("D", "0")] {
        for src in ["closedForm", "circuit"] {
            assert!(text.contains(&format!("0,0,sequence,{label},probability,{p},{src}\n")), "{label} {src}");
        }
    }

    let o = seqweak(&["paradox", "--root", "+", "--strength", "1", "--shots", "100000", "--seed", "42", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["metadata"]["seed"], 42);
    assert!(doc["metadata"]["command_line"].as_str().unwrap().starts_with("seqweak paradox"));
    let rows = doc["rows"].as_array().unwrap();
    for label in ["B", "C"] {
        for src in ["closedForm", "circuit", "sampled"] {
            let row = rows
                .iter()
                .find(|r| r["label"] == label && r["quantity"] == "probability" && r["source"] == src)
                .unwrap();
            assert_eq!(row["value"].as_f64(), Some(1.0), "{label} {src}");
        }
    }
    assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn output_is_byte_identical() {
    for args in [
        &["paradox", "--root", "-", "--shots", "30000", "--seed", "9", "--format", "json"][..],
        &["sweep", "--param", "shots", "--from", "100", "--to", "5000", "--steps", "5", "--scheme", "modular", "--seed", "4"],
        &["circuit", "--theta", "0.4", "--phi", "1.4", "--path", "C", "--g", "0.2", "--shots", "40000", "--seed", "1"],
    ] {
        let first = seqweak(args);
        let second = seqweak(args);
        assert_eq!(first.status.code(), Some(0));
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn out_files_and_directory_variable() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["abl", "--theta", "0.5", "--phi", "0.9", "--out", "nested/abl.csv"];

    let o = Command::new(env!("CARGO_BIN_EXE_seqweak"))
        .args(args)
        .env(OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read(dir.path().join("nested/abl.csv")).unwrap();

    let to_stdout = seqweak(&args[..5]);
    assert_eq!(written, to_stdout.stdout);

    let absolute = dir.path().join("abs.json");
    let o = Command::new(env!("CARGO_BIN_EXE_seqweak"))
        .args(["weakvalue", "--theta", "1", "--phi", "1", "--op", "ME", "--format", "json", "--out"])
        .arg(&absolute)
        .env(OUT_DIR_ENV, "/nonexistent-dir-ignored")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(absolute).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
}
