use std::process::{Command, Output};

use cesaro_core::finitesum::mmstar_entry_closed;
use cesaro_core::Order;
use cesaro_verify::dto::{Document, Payload};

fn cesaro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cesaro"))
        .args(args)
        .env_remove("CESARO_OUT_DIR")
        .env_remove("CESARO_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn entry_examples() {
    for (args, expected) in [
        (["--order", "3", "--i", "2", "--j", "1"], "3/10"),
        (["--order", "5", "--i", "0", "--j", "0"], "1"),
        (["--order", "3", "--i", "1", "--j", "3"], "0"),
    ] {
        let mut full = vec!["entry"];
        full.extend(args);
        let o = cesaro(&full);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), expected);
    }
}

#[test]
fn exit_code_contract() {
    assert_eq!(cesaro(&["verify", "--order", "3", "--symbolic"]).status.code(), Some(0));
    assert_eq!(cesaro(&["conjecture", "--from", "4", "--to", "5"]).status.code(), Some(2));
    assert_eq!(cesaro(&["entry", "--order", "0", "--i", "0", "--j", "0"]).status.code(), Some(2));
    assert_eq!(cesaro(&["entry", "--order", "3", "--i", "x", "--j", "0"]).status.code(), Some(2));
    assert_eq!(cesaro(&["bogus"]).status.code(), Some(2));
    assert_eq!(cesaro(&["certify", "--order", "3", "--vector", "0:1", "--cap", "1"]).status.code(), Some(4));
    assert_eq!(cesaro(&["certify", "--order", "3", "--vector", "0:z"]).status.code(), Some(2));
    assert_eq!(cesaro(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_reports_round_trip() {
    let o = cesaro(&["verify", "--order", "3", "--symbolic", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let doc: Document = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.schema, "1");
    assert_eq!(serde_json::to_string_pretty(&doc).unwrap() + "\n", text);
    let Payload::Verify { reports } = &doc.payload else {
        panic!("verify payload expected")
    };
    let report = &reports[0];
    assert_eq!(report.verdict, "PASS");
    assert_eq!(report.contraction_holds, Some(true));
    let witness = report.witness.as_ref().unwrap().mpm.to_ratfun().unwrap();
    let expected = mmstar_entry_closed(Order::new(3).unwrap()).unwrap().closed;
    assert_eq!(witness, expected);
}

#[test]
fn conjecture_json_and_summary_lines() {
    let o = cesaro(&["conjecture", "--from", "5", "--to", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Document = serde_json::from_str(&stdout(&o)).unwrap();
    let Payload::Conjecture { reports } = doc.payload else {
        panic!("conjecture payload expected")
    };
    assert_eq!(reports.len(), 1);
    let o = cesaro(&["conjecture", "--from", "5", "--to", "6"]);
    let lines: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("N="))
        .map(str::to_owned)
        .collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("N=5: PASS ("), "{}", lines[0]);
    assert!(lines[1].starts_with("N=6: PASS ("), "{}", lines[1]);
}

#[test]
fn grid_csv_has_one_row_per_cell() {
    let o = cesaro(&["verify", "--order", "2", "--grid", "10", "--format", "csv", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 66);
    assert_eq!(&rows[0][1], "0");
    assert!(rows.iter().all(|r| &r[5] == "true"));
}

#[test]
fn seeded_certificates_are_reproducible() {
    let args = ["certify", "--order", "3", "--seed", "42", "--support", "10", "--count", "5", "--format", "json"];
    let a = cesaro(&args);
    let b = cesaro(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: Document = serde_json::from_str(&stdout(&a)).unwrap();
    let Payload::Certify { certificates } = doc.payload else {
        panic!("certify payload expected")
    };
    assert_eq!(certificates.len(), 5);
    assert!(certificates.iter().all(|c| c.certified && c.vector.len() <= 10));
}

#[test]
fn output_directory_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cesaro"))
        .args(["conjecture", "--from", "5", "--to", "5", "--format", "json"])
        .env("CESARO_OUT_DIR", dir.path())
        .env_remove("CESARO_CONFIG")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let written = dir.path().join("conjecture-5-5.json");
    let doc: Document = serde_json::from_str(&std::fs::read_to_string(&written).unwrap()).unwrap();
    assert!(matches!(doc.payload, Payload::Conjecture { .. }));
    assert!(stdout(&o).starts_with("N=5: PASS"));

    // file says csv, flag says json: the flag wins
    let config = dir.path().join("cesaro.toml");
    std::fs::write(&config, "format = \"csv\"\n").unwrap();
    let cfg = config.to_str().unwrap();
    let o = cesaro(&["--config", cfg, "entry", "--order", "3", "--i", "2", "--j", "1"]);
    assert!(stdout(&o).starts_with("order,i,j,value"));
    let o = cesaro(&["--config", cfg, "--format", "json", "entry", "--order", "3", "--i", "2", "--j", "1"]);
    assert!(stdout(&o).contains("\"value\": \"3/10\""));

    std::fs::write(&config, "colour = \"red\"\n").unwrap();
    assert_eq!(cesaro(&["--config", cfg, "faulhaber", "--order", "2"]).status.code(), Some(2));
}

#[test]
fn telescope_and_faulhaber_print_coefficients() {
    let o = cesaro(&["telescope", "--order", "3"]);
    let text = stdout(&o);
    assert!(text.contains("c_4 = 1"));
    assert!(text.contains("c_3 = 8 - i + 3*j"), "{text}");
    let o = cesaro(&["telescope", "--order", "3", "--i", "1", "--j", "2", "--format", "json"]);
    let doc: Document = serde_json::from_str(&stdout(&o)).unwrap();
    let Payload::Telescope(t) = doc.payload else { panic!() };
    let e = t.enclosure.unwrap();
    assert!(e.lower_decimal <= 0.525 && 0.525 <= e.upper_decimal);
    let o = cesaro(&["faulhaber", "--order", "3"]);
    assert!(stdout(&o).contains("d_3 = 6 + 2*i + 2*j"));
}
