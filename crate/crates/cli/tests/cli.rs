use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charcore")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn chi_empty_sum_is_zero() {
    assert_eq!(stdout(&["chi", "--lambda", "[2,2]", "--mu", "[4]"]), "0\n");
    assert_eq!(stdout(&["chi", "--lambda", "[3,1]", "--mu", "[1,1,1,1]"]), "3\n");
}

#[test]
fn reduce_carries() {
    assert_eq!(stdout(&["reduce", "--mu", "[1,1,1,1,1,1,1,1]", "--p", "2", "--r", "2"]), "[4,4]\n");
    let json = stdout(&["--format", "json", "reduce", "--mu", "[1,1,1,1,1,1,1,1]", "--p", "2", "--r", "2"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["output"], "[4,4]");
    assert_eq!(v["steps"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_reports_json() {
    let out = run(&["--format", "json", "verify", "theorem3", "--n", "12", "--p", "2", "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violated"], 0);
    assert!(v["checked"].as_u64().unwrap() > 0);
    assert!(!String::from_utf8(out.stdout).unwrap().trim_end_matches('\n').ends_with(char::is_whitespace));
}

#[test]
fn usage_errors_exit_two_with_one_line() {
    for args in [
        &["reduce", "--mu", "[1,1]", "--p", "4", "--r", "1"][..],
        &["chi", "--lambda", "[2,2]", "--nope", "1"][..],
        &["table", "--n", "40"][..],
        &["chi", "--lambda", "[1,2]", "--mu", "[3]"][..],
        &["sample", "--n", "10"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn csv_and_json_tables_agree() {
    let csv_text = stdout(&["--format", "csv", "table", "--n", "6"]);
    let json_text = stdout(&["--format", "json", "table", "--n", "6"]);
    let v: serde_json::Value = serde_json::from_str(&json_text).unwrap();
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    let classes: Vec<String> = v["classes"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect();
    assert_eq!(header[1..], classes[..]);
    for (record, row) in reader.records().zip(v["rows"].as_array().unwrap()) {
        let record = record.unwrap();
        assert_eq!(&record[0], row["lambda"].as_str().unwrap());
        let values: Vec<String> = row["values"].as_array().unwrap().iter().map(|x| x.to_string()).collect();
        let fields: Vec<String> = record.iter().skip(1).map(String::from).collect();
        assert_eq!(fields, values);
    }
}

#[test]
fn wide_values_are_strings_in_json() {
    // The degree of the staircase of size 91 overflows 64 bits.
    let json = stdout(&["--format", "json", "chi", "--lambda", "[13,12,11,10,9,8,7,6,5,4,3,2,1]", "--mu", &ones(91)]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["value"].is_string());
}

fn ones(n: usize) -> String {
    format!("[{}]", vec!["1"; n].join(","))
}

#[test]
fn density_formats_agree() {
    let text = stdout(&["stats", "density", "--n", "3", "--mod", "2"]);
    assert!(text.contains("divisible=2\n"));
    let csv_text = stdout(&["--format", "csv", "stats", "density", "--n", "3", "--mod", "2"]);
    assert!(csv_text.starts_with("n,modulus,total,divisible,zero,positive,negative"));
    assert!(csv_text.lines().nth(1).unwrap().starts_with("3,2,9,2,1,6,2,"));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("charcore-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.csv");
    let out = run(&["--format", "csv", "--out", path.to_str().unwrap(), "table", "--n", "4"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 6);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn samples_repeat_under_a_seed() {
    let a = stdout(&["sample", "--n", "30", "--seed", "5", "--count", "20"]);
    let b = stdout(&["sample", "--n", "30", "--seed", "5", "--count", "20"]);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 20);
    let c = stdout(&["sample", "--n", "30", "--seed", "6", "--count", "20"]);
    assert_ne!(a, c);
}

#[test]
fn core_and_divides() {
    let json = stdout(&["--format", "json", "core", "--lambda", "[6,5,3,1,1,1]", "--m", "5"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["core"], "[6,2,1,1,1,1]");
    assert_eq!(v["weight"], 1);
    let json = stdout(&["--format", "json", "divides", "--lambda", "[2,2]", "--mu", "[4]", "--p", "2", "--r", "1"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["divides"], true);
    assert_eq!(v["certified"], true);
}

#[test]
fn verification_failure_exit_code_is_distinct() {
    // A skew size that is not a prime power is a usage error, not a failed check.
    let out = run(&["verify", "lemma81", "--size", "6", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
