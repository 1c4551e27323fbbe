use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graded-posets")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn count_strong_matches_known_values() {
    let o = run(&["count", "strong", "--max-n", "6"]);
    assert!(o.status.success());
    let counts: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split_whitespace().nth(1).unwrap().to_string()).collect();
    assert_eq!(counts, ["1", "1", "3", "13", "111", "1381", "22383"]);
}

#[test]
fn count_json_uses_decimal_strings() {
    let o = run(&["--format", "json", "count", "weak", "--max-n", "16"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kind"], "weak");
    assert_eq!(v["counts"][6]["count"], "41343");
    assert!(v["counts"][16]["count"].as_str().unwrap().len() > 19);
}

#[test]
fn count_by_height_csv() {
    let o = run(&["--format", "csv", "count", "strong", "--by-height", "--max-n", "6"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("n,k,count\n"));
    assert!(text.contains("\n6,3,7380\n"));
    assert!(text.contains("\n4,2,50\n"));
}

#[test]
fn verify_exits_zero() {
    let o = run(&["verify", "--max-n", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("0 mismatches"));
}

#[test]
fn quarks_agree() {
    let o = run(&["quarks", "--max-m", "3", "--max-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("0 mismatches\n"));
}

#[test]
fn classify_three_plus_one() {
    let o = run(&["classify", &data("three_plus_one.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("weakly graded; contains 3+1\n"));
    let o = run(&["classify", &data("n_shape.json"), "--dot"]);
    let text = stdout(&o);
    assert!(text.starts_with("strongly graded; avoids 3+1\n"));
    assert!(text.contains("digraph poset"));
    assert!(text.contains("2 -> 4;"));
}

#[test]
fn classify_json() {
    let o = run(&["--format", "json", "classify", &data("three_plus_one.json")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["contains_3plus1"], true);
    assert_eq!(v["witness"], serde_json::json!([1, 2, 3, 4]));
}

#[test]
fn malformed_input_exits_two() {
    let dir = std::env::temp_dir().join(format!("graded-posets-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"n": 2, "relations": [[1, 2], [2, 1]]}"#).unwrap();
    assert_eq!(run(&["classify", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(run(&["classify", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["classify", dir.join("missing.json").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--max-n", "8"]).status.code(), Some(2));
    assert_eq!(run(&["quarks", "--max-m", "5", "--max-n", "5"]).status.code(), Some(2));
    assert_eq!(run(&["count", "semiorder", "--by-height"]).status.code(), Some(2));
    assert_eq!(run(&["count", "nonsense"]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn series_and_asymptotics_outputs() {
    let o = run(&["--format", "csv", "series", "psi", "--order", "2"]);
    assert_eq!(stdout(&o), "i,j,k,numerator,denominator\n0,0,0,1,1\n1,0,0,2,1\n2,0,0,3,1\n");
    let o = run(&["--format", "csv", "asymptotics", "--max-n", "6"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().nth(6).unwrap().starts_with("6,1017/40,"));
    let o = run(&["asymptotics", "--terms", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["--format", "json", "verify", "--max-n", "4"]);
    let b = run(&["--format", "json", "verify", "--max-n", "4"]);
    assert_eq!(a.stdout, b.stdout);
}
