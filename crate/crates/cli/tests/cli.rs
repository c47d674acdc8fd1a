use std::process::{Command, Output};

use univoque::bifurcation::PlateauRow;
use univoque::digits::Alphabet;
use univoque::expansion::{is_unique_expansion, BaseEnclosure};
use univoque::rational::parse_rational;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_univoque")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn interval(text: &str) -> (f64, f64) {
    let (lo, hi) = text.trim().split_once(',').unwrap();
    (lo.parse().unwrap(), hi.parse().unwrap())
}

#[test]
fn alpha_examples() {
    let out = stdout(&["alpha", "--M", "1", "--q", "root:pre:,per:110", "--digits", "9"]);
    assert_eq!(out.lines().next(), Some("110110110"));
    let out = stdout(&["alpha", "--M", "9", "--q", "10", "--digits", "5"]);
    assert_eq!(out.lines().next(), Some("99999"));
    let args = ["alpha", "--M", "1", "--q", "19/10", "--digits", "12"];
    let first = stdout(&args);
    assert_eq!(first, stdout(&args));
    let digits: Vec<u32> = first.lines().next().unwrap().chars().map(|c| c.to_digit(10).unwrap()).collect();
    let value: f64 = digits.iter().enumerate().map(|(i, &d)| d as f64 * 1.9f64.powi(-(i as i32 + 1))).sum();
    assert!((value - 1.0).abs() < 1.9f64.powi(-11));
}

#[test]
fn constants() {
    let (lo, hi) = interval(&stdout(&["kl", "--M", "9", "--width", "1e-6"]));
    // 5.97592 is a five-decimal rounding
    assert!(lo >= 5.97592 - 5e-6 && hi <= 5.97592 + 5e-6 && hi - lo <= 1.1e-6);
    let (lo, hi) = interval(&stdout(&["kl", "--M", "1", "--width", "1e-6"]));
    assert!(lo <= 1.787232 && 1.787232 <= hi);
    let (lo, hi) = interval(&stdout(&["qt", "--M", "2", "--width", "1e-6"]));
    assert!(lo <= 2.618034 && 2.618034 <= hi);
}

#[test]
fn unique_exit_codes() {
    assert_eq!(run(&["unique", "--M", "1", "--q", "3/2", "--x", "1", "--depth", "30"]).status.code(), Some(1));
    assert_eq!(run(&["unique", "--M", "1", "--q", "2", "--x", "0", "--depth", "30"]).status.code(), Some(0));
    let code = run(&["unique", "--M", "3", "--q", "7/2", "--x", "1", "--depth", "40"]).status.code();
    let lib = is_unique_expansion(
        Alphabet::new(3).unwrap(),
        &parse_rational("1").unwrap(),
        &BaseEnclosure::exact(parse_rational("7/2").unwrap()).unwrap(),
        40,
    )
    .unwrap();
    assert_eq!(code == Some(0), lib.is_unique());
}

fn plateau_rows(args: &[&str]) -> (String, Vec<PlateauRow>) {
    let text = stdout(args);
    let rows = csv::Reader::from_reader(text.as_bytes()).deserialize().collect::<Result<Vec<PlateauRow>, _>>().unwrap();
    (text, rows)
}

#[test]
fn plateau_tables() {
    let (_, rows) = plateau_rows(&["plateaus", "--M", "3", "--max-period", "1"]);
    let row = rows.iter().find(|r| r.generator == "2").unwrap();
    assert!(row.p_l_lo.parse::<f64>().unwrap() <= 3.0 && 3.0 <= row.p_l_hi.parse::<f64>().unwrap());
    assert!(row.entropy_lo <= 2f64.ln() && 2f64.ln() <= row.entropy_hi);

    let (text, rows) = plateau_rows(&["plateaus", "--M", "1", "--tmin", "178/100", "--tmax", "2", "--max-period", "6"]);
    assert!(rows.iter().any(|r| r.generator == "110"));
    for pair in rows.windows(2) {
        assert!(parse_rational(&pair[0].p_r_hi).unwrap() < parse_rational(&pair[1].p_l_lo).unwrap());
    }
    // the written table survives a parse and re-serialization unchanged
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).unwrap();
    }
    assert_eq!(String::from_utf8(w.into_inner().unwrap()).unwrap(), text);

    let json = stdout(&["plateaus", "--M", "1", "--max-period", "4", "--format", "json"]);
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed["M"], 1);
    assert!(parsed["rows"].as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn staircase_table() {
    let args = ["staircase", "--M", "1", "--tmin", "17/10", "--tmax", "2", "--samples", "100"];
    let text = stdout(&args);
    assert_eq!(text, stdout(&args));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["t", "phi_lo", "phi_hi"]);
    let rows: Vec<(f64, f64, f64)> = reader.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 100);
    let last = rows.last().unwrap();
    assert!(last.1 <= 1.0 && 1.0 <= last.2);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "phi_lo", "phi_hi"]).unwrap();
    for rec in csv::Reader::from_reader(text.as_bytes()).records() {
        w.write_record(&rec.unwrap()).unwrap();
    }
    assert_eq!(String::from_utf8(w.into_inner().unwrap()).unwrap(), text);
}

#[test]
fn classify_examples() {
    assert!(stdout(&["classify", "--M", "1", "--q", "3/2"]).starts_with("BelowKL"));
    let out = stdout(&["classify", "--M", "3", "--q", "16/5"]);
    assert!(out.starts_with("InPlateau generator=2 "), "{out}");
    assert!(stdout(&["classify", "--M", "1", "--q", "2"]).starts_with("BifurcationCandidate"));
}

#[test]
fn malformed_input_exits_cleanly() {
    let cases: &[&[&str]] = &[
        &["alpha", "--M", "1", "--q", "abc"],
        &["alpha", "--M", "0", "--q", "2"],
        &["alpha", "--M", "1", "--q", "3"],
        &["alpha", "--M", "1", "--q", "root:pre:,per:2"],
        &["kl", "--M", "1", "--width", "-1"],
        &["unique", "--M", "1", "--q", "1/0", "--x", "1"],
        &["staircase", "--M", "1", "--tmin", "2", "--tmax", "1"],
        &["classify", "--M", "1"],
        &["nonsense"],
    ];
    for args in cases {
        let out = run(args);
        let code = out.status.code().expect("exited normally");
        assert!(code == 3 || code == 4, "{args:?}: {code}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(!err.contains("panicked"), "{args:?}: {err}");
    }
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("univoque-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p.csv");
    let p = path.to_str().unwrap();
    stdout(&["plateaus", "--M", "2", "--max-period", "3", "--out", p]);
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, stdout(&["plateaus", "--M", "2", "--max-period", "3"]));
    std::fs::remove_dir_all(&dir).unwrap();
}
