use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    root.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catastroagri")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn temp_csv(name: &str, body: &str) -> String {
    let path = std::env::temp_dir().join(format!("catastroagri-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const HEADER: &str = "YEAR,PROVINCE,DISTRICT,SECTOR_EST,NOM_CROP,AREA_SEM_HAS,AREA_ASEG_HAS,AMOUNT_IND_SOLES,NUM_PROD_BENIF";

#[test]
fn summarize_by_crop_prints_totals() {
    let out = run(&["summarize", &fixture("puno_2010_2011_by_crop.csv"), "--by", "crop"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let total = text.lines().find(|l| l.starts_with("TOTAL")).expect("footer row");
    for want in ["14838", "5935200", "47929"] {
        assert!(total.contains(want), "{total}");
    }
}

#[test]
fn audit_reports_match_counts() {
    let out = run(&["audit", &fixture("puno_2011_by_province.csv"), "--rates", "400,800"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("400: 9/9, 800: 0/9"));
}

#[test]
fn csv_output_parses() {
    let out = run(&[
        "--format",
        "csv",
        "summarize",
        &fixture("puno_2011_by_province.csv"),
        "--by",
        "province",
        "--top",
        "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let names: Vec<String> = reader.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(names, ["EL COLLAO", "AZANGARO"]);
}

#[test]
fn json_output_parses() {
    let out = run(&["--format", "json", "summarize", &fixture("puno_2010_2011_by_crop.csv"), "--by", "crop"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["grand_total"]["insured"], "14838");
}

#[test]
fn linear_forecast() {
    let path = temp_csv(
        "line.csv",
        &format!("{HEADER}\n2010-2011,P,D,S,C,2,2,0,0\n2011-2012,P,D,S,C,4,4,0,0\n2012-2013,P,D,S,C,6,6,0,0\n"),
    );
    let out = run(&["--format", "csv", "forecast", &path, "--h", "1", "--method", "linear"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    assert_eq!(last.rsplit(',').next().unwrap(), "8");
}

#[test]
fn fit_on_simulated_fixture_is_adequate() {
    let out = run(&["fit", &fixture("simulated_airline_240.csv")]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("verdict: adequate"));
}

#[test]
fn output_is_deterministic() {
    let args = ["fit", &fixture("simulated_airline_240.csv")];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let sim = ["--format", "csv", "simulate", "--seed", "7", "--sigma", "10", "--level", "5000"];
    let a = run(&sim);
    assert_eq!(a.stdout, run(&sim).stdout);
    assert_eq!(stdout(&a), std::fs::read_to_string(fixture("simulated_airline_240.csv")).unwrap());
}

#[test]
fn exit_codes() {
    let missing = run(&["summarize", "/nonexistent/register.csv", "--by", "crop"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(!missing.stderr.is_empty());

    let bad_flag = run(&["summarize", "--no-such-flag"]);
    assert_eq!(bad_flag.status.code(), Some(1));

    let bad_dim = run(&["summarize", &fixture("puno_2010_2011_by_crop.csv"), "--by", "planet"]);
    assert_eq!(bad_dim.status.code(), Some(1));

    let short = run(&["fit", &fixture("puno_2010_2011_by_crop.csv"), "--period-column", "crop"]);
    assert_eq!(short.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&short.stderr).contains("SERIES_TOO_SHORT"));

    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
