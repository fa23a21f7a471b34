use std::collections::BTreeSet;
use std::process::{Command, Output};

use jtcalc_cli::report::ReportRecord;
use jtcalc_core::jordan::JordanType;

fn jtcalc(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_jtcalc"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("JTCALC_THREADS", t),
        None => cmd.env_remove("JTCALC_THREADS"),
    };
    cmd.output().expect("spawn jtcalc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const EX74: [&str; 11] = [
    "strata", "--p", "5", "--chart", "multi_ga", "--factors", "5", "--module", "Explicit(ex74,p=5)", "--format", "jsonl",
];

#[test]
fn dominance_command() {
    let o = jtcalc(&["dominance", "[3]", "[2]+[1]", "--p", "3"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[2]+[1] <= [3]: true\n");
}

#[test]
fn ex74_strata_rows() {
    let o = jtcalc(&EX74, None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let types: BTreeSet<String> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<ReportRecord>(l).unwrap())
        .filter(|r| r.kind == "stratum")
        .map(|r| r.jt.unwrap())
        .collect();
    // sum_{j != i} [j] + i[1] from the partition, for each i
    for i in 1..5u32 {
        let mut parts: Vec<u32> = (1..5).filter(|&j| j != i).collect();
        parts.extend(std::iter::repeat_n(1, i as usize));
        let want = JordanType::from_partition(5, &parts).unwrap().to_string();
        assert!(types.contains(&want), "{want} missing from {types:?}");
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let sampled = [
        "strata", "--p", "3", "--chart", "sl2_line", "--r", "2", "--module", "Std(2)*Tw(1,Std(2))", "--field", "GF(9)",
        "--budget", "1000", "--samples", "300", "--seed", "11", "--format", "jsonl",
    ];
    for args in [&EX74[..], &sampled[..]] {
        let one = jtcalc(args, Some("1"));
        let four = jtcalc(args, Some("4"));
        assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
        assert!(!one.stdout.is_empty());
        assert_eq!(one.stdout, four.stdout);
    }
    let bad = jtcalc(&["perp", "[2]", "--p", "3"], Some("zero"));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn records_round_trip_and_match_the_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../../docs/report.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let runs: [&[&str]; 6] = [
        &EX74,
        &["jt", "--p", "3", "--chart", "sl2_line", "--r", "2", "--module", "Std(2)*Tw(1,Std(2))", "--point", "0,1,0,1,1", "--format", "jsonl"],
        &["minors", "--p", "3", "--chart", "ga_r", "--r", "2", "--module", "Std(2)*Tw(1,Std(2))", "--j", "1", "--d", "1", "--format", "jsonl"],
        &["semicont", "--p", "3", "--chart", "sl2_line", "--r", "2", "--module", "Std(2)*Tw(1,Std(2))", "--seed", "5", "--curves", "4", "--format", "jsonl"],
        &["dominance", "[2]", "[1]", "--p", "3", "--format", "jsonl"],
        &["perp", "2[3]", "--p", "3", "--format", "jsonl"],
    ];
    let mut seen = 0;
    for args in runs {
        let o = jtcalc(args, None);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        for line in stdout(&o).lines() {
            let value: serde_json::Value = serde_json::from_str(line).unwrap();
            if let Err(e) = validator.validate(&value) {
                panic!("{line}: {e}");
            }
            let rec: ReportRecord = serde_json::from_str(line).unwrap();
            assert_eq!(serde_json::to_string(&rec).unwrap(), line);
            seen += 1;
        }
    }
    assert!(seen > 10);
}

#[test]
fn config_file_and_flags() {
    let dir = std::env::temp_dir().join(format!("jtcalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.conf");
    std::fs::write(&good, "# tensor defaults\np = 5\noperands = [2] [2]\n").unwrap();
    let o = jtcalc(&["tensor", "--config", good.to_str().unwrap()], None);
    assert_eq!(stdout(&o), "[2] (x) [2] = [3]+[1]\n");
    let o = jtcalc(&["tensor", "--config", good.to_str().unwrap(), "--p", "3"], None);
    assert_eq!(stdout(&o), "[2] (x) [2] = [3]+[1]\n");
    let o = jtcalc(&["tensor", "[3]", "[2]", "--config", good.to_str().unwrap(), "--p", "3"], None);
    assert_eq!(stdout(&o), "[3] (x) [2] = 2[3]\n");

    let bad = dir.join("bad.conf");
    std::fs::write(&bad, "p = 3\n\n  colour = red\n").unwrap();
    let o = jtcalc(&["perp", "[2]", "--config", bad.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config 3:3: unknown key `colour`"), "{}", stderr(&o));
    std::fs::remove_dir_all(&dir).unwrap();

    let o = jtcalc(&["strata", "--p", "3", "--chart", "ga_r"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--module"));
}

#[test]
fn csv_and_output_file() {
    let path = std::env::temp_dir().join(format!("jtcalc-out-{}.csv", std::process::id()));
    let o = jtcalc(
        &["strata", "--p", "3", "--chart", "ga_r", "--module", "Std(2)+Std(2)", "--format", "csv", "--output", path.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(text, "type,count,ranks,representatives\n2[2],2,2 0,(a0=1) (a0=2)\n");
}
