use std::process::{Command, Output};

use tdtree_testkit::fixture;

fn tdt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdt")).args(args).output().unwrap()
}

fn path(rel: &str) -> String {
    fixture(rel).display().to_string()
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["frobnicate"][..], &["validate"], &["infer", "x.json"], &["score", "--gold", "a.tsv"]] {
        let out = tdt(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"), "{args:?}");
    }
    assert_eq!(tdt(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_and_malformed_inputs_exit_two() {
    assert_eq!(tdt(&["validate", "/nonexistent/file.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    let out = tdt(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(tdt(&["normalize", bad.to_str().unwrap()]).status.code(), Some(2));
    let out = tdt(&["infer", "--pairs", "t1,nope", &path("examples/economy_2003.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_reports_to_stderr_only() {
    let out = tdt(&["validate", &path("mutants/r03_timex_under_event.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    let line = err.lines().next().unwrap();
    let fields: Vec<&str> = line.splitn(5, ':').collect();
    assert!(fields[0].ends_with("r03_timex_under_event.json"));
    assert_eq!(&fields[1..3], ["R3", "ERROR"]);
}

#[test]
fn demo_lexicon_can_be_switched_off() {
    let file = path("examples/economy_2003.json");
    let on = String::from_utf8(tdt(&["normalize", &file]).stdout).unwrap();
    let off = Command::new(env!("CARGO_BIN_EXE_tdt"))
        .args(["normalize", &file])
        .env("TDT_DEMO_LEXICON", "off")
        .output()
        .unwrap();
    let off = String::from_utf8(off.stdout).unwrap();
    assert!(on.contains("t1\t2003\t2003\n"), "{on}");
    assert_ne!(on, off);
}

#[test]
fn pairs_can_be_listed() {
    let file = path("examples/economy_2003.json");
    let out = tdt(&["infer", "--pairs", "t3,t1;t2,t2", "--pairs", "t2,t3", &file]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "t3\tt1\tAfter\nt2\tt2\tOverlap\nt2\tt3\tBefore\n");
    let out = tdt(&["infer", "--all-pairs", "--kinds", "meta", &file]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 15);
    assert!(text.starts_with("ROOT\tDCT\t"));
}

#[test]
fn outputs_are_deterministic() {
    let corpus = path("corpus.tsv");
    for args in [
        vec!["stats", corpus.as_str()],
        vec!["score", "--gold", corpus.as_str(), "--pred", corpus.as_str()],
        vec!["selftest", "--samples", "2000"],
    ] {
        let (a, b) = (tdt(&args), tdt(&args));
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn files_are_written_only_where_asked() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("counts.json");
    let out = tdt(&["stats", &path("corpus.tsv"), "--counts-out", counts.to_str().unwrap()]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&std::fs::read(&counts).unwrap()).unwrap();
    assert_eq!(value["news"]["documents"], 7);
    assert_eq!(value["narrative"]["documents"], 3);
    assert_eq!(value["total"]["documents"], 10);

    let predicted = dir.path().join("p.json");
    let out = tdt(&["parse-baseline", &path("examples/snowy_night.json"), predicted.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names, ["counts.json", "p.json"]);
    assert_eq!(tdt(&["validate", "--strict", predicted.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn double_annotations_are_scored() {
    let out = tdt(&["score", "--pairs", &path("pairs.tsv")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsing = text.lines().find(|l| l.contains("Parsing")).unwrap();
    assert!(parsing.contains("0.6667"), "{text}");
}
