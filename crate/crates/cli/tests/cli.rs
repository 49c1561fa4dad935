use std::path::PathBuf;
use std::process::{Command, Output};

use ratfilt::io::{ModuleFile, ReportFile, Verdict};

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    path.to_string_lossy().into_owned()
}

fn ratfilt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratfilt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn carries_examples() {
    assert_eq!(stdout(&ratfilt(&["carries", "4", "2"])), "[0, 4]\n");
    assert_eq!(stdout(&ratfilt(&["carries", "0", "5"])), "[0]\n");
    assert_eq!(stdout(&ratfilt(&["--p", "5", "carries", "0"])), "[0]\n");
    assert_eq!(
        stdout(&ratfilt(&["carries", "10", "3", "--oracle"])),
        "[0, 1, 9, 10]\noracle: agree\n"
    );
    assert_eq!(ratfilt(&["carries", "10", "4"]).status.code(), Some(2));
}

#[test]
fn filt_examples() {
    let natural = fixture("natural_u3_p3.json");
    let out = stdout(&ratfilt(&["filt", &natural, "--kind", "exp", "--d", "1"]));
    assert_eq!(out, "[1, 0, 0]\n[0, 1, 0]\n");
    let out = stdout(&ratfilt(&["filt", &natural, "--kind", "degree", "--d", "1"]));
    assert_eq!(out, "[1, 0, 0]\n");
    let trivial = fixture("trivial_u3_p3.json");
    for kind in ["degree", "exp"] {
        let out = stdout(&ratfilt(&["filt", &trivial, "--kind", kind, "--d", "1"]));
        assert_eq!(out.lines().count(), 2);
    }
}

#[test]
fn corrupted_file_is_rejected() {
    let out = ratfilt(&["filt", &fixture("corrupted_counit.json"), "--kind", "exp", "--d", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("counit violation at basis 2"));
    let out = ratfilt(&["--p", "5", "expdeg", &fixture("natural_u3_p3.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn expdeg_examples() {
    assert_eq!(stdout(&ratfilt(&["expdeg", &fixture("trivial_u3_p3.json")])), "0\n");
    assert_eq!(stdout(&ratfilt(&["expdeg", &fixture("trivial_ga_p5.json")])), "0\n");
    assert_eq!(stdout(&ratfilt(&["expdeg", &fixture("natural_u3_p3.json")])), "2\n");
    // Only v_1, v_5, v_25, v_125 act on Y_3 at p = 5.
    assert_eq!(stdout(&ratfilt(&["expdeg", &fixture("y3_p5.json")])), "125\n");
    let out = ratfilt(&["expdeg", &fixture("natural_u3_p2.json")]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("sampled: necessary conditions only"));
}

fn support_report(args: &[&str]) -> ReportFile {
    ReportFile::parse(&stdout(&ratfilt(args))).unwrap()
}

#[test]
fn support_examples() {
    let y2 = fixture("y2_p3.json");
    let report = support_report(&["support", &y2, "--samples", "50", "--seed", "1"]);
    assert_eq!(report.records.len(), 50);
    assert!(report.records.iter().all(|r| r.verdict == Verdict::InSupport));

    let regular = fixture("regular_ga_p3.json");
    let report = support_report(&["support", &regular, "--exhaustive", "--height", "1"]);
    let at_one = report.records.iter().find(|r| r.inputs["psi"] == "Ga[1]").unwrap();
    assert_eq!(at_one.verdict, Verdict::Free);

    let report = support_report(&["support", &fixture("trivial_ga_p5.json"), "--exhaustive", "--height", "2"]);
    assert_eq!(report.records.len(), 25);
    assert!(report.records.iter().all(|r| r.verdict == Verdict::InSupport));
}

#[test]
fn support_is_deterministic() {
    let y2 = fixture("y2_p3.json");
    let a = stdout(&ratfilt(&["support", &y2, "--samples", "20", "--seed", "7"]));
    let b = stdout(&ratfilt(&["support", &y2, "--samples", "20", "--seed", "7"]));
    assert_eq!(a, b);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let path = path.to_str().unwrap();
    let out = ratfilt(&["--output", path, "support", &y2, "--samples", "20", "--seed", "7"]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), a);
}

#[test]
fn pullback_examples() {
    let natural = fixture("natural_u3_p3.json");
    let text = stdout(&ratfilt(&["pullback", &natural, "--b", "[[[0,1,0],[0,0,1],[0,0,0]]]"]));
    let fam = ModuleFile::parse(&text).unwrap();
    assert_eq!(fam.to_canonical_json(), text);
    let text = stdout(&ratfilt(&["pullback", &fixture("y2_p3.json"), "--lambda", "1,1"]));
    assert!(ModuleFile::parse(&text).unwrap().load().is_ok());
    let bad = ratfilt(&["pullback", &natural, "--b", "[[[0,1,0],[0,0,0],[0,0,0]],[[0,0,0],[0,0,1],[0,0,0]]]"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn frobcheck_and_dims() {
    let out = stdout(&ratfilt(&["frobcheck", &fixture("regular_ga_p3.json"), "--r", "1"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["free"], true);
    let out = stdout(&ratfilt(&["--p", "2", "dims", "--N", "3", "--r", "1"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!((v["dim_kernel"].as_u64(), v["dim_piece_strict"].as_u64()), (Some(8), Some(4)));
    assert_eq!(v["discrepancy"], true);
}

#[test]
fn verify_examples() {
    for args in [
        &["verify", "--suite", "carries"][..],
        &["verify", "--suite", "retract"],
        &["verify", "--suite", "relate", "--p", "5", "--N", "3"],
    ] {
        let report = ReportFile::parse(&stdout(&ratfilt(args))).unwrap();
        assert!(report.all_pass());
        assert!(report.records.iter().all(|r| !r.paper_ref.is_empty()));
    }
    assert_eq!(ratfilt(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn verify_reports_falsified_claims_with_exit_3() {
    let out = ratfilt(&["verify", "--suite", "yr", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let report = ReportFile::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(report.failures().all(|r| r.check.ends_with("/degree-is-R")));
}
