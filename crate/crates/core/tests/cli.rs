mod common;

use std::process::Command;

use common::fixture_path;

fn shex0(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_shex0"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn infer_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let order = dir.path().join("order.txt");
    std::fs::write(&order, "str\nE\nU\nB\n").unwrap();
    let learned = dir.path().join("learned.sg");
    let report = dir.path().join("report.jsonl");
    let (code, _, err) = shex0(&[
        "infer",
        "-g",
        &fixture_path("g0.tg"),
        "--order",
        order.to_str().unwrap(),
        "-o",
        learned.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let expected = shex0::format::parse_schema(&common::fixture("s0.sg"))
        .unwrap()
        .shape;
    let got = shex0::format::parse_schema(&std::fs::read_to_string(&learned).unwrap())
        .unwrap()
        .shape;
    assert_eq!(got, expected);
    for line in std::fs::read_to_string(&report).unwrap().lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
    let (code, out, _) = shex0(&[
        "validate",
        "-g",
        &fixture_path("g0.tg"),
        "-s",
        learned.to_str().unwrap(),
    ]);
    assert_eq!((code, out.as_str()), (0, ""));
}

#[test]
fn validate_reports_json_lines_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("g.tg");
    std::fs::write(
        &broken,
        common::fixture("g0.tg").replace("edge b2 d lit\n", ""),
    )
    .unwrap();
    let (code, out, _) = shex0(&[
        "validate",
        "-g",
        broken.to_str().unwrap(),
        "-s",
        &fixture_path("s0.sg"),
    ]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    assert_eq!(v["node"], "b2");
}

#[test]
fn eq_and_canonize() {
    let fam = fixture_path("s1_family.tg");
    let (code, out, _) = shex0(&[
        "eq",
        "-a",
        &fixture_path("s1.sg"),
        "-b",
        &fixture_path("s1p.sg"),
        "--typesets-from",
        &fam,
    ]);
    assert_eq!((code, out.trim()), (0, "equal"));
    let fam = fixture_path("s2_family.tg");
    let (code, out, _) = shex0(&[
        "eq",
        "-a",
        &fixture_path("s2.sg"),
        "-b",
        &fixture_path("s2p.sg"),
        "--typesets-from",
        &fam,
    ]);
    assert_eq!((code, out.trim()), (1, "unequal"));
    let (code, out, _) = shex0(&[
        "canonize",
        "-s",
        &fixture_path("s2_opt.sg"),
        "--typesets-from",
        &fam,
    ]);
    assert_eq!(code, 0);
    let got = shex0::format::parse_schema(&out).unwrap().shape;
    assert_eq!(
        got,
        shex0::format::parse_schema(&common::fixture("s2p.sg"))
            .unwrap()
            .shape
    );
}

#[test]
fn chargen_output_validates() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.tg");
    let (code, _, err) = shex0(&[
        "chargen",
        "-s",
        &fixture_path("s0.sg"),
        "--search-depth",
        "4",
        "--characteristic",
        "-o",
        g.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, _, _) = shex0(&[
        "validate",
        "-g",
        g.to_str().unwrap(),
        "-s",
        &fixture_path("s0.sg"),
        "--mode",
        "strict",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(shex0(&["frobnicate"]).0, 2);
    assert_eq!(shex0(&["canonize", "-s", &fixture_path("s0.sg")]).0, 2);
    let (code, _, err) = shex0(&[
        "validate",
        "-g",
        "/nonexistent.tg",
        "-s",
        &fixture_path("s0.sg"),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("nonexistent"));
    let dir = tempfile::tempdir().unwrap();
    let order = dir.path().join("order.txt");
    std::fs::write(&order, "str\nB\n").unwrap();
    assert_eq!(
        shex0(&[
            "infer",
            "-g",
            &fixture_path("g0.tg"),
            "--order",
            order.to_str().unwrap()
        ])
        .0,
        2
    );
    let (code, out, _) = shex0(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("infer"));
}
