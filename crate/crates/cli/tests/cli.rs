use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_budgetmech");

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("BUDGETMECH_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn family_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p7.json");
    ok(&["family", "--name", "prop7", "--k", "3", "-o", s(&out)]);
    assert_eq!(read(&out), read(&golden("prop7_k3.json")));
}

#[test]
fn solve_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    ok(&["solve", "-i", s(&golden("prop9.json")), "--class", "sic", "-o", s(&out)]);
    let text = read(&out);
    assert_eq!(text, read(&golden("prop9_sic.json")));
    assert!(text.contains("\"value\": \"1\""));
}

#[test]
fn sweep_csv_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    ok(&[
        "sweep", "--name", "prop9", "--B", "3", "--eps", "1/2", "--values", "3,5,9", "--numerator", "sic",
        "--denominator", "m", "--format", "csv", "-o", s(&out),
    ]);
    assert_eq!(read(&out), read(&golden("sweep_prop9.csv")));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let commands: Vec<Vec<String>> = vec![
        vec!["family".into(), "--name".into(), "lemma5_trunc".into(), "--n".into(), "3".into()],
        vec!["solve".into(), "-i".into(), s(&golden("prop9.json")).into(), "--class".into(), "m".into()],
        vec!["solve".into(), "-i".into(), s(&golden("prop7_k3.json")).into(), "--class".into(), "menu:2".into()],
        vec!["example1".into(), "--v-hat".into(), "2".into(), "--grid".into(), "8".into()],
        vec!["sweep".into(), "--name".into(), "prop7".into(), "--values".into(), "2,3".into(),
             "--numerator".into(), "cb".into(), "--denominator".into(), "m".into()],
    ];
    for (i, cmd) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("{i}-{rep}"));
            let mut args: Vec<&str> = cmd.iter().map(String::as_str).collect();
            args.extend(["-o", s(&out)]);
            ok(&args);
            outputs.push(std::fs::read(&out).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{cmd:?}");
    }
}

#[test]
fn verify_trivial_mechanism_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.json");
    let m = dir.path().join("m.json");
    std::fs::write(&d, r#"{"label":"t","types":[{"v":"3","w":"1","prob":"1/2"},{"v":"1","w":"3","prob":"1/2"}]}"#).unwrap();
    std::fs::write(
        &m,
        r#"{"label":"t","types":[{"v":"3","w":"1","q":"0","p":"0"},{"v":"1","w":"3","q":"0","p":"0"}]}"#,
    )
    .unwrap();
    let out = dir.path().join("v.json");
    ok(&["verify", "-d", s(&d), "-m", s(&m), "--class", "m", "-o", s(&out)]);
    assert!(read(&out).contains("\"violations\": []"));
}

/// family -> solve -> verify closes for every family at its smallest size.
#[test]
fn family_solve_verify_round_trip() {
    let families: &[&[&str]] = &[
        &["prop3", "--k", "2"],
        &["prop4", "--k", "2"],
        &["lemma4_trunc", "--n", "1"],
        &["lemma5_trunc", "--n", "1"],
        &["prop7", "--k", "2"],
        &["prop8_pair", "--k", "2"],
        &["prop9", "--B", "2", "--eps", "1/2"],
        &["prop10", "--B", "2", "--eps", "1/2"],
        &["prop11_pair", "--H", "2", "--eps", "1"],
    ];
    let dir = tempfile::tempdir().unwrap();
    for fam in families {
        let name = fam[0];
        let dist = dir.path().join(format!("{name}.json"));
        let mut args = vec!["family", "--name"];
        args.extend_from_slice(fam);
        args.extend(["-o", s(&dist)]);
        let has_witness = ["prop3", "prop4", "lemma4_trunc", "lemma5_trunc", "prop7"].contains(&name);
        let wit = dir.path().join(format!("{name}.witness.json"));
        if has_witness {
            args.extend(["--witness-output", s(&wit)]);
        }
        let upper = dir.path().join(format!("{name}.upper.json"));
        if name.ends_with("_pair") {
            args.extend(["--upper-output", s(&upper)]);
        }
        ok(&args);

        let mut dists = vec![dist.clone()];
        if name.ends_with("_pair") {
            dists.push(upper.clone());
        }
        for (j, d) in dists.iter().enumerate() {
            for class in ["m", "sic", "cb", "posted", "menu:1"] {
                let result = dir.path().join(format!("{name}-{j}-{class}.json"));
                let mech = dir.path().join(format!("{name}-{j}-{class}.mech.json"));
                ok(&["solve", "-i", s(d), "--class", class, "-o", s(&result), "--witness-output", s(&mech)]);
                let report = dir.path().join(format!("{name}-{j}-{class}.verify.json"));
                ok(&["verify", "-d", s(d), "-m", s(&mech), "--class", class, "-o", s(&report)]);
                assert!(read(&report).contains("\"violations\": []"), "{name} {class}");
            }
        }
        if has_witness {
            let class = if name == "prop7" { "cb" } else { "m" };
            let report = dir.path().join(format!("{name}.witness.verify.json"));
            ok(&["verify", "-d", s(&dist), "-m", s(&wit), "--class", class, "-o", s(&report)]);
            assert!(read(&report).contains("\"violations\": []"), "{name} witness");
        }
    }
}

#[test]
fn default_output_dir_comes_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["family", "--name", "prop7", "--k", "2"])
        .env("BUDGETMECH_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let expected = dir.path().join("prop7.json");
    assert!(expected.exists());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), expected.to_str().unwrap());
}

#[test]
fn extend_answers_grid_queries() {
    let dir = tempfile::tempdir().unwrap();
    let wit = dir.path().join("w.json");
    let dist = dir.path().join("d.json");
    ok(&["family", "--name", "prop3", "--k", "2", "-o", s(&dist), "--witness-output", s(&wit)]);
    let out = dir.path().join("e.json");
    ok(&["extend", "-m", s(&wit), "--grid", "6", "-o", s(&out)]);
    let v: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    assert_eq!(v["queries"].as_array().unwrap().len(), 36);
    assert!(v["monotonicity"]["violations"].as_array().unwrap().is_empty());
}

fn expect_failure(args: &[&str], code: i32, kind: &str) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error kind={kind} msg=")), "{err}");
}

#[test]
fn errors_map_to_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    expect_failure(&["solve", "-i", s(&missing), "--class", "m"], 20, "io");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"label":"x","types":[{"v":"1","w":"1","prob":"1/2"}]}"#).unwrap();
    expect_failure(&["solve", "-i", s(&bad), "--class", "m", "-o", s(&dir.path().join("o"))], 11, "invalid_distribution");

    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "not json").unwrap();
    expect_failure(&["solve", "-i", s(&junk), "--class", "m"], 21, "json");

    expect_failure(&["family", "--name", "prop7"], 14, "invalid_parameter");

    let big = dir.path().join("big.json");
    ok(&["family", "--name", "prop7", "--k", "6", "-o", s(&big)]);
    expect_failure(
        &["solve", "-i", s(&big), "--class", "menu:2", "--enumeration-cap", "10"],
        18,
        "enumeration_budget",
    );

    let usage = run(&["solve", "--class", "nonsense"]);
    assert_eq!(usage.status.code(), Some(2));
}
