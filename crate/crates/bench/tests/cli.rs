mod common;

use std::process::Command;

fn trustrec() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_trustrec"));
    c.env_remove("TRUSTREC_DATA");
    c
}

fn code(c: &mut Command) -> (i32, String, String) {
    let out = c.output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (r, t) = common::write_synthetic(dir.path(), 3);
    let (r, t) = (r.to_str().unwrap(), t.to_str().unwrap());

    let (c, _, err) = code(trustrec().args(["evaluate", "--ratings", r, "--trust", t, "--method", "sdne"]));
    assert_eq!(c, 1, "{err}");
    let (c, _, err) = code(trustrec().args(["load-check", "--ratings", "/nonexistent", "--trust", t]));
    assert_eq!(c, 2, "{err}");
    let (c, _, _) = code(trustrec().args(["bogus-verb"]));
    assert_eq!(c, 1);

    let (c, out, err) = code(trustrec().args(["load-check", "--ratings", r, "--trust", t]));
    assert_eq!(c, 0, "{err}");
    assert!(!out.is_empty());

    let (c, out, err) = code(trustrec().args(["evaluate", "--ratings", r, "--trust", t, "--method", "mp"]));
    assert_eq!(c, 0, "{err}");
    let row: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(row["method"], "mp");
    assert_eq!(row["coverage"], 1.0);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let (r, t) = common::write_synthetic(dir.path(), 3);
    let cfg = dir.path().join("exp.conf");
    std::fs::write(&cfg, format!("ratings = {}\ntrust = {}\nmethod = sdne\n", r.display(), t.display())).unwrap();
    let cfg = cfg.to_str().unwrap();
    let (c, _, _) = code(trustrec().args(["evaluate", "--config", cfg]));
    assert_eq!(c, 1);
    let (c, _, err) = code(trustrec().args(["evaluate", "--config", cfg, "--method", "trust_undir"]));
    assert_eq!(c, 0, "{err}");
}

#[test]
fn evaluate_then_compare_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (r, t) = common::write_synthetic(dir.path(), 3);
    let out = dir.path().join("runs");
    for m in ["mp", "trust_undir"] {
        let (c, _, err) = code(trustrec().args([
            "evaluate",
            "--ratings",
            r.to_str().unwrap(),
            "--trust",
            t.to_str().unwrap(),
            "--method",
            m,
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(c, 0, "{err}");
    }
    let files = |suffix: &str| -> Vec<String> {
        let mut v: Vec<String> = std::fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().path().to_string_lossy().into_owned())
            .filter(|p| p.ends_with(suffix))
            .collect();
        v.sort();
        v
    };
    let users = files(".users.csv");
    assert_eq!(users.len(), 2);
    let (c, stdout, err) = code(trustrec().arg("compare").args(&users));
    assert_eq!(c, 0, "{err}");
    assert!(stdout.contains("trust_undir"));

    let rows = files(".row.json");
    let (c, md, err) = code(trustrec().arg("report").args(&rows));
    assert_eq!(c, 0, "{err}");
    assert!(md.contains("| Cat. | Method |"), "{md}");
}

#[test]
fn remaining_verbs_run() {
    let dir = tempfile::tempdir().unwrap();
    let (r, t) = common::write_synthetic(dir.path(), 3);
    let (r, t) = (r.to_str().unwrap(), t.to_str().unwrap());
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let base = ["--ratings", r, "--trust", t];

    let (c, split, err) = code(trustrec().arg("split").args(base));
    assert_eq!(c, 0, "{err}");
    assert!(split.contains("cold"), "{split}");

    let (c, _, err) = code(trustrec().args(["embed", "--corpus", "--method", "deepwalk", "--param", "walks=2", "--param", "dim=8", "--out", out]).args(base));
    assert_eq!(c, 0, "{err}");
    let names: Vec<String> =
        std::fs::read_dir(out).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert!(names.iter().any(|n| n.ends_with(".emb")), "{names:?}");

    let (c, recs, err) = code(trustrec().args(["recommend", "--method", "trust_undir"]).args(base));
    assert_eq!(c, 0, "{err}");
    assert_eq!(recs.lines().next().unwrap().split_whitespace().count(), 4);

    let (c, grid, err) = code(trustrec().args(["grid", "--method", "trust_undir", "--axis", "k=1,40"]).args(base));
    assert_eq!(c, 0, "{err}");
    let grid: serde_json::Value = serde_json::from_str(&grid).unwrap();
    assert_eq!(grid["leaderboard"].as_array().unwrap().len(), 2);

    // preset layout under a data root
    let root = dir.path().join("data");
    std::fs::create_dir_all(root.join("filmtrust")).unwrap();
    std::fs::copy(r, root.join("filmtrust/ratings.txt")).unwrap();
    std::fs::copy(t, root.join("filmtrust/trust.txt")).unwrap();
    let study = dir.path().join("study");
    let (c, _, err) = code(
        trustrec()
            .env("TRUSTREC_DATA", &root)
            .args(["reproduce", "filmtrust", "--set", "methods=mp,trust_undir", "--out", study.to_str().unwrap()]),
    );
    assert_eq!(c, 0, "{err}");
    assert!(study.join("report.md").is_file());
}
