mod common;

use std::collections::BTreeMap;

use common::*;
use proptest::prelude::*;
use trustrec_bench::analysis::*;
use trustrec_bench::config::{ConfigMap, ExperimentConfig, Mode};
use trustrec_bench::grid::*;
use trustrec_bench::io::UserRecord;
use trustrec_bench::methods::Family;
use trustrec_bench::pipeline::*;
use trustrec_bench::report::*;
use trustrec_bench::BenchError;

fn data() -> (tempfile::TempDir, std::path::PathBuf, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let (r, t) = write_synthetic(dir.path(), 11);
    (dir, r, t)
}

fn cold_counts(p: &Prepared) -> (usize, usize) {
    (p.split.cold_users.len(), p.split.test_users.len())
}

#[test]
fn split_follows_user_roles() {
    let (_d, r, t) = data();
    let p = prepare(&config(&r, &t, &[])).unwrap();
    assert_eq!(p.split.warm_users.len(), COMMUNITIES * 20);
    assert_eq!(p.split.cold_users.len(), COMMUNITIES * 16);
    assert_eq!(p.split.validation_users.len(), COMMUNITIES * 20);
    // cold users with trust arcs, incoming arcs included
    assert!(p.split.test_users.len() >= COMMUNITIES * 12);
    assert_eq!(p.data.ratings.num_users(), COMMUNITIES * COMMUNITY_SIZE);
}

#[test]
fn most_popular_covers_every_cold_user() {
    let (_d, r, t) = data();
    let out = run_experiment(&config(&r, &t, &["method=mp"])).unwrap();
    assert_eq!(out.row.coverage, 1.0);
    assert_eq!(out.row.family, Family::Baseline);
    assert!(out.row.ndcg > 0.0 && out.row.ndcg <= 1.0);
    assert!(out.row.diversity.is_some());
}

#[test]
fn embedding_coverage_is_bounded_by_trust() {
    let (_d, r, t) = data();
    let cfg = config(&r, &t, &["method=le", "param.dim=8"]);
    let p = prepare(&cfg).unwrap();
    let (cold, test) = cold_counts(&p);
    let out = run_prepared(&p, &cfg).unwrap();
    assert_eq!(out.row.users, cold);
    assert!(out.row.covered <= test);
    assert!(out.row.coverage >= 0.5 * test as f64 / cold as f64);
    let untrusted = p.data.users().get("u0_33").unwrap();
    let rec = out.records.iter().find(|r| r.user == untrusted).unwrap();
    assert!(!rec.covered && rec.ndcg.is_none());
}

#[test]
fn aggregate_is_the_mean_of_user_records() {
    let (_d, r, t) = data();
    let out = run_experiment(&config(&r, &t, &["method=trust_undir"])).unwrap();
    let covered: Vec<f64> = out.records.iter().filter_map(|r| r.ndcg).collect();
    assert_eq!(out.row.ndcg, covered.iter().sum::<f64>() / covered.len() as f64);
    assert_eq!(out.row.coverage, covered.len() as f64 / out.records.len() as f64);
}

#[test]
fn deterministic_runs_give_identical_csv() {
    let (_d, r, t) = data();
    let cfg = config(&r, &t, &["method=deepwalk", "param.dim=16", "param.walks=4", "param.length=20", "seed=5"]);
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.embedding, b.embedding);
    let csv_a = emit_report(&[a.row], ReportFormat::Csv).unwrap();
    let csv_b = emit_report(&[b.row], ReportFormat::Csv).unwrap();
    assert_eq!(csv_a, csv_b);
}

#[test]
fn unknown_method_fails_before_loading() {
    let mut map = ConfigMap::default();
    map.set("ratings", "/nonexistent/ratings.txt");
    map.set("trust", "/nonexistent/trust.txt");
    map.set("method", "sdne");
    let err = ExperimentConfig::from_map(&map, None).unwrap_err();
    assert!(matches!(err, BenchError::Config(_)));
    assert_eq!(err.exit_code(), 1);
    let mut cfg = ExperimentConfig::default();
    cfg.ratings = "/nonexistent/ratings.txt".into();
    cfg.trust = "/nonexistent/trust.txt".into();
    cfg.method.name = "sdne".into();
    assert_eq!(run_experiment(&cfg).unwrap_err().exit_code(), 1);
    cfg.method.name = "mp".into();
    let missing = run_experiment(&cfg).unwrap_err();
    assert_eq!(missing.exit_code(), 2);
    assert_eq!(missing.stage(), Some(trustrec_bench::error::Stage::Load));
}

#[test]
fn numerical_failures_map_to_exit_code_three() {
    let err = BenchError::from(trustrec_core::Error::NoConvergence { iterations: 3, residuals: vec![1.0] });
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn persisted_outputs() {
    let (d, r, t) = data();
    let out_dir = d.path().join("out");
    let cfg = config(&r, &t, &["method=hope", "param.dim=8", &format!("out={}", out_dir.display())]);
    run_experiment(&cfg).unwrap();
    let names: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    for suffix in [".users.csv", ".row.json", ".recs.txt", ".emb", ".emb.json"] {
        assert!(names.iter().any(|n| n.ends_with(suffix)), "missing {suffix} in {names:?}");
    }
    let row_file = names.iter().find(|n| n.ends_with(".row.json")).unwrap();
    let rows = parse_report_json(&std::fs::read(out_dir.join(row_file)).unwrap()).unwrap();
    assert_eq!(rows[0].method, "hope");
    assert!(rows[0].stages.iter().any(|s| s.stage == "embed"));
}

#[test]
fn failed_run_leaves_no_outputs() {
    let (d, r, t) = data();
    let out_dir = d.path().join("out");
    let missing = d.path().join("missing.emb");
    let cfg = config(
        &r,
        &t,
        &["method=imported", &format!("param.path={}", missing.display()), &format!("out={}", out_dir.display())],
    );
    assert!(run_experiment(&cfg).is_err());
    assert!(!out_dir.exists() || std::fs::read_dir(&out_dir).unwrap().next().is_none());
}

#[test]
fn validation_folds_partition_validation_users() {
    let (_d, r, t) = data();
    let p = prepare(&config(&r, &t, &[])).unwrap();
    let tasks = tasks(&p, Mode::Validate, 5);
    assert_eq!(tasks.len(), 5);
    let mut all: Vec<u32> = tasks.iter().flat_map(|t| t.targets.clone()).collect();
    all.sort_unstable();
    assert_eq!(all, p.split.validation_users);
    for task in &tasks {
        for &u in &task.targets {
            assert_eq!(task.train.row_len(u), 0);
        }
        for &u in &p.split.cold_users {
            assert_eq!(task.train.row_len(u), 0);
        }
    }
}

#[test]
fn grid_search_contracts() {
    let (_d, r, t) = data();
    let base = config(&r, &t, &["method=trust_undir", "mode=validate"]);
    let p = prepare(&base).unwrap();

    let single = GridSpec::new(vec![("k".into(), vec!["40".into()])]).unwrap();
    let res = grid_search_prepared(&single, &base, &p).unwrap();
    assert_eq!(res.leaderboard.len(), 1);
    assert_eq!(res.best.k, 40);

    let ks = GridSpec::new(vec![("k".into(), vec!["1".into(), "40".into()])]).unwrap();
    let res = grid_search_prepared(&ks, &base, &p).unwrap();
    assert_eq!(res.best.k, 40);
    assert!(res.leaderboard[1].ndcg.unwrap() > res.leaderboard[0].ndcg.unwrap());

    let katz = config(&r, &t, &["method=katz", "mode=validate"]);
    let grid = GridSpec::new(vec![
        ("alpha".into(), vec!["0.01".into(), "0.05".into(), "-1".into()]),
        ("horizon".into(), vec!["2".into(), "4".into()]),
    ])
    .unwrap();
    let res = grid_search_prepared(&grid, &katz, &p).unwrap();
    assert_eq!(res.leaderboard.len(), grid.size());
    assert_eq!(res.leaderboard.iter().filter(|r| r.error.is_some()).count(), 2);
    assert_eq!(res.leaderboard[0].point["alpha"], "0.01");
    assert_eq!(res.leaderboard[0].point["horizon"], "2");

    let bad = GridSpec::new(vec![("alpha".into(), vec!["-1".into()])]).unwrap();
    assert!(grid_search_prepared(&bad, &katz, &p).is_err());
    let test_mode = config(&r, &t, &["method=mp"]);
    assert!(matches!(grid_search_prepared(&single, &test_mode, &p), Err(BenchError::Config(_))));
}

proptest! {
    #[test]
    fn argmax_survives_monotone_transforms(
        scores in prop::collection::vec(prop::option::of(0.0f64..1.0), 1..30),
        scale in 0.1f64..10.0,
        shift in -5.0f64..5.0,
    ) {
        let transformed: Vec<Option<f64>> = scores.iter().map(|s| s.map(|v| (scale * v + shift).exp())).collect();
        prop_assert_eq!(select_best(&scores), select_best(&transformed));
    }
}

fn records(method: &str, ndcg: &[f64]) -> MethodRecords {
    MethodRecords {
        method: method.into(),
        records: ndcg
            .iter()
            .enumerate()
            .map(|(u, &x)| UserRecord {
                user: format!("u{u}"),
                method: method.into(),
                ndcg: Some(x),
                novelty: Some(x),
                diversity: Some(1.0 - x),
                covered: true,
            })
            .collect(),
    }
}

#[test]
fn significance_matrix() {
    let base: Vec<f64> = (0..30).map(|i| 0.2 + 0.02 * i as f64).collect();
    let plus: Vec<f64> = base.iter().map(|x| x + 0.1).collect();
    let same = compare_methods(&[records("a", &base), records("a2", &base)]).unwrap();
    assert_eq!(same.flagged, vec![false, false]);

    let m = compare_methods(&[records("b", &base), records("a", &plus)]).unwrap();
    assert!(m.better[1][0] && !m.better[0][1]);
    assert_eq!(m.flagged, vec![false, true]);

    let noisy: Vec<f64> = base.iter().enumerate().map(|(i, x)| x + if i % 2 == 0 { 0.05 } else { -0.05 }).collect();
    let three = compare_methods(&[records("b", &base), records("a", &plus), records("c", &noisy)]).unwrap();
    assert_eq!(three.methods.len(), 3);
    assert_eq!(three.p_values.len(), 3);
    assert_eq!(three.comparisons, 3);
    assert_eq!(three.flagged, vec![false, true, false]);

    let mut short = records("s", &base);
    short.records.pop();
    assert!(matches!(compare_methods(&[records("b", &base), short]), Err(BenchError::Data(_))));
}

#[test]
fn correlation_of_identical_metrics_is_one() {
    let x: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
    let report = correlate_metrics(&[records("a", &x), records("b", &x)]).unwrap();
    let ndcg_nov = report.iter().find(|c| c.a == Metric::Ndcg && c.b == Metric::Novelty).unwrap();
    assert_eq!(ndcg_nov.mean_tau, Some(1.0));
    assert_eq!(ndcg_nov.per_method.len(), 2);
    let div_nov = report.iter().find(|c| c.a == Metric::Diversity).unwrap();
    // diversity = 1 - x hits zero for the last user, which is excluded
    assert_eq!(div_nov.mean_tau, Some(-1.0));
    assert_eq!(div_nov.per_method[0].users, 19);
}

fn row(method: &str, family: Family) -> ReportRow {
    ReportRow {
        method: method.into(),
        family,
        params: "k=40".into(),
        ndcg: 0.123456789,
        novelty: 0.5,
        diversity: None,
        coverage: 0.442,
        covered: 241,
        users: 545,
        flags: String::new(),
        mode: "test".into(),
        seed: 1,
        wall_time: 0.25,
        peak_memory_kb: Some(1024),
        stages: vec![StageTiming { stage: "embed".into(), seconds: 0.1, peak_memory_kb: None }],
    }
}

#[test]
fn report_formats() {
    assert!(emit_report(&[], ReportFormat::Csv).is_err());
    let csv = String::from_utf8(emit_report(&[row("mp", Family::Baseline)], ReportFormat::Csv).unwrap()).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "method,params,ndcg,novelty,diversity,coverage,flags");

    let rows = vec![
        row("line", Family::Line),
        row("ext", Family::Imported),
        row("deepwalk", Family::RandomWalk),
        row("mp", Family::Baseline),
        row("le", Family::Factorization),
    ];
    let json = emit_report(&rows, ReportFormat::Json).unwrap();
    assert_eq!(parse_report_json(&json).unwrap(), rows);

    let md = String::from_utf8(emit_report(&rows, ReportFormat::Markdown).unwrap()).unwrap();
    let order: Vec<usize> =
        ["| Baseline", "| Factorization", "| RW", "| LINE", "| imported"].iter().map(|f| md.find(f).unwrap()).collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]), "{md}");
    assert!(md.contains("44.2 %"));
}

#[test]
fn config_precedence_and_validation() {
    let mut map = ConfigMap::parse("# experiment\nmethod = node2vec\nparam.p = 0.5\nk = 20\n", "cfg").unwrap();
    map.set_pair("k=30").unwrap();
    map.set_pair("dataset=filmtrust").unwrap();
    let root = std::path::Path::new("/data/root");
    let cfg = ExperimentConfig::from_map(&map, Some(root)).unwrap();
    assert_eq!(cfg.k, 30);
    assert_eq!(cfg.method.params, BTreeMap::from([("p".to_string(), "0.5".to_string())]));
    assert_eq!(cfg.ratings, root.join("filmtrust/ratings.txt"));
    assert_eq!(cfg.trust, root.join("filmtrust/trust.txt"));

    for bad in ["colour = red", "k = 0", "method = hope\nparam.dim = 7", "method = node2vec\nparam.p = -1", "method = mp\nparam.x = 1"] {
        let map = ConfigMap::parse(bad, "cfg").unwrap();
        let err = ExperimentConfig::from_map(&map, None).unwrap_err();
        assert_eq!(err.exit_code(), 1, "{bad}");
    }
    assert!(ConfigMap::parse("no equals sign", "cfg").is_err());
}

#[test]
fn reproduce_writes_a_study() {
    let (d, r, t) = data();
    let out_dir = d.path().join("study");
    let cfg = config(&r, &t, &["methods=mp,trust_undir,katz,le", &format!("out={}", out_dir.display())]);
    let study = trustrec_bench::reproduce::reproduce(&cfg).unwrap();
    assert_eq!(study.rows.len(), 4);
    assert!(study.outcomes.iter().all(|o| o.error.is_none()));
    assert_eq!(study.outcomes[2].leaderboard.len(), 4);
    assert_eq!(study.significance.as_ref().unwrap().comparisons, 6);
    assert_eq!(study.correlations.len(), 3);
    for f in ["report.csv", "report.json", "report.md", "users.csv", "grid.json", "significance.json", "correlations.json"] {
        assert!(out_dir.join(f).is_file(), "{f}");
    }
    let bad = config(&r, &t, &["methods=mp,sdne"]);
    assert_eq!(trustrec_bench::reproduce::reproduce(&bad).unwrap_err().exit_code(), 1);
}
