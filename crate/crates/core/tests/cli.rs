mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use common::{data_dir, max_deviation, multiway_combination};
use ds_forecast::cli::{cmd_evaluate, cmd_predict, cmd_validate, Corpus, ExitCode, Format, Mode};
use ds_forecast::combination::combine_all;
use ds_forecast::decision::{distribute_over_singletons, rank};
use ds_forecast::frame::{parse_score, HypothesisSet};
use ds_forecast::io::fmt_weight;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ds-forecast"))
}

fn demo() -> std::path::PathBuf {
    data_dir().join("demo/evidence")
}

fn set(scores: &[&str]) -> HypothesisSet {
    HypothesisSet::from_scores(scores.iter().map(|s| parse_score(s).unwrap()))
}

fn write_evidence(dir: &Path, name: &str, expert: &str, assignments: &str) {
    let text = format!(
        r#"{{"match_id": "7", "expert_id": "{expert}", "evidence": [{{"label": "form", "impact": 1.0, "assignments": [{assignments}]}}]}}"#
    );
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn reconstructed_match_30_matches_multiway_oracle() {
    let corpus = Corpus::load(&demo()).unwrap();
    let subs = corpus.submissions("30").unwrap();
    let inputs: Vec<_> = subs
        .values()
        .flat_map(|s| s.evidence.iter().map(|e| e.mass.clone()))
        .collect();
    assert_eq!(inputs.len(), 4);
    let pooled = corpus.combined_mass("30").unwrap();
    let oracle = multiway_combination(&inputs).unwrap();
    assert!(max_deviation(&pooled, &oracle) <= 1e-9);

    // Same nine focal sets as the published combination, led by {1:0, 2:0}.
    assert_eq!(pooled.len(), 9);
    let expected = [
        set(&["1:0", "2:0"]),
        set(&["1:0"]),
        set(&["2:1"]),
        set(&["1:0", "2:0", "2:1"]),
        set(&["0:0", "1:1"]),
        set(&["0:1", "1:2"]),
        set(&["0:1"]),
        set(&["2:1", "3:0", "3:1"]),
        set(&["0:0", "1:1", "2:2"]),
    ];
    for s in expected {
        assert!(pooled.mass(s) > 0.0, "{s:?} missing");
    }
    assert_eq!(pooled.by_mass()[0].0, set(&["1:0", "2:0"]));
}

#[test]
fn combined_prediction_is_library_composition() {
    let corpus = Corpus::load(&demo()).unwrap();
    for id in ["1", "2", "3", "30"] {
        let subs = corpus.submissions(id).unwrap();
        let inputs: Vec<_> = subs
            .values()
            .flat_map(|s| s.evidence.iter().map(|e| e.mass.clone()))
            .collect();
        let direct = rank(&distribute_over_singletons(&combine_all(&inputs).unwrap()));
        assert_eq!(corpus.predict_combined(id).unwrap(), direct);

        let out = cmd_predict(&demo(), id, Mode::Combined, Format::Rows);
        let expected: String = std::iter::once("match_id,source,rank,score,weight".to_string())
            .chain(
                direct
                    .entries()
                    .enumerate()
                    .map(|(i, (l, w))| format!("{id},combined,{},{l},{w}", i + 1)),
            )
            .map(|l| l + "\n")
            .collect();
        assert_eq!(out.stdout, expected);
    }
}

#[test]
fn pooled30_fixture_is_headed_by_one_nil() {
    let out = cmd_predict(
        &data_dir().join("pooled30"),
        "30",
        Mode::Combined,
        Format::Table,
    );
    assert_eq!(out.code, ExitCode::Success);
    let lines: Vec<_> = out.stdout.lines().collect();
    assert_eq!(
        lines[2].split_whitespace().collect::<Vec<_>>(),
        vec!["1", "1:0", "0.415"]
    );
    assert!(out.stdout.contains("top prediction: 1:0"));
    assert!(out.stdout.contains("<0.001"));
}

#[test]
fn per_expert_mode_ranks_each_expert() {
    let out = cmd_predict(&demo(), "30", Mode::PerExpert, Format::Table);
    assert_eq!(out.code, ExitCode::Success);
    for e in ["e1", "e2", "e3", "e4"] {
        assert!(
            out.stdout.contains(&format!("match 30 / {e}")),
            "{}",
            out.stdout
        );
    }
    assert_eq!(out.stdout.matches("top prediction").count(), 4);
}

#[test]
fn degenerate_certain_singleton() {
    let dir = tempfile::tempdir().unwrap();
    write_evidence(
        dir.path(),
        "a.json",
        "e1",
        r#"{"scores": ["2:1"], "belief": 1.0}"#,
    );
    let out = cmd_predict(dir.path(), "7", Mode::Combined, Format::Table);
    assert_eq!(out.code, ExitCode::Success);
    assert!(out.stdout.contains("   1  2:1     1.000"), "{}", out.stdout);
    assert!(out.stdout.contains("top prediction: 2:1"));
}

#[test]
fn contradictory_experts_are_a_combination_failure() {
    let dir = tempfile::tempdir().unwrap();
    write_evidence(
        dir.path(),
        "a.json",
        "e1",
        r#"{"scores": ["2:1"], "belief": 1.0}"#,
    );
    write_evidence(
        dir.path(),
        "b.json",
        "e2",
        r#"{"scores": ["0:3"], "belief": 1.0}"#,
    );
    let out = cmd_predict(dir.path(), "7", Mode::Combined, Format::Table);
    assert_eq!(out.code, ExitCode::Combination);
    assert!(out.stderr.contains("e2: form"), "{}", out.stderr);
    assert!(out.stderr.contains("e1: form"), "{}", out.stderr);

    let status = bin()
        .args(["predict", "--evidence"])
        .arg(dir.path())
        .args(["--match", "7"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn unknown_match_is_an_error() {
    let out = cmd_predict(&demo(), "99", Mode::Combined, Format::Table);
    assert_eq!(out.code, ExitCode::Validation);
    assert!(out.stderr.contains("no evidence for match 99"));
}

#[test]
fn validate_reports_ok_and_violations() {
    let out = cmd_validate(&[demo()]);
    assert_eq!(out.code, ExitCode::Success, "{}", out.stdout);
    assert_eq!(
        out.stdout.lines().filter(|l| l.ends_with(": OK")).count(),
        24
    );

    let dir = tempfile::tempdir().unwrap();
    write_evidence(
        dir.path(),
        "over.json",
        "e1",
        r#"{"scores": ["1:0"], "belief": 0.6}, {"scores": ["1:0"], "belief": 0.5}"#,
    );
    write_evidence(
        dir.path(),
        "range.json",
        "e2",
        r#"{"scores": ["7:0"], "belief": 0.5}"#,
    );
    let out = cmd_validate(&[dir.path().join("over.json"), dir.path().join("range.json")]);
    assert_eq!(out.code, ExitCode::Validation);
    assert!(out.stdout.contains("beliefs sum to 1.1"), "{}", out.stdout);
    assert!(
        out.stdout
            .contains("evidence[0].assignments[0].scores[0]: cannot parse score `7:0`"),
        "{}",
        out.stdout
    );

    let missing = cmd_validate(&[dir.path().join("absent.json")]);
    assert_eq!(missing.code, ExitCode::Io);

    let status = bin().arg("validate").arg(dir.path()).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
    let status = bin().arg("validate").arg(demo()).output().unwrap();
    assert_eq!(status.status.code(), Some(0));
}

#[test]
fn evaluate_demo_corpus() {
    let fixtures = data_dir().join("demo/fixtures.csv");
    let out = cmd_evaluate(&demo(), &fixtures, Format::Rows, None);
    assert_eq!(out.code, ExitCode::Success, "{}", out.stderr);
    assert!(out.stderr.contains("match 31: no actual result"));
    let mut lines = out.stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "table,source,n,correct_results,correct_outcomes,sum_sr,ratio_sr,sum_so,ratio_so,sum_sro,ratio_sro"
    );
    let mut tables = std::collections::BTreeSet::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        tables.insert(cells[0].to_string());
        assert_eq!(cells[2], "6");
        if cells[1] == "mean" {
            continue;
        }
        let n: u32 = cells[2].parse().unwrap();
        let results: u32 = cells[3].parse().unwrap();
        let outcomes: u32 = cells[4].parse().unwrap();
        let sr: u32 = cells[5].parse().unwrap();
        let so: u32 = cells[7].parse().unwrap();
        let sro: u32 = cells[9].parse().unwrap();
        assert_eq!(sr, results);
        assert_eq!(so, results + outcomes);
        assert_eq!(sro, 2 * results + outcomes);
        assert!(results + outcomes <= n);
    }
    assert_eq!(
        tables.into_iter().collect::<Vec<_>>(),
        vec!["d_c", "d_e", "d_i"]
    );

    let table = cmd_evaluate(
        &demo(),
        &fixtures,
        Format::Table,
        Some(&["s_ro".to_string()]),
    );
    assert!(table.stdout.contains("Σs_ro"));
    assert!(!table.stdout.contains("Σs_r "));
    let bad = cmd_evaluate(
        &demo(),
        &fixtures,
        Format::Table,
        Some(&["s_x".to_string()]),
    );
    assert_eq!(bad.code, ExitCode::Validation);
}

#[test]
fn evaluate_with_empty_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = dir.path().join("fixtures.csv");
    fs::write(&fixtures, "match_id,home_team,away_team,actual\n").unwrap();
    let out = cmd_evaluate(&demo(), &fixtures, Format::Table, None);
    assert_eq!(out.code, ExitCode::Success);
    assert!(out.stderr.contains("nothing evaluated"));
    assert!(out.stdout.contains("(no evaluated matches)"));
}

#[test]
fn evaluate_rejects_uneven_expert_sets() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["m01_e1.json", "m01_e2.json", "m02_e1.json"] {
        fs::copy(demo().join(name), dir.path().join(name)).unwrap();
    }
    let fixtures = dir.path().join("fixtures.csv");
    fs::write(
        &fixtures,
        "match_id,home_team,away_team,actual\n1,a,b,2:1\n2,c,d,0:2\n",
    )
    .unwrap();
    let out = cmd_evaluate(dir.path(), &fixtures, Format::Table, None);
    assert_eq!(out.code, ExitCode::Validation);
    assert!(
        out.stderr
            .contains("every expert must cover every evaluated match"),
        "{}",
        out.stderr
    );
}

#[test]
fn out_of_frame_actuals_are_scored() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = dir.path().join("fixtures.csv");
    fs::write(
        &fixtures,
        "match_id,home_team,away_team,actual\n3,a,b,7:0\n",
    )
    .unwrap();
    let out = cmd_evaluate(&demo(), &fixtures, Format::Rows, None);
    assert_eq!(out.code, ExitCode::Success, "{}", out.stderr);
    let dc = out.stdout.lines().find(|l| l.starts_with("d_c,")).unwrap();
    // Combined forecast for match 3 is a home win, so it scores the outcome only.
    assert!(dc.starts_with("d_c,combined,1,0,1,0,0,1,1,1,0.5"), "{dc}");
}

#[test]
fn binary_writes_report_file_and_io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let status = bin()
        .args(["predict", "--evidence"])
        .arg(demo())
        .args(["--match", "30", "--output"])
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let expected = cmd_predict(&demo(), "30", Mode::Combined, Format::Table).stdout;
    assert_eq!(fs::read_to_string(&report).unwrap(), expected);

    let status = bin()
        .args(["predict", "--evidence"])
        .arg(dir.path().join("nowhere"))
        .args(["--match", "30"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));
}

#[test]
fn weights_render_like_the_tables() {
    assert_eq!(fmt_weight(0.41506), "0.415");
    assert_eq!(fmt_weight(0.0002), "<0.001");
}
