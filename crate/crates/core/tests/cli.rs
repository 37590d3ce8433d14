//! End-to-end checks against the installed binary: exit codes, stdout
//! goldens, and the stats sidecar, all through real process spawns.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spillway"))
}

fn write_scores(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("scores.csv");
    fs::write(&path, "Score\n90\n70\n89\n80\n81\n75\n86\n").unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary should spawn")
}

#[test]
fn query_prints_results_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_scores(dir.path());
    let out = run(bin()
        .arg("query")
        .arg("--input")
        .arg(&input)
        .arg("--expr")
        .arg("AVG(Score) OVER (ROWS BETWEEN 2 PRECEDING AND 1 FOLLOWING)"));
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        stdout,
        "Score,AVG(Score)\n90,80\n70,83\n89,82.25\n80,80\n81,81.25\n75,80.5\n86,80.6666666667\n"
    );
}

#[test]
fn parse_error_reports_byte_offset_and_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_scores(dir.path());
    let out = run(bin()
        .arg("query")
        .arg("--input")
        .arg(&input)
        .arg("--expr")
        .arg("AVG(Score) OVER (ROWQ BETWEEN 2 PRECEDING AND 1 FOLLOWING)"));
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("byte 17"), "{stderr}");
    assert!(stderr.contains("ROWQ"), "{stderr}");
}

#[test]
fn missing_input_exits_three() {
    let out = run(bin()
        .arg("query")
        .arg("--input")
        .arg("/no/such/file.csv")
        .arg("--expr")
        .arg("SUM(x) OVER (ROWS BETWEEN 1 PRECEDING AND CURRENT ROW)"));
    assert_eq!(out.status.code(), Some(3), "{out:?}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("cannot open"), "{stderr}");
}

#[test]
fn empty_frames_render_null_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("one.csv");
    fs::write(&input, "x\n5\n").unwrap();
    let out = run(bin()
        .arg("query")
        .arg("--input")
        .arg(&input)
        .arg("--expr")
        .arg("SUM(x) OVER (ROWS BETWEEN 2 FOLLOWING AND 3 FOLLOWING)"));
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout, "x,SUM(x)\n5,\n");
}

#[test]
fn stats_sidecar_has_the_seven_keys_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("stream.csv");
    fs::write(&input, "x\n7\n8\n9\n6\n4\n5\n3\n2\n1\n").unwrap();
    let stats_path = dir.path().join("stats.json");
    let out = run(bin()
        .arg("query")
        .arg("--input")
        .arg(&input)
        .arg("--expr")
        .arg("MAX(x) OVER (ROWS BETWEEN 1 PRECEDING AND 1 FOLLOWING)")
        .arg("--memory-budget")
        .arg("2")
        .arg("--page-size")
        .arg("2")
        .arg("--spill-dir")
        .arg(dir.path())
        .arg("--stats-out")
        .arg(&stats_path));
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let raw = fs::read_to_string(&stats_path).unwrap();
    let keys = [
        "\"strategy\"",
        "\"page_reads\"",
        "\"page_writes\"",
        "\"pages_live_peak\"",
        "\"hot_tail_peak\"",
        "\"rows\"",
        "\"runtime_ms\"",
    ];
    let mut last = 0;
    for key in keys {
        let at = raw
            .find(key)
            .unwrap_or_else(|| panic!("missing {key} in {raw}"));
        assert!(at >= last, "{key} out of order in {raw}");
        last = at;
    }
    let parsed: serde_json::Value = serde_json::from_str(&raw).unwrap();
    assert_eq!(parsed["strategy"], "spilled-deque");
    assert_eq!(parsed["rows"], 9);
    assert!(parsed["page_writes"].as_u64().unwrap() > 0);
    assert_eq!(parsed.as_object().unwrap().len(), 7);
}

#[test]
fn analyze_emits_exact_and_enumerated_rows() {
    let out = run(bin()
        .arg("analyze")
        .arg("--max-d")
        .arg("3")
        .arg("--trials")
        .arg("0"));
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "d,exact_fraction,float,method,trials,stderr");
    assert!(lines.contains(&"2,3/2,1.5,recurrence,,"), "{stdout}");
    assert!(lines.contains(&"2,3/2,1.5,enumeration,,"), "{stdout}");
    assert!(
        lines.contains(&"3,11/6,1.83333333333,recurrence,,"),
        "{stdout}"
    );
}

#[test]
fn bench_lists_each_applicable_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_scores(dir.path());
    let out = run(bin()
        .arg("bench")
        .arg("--input")
        .arg(&input)
        .arg("--expr")
        .arg("MIN(Score) OVER (ROWS BETWEEN 2 PRECEDING AND CURRENT ROW)")
        .arg("--spill-dir")
        .arg(dir.path()));
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let strategies: Vec<&str> = stdout
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(
        strategies,
        ["in-memory-deque", "spilled-deque", "brute-force"]
    );
}

#[test]
fn unknown_flag_exits_two() {
    let out = run(bin().arg("query").arg("--definitely-not-a-flag"));
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}
