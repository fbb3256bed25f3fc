use std::process::Command;

fn omas() -> Command {
    Command::new(env!("CARGO_BIN_EXE_omas"))
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn bounds_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.csv");
    let status = omas()
        .args([
            "bounds",
            "--n-agents",
            "10,3",
            "--ratios",
            "1,0.1",
            "--methods",
            "relaxed,ping",
        ])
        .arg("--out")
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("# omas bounds --n-agents 3,10 --ratios 0.1,1 "));
    assert_eq!(lines.next().unwrap(), "n_agents,ratio,ping,relaxed");
    let rows = data_rows(&csv);
    let keys: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| (r[0].as_str(), r[1].as_str()))
        .collect();
    assert_eq!(keys, [("3", "0.1"), ("3", "1"), ("10", "0.1"), ("10", "1")]);
    let ping: f64 = rows[3][2].parse().unwrap();
    assert!((ping - 0.09 / 5.5).abs() < 1e-15);
}

#[test]
fn comment_line_reproduces_output() {
    let first = omas()
        .args([
            "simulate",
            "--n-agents",
            "4",
            "--ratio-range",
            "0.5,5",
            "--points-per-decade",
            "2",
        ])
        .args(["--replications", "50", "--algorithm", "both", "--seed", "9"])
        .output()
        .unwrap();
    assert!(first.status.success());
    let csv = String::from_utf8(first.stdout).unwrap();
    let command = csv
        .lines()
        .next()
        .unwrap()
        .strip_prefix("# omas ")
        .unwrap()
        .to_owned();
    let again = omas().args(command.split(' ')).output().unwrap();
    assert!(again.status.success());
    assert_eq!(String::from_utf8(again.stdout).unwrap(), csv);
    assert_eq!(data_rows(&csv).len(), 2 * 3);
}

#[test]
fn threads_do_not_change_results() {
    let run = |threads: &str| {
        let out = omas()
            .args([
                "simulate",
                "--n-agents",
                "5",
                "--ratios",
                "2",
                "--replications",
                "200",
            ])
            .args(["--threads", threads])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn age_cdf_columns() {
    let out = omas()
        .args([
            "age-cdf",
            "--n-agents",
            "5",
            "--ratios",
            "1",
            "--replications",
            "100",
        ])
        .args(["--grid-max", "3", "--grid-points", "7"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "s,empirical,ping,infection");
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[6][0], "3");
    for r in rows {
        let v: Vec<f64> = r.iter().map(|x| x.parse().unwrap()).collect();
        assert!((0.0..=1.0).contains(&v[1]));
        assert!(v[3] <= v[2] + 1e-12);
    }
}

#[test]
fn reproduce_fig1_grid() {
    let out = omas().args(["reproduce", "fig1"]).output().unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "# omas reproduce fig1");
    assert_eq!(data_rows(&csv).len(), 3 * 251);
}

#[test]
fn errors_exit_nonzero_with_diagnostic() {
    for args in [
        vec!["bounds", "--n-agents", "1"],
        vec!["bounds", "--ratios", "-1"],
        vec!["age-cdf", "--n-agents", "3,4", "--ratios", "1"],
        vec!["simulate", "--replications", "0", "--ratios", "1"],
    ] {
        let out = omas().args(&args).output().unwrap();
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.starts_with("omas: error:"), "{args:?}: {err}");
        assert!(out.stdout.is_empty());
    }
}
