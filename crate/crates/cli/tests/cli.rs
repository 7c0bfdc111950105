use std::fs;
use std::process::{Command, Output};

fn su11(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_su11"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(su11(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        su11(&["sweep", "--axis", "bogus", "--lo", "0", "--hi", "1", "--steps", "3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        su11(&["sweep", "--axis", "t_s2", "--lo", "0", "--hi", "2", "--steps", "3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(su11(&["figure", "fig9"]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = su11(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("validate"));
}

#[test]
fn sweep_writes_requested_columns() {
    let out = su11(&[
        "sweep",
        "--axis",
        "theta",
        "--lo",
        "0",
        "--hi",
        "3",
        "--steps",
        "4",
        "--metrics",
        "mean,visibility",
        "--n_i",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines = data_lines(&text);
    assert_eq!(lines[0], "theta,ts2_total,ti2_total,mean,visibility,error");
    assert_eq!(lines.len(), 5);
    assert!(text.contains("#   n_i = 2.0"));
}

#[test]
fn error_rows_exit_three_but_keep_rows() {
    let out = su11(&[
        "sweep",
        "--axis",
        "t_s2",
        "--lo",
        "0",
        "--hi",
        "1",
        "--steps",
        "3",
        "--g1",
        "0",
        "--g2",
        "0",
        "--metrics",
        "visibility",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(data_lines(&stdout(&out)).len(), 4);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "g1 = 0.45\ng2 = 0.2\nn_i = 10000.0\naxis = \"t_s2\"\nlo = 0.1\nhi = 1.0\nsteps = 5\nbase_ts2 = 0.52\nbase_ti2 = 0.42\nmetrics = [\"visibility\"]\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = su11(&["sweep", "--config", cfg]);
    assert_eq!(from_file.status.code(), Some(0));
    let flags = su11(&[
        "sweep",
        "--g1",
        "0.45",
        "--g2",
        "0.2",
        "--n_i",
        "10000",
        "--axis",
        "t_s2",
        "--lo",
        "0.1",
        "--hi",
        "1",
        "--steps",
        "5",
        "--base_ts2",
        "0.52",
        "--base_ti2",
        "0.42",
        "--metrics",
        "visibility",
    ]);
    assert_eq!(from_file.stdout, flags.stdout);

    let overridden = su11(&[
        "sweep",
        "--config",
        cfg,
        "--steps",
        "7",
        "--axis-total",
        "--hi",
        "0.5",
    ]);
    assert_eq!(overridden.status.code(), Some(0));
    let text = stdout(&overridden);
    assert_eq!(data_lines(&text).len(), 8);
    assert!(text.contains("total transmission"));
}

#[test]
fn print_config_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--axis",
        "n_i",
        "--lo",
        "0",
        "--hi",
        "4",
        "--steps",
        "5",
        "--ti2",
        "0.3",
        "--metrics",
        "mean,dtheta2",
    ];
    let printed = su11(&[&args[..], &["--print-config"]].concat());
    let path = dir.path().join("printed.toml");
    fs::write(&path, &printed.stdout).unwrap();
    let direct = su11(&args);
    let via_file = su11(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(direct.stdout, via_file.stdout);
}

#[test]
fn csv_and_json_mirror_agree() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let json = dir.path().join("out.json");
    let out = su11(&[
        "sweep",
        "--axis",
        "G2",
        "--lo",
        "0.05",
        "--hi",
        "0.2",
        "--steps",
        "3",
        "--metrics",
        "mean",
        "-o",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(csv).unwrap();
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    let rows = data_lines(&csv);
    let header: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(json["columns"].as_array().unwrap().len(), header.len());
    for (line, obj) in rows[1..].iter().zip(json["rows"].as_array().unwrap()) {
        let mean: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(obj["mean"].as_f64().unwrap(), mean);
    }
}

#[test]
fn figure_writes_data_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = su11(&[
        "figure",
        "fig4b",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for ext in ["csv", "gp", "json"] {
        assert!(dir.path().join(format!("fig4b.{ext}")).exists(), "{ext}");
    }
    let csv = fs::read_to_string(dir.path().join("fig4b.csv")).unwrap();
    assert!(csv.contains("spontaneous,") && csv.contains("stimulated,"));
    let script = fs::read_to_string(dir.path().join("fig4b.gp")).unwrap();
    assert!(script.contains("fig4b.csv"));
}

#[test]
fn thread_count_does_not_change_bytes() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_su11"))
            .args([
                "sweep",
                "--axis",
                "t_i2",
                "--lo",
                "0.1",
                "--hi",
                "1",
                "--steps",
                "16",
                "--metrics",
                "visibility,db_vs_shotnoise",
            ])
            .env("SU11_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("0").stdout);
    assert_eq!(one.stdout, run("3").stdout);
    assert_eq!(run("many").status.code(), Some(1));
}

#[test]
fn sensitivity_reports_every_convention() {
    let out = su11(&["sensitivity", "--ti2", "0.75", "--n_i", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in ["after_opa1", "after_loss", "pairs"] {
        assert!(text.contains(name), "{name}");
    }
    let json = su11(&["sensitivity", "--snl_convention", "pairs", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 1);
}

#[test]
fn visibility_routes_agree() {
    let out = su11(&["visibility", "--ts2", "0.5", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let (a, b) = (
        v["closed_form"].as_f64().unwrap(),
        v["gaussian"].as_f64().unwrap(),
    );
    assert!((a - b).abs() < 1e-12);
    let singular = su11(&["visibility", "--g1", "0", "--g2", "0"]);
    assert_eq!(singular.status.code(), Some(1));
}

#[test]
fn validate_exit_codes() {
    let out = su11(&["validate", "--points", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let out = su11(&[
        "validate",
        "--seed",
        "7",
        "--points",
        "4",
        "--force-singular",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("skipped point 0"));
    assert_eq!(
        su11(&["validate", "--points", "20000"]).status.code(),
        Some(1)
    );
}
