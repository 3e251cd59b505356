use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tunnel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tunnel")).args(args).output().unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn times_width_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let o = tunnel(&[
        "times-width",
        "--u0",
        "12",
        "--eps",
        "6",
        "--l-min",
        "0",
        "--l-max",
        "20",
        "--steps",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&out);
    assert!(text.starts_with("# tool=tunnel "));
    assert!(text.contains("\nl,tau_g,tau_0,t_ph,t_free,tau_d_in,tau_d_out,hartman_limit\n"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], "0");
    let tau_g: f64 = rows[4][1].parse().unwrap();
    let limit: f64 = rows[4][7].parse().unwrap();
    assert!((tau_g - limit).abs() < 1e-8);
}

#[test]
fn output_is_deterministic() {
    let args = ["times-width", "--u0", "12", "--eps", "6", "--l-list", "0.5,1,2"];
    assert_eq!(tunnel(&args).stdout, tunnel(&args).stdout);
}

#[test]
fn equal_bounds_give_one_row() {
    let o = tunnel(&[
        "times-width",
        "--u0",
        "12",
        "--eps",
        "6",
        "--l-min",
        "3",
        "--l-max",
        "3",
    ]);
    assert!(o.status.success());
    assert_eq!(data_rows(&String::from_utf8_lossy(&o.stdout)).len(), 1);
}

#[test]
fn times_energy_reports_crossing() {
    let o = tunnel(&[
        "times-energy",
        "--u0",
        "8",
        "--l",
        "6.32",
        "--eps-min",
        "7.5",
        "--eps-max",
        "7.9999",
        "--steps",
        "50",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    let line = text.lines().find(|l| l.starts_with("# crossing_eps=")).unwrap();
    let root: f64 = line.trim_start_matches("# crossing_eps=").parse().unwrap();
    assert!(root > 7.7 && root < 8.0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "u0 = 12.0\neps = 3.0\nl_list = [1.0, 2.0]\n").unwrap();
    let o = tunnel(&["times-width", "--config", cfg.to_str().unwrap(), "--eps", "6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("# eps=6\n"));
    assert_eq!(data_rows(&text).len(), 2);

    fs::write(&cfg, "u0 = 12.0\nbogus = 1\n").unwrap();
    let o = tunnel(&[
        "times-width",
        "--config",
        cfg.to_str().unwrap(),
        "--eps",
        "6",
        "--l",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validation_errors_exit_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.csv");
    let o = tunnel(&[
        "times-width",
        "--u0",
        "12",
        "--eps",
        "12.5",
        "--l",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert!(!out.exists());
    assert_eq!(
        tunnel(&[
            "times-width",
            "--u0",
            "12",
            "--eps",
            "6",
            "--l-min",
            "2",
            "--l-max",
            "1"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(tunnel(&["nope"]).status.code(), Some(1));
    assert_eq!(tunnel(&["--help"]).status.code(), Some(0));
    assert_eq!(tunnel(&["--version"]).status.code(), Some(0));
}

#[test]
fn packet_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pk.csv");
    let o = tunnel(&[
        "packet",
        "--u0",
        "31.4",
        "--p",
        "3.6",
        "--b",
        "2",
        "--l-list",
        "1,2",
        "--out",
        out.to_str().unwrap(),
        "--dump-series",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let arr = read(&out);
    assert!(arr.contains("\nl,t_arr,t_arr_minus_tin,captured_weight\n"));
    let rows = data_rows(&arr);
    let t: f64 = rows[0][1].parse().unwrap();
    assert!((t - 0.454005).abs() < 1e-5);
    let mean = read(&dir.path().join("pk_mean.csv"));
    assert_eq!(data_rows(&mean).len(), 2);
    assert!(dir.path().join("pk_series_l1.csv").exists());
    assert!(dir.path().join("pk_series_l2.csv").exists());
}

#[test]
fn packet_row_failure_exits_two_with_nan_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pk.csv");
    // a mean window capped at the first window cannot absorb the slow tail
    let o = tunnel(&[
        "packet",
        "--u0",
        "31.4",
        "--p",
        "3.6",
        "--b",
        "2",
        "--l",
        "6",
        "--mean-cap",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let mean = read(&dir.path().join("pk_mean.csv"));
    assert_eq!(data_rows(&mean)[0][1], "NaN");
    assert!(mean.lines().any(|l| l.starts_with("# error l=6:")));
    // the arrival row is still good
    assert_ne!(data_rows(&read(&out))[0][1], "NaN");
}

#[test]
fn spectrum_rows_and_flags() {
    let o = tunnel(&[
        "spectrum", "--u0", "12", "--eps", "11.8", "--l-list", "1,16,24", "--n-k", "101",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("\nl,W_plus,W_minus,ratio,W_excess,parseval,flags\n"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[6] == "ok"));
    let ratio: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(ratio[0] < ratio[1] && ratio[1] <= ratio[2]);

    let low = tunnel(&[
        "spectrum", "--u0", "12", "--eps", "11.8", "--l", "1", "--k-max", "5", "--n-k", "11",
    ]);
    assert!(data_rows(&String::from_utf8_lossy(&low.stdout))[0][6].contains("k_max_low"));
}
