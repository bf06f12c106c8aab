use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn starlike(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starlike"))
        .args(args)
        .env_remove("STARLIKE_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

/// `key=value` pairs of a text-format radius line.
fn fields(line: &str) -> BTreeMap<String, String> {
    line.split_whitespace().filter_map(|kv| kv.split_once('=')).map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn radius_rho(args: &[&str]) -> f64 {
    let out = starlike(args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    fields(&stdout(&out))["rho"].parse().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn radius_parabolic_k1() {
    let rho = radius_rho(&["radius", "--class", "K1", "--b", "-1", "--region", "parabolic"]);
    assert!((rho - 0.2021347).abs() < 1e-6, "{rho}");
}

#[test]
fn radius_order_half_k1() {
    let rho = radius_rho(&["radius", "--class", "K1", "--b", "-1", "--region", "order", "--alpha", "0.5"]);
    assert!((rho - 0.202135).abs() < 1e-5, "{rho}");
}

#[test]
fn radius_k3_origin_solves_sextic() {
    let r = radius_rho(&["radius", "--class", "K3", "--b", "0", "--c", "0", "--region", "order", "--alpha", "0"]);
    let r2 = r * r;
    let p = 1.0 - 7.0 * r2 - 9.0 * r2 * r2 - r2 * r2 * r2;
    assert!(p.abs() < 1e-7, "residual {p} at {r}");
    assert!(r > 0.0 && r < 1.0);
}

#[test]
fn radius_methods_agree() {
    let base = ["radius", "--class", "K2", "--b", "-1", "--c", "-1", "--region", "lune"];
    let poly = radius_rho(&base);
    let mut oracle = base.to_vec();
    oracle.extend(["--method", "margin-oracle"]);
    let margin = radius_rho(&oracle);
    assert!((poly - margin).abs() <= 1e-8);
}

#[test]
fn normalized_parameters_match_raw() {
    let raw = radius_rho(&["radius", "--class", "K2", "--b", "-1", "--c", "-1", "--region", "sigmoid"]);
    let norm = radius_rho(&["radius", "--class", "K2", "--p1", "2", "--p2", "2", "--region", "sigmoid"]);
    assert_eq!(raw, norm);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&starlike(&["radius", "--class", "K1", "--b", "-1"])), 1, "missing region");
    assert_eq!(code(&starlike(&["radius", "--class", "K7", "--b", "0", "--region", "lune"])), 1);
    assert_eq!(code(&starlike(&["radius", "--class", "K1", "--b", "x", "--region", "lune"])), 1);
    assert_eq!(code(&starlike(&["radius", "--class", "K1", "--b", "1.5", "--region", "lune"])), 2);
    assert_eq!(code(&starlike(&["radius", "--class", "K2", "--b", "1", "--c", "-1", "--region", "lune"])), 2);
    assert_eq!(code(&starlike(&["radius", "--class", "K1", "--b", "0", "--region", "order", "--alpha", "1"])), 2);
    assert_eq!(code(&starlike(&["radius", "--class", "K1", "--b", "0", "--region", "lune", "--alpha", "0.5"])), 2);
    assert_eq!(code(&starlike(&["--help"])), 0);
}

#[test]
fn thread_variable_must_be_positive() {
    let out = Command::new(env!("CARGO_BIN_EXE_starlike"))
        .args(["radius", "--class", "K1", "--b", "0", "--region", "lune"])
        .env("STARLIKE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn k1_sweep_has_ninety_sorted_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k1.csv");
    let out = starlike(&["table", "--class", "K1", "--b", "-1:1:0.25", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("class,b,c,p1,p2,region,alpha,rho,residual,method,sharp\n"));
    assert!(!text.contains('\r'));
    let (header, rows) = read_csv(&path);
    assert_eq!(rows.len(), 90);
    let b = col(&header, "b");
    let bs: Vec<f64> = rows.iter().map(|r| r[b].parse().unwrap()).collect();
    assert!(bs.windows(2).all(|w| w[0] <= w[1]));
    for row in &rows {
        assert!(row[col(&header, "c")].is_empty());
        for name in ["class", "b", "p1", "p2", "region", "rho", "residual", "method"] {
            assert!(!row[col(&header, name)].is_empty(), "{name} empty");
        }
    }
}

#[test]
fn table_row_matches_radius_row() {
    let table = stdout(&starlike(&["table", "--class", "K1", "--b", "0", "--regions", "parabolic"]));
    let radius =
        stdout(&starlike(&["radius", "--class", "K1", "--b", "0", "--region", "parabolic", "--format", "csv"]));
    assert_eq!(table, radius);
}

#[test]
fn lune_row_for_extreme_k2() {
    let out = stdout(&starlike(&["table", "--class", "K2", "--b", "-1", "--c", "-1", "--regions", "lune"]));
    let row = out.lines().nth(1).unwrap();
    let rho: f64 = row.split(',').nth(7).unwrap().parse().unwrap();
    assert!((rho - 0.134993).abs() < 1e-5, "{rho}");
}

#[test]
fn printed_rho_round_trips() {
    let out = stdout(&starlike(&["table", "--class", "K2", "--b", "-1,0.5", "--c", "-1,0", "--skip-invalid"]));
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let records: Vec<_> = rdr.records().collect();
    assert_eq!(records.len(), 20);
    for rec in records {
        let printed = rec.unwrap()[7].to_string();
        let value: f64 = printed.parse().unwrap();
        let digits =
            |s: &str| s.chars().filter(|c| c.is_ascii_digit()).collect::<String>().trim_start_matches('0').to_string();
        let reprinted = format!("{value:.8e}");
        let mantissa = reprinted.split('e').next().unwrap();
        assert_eq!(digits(&printed), digits(mantissa), "{printed}");
    }
}

#[test]
fn invalid_combinations_fail_unless_skipped() {
    let args = ["table", "--class", "K2", "--b", "1", "--c", "-1,1", "--regions", "lune"];
    assert_eq!(code(&starlike(&args)), 2);
    let mut skip = args.to_vec();
    skip.push("--skip-invalid");
    let out = starlike(&skip);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn json_mirrors_csv() {
    let grid =
        ["table", "--class", "K1,K2", "--b", "-1,0.5", "--c", "-1", "--regions", "order,lune,sine", "--skip-invalid"];
    let csv_out = stdout(&starlike(&grid));
    let mut json_args = grid.to_vec();
    json_args.extend(["--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&starlike(&json_args))).unwrap();
    let rows = json.as_array().unwrap();

    let mut rdr = csv::Reader::from_reader(csv_out.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    let records: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), rows.len());
    for (rec, obj) in records.iter().zip(rows) {
        let obj = obj.as_object().unwrap();
        assert_eq!(obj.keys().collect::<Vec<_>>(), {
            let mut h: Vec<&String> = header.iter().collect();
            h.sort();
            h
        });
        for (name, field) in header.iter().zip(rec.iter()) {
            let v = &obj[name];
            match v {
                serde_json::Value::Null => assert!(field.is_empty(), "{name}"),
                serde_json::Value::Number(n) => {
                    assert_eq!(n.as_f64().unwrap(), field.parse::<f64>().unwrap(), "{name}")
                }
                serde_json::Value::Bool(b) => assert_eq!(b.to_string(), field),
                serde_json::Value::String(s) => assert_eq!(s, field),
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["table", "--class", "K3", "--b", "-1:1:0.5", "--c", "-1:1:1", "--skip-invalid"];
    let first = starlike(&args).stdout;
    let again =
        Command::new(env!("CARGO_BIN_EXE_starlike")).args(args).env("STARLIKE_THREADS", "3").output().unwrap().stdout;
    assert!(String::from_utf8_lossy(&first).lines().count() > 10);
    assert_eq!(first, again);
}

#[test]
fn unwritable_output_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("t.csv");
    let out = starlike(&["table", "--class", "K1", "--b", "0", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(!path.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn default_verification_passes_and_tamper_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.csv");
    let out = starlike(&["verify", "--out", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let (header, rows) = read_csv(&report);
    assert!(rows.iter().all(|r| r[col(&header, "oracle")] == "true"));

    let out = starlike(&["verify", "--tamper", "K3-S-P:c2:+0.1"]);
    assert_eq!(code(&out), 4);
    let text = stdout(&out);
    let failing: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|l| l.contains("K3-S-P ")), "{failing:?}");
}

#[test]
fn lemma_run_has_no_violation() {
    let out = starlike(&["verify", "--lemma", "--b", "1", "--alpha", "0", "--trials", "10000", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let max: f64 = text.rsplit("max slack ").next().unwrap().trim().parse().unwrap();
    assert!(max >= 0.0);
}

fn plot(dir: &Path, args: &[&str]) -> Output {
    let mut full = vec!["plot-data", "--out-dir", dir.to_str().unwrap()];
    full.extend_from_slice(args);
    starlike(&full)
}

fn touch_w(dir: &Path) -> (f64, f64, f64) {
    let (header, rows) = read_csv(&dir.join("touch.csv"));
    let get = |n: &str| rows[0][col(&header, n)].parse::<f64>().unwrap();
    (get("u"), get("v"), get("rho"))
}

#[test]
fn parabolic_touch_lies_on_parabola() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&plot(dir.path(), &["--class", "K1", "--b", "-1", "--region", "parabolic"])), 0);
    let (u, v, _) = touch_w(dir.path());
    assert!((u - ((u - 1.0).powi(2) + v * v).sqrt()).abs() < 1e-6);
    for name in ["boundary.csv", "image.csv"] {
        let (header, rows) = read_csv(&dir.path().join(name));
        assert_eq!(header, ["theta", "u", "v"]);
        assert_eq!(rows.first().map(|r| &r[1..]), rows.last().map(|r| &r[1..]));
    }
}

#[test]
fn lemniscate_touch_at_sqrt_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&plot(dir.path(), &["--class", "K1", "--b", "-1", "--region", "lemniscate"])), 0);
    let (u, v, _) = touch_w(dir.path());
    assert!((u - 2f64.sqrt()).abs() < 1e-6 && v.abs() < 1e-6, "{u} {v}");
}

#[test]
fn region_only_nephroid_crosses_real_axis_at_five_thirds_and_one_third() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&plot(dir.path(), &["--region", "nephroid", "--samples", "64"])), 0);
    assert!(!dir.path().join("image.csv").exists());
    let (_, rows) = read_csv(&dir.path().join("boundary.csv"));
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap())).collect();
    let near = |x: f64| pts.iter().any(|(u, v)| (u - x).abs() < 1e-8 && v.abs() < 1e-8);
    assert!(near(5.0 / 3.0) && near(1.0 / 3.0));
    assert_eq!(pts.first(), pts.last());
}

#[test]
fn k3_overlay_is_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    let out = plot(dir.path(), &["--class", "K3", "--b", "0", "--c", "0", "--region", "lune"]);
    assert_eq!(code(&out), 2);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}
