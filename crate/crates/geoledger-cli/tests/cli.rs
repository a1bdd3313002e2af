use std::process::{Command, Output};

fn geoledger(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoledger"))
        .args(args)
        .env_remove("GEOLEDGER_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn local_poly_examples() {
    let o = geoledger(&["local-poly", "--q", "2", "--l", "1", "--type", "unr", "--check", "rh"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "rh: pass"));
    let o = geoledger(&["local-poly", "--q", "4", "--l", "1", "--n", "1", "--type", "unr", "--check", "rh"]);
    assert!(stdout(&o).lines().any(|l| l == "rh: FAIL"));
    let o = geoledger(&["local-poly", "--q", "3", "--l", "0"]);
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn local_poly_rejects_non_prime_power() {
    assert_eq!(geoledger(&["local-poly", "--q", "6", "--l", "1"]).status.code(), Some(2));
    assert_eq!(geoledger(&["local-poly", "--q", "3", "--l", "1", "--check", "zz"]).status.code(), Some(2));
}

#[test]
fn psi_summary_has_ratio() {
    let o = geoledger(&["psi", "--ring", "q", "--subgroup", "full", "--x", "10000", "--threads", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == "ratio").unwrap();
    let ratio: f64 = row[idx].parse().unwrap();
    assert!((ratio - 1.0).abs() < 0.15);
}

#[test]
fn psi_gaussian_traces_csv() {
    let o = geoledger(&["psi", "--ring", "qi", "--subgroup", "principal", "--level", "1+i", "--x", "50", "--traces"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("t_re,t_im,delta,D,l,L_value,term,cumulative\n"));
    assert!(text.lines().count() > 10);
}

#[test]
fn psi_exit_codes() {
    assert_eq!(geoledger(&["psi", "--ring", "q"]).status.code(), Some(2));
    assert_eq!(geoledger(&["psi", "--ring", "z7", "--x", "10"]).status.code(), Some(2));
    assert_eq!(geoledger(&["psi", "--x", "10", "--subgroup", "borel"]).status.code(), Some(2));
    assert_eq!(geoledger(&["psi", "--x", "100", "--subgroup", "hecke", "--level", "3"]).status.code(), Some(3));
}

#[test]
fn json_complex_numbers() {
    let o = geoledger(&["zagier-l", "--delta", "5", "--s", "2", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let series = v["series"]["re"].as_f64().unwrap();
    let factored = v["factored"]["re"].as_f64().unwrap();
    assert!((series - factored).abs() < 1e-6);
    assert_eq!(v["series"]["im"].as_f64(), Some(0.0));
}

#[test]
fn zagier_pole_is_numeric_failure() {
    assert_eq!(geoledger(&["zagier-l", "--delta", "4", "--s", "1", "--method", "factored"]).status.code(), Some(3));
}

#[test]
fn expsum_and_counts() {
    let o = geoledger(&["expsum", "--q", "9", "--k", "1", "--n", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let m = (v["value"]["re"].as_f64().unwrap().powi(2) + v["value"]["im"].as_f64().unwrap().powi(2)).sqrt();
    assert!((m - 3.0).abs() < 1e-9);
    let o = geoledger(&["expsum", "--ring", "qi", "--q", "2+i", "--k", "0", "--n", "1+i"]);
    assert!(stdout(&o).contains(",closed_k0"));
    let o = geoledger(&["orbital-count", "--p", "3", "--type", "split", "--n", "2", "--l", "2", "--bruteforce"]);
    for line in stdout(&o).lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!((f[1], f[2]), (f[4], f[5]));
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = std::env::temp_dir().join(format!("geoledger-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "format = json\nthreads = 1\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let o = geoledger(&["weights", "--q", "3", "--r", "1", "--s", "0.3+1i", "--config", cfg_s]);
    assert!(serde_json::from_slice::<serde_json::Value>(&o.stdout).is_ok());
    let o = geoledger(&["weights", "--q", "3", "--r", "1", "--s", "0.3+1i", "--config", cfg_s, "--format", "csv"]);
    assert!(stdout(&o).starts_with("quantity,re,im\n"));
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(geoledger(&["weights", "--q", "3", "--r", "1", "--s", "1", "--config", cfg_s]).status.code(), Some(2));
    let out = dir.join("scan.csv");
    let o = geoledger(&["pgt-scan", "--x-max", "500", "--points", "3", "--output", out.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn thread_env_var_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_geoledger"))
        .args(["local-poly", "--q", "3", "--l", "0"])
        .env("GEOLEDGER_THREADS", "none")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_reproducible() {
    let args =
        ["pgt-scan", "--ring", "qi", "--subgroup", "principal", "--level", "1+i", "--x-max", "40", "--points", "5"];
    let single: Vec<&str> = args.iter().copied().chain(["--threads", "1"]).collect();
    let a = geoledger(&single);
    let b = geoledger(&single);
    assert_eq!(a.stdout, b.stdout);
    let multi: Vec<&str> = args.iter().copied().chain(["--threads", "4"]).collect();
    assert_eq!(geoledger(&multi).stdout, a.stdout);
}

#[test]
fn verify_subsets() {
    let o = geoledger(&["verify", "--only", "local-rh"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("PASS  2 local-rh"));
    assert!(text.lines().last().unwrap().starts_with("# timings:"));
    let o = geoledger(&["verify", "--only", "oracle-orbital", "--p", "3"]);
    assert!(o.status.success());
    assert_eq!(geoledger(&["verify", "--only", "oracle-orbital", "--p", "9"]).status.code(), Some(2));
    assert_eq!(geoledger(&["verify", "--only", "bogus"]).status.code(), Some(2));
}
