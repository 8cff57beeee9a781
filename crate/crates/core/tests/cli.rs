use std::process::Command;

use serde_json::Value;

fn upsilon(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_upsilon"))
        .args(args)
        .env_remove("UPSILON_SEED")
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf-8"),
        String::from_utf8(out.stderr).expect("utf-8"),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text.trim()).expect("valid JSON")
}

#[test]
fn closed_form_values() {
    let (code, out, _) = upsilon(&["closed-form", "--channel", "gamma", "--d", "3", "--t", "0.2"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["upsilon2"].as_f64().unwrap() - 0.5773503).abs() < 1e-7);
    for key in ["d", "param", "a", "b", "upsilon2", "branch", "m", "eop2"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }

    let (_, out, _) = upsilon(&["closed-form", "--d", "2", "--t", "0.333333"]);
    assert!((json(&out)["upsilon2"].as_f64().unwrap() - 0.7071068).abs() < 1e-7);

    let (_, out, _) = upsilon(&["closed-form", "--channel", "delta", "--d", "2", "--p", "0"]);
    let v = json(&out);
    assert_eq!(v["upsilon2"].as_f64().unwrap(), 1.0);
    assert_eq!(v["eop2"].as_f64().unwrap(), 0.0);
}

#[test]
fn range_errors_name_the_cp_range() {
    let (code, _, err) = upsilon(&["closed-form", "--d", "2", "--t", "0.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("CP-range [-1, 0.3333333333333333]"), "{err}");
    let (code, _, _) = upsilon(&["optimize", "--d", "2", "--t", "-2"]);
    assert_eq!(code, 2);
    let (code, _, _) = upsilon(&["closed-form", "--channel", "delta", "--d", "2", "--t", "0.1"]);
    assert_eq!(code, 2);
    let (code, _, _) = upsilon(&["closed-form", "--channel", "nope", "--d", "2", "--t", "0.1"]);
    assert_eq!(code, 2);
}

#[test]
fn optimize_reports() {
    let (code, out, _) = upsilon(&["optimize", "--channel", "gamma", "--d", "2", "--t", "0.3333333333333333", "--seed", "3"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 0.70711).abs() < 1e-5);
    assert!(v["gap"].as_f64().unwrap().abs() <= 1e-5);
    assert_eq!(v["seed"].as_u64(), Some(3));

    let (code, out, _) =
        upsilon(&["optimize", "--channel", "gamma_c_adjoint", "--d", "2", "--t", "0.3333333333333333", "--restarts", "2"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!(v["value"].as_f64().unwrap() > 0.0);
    assert!(v.get("gap").is_none());

    let (code, _, err) = upsilon(&["optimize", "--d", "3", "--t", "0", "--n", "2", "--d-env", "16"]);
    assert_eq!(code, 2);
    assert!(err.contains("size guard"), "{err}");
}

#[test]
fn seed_falls_back_to_environment() {
    let run = |env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_upsilon"));
        cmd.args(["optimize", "--d", "2", "--t", "-0.2", "--restarts", "3"]);
        match env {
            Some(s) => cmd.env("UPSILON_SEED", s),
            None => cmd.env_remove("UPSILON_SEED"),
        };
        json(&String::from_utf8(cmd.output().unwrap().stdout).unwrap())
    };
    assert_eq!(run(Some("17"))["seed"].as_u64(), Some(17));
    assert_eq!(run(None)["seed"].as_u64(), Some(0));
}

#[test]
fn sweep_branch_switch_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let p = path.to_str().unwrap();
    let (code, _, _) = upsilon(&["sweep", "--channel", "gamma", "--d", "2", "--points", "15", "--out", p]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,param,a,b,upsilon2,branch,m,opt_value,gap,seed"));
    let rows: Vec<(f64, String)> = lines
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            assert_eq!(c.len(), 10);
            (c[1].parse().unwrap(), c[5].to_string())
        })
        .collect();
    assert_eq!(rows.len(), 15);
    let crossing = -(1.0f64 / 3.0).sqrt();
    for (t, branch) in &rows {
        let expected = if t * t > 1.0 / 3.0 { "entangled" } else { "marginal" };
        assert_eq!(branch, expected, "t = {t}");
    }
    assert!(rows.iter().any(|(t, _)| *t < crossing) && rows.iter().any(|(t, _)| *t > crossing));

    let (code, _, _) = upsilon(&["sweep", "--d", "2", "--grid", "", "--out", p]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "d,param,a,b,upsilon2,branch,m,opt_value,gap,seed\n");
}

#[test]
fn sweep_numbers_round_trip_and_constant_at_d3() {
    let (code, out, _) = upsilon(&["sweep", "--d", "3", "--points", "9"]);
    assert_eq!(code, 0);
    for line in out.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let v: f64 = cols[4].parse().unwrap();
        assert_eq!(v, (1.0f64 / 3.0).sqrt());
        // 17 significant digits: d.dddddddddddddddde±x
        let mantissa = cols[1].split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{}", cols[1]);
    }
}

#[test]
fn sweep_rejects_out_of_range_grid() {
    let (code, _, err) = upsilon(&["sweep", "--d", "2", "--grid", "0.1,0.9"]);
    assert_eq!(code, 2);
    assert!(err.contains("CP-range"));
}

#[test]
fn outputs_are_byte_identical() {
    let args = ["sweep", "--d", "2", "--grid", "-1,0", "--optimize", "--restarts", "2", "--seed", "5", "--format", "json"];
    let (_, a, _) = upsilon(&args);
    let (_, b, _) = upsilon(&args);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 2);
    let first = json(a.lines().next().unwrap());
    assert_eq!(first["seed"].as_u64(), Some(5));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("suite.cfg");
    std::fs::write(&config, "# small grid\nseed = 4\ndims = 2\nt_points = 2\ntrials = 5\noptimizer = false\nmultiplicativity =\n").unwrap();
    let c = config.to_str().unwrap();
    let out_path = dir.path().join("results.jsonl");
    let (code, _, _) = upsilon(&["verify", c, "--out", out_path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let last = json(text.lines().last().unwrap());
    assert_eq!(last["summary"]["all_passed"], Value::Bool(true));
    for line in text.lines().rev().skip(1) {
        let v = json(line);
        assert_eq!(v["passed"].as_bool().unwrap(), v["residual"].as_f64().unwrap() <= v["tolerance"].as_f64().unwrap());
        assert_eq!(v["worst_case_input_digest"].as_str().unwrap().len(), 64);
    }

    std::fs::write(&config, "dims = 2\nt_points = 2\ntrials = 5\noptimizer = false\nmultiplicativity =\ntolerance = 0\n").unwrap();
    let (code, out, _) = upsilon(&["verify", c]);
    assert_eq!(code, 1);
    assert!(out.contains("\"passed\":false"));

    let (code, _, _) = upsilon(&["verify", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(code, 2);

    std::fs::write(&config, "dims = two\n").unwrap();
    let (code, _, err) = upsilon(&["verify", c]);
    assert_eq!(code, 2);
    assert!(err.contains("line 1"));

    let (code, out, _) = upsilon(&["verify", "--manifest"]);
    assert_eq!(code, 0);
    assert!(out.lines().all(|l| json(l).get("statement").is_some()));
}

#[test]
fn verify_default_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("default.cfg");
    std::fs::write(&config, "").unwrap();
    let (code, out, _) = upsilon(&["verify", config.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
}
