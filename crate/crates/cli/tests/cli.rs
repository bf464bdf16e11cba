use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> (i32, Value, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_diraclab"));
    cmd.args(args).env_remove("DIRACLAB_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output { status, stdout, .. } = cmd.output().expect("binary runs");
    let text = String::from_utf8(stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {text}"));
    (status.code().unwrap(), v, text)
}

fn run(args: &[&str]) -> (i32, Value) {
    let (c, v, _) = run_env(args, &[]);
    (c, v)
}

fn criterion<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no criterion {name} in {v}"))
}

/// Structural schema of every report.
fn assert_schema(v: &Value) {
    assert_eq!(v["schema"], "diraclab.report/v1");
    assert!(v["command"].is_array());
    assert!(v["seed"].is_u64());
    let status = v["status"].as_str().unwrap();
    assert!(["pass", "fail", "error"].contains(&status));
    let crits = v["criteria"].as_array().unwrap();
    for c in crits {
        let s = c["status"].as_str().unwrap();
        let r = &c["max_residual"];
        match r.as_str() {
            Some(marker) => {
                assert!(marker == "exact-zero" || marker == "exact-nonzero");
                assert_eq!(s == "pass", marker == "exact-zero");
                assert!(c["tolerance"].is_null());
            }
            None => {
                let tol = c["tolerance"].as_f64().unwrap();
                let pass = r.as_f64().map(|x| x <= tol).unwrap_or(false);
                assert_eq!(s == "pass", pass, "{c}");
            }
        }
        assert!(c.get("worst_point").is_some());
    }
    if status == "error" {
        assert!(v["error"].is_string());
    } else {
        let all = crits.iter().all(|c| c["status"] == "pass");
        assert_eq!(status == "pass", all);
    }
}

#[test]
fn constant_bivector_is_poisson_exactly() {
    let (code, v) = run(&["poisson", "check", "--file", &data("constant.json")]);
    assert_schema(&v);
    assert_eq!(code, 0);
    assert_eq!(criterion(&v, "jacobiator")["max_residual"], "exact-zero");
}

#[test]
fn non_poisson_bivector_names_the_component() {
    let (code, v) = run(&["poisson", "check", "--file", &data("nonpoisson3d.json")]);
    assert_schema(&v);
    assert_eq!(code, 1);
    let w = criterion(&v, "jacobiator")["witness"].as_str().unwrap();
    assert!(w.contains("Υ(1,2,3) = -x3"), "{w}");
    let (code, v) = run(&["poisson", "jacobiator", "--file", &data("nonpoisson3d.json")]);
    assert_eq!(code, 1);
    assert_eq!(v["data"]["jacobiator"]["degree"], 3);
}

#[test]
fn input_errors_exit_two_with_a_report() {
    let (code, v) = run(&["poisson", "check", "--file", &data("malformed.json")]);
    assert_schema(&v);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("malformed.json:6:"));
    let (code, v) = run(&["poisson", "check", "--file", &data("does-not-exist.json")]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("cannot read"));
    let (code, v) = run(&["poisson", "leaf", "--file", &data("xdxdy.json"), "--point", "1,2,3"]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("2 coordinates"));
    let (code, v) = run(&["manin", "check"]);
    assert_schema(&v);
    assert_eq!(code, 2);
    let (code, v) = run(&["manin", "check", "--builtin", "nope"]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("iwasawa_su2"));
}

#[test]
fn bracket_and_leaf() {
    let (code, v) = run(&["poisson", "bracket", "--file", &data("so3.json"), "--f", &data("f_x.json"), "--g", &data("g_y.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["text"], "x3");
    let (_, v) = run(&["poisson", "leaf", "--file", &data("xdxdy.json"), "--point", "1,0"]);
    assert_eq!(v["data"]["rank"], 2);
    let (_, v) = run(&["poisson", "leaf", "--file", &data("xdxdy.json"), "--point", "0,0.3"]);
    assert_eq!(v["data"]["rank"], 0);
}

#[test]
fn realization_of_x_dx_dy() {
    let args = ["realize", "--poisson", &data("xdxdy.json"), "--samples", "20", "--radius", "0.2"];
    let (code, v, first) = run_env(&args, &[]);
    assert_schema(&v);
    assert_eq!(code, 0, "{v}");
    for name in ["flows_admissible", "poisson_maps", "orthogonality", "dirac_condition"] {
        assert_eq!(criterion(&v, name)["status"], "pass");
    }
    assert_eq!(criterion(&v, "poisson_maps")["samples"], 20);
    // byte-identical across runs and thread counts
    let (_, _, again) = run_env(&args, &[("DIRACLAB_THREADS", "1")]);
    assert_eq!(first, again);
    let mut seeded = args.to_vec();
    seeded.extend(["--seed", "7"]);
    let (_, v7) = run(&seeded);
    assert_eq!(v7["seed"], 7);
    assert_ne!(criterion(&v7, "poisson_maps")["worst_point"], criterion(&v, "poisson_maps")["worst_point"]);
}

#[test]
fn report_file_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let out_s = out.display().to_string();
    let (_, v, text) = run_env(&["poisson", "check", "--file", &data("constant.json"), "--report", &out_s], &[]);
    assert!(v.get("wall_time").is_none());
    assert_eq!(std::fs::read_to_string(&out).unwrap().trim_end(), text.trim_end());
    let (_, v) = run(&["poisson", "check", "--file", &data("constant.json"), "--timing"]);
    assert!(v["wall_time"].is_f64());
}

#[test]
fn bad_thread_count_is_an_input_error() {
    let (code, v, _) = run_env(&["poisson", "check", "--file", &data("constant.json")], &[("DIRACLAB_THREADS", "many")]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("DIRACLAB_THREADS"));
}

#[test]
fn tolerance_override() {
    let (code, v) = run(&["linearize", "--field", &data("euler_like.json"), "--tol", "1e-30"]);
    assert_eq!(code, 1);
    let tol = criterion(&v, "conjugation")["tolerance"].as_f64().unwrap();
    assert!((tol / 1e-30 - 1.0).abs() < 1e-12);
}

#[test]
fn dirac_commands() {
    let (code, v) = run(&["dirac", "check-integrability", "--frame", &data("graph_xdxdy.json")]);
    assert_schema(&v);
    assert_eq!(code, 0);
    let (code, v) = run(&["dirac", "check-integrability", "--frame", &data("graph_nonclosed.json")]);
    assert_eq!(code, 1);
    assert!(criterion(&v, "integrability")["witness"].as_str().unwrap().contains("σ1, σ2, σ3"));

    let (code, v) = run(&["dirac", "gauge", "--poisson", &data("standard.json"), "--omega", &data("omega_half.json"), "--point", "0.1,0.2"]);
    assert_eq!(code, 0, "{v}");
    // (1 − c)⁻¹ with c = ½
    assert!((v["data"]["gauged"][0][1].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(criterion(&v, "gauged_is_poisson")["status"], "pass");
    let (code, v) = run(&["dirac", "gauge", "--poisson", &data("standard.json"), "--omega", &data("omega_one.json"), "--point", "0,0"]);
    assert_eq!(code, 1);
    assert_eq!(criterion(&v, "transversality")["status"], "fail");

    let (code, _) = run(&["dirac", "poisson-map", "--map", &data("swap.json"), "--source", &data("standard.json"), "--target", &data("standard.json")]);
    assert_eq!(code, 1);
    let (code, _) = run(&["dirac", "poisson-map", "--map", &data("swap.json"), "--source", &data("standard.json"), "--target", &data("standard.json"), "--anti"]);
    assert_eq!(code, 0);

    let (code, v) = run(&["dirac", "pullback", "--frame", &data("graph_xdxdy.json"), "--map", &data("curve.json"), "--point", "0.4"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["data"]["fiber"].as_array().unwrap().len(), 2);
}

#[test]
fn moser_and_linearize() {
    let (code, v) = run(&["moser", "--poisson", &data("standard.json"), "--family", &data("moser_family.json"), "--time", "0.5"]);
    assert_schema(&v);
    assert_eq!(code, 0, "{v}");
    let (code, v) = run(&["linearize", "--field", &data("euler_like.json"), "--radius", "0.3"]);
    assert_eq!(code, 0, "{v}");
    assert!(criterion(&v, "conjugation")["max_residual"].as_f64().unwrap() < 1e-5);
}

#[test]
fn manin_commands_on_builtins() {
    for name in diraclab::maningroup::BUILTIN_NAMES {
        let (code, v) = run(&["manin", "check", "--builtin", name]);
        assert_schema(&v);
        assert_eq!(code, 0, "{name}");
    }
    let (code, v) = run(&["manin", "multiplicativity", "--builtin", "iwasawa_su2", "--pairs", "10"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(criterion(&v, "multiplicativity")["samples"], 10);
    let (code, v) = run(&["manin", "dressing", "--builtin", "iwasawa_su2", "--point", "0.1,0.2,0.3", "--zeta", "0,1,0,0,0,0"]);
    assert_eq!(code, 0);
    let lt: Vec<f64> = serde_json::from_value(v["data"]["left_trivialized"].clone()).unwrap();
    assert!((lt[1] - 1.0).abs() < 1e-12 && lt[0].abs() < 1e-12 && lt[2].abs() < 1e-12);
    let (code, v) = run(&["manin", "e-map", "--builtin", "iwasawa_su2", "--zeta1=0.2,0.1,-0.4,1,0.5,-0.3", "--zeta2=-0.5,0.7,0.3,0.2,-0.9,0.4"]);
    assert_schema(&v);
    assert_eq!(code, 0, "{v}");
    let (code, v) = run(&["manin", "homspace", "--builtin", "iwasawa_su2", "--data", &data("su2_torus.json")]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["data"]["connected_only"], true);
}

#[test]
fn manin_triple_from_file() {
    let b = diraclab::maningroup::builtin("iwasawa_su2").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let with_rep = dir.path().join("su2.json");
    std::fs::write(&with_rep, serde_json::to_string(&b.triple.to_json(Some("iwasawa_su2".into()))).unwrap()).unwrap();
    let plain = dir.path().join("su2_adjoint.json");
    std::fs::write(&plain, serde_json::to_string(&b.triple.to_json(None)).unwrap()).unwrap();
    let point = "--point=0.3,-0.1,0.2";
    let (c1, v1) = run(&["manin", "bivector", "--triple", &with_rep.display().to_string(), point]);
    let (c2, v2) = run(&["manin", "bivector", "--triple", &plain.display().to_string(), point]);
    assert_eq!((c1, c2), (0, 0));
    // both charts give the same Poisson structure
    let m = |v: &Value| -> Vec<Vec<f64>> { serde_json::from_value(v["data"]["chart"].clone()).unwrap() };
    for (r1, r2) in m(&v1).iter().zip(&m(&v2)) {
        for (a, b) in r1.iter().zip(r2) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
