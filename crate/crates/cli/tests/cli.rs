use std::fs;
use std::process::{Command, Output};

use conformal_isometry::{build_isometry, parse, ComplexValue, ConstructionConfig, Grid2D, Point};
use serde_json::Value;

fn confiso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confiso"))
        .args(args)
        .output()
        .expect("failed to run confiso")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.lines().last().expect("stderr is empty")).expect("stderr is JSON")
}

fn grid_of(v: &Value) -> Grid2D {
    Grid2D::new(
        Point::new(
            v["origin"][0].as_f64().unwrap(),
            v["origin"][1].as_f64().unwrap(),
        ),
        v["step"].as_f64().unwrap(),
        v["nx"].as_u64().unwrap() as usize,
        v["ny"].as_u64().unwrap() as usize,
    )
}

fn values(v: &Value) -> Vec<f64> {
    v["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn linear_example_gives_identity_coordinates() {
    let out = confiso(&["construct", "--f", "z", "--grid", "5x5", "--span", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let grid = grid_of(&doc["grids"]["Phi"]);
    assert_eq!((grid.nx, grid.ny), (5, 5));
    for (k, p) in grid.points().enumerate() {
        assert!((values(&doc["grids"]["Phi"])[k] - p.x).abs() <= 1e-9);
        assert!((values(&doc["grids"]["Psi"])[k] - p.y).abs() <= 1e-9);
    }
    assert_eq!(doc["meta"]["C"], serde_json::json!([1.0, 0.0]));
    assert_eq!(doc["meta"]["expression"], "z");
}

#[test]
fn zero_exponent_gives_translation() {
    let doc = stdout_json(&confiso(&["construct", "--f", "0", "--grid", "7x5"]));
    let grid = grid_of(&doc["grids"]["W1"]);
    let (w1, w2) = (values(&doc["grids"]["W1"]), values(&doc["grids"]["W2"]));
    for (k, p) in grid.points().enumerate() {
        assert!((w1[k] - (p.x + 1.0)).abs() <= 1e-12);
        assert!((w2[k] - p.y).abs() <= 1e-12);
    }
}

#[test]
fn json_grids_round_trip_exactly() {
    let doc = stdout_json(&confiso(&[
        "construct",
        "--f",
        "sin(z)/2",
        "--z0",
        "0.1,-0.2",
        "--grid",
        "9x7",
    ]));
    let cfg = ConstructionConfig {
        basepoint: ComplexValue::new(0.1, -0.2),
        ..Default::default()
    };
    let res = build_isometry(&parse("sin(z)/2").unwrap(), &cfg).unwrap();
    assert_eq!(doc["meta"]["radius"].as_f64().unwrap(), res.domain().radius);
    let grid = grid_of(&doc["grids"]["Phi"]);
    assert_eq!(grid, res.domain_grid(9, 7, 0.0).unwrap());
    let (phi, w1) = (values(&doc["grids"]["Phi"]), values(&doc["grids"]["W1"]));
    for (k, p) in grid.points().enumerate() {
        assert_eq!(phi[k], res.phi(p).unwrap());
        assert_eq!(w1[k], res.w(p).unwrap().x);
    }
}

#[test]
fn malformed_expression_exits_two_with_error_object() {
    for bad in ["z^^", "z +", "log(z)", "2^z"] {
        let out = confiso(&["construct", "--f", bad]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
        assert!(out.stdout.is_empty());
        let err = stderr_json(&out);
        assert_eq!(err["error"]["kind"], "parse", "{bad}");
        assert!(err["error"]["offset"].is_u64());
    }
    assert_eq!(
        stderr_json(&confiso(&["construct", "--f", "z^^"]))["error"]["offset"],
        2
    );
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["construct"][..],
        &["construct", "--f", "z", "--grid", "2x2"],
        &["nonsense"],
    ] {
        let out = confiso(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr_json(&out)["error"]["kind"], "usage");
    }
    assert_eq!(confiso(&["--help"]).status.code(), Some(0));
}

#[test]
fn runaway_growth_exits_three() {
    let out = confiso(&["construct", "--f", "40 + z"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"]["kind"], "domain");
}

#[test]
fn unwritable_output_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.json");
    let out = confiso(&["construct", "--f", "z", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"]["kind"], "io");
}

#[test]
fn failing_report_exits_five() {
    let out = confiso(&["verify", "--f", "z^2/4", "--tol-pullback", "1e-15"]);
    assert_eq!(out.status.code(), Some(5));
    let doc = stdout_json(&out);
    let pullback = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "pullback")
        .unwrap();
    assert_eq!(pullback["pass"], false);
}

#[test]
fn verify_reports_in_order() {
    let out = confiso(&["verify", "--f", "0", "--grid", "11x11"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let names: Vec<&str> = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "lemma1_identity",
            "dual_route",
            "cr_residual",
            "pullback",
            "harmonicity_phi",
            "harmonicity_psi",
            "curvature_flat"
        ]
    );
    for r in doc["reports"].as_array().unwrap() {
        let residual = r["max_abs_residual"].as_f64().unwrap();
        let limit = match r["name"].as_str().unwrap() {
            "lemma1_identity" | "dual_route" => 1e-10,
            _ => 1e-6,
        };
        assert!(residual <= limit, "{r}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &["verify", "--f", "sin(z)/2"][..],
        &["construct", "--f", "z^2/4", "--grid", "13x9"],
        &["embed", "--preset", "gaussian"],
        &["curvature", "--preset", "sphere"],
    ] {
        assert_eq!(confiso(args).stdout, confiso(args).stdout, "{args:?}");
    }
}

#[test]
fn oversized_span_is_shrunk_with_warning() {
    let out = confiso(&["construct", "--f", "z", "--grid", "5x5", "--span", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let warning = stderr_json(&out);
    assert!(warning["warning"].as_str().unwrap().contains("span"));
    let doc = stdout_json(&out);
    let grid = grid_of(&doc["grids"]["Phi"]);
    assert!(grid.half_diagonal() <= doc["meta"]["radius"].as_f64().unwrap());
}

#[test]
fn csv_directory_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run");
    let out = confiso(&[
        "construct",
        "--f",
        "z",
        "--grid",
        "3x4",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let w = fs::read_to_string(path.join("W.csv")).unwrap();
    let mut lines = w.lines();
    assert_eq!(lines.next(), Some("x,y,w1,w2"));
    assert_eq!(lines.count(), 12);
    let phi = fs::read_to_string(path.join("Phi.csv")).unwrap();
    assert!(phi.starts_with("x,y,value\n"));
    for line in phi.lines().skip(1) {
        let row: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((row[2] - row[0]).abs() <= 1e-9);
    }
    let meta: Value =
        serde_json::from_str(&fs::read_to_string(path.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "construct");
}

#[test]
fn embed_presets() {
    let doc = stdout_json(&confiso(&["embed", "--preset", "gaussian"]));
    for side in doc["meta"]["sides"].as_array().unwrap() {
        assert!((side.as_f64().unwrap() - 1.7724539).abs() <= 1e-7);
    }
    let doc = stdout_json(&confiso(&[
        "embed",
        "--preset",
        "zero",
        "--x-range",
        "0,1",
        "--y-range",
        "0,1",
    ]));
    for side in doc["meta"]["sides"].as_array().unwrap() {
        assert!((side.as_f64().unwrap() - 1.0).abs() <= 1e-15);
    }
    let out = confiso(&["embed", "--preset", "zero"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_json(&out)["meta"]["sides"],
        serde_json::json!(["unbounded", "unbounded"])
    );
    let doc = stdout_json(&confiso(&[
        "embed",
        "--preset",
        "exp-decay",
        "--x-range",
        "0,inf",
        "--y-range",
        "0,inf",
    ]));
    for side in doc["meta"]["sides"].as_array().unwrap() {
        assert!((side.as_f64().unwrap() - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn curvature_of_sphere_and_flat_metric() {
    let doc = stdout_json(&confiso(&[
        "curvature",
        "--preset",
        "sphere",
        "--grid",
        "5x5",
        "--span",
        "3",
    ]));
    for k in values(&doc["grids"]["K"]) {
        assert!((k - 1.0).abs() <= 1e-4);
    }
    for sign in ["classical", "positive"] {
        let doc = stdout_json(&confiso(&[
            "curvature",
            "--f",
            "z^3 - sin(z)",
            "--sign",
            sign,
        ]));
        for k in values(&doc["grids"]["K"]) {
            assert!(k.abs() <= 1e-5);
        }
    }
    let doc = stdout_json(&confiso(&["curvature", "--f", "0", "--k0", "-2"]));
    assert!(values(&doc["grids"]["K"]).iter().all(|&k| k == -2.0));
}
