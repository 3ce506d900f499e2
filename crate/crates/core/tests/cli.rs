mod common;

use osmag_nav::model::{parse_osmag, write_osmag, AreaType, MapBuilder};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn navbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_navbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn gen_map(dir: &Path) -> String {
    let map = dir.join("campus.osm");
    let m = map.to_str().unwrap().to_string();
    let out = navbench(&[
        "gen-map",
        "--seed",
        "3",
        "--floors",
        "2",
        "--sectors",
        "1",
        "--rooms-per-side",
        "3",
        "-o",
        &m,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    m
}

fn pose_arg(map: &str, area: &str, level: &str) -> String {
    let g = parse_osmag(&std::fs::read_to_string(map).unwrap()).unwrap();
    let c = g.area_by_name(area).unwrap().polygon.centroid();
    format!("{},{},{level}", c.x, c.y)
}

#[test]
fn generated_map_validates() {
    let dir = tempfile::tempdir().unwrap();
    let map = gen_map(dir.path());
    let out = navbench(&["validate", &map]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ok"], Value::Bool(true));
}

#[test]
fn invalid_map_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut b = MapBuilder::new(31.0, 121.0);
    b.area(
        "a",
        AreaType::Room,
        &common::rect(0.0, 0.0, 5.0, 5.0),
        None,
        Some("1"),
    );
    b.passage(
        "door",
        &[
            osmag_nav::geometry::Point2D::new(5.0, 1.0),
            osmag_nav::geometry::Point2D::new(5.0, 2.0),
        ],
        "a",
        "missing",
        Some("1"),
    );
    let path = dir.path().join("bad.osm");
    std::fs::write(&path, write_osmag(&b.build().unwrap())).unwrap();
    let out = navbench(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["ok"], Value::Bool(false));
}

#[test]
fn exit_codes_for_io_and_usage() {
    assert_eq!(
        navbench(&["validate", "/nonexistent/map.osm"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(navbench(&[]).status.code(), Some(1));
    assert_eq!(navbench(&["plan"]).status.code(), Some(1));
    let help = navbench(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8_lossy(&help.stdout);
    for sub in [
        "validate",
        "build-graph",
        "plan",
        "bench",
        "ablate",
        "raster",
        "simulate",
        "localize-sim",
        "gen-map",
        "storage",
    ] {
        assert!(text.contains(sub), "help lacks {sub}");
    }
}

#[test]
fn plan_with_saved_cache_matches_fresh_build() {
    let dir = tempfile::tempdir().unwrap();
    let map = gen_map(dir.path());
    let cache = dir.path().join("graph.json");
    let out = navbench(&["build-graph", &map, "-o", cache.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let start = pose_arg(&map, "F1-S0-RS00", "1");
    let goal = pose_arg(&map, "F2-S0-RN02", "2");
    let fresh = json(&navbench(&[
        "plan", &map, "--start", &start, "--goal", &goal,
    ]));
    let cached = json(&navbench(&[
        "plan",
        &map,
        "--start",
        &start,
        "--goal",
        &goal,
        "--cache",
        cache.to_str().unwrap(),
    ]));
    assert_eq!(fresh["cost"], cached["cost"]);
    assert_eq!(fresh["passages"], cached["passages"]);
    let flat = json(&navbench(&[
        "plan",
        &map,
        "--start",
        &start,
        "--goal",
        &goal,
        "--planner",
        "flat",
    ]));
    assert!((flat["cost"].as_f64().unwrap() - fresh["cost"].as_f64().unwrap()).abs() < 1e-6);
}

#[test]
fn planning_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let map = gen_map(dir.path());
    let goal = pose_arg(&map, "F1-S0-RN01", "1");
    let out = navbench(&["plan", &map, "--start=-500,-500,1", "--goal", &goal]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn raster_writes_pgm_and_yaml() {
    let dir = tempfile::tempdir().unwrap();
    let map = gen_map(dir.path());
    let pgm = dir.path().join("floor.pgm");
    let out = navbench(&[
        "raster",
        &map,
        "--level",
        "1",
        "--resolution",
        "0.1",
        "-o",
        pgm.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let bytes = std::fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5\n"));
    let yaml = std::fs::read_to_string(dir.path().join("floor.yaml")).unwrap();
    assert!(yaml.contains("resolution: 0.1"));
}

#[test]
fn storage_reports_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let map = gen_map(dir.path());
    let v = json(&navbench(&["storage", &map]));
    assert!(v["grid_ratio"].as_f64().unwrap() > 10.0);
    assert_eq!(
        v["vector_bytes"].as_u64().unwrap() as usize,
        std::fs::metadata(&map).unwrap().len() as usize
    );
}
