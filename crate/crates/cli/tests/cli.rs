use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::Value;
use wallsense_core::csiproc::CsiTrace;
use wallsense_core::placement::{optimize_placement, sweep_txrx_distance, PlacementObjective};
use wallsense_core::scenario::{save_scenario, Scenario};
use wallsense_service::{compute_sweep, OptimizePayload, SweepRequest};

fn wallsense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wallsense"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn exit_codes_distinguish_validation_and_runtime() {
    assert_eq!(code(&wallsense(&["field", "--resolution", "1.0"])), 0);
    assert_eq!(code(&wallsense(&["field", "--gamma", "-1"])), 2);
    assert_eq!(code(&wallsense(&["field", "--resolution", "0"])), 2);
    assert_eq!(code(&wallsense(&["field", "--mode", "quantum"])), 2);
    assert_eq!(
        code(&wallsense(&[
            "boundary",
            "--resolution",
            "0.5",
            "--window",
            "4"
        ])),
        2
    );
    assert_eq!(code(&wallsense(&["sweep", "wall", "--distances", "-1"])), 2);
    assert_eq!(
        code(&wallsense(&["field", "--scenario", "/does/not/exist.json"])),
        3
    );
    assert_eq!(
        code(&wallsense(&[
            "field",
            "--resolution",
            "1.0",
            "--out",
            "/does/not/exist/f.csv"
        ])),
        3
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"schema_version\": 1 }").unwrap();
    let out = wallsense(&["field", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn field_flags_override_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    save_scenario(&Scenario::canonical(), &path).unwrap();
    let a = wallsense(&[
        "field",
        "--scenario",
        path.to_str().unwrap(),
        "--resolution",
        "0.5",
        "--r-wall",
        "0",
    ]);
    let b = wallsense(&["field", "--resolution", "0.5", "--r-wall", "0"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let with_wall = wallsense(&["field", "--resolution", "0.5"]);
    assert_ne!(with_wall.stdout, a.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("x,y,ssnr_db\n"));
    assert_eq!(text.lines().count(), 1 + 24 * 16);
}

#[test]
fn field_writes_pgm_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("f.pgm");
    assert_eq!(
        code(&wallsense(&[
            "field",
            "--resolution",
            "0.25",
            "--out",
            pgm.to_str().unwrap()
        ])),
        0
    );
    let bytes = std::fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5\n48 32\n65535\n"));
    assert!(Path::new(&format!("{}.range.txt", pgm.display())).exists());
}

#[test]
fn boundary_csv_is_closed_outlines() {
    let out = wallsense(&["boundary", "--resolution", "0.25"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("contour,vertex,x,y\n"));
    assert!(text.lines().count() > 10);
}

#[test]
fn sweep_csv_matches_service() {
    let out = wallsense(&[
        "sweep",
        "txrx",
        "--resolution",
        "0.25",
        "--wall-distance",
        "1",
        "--distances",
        "3,1,2",
    ]);
    assert_eq!(code(&out), 0);
    let mut s = Scenario::canonical().with_wall_distance(1.0);
    s.grid = s.grid.with_resolution(0.25);
    let engine = sweep_txrx_distance(&s, &[1.0, 2.0, 3.0]).unwrap();
    assert_eq!(stdout(&out), engine.csv_string());
    let service = compute_sweep(&SweepRequest {
        scenario: s.to_doc(),
        kind: wallsense_core::placement::SweepKind::Txrx,
        distances_m: vec![3.0, 1.0, 2.0],
    })
    .unwrap();
    let text = stdout(&out);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    for (record, point) in rows.records().zip(&service.points) {
        let record = record.unwrap();
        assert_eq!(record[0].parse::<f64>().unwrap(), point.distance_m);
        assert_eq!(
            record[1].parse::<f64>().unwrap().to_bits(),
            point.indoor_area_m2.to_bits()
        );
        assert_eq!(record[3].parse::<usize>().unwrap(), point.component_count);
    }
}

#[test]
fn optimize_matches_engine_and_service_payload() {
    let out = wallsense(&[
        "optimize",
        "--resolution",
        "0.25",
        "--step",
        "1.5",
        "--eval-resolution",
        "0.25",
    ]);
    assert_eq!(code(&out), 0);
    let got: OptimizePayload = serde_json::from_slice(&out.stdout).unwrap();
    let mut s = Scenario::canonical();
    s.grid = s.grid.with_resolution(0.25);
    let obj = PlacementObjective {
        step: 1.5,
        eval_resolution: Some(0.25),
        ..Default::default()
    };
    assert_eq!(
        got,
        OptimizePayload::from(&optimize_placement(&s, &obj, None).unwrap())
    );
    assert_eq!(code(&wallsense(&["optimize", "--step", "3"])), 2);
}

fn write_trace(path: &Path, seed: u64, bpm: f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let fs = 1000.0;
    let columns: Vec<Vec<f64>> = (0..2)
        .map(|k| {
            (0..42_000)
                .map(|i| {
                    5.0 + (k as f64 + 0.5) * (2.0 * PI * bpm / 60.0 * i as f64 / fs).sin()
                        + noise.sample(&mut rng)
                })
                .collect()
        })
        .collect();
    std::fs::write(
        path,
        CsiTrace::uniform(fs, columns).unwrap().to_csv_string(),
    )
    .unwrap();
}

#[test]
fn respire_reports_rates_and_error() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_trace(&a, 1, 15.0);
    write_trace(&b, 2, 15.0);
    let out = wallsense(&[
        "respire",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--window-s",
        "40",
        "--truth-bpm",
        "15",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let estimates = v["estimates"].as_array().unwrap();
    assert_eq!(estimates.len(), 2);
    for e in estimates {
        assert_eq!(e["subcarrier"], 1);
        assert!((e["rate"]["bpm"].as_f64().unwrap() - 15.0).abs() < 1.0);
    }
    assert!(v["mae_bpm"].as_f64().unwrap() < 0.5);

    let short = wallsense(&["respire", a.to_str().unwrap(), "--window-s", "100"]);
    assert_eq!(code(&short), 2);
    assert_eq!(code(&wallsense(&["respire", "/does/not/exist.csv"])), 3);
}

#[test]
fn ssnr_fit_reports_scale() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pairs.csv");
    let mut text = String::from("measured_db,simulated_db\n");
    for sim_db in [1.0, 4.0, 7.5, 12.0, 15.0] {
        text.push_str(&format!("{},{sim_db}\n", sim_db + 3.0));
    }
    std::fs::write(&path, text).unwrap();
    let out = wallsense(&["ssnr-fit", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["scale_db"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!(v["mae_db"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["pairs"], 5);

    std::fs::write(&path, "measured_db,simulated_db\n1,2\n").unwrap();
    assert_eq!(code(&wallsense(&["ssnr-fit", path.to_str().unwrap()])), 2);
}
