use std::path::PathBuf;

use wallsense_core::geometry::Point;
use wallsense_core::scenario::*;

type Mutation = Box<dyn Fn(&mut ScenarioDoc)>;

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

#[test]
fn file_round_trip_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let s = Scenario::canonical();
    save_scenario(&s, &path).unwrap();
    assert_eq!(load_scenario(&path).unwrap(), s);
}

#[test]
fn serialization_is_deterministic() {
    let s = Scenario::canonical();
    assert_eq!(s.to_json(), s.to_json());
    let again = Scenario::from_json(&s.to_json()).unwrap();
    assert_eq!(again.to_json().as_bytes(), s.to_json().as_bytes());
}

#[test]
fn modified_fields_survive_round_trip() {
    let mut s = Scenario::canonical()
        .with_wall_distance(1.3)
        .with_txrx_distance(2.7);
    s.threshold_db = -3.25;
    s.model = ModelMode::Full;
    s.rf.gamma = 3.3e-4;
    s.rf.wavelength_m = 0.1 / 3.0;
    s.scale_factor = 0.1 + 0.2;
    s.grid = s.grid.with_resolution(0.07);
    let back = Scenario::from_json(&s.to_json()).unwrap();
    assert_eq!(back, s);
    assert_eq!(back.rf.wavelength_m.to_bits(), s.rf.wavelength_m.to_bits());
}

#[test]
fn bundled_canonical_scenario_loads() {
    let s = load_scenario(bundled("canonical.json")).unwrap();
    assert_eq!(s, Scenario::canonical());
    assert!((s.placement.separation() - 3.0).abs() < 1e-12);
    assert!((s.room.wall_side_distance(s.placement.tx) - 0.5).abs() < 1e-12);
}

#[test]
fn coincident_devices_point_at_placement() {
    let mut doc = Scenario::canonical().to_doc();
    doc.placement.rx_m = doc.placement.tx_m;
    let err = Scenario::from_doc(&doc).unwrap_err();
    assert!(err.is_validation());
    assert_eq!(err.field_path(), Some("placement"));
}

#[test]
fn validation_reports_field_paths() {
    let cases: Vec<(&str, Mutation)> = vec![
        (
            "placement.rx_m",
            Box::new(|d| d.placement.rx_m = Point::new(9.0, 3.0)),
        ),
        ("rf.gamma", Box::new(|d| d.rf.gamma = -1.0)),
        ("grid.resolution_m", Box::new(|d| d.grid.resolution_m = 0.0)),
        (
            "room.reflective_wall",
            Box::new(|d| d.room.reflective_wall = 4),
        ),
        ("schema_version", Box::new(|d| d.schema_version = 7)),
        ("threshold_db", Box::new(|d| d.threshold_db = f64::NAN)),
    ];
    for (path, edit) in cases {
        let mut doc = Scenario::canonical().to_doc();
        edit(&mut doc);
        assert_eq!(
            Scenario::from_doc(&doc).unwrap_err().field_path(),
            Some(path)
        );
    }
}

#[test]
fn unknown_and_missing_keys_are_rejected() {
    let text = Scenario::canonical().to_json();
    let extra = text.replacen("\"threshold_db\"", "\"colour\": 1,\n  \"threshold_db\"", 1);
    assert!(matches!(
        Scenario::from_json(&extra),
        Err(ScenarioError::Parse { .. })
    ));
    let missing = text.replacen("  \"scale_factor\": 1.0,\n", "", 1);
    assert_ne!(missing, text);
    assert!(matches!(
        Scenario::from_json(&missing),
        Err(ScenarioError::Parse { .. })
    ));
    assert!(matches!(
        load_scenario("/nonexistent/s.json"),
        Err(ScenarioError::Read { .. })
    ));
}
