//! Scenario files: a room, a device placement, link constants and an
//! evaluation grid, stored as JSON with unit-suffixed keys.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelError, RfParameters};
use crate::coverage::grid::GridSpec;
use crate::geometry::{DevicePlacement, GeometryError, Point, RoomLayout};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_THRESHOLD_DB: f64 = 2.0;
pub const DEFAULT_EXCLUSION_RADIUS_M: f64 = 0.1;
pub const DEFAULT_RESOLUTION_M: f64 = 0.05;

/// Which SSNR expression fills the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelMode {
    /// Distance-only proportional form, multiplied by the scale factor.
    #[default]
    Simplified,
    /// Absolute powers in watts over the interference power.
    Full,
}

impl std::str::FromStr for ModelMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simplified" => Ok(Self::Simplified),
            "full" => Ok(Self::Full),
            other => Err(format!(
                "unknown model mode {other:?}, expected simplified or full"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid {field_path}: {message}")]
    Validation { field_path: String, message: String },
}

impl ScenarioError {
    fn invalid(field_path: impl Into<String>, message: impl ToString) -> Self {
        Self::Validation {
            field_path: field_path.into(),
            message: message.to_string(),
        }
    }

    pub fn field_path(&self) -> Option<&str> {
        match self {
            Self::Validation { field_path, .. } => Some(field_path),
            _ => None,
        }
    }

    pub fn is_validation(&self) -> bool {
        matches!(self, Self::Validation { .. } | Self::Parse { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomDoc {
    pub vertices_m: Vec<Point>,
    pub reflective_wall: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementDoc {
    pub tx_m: Point,
    pub rx_m: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub origin_m: Point,
    pub width_m: f64,
    pub height_m: f64,
    pub resolution_m: f64,
}

/// On-disk layout. Every key is required so a file states its full
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub schema_version: u32,
    pub room: RoomDoc,
    pub placement: PlacementDoc,
    pub rf: RfParameters,
    pub grid: GridDoc,
    pub threshold_db: f64,
    pub model: ModelMode,
    pub scale_factor: f64,
    pub exclusion_radius_m: f64,
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub room: RoomLayout,
    pub placement: DevicePlacement,
    pub rf: RfParameters,
    pub grid: GridSpec,
    pub threshold_db: f64,
    pub model: ModelMode,
    pub scale_factor: f64,
    pub exclusion_radius_m: f64,
}

fn geometry_message(err: GeometryError) -> String {
    err.to_string()
}

fn channel_message(err: ChannelError) -> String {
    err.to_string()
}

impl Scenario {
    /// 8 m x 6 m room with the reflective wall on x = 0, transmitter 0.5 m
    /// from it, receiver 3 m further along, and a grid reaching 3 m beyond
    /// the wall.
    pub fn canonical() -> Self {
        Self {
            room: RoomLayout::rectangle(8.0, 6.0).expect("canonical room is valid"),
            placement: DevicePlacement::new(Point::new(0.5, 3.0), Point::new(3.5, 3.0)),
            rf: RfParameters::default(),
            grid: GridSpec::new(Point::new(-3.0, -1.0), 12.0, 8.0, DEFAULT_RESOLUTION_M),
            threshold_db: DEFAULT_THRESHOLD_DB,
            model: ModelMode::Simplified,
            scale_factor: 1.0,
            exclusion_radius_m: DEFAULT_EXCLUSION_RADIUS_M,
        }
    }

    pub fn from_doc(doc: &ScenarioDoc) -> Result<Self, ScenarioError> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::invalid(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    doc.schema_version
                ),
            ));
        }
        let room = RoomLayout::from_vertices(&doc.room.vertices_m, doc.room.reflective_wall)
            .map_err(|e| {
                let path = match e {
                    GeometryError::ReflectiveWallOutOfRange { .. } => "room.reflective_wall",
                    _ => "room.vertices_m",
                };
                ScenarioError::invalid(path, geometry_message(e))
            })?;
        let scenario = Self {
            room,
            placement: DevicePlacement::new(doc.placement.tx_m, doc.placement.rx_m),
            rf: doc.rf,
            grid: GridSpec::new(
                doc.grid.origin_m,
                doc.grid.width_m,
                doc.grid.height_m,
                doc.grid.resolution_m,
            ),
            threshold_db: doc.threshold_db,
            model: doc.model,
            scale_factor: doc.scale_factor,
            exclusion_radius_m: doc.exclusion_radius_m,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_doc(&self) -> ScenarioDoc {
        ScenarioDoc {
            schema_version: SCHEMA_VERSION,
            room: RoomDoc {
                vertices_m: self.room.vertices(),
                reflective_wall: self.room.reflective_wall_index(),
            },
            placement: PlacementDoc {
                tx_m: self.placement.tx,
                rx_m: self.placement.rx,
            },
            rf: self.rf,
            grid: GridDoc {
                origin_m: self.grid.origin,
                width_m: self.grid.width,
                height_m: self.grid.height,
                resolution_m: self.grid.resolution,
            },
            threshold_db: self.threshold_db,
            model: self.model,
            scale_factor: self.scale_factor,
            exclusion_radius_m: self.exclusion_radius_m,
        }
    }

    /// Checks every invariant not already enforced by construction of the
    /// room. Errors carry the JSON path of the offending field.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.placement.validate(&self.room).map_err(|e| {
            let path = match e {
                GeometryError::DeviceOutsideRoom("transmitter") => "placement.tx_m",
                GeometryError::DeviceOutsideRoom(_) => "placement.rx_m",
                _ => "placement",
            };
            ScenarioError::invalid(path, geometry_message(e))
        })?;
        self.rf.validate().map_err(|(name, e)| {
            ScenarioError::invalid(format!("rf.{name}"), channel_message(e))
        })?;
        self.grid.validate().map_err(|e| {
            let path = match e {
                crate::coverage::grid::GridError::Resolution(_) => "grid.resolution_m",
                crate::coverage::grid::GridError::Extent { axis: "width", .. } => "grid.width_m",
                crate::coverage::grid::GridError::Extent { .. } => "grid.height_m",
                crate::coverage::grid::GridError::Origin => "grid.origin_m",
                crate::coverage::grid::GridError::TooLarge(_) => "grid",
            };
            ScenarioError::invalid(path, e)
        })?;
        if !self.threshold_db.is_finite() {
            return Err(ScenarioError::invalid("threshold_db", "must be finite"));
        }
        if !(self.scale_factor.is_finite() && self.scale_factor > 0.0) {
            return Err(ScenarioError::invalid(
                "scale_factor",
                "must be positive and finite",
            ));
        }
        if !(self.exclusion_radius_m.is_finite() && self.exclusion_radius_m >= 0.0) {
            return Err(ScenarioError::invalid(
                "exclusion_radius_m",
                "must be non-negative and finite",
            ));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_doc(&doc)
    }

    /// Pretty JSON in a fixed key order with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_doc()).expect("scenario serializes");
        text.push('\n');
        text
    }

    /// Copy with both devices translated along the reflective wall's inward
    /// normal so the transmitter sits `distance` from the wall line.
    pub fn with_wall_distance(&self, distance: f64) -> Self {
        let current = self.room.wall_side_distance(self.placement.tx);
        let shift = self.room.inward_normal() * (distance - current);
        let mut out = self.clone();
        out.placement = DevicePlacement::new(self.placement.tx + shift, self.placement.rx + shift);
        out
    }

    /// Copy with the receiver moved along the tx to rx direction so the
    /// devices are `distance` apart.
    pub fn with_txrx_distance(&self, distance: f64) -> Self {
        let dir = self.placement.rx - self.placement.tx;
        let unit = dir * (1.0 / dir.norm());
        let mut out = self.clone();
        out.placement.rx = self.placement.tx + unit * distance;
        out
    }

    /// Copy with the wall made non-reflective.
    pub fn without_wall(&self) -> Self {
        let mut out = self.clone();
        out.rf.r_wall = 0.0;
        out
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::from_json(&text)
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    fs::write(path, scenario.to_json()).map_err(|source| ScenarioError::Write {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type Mutation = Box<dyn Fn(&mut ScenarioDoc)>;

    #[test]
    fn canonical_is_valid() {
        let s = Scenario::canonical();
        s.validate().unwrap();
        assert!((s.placement.separation() - 3.0).abs() < 1e-12);
        assert!((s.room.wall_side_distance(s.placement.tx) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let s = Scenario::canonical();
        assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
        assert!(s.to_json().ends_with("}\n"));
    }

    #[test]
    fn coincident_devices_name_placement() {
        let mut doc = Scenario::canonical().to_doc();
        doc.placement.rx_m = doc.placement.tx_m;
        let err = Scenario::from_doc(&doc).unwrap_err();
        assert_eq!(err.field_path(), Some("placement"));
    }

    #[test]
    fn unknown_field_is_parse_error() {
        let mut value: serde_json::Value =
            serde_json::from_str(&Scenario::canonical().to_json()).unwrap();
        value["rf"]["bogus_w"] = serde_json::json!(1.0);
        let err = Scenario::from_json(&value.to_string()).unwrap_err();
        match err {
            ScenarioError::Parse { message, .. } => assert!(message.contains("bogus_w")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_error_reports_position() {
        let err = Scenario::from_json("{\n  \"schema_version\": 1,\n  oops\n}").unwrap_err();
        match err {
            ScenarioError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn validation_paths() {
        let cases: Vec<(Mutation, &str)> = vec![
            (Box::new(|d| d.rf.gamma = 0.0), "rf.gamma"),
            (Box::new(|d| d.rf.r_wall = 2.0), "rf.r_wall"),
            (
                Box::new(|d| d.grid.resolution_m = -1.0),
                "grid.resolution_m",
            ),
            (Box::new(|d| d.grid.width_m = 0.0), "grid.width_m"),
            (Box::new(|d| d.threshold_db = f64::INFINITY), "threshold_db"),
            (Box::new(|d| d.scale_factor = 0.0), "scale_factor"),
            (
                Box::new(|d| d.exclusion_radius_m = -0.1),
                "exclusion_radius_m",
            ),
            (
                Box::new(|d| d.placement.tx_m = Point::new(-1.0, 3.0)),
                "placement.tx_m",
            ),
            (
                Box::new(|d| d.placement.rx_m = Point::new(9.0, 3.0)),
                "placement.rx_m",
            ),
            (
                Box::new(|d| d.room.reflective_wall = 7),
                "room.reflective_wall",
            ),
            (
                Box::new(|d| d.room.vertices_m.truncate(2)),
                "room.vertices_m",
            ),
            (Box::new(|d| d.schema_version = 2), "schema_version"),
        ];
        for (mutate, path) in cases {
            let mut doc = Scenario::canonical().to_doc();
            mutate(&mut doc);
            let err = Scenario::from_doc(&doc).unwrap_err();
            assert_eq!(err.field_path(), Some(path), "{err}");
        }
    }

    #[test]
    fn wall_and_txrx_helpers() {
        let s = Scenario::canonical().with_wall_distance(2.0);
        assert!((s.placement.tx.x - 2.0).abs() < 1e-12);
        assert!((s.placement.rx.x - 5.0).abs() < 1e-12);
        let s = Scenario::canonical().with_txrx_distance(1.0);
        assert_eq!(s.placement.tx, Point::new(0.5, 3.0));
        assert!((s.placement.rx.x - 1.5).abs() < 1e-12);
    }

    #[test]
    fn mode_from_str() {
        assert_eq!("full".parse::<ModelMode>().unwrap(), ModelMode::Full);
        assert!("other".parse::<ModelMode>().is_err());
    }
}
