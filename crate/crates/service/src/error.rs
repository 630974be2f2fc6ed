use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use wallsense_core::placement::PlacementError;
use wallsense_core::scenario::ScenarioError;

/// JSON body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code: code.to_string(),
                message: message.into(),
                field_path: None,
            },
        }
    }

    pub fn with_field(mut self, path: impl Into<String>) -> Self {
        self.body.field_path = Some(path.into());
        self
    }

    /// Prefixes the field path, if any, with `prefix.`.
    pub fn nested(mut self, prefix: &str) -> Self {
        self.body.field_path = self.body.field_path.map(|p| format!("{prefix}.{p}"));
        self
    }

    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "validation", message).with_field(path)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }
}

impl From<ScenarioError> for ApiError {
    fn from(e: ScenarioError) -> Self {
        match &e {
            ScenarioError::Validation {
                field_path,
                message,
            } => Self::validation(field_path.clone(), message.clone()),
            ScenarioError::Parse { .. } => {
                Self::new(StatusCode::BAD_REQUEST, "parse", e.to_string())
            }
            ScenarioError::Read { .. } | ScenarioError::Write { .. } => {
                Self::internal(e.to_string())
            }
        }
    }
}

impl From<PlacementError> for ApiError {
    fn from(e: PlacementError) -> Self {
        let path = match e {
            PlacementError::EmptyDistances | PlacementError::BadDistance(_) => "distances_m",
            PlacementError::StepTooLarge { .. } => "objective.step_m",
            PlacementError::InvalidObjective(_) | PlacementError::LeakageUnknown => "objective",
            PlacementError::Infeasible { .. } => "objective.min_wall_clearance_m",
        };
        Self::validation(path, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
