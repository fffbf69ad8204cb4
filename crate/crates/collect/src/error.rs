use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CollectError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("conflict: {0}")]
    Conflict(String),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("the instance has no text description")]
    MissingDescription,
    #[error("internal error: {0}")]
    Internal(String),
}

impl CollectError {
    pub fn status(&self) -> StatusCode {
        match self {
            CollectError::NotFound(_) => StatusCode::NOT_FOUND,
            CollectError::Conflict(_) => StatusCode::CONFLICT,
            CollectError::BadRequest(_) => StatusCode::BAD_REQUEST,
            CollectError::MissingDescription => StatusCode::UNPROCESSABLE_ENTITY,
            CollectError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl From<clickbench::Error> for CollectError {
    fn from(e: clickbench::Error) -> Self {
        CollectError::Internal(e.to_string())
    }
}

impl IntoResponse for CollectError {
    fn into_response(self) -> Response {
        (self.status(), Json(json!({ "error": self.to_string() }))).into_response()
    }
}
