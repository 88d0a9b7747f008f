use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use thiserror::Error;

use crate::api::ErrorBody;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("session {0} not found")]
    NotFound(String),

    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("{0}")]
    Conflict(String),

    #[error("storage: {0}")]
    Storage(String),

    #[error("{0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, ServiceError>;

impl ServiceError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ServiceError::Invalid { field: field.into(), reason: reason.into() }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Invalid { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Conflict(_) => StatusCode::CONFLICT,
            ServiceError::Storage(_) | ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            ServiceError::NotFound(_) => "not_found",
            ServiceError::Invalid { .. } => "invalid",
            ServiceError::Conflict(_) => "conflict",
            ServiceError::Storage(_) => "storage",
            ServiceError::Internal(_) => "internal",
        }
    }

    pub fn body(&self) -> ErrorBody {
        let field = match self {
            ServiceError::Invalid { field, .. } => Some(field.clone()),
            _ => None,
        };
        ErrorBody { error: self.kind().to_string(), message: self.to_string(), field }
    }
}

impl From<bsa::Error> for ServiceError {
    fn from(e: bsa::Error) -> Self {
        match e {
            bsa::Error::InvalidArgument { name, reason } => ServiceError::invalid(name, reason),
            other => ServiceError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for ServiceError {
    fn from(e: std::io::Error) -> Self {
        ServiceError::Storage(e.to_string())
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        (self.status(), Json(self.body())).into_response()
    }
}
