use serde_json::json;
use thiserror::Error;

/// Errors surfaced to CLI and HTTP clients as `{code, message}`.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("missing field '{0}'")]
    MissingField(String),

    #[error("{message}")]
    Schema { code: &'static str, message: String },

    #[error(transparent)]
    Core(#[from] cbe_core::Error),

    #[error("{0}")]
    Budget(String),

    #[error("{0}")]
    Io(String),
}

impl AppError {
    /// Classifies a deserializer message.
    pub fn from_schema_message(msg: &str) -> Self {
        let code = if msg.contains("unknown field") {
            "schema.unknown_field"
        } else if msg.contains("missing field") {
            "schema.missing_field"
        } else {
            "schema.invalid"
        };
        AppError::Schema { code, message: msg.trim().to_string() }
    }

    pub fn code(&self) -> &'static str {
        match self {
            AppError::MissingField(_) => "schema.missing_field",
            AppError::Schema { code, .. } => code,
            AppError::Core(e) => e.code(),
            AppError::Budget(_) => "budget_exceeded",
            AppError::Io(_) => "io_error",
        }
    }

    /// Inputs are well formed but describe something impossible.
    pub fn is_infeasibility(&self) -> bool {
        match self {
            AppError::Core(e) => e.is_infeasibility(),
            AppError::Budget(_) => true,
            _ => false,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_infeasibility() {
            3
        } else {
            2
        }
    }

    pub fn http_status(&self) -> u16 {
        if self.is_infeasibility() {
            422
        } else {
            400
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "code": self.code(), "message": self.to_string() })
    }
}
