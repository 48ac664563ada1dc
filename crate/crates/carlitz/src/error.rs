use carlitz_core::Error as CoreError;
use serde_json::json;

/// Everything the front end can fail with, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    /// Malformed flags, files or expressions.
    #[error("input error: {0}")]
    Input(String),
    /// A configured budget is too small for the request.
    #[error("{resource} exhausted: {message}")]
    Resource { resource: &'static str, message: String },
    /// Verification ran to completion but some checks failed.
    #[error("{0} check(s) failed")]
    Failed(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("json: {e}"))
    }
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    /// 1 identity failure, 2 resource exhaustion, 3 input error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Resource { .. } => 2,
            CliError::Core(e) if resource_of(e).is_some() => 2,
            _ => 3,
        }
    }

    /// Short machine-readable class of the failure.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Failed(_) => "identity-failure",
            CliError::Resource { .. } => "resource-exhausted",
            CliError::Core(e) if resource_of(e).is_some() => "resource-exhausted",
            CliError::Core(CoreError::Resonance { .. })
            | CliError::Core(CoreError::NotSmall { .. })
            | CliError::Core(CoreError::NoContinuousSolution(_))
            | CliError::Core(CoreError::Degenerate { .. })
            | CliError::Core(CoreError::UndefinedTerm { .. })
            | CliError::Core(CoreError::NotDeltaOperator { .. }) => "hypothesis-violated",
            CliError::Core(_) => "invalid-input",
            CliError::Input(_) => "invalid-input",
            CliError::Io(_) => "io",
        }
    }

    /// The exhausted budget, when there is one.
    pub fn resource(&self) -> Option<&'static str> {
        match self {
            CliError::Resource { resource, .. } => Some(resource),
            CliError::Core(e) => resource_of(e),
            _ => None,
        }
    }

    /// One-line JSON diagnostic for stderr.
    pub fn diagnostic(&self) -> String {
        let mut v = json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let Some(r) = self.resource() {
            v["resource"] = json!(r);
        }
        v.to_string()
    }
}

fn resource_of(e: &CoreError) -> Option<&'static str> {
    match e {
        CoreError::PrecisionExhausted(_) => Some("x-adic precision"),
        CoreError::RamificationCap { .. } => Some("ramification cap"),
        CoreError::TruncationExhausted(_) => Some("t-order"),
        CoreError::FieldTooLarge { .. } => Some("constant field size"),
        _ => None,
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
