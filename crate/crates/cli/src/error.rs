use thiserror::Error;

/// Every failure carries a module-qualified code. Validation failures exit
/// with 2, I/O failures with 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{code}: {message}")]
    Validation { code: String, message: String },
    #[error("{code}: {message}")]
    Io { code: String, message: String },
}

impl CliError {
    pub fn validation(code: impl Into<String>, message: impl ToString) -> Self {
        CliError::Validation {
            code: code.into(),
            message: message.to_string(),
        }
    }

    pub fn io(code: impl Into<String>, message: impl ToString) -> Self {
        CliError::Io {
            code: code.into(),
            message: message.to_string(),
        }
    }

    pub fn code(&self) -> &str {
        match self {
            CliError::Validation { code, .. } | CliError::Io { code, .. } => code,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }

    /// Machine-readable report printed on stderr.
    pub fn report(&self) -> serde_json::Value {
        let (kind, message) = match self {
            CliError::Validation { message, .. } => ("validation", message),
            CliError::Io { message, .. } => ("io", message),
        };
        serde_json::json!({"error": self.code(), "kind": kind, "message": message})
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io("cli.io", e)
    }
}

impl From<ledgergraph_core::ExportError> for CliError {
    fn from(e: ledgergraph_core::ExportError) -> Self {
        CliError::io("cli.export", e)
    }
}

impl From<ledgergraph_utxo::IngestError> for CliError {
    fn from(e: ledgergraph_utxo::IngestError) -> Self {
        match e {
            ledgergraph_utxo::IngestError::Io(_) => CliError::io("utxo.io", e),
            _ => CliError::validation(e.code(), e),
        }
    }
}

impl From<ledgergraph_utxo::GraphBuildError> for CliError {
    fn from(e: ledgergraph_utxo::GraphBuildError) -> Self {
        CliError::validation(e.code(), e)
    }
}

impl From<ledgergraph_utxo::ChainletError> for CliError {
    fn from(e: ledgergraph_utxo::ChainletError) -> Self {
        CliError::validation(e.code(), e)
    }
}

impl From<ledgergraph_utxo::GenError> for CliError {
    fn from(e: ledgergraph_utxo::GenError) -> Self {
        CliError::validation("utxo.invalid-spec", e)
    }
}

impl From<ledgergraph_account::AccountError> for CliError {
    fn from(e: ledgergraph_account::AccountError) -> Self {
        CliError::validation(e.code(), e)
    }
}

impl From<ledgergraph_ripple::RippleIoError> for CliError {
    fn from(e: ledgergraph_ripple::RippleIoError) -> Self {
        if e.is_io() {
            CliError::io(e.code(), e)
        } else {
            CliError::validation(e.code(), e)
        }
    }
}

impl From<ledgergraph_ripple::RippleError> for CliError {
    fn from(e: ledgergraph_ripple::RippleError) -> Self {
        CliError::validation(e.code(), e)
    }
}

impl From<ledgergraph_iota::IotaError> for CliError {
    fn from(e: ledgergraph_iota::IotaError) -> Self {
        CliError::validation(e.code(), e)
    }
}

impl From<ledgergraph_account::TokenError> for CliError {
    fn from(e: ledgergraph_account::TokenError) -> Self {
        CliError::validation(e.code(), e)
    }
}
