use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IotaError {
    #[error("invalid tryte character {ch:?} at {pos}")]
    InvalidChar { ch: char, pos: usize },
    #[error("{0} trits is not a whole number of trytes")]
    LengthNotMultipleOf3(usize),
    #[error("{0} is not a trit")]
    InvalidTrit(i8),
    #[error("{len} trytes exceeds {max}")]
    TooLong { len: usize, max: usize },
    #[error("seed must be 81 trytes, got {0}")]
    BadSeedLength(usize),
    #[error("subseed index {0} out of range")]
    IndexOutOfRange(u64),
    #[error("security level {0} not in 1..=3")]
    BadSecurityLevel(u8),
    #[error("private key of {0} trytes is not a whole number of segments")]
    BadKeyLength(usize),
    #[error("address checksum mismatch")]
    BadChecksum,
    #[error("bundle inputs {inputs} != outputs {outputs}")]
    UnbalancedBundle { inputs: i128, outputs: i128 },
    #[error("bundle has no transactions")]
    EmptyBundle,
    #[error("bundle {0} failed verification: {1}")]
    BadBundle(String, String),
    #[error("{0} is not a bundle head")]
    NotBundleHead(String),
    #[error("no valid tips")]
    NoValidTips,
    #[error("unknown transaction {0}")]
    UnknownTx(String),
    #[error("transaction {0} is invalid")]
    InvalidTx(String),
    #[error("no nonce within {0} tries")]
    PowBudgetExceeded(u64),
    #[error("{0} is not the coordinator")]
    NotCoordinator(String),
    #[error("milestone ancestry holds conflicting spends from {0}")]
    InconsistentMilestone(String),
    #[error("no tangle yet; run init first")]
    NotInitialized,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("csv: {0}")]
    Csv(String),
}

impl IotaError {
    pub fn code(&self) -> &'static str {
        match self {
            IotaError::InvalidChar { .. } => "iota.invalid-char",
            IotaError::LengthNotMultipleOf3(_) => "iota.length-not-multiple-of-3",
            IotaError::InvalidTrit(_) => "iota.invalid-trit",
            IotaError::TooLong { .. } => "iota.too-long",
            IotaError::BadSeedLength(_) => "iota.bad-seed-length",
            IotaError::IndexOutOfRange(_) => "iota.index-out-of-range",
            IotaError::BadSecurityLevel(_) => "iota.bad-security-level",
            IotaError::BadKeyLength(_) => "iota.bad-key-length",
            IotaError::BadChecksum => "iota.bad-checksum",
            IotaError::UnbalancedBundle { .. } => "iota.unbalanced-bundle",
            IotaError::EmptyBundle => "iota.empty-bundle",
            IotaError::BadBundle(..) => "iota.bad-bundle",
            IotaError::NotBundleHead(_) => "iota.not-bundle-head",
            IotaError::NoValidTips => "iota.no-valid-tips",
            IotaError::UnknownTx(_) => "iota.unknown-tx",
            IotaError::InvalidTx(_) => "iota.invalid-tx",
            IotaError::PowBudgetExceeded(_) => "iota.pow-budget-exceeded",
            IotaError::NotCoordinator(_) => "iota.not-coordinator",
            IotaError::InconsistentMilestone(_) => "iota.inconsistent-milestone",
            IotaError::NotInitialized => "iota.not-initialized",
            IotaError::Parse { .. } => "iota.parse",
            IotaError::Csv(_) => "iota.csv",
        }
    }
}
