use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported modulation order {0} (expected 4, 16, 32 or 64)")]
    UnsupportedModOrder(u32),
    #[error("unsupported OFDM symbol length {0} (expected 128, 256 or 512)")]
    UnsupportedSymbolLen(usize),
    #[error("invalid waveform spec: {0}")]
    InvalidSpec(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("pilot needs at least {min} occupied subcarriers, got {actual}")]
    PilotTooShort { min: usize, actual: usize },
    #[error("known pilot has a zero entry at subcarrier {0}")]
    ZeroPilot(usize),
    #[error("invalid STFT parameters: {0}")]
    InvalidStft(String),
    #[error("scaling mode mismatch: data is {expected:?}, params are {actual:?}")]
    ScalingModeMismatch {
        expected: crate::scaling::ScalingMode,
        actual: crate::scaling::ScalingMode,
    },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("frequency grids differ: {0}")]
    GridMismatch(String),
    #[error("reference correlation is zero")]
    ZeroReference,
    #[error("bad container magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated payload: expected {expected} bytes, got {actual}")]
    TruncatedPayload { expected: usize, actual: usize },
    #[error("header: {0}")]
    Header(#[from] serde_json::Error),
    #[error("representation mismatch: {0}")]
    Representation(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error document.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnsupportedModOrder(_) => "unsupported_mod_order",
            Error::UnsupportedSymbolLen(_) => "unsupported_symbol_len",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::PilotTooShort { .. } => "pilot_too_short",
            Error::ZeroPilot(_) => "zero_pilot",
            Error::InvalidStft(_) => "invalid_stft",
            Error::ScalingModeMismatch { .. } => "scaling_mode_mismatch",
            Error::NonFinite => "non_finite",
            Error::Empty(_) => "empty",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::ZeroReference => "zero_reference",
            Error::BadMagic(_) => "bad_magic",
            Error::UnsupportedVersion(_) => "unsupported_version",
            Error::TruncatedPayload { .. } => "truncated_payload",
            Error::Header(_) => "header",
            Error::Representation(_) => "representation",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::Io(_) => "io",
        }
    }
}
