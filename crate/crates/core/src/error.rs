use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the coding, decoding, search and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid character {0:?} in polynomial literal")]
    InvalidDigit(char),
    #[error("empty polynomial literal")]
    EmptyLiteral,
    #[error("polynomial {text} needs {bits} bits but at most {max} are allowed")]
    WidthOverflow { text: String, bits: u32, max: u32 },
    #[error("CRC polynomial {0} must have constant and leading coefficients set")]
    CrcEndpoints(String),
    #[error("CRC polynomial {text} has degree {found}, expected {expected}")]
    CrcDegree {
        text: String,
        found: u32,
        expected: u32,
    },
    #[error("degree {0} is outside the supported range 1..=16")]
    UnsupportedDegree(u32),
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("bit sequence of length {len} is too short for a degree-{m} check")]
    SequenceTooShort { len: usize, m: u32 },
    #[error("invalid code definition: {0}")]
    InvalidCode(String),
    #[error("no stream has an instantaneous response (h_0 = 0 for every stream)")]
    NoInstantResponse,
    #[error("frame layout: {0}")]
    Layout(String),
    #[error("expected {expected} bits, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("no tail-biting initial state exists for this payload")]
    NoTailBitingState,
    #[error("state {state} cannot reach the zero state within {sections} sections")]
    Unterminable { state: u32, sections: usize },
    #[error("list size must be at least 1")]
    EmptyList,
    #[error(
        "threshold d~={d_tilde} leaves candidate {crc} without undetected paths; raise the threshold"
    )]
    InsufficientThreshold { d_tilde: u32, crc: String },
    #[error("path enumeration exceeded {0} paths; lower the threshold")]
    TooManyPaths(usize),
    #[error("brute-force enumeration of 2^{0} words is too large")]
    TooLarge(usize),
    #[error("configuration: {0}")]
    Config(String),
}
