use alloc::string::String;
use core::fmt;

/// Errors raised by the arithmetic kernel and everything built on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// The modulus supplied for the constant field is not irreducible.
    ReducibleModulus,
    /// A field or context parameter is out of range.
    InvalidParameter(String),
    /// Division by an element that is zero to its known precision.
    DivisionByZero,
    /// A result would be known to no terms at all.
    PrecisionExhausted(String),
    /// A q-th root would need more ramification than the configured cap.
    RamificationCap { needed: u32, cap: u32 },
    /// Artin-Schreier small-solution premise |v| < 1 violated.
    NotSmall { step: Option<usize> },
    /// The constant field is too large for exhaustive search.
    FieldTooLarge { size: u64 },
    /// A required constant does not exist in the configured constant field.
    MissingRoots(String),
    /// A truncation ran out of indices.
    TruncationExhausted(String),
    /// Leading coefficient of a formal recursion vanished.
    Degenerate { index: usize },
    /// Non-resonance condition violated for the regular-singular solver.
    Resonance { i: usize, j: usize, k: usize },
    /// The series defining a would-be delta operator has S_n = 0.
    NotDeltaOperator { n: usize },
    /// An undefined term (zero denominator with nonzero numerator).
    UndefinedTerm { n: usize },
    /// |lambda| >= 1 (or similar) where a continuous solution cannot exist.
    NoContinuousSolution(String),
    /// Objects from different contexts, or shapes that do not match.
    Mismatch(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ReducibleModulus => write!(f, "modulus is not irreducible"),
            Error::InvalidParameter(s) => write!(f, "invalid parameter: {s}"),
            Error::DivisionByZero => write!(f, "division by zero-to-precision element"),
            Error::PrecisionExhausted(s) => write!(f, "precision exhausted: {s}"),
            Error::RamificationCap { needed, cap } => {
                write!(f, "ramification cap exceeded: needs e={needed}, cap is {cap}")
            }
            Error::NotSmall { step: Some(s) } => {
                write!(f, "artin-schreier premise |v| < 1 violated at step {s}")
            }
            Error::NotSmall { step: None } => write!(f, "artin-schreier premise |v| < 1 violated"),
            Error::FieldTooLarge { size } => {
                write!(f, "constant field of size {size} exceeds exhaustive-search budget")
            }
            Error::MissingRoots(s) => write!(f, "roots absent from constant field: {s}"),
            Error::TruncationExhausted(s) => write!(f, "truncation exhausted: {s}"),
            Error::Degenerate { index } => {
                write!(f, "degenerate leading coefficient at index {index}")
            }
            Error::Resonance { i, j, k } => write!(
                f,
                "non-resonance condition violated: lambda_{i} - lambda_{j}^(q^{k}) = [{k}]"
            ),
            Error::NotDeltaOperator { n } => write!(f, "S_{n} = 0: not a delta operator"),
            Error::UndefinedTerm { n } => {
                write!(f, "undefined term at n={n}: zero denominator, nonzero numerator")
            }
            Error::NoContinuousSolution(s) => write!(f, "no continuous solution: {s}"),
            Error::Mismatch(s) => write!(f, "mismatch: {s}"),
        }
    }
}

impl core::error::Error for Error {}
