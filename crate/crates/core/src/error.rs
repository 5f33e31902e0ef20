use core::fmt;

/// Errors reported by the simulation primitives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A transform input length is not a power of two.
    NotPowerOfTwo(usize),
    /// Two operands were built for different qubit counts.
    DimensionMismatch { left: u32, right: u32 },
    /// Qubit count outside `1..=MAX_QUBITS`.
    QubitCountOutOfRange(u32),
    /// A truth-table entry was neither -1 nor +1.
    InvalidSignValue { index: usize },
    /// A structurally invalid argument; the message names the violation.
    InvalidArgument(&'static str),
    /// Input that makes the requested quantity undefined (e.g. a zero field).
    DegenerateInput(&'static str),
    /// Closed-form term probabilities only exist up to order two.
    UnsupportedOrder(usize),
    /// The covariance system violates its conditioning guard or the
    /// factorization broke down.
    IllConditioned(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPowerOfTwo(len) => {
                write!(f, "vector length {len} is not a power of two")
            }
            Error::DimensionMismatch { left, right } => {
                write!(f, "operands disagree on qubit count: {left} vs {right}")
            }
            Error::QubitCountOutOfRange(n) => {
                write!(f, "qubit count {n} outside supported range 1..=24")
            }
            Error::InvalidSignValue { index } => {
                write!(f, "truth table entry at index {index} is not +/-1")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::DegenerateInput(msg) => write!(f, "degenerate input: {msg}"),
            Error::UnsupportedOrder(k) => {
                write!(f, "no closed form for terms of order {k} (max 2)")
            }
            Error::IllConditioned(msg) => write!(f, "ill-conditioned system: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
