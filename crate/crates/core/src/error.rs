use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("modulus {0} exceeds the supported range (p < 2^63)")]
    ModulusTooLarge(u64),

    #[error("{value} is divisible by the modulus {p}")]
    DivisibleByModulus { value: u64, p: u64 },

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: u64,
        lo: u64,
        hi: u64,
    },

    #[error("bit width k = {0} is outside [1, 63]")]
    BitWidth(u32),

    #[error("g = {g} is not a primitive root mod {p}; the map is not a permutation")]
    NotPrimitiveRoot { g: u64, p: u64 },

    #[error("iteration depth k = {0} needs the large-k opt-in (supported without it: 1, 2, 3)")]
    FixedPointDepth(u32),

    #[error("interval [{start}, {start} + {length}) does not fit in [0, {p})")]
    Interval { start: u64, length: u64, p: u64 },

    #[error("{0}")]
    InvalidConfig(String),

    #[error("{0} requires a nonempty input")]
    EmptyInput(&'static str),

    #[error("{what} needs {needed} but the budget allows {limit}")]
    OverBudget {
        what: &'static str,
        needed: u64,
        limit: u64,
    },

    #[error("gave up after {attempts} draws while sampling {what}")]
    RetryCapExceeded { what: &'static str, attempts: u64 },

    #[error("rigorous bound violated: {quantity} observed {observed}, bound {bound}")]
    BoundViolation {
        quantity: String,
        observed: u64,
        bound: f64,
    },
}

impl Error {
    /// True for refusals caused by a memory or step budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::OverBudget { .. })
    }
}
