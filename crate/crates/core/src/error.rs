use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("agent {agent}: valuation has {found} entries, expected {expected}")]
    DimensionMismatch {
        agent: String,
        expected: usize,
        found: usize,
    },

    #[error("agent {agent}: tabular valuation is not monotone ({subset} is worth more than {superset})")]
    NonMonotone {
        agent: String,
        subset: String,
        superset: String,
    },

    #[error("agent {agent}: invalid value {detail}")]
    InvalidValue { agent: String, detail: String },

    #[error("group {0} has no agents")]
    EmptyGroup(usize),

    #[error("an instance needs at least 2 groups, found {0}")]
    TooFewGroups(usize),

    #[error("unknown good {0:?}")]
    UnknownGood(String),

    #[error("good label {0:?} is empty or duplicated")]
    BadGoodLabel(String),

    #[error("{what}: {m} goods exceeds the limit of {max}")]
    TooManyGoods { what: &'static str, m: usize, max: usize },

    #[error("good order is not a permutation of the goods")]
    BadOrder,

    #[error("allocation does not match the instance: {0}")]
    BadAllocation(String),

    #[error("unknown criterion {name:?}; expected one of: {expected}")]
    UnknownCriterion { name: String, expected: String },

    #[error("criterion {criterion} is not valid here: {reason}")]
    UnsupportedCriterion { criterion: String, reason: String },

    #[error("budget table only covers r <= {r_max}, asked for r = {r}")]
    BudgetRange { r: i64, r_max: i64 },

    #[error("protocol precondition failed: {0}")]
    Precondition(String),

    #[error("search space of {size} allocations exceeds the cap of {cap}")]
    CapExceeded { size: u128, cap: u128 },

    #[error("invalid generator spec: {0}")]
    BadGenerator(String),
}

impl Error {
    /// Cap violations are reported separately from validation failures by the CLI.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::TooManyGoods { .. })
    }
}
