//! Allocation protocols.
//!
//! Every protocol returns a [`RunResult`] carrying the allocation, the
//! fairness report under the protocol's own criterion, the per-group
//! guarantee the protocol promises on that instance, and a [`Trace`] of how
//! it got there. Weighted-approval runs also carry a [`Ledger`]: the fictitious
//! payments between groups and members whose invariants certify the
//! guarantee at runtime.

mod best;
mod line;
mod local;
pub mod render;
mod wav;

pub use best::best_k_protocol;
pub use line::{line2, linek};
pub use local::identical_local_search;
pub use wav::{cwav2, rwav2, rwav2_enhanced, rwavk};

use std::fmt;

use crate::budgets::Dyadic;
use crate::fairness::{Criterion, FairnessReport};
use crate::model::{Allocation, Bundle, Rational};

/// `(good, group)` in the order goods were handed out.
type Picks = Vec<(usize, usize)>;

/// A number in a trace or ledger: exact for two-group runs, floating point
/// for `k`-group runs.
#[derive(Clone, Debug, PartialEq)]
pub enum Amount {
    Exact(Dyadic),
    Real(f64),
}

impl Amount {
    pub fn to_f64(&self) -> f64 {
        match self {
            Amount::Exact(d) => d.to_f64(),
            Amount::Real(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Amount::Exact(d) => d.is_zero(),
            Amount::Real(x) => *x == 0.0,
        }
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Amount::Exact(d) => f.write_str(&d.to_trace_string()),
            Amount::Real(x) if *x == 0.0 => f.write_str("0"),
            Amount::Real(x) => write!(f, "{x:?}"),
        }
    }
}

/// Fraction of a group a protocol promises to satisfy.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    Exact(Rational),
    Real(f64),
}

impl Bound {
    pub fn to_f64(&self) -> f64 {
        match self {
            Bound::Exact(q) => crate::budgets::rational_to_f64(q),
            Bound::Real(x) => *x,
        }
    }

    /// Whether `fraction` meets the bound, with slack `tolerance` for real bounds.
    pub fn is_met_by(&self, fraction: &Rational, tolerance: f64) -> bool {
        match self {
            Bound::Exact(q) => fraction >= q,
            Bound::Real(x) => crate::budgets::rational_to_f64(fraction) >= x - tolerance,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Exact(q) => write!(f, "{q}"),
            Bound::Real(x) => write!(f, "{x}"),
        }
    }
}

/// One row of a turn's member table.
#[derive(Clone, Debug, PartialEq)]
pub struct MemberRow {
    pub agent: usize,
    pub desired: Bundle,
    pub r: i64,
    /// Goods still needed; may go negative once the agent has more than enough.
    pub s: i64,
    pub weight: Amount,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentState {
    pub r: i64,
    pub s: i64,
    pub balance: Amount,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TurnRecord {
    /// 1-based.
    pub turn: usize,
    pub group: usize,
    pub remaining: Bundle,
    pub members: Vec<MemberRow>,
    /// Total weight of each remaining good, in index order.
    pub good_weights: Vec<(usize, Amount)>,
    pub pick: usize,
    /// Balance of each participating group after the turn.
    pub group_balances: Vec<(usize, Amount)>,
    /// State of every agent of each participating group after the turn.
    pub agents: Vec<(usize, Vec<AgentState>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineStep {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// `(group, yes, members)` for each group asked, in the order asked.
    pub answers: Vec<(usize, usize, usize)>,
    pub claimed_by: Option<usize>,
    pub remainder_to: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveRecord {
    pub good: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Trace {
    Picks {
        play_order: Vec<usize>,
        turns: Vec<TurnRecord>,
    },
    Line {
        /// Line criterion label, e.g. `EF1` or `PROP-2`.
        label: String,
        steps: Vec<LineStep>,
    },
    LocalSearch {
        initial: Vec<Bundle>,
        moves: Vec<MoveRecord>,
    },
    /// A group got `good` outright and the rest went to `rest_to` (if given)
    /// or on to the following steps.
    Shortcut {
        group: usize,
        good: usize,
        rest_to: Option<usize>,
    },
    Sequence(Vec<Trace>),
}

/// Fictitious payments of a weighted-approval run.
#[derive(Clone, Debug, PartialEq)]
pub struct Ledger {
    pub initial_group_balances: Vec<(usize, Amount)>,
    pub final_group_balances: Vec<(usize, Amount)>,
    /// Members with nothing left to need at the end, per participating group.
    pub satisfied: Vec<(usize, usize)>,
    /// Broken invariants, empty on a correct run.
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub protocol: &'static str,
    pub allocation: Allocation,
    pub criteria: Vec<Criterion>,
    pub report: FairnessReport,
    pub guarantee: Vec<Bound>,
    pub trace: Trace,
    pub ledger: Option<Ledger>,
}

impl RunResult {
    /// Groups whose happy fraction falls short of their guarantee.
    pub fn shortfalls(&self, tolerance: f64) -> Vec<usize> {
        self.guarantee
            .iter()
            .enumerate()
            .filter(|(i, b)| !b.is_met_by(&self.report.fraction(*i), tolerance))
            .map(|(i, _)| i)
            .collect()
    }
}
