//! Democratic fair allocation of indivisible goods among groups of agents.
//!
//! Goods are allocated to groups and shared publicly inside each group, so a
//! single bundle has to be judged fair by many agents with different tastes.
//! An allocation is *h-democratic fair* when at least a fraction `h` of every
//! group considers it fair under a chosen per-agent criterion.
//!
//! The crate is organised as:
//!
//! * [`model`]: instances, bundles, valuations, allocations and the canonical
//!   JSON format.
//! * [`fairness`]: per-agent predicates (EFc, PROPc, maximin-share variants,
//!   1-of-best-c), the binary threshold map and democratic reports.
//! * [`budgets`]: exact dyadic budget/weight tables driving the weighted
//!   approval protocols, plus the impossibility bounds.
//! * [`protocols`]: round-robin weighted approval voting (deterministic,
//!   enhanced, k-group and coin-toss variants), line protocols, the
//!   identical-groups local search and the 1-of-best-k recursion.
//! * [`oracles`]: exhaustive solvers and adversarial instance generators.

pub mod budgets;
pub mod error;
pub mod fairness;
pub mod format;
pub mod model;
pub mod oracles;
pub mod protocols;
pub mod random;

pub use error::{Error, Result};
pub use model::{Agent, Allocation, Bundle, Instance, Rational, Valuation};
