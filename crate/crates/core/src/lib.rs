//! Switch ("coin-turning") random walks and their dynamical versions.
//!
//! The switch walk `Z_n = Σ_k Π_{j≤k} X_j` has the law of a simple
//! symmetric random walk but reacts to rerandomising a single bit by
//! reflecting its whole future. This crate provides:
//!
//! * [`walks`]: bit strings, compass and switch paths, barrier predicates;
//! * [`exact`]: exact dyadic probabilities of static events, including the
//!   influence profile of the stay-positive event, with brute-force oracles;
//! * [`dynamics`]: Poisson clocks, two-time couplings, period structure and
//!   an event-driven engine tracking positivity through continuous time;
//! * [`experiments`]: reproducible Monte Carlo estimators built on the above.

pub mod dyadic;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod walks;

pub use dyadic::DyadicProb;
pub use error::{Error, Result};
pub use walks::{BitSequence, WalkKind, WalkPath};
