//! Dynamical bit strings: each bit rerandomises at the times of its own
//! rate-1 Poisson clock.

pub mod clocks;
pub mod coupling;
pub mod segtree;
pub mod timeline;

pub use clocks::{ClockEvent, ClockSet};
pub use coupling::{
    decompose_periods, flip_probability, mirror_residual, uv_decomposition, w_path,
    PeriodDecomposition, TwoTimeCoupling, UvSplit,
};
pub use segtree::ReflectTree;
pub use timeline::{
    kappa_measure, naive_timeline, pair_energy, positivity_timeline, positivity_trace,
    PositivityEngine, PositivityTimeline, TraceRow,
};

/// Shorthand for [`ClockSet::sample`].
pub fn sample_clocks(n: usize, horizon: f64, seed: u64) -> crate::Result<ClockSet> {
    ClockSet::sample(n, horizon, seed)
}

/// Shorthand for [`TwoTimeCoupling::sample`].
pub fn two_time_sample(n: usize, t: f64, seed: u64) -> crate::Result<TwoTimeCoupling> {
    TwoTimeCoupling::sample(n, t, seed)
}

/// Shorthand for [`ClockSet::bits_at`].
pub fn bits_at(clocks: &ClockSet, t: f64) -> crate::Result<crate::BitSequence> {
    clocks.bits_at(t)
}
