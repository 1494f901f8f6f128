use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::stream_rng;
use crate::error::{invalid, Error, Result};

/// Trials per work item. Fixed so that the reduction tree does not
/// depend on how many workers run.
pub const CHUNK_SIZE: u64 = 1024;

/// Trials, master seed and worker count (0 = one per core).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl RunConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            workers: 0,
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be >= 1"));
        }
        Ok(())
    }
}

/// Kahan-Babuska-Neumaier running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sums of `K` per-trial statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<const K: usize> {
    pub count: u64,
    sums: [NeumaierSum; K],
}

impl<const K: usize> Default for Moments<K> {
    fn default() -> Self {
        Self {
            count: 0,
            sums: [NeumaierSum::default(); K],
        }
    }
}

impl<const K: usize> Moments<K> {
    pub fn push(&mut self, values: [f64; K]) {
        self.count += 1;
        for (s, v) in self.sums.iter_mut().zip(values) {
            s.add(v);
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        for (s, o) in self.sums.iter_mut().zip(&other.sums) {
            s.merge(o);
        }
    }

    pub fn sum(&self, k: usize) -> f64 {
        self.sums[k].value()
    }

    pub fn mean(&self, k: usize) -> f64 {
        self.sum(k) / self.count as f64
    }

    /// Standard error of `mean(k)` given the index `k2` of its square,
    /// using the sample (n - 1) variance; `None` for a single trial.
    pub fn stderr(&self, k: usize, k2: usize) -> Option<f64> {
        let c = self.count as f64;
        if self.count < 2 {
            return None;
        }
        let m = self.mean(k);
        let var = ((self.sum(k2) - c * m * m) / (c - 1.0)).max(0.0);
        Some((var / c).sqrt())
    }
}

/// Partial results that can be combined in chunk order.
pub(crate) trait Merge {
    fn merge_from(&mut self, other: &Self);
}

impl<const K: usize> Merge for Moments<K> {
    fn merge_from(&mut self, other: &Self) {
        self.merge(other);
    }
}

/// Integer counters, merged by addition.
impl Merge for Vec<u64> {
    fn merge_from(&mut self, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
    }
}

/// Runs `cfg.trials` independent trials in fixed chunks, each trial
/// folding into a chunk-local accumulator, and merges chunks in order.
pub(crate) fn run_chunked<A, I, F>(cfg: &RunConfig, init: I, trial: F) -> Result<A>
where
    A: Merge + Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut ChaCha8Rng, &mut A) -> Result<()> + Sync,
{
    cfg.validate()?;
    let chunks = cfg.trials.div_ceil(CHUNK_SIZE);
    let seed = cfg.seed;
    let trials = cfg.trials;
    let work = |c: u64| -> Result<A> {
        let mut acc = init();
        let end = ((c + 1) * CHUNK_SIZE).min(trials);
        for i in c * CHUNK_SIZE..end {
            let mut rng = stream_rng(seed, i);
            trial(&mut rng, &mut acc)?;
        }
        Ok(acc)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let parts: Vec<A> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(work)
            .collect::<Result<Vec<_>>>()
    })?;
    let mut total = init();
    for p in &parts {
        total.merge_from(p);
    }
    Ok(total)
}

/// [`run_chunked`] for trials that emit `K` statistics.
pub(crate) fn run_trials<const K: usize, F>(cfg: &RunConfig, trial: F) -> Result<Moments<K>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<[f64; K]> + Sync,
{
    run_chunked(cfg, Moments::default, |rng, acc: &mut Moments<K>| {
        acc.push(trial(rng)?);
        Ok(())
    })
}
