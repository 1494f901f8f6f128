//! Monte Carlo estimators with reproducible parallel streams.
//!
//! Trial `i` of a run with master seed `s` draws all of its randomness from
//! ChaCha8 seeded with `s` on stream `i`. Trials are grouped into fixed-size
//! chunks; chunk sums are reduced in chunk order with compensated
//! summation, so reports do not depend on the worker count.

mod influence;
mod kappa;
mod noise;
mod runner;

use std::time::{SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use influence::{alpha_tail_report, chernoff_violations, influence_profile, InfluenceMode};
pub use kappa::{kappa_experiment, phi_experiment};
pub use noise::{k_periods, noise_sensitivity_curve, u_abs_v_experiment};
pub use runner::{Moments, NeumaierSum, RunConfig, CHUNK_SIZE};

/// Identifies the random stream of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStreamSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStreamSpec {
    pub fn rng(&self) -> ChaCha8Rng {
        stream_rng(self.master_seed, self.stream_index)
    }
}

/// ChaCha8 keyed by `master_seed`, positioned on stream `stream_index`.
pub fn stream_rng(master_seed: u64, stream_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_index);
    rng
}

/// `eps_n = c / n^beta`.
pub fn eps_preset(n: usize, c: f64, beta: f64) -> f64 {
    c / (n as f64).powf(beta)
}

/// One estimate with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub experiment: String,
    pub n: usize,
    /// bit index for per-bit quantities
    pub m: Option<usize>,
    /// threshold for tail quantities
    pub x: Option<i64>,
    pub eps: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub kind: Option<String>,
    pub trials: u64,
    pub estimate: f64,
    pub stderr: Option<f64>,
    /// dyadic value `num/2^e` when the estimate is exact
    pub exact: Option<String>,
    pub seconds: f64,
}

impl EstimateRow {
    /// A row with only the required fields set.
    pub fn new(experiment: &str, n: usize, trials: u64, estimate: f64) -> Self {
        Self {
            experiment: experiment.to_string(),
            n,
            m: None,
            x: None,
            eps: None,
            gamma: None,
            alpha: None,
            kind: None,
            trials,
            estimate,
            stderr: None,
            exact: None,
            seconds: 0.0,
        }
    }

    /// The row with the wall-time cleared, for comparisons across runs.
    pub fn without_timing(&self) -> Self {
        Self {
            seconds: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub version: String,
    /// seconds since the Unix epoch
    pub timestamp: u64,
}

impl Provenance {
    pub fn new(master_seed: u64) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            master_seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<EstimateRow>,
    pub provenance: Provenance,
}

impl ExperimentReport {
    pub fn new(master_seed: u64, rows: Vec<EstimateRow>) -> Self {
        Self {
            rows,
            provenance: Provenance::new(master_seed),
        }
    }

    /// First row whose experiment name is `name`.
    pub fn row(&self, name: &str) -> Option<&EstimateRow> {
        self.rows.iter().find(|r| r.experiment == name)
    }

    /// Rows with timings cleared.
    pub fn untimed_rows(&self) -> Vec<EstimateRow> {
        self.rows.iter().map(EstimateRow::without_timing).collect()
    }
}
