use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::Zero;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::runner::{run_chunked, RunConfig};
use super::{EstimateRow, ExperimentReport};
use crate::dyadic::DyadicProb;
use crate::error::{invalid, Error, Result};
use crate::exact::{
    influence_exact, influence_oracle_profile, influence_profile_exact, influence_profile_float,
    BinomialRow, EXACT_PROFILE_LIMIT,
};
use crate::walks::{barrier_floor, switch_walk, BitSequence};

/// How an influence profile is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfluenceMode {
    /// Exact up to the profile limit, double precision above it.
    Auto,
    Exact,
    Float,
    Oracle,
    Mc,
}

impl fmt::Display for InfluenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InfluenceMode::Auto => "auto",
            InfluenceMode::Exact => "exact",
            InfluenceMode::Float => "float",
            InfluenceMode::Oracle => "oracle",
            InfluenceMode::Mc => "mc",
        };
        f.write_str(s)
    }
}

impl FromStr for InfluenceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(InfluenceMode::Auto),
            "exact" => Ok(InfluenceMode::Exact),
            "float" => Ok(InfluenceMode::Float),
            "oracle" => Ok(InfluenceMode::Oracle),
            "mc" => Ok(InfluenceMode::Mc),
            other => Err(invalid(format!("unknown influence mode {other:?}"))),
        }
    }
}

/// Marks which bits are pivotal for "the switch walk stays positive".
///
/// Flipping bit `m` reflects the path from step `m` on about `Z_{m-1}`, so
/// the flipped walk stays positive iff the prefix before `m` does and
/// `max_{i >= m} Z_i < 2 Z_{m-1}`.
fn pivotal_bits(bits: &BitSequence, out: &mut [bool]) {
    let path = switch_walk(bits, 0);
    let z = path.positions();
    let n = bits.len();
    let mut suffix_max = vec![i64::MIN; n + 2];
    for i in (1..=n).rev() {
        suffix_max[i] = suffix_max[i + 1].max(z[i]);
    }
    let holds = z[1..].iter().all(|&v| v > 0);
    let mut prefix_ok = true;
    for m in 1..=n {
        let flipped = prefix_ok && suffix_max[m] < 2 * z[m - 1];
        out[m - 1] = flipped != holds;
        prefix_ok &= z[m] > 0;
    }
}

fn profile_rows(n: usize, mode: InfluenceMode, cfg: &RunConfig) -> Result<Vec<EstimateRow>> {
    let exact_rows = |values: Vec<DyadicProb>, name: &str| -> Vec<EstimateRow> {
        values
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let mut row = EstimateRow::new(name, n, 0, p.to_f64());
                row.m = Some(i + 1);
                row.exact = Some(p.to_string());
                row
            })
            .collect()
    };
    let float_rows = |values: Vec<f64>| -> Vec<EstimateRow> {
        values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let mut row = EstimateRow::new("influence_float", n, 0, v);
                row.m = Some(i + 1);
                row
            })
            .collect()
    };
    match mode {
        InfluenceMode::Auto if n <= EXACT_PROFILE_LIMIT => {
            profile_rows(n, InfluenceMode::Exact, cfg)
        }
        InfluenceMode::Auto | InfluenceMode::Float => Ok(float_rows(influence_profile_float(n))),
        InfluenceMode::Exact if n <= EXACT_PROFILE_LIMIT => {
            Ok(exact_rows(influence_profile_exact(n)?, "influence_exact"))
        }
        InfluenceMode::Exact => {
            let values = (1..=n)
                .map(|m| influence_exact(n, m))
                .collect::<Result<Vec<_>>>()?;
            Ok(exact_rows(values, "influence_exact"))
        }
        InfluenceMode::Oracle => Ok(exact_rows(influence_oracle_profile(n)?, "influence_oracle")),
        InfluenceMode::Mc => {
            let counts = run_chunked(
                cfg,
                || vec![0u64; n],
                |rng, acc: &mut Vec<u64>| {
                    let words = (0..n.div_ceil(64)).map(|_| rng.next_u64()).collect();
                    let bits = BitSequence::from_words(words, n);
                    let mut piv = vec![false; n];
                    pivotal_bits(&bits, &mut piv);
                    for (c, p) in acc.iter_mut().zip(piv) {
                        *c += u64::from(p);
                    }
                    Ok(())
                },
            )?;
            let t = cfg.trials as f64;
            Ok(counts
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    let p = c as f64 / t;
                    let mut row = EstimateRow::new("influence_mc", n, cfg.trials, p);
                    row.m = Some(i + 1);
                    row.stderr = (cfg.trials >= 2).then(|| (p * (1.0 - p) / (t - 1.0)).sqrt());
                    row
                })
                .collect())
        }
    }
}

/// `(I_m(P_n))_{m = 1..=n}` by the chosen method.
pub fn influence_profile(
    n: usize,
    mode: InfluenceMode,
    cfg: &RunConfig,
) -> Result<ExperimentReport> {
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    let start = Instant::now();
    let mut rows = profile_rows(n, mode, cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    for row in &mut rows {
        row.seconds = seconds;
    }
    Ok(ExperimentReport::new(cfg.seed, rows))
}

/// Exact `P(Z_n >= x)` at `x = ⌈n^alpha⌉` (raised by one when its parity
/// differs from `n`) against `exp(-n^(2 alpha - 1) / 4)` and the Chernoff
/// bound `exp(-⌈n^alpha⌉^2 / 2n)`. Margins are natural-log gaps
/// `ln(bound) - ln(tail)`; nonnegative means the bound holds.
pub fn alpha_tail_report(n: usize, alpha: f64) -> Result<ExperimentReport> {
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    if !(alpha > 0.5 && alpha.is_finite()) {
        return Err(invalid(format!("alpha {alpha} must exceed 1/2")));
    }
    let start = Instant::now();
    let ceil = barrier_floor(n, alpha);
    let x = if (ceil - n as i64).rem_euclid(2) == 1 {
        ceil + 1
    } else {
        ceil
    };
    let row = BinomialRow::new(n);
    let tail = DyadicProb::from_count(row.count_between(x, n as i64), n as u64);
    let nf = n as f64;
    let ln_bound = -nf.powf(2.0 * alpha - 1.0) / 4.0;
    let ln_chernoff = -((ceil * ceil) as f64) / (2.0 * nf);
    let ln_tail = if tail.is_zero() {
        f64::NEG_INFINITY
    } else {
        tail.ln()
    };
    let seconds = start.elapsed().as_secs_f64();
    let rows = [
        ("tail_exact", tail.to_f64(), Some(tail.to_string())),
        ("tail_bound", ln_bound.exp(), None),
        ("tail_chernoff", ln_chernoff.exp(), None),
        ("tail_margin_bound", ln_bound - ln_tail, None),
        ("tail_margin_chernoff", ln_chernoff - ln_tail, None),
    ]
    .into_iter()
    .map(|(name, est, exact)| {
        let mut r = EstimateRow::new(name, n, 0, est);
        r.alpha = Some(alpha);
        r.x = Some(x);
        r.exact = exact;
        r.seconds = seconds;
        r
    })
    .collect();
    Ok(ExperimentReport::new(0, rows))
}

/// All `(j, x)` with `2 <= j <= max_j`, `1 <= x <= j` where
/// `P(Z_j >= x) > exp(-x^2 / 2j)`; empty when the bound always holds.
///
/// Compared in log space from the exact dyadic tail.
pub fn chernoff_violations(max_j: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    let mut row = BinomialRow::new(1);
    for j in 2..=max_j {
        row = row.next();
        for x in 1..=j as i64 {
            let c = row.count_between(x, j as i64);
            if c.is_zero() {
                continue;
            }
            let ln_tail = DyadicProb::from_count(c, j as u64).ln();
            if ln_tail > -((x * x) as f64) / (2.0 * j as f64) {
                out.push((j, x));
            }
        }
    }
    out
}
