//! Exact probabilities of static walk events.
//!
//! All results are [`DyadicProb`]s. Closed forms (binomial sums, the ballot
//! theorem, reflection series) are paired with the dynamic programs in
//! [`dp`] and the enumeration in [`oracle`] so each can be checked against
//! an independent route.

pub mod binomial;
pub mod dp;
pub mod float;
pub mod oracle;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicProb;
use crate::error::{invalid, Error, Result};
use crate::walks::BarrierFloors;

pub use binomial::{BinomialRow, BinomialTable};
pub use float::influence_profile_float;
pub use oracle::{influence_oracle, influence_oracle_profile, MAX_ORACLE_N};

/// Largest `n` for which influence profiles default to exact arithmetic.
pub const EXACT_PROFILE_LIMIT: usize = 512;

/// `P(Z_j = z)`.
pub fn position_prob(j: usize, z: i64) -> DyadicProb {
    DyadicProb::from_count(BinomialRow::new(j).count_at(z), j as u64)
}

/// Full law of `Z_j`, keyed by position.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDist {
    step: usize,
    probs: Vec<(i64, DyadicProb)>,
}

impl PositionDist {
    pub fn new(j: usize) -> Self {
        let row = BinomialRow::new(j);
        let probs = (0..=j)
            .map(|k| {
                let z = 2 * k as i64 - j as i64;
                (z, DyadicProb::from_count(row.count_at(z), j as u64))
            })
            .collect();
        Self { step: j, probs }
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// `(position, probability)` pairs over the support, in increasing position.
    pub fn iter(&self) -> impl Iterator<Item = &(i64, DyadicProb)> {
        self.probs.iter()
    }

    pub fn prob(&self, z: i64) -> DyadicProb {
        self.probs
            .iter()
            .find(|(p, _)| *p == z)
            .map(|(_, q)| q.clone())
            .unwrap_or_default()
    }
}

fn central_count(j: usize) -> BigUint {
    BinomialRow::new(j).count_at((j % 2) as i64)
}

/// `P(Z_i > 0 for i = 1..=n)`, equal to `C(n-1, ⌊(n-1)/2⌋) / 2^n`.
pub fn stay_positive_prob(n: usize) -> DyadicProb {
    if n == 0 {
        return DyadicProb::one();
    }
    DyadicProb::from_count(central_count(n - 1), n as u64)
}

/// `P(Z_i >= ⌈i^alpha⌉ for i = 1..=n)` by the barrier DP.
pub fn barrier_positive_prob(n: usize, alpha: f64) -> DyadicProb {
    barrier_positive_profile(n, alpha)
        .pop()
        .unwrap_or_else(DyadicProb::one)
}

/// `P(P_k^alpha)` for every `k = 1..=n` from a single DP pass.
pub fn barrier_positive_profile(n: usize, alpha: f64) -> Vec<DyadicProb> {
    let floors = BarrierFloors::new(n, alpha);
    dp::barrier_counts(&floors)
        .into_iter()
        .enumerate()
        .map(|(i, c)| DyadicProb::from_count(c, i as u64 + 1))
        .collect()
}

/// `(P(Z_i > -z for all i <= j), P(Z_j in [-z+1, z]))`, the first by an
/// absorbing DP and the second by a binomial interval sum.
pub fn reflection_pair(z: i64, j: usize) -> Result<(DyadicProb, DyadicProb)> {
    if z < 1 || j < 1 {
        return Err(invalid(format!(
            "reflection_pair needs z, j >= 1 (got z={z}, j={j})"
        )));
    }
    let survive = dp::ConfinedCounts::run(0, -z, None, j).total();
    let window = BinomialRow::new(j).count_between(-z + 1, z);
    Ok((
        DyadicProb::from_count(survive, j as u64),
        DyadicProb::from_count(window, j as u64),
    ))
}

/// Number of `j`-step paths that stay positive and end at `z`, as
/// `z/j * C(j, (j+z)/2)`; fails if the division is not exact.
fn ballot_count(row: &BinomialRow, z: i64) -> Result<BigUint> {
    let j = row.steps();
    let c = row.count_at(z);
    if c.is_zero() || z < 1 {
        return Ok(BigUint::zero());
    }
    let scaled = c * BigUint::from(z as u64);
    let j_big = BigUint::from(j);
    if !(&scaled % &j_big).is_zero() {
        return Err(Error::Internal(format!(
            "ballot count for j={j}, z={z} is not an integer"
        )));
    }
    Ok(scaled / j_big)
}

/// `P(Z_i > 0 for i <= j, Z_j = z) = (z/j) P(Z_j = z)`.
pub fn ballot_prob(j: usize, z: i64) -> Result<DyadicProb> {
    if j == 0 || z < 1 || z > j as i64 || (j as i64 - z) % 2 != 0 {
        return Ok(DyadicProb::zero());
    }
    let row = BinomialRow::new(j);
    let c = row.count_at(z) * BigUint::from(z as u64);
    let den = BigUint::from(j) << j;
    DyadicProb::from_ratio(c, den)
}

/// `P_z(0 < Z_i < 2z for i = 1..=steps)` by the reflection series.
pub fn strip_stay_prob(z: i64, steps: usize) -> DyadicProb {
    strip_stay_prob_from(z, z, steps)
}

/// `P_x(0 < Z_i < 2z for i = 1..=steps)` for a start `x` inside the strip.
pub fn strip_stay_prob_from(x: i64, z: i64, steps: usize) -> DyadicProb {
    if x <= 0 || x >= 2 * z {
        return DyadicProb::zero();
    }
    let count = BinomialRow::new(steps).confined_count(x, 2 * z - x);
    DyadicProb::from_count(count, steps as u64)
}

/// Absorbing-barrier DP for the same strip probability.
pub fn strip_stay_prob_dp(x: i64, z: i64, steps: usize) -> DyadicProb {
    if x <= 0 || x >= 2 * z {
        return DyadicProb::zero();
    }
    let count = dp::ConfinedCounts::run(x, 0, Some(2 * z), steps).total();
    DyadicProb::from_count(count, steps as u64)
}

/// `P(Z_i > 0 for i <= j, Z_j = z)` by DP.
pub fn positive_endpoint_prob_dp(j: usize, z: i64) -> DyadicProb {
    let counts = dp::ConfinedCounts::run(0, 0, None, j);
    DyadicProb::from_count(counts.count_at(z), j as u64)
}

/// One summand of the influence formula for a bit `m >= 2`: the walk is at
/// `z = Z_{m-1}` having stayed positive, then over the remaining
/// `n - m + 1` steps stays positive and reaches `2z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceTerm {
    pub z: i64,
    /// `(z / (m-1)) P(Z_{m-1} = z)`
    #[serde(with = "dyadic_text")]
    pub ballot_weight: DyadicProb,
    /// `P_z(min Z_i > 0)`
    #[serde(with = "dyadic_text")]
    pub p_stay: DyadicProb,
    /// `P_z(0 < Z_i < 2z throughout)`
    #[serde(with = "dyadic_text")]
    pub p_strip: DyadicProb,
    /// `ballot_weight * (p_stay - p_strip)`
    #[serde(with = "dyadic_text")]
    pub contribution: DyadicProb,
}

mod dyadic_text {
    use super::DyadicProb;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &DyadicProb, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(p)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DyadicProb, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

fn check_index(n: usize, m: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::IndexOutOfRange { index: m, len: n });
    }
    Ok(())
}

/// Integer summands `(z, ballot, stay, strip)` of `I_m(P_n)` for `m >= 2`,
/// with ballot over `2^(m-1)` and the other two over `2^(n-m+1)`.
fn influence_counts(
    head: &BinomialRow,
    tail: &BinomialRow,
    n: usize,
    m: usize,
) -> Result<Vec<(i64, BigUint, BigUint, BigUint)>> {
    let j = (m - 1) as i64;
    let mut out = Vec::new();
    let mut z = if j % 2 == 0 { 2 } else { 1 };
    while z <= j {
        let ballot = ballot_count(head, z)?;
        let stay = tail.count_between(-z + 1, z);
        let strip = tail.confined_count(z, z);
        if strip > stay {
            return Err(Error::Internal(format!(
                "strip count exceeds stay count at n={n}, m={m}, z={z}"
            )));
        }
        out.push((z, ballot, stay, strip));
        z += 2;
    }
    Ok(out)
}

fn influence_from_table(table: &BinomialTable, n: usize, m: usize) -> Result<DyadicProb> {
    if m == 1 {
        // bit 1 is pivotal on P_n exactly when P_n holds
        let c = table.row(n - 1).count_at(((n - 1) % 2) as i64);
        return Ok(DyadicProb::from_count(c << 1, n as u64));
    }
    let mut total = BigUint::zero();
    for (_, ballot, stay, strip) in influence_counts(table.row(m - 1), table.row(n - m + 1), n, m)?
    {
        total += ballot * (stay - strip);
    }
    Ok(DyadicProb::from_count(total << 1, n as u64))
}

/// Exact influence `I_m(P_n)` of bit `m` on the stay-positive event.
pub fn influence_exact(n: usize, m: usize) -> Result<DyadicProb> {
    check_index(n, m)?;
    if m == 1 {
        return Ok(stay_positive_prob(n).scale(2, 0));
    }
    let (head, tail) = (BinomialRow::new(m - 1), BinomialRow::new(n - m + 1));
    let mut total = BigUint::zero();
    for (_, ballot, stay, strip) in influence_counts(&head, &tail, n, m)? {
        total += ballot * (stay - strip);
    }
    Ok(DyadicProb::from_count(total << 1, n as u64))
}

/// The summands of `I_m(P_n) = 2 Σ_z contribution_z` (empty for `m = 1`).
pub fn influence_terms(n: usize, m: usize) -> Result<Vec<InfluenceTerm>> {
    check_index(n, m)?;
    if m == 1 {
        return Ok(Vec::new());
    }
    let (head, tail) = (BinomialRow::new(m - 1), BinomialRow::new(n - m + 1));
    let head_exp = (m - 1) as u64;
    let tail_exp = (n - m + 1) as u64;
    influence_counts(&head, &tail, n, m)?
        .into_iter()
        .map(|(z, ballot, stay, strip)| {
            let diff = &stay - &strip;
            Ok(InfluenceTerm {
                z,
                ballot_weight: DyadicProb::from_count(ballot.clone(), head_exp),
                p_stay: DyadicProb::from_count(stay, tail_exp),
                p_strip: DyadicProb::from_count(strip, tail_exp),
                contribution: DyadicProb::from_count(ballot * diff, n as u64),
            })
        })
        .collect()
}

/// Exact `I_m(P_n)` for all `m = 1..=n` sharing one binomial table.
pub fn influence_profile_exact(n: usize) -> Result<Vec<DyadicProb>> {
    let table = BinomialTable::new(n);
    (1..=n)
        .map(|m| influence_from_table(&table, n, m))
        .collect()
}

/// `P(Z_j >= x)`.
pub fn tail_prob(j: usize, x: i64) -> DyadicProb {
    let row = BinomialRow::new(j);
    DyadicProb::from_count(row.count_between(x, j as i64), j as u64)
}

/// Does `P(Z_j >= x) <= exp(-x^2 / 2j)` hold?
pub fn chernoff_holds(j: usize, x: i64) -> bool {
    let tail = tail_prob(j, x);
    tail.is_zero() || tail.ln() <= -((x * x) as f64) / (2.0 * j as f64)
}
