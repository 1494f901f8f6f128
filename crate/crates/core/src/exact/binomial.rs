use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Binomial counts `C(j, k)` for one step count `j`, keyed by walk
/// position `z = 2k - j`, with prefix sums for O(1) interval counts.
#[derive(Debug, Clone)]
pub struct BinomialRow {
    j: usize,
    counts: Vec<BigUint>,
    /// `prefix[k] = C(j, 0) + ... + C(j, k - 1)`
    prefix: Vec<BigUint>,
}

impl BinomialRow {
    pub fn new(j: usize) -> Self {
        let mut counts = Vec::with_capacity(j + 1);
        let mut c = BigUint::one();
        counts.push(c.clone());
        for k in 0..j {
            c = c * (j - k) / (k + 1);
            counts.push(c.clone());
        }
        Self::from_counts(j, counts)
    }

    fn from_counts(j: usize, counts: Vec<BigUint>) -> Self {
        let mut prefix = Vec::with_capacity(j + 2);
        let mut acc = BigUint::zero();
        prefix.push(acc.clone());
        for c in &counts {
            acc += c;
            prefix.push(acc.clone());
        }
        Self { j, counts, prefix }
    }

    /// Pascal step: the row for `j + 1`.
    pub fn next(&self) -> Self {
        let j = self.j + 1;
        let mut counts = Vec::with_capacity(j + 1);
        counts.push(BigUint::one());
        for k in 1..j {
            counts.push(&self.counts[k - 1] + &self.counts[k]);
        }
        counts.push(BigUint::one());
        Self::from_counts(j, counts)
    }

    pub fn steps(&self) -> usize {
        self.j
    }

    /// Number of `j`-step paths from 0 ending at `z`.
    pub fn count_at(&self, z: i64) -> BigUint {
        let j = self.j as i64;
        if z.abs() > j || (z + j) % 2 != 0 {
            return BigUint::zero();
        }
        self.counts[((z + j) / 2) as usize].clone()
    }

    /// Number of `j`-step paths from 0 ending in `[lo, hi]`.
    pub fn count_between(&self, lo: i64, hi: i64) -> BigUint {
        let j = self.j as i64;
        let lo = lo.max(-j);
        let hi = hi.min(j);
        if lo > hi {
            return BigUint::zero();
        }
        let k_lo = (lo + j + 1) / 2;
        let k_hi = (hi + j) / 2;
        if k_lo > k_hi {
            return BigUint::zero();
        }
        &self.prefix[k_hi as usize + 1] - &self.prefix[k_lo as usize]
    }

    /// Number of paths from 0 that stay strictly inside `(-below, above)`
    /// for all `j` steps, by the iterated reflection series over intervals
    /// shifted by multiples of the period `2 * (below + above)`.
    pub fn confined_count(&self, below: i64, above: i64) -> BigUint {
        if below <= 0 || above <= 0 {
            return if self.j == 0 && below > 0 && above > 0 {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        let j = self.j as i64;
        let period = 2 * (below + above);
        let reach = j / period + 2;
        let mut plus = BigUint::zero();
        let mut minus = BigUint::zero();
        for k in -reach..=reach {
            let shift = k * period;
            plus += self.count_between(shift - below + 1, shift + above - 1);
            minus += self.count_between(shift + above + 1, shift + 2 * above + below - 1);
        }
        plus - minus
    }
}

/// Rows `0..=max_j`, built once by Pascal's rule and shared read-only.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    rows: Vec<BinomialRow>,
}

impl BinomialTable {
    pub fn new(max_j: usize) -> Self {
        let mut rows = Vec::with_capacity(max_j + 1);
        let mut row = BinomialRow::new(0);
        for _ in 0..max_j {
            let next = row.next();
            rows.push(row);
            row = next;
        }
        rows.push(row);
        Self { rows }
    }

    pub fn max_steps(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, j: usize) -> &BinomialRow {
        &self.rows[j]
    }
}
