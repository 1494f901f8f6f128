//! Brute-force enumeration over all `2^n` bit strings.

use crate::dyadic::DyadicProb;
use crate::error::{Error, Result};
use crate::walks::BitSequence;

/// Largest `n` the enumeration routes accept.
pub const MAX_ORACLE_N: usize = 20;

fn check_budget(n: usize) -> Result<()> {
    if n > MAX_ORACLE_N {
        return Err(Error::BudgetExceeded {
            n,
            max: MAX_ORACLE_N,
        });
    }
    Ok(())
}

/// Does the switch walk of `bits` stay strictly positive for all its steps?
fn stays_positive(bits: &BitSequence) -> bool {
    let mut z = 0i64;
    let mut dir = 1i64;
    bits.iter().all(|x| {
        dir *= i64::from(x);
        z += dir;
        z > 0
    })
}

/// Influence of every bit `m = 1..=n` on the stay-positive event, by
/// flipping each bit of each string and re-walking.
pub fn influence_oracle_profile(n: usize) -> Result<Vec<DyadicProb>> {
    check_budget(n)?;
    let mut pivotal = vec![0u64; n];
    for bits in BitSequence::enumerate(n) {
        let base = stays_positive(&bits);
        for (m, count) in pivotal.iter_mut().enumerate() {
            let mut flipped = bits.clone();
            flipped.flip(m);
            if stays_positive(&flipped) != base {
                *count += 1;
            }
        }
    }
    Ok(pivotal
        .into_iter()
        .map(|c| DyadicProb::from_count(c, n as u64))
        .collect())
}

pub fn influence_oracle(n: usize, m: usize) -> Result<DyadicProb> {
    check_budget(n)?;
    if m == 0 || m > n {
        return Err(Error::IndexOutOfRange { index: m, len: n });
    }
    let mut count = 0u64;
    for bits in BitSequence::enumerate(n) {
        let mut flipped = bits.clone();
        flipped.flip(m - 1);
        if stays_positive(&flipped) != stays_positive(&bits) {
            count += 1;
        }
    }
    Ok(DyadicProb::from_count(count, n as u64))
}

/// Probability of an arbitrary event on `n` fair bits, by enumeration.
pub fn enumerate_prob(n: usize, event: impl Fn(&BitSequence) -> bool) -> Result<DyadicProb> {
    check_budget(n)?;
    let count = BitSequence::enumerate(n).filter(|b| event(b)).count() as u64;
    Ok(DyadicProb::from_count(count, n as u64))
}
