//! Path-counting dynamic programs over (step, position).
//!
//! These are the slow, obviously-correct routes that the closed forms in
//! the parent module are checked against.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::walks::BarrierFloors;

/// Counts of `steps`-step paths from `start` that stay strictly inside
/// `(lower, upper)` at steps `1..=steps`, keyed by final position.
#[derive(Debug, Clone)]
pub struct ConfinedCounts {
    offset: i64,
    counts: Vec<BigUint>,
}

impl ConfinedCounts {
    pub fn run(start: i64, lower: i64, upper: Option<i64>, steps: usize) -> Self {
        let top = upper.map_or(start + steps as i64 + 1, |u| {
            u.min(start + steps as i64 + 1)
        });
        let bottom = lower.max(start - steps as i64 - 1);
        let offset = bottom;
        let width = (top - bottom + 1) as usize;
        let mut cur = vec![BigUint::zero(); width];
        let mut next = vec![BigUint::zero(); width];
        // step 0 is unconstrained
        if (bottom..=top).contains(&start) {
            cur[(start - offset) as usize] = BigUint::one();
        }
        for _ in 0..steps {
            for (idx, slot) in next.iter_mut().enumerate() {
                let z = idx as i64 + offset;
                slot.set_zero();
                if z <= lower || upper.is_some_and(|u| z >= u) {
                    continue;
                }
                if idx > 0 {
                    *slot += &cur[idx - 1];
                }
                if idx + 1 < width {
                    *slot += &cur[idx + 1];
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Self {
            offset,
            counts: cur,
        }
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn count_at(&self, z: i64) -> BigUint {
        let idx = z - self.offset;
        if idx < 0 || idx as usize >= self.counts.len() {
            return BigUint::zero();
        }
        self.counts[idx as usize].clone()
    }
}

/// Number of paths from 0 with `Z_i >= floor_i` for `i = 1..=k`, for every
/// prefix length `k = 1..=floors.len()` in one pass.
pub fn barrier_counts(floors: &BarrierFloors) -> Vec<BigUint> {
    let n = floors.as_slice().len();
    // positions 0..=n+1, index = position
    let mut cur = vec![BigUint::zero(); n + 2];
    let mut next = vec![BigUint::zero(); n + 2];
    cur[0] = BigUint::one();
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let floor = floors.at(i).max(1) as usize;
        for slot in next.iter_mut() {
            slot.set_zero();
        }
        let mut total = BigUint::zero();
        if floor <= i {
            let mut z = floor + (i - floor) % 2;
            while z <= i {
                let mut c = &cur[z - 1] + &cur[z + 1];
                std::mem::swap(&mut next[z], &mut c);
                total += &next[z];
                z += 2;
            }
        }
        std::mem::swap(&mut cur, &mut next);
        out.push(total);
    }
    out
}
