//! Bit strings and the two walks built from them.
//!
//! A [`BitSequence`] holds the signs `X_1, ..., X_n`. The compass walk adds
//! the signs directly; the switch walk adds the running products
//! `S_k = X_1 * ... * X_k`, so every `-1` bit reverses the walk's direction.
//!
//! Bits are packed 64 to a word (a set bit means `-1`), which lets the
//! endpoint of either walk be computed with popcounts.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite string of `±1` signs, packed into machine words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitSequence {
    words: Vec<u64>,
    len: usize,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

fn tail_mask(len: usize) -> u64 {
    match len % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Bit `i` of the result is the XOR of bits `0..=i` of `x`.
#[inline]
fn prefix_xor(mut x: u64) -> u64 {
    x ^= x << 1;
    x ^= x << 2;
    x ^= x << 4;
    x ^= x << 8;
    x ^= x << 16;
    x ^= x << 32;
    x
}

impl BitSequence {
    /// `n` copies of `+1`.
    pub fn all_plus(n: usize) -> Self {
        Self {
            words: vec![0; word_count(n)],
            len: n,
        }
    }

    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut seq = Self::all_plus(signs.len());
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => seq.words[i / 64] |= 1 << (i % 64),
                other => return Err(Error::InvalidSign(other.into())),
            }
        }
        Ok(seq)
    }

    /// Builds a sequence from packed words; bits past `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(word_count(len), 0);
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Self { words, len }
    }

    /// All `2^n` sequences of length `n`, in counting order.
    pub fn enumerate(n: usize) -> impl Iterator<Item = BitSequence> {
        assert!(n < 64, "enumeration of 2^{n} strings is not supported");
        (0u64..1 << n).map(move |w| BitSequence::from_words(vec![w], n))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Sign at 0-based position `i`.
    pub fn get(&self, i: usize) -> i8 {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        if self.words[i / 64] >> (i % 64) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn set(&mut self, i: usize, sign: i8) -> Result<()> {
        if i >= self.len {
            return Err(Error::IndexOutOfRange {
                index: i + 1,
                len: self.len,
            });
        }
        match sign {
            1 => self.words[i / 64] &= !(1 << (i % 64)),
            -1 => self.words[i / 64] |= 1 << (i % 64),
            other => return Err(Error::InvalidSign(other.into())),
        }
        Ok(())
    }

    /// Negates the sign at 0-based position `i`.
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn iter(&self) -> impl Iterator<Item = i8> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn to_signs(&self) -> Vec<i8> {
        self.iter().collect()
    }

    /// Number of `-1` entries.
    pub fn count_minus(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `Y_n`: sum of the signs.
    pub fn compass_endpoint(&self) -> i64 {
        self.len as i64 - 2 * self.count_minus() as i64
    }

    /// `Z_n`: sum of the running products, computed word by word.
    pub fn switch_endpoint(&self) -> i64 {
        let mut parity = 0u32;
        let mut negative_steps = 0i64;
        let last = self.words.len().saturating_sub(1);
        for (k, &w) in self.words.iter().enumerate() {
            let mut p = prefix_xor(w);
            if parity == 1 {
                p = !p;
            }
            if k == last {
                p &= tail_mask(self.len);
            }
            negative_steps += p.count_ones() as i64;
            parity ^= w.count_ones() & 1;
        }
        self.len as i64 - 2 * negative_steps
    }
}

impl std::fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("BitSequence(")?;
        for s in self.iter() {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkKind {
    Compass,
    Switch,
}

impl std::fmt::Display for WalkKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WalkKind::Compass => "compass",
            WalkKind::Switch => "switch",
        })
    }
}

/// Absolute positions `Z_0, ..., Z_n` of a walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkPath {
    kind: WalkKind,
    positions: Vec<i64>,
}

impl WalkPath {
    pub fn kind(&self) -> WalkKind {
        self.kind
    }

    pub fn origin(&self) -> i64 {
        self.positions[0]
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn end(&self) -> i64 {
        *self.positions.last().expect("a path holds its origin")
    }
}

pub fn switch_walk(bits: &BitSequence, origin: i64) -> WalkPath {
    let mut positions = Vec::with_capacity(bits.len() + 1);
    positions.push(origin);
    let mut direction = 1i64;
    let mut z = origin;
    for x in bits.iter() {
        direction *= i64::from(x);
        z += direction;
        positions.push(z);
    }
    WalkPath {
        kind: WalkKind::Switch,
        positions,
    }
}

pub fn compass_walk(bits: &BitSequence, origin: i64) -> WalkPath {
    let mut positions = Vec::with_capacity(bits.len() + 1);
    positions.push(origin);
    let mut z = origin;
    for x in bits.iter() {
        z += i64::from(x);
        positions.push(z);
    }
    WalkPath {
        kind: WalkKind::Compass,
        positions,
    }
}

pub fn walk(kind: WalkKind, bits: &BitSequence, origin: i64) -> WalkPath {
    match kind {
        WalkKind::Compass => compass_walk(bits, origin),
        WalkKind::Switch => switch_walk(bits, origin),
    }
}

/// Switch path of the same bits with bit `m` (1-based) negated.
///
/// Negating `X_m` negates every running product from step `m` on, which
/// reflects the path after step `m - 1` about `Z_{m-1}`.
pub fn flip_suffix_image(path: &WalkPath, m: usize) -> Result<WalkPath> {
    if path.kind != WalkKind::Switch {
        return Err(Error::WrongWalkKind { expected: "switch" });
    }
    let n = path.len();
    if m == 0 || m > n {
        return Err(Error::IndexOutOfRange { index: m, len: n });
    }
    let mirror = 2 * path.positions[m - 1];
    let positions = path
        .positions
        .iter()
        .enumerate()
        .map(|(i, &z)| if i < m { z } else { mirror - z })
        .collect();
    Ok(WalkPath {
        kind: WalkKind::Switch,
        positions,
    })
}

/// Returns `Some((p, q))` when `alpha == p / q` for a small denominator.
fn small_rational(alpha: f64) -> Option<(u32, u32)> {
    (1..=64u32).find_map(|q| {
        let p = (alpha * f64::from(q)).round();
        ((alpha - p / f64::from(q)).abs() < 1e-13 && p >= 0.0).then_some((p as u32, q))
    })
}

/// Integer floors `⌈i^alpha⌉` for `i = 1..=n` (index 0 of the result is `i = 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarrierFloors {
    floors: Vec<i64>,
}

impl BarrierFloors {
    pub fn new(n: usize, alpha: f64) -> Self {
        let rational = small_rational(alpha);
        let floors = (1..=n).map(|i| ceil_pow(i, alpha, rational)).collect();
        Self { floors }
    }

    /// Floor at 1-based step `i`.
    #[inline]
    pub fn at(&self, i: usize) -> i64 {
        self.floors[i - 1]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.floors
    }
}

fn ceil_pow(i: usize, alpha: f64, rational: Option<(u32, u32)>) -> i64 {
    let v = (i as f64).powf(alpha);
    let r = v.round();
    if (v - r).abs() >= 1e-9 {
        return v.ceil() as i64;
    }
    // i^alpha is within rounding distance of the integer r: decide i^alpha <= r exactly.
    let r = r as i64;
    match rational {
        Some((p, q)) => {
            let lhs = BigUint::from(i).pow(p);
            let rhs = BigUint::from(r.max(0) as u64).pow(q);
            if lhs <= rhs {
                r
            } else {
                r + 1
            }
        }
        None => r,
    }
}

/// `⌈i^alpha⌉` with exact handling of integer powers.
pub fn barrier_floor(i: usize, alpha: f64) -> i64 {
    ceil_pow(i, alpha, small_rational(alpha))
}

/// True iff `Z_i >= i^alpha` for every step `1 <= i <= n`.
pub fn barrier_positive(path: &WalkPath, alpha: f64) -> bool {
    let floors = BarrierFloors::new(path.len(), alpha);
    barrier_positive_with(path, &floors)
}

pub fn barrier_positive_with(path: &WalkPath, floors: &BarrierFloors) -> bool {
    path.positions[1..]
        .iter()
        .zip(floors.as_slice())
        .all(|(&z, &b)| z >= b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &[i8]) -> BitSequence {
        BitSequence::from_signs(s).unwrap()
    }

    #[test]
    fn switch_walk_examples() {
        assert_eq!(
            switch_walk(&bits(&[1, -1, 1]), 0).positions(),
            &[0, 1, 0, -1]
        );
        assert_eq!(
            switch_walk(&bits(&[1, 1, 1, 1, 1]), 0).positions(),
            &[0, 1, 2, 3, 4, 5]
        );
        assert_eq!(switch_walk(&bits(&[]), 7).positions(), &[7]);
    }

    #[test]
    fn compass_walk_examples() {
        assert_eq!(
            compass_walk(&bits(&[1, -1, 1]), 0).positions(),
            &[0, 1, 0, 1]
        );
        assert_eq!(compass_walk(&bits(&[-1, -1]), 0).positions(), &[0, -1, -2]);
    }

    #[test]
    fn rejects_non_signs() {
        assert_eq!(BitSequence::from_signs(&[1, 0]), Err(Error::InvalidSign(0)));
        let mut b = BitSequence::all_plus(2);
        assert!(b.set(1, 3).is_err());
        assert!(b.set(2, 1).is_err());
    }

    #[test]
    fn flip_suffix_examples() {
        let p = switch_walk(&bits(&[1, 1, 1]), 0);
        assert_eq!(
            flip_suffix_image(&p, 2).unwrap().positions(),
            &[0, 1, 0, -1]
        );
        let q = switch_walk(&bits(&[1, -1, -1, 1]), 0);
        let neg: Vec<i64> = q.positions().iter().map(|z| -z).collect();
        assert_eq!(
            flip_suffix_image(&q, 1).unwrap().positions(),
            neg.as_slice()
        );
        assert!(flip_suffix_image(&p, 0).is_err());
        assert!(flip_suffix_image(&p, 4).is_err());
        let c = compass_walk(&bits(&[1]), 0);
        assert!(matches!(
            flip_suffix_image(&c, 1),
            Err(Error::WrongWalkKind { .. })
        ));
    }

    #[test]
    fn barrier_examples() {
        let path = |z: &[i64]| WalkPath {
            kind: WalkKind::Switch,
            positions: z.to_vec(),
        };
        assert!(barrier_positive(&path(&[0, 1, 2, 1]), 0.0));
        assert!(!barrier_positive(&path(&[0, 1, 0, 1]), 0.0));
        assert!(barrier_positive(&path(&[0, 1, 2, 3, 4]), 0.5));
        assert!(!barrier_positive(&path(&[0, 1, 1, 2, 2]), 0.5));
    }

    #[test]
    fn floors_at_exact_powers() {
        assert_eq!(barrier_floor(4, 0.5), 2);
        assert_eq!(barrier_floor(5, 0.5), 3);
        assert_eq!(barrier_floor(16, 0.25), 2);
        assert_eq!(barrier_floor(17, 0.25), 3);
        assert_eq!(barrier_floor(16, 0.75), 8);
        assert_eq!(barrier_floor(1000, 1.0 / 3.0), 10);
        assert_eq!(barrier_floor(1001, 1.0 / 3.0), 11);
        assert_eq!(barrier_floor(9, 0.0), 1);
        let floors = BarrierFloors::new(4, 0.5);
        assert_eq!(floors.as_slice(), &[1, 2, 2, 2]);
    }

    #[test]
    fn packed_endpoints_match_paths() {
        for n in 0..=12 {
            for b in BitSequence::enumerate(n) {
                assert_eq!(b.switch_endpoint(), switch_walk(&b, 0).end());
                assert_eq!(b.compass_endpoint(), compass_walk(&b, 0).end());
            }
        }
    }

    #[test]
    fn long_packed_endpoint() {
        let signs: Vec<i8> = (0..1000)
            .map(|i: u32| if (i * 7919 % 13) < 6 { -1 } else { 1 })
            .collect();
        let b = bits(&signs);
        assert_eq!(b.switch_endpoint(), switch_walk(&b, 0).end());
        assert_eq!(b.to_signs(), signs);
    }
}
