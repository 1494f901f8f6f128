use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::walks::{switch_walk, BitSequence};

/// Probability that a bit differs between times 0 and `t`.
pub fn flip_probability(t: f64) -> f64 {
    -(-t).exp_m1() / 2.0
}

/// The bits at time 0 and time `t`, together with the change set
/// `D = { i : X_i(t) != X_i(0) }` (1-based, increasing).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTimeCoupling {
    t: f64,
    bits0: BitSequence,
    bits_t: BitSequence,
    changes: Vec<usize>,
}

/// Next change index after `from` with per-index probability `q`.
fn next_change<R: RngCore + ?Sized>(rng: &mut R, from: usize, log_keep: f64) -> usize {
    // geometric gap on {1, 2, ...}
    let u: f64 = 1.0 - rng.random::<f64>();
    let gap = (u.ln() / log_keep).floor();
    if gap >= (usize::MAX / 2) as f64 {
        return usize::MAX;
    }
    from + gap as usize + 1
}

impl TwoTimeCoupling {
    pub fn sample(n: usize, t: f64, seed: u64) -> Result<Self> {
        Self::sample_with(n, t, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// `bits0` uniform; each index independently flipped with probability
    /// `(1 - e^{-t}) / 2`.
    pub fn sample_with<R: RngCore + ?Sized>(n: usize, t: f64, rng: &mut R) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(invalid(format!("time gap {t} must be >= 0")));
        }
        let words: Vec<u64> = (0..n.div_ceil(64)).map(|_| rng.next_u64()).collect();
        let bits0 = BitSequence::from_words(words, n);
        let q = flip_probability(t);
        let mut changes = Vec::new();
        if q > 0.0 {
            let log_keep = (-q).ln_1p();
            let mut i = next_change(rng, 0, log_keep);
            while i <= n {
                changes.push(i);
                i = next_change(rng, i, log_keep);
            }
        }
        Ok(Self::from_changes(t, bits0, changes))
    }

    /// Samples indices until `k` changes have occurred; the coupling then
    /// covers exactly bits `1..=I_k`.
    pub fn sample_until_changes<R: RngCore + ?Sized>(
        t: f64,
        k: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let q = flip_probability(t);
        if !(q > 0.0) {
            return Err(invalid(format!("time gap {t} never produces changes")));
        }
        let log_keep = (-q).ln_1p();
        let mut changes = Vec::with_capacity(k);
        let mut i = 0;
        for _ in 0..k {
            i = next_change(rng, i, log_keep);
            changes.push(i);
        }
        let words: Vec<u64> = (0..i.div_ceil(64)).map(|_| rng.next_u64()).collect();
        Ok(Self::from_changes(
            t,
            BitSequence::from_words(words, i),
            changes,
        ))
    }

    fn from_changes(t: f64, bits0: BitSequence, changes: Vec<usize>) -> Self {
        let mut bits_t = bits0.clone();
        for &i in &changes {
            bits_t.flip(i - 1);
        }
        Self {
            t,
            bits0,
            bits_t,
            changes,
        }
    }

    /// Builds a coupling from two explicit bit strings of equal length.
    pub fn from_bits(t: f64, bits0: BitSequence, bits_t: BitSequence) -> Result<Self> {
        if bits0.len() != bits_t.len() {
            return Err(invalid("bit strings differ in length"));
        }
        let changes = (0..bits0.len())
            .filter(|&i| bits0.get(i) != bits_t.get(i))
            .map(|i| i + 1)
            .collect();
        Ok(Self {
            t,
            bits0,
            bits_t,
            changes,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.bits0.len()
    }

    pub fn bits0(&self) -> &BitSequence {
        &self.bits0
    }

    pub fn bits_t(&self) -> &BitSequence {
        &self.bits_t
    }

    pub fn changes(&self) -> &[usize] {
        &self.changes
    }
}

/// Change indices `I_0 = 0 < I_1 < ...` up to `n`, and period lengths
/// `J_k = I_k - I_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodDecomposition {
    pub change_indices: Vec<usize>,
    pub lengths: Vec<usize>,
}

pub fn decompose_periods(coupling: &TwoTimeCoupling, n: usize) -> PeriodDecomposition {
    let mut change_indices = vec![0];
    change_indices.extend(coupling.changes.iter().copied().take_while(|&i| i <= n));
    let lengths = change_indices.windows(2).map(|w| w[1] - w[0]).collect();
    PeriodDecomposition {
        change_indices,
        lengths,
    }
}

fn paths(coupling: &TwoTimeCoupling, n: usize) -> Result<(Vec<i64>, Vec<i64>)> {
    if n > coupling.n() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: coupling.n(),
        });
    }
    let z0 = switch_walk(&coupling.bits0, 0);
    let zt = switch_walk(&coupling.bits_t, 0);
    Ok((z0.positions()[..=n].to_vec(), zt.positions()[..=n].to_vec()))
}

/// Largest violation over steps `i <= n` of the rule that `Z(t)` repeats
/// the increments of `Z(0)` on odd periods and negates them on even ones.
pub fn mirror_residual(coupling: &TwoTimeCoupling, n: usize) -> Result<i64> {
    let (z0, zt) = paths(coupling, n)?;
    let mut changes = coupling.changes.iter().peekable();
    let mut sign = 1i64;
    let mut worst = 0;
    for i in 1..=n {
        while changes.next_if(|&&c| c <= i).is_some() {
            sign = -sign;
        }
        let d0 = z0[i] - z0[i - 1];
        let dt = zt[i] - zt[i - 1];
        worst = worst.max((dt - sign * d0).abs());
    }
    Ok(worst)
}

/// Odd-period and even-period parts of `Z(0)` up to step `I_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UvSplit {
    pub u: i64,
    pub v: i64,
}

/// `U'` collects the increments of `Z(0)` over odd periods (plus the
/// single step `I_K`), `V'` those over even periods, so that
/// `U' + V' = Z_{I_K}(0)` and `U' - V' = Z_{I_K}(t)`.
pub fn uv_decomposition(coupling: &TwoTimeCoupling, k: usize) -> Result<UvSplit> {
    if k < 2 || k % 2 != 0 {
        return Err(invalid(format!(
            "period count K = {k} must be even and >= 2"
        )));
    }
    if coupling.changes.len() < k {
        return Err(Error::InsufficientChanges {
            needed: k,
            found: coupling.changes.len(),
        });
    }
    let ik = coupling.changes[k - 1];
    let z0 = switch_walk(&coupling.bits0, 0);
    let z = &z0.positions()[..=ik];
    // at(k) = I_k, with I_0 = 0
    let at = |j: usize| if j == 0 { 0 } else { coupling.changes[j - 1] };
    let mut u = z[at(1) - 1];
    for j in (3..k).step_by(2) {
        u += z[at(j) - 1] - z[at(j - 1) - 1];
    }
    u += z[ik] - z[ik - 1];
    let mut v = 0;
    for j in (2..=k).step_by(2) {
        v += z[at(j) - 1] - z[at(j - 1) - 1];
    }
    Ok(UvSplit { u, v })
}

/// `W_i = (Z_i(0) + Z_i(t)) / 2` for `i = 0..=n`.
pub fn w_path(coupling: &TwoTimeCoupling, n: usize) -> Result<Vec<i64>> {
    let (z0, zt) = paths(coupling, n)?;
    Ok(z0.iter().zip(&zt).map(|(a, b)| (a + b) / 2).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hand_instance() -> TwoTimeCoupling {
        let b0 = BitSequence::from_signs(&[1, 1, 1, 1, 1]).unwrap();
        let bt = BitSequence::from_signs(&[1, -1, 1, -1, 1]).unwrap();
        TwoTimeCoupling::from_bits(0.1, b0, bt).unwrap()
    }

    #[test]
    fn zero_gap_changes_nothing() {
        let c = TwoTimeCoupling::sample(500, 0.0, 1).unwrap();
        assert_eq!(c.bits0(), c.bits_t());
        assert!(c.changes().is_empty());
        assert!(TwoTimeCoupling::sample(5, -1.0, 1).is_err());
    }

    #[test]
    fn changes_match_bit_differences() {
        let c = TwoTimeCoupling::sample(700, 0.3, 4).unwrap();
        let rebuilt =
            TwoTimeCoupling::from_bits(0.3, c.bits0().clone(), c.bits_t().clone()).unwrap();
        assert_eq!(rebuilt.changes(), c.changes());
        assert!(c.changes().iter().all(|&i| (1..=700).contains(&i)));
    }

    #[test]
    fn periods_unrolled() {
        let b = BitSequence::all_plus(10);
        let mut bt = b.clone();
        bt.flip(2);
        bt.flip(6);
        let c = TwoTimeCoupling::from_bits(0.1, b.clone(), bt).unwrap();
        let p = decompose_periods(&c, 10);
        assert_eq!(p.change_indices, vec![0, 3, 7]);
        assert_eq!(p.lengths, vec![3, 4]);
        let empty = TwoTimeCoupling::from_bits(0.1, b.clone(), b).unwrap();
        assert_eq!(decompose_periods(&empty, 10).change_indices, vec![0]);
    }

    #[test]
    fn hand_instance_mirror_uv_w() {
        let c = hand_instance();
        assert_eq!(c.changes(), &[2, 4]);
        assert_eq!(switch_walk(c.bits_t(), 0).positions(), &[0, 1, 0, -1, 0, 1]);
        assert_eq!(mirror_residual(&c, 5).unwrap(), 0);
        assert_eq!(uv_decomposition(&c, 2).unwrap(), UvSplit { u: 2, v: 2 });
        assert_eq!(w_path(&c, 5).unwrap(), vec![0, 1, 1, 1, 2, 3]);
    }

    #[test]
    fn uv_preconditions() {
        let b = BitSequence::all_plus(6);
        let c = TwoTimeCoupling::from_bits(0.1, b.clone(), b).unwrap();
        assert_eq!(
            uv_decomposition(&c, 2),
            Err(Error::InsufficientChanges {
                needed: 2,
                found: 0
            })
        );
        assert!(uv_decomposition(&hand_instance(), 3).is_err());
        assert_eq!(mirror_residual(&c, 6).unwrap(), 0);
    }

    #[test]
    fn sample_until_changes_stops_at_kth_change() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = TwoTimeCoupling::sample_until_changes(0.2, 10, &mut rng).unwrap();
        assert_eq!(c.changes().len(), 10);
        assert_eq!(*c.changes().last().unwrap(), c.n());
        assert!(TwoTimeCoupling::sample_until_changes(0.0, 2, &mut rng).is_err());
    }
}
