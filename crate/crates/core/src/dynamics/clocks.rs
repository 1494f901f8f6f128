use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::walks::BitSequence;

/// A rerandomisation of one bit: at `time` the bit takes the fresh `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockEvent {
    pub time: f64,
    /// 0-based bit index.
    pub bit: usize,
    pub value: i8,
}

/// Rate-1 Poisson rerandomisation clocks for `n` bits on `(0, horizon]`.
///
/// Events are stored grouped by bit, each group in increasing time order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockSet {
    horizon: f64,
    initial: BitSequence,
    events: Vec<ClockEvent>,
    /// events of bit `j` are `events[offsets[j]..offsets[j + 1]]`
    offsets: Vec<usize>,
}

impl ClockSet {
    /// Clocks driven by a ChaCha8 stream seeded from `seed`.
    pub fn sample(n: usize, horizon: f64, seed: u64) -> Result<Self> {
        Self::sample_with(n, horizon, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn sample_with<R: RngCore + ?Sized>(n: usize, horizon: f64, rng: &mut R) -> Result<Self> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "horizon {horizon} must be finite and >= 0"
            )));
        }
        let words = (0..n.div_ceil(64)).map(|_| rng.next_u64()).collect();
        let initial = BitSequence::from_words(words, n);
        let mut events = Vec::with_capacity((n as f64 * horizon * 1.1) as usize + 8);
        let mut offsets = Vec::with_capacity(n + 1);
        for bit in 0..n {
            offsets.push(events.len());
            let mut time = 0.0;
            loop {
                let gap: f64 = rng.sample(Exp1);
                time += gap;
                if time > horizon {
                    break;
                }
                let value = if rng.random::<bool>() { 1 } else { -1 };
                events.push(ClockEvent { time, bit, value });
            }
        }
        offsets.push(events.len());
        Ok(Self {
            horizon,
            initial,
            events,
            offsets,
        })
    }

    /// Assembles clocks from explicit per-bit event lists (times must be
    /// strictly increasing within each bit and lie in `(0, horizon]`).
    pub fn from_parts(
        initial: BitSequence,
        horizon: f64,
        per_bit: Vec<Vec<(f64, i8)>>,
    ) -> Result<Self> {
        if per_bit.len() != initial.len() {
            return Err(Error::InvalidParameter(
                "one event list per bit required".into(),
            ));
        }
        let mut events = Vec::new();
        let mut offsets = Vec::with_capacity(per_bit.len() + 1);
        for (bit, list) in per_bit.into_iter().enumerate() {
            offsets.push(events.len());
            let mut last = 0.0;
            for (time, value) in list {
                if !(time > last && time <= horizon) {
                    return Err(Error::InvalidParameter(format!(
                        "event time {time} for bit {} is out of order or outside (0, {horizon}]",
                        bit + 1
                    )));
                }
                if value != 1 && value != -1 {
                    return Err(Error::InvalidSign(value.into()));
                }
                last = time;
                events.push(ClockEvent { time, bit, value });
            }
        }
        offsets.push(events.len());
        Ok(Self {
            horizon,
            initial,
            events,
            offsets,
        })
    }

    pub fn n(&self) -> usize {
        self.initial.len()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Epoch-0 values `X_j^0`.
    pub fn initial(&self) -> &BitSequence {
        &self.initial
    }

    /// Events of 0-based bit `bit`, in time order.
    pub fn events_of(&self, bit: usize) -> &[ClockEvent] {
        &self.events[self.offsets[bit]..self.offsets[bit + 1]]
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    /// Events of bits `0..n` with time `<= until`, merged into time order
    /// (ties broken by bit index).
    pub fn timeline_events(&self, n: usize, until: f64) -> Vec<ClockEvent> {
        let mut out: Vec<ClockEvent> = self.events[..self.offsets[n.min(self.n())]]
            .iter()
            .filter(|e| e.time <= until)
            .copied()
            .collect();
        out.sort_unstable_by(|a, b| a.time.total_cmp(&b.time).then(a.bit.cmp(&b.bit)));
        out
    }

    /// `X(t)`: each bit's most recent value at or before `t`.
    pub fn bits_at(&self, t: f64) -> Result<BitSequence> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::TimeOutOfHorizon {
                t,
                horizon: self.horizon,
            });
        }
        let mut bits = self.initial.clone();
        for bit in 0..self.n() {
            let events = self.events_of(bit);
            let seen = events.partition_point(|e| e.time <= t);
            if seen > 0 {
                bits.set(bit, events[seen - 1].value)?;
            }
        }
        Ok(bits)
    }
}
