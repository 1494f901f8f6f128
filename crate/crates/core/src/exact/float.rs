//! Double-precision mirror of the exact influence formula, for profiles
//! where exact numerators become too large to be practical.
//!
//! Binomial rows are generated by ratio recurrences outward from the
//! central term, and interval masses are taken from whichever tail sum
//! avoids cancellation.

/// Central probabilities `P(S_j = j mod 2 nearest 0)` for `j = 0..=max_j`.
fn central_probs(max_j: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_j + 1);
    let mut even = 1.0f64; // C(2t, t) / 4^t
    for j in 0..=max_j {
        let t = (j / 2) as f64;
        if j % 2 == 0 {
            out.push(even);
        } else {
            // C(2t+1, t) / 2^(2t+1) = C(2t, t)/4^t * (2t+1)/(2(t+1))
            out.push(even * (2.0 * t + 1.0) / (2.0 * (t + 1.0)));
            even *= (2.0 * t + 1.0) / (2.0 * t + 2.0);
        }
    }
    out
}

/// Law of `S_j` for a fixed `j`, with tail sums.
pub struct FloatRow {
    j: i64,
    center: usize,
    pmf: Vec<f64>,
    /// `lower[k] = pmf[0] + ... + pmf[k]`
    lower: Vec<f64>,
    /// `upper[k] = pmf[k] + ... + pmf[j]`
    upper: Vec<f64>,
}

impl FloatRow {
    fn new(j: usize, central: f64) -> Self {
        let center = j / 2;
        let mut pmf = vec![0.0; j + 1];
        pmf[center] = central;
        for k in center..j {
            pmf[k + 1] = pmf[k] * (j - k) as f64 / (k + 1) as f64;
        }
        for k in (1..=center).rev() {
            pmf[k - 1] = pmf[k] * k as f64 / (j - k + 1) as f64;
        }
        let mut lower = Vec::with_capacity(j + 1);
        let mut acc = 0.0;
        for &p in &pmf {
            acc += p;
            lower.push(acc);
        }
        let mut upper = vec![0.0; j + 1];
        let mut acc = 0.0;
        for k in (0..=j).rev() {
            acc += pmf[k];
            upper[k] = acc;
        }
        Self {
            j: j as i64,
            center,
            pmf,
            lower,
            upper,
        }
    }

    pub fn prob_at(&self, z: i64) -> f64 {
        if z.abs() > self.j || (z + self.j) % 2 != 0 {
            return 0.0;
        }
        self.pmf[((z + self.j) / 2) as usize]
    }

    pub fn prob_between(&self, lo: i64, hi: i64) -> f64 {
        let j = self.j;
        let lo = lo.max(-j);
        let hi = hi.min(j);
        if lo > hi {
            return 0.0;
        }
        let ka = ((lo + j + 1) / 2) as usize;
        let kb = ((hi + j) / 2) as usize;
        if ka > kb {
            return 0.0;
        }
        let below = |k: usize| if k == 0 { 0.0 } else { self.lower[k - 1] };
        let above = |k: usize| {
            if k > self.j as usize {
                0.0
            } else {
                self.upper[k]
            }
        };
        if kb <= self.center {
            self.lower[kb] - below(ka)
        } else if ka >= self.center {
            self.upper[ka] - above(kb + 1)
        } else {
            1.0 - below(ka) - above(kb + 1)
        }
    }

    /// Float counterpart of [`super::binomial::BinomialRow::confined_count`].
    pub fn confined_prob(&self, below: i64, above: i64) -> f64 {
        if below <= 0 || above <= 0 {
            return if self.j == 0 && below > 0 && above > 0 {
                1.0
            } else {
                0.0
            };
        }
        let period = 2 * (below + above);
        let reach = self.j / period + 2;
        let mut plus = 0.0;
        let mut minus = 0.0;
        for k in -reach..=reach {
            let shift = k * period;
            plus += self.prob_between(shift - below + 1, shift + above - 1);
            minus += self.prob_between(shift + above + 1, shift + 2 * above + below - 1);
        }
        (plus - minus).max(0.0)
    }
}

/// Builds rows on demand from a shared table of central terms.
pub struct FloatRows {
    central: Vec<f64>,
}

impl FloatRows {
    pub fn new(max_j: usize) -> Self {
        Self {
            central: central_probs(max_j),
        }
    }

    pub fn row(&self, j: usize) -> FloatRow {
        FloatRow::new(j, self.central[j])
    }
}

/// `I_m(P_n)` for `m = 1..=n` in double precision.
pub fn influence_profile_float(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let rows = FloatRows::new(n);
    let mut out = Vec::with_capacity(n);
    // I_1 = 2 P(P_n) = P(S_{n-1} in [0, 1])
    out.push(rows.row(n - 1).prob_between(0, 1));
    for m in 2..=n {
        let j = m - 1;
        let steps = n - m + 1;
        let head = rows.row(j);
        let tail = rows.row(steps);
        let mut total = 0.0;
        let mut z = if j % 2 == 0 { 2 } else { 1 };
        while z <= j {
            let zi = z as i64;
            let ballot = zi as f64 / j as f64 * head.prob_at(zi);
            let stay = tail.prob_between(-zi + 1, zi);
            let strip = tail.confined_prob(zi, zi);
            total += ballot * (stay - strip).max(0.0);
            z += 2;
        }
        out.push(2.0 * total);
    }
    out
}
