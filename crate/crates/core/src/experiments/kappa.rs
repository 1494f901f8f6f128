use std::time::Instant;

use super::runner::{run_trials, RunConfig};
use super::{EstimateRow, ExperimentReport};
use crate::dynamics::{kappa_measure, pair_energy, positivity_timeline, ClockSet};
use crate::error::{invalid, Result};
use crate::exact::{barrier_positive_prob, stay_positive_prob};

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    Ok(())
}

/// Moments of `κ_n`, the time in `[0, 1]` during which the dynamical
/// switch walk stays positive for its first `n` steps.
pub fn kappa_experiment(n: usize, cfg: &RunConfig) -> Result<ExperimentReport> {
    check_n(n)?;
    let start = Instant::now();
    let m = run_trials(cfg, |rng| {
        let clocks = ClockSet::sample_with(n, 1.0, rng)?;
        let k = kappa_measure(&positivity_timeline(&clocks, n, 0.0)?);
        let k2 = k * k;
        let pos = f64::from(u8::from(k > 0.0));
        Ok([k, k2, k2 * k, k2 * k2, pos])
    })?;
    let seconds = start.elapsed().as_secs_f64();

    let a = m.mean(0);
    let b = m.mean(1);
    let ratio = b / (a * a);
    let ratio_se = (m.count >= 2 && a > 0.0).then(|| {
        let c = m.count as f64;
        let var_a = (m.sum(1) - c * a * a) / (c - 1.0);
        let var_b = (m.sum(3) - c * b * b) / (c - 1.0);
        let cov = (m.sum(2) - c * a * b) / (c - 1.0);
        let (ga, gb) = (-2.0 * b / (a * a * a), 1.0 / (a * a));
        let var = (ga * ga * var_a + gb * gb * var_b + 2.0 * ga * gb * cov).max(0.0);
        (var / c).sqrt()
    });

    let mut rows = Vec::new();
    for (name, est, se) in [
        ("kappa_mean", a, m.stderr(0, 1)),
        ("kappa_second_moment", b, m.stderr(1, 3)),
        ("kappa_ratio", ratio, ratio_se),
        ("kappa_positive", m.mean(4), m.stderr(4, 4)),
    ] {
        let mut row = EstimateRow::new(name, n, cfg.trials, est);
        row.alpha = Some(0.0);
        row.stderr = se;
        row.seconds = seconds;
        rows.push(row);
    }
    let p = stay_positive_prob(n);
    let mut row = EstimateRow::new("stay_positive_exact", n, 0, p.to_f64());
    row.alpha = Some(0.0);
    row.exact = Some(p.to_string());
    rows.push(row);
    Ok(ExperimentReport::new(cfg.seed, rows))
}

/// Mean of `Φ̂ = ∫∫ 1{P(s)} 1{P(t)} |t - s|^-γ ds dt / P(P_n^α)^2` with the
/// denominator computed exactly.
pub fn phi_experiment(
    n: usize,
    alpha: f64,
    gamma: f64,
    cfg: &RunConfig,
) -> Result<ExperimentReport> {
    check_n(n)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("alpha {alpha} must be finite and >= 0")));
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(invalid(format!("gamma {gamma} must lie in [0, 1)")));
    }
    cfg.validate()?;
    let p = barrier_positive_prob(n, alpha);
    if p.is_zero() {
        return Err(invalid(format!(
            "P(P_n^alpha) = 0 for n = {n}, alpha = {alpha}"
        )));
    }
    let denom = p.to_f64() * p.to_f64();
    let start = Instant::now();
    let m = run_trials(cfg, |rng| {
        let clocks = ClockSet::sample_with(n, 1.0, rng)?;
        let phi = pair_energy(&positivity_timeline(&clocks, n, alpha)?, gamma)? / denom;
        Ok([phi, phi * phi])
    })?;
    let mut row = EstimateRow::new("phi", n, cfg.trials, m.mean(0));
    row.alpha = Some(alpha);
    row.gamma = Some(gamma);
    row.stderr = m.stderr(0, 1);
    row.seconds = start.elapsed().as_secs_f64();
    let mut exact = EstimateRow::new("barrier_positive_exact", n, 0, p.to_f64());
    exact.alpha = Some(alpha);
    exact.exact = Some(p.to_string());
    Ok(ExperimentReport::new(cfg.seed, vec![row, exact]))
}
