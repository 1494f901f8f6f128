use std::time::Instant;

use super::runner::{run_trials, RunConfig};
use super::{EstimateRow, ExperimentReport};
use crate::dynamics::{uv_decomposition, TwoTimeCoupling};
use crate::error::{invalid, Error, Result};
use crate::walks::{BitSequence, WalkKind};

fn endpoint(kind: WalkKind, bits: &BitSequence) -> i64 {
    match kind {
        WalkKind::Switch => bits.switch_endpoint(),
        WalkKind::Compass => bits.compass_endpoint(),
    }
}

/// Per `eps`: `P(W_n(0) > 0, W_n(eps) > 0)`, the marginal `P(W_n > 0)`
/// (averaged over both times) and the gap `joint - marginal^2`, where
/// `W` is the switch or compass walk.
///
/// Every `eps` reuses the same trial streams.
pub fn noise_sensitivity_curve(
    n: usize,
    eps_list: &[f64],
    kind: WalkKind,
    cfg: &RunConfig,
) -> Result<ExperimentReport> {
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    if eps_list.is_empty() {
        return Err(invalid("at least one eps value required"));
    }
    if let Some(e) = eps_list.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
        return Err(invalid(format!("eps {e} must be finite and >= 0")));
    }
    cfg.validate()?;
    let mut rows = Vec::new();
    for &eps in eps_list {
        let start = Instant::now();
        let m = run_trials(cfg, |rng| {
            let c = TwoTimeCoupling::sample_with(n, eps, rng)?;
            let a = f64::from(u8::from(endpoint(kind, c.bits0()) > 0));
            let b = f64::from(u8::from(endpoint(kind, c.bits_t()) > 0));
            let joint = a * b;
            let marg = (a + b) / 2.0;
            Ok([joint, joint * joint, marg, marg * marg, joint * marg])
        })?;
        let seconds = start.elapsed().as_secs_f64();
        let joint = m.mean(0);
        let marg = m.mean(2);
        let gap = joint - marg * marg;
        // delta method for joint - marg^2
        let gap_se = (m.count >= 2).then(|| {
            let c = m.count as f64;
            let var_j = (m.sum(1) - c * joint * joint) / (c - 1.0);
            let var_m = (m.sum(3) - c * marg * marg) / (c - 1.0);
            let cov = (m.sum(4) - c * joint * marg) / (c - 1.0);
            let var = (var_j + 4.0 * marg * marg * var_m - 4.0 * marg * cov).max(0.0);
            (var / c).sqrt()
        });
        for (name, est, se) in [
            ("ns_joint", joint, m.stderr(0, 1)),
            ("ns_marginal", marg, m.stderr(2, 3)),
            ("ns_gap", gap, gap_se),
        ] {
            let mut row = EstimateRow::new(name, n, cfg.trials, est);
            row.eps = Some(eps);
            row.kind = Some(kind.to_string());
            row.stderr = se;
            row.seconds = seconds;
            rows.push(row);
        }
    }
    Ok(ExperimentReport::new(cfg.seed, rows))
}

/// `K(n) = 2 ⌊n (1 - e^{-eps}) / 4⌋`.
pub fn k_periods(n: usize, eps: f64) -> usize {
    let x = n as f64 * -(-eps).exp_m1() / 4.0;
    2 * x.floor().max(0.0) as usize
}

/// `P(U' > |V'|)` with `K = K(n)` periods; every trial also checks
/// `U' + V' = Z_{I_K}(0)` and `U' - V' = Z_{I_K}(eps)` against the
/// endpoints of the two walks.
pub fn u_abs_v_experiment(n: usize, eps: f64, cfg: &RunConfig) -> Result<EstimateRow> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!("eps {eps} must be finite and > 0")));
    }
    let k = k_periods(n, eps);
    if k < 2 {
        return Err(invalid(format!(
            "K(n) = {k} < 2 for n = {n}, eps = {eps}; increase n or eps"
        )));
    }
    let start = Instant::now();
    let m = run_trials(cfg, |rng| {
        let c = TwoTimeCoupling::sample_until_changes(eps, k, rng)?;
        let uv = uv_decomposition(&c, k)?;
        let z0 = c.bits0().switch_endpoint();
        let zt = c.bits_t().switch_endpoint();
        if uv.u + uv.v != z0 || uv.u - uv.v != zt {
            return Err(Error::Internal(format!(
                "U/V identity violated: U={}, V={}, Z(0)={z0}, Z(t)={zt}",
                uv.u, uv.v
            )));
        }
        let hit = f64::from(u8::from(uv.u > uv.v.abs()));
        Ok([hit, hit])
    })?;
    let mut row = EstimateRow::new("uv", n, cfg.trials, m.mean(0));
    row.eps = Some(eps);
    row.kind = Some(WalkKind::Switch.to_string());
    row.stderr = m.stderr(0, 1);
    row.seconds = start.elapsed().as_secs_f64();
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_examples() {
        assert_eq!(k_periods(10_000, 0.05), 242);
        assert_eq!(k_periods(10, 1e-4), 0);
        assert_eq!(k_periods(100, 5.0), 48);
    }

    #[test]
    fn zero_eps_joint_equals_marginal() {
        let r = noise_sensitivity_curve(101, &[0.0], WalkKind::Switch, &RunConfig::new(4000, 2))
            .unwrap();
        let j = r.row("ns_joint").unwrap();
        let m = r.row("ns_marginal").unwrap();
        assert_eq!(j.estimate, m.estimate);
        assert!((j.estimate - 0.5).abs() < 4.0 * j.stderr.unwrap());
    }

    #[test]
    fn validation() {
        let cfg = RunConfig::new(10, 1);
        assert!(noise_sensitivity_curve(0, &[0.1], WalkKind::Switch, &cfg).is_err());
        assert!(noise_sensitivity_curve(10, &[], WalkKind::Switch, &cfg).is_err());
        assert!(noise_sensitivity_curve(10, &[-0.1], WalkKind::Switch, &cfg).is_err());
        assert!(u_abs_v_experiment(10, 1e-4, &cfg).is_err());
    }

    #[test]
    fn uv_large_eps_near_quarter() {
        let row = u_abs_v_experiment(100, 5.0, &RunConfig::new(20_000, 9)).unwrap();
        assert!((row.estimate - 0.25).abs() < 0.03, "{row:?}");
    }
}
