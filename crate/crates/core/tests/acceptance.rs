//! Acceptance suite: ten checks, one pass/fail line each.
//!
//! Run with `cargo test -p switchwalk --test acceptance`. Exits nonzero if
//! any check fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;

use switchwalk::dynamics::{
    decompose_periods, flip_probability, mirror_residual, naive_timeline, positivity_timeline,
    uv_decomposition, w_path, ClockSet, TwoTimeCoupling,
};
use switchwalk::exact::{
    ballot_prob, barrier_positive_profile, influence_exact, influence_oracle_profile,
    influence_profile_exact, influence_profile_float, positive_endpoint_prob_dp, reflection_pair,
    stay_positive_prob, strip_stay_prob_dp, strip_stay_prob_from,
};
use switchwalk::experiments::{
    alpha_tail_report, chernoff_violations, influence_profile, kappa_experiment,
    noise_sensitivity_curve, phi_experiment, stream_rng, u_abs_v_experiment, ExperimentReport,
    InfluenceMode, RunConfig,
};
use switchwalk::walks::switch_walk;
use switchwalk::{DyadicProb, WalkKind};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn oracle_equivalence() -> Outcome {
    for n in 1..=16 {
        let oracle = influence_oracle_profile(n).map_err(err)?;
        for (m, o) in (1..=n).zip(&oracle) {
            let f = influence_exact(n, m).map_err(err)?;
            if &f != o {
                return Err(format!("n={n}, m={m}: formula {f} vs enumeration {o}"));
            }
        }
    }
    Ok("influence formula = enumeration for all 1 <= m <= n <= 16".into())
}

/// Per-prefix counts of walks that stay strictly negative, by a DP
/// independent of the library.
fn stay_negative_counts(n: usize) -> Vec<BigUint> {
    // cur[d] counts paths at depth -(d+1) that never touched 0
    let mut cur = vec![BigUint::zero(); n + 2];
    cur[0] = BigUint::from(1u32); // after one step at -1
    let mut out = vec![BigUint::from(1u32)];
    for _ in 2..=n {
        let mut next = vec![BigUint::zero(); n + 2];
        for d in 0..=n {
            if cur[d].is_zero() {
                continue;
            }
            next[d + 1] += &cur[d];
            if d > 0 {
                next[d - 1] += &cur[d];
            }
        }
        cur = next;
        out.push(cur.iter().sum());
    }
    out
}

fn exact_identities() -> Outcome {
    for z in 1..=30i64 {
        for j in 1..=30usize {
            let (a, b) = reflection_pair(z, j).map_err(err)?;
            if a != b {
                return Err(format!("reflection z={z}, j={j}: {a} vs {b}"));
            }
        }
    }
    for j in 1..=16usize {
        for z in -2..=j as i64 + 2 {
            let a = ballot_prob(j, z).map_err(err)?;
            let b = positive_endpoint_prob_dp(j, z);
            if a != b {
                return Err(format!("ballot j={j}, z={z}: {a} vs {b}"));
            }
        }
    }
    for z in 1..=8i64 {
        for x in 1..2 * z {
            for steps in 0..=64usize {
                let a = strip_stay_prob_from(x, z, steps);
                let b = strip_stay_prob_dp(x, z, steps);
                if a != b {
                    return Err(format!("strip x={x}, z={z}, N={steps}: {a} vs {b}"));
                }
            }
        }
    }
    // bit 1 is pivotal iff the walk stays positive or stays negative
    let n_max = 4096;
    let pos = barrier_positive_profile(n_max, 0.0);
    let neg = stay_negative_counts(n_max);
    for n in 1..=n_max {
        let pivotal = &pos[n - 1] + &DyadicProb::from_count(neg[n - 1].clone(), n as u64);
        let i1 = influence_exact(n, 1).map_err(err)?;
        let twice = stay_positive_prob(n).scale(2, 0);
        if i1 != pivotal || i1 != twice {
            return Err(format!(
                "I_1 at n={n}: {i1} vs pivotal {pivotal} vs 2P {twice}"
            ));
        }
    }
    Ok("reflection (z,j<=30), ballot (j<=16), strip (z<=8, N<=64), I_1 = 2P(P_n) (n<=4096)".into())
}

fn influence_shape() -> Outcome {
    let exact: Vec<f64> = influence_profile_exact(512)
        .map_err(err)?
        .iter()
        .map(DyadicProb::to_f64)
        .collect();
    let float = influence_profile_float(512);
    let rel = exact
        .iter()
        .zip(&float)
        .map(|(e, f)| ((e - f) / e).abs())
        .fold(0.0, f64::max);
    if rel > 1e-9 {
        return Err(format!(
            "float vs exact at n=512: max relative error {rel:e}"
        ));
    }
    let mut widths = Vec::new();
    for n in [256usize, 1024, 4096] {
        let report =
            influence_profile(n, InfluenceMode::Auto, &RunConfig::new(1, 0)).map_err(err)?;
        let nf = n as f64;
        let ratios: Vec<f64> = report
            .rows
            .iter()
            .map(|r| {
                let m = r.m.expect("per-bit row");
                r.estimate * nf.powf(1.5) / (n - m + 1) as f64
            })
            .collect();
        let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
        let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
        if !(lo > 0.0) {
            return Err(format!("n={n}: nonpositive ratio {lo}"));
        }
        widths.push((n, hi / lo));
    }
    let worst = widths.iter().map(|w| w.1).fold(0.0, f64::max);
    ensure(
        worst <= 20.0,
        format!("band widths {widths:.3?} (limit 20); float/exact rel err at 512 = {rel:.2e}"),
    )
}

fn noise_sensitivity() -> Outcome {
    let cfg = RunConfig::new(1_000_000, 20_240_401);
    let s = noise_sensitivity_curve(10_000, &[0.01], WalkKind::Switch, &cfg).map_err(err)?;
    let c = noise_sensitivity_curve(10_000, &[0.01], WalkKind::Compass, &cfg).map_err(err)?;
    let sj = s.row("ns_joint").unwrap();
    let cj = c.row("ns_joint").unwrap();
    let orthant = 0.25 + (-0.01f64).exp().asin() / (2.0 * std::f64::consts::PI);
    ensure(
        (sj.estimate - 0.25).abs() < 0.02 && cj.estimate > 0.40,
        format!(
            "switch joint {:.5} (se {:.5}, need |.-0.25|<0.02); compass joint {:.5} (need >0.40; orthant value {orthant:.5})",
            sj.estimate,
            sj.stderr.unwrap_or(f64::NAN),
            cj.estimate
        ),
    )
}

fn uv_limit() -> Outcome {
    let row = u_abs_v_experiment(10_000, 0.05, &RunConfig::new(100_000, 77)).map_err(err)?;
    ensure(
        (row.estimate - 0.25).abs() < 0.01,
        format!(
            "P(U'>|V'|) = {:.5} (se {:.5}); identities held on all {} trials",
            row.estimate,
            row.stderr.unwrap_or(f64::NAN),
            row.trials
        ),
    )
}

fn kappa_unbiased(reports: &mut Vec<(usize, ExperimentReport)>) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [16usize, 64, 256] {
        let r = kappa_experiment(n, &RunConfig::new(100_000, 1000 + n as u64)).map_err(err)?;
        let mean = r.row("kappa_mean").unwrap();
        let exact = stay_positive_prob(n).to_f64();
        let se = mean.stderr.unwrap();
        let z = (mean.estimate - exact) / se;
        ok &= z.abs() < 3.0;
        lines.push(format!(
            "n={n}: {:.5} vs {exact:.5} ({z:+.2} se)",
            mean.estimate
        ));
        reports.push((n, r));
    }
    for seed in 0..1000u64 {
        let clocks = ClockSet::sample(64, 1.0, seed).map_err(err)?;
        for n in 1..=64 {
            for alpha in [0.0, 0.25] {
                let a = positivity_timeline(&clocks, n, alpha).map_err(err)?;
                let b = naive_timeline(&clocks, n, alpha).map_err(err)?;
                if a != b {
                    return Err(format!(
                        "engine != naive at seed {seed}, n={n}, alpha={alpha}"
                    ));
                }
            }
        }
    }
    lines.push("engine = naive on 1000 seeds, n<=64, alpha in {0, 0.25}".into());
    ensure(ok, lines.join("; "))
}

fn phi_bounded(kappa: &[(usize, ExperimentReport)]) -> Outcome {
    let mut values = Vec::new();
    for n in [64usize, 256, 1024] {
        let r =
            phi_experiment(n, 0.0, 0.25, &RunConfig::new(100_000, 3000 + n as u64)).map_err(err)?;
        let row = r.row("phi").unwrap();
        values.push((n, row.estimate, row.stderr.unwrap()));
    }
    let mut growth: f64 = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            growth = growth.max(values[j].1 / values[i].1);
        }
    }
    let (_, kr) = kappa
        .iter()
        .find(|(n, _)| *n == 64)
        .ok_or("missing kappa run")?;
    let p = stay_positive_prob(64).to_f64();
    let second = kr.row("kappa_second_moment").unwrap();
    let via_kappa = second.estimate / (p * p);
    let via_kappa_se = second.stderr.unwrap() / (p * p);
    let r0 = phi_experiment(64, 0.0, 0.0, &RunConfig::new(100_000, 4064)).map_err(err)?;
    let phi0 = r0.row("phi").unwrap();
    let se = (phi0.stderr.unwrap().powi(2) + via_kappa_se.powi(2)).sqrt();
    let z = (phi0.estimate - via_kappa) / se;
    ensure(
        growth <= 2.0 && z.abs() < 3.0,
        format!(
            "phi(0.25) by n: {}; max growth {growth:.3} (limit 2); gamma=0 at n=64: {:.4} vs {via_kappa:.4} ({z:+.2} se)",
            values
                .iter()
                .map(|(n, v, s)| format!("{n}:{v:.4}±{s:.4}"))
                .collect::<Vec<_>>()
                .join(" "),
            phi0.estimate
        ),
    )
}

fn tail_regime() -> Outcome {
    let mut worst = f64::INFINITY;
    for n in [256usize, 1024, 4096] {
        for alpha in [0.6, 0.75, 0.9] {
            let r = alpha_tail_report(n, alpha).map_err(err)?;
            let margin = r.row("tail_margin_bound").unwrap().estimate;
            if !(margin >= 0.0) {
                let t = r.row("tail_exact").unwrap();
                return Err(format!(
                    "n={n}, alpha={alpha}: tail {} exceeds bound",
                    t.estimate
                ));
            }
            worst = worst.min(margin);
        }
    }
    let bad = chernoff_violations(256);
    ensure(
        bad.is_empty(),
        format!(
            "tail <= exp(-n^(2a-1)/4) on 9 cases (min log margin {worst:.3}); Chernoff violations for n<=256: {}",
            bad.len()
        ),
    )
}

fn dynamics_invariants() -> Outcome {
    let n = 1000;
    for i in 0..10_000u64 {
        let mut rng = stream_rng(9, i);
        let c = TwoTimeCoupling::sample_with(n, 0.1, &mut rng).map_err(err)?;
        let r = mirror_residual(&c, n).map_err(err)?;
        if r != 0 {
            return Err(format!("coupling {i}: mirror residual {r}"));
        }
        let w = w_path(&c, n).map_err(err)?;
        let z0 = switch_walk(c.bits0(), 0);
        let z0 = z0.positions();
        let p = decompose_periods(&c, n);
        let mut bounds = p.change_indices.clone();
        bounds.push(n + 1);
        for k in 1..bounds.len() {
            // period k covers steps I_{k-1} ..= I_k - 1 (step 1 onwards for k = 1)
            let (from, to) = (bounds[k - 1].max(1), bounds[k] - 1);
            for s in from..=to {
                let dw = w[s] - w[s - 1];
                let expect = if k % 2 == 0 { 0 } else { z0[s] - z0[s - 1] };
                if dw != expect {
                    return Err(format!(
                        "coupling {i}: W increment {dw} at step {s} (period {k})"
                    ));
                }
            }
        }
        if c.changes().len() >= 2 {
            let k = c.changes().len() & !1;
            let uv = uv_decomposition(&c, k).map_err(err)?;
            let ik = c.changes()[k - 1];
            let zt = switch_walk(c.bits_t(), 0);
            if uv.u + uv.v != z0[ik] || uv.u - uv.v != zt.positions()[ik] {
                return Err(format!("coupling {i}: U/V identities fail"));
            }
        }
    }
    let mut lines = vec![
        "mirror residual 0, W flat on even periods, U/V identities on 1e4 couplings".to_string(),
    ];
    let mut ok = true;
    let bits_per_sample = 64;
    for t in [0.1, 0.5, 1.0] {
        let mut flips = 0u64;
        for i in 0..100_000u64 {
            let mut rng = stream_rng(11, i);
            let c = TwoTimeCoupling::sample_with(bits_per_sample, t, &mut rng).map_err(err)?;
            flips += c.changes().len() as u64;
        }
        let total = (100_000 * bits_per_sample) as f64;
        let q = flip_probability(t);
        let freq = flips as f64 / total;
        let z = (freq - q) / (q * (1.0 - q) / total).sqrt();
        ok &= z.abs() < 3.0;
        lines.push(format!("t={t}: {freq:.5} vs {q:.5} ({z:+.2} se)"));
    }
    ensure(ok, lines.join("; "))
}

fn reproducibility() -> Outcome {
    type Run = Box<dyn Fn(usize) -> Result<ExperimentReport, String>>;
    let runs: Vec<(&str, Run)> = vec![
        (
            "ns",
            Box::new(|w| {
                noise_sensitivity_curve(
                    1000,
                    &[0.0, 0.05],
                    WalkKind::Switch,
                    &RunConfig::new(5000, 5).with_workers(w),
                )
                .map_err(err)
            }),
        ),
        (
            "uv",
            Box::new(|w| {
                u_abs_v_experiment(2000, 0.05, &RunConfig::new(5000, 5).with_workers(w))
                    .map(|r| ExperimentReport::new(5, vec![r]))
                    .map_err(err)
            }),
        ),
        (
            "kappa",
            Box::new(|w| {
                kappa_experiment(64, &RunConfig::new(5000, 5).with_workers(w)).map_err(err)
            }),
        ),
        (
            "phi",
            Box::new(|w| {
                phi_experiment(64, 0.0, 0.25, &RunConfig::new(5000, 5).with_workers(w)).map_err(err)
            }),
        ),
        (
            "influence_mc",
            Box::new(|w| {
                influence_profile(
                    32,
                    InfluenceMode::Mc,
                    &RunConfig::new(20_000, 5).with_workers(w),
                )
                .map_err(err)
            }),
        ),
    ];
    for (name, run) in &runs {
        let base = run(1)?.untimed_rows();
        for w in [2usize, 3, 0] {
            if run(w)?.untimed_rows() != base {
                return Err(format!("{name}: rows differ between 1 and {w} workers"));
            }
        }
    }
    Ok("ns, uv, kappa, phi, influence mc: identical rows for 1, 2, 3 and auto workers".into())
}

fn main() -> ExitCode {
    let mut kappa_reports = Vec::new();
    let mut failed = 0;
    let mut report = |id: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let (tag, msg) = match outcome {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("criterion {id:>2} {tag} {name} [{secs:.1}s]: {msg}");
    };
    report(1, "oracle equivalence", &mut oracle_equivalence);
    report(2, "exact identities", &mut exact_identities);
    report(3, "influence shape", &mut influence_shape);
    report(4, "noise sensitivity", &mut noise_sensitivity);
    report(5, "U/V limit", &mut uv_limit);
    report(6, "kappa unbiasedness", &mut || {
        kappa_unbiased(&mut kappa_reports)
    });
    report(7, "phi boundedness", &mut || phi_bounded(&kappa_reports));
    report(8, "tail regime", &mut tail_regime);
    report(9, "dynamics invariants", &mut dynamics_invariants);
    report(10, "reproducibility", &mut reproducibility);
    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria failed");
        ExitCode::FAILURE
    }
}
