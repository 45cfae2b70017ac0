//! Size estimation by telescoping over truncations.
//!
//! For the truncations `S_0 ⊆ S_1 ⊆ … ⊆ S_n` of a tree,
//! `|S| = 1/α_{S_n} − Σ_{k<n} 1/α_{S_k}`, and every `α_{S_k}` can be read off
//! the lazy chain on `S_k`. Levels beyond the tree's structural depth bound
//! `D` are empty, so `1/α_{S_k} = 2^(k−D)/α_{S_D}` there and only levels
//! `1..=D` are sampled (`α_{S_0} = 1` always).

use std::ops::ControlFlow;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{burn_in_steps, estimate_alpha_keyed, ChainParams, Walker};
use crate::error::{Error, Result};
use crate::rng::{stream, tag, StreamRng};
use crate::tree::{for_each_node, truncate, BranchingTree};

/// Tallest tree the floating-point estimator accepts.
pub const MAX_HEIGHT: usize = 500;

/// How chain samples are spent across levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// One long run per level. A pilot measures the variance of each level's
    /// statistic and the remaining samples are split to minimize the
    /// variance of the final estimate. Each level estimates the ratio
    /// `α_{S_k}/α_{S_{k-1}} = π_{S_k}(depth < k)/2`.
    #[default]
    Adaptive,
    /// Independent restarts with root-hit counting at every level, using the
    /// worst-case sample sizes. Feasible only for small trees.
    Guaranteed,
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(Schedule::Adaptive),
            "guaranteed" => Ok(Schedule::Guaranteed),
            _ => Err(Error::param(format!(
                "unknown schedule {s:?} (expected adaptive or guaranteed)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Additive error target, as a fraction of `2^n`.
    pub xi: f64,
    /// Failure probability.
    pub delta: f64,
    pub seed: u64,
    pub burn_in_constant: f64,
    pub memo: bool,
    pub schedule: Schedule,
}

impl EstimatorConfig {
    pub fn new(xi: f64, delta: f64, seed: u64) -> Self {
        Self {
            xi,
            delta,
            seed,
            burn_in_constant: 2.0,
            memo: false,
            schedule: Schedule::Adaptive,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(Error::param(format!("ξ must lie in (0, 1], got {}", self.xi)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param(format!("δ must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.burn_in_constant > 0.0 && self.burn_in_constant.is_finite()) {
            return Err(Error::param(format!(
                "burn-in constant must be positive, got {}",
                self.burn_in_constant
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    /// Raw telescoped estimate; may be negative or exceed the tree's capacity.
    pub estimate: f64,
    /// `estimate` rounded and clamped to the possible sizes.
    pub rounded: f64,
    /// `estimate / 2^height`.
    pub fraction: f64,
    pub error_radius: f64,
    /// Delta-method standard error of `estimate` (0 when exact).
    pub std_error: f64,
    pub height: usize,
    /// Deepest level that was sampled.
    pub sampled_depth: usize,
    /// `α̂_{S_k}` for `k = 0..=height`; empty for the empty tree.
    pub alphas: Vec<f64>,
    pub steps: u64,
    /// True when no sampling was needed.
    pub exact: bool,
    pub schedule: Schedule,
    pub wall_time_secs: f64,
}

impl EstimateReport {
    fn exact(height: usize, size: f64, alphas: Vec<f64>, radius: f64, schedule: Schedule) -> Self {
        Self {
            estimate: size,
            rounded: size,
            fraction: size * (-(height as f64)).exp2(),
            error_radius: radius,
            std_error: 0.0,
            height,
            sampled_depth: 0,
            alphas,
            steps: 0,
            exact: true,
            schedule,
            wall_time_secs: 0.0,
        }
    }
}

/// Result of the threshold decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum CountOutcome {
    Exact { value: u64 },
    Exceeds { threshold: u64 },
}

/// Estimates `|S|` within `±ξ·2^n` with probability about `1 - δ`.
pub fn estimate_size<T: BranchingTree>(tree: &T, config: &EstimatorConfig) -> Result<EstimateReport> {
    config.validate()?;
    let h = tree.height();
    if h > MAX_HEIGHT {
        return Err(Error::Guard(format!(
            "height {h} exceeds the supported maximum of {MAX_HEIGHT}"
        )));
    }
    let radius = config.xi * (h as f64).exp2();
    if tree.is_empty() {
        return Ok(EstimateReport::exact(h, 0.0, Vec::new(), radius, config.schedule));
    }
    let d = tree.max_depth().min(h);
    let forced = |alphas: &mut Vec<f64>| {
        let top = alphas[d];
        for k in d + 1..=h {
            alphas.push(top * (d as f64 - k as f64).exp2());
        }
    };
    if d == 0 {
        let mut alphas = vec![1.0];
        forced(&mut alphas);
        return Ok(EstimateReport::exact(h, 1.0, alphas, radius, config.schedule));
    }

    let start = Instant::now();
    // error allowance at the sampled depth
    let xi_eff = config.xi * ((h - d) as f64).exp2();
    let levels = match config.schedule {
        Schedule::Adaptive => adaptive(tree, d, xi_eff, config)?,
        Schedule::Guaranteed => guaranteed(tree, d, xi_eff, config)?,
    };
    let mut alphas = levels.alphas;
    let inv = |a: &f64| 1.0 / a;
    let raw = inv(&alphas[d]) - alphas[..d].iter().map(inv).sum::<f64>();
    forced(&mut alphas);
    let cap = (h as f64 + 1.0).exp2() - 1.0;
    Ok(EstimateReport {
        estimate: raw,
        rounded: raw.round().clamp(1.0, cap),
        fraction: raw * (-(h as f64)).exp2(),
        error_radius: radius,
        std_error: levels.std_error,
        height: h,
        sampled_depth: d,
        alphas,
        steps: levels.steps,
        exact: false,
        schedule: config.schedule,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

struct Levels {
    /// `α̂_0..=α̂_D`.
    alphas: Vec<f64>,
    steps: u64,
    std_error: f64,
}

/// Two-sided normal-free multiplier: Chebyshev gives `P(|X| ≥ zσ) ≤ 1/z²`.
fn chebyshev_z(delta: f64) -> f64 {
    1.0 / delta.sqrt()
}

const PILOT_BATCHES: u64 = 64;

fn pilot_batch_len(k: usize) -> u64 {
    8 * (k as u64 + 1).pow(2)
}

struct LevelRun<W> {
    k: usize,
    walker: W,
    rng: StreamRng,
    hits: u64,
    samples: u64,
    steps: u64,
    var: f64,
}

fn adaptive<T: BranchingTree>(tree: &T, d: usize, xi_eff: f64, config: &EstimatorConfig) -> Result<Levels> {
    let zeta = xi_eff / (2.0 * (d + 1) as f64);
    let tv = zeta / (8.0 * (d + 1) as f64);
    let views = (1..=d)
        .map(|k| truncate(tree, k))
        .collect::<Result<Vec<_>>>()?;

    // burn-in and pilot, all levels at once
    let mut runs = views
        .iter()
        .enumerate()
        .map(|(i, view)| {
            let k = i + 1;
            Ok(LevelRun {
                k,
                walker: Walker::new(view, config.memo)?,
                rng: stream(config.seed, &[tag::LEVEL, k as u64]),
                hits: 0,
                samples: 0,
                steps: 0,
                var: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    runs.par_iter_mut().try_for_each(|r| -> Result<()> {
        let burn = burn_in_steps(r.k, tv, config.burn_in_constant);
        r.walker.run(burn, &mut r.rng)?;
        r.steps += burn;
        let len = pilot_batch_len(r.k);
        let mut means = Vec::with_capacity(PILOT_BATCHES as usize);
        for _ in 0..PILOT_BATCHES {
            let hits = r.walker.run_tally(len, r.k, &mut r.rng)?;
            r.hits += hits;
            means.push(hits as f64 / len as f64);
        }
        r.samples = PILOT_BATCHES * len;
        r.steps += r.samples;
        let q = r.hits as f64 / r.samples as f64;
        let spread = means.iter().map(|m| (m - q).powi(2)).sum::<f64>() / (PILOT_BATCHES - 1) as f64;
        // asymptotic variance per step, never below the iid value
        r.var = (spread * len as f64)
            .max(q * (1.0 - q))
            .max(1.0 / r.samples as f64);
        Ok(())
    })?;

    // split the variance budget
    let target_sd = xi_eff * (d as f64).exp2() / chebyshev_z(config.delta);
    let q_of = |r: &LevelRun<_>| (r.hits as f64 / r.samples as f64).clamp(0.5, 1.0);
    let pilot_q: Vec<f64> = runs.iter().map(q_of).collect();
    let weights = sensitivities(&pilot_q);
    let root_c: Vec<f64> = runs
        .iter()
        .zip(&weights)
        .map(|(r, w)| w * r.var.sqrt())
        .collect();
    let total: f64 = root_c.iter().sum();
    let budget = target_sd * target_sd;
    runs.par_iter_mut()
        .zip(root_c.par_iter())
        .try_for_each(|(r, rc)| -> Result<()> {
            let want = (rc * total / budget).ceil();
            let want = if want.is_finite() { want as u64 } else { u64::MAX };
            if want > r.samples {
                let extra = want - r.samples;
                r.hits += r.walker.run_tally(extra, r.k, &mut r.rng)?;
                r.samples += extra;
                r.steps += extra;
            }
            Ok(())
        })?;

    let q: Vec<f64> = runs.iter().map(q_of).collect();
    let weights = sensitivities(&q);
    let variance: f64 = runs
        .iter()
        .zip(&weights)
        .map(|(r, w)| w * w * r.var / r.samples as f64)
        .sum();
    Ok(Levels {
        alphas: alphas_from_ratios(&q),
        steps: runs.iter().map(|r| r.steps).sum(),
        std_error: variance.sqrt(),
    })
}

/// `α_0 = 1`, `α_k = α_{k-1} q_k / 2`.
fn alphas_from_ratios(q: &[f64]) -> Vec<f64> {
    let mut alphas = Vec::with_capacity(q.len() + 1);
    alphas.push(1.0);
    for &qk in q {
        let last = *alphas.last().expect("nonempty");
        alphas.push(last * qk / 2.0);
    }
    alphas
}

/// `|∂Ŝ/∂q_j|` for each ratio `q_j`, where `Ŝ = 1/α_D − Σ_{k<D} 1/α_k` and
/// `1/α_k = 2^k Π_{j≤k} 1/q_j`.
fn sensitivities(q: &[f64]) -> Vec<f64> {
    let d = q.len();
    let inv: Vec<f64> = alphas_from_ratios(q).iter().map(|a| 1.0 / a).collect();
    // g_j = 1/α_D − Σ_{j≤k<D} 1/α_k
    let mut out = vec![0.0; d];
    let mut g = inv[d];
    for j in (1..=d).rev() {
        out[j - 1] = g.abs() / q[j - 1];
        g -= inv[j - 1];
    }
    out
}

fn guaranteed<T: BranchingTree>(tree: &T, d: usize, xi_eff: f64, config: &EstimatorConfig) -> Result<Levels> {
    let zeta = xi_eff / (2.0 * (d + 1) as f64);
    if zeta >= 1.0 {
        return Err(Error::param("ζ must be below 1"));
    }
    let params = ChainParams {
        tv_tolerance: zeta / (1.0 + zeta),
        burn_in_constant: config.burn_in_constant,
        memo: config.memo,
    };
    let per_level = config.delta / d as f64;
    let mut alphas = vec![1.0];
    let mut steps = 0;
    for k in 1..=d {
        let view = truncate(tree, k)?;
        let est = estimate_alpha_keyed(&view, zeta, per_level, &params, config.seed, &[tag::LEVEL, k as u64])?;
        alphas.push(est.value);
        steps += est.steps;
    }
    // worst-case bound: each 1/α̂ is off by at most a factor 1 ± ζ
    let spread = zeta * alphas.iter().map(|a| 1.0 / a).sum::<f64>();
    Ok(Levels {
        alphas,
        steps,
        std_error: spread,
    })
}

/// The fraction `|S|/2^n`, clamped to `[0, 1]`.
pub fn estimate_fraction<T: BranchingTree>(tree: &T, config: &EstimatorConfig) -> Result<f64> {
    Ok(estimate_size(tree, config)?.fraction.clamp(0.0, 1.0))
}

/// Depth-first count that stops as soon as `threshold + 1` nodes have been
/// seen. Also returns the number of nodes visited.
pub fn count_up_to_instrumented<T: BranchingTree>(tree: &T, threshold: u64) -> Result<(CountOutcome, u64)> {
    let mut visits = 0u64;
    for_each_node(tree, |_| {
        visits += 1;
        if visits > threshold {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    let outcome = if visits > threshold {
        CountOutcome::Exceeds { threshold }
    } else {
        CountOutcome::Exact { value: visits }
    };
    Ok((outcome, visits))
}

/// Decides whether `|S| ≤ threshold`, returning the exact count if so.
pub fn count_up_to<T: BranchingTree>(tree: &T, threshold: u64) -> Result<CountOutcome> {
    Ok(count_up_to_instrumented(tree, threshold)?.0)
}

/// Runs the estimator with `ξ = sqrt(s / 2^n)`, for an additive error of
/// `2^(n/2) · s^(1/2)`.
pub fn absolute_error_estimate<T: BranchingTree>(
    tree: &T,
    s: f64,
    config: &EstimatorConfig,
) -> Result<EstimateReport> {
    let h = tree.height();
    if h > MAX_HEIGHT {
        return Err(Error::Guard(format!(
            "height {h} exceeds the supported maximum of {MAX_HEIGHT}"
        )));
    }
    let full = (h as f64).exp2();
    if !(s >= 1.0 && s <= full) {
        return Err(Error::param(format!("s must lie in [1, 2^{h}], got {s}")));
    }
    let xi = (s / full).sqrt();
    let mut report = estimate_size(tree, &EstimatorConfig { xi, ..*config })?;
    report.error_radius = (h as f64 / 2.0).exp2() * s.sqrt();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RasReport {
    /// `τ = ceil(k · 2^(n/2) · s^(1/2))` with `s = 2^(βn)`.
    pub threshold: u64,
    /// True when the count was at most `τ` and is exact.
    pub exact_branch: bool,
    pub report: EstimateReport,
}

/// Relative approximation `f(1 ± 1/k)`: counts exactly up to `τ`, and
/// otherwise estimates with additive error `2^(n/2) s^(1/2) = τ/k < f/k`.
pub fn ras<T: BranchingTree>(tree: &T, k: f64, beta: f64, config: &EstimatorConfig) -> Result<RasReport> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::param(format!("k must be at least 1, got {k}")));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::param(format!("β must lie in (0, 1), got {beta}")));
    }
    if !(config.delta > 0.0 && config.delta < 1.0) {
        return Err(Error::param(format!("δ must lie in (0, 1), got {}", config.delta)));
    }
    let h = tree.height();
    if h > MAX_HEIGHT {
        return Err(Error::Guard(format!(
            "height {h} exceeds the supported maximum of {MAX_HEIGHT}"
        )));
    }
    let s = (beta * h as f64).exp2();
    let radius = (h as f64 / 2.0).exp2() * s.sqrt();
    let tau = (k * radius).ceil();
    let threshold = if tau >= u64::MAX as f64 { u64::MAX - 1 } else { tau as u64 };
    let start = Instant::now();
    if let CountOutcome::Exact { value } = count_up_to(tree, threshold)? {
        let mut report = EstimateReport::exact(h, value as f64, Vec::new(), 0.0, config.schedule);
        report.wall_time_secs = start.elapsed().as_secs_f64();
        return Ok(RasReport {
            threshold,
            exact_branch: true,
            report,
        });
    }
    let report = absolute_error_estimate(tree, s, config)?;
    Ok(RasReport {
        threshold,
        exact_branch: false,
        report,
    })
}
