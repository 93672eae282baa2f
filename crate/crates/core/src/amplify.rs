//! Majority-rule error amplification and complexity accounting.
//!
//! A single rounded Grover run fails with probability at most `p = 1/N`.
//! Repeating it `R` times (odd) and taking the majority fails only when at
//! least `⌈R/2⌉` runs fail, which is bounded by `2^{R−1} p^{⌈R/2⌉}`. Averaging
//! outcomes instead only reaches `1/(N√R)`.
//!
//! Monte Carlo runs use ChaCha8 keyed by `seed` with one stream per shard
//! of [`SHARD_TRIALS`] trials, so the sample is identical on every platform
//! and for every thread count.

use std::io::Write;

use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::search::{equivalence_params, SearchInstance};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Trials per random stream.
pub const SHARD_TRIALS: u64 = 1 << 16;

/// Smallest Monte Carlo sample accepted by [`simulate_majority`].
pub const MIN_TRIALS: u64 = 10_000;

/// Largest run count searched when sizing a repetition.
pub const MAX_RUNS: u64 = 100_001;

/// Per-run failure probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorModel {
    /// Rounded Grover search over `N` items, `p = 1/N`.
    Grover(u64),
    Explicit(f64),
}

impl ErrorModel {
    pub fn per_run_error(&self) -> f64 {
        match *self {
            ErrorModel::Grover(n) => 1.0 / n as f64,
            ErrorModel::Explicit(p) => p,
        }
    }
}

fn check_odd(runs: u64) -> Result<()> {
    if runs == 0 || runs.is_multiple_of(2) {
        return Err(Error::EvenRuns(runs));
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("p", format!("must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// `2^{R−1} p^{⌈R/2⌉}`.
pub fn majority_power_bound(p: f64, runs: u64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    let half = runs.div_ceil(2) as f64;
    ((runs as f64 - 1.0) * std::f64::consts::LN_2 + half * p.ln()).exp()
}

/// Exact `P(failures ≥ ⌈R/2⌉)` for `R` independent runs failing with probability `p`.
pub fn binomial_tail(p: f64, runs: u64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return 1.0;
    }
    let r = runs as f64;
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    // ln C(R, k), built up from k = 0
    let mut ln_choose = 0.0;
    let mut total = 0.0;
    let first = runs.div_ceil(2);
    for k in 0..=runs {
        if k > 0 {
            ln_choose += (r - k as f64 + 1.0).ln() - (k as f64).ln();
        }
        if k >= first {
            total += (ln_choose + k as f64 * lp + (r - k as f64) * lq).exp();
        }
    }
    total.min(1.0)
}

/// `2^{R−1}/N^{⌈R/2⌉}` for the Grover model, the exact binomial tail for an explicit `p`.
pub fn majority_bound(model: ErrorModel, runs: u64) -> Result<f64> {
    check_odd(runs)?;
    match model {
        ErrorModel::Grover(n) => {
            if n < 2 {
                return Err(Error::DatabaseTooSmall(n));
            }
            Ok(majority_power_bound(1.0 / n as f64, runs))
        }
        ErrorModel::Explicit(p) => {
            check_probability(p)?;
            Ok(binomial_tail(p, runs))
        }
    }
}

/// `1/(N√R)`
pub fn averaging_error(n: u64, runs: u64) -> Result<f64> {
    if runs == 0 {
        return Err(invalid("R", "must be at least 1"));
    }
    if n < 2 {
        return Err(Error::DatabaseTooSmall(n));
    }
    Ok(1.0 / (n as f64 * (runs as f64).sqrt()))
}

/// Smallest odd `R` whose majority bound beats averaging over the same `R`.
pub fn majority_beats_averaging(n: u64, max_runs: u64) -> Result<Option<u64>> {
    for r in (1..=max_runs).step_by(2) {
        if majority_bound(ErrorModel::Grover(n), r)? < averaging_error(n, r)? {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Monte Carlo setup for majority voting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationPlan {
    pub per_run_error: f64,
    pub runs: u64,
    pub trials: u64,
    pub seed: u64,
}

impl AmplificationPlan {
    pub fn validate(&self) -> Result<()> {
        check_probability(self.per_run_error)?;
        check_odd(self.runs)?;
        if self.trials < MIN_TRIALS {
            return Err(invalid("trials", format!("need at least {MIN_TRIALS}, got {}", self.trials)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MajorityEstimate {
    pub failures: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl MajorityEstimate {
    /// Half-width of the Wilson interval.
    pub fn ci95(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.ci_low..=self.ci_high).contains(&x)
    }
}

/// Wilson score interval for `k` successes in `n` trials at normal quantile `z`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let low = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if k == n { 1.0 } else { (center + half).min(1.0) };
    (low, high)
}

/// Empirical majority-failure rate with a Wilson 95% interval.
pub fn simulate_majority(plan: &AmplificationPlan) -> Result<MajorityEstimate> {
    plan.validate()?;
    let run = Bernoulli::new(plan.per_run_error).map_err(|e| invalid("p", e.to_string()))?;
    let threshold = plan.runs.div_ceil(2);
    let shards = plan.trials.div_ceil(SHARD_TRIALS);
    let failures: u64 = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            rng.set_stream(shard);
            let count = SHARD_TRIALS.min(plan.trials - shard * SHARD_TRIALS);
            (0..count)
                .filter(|_| {
                    let bad = (0..plan.runs).filter(|_| run.sample(&mut rng)).count() as u64;
                    bad >= threshold
                })
                .count() as u64
        })
        .sum();
    let (ci_low, ci_high) = wilson_interval(failures, plan.trials, Z_95);
    Ok(MajorityEstimate {
        failures,
        trials: plan.trials,
        rate: failures as f64 / plan.trials as f64,
        ci_low,
        ci_high,
    })
}

/// One line of an amplification report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationRow {
    pub runs: u64,
    pub bound: f64,
    pub exact: f64,
    pub empirical: f64,
    pub ci95: f64,
}

/// Bound, exact tail and Monte Carlo estimate at `p` for each `R`.
pub fn amplification_table(p: f64, runs: &[u64], trials: u64, seed: u64) -> Result<Vec<AmplificationRow>> {
    runs.iter()
        .map(|&r| {
            let est = simulate_majority(&AmplificationPlan { per_run_error: p, runs: r, trials, seed })?;
            Ok(AmplificationRow {
                runs: r,
                bound: majority_power_bound(p, r),
                exact: binomial_tail(p, r),
                empirical: est.rate,
                ci95: est.ci95(),
            })
        })
        .collect()
}

/// Writes `R,bound,exact,empirical,ci95` with 17 significant digits.
pub fn write_amplification_csv<W: Write>(mut out: W, rows: &[AmplificationRow]) -> std::io::Result<()> {
    writeln!(out, "R,bound,exact,empirical,ci95")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.runs, r.bound, r.exact, r.empirical, r.ci95
        )?;
    }
    Ok(())
}

/// Register width and per-step cost for a given number of exponentiations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegisterWidth {
    pub bits: u32,
}

impl RegisterWidth {
    /// `m·b³` abstract units for `m = log₂ N` components.
    pub fn step_cost(&self, components: f64) -> f64 {
        components * (self.bits as f64).powi(3)
    }

    /// Available precision `2^{−b}`.
    pub fn precision(&self) -> f64 {
        2f64.powi(-(self.bits as i32))
    }
}

/// `b = ⌈log₂(n·l/ε)⌉`, at least 1, so that `n·l·2^{−b} ≤ ε`.
pub fn register_width(n: u64, l: u64, epsilon: f64) -> Result<RegisterWidth> {
    if n == 0 || l == 0 {
        return Err(invalid("n", "n and l must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon", format!("must lie in (0, 1), got {epsilon}")));
    }
    let target = n as f64 * l as f64 / epsilon;
    let mut b = target.log2().ceil().max(1.0) as i32;
    while b > 1 && 2f64.powi(b - 1) >= target {
        b -= 1;
    }
    while 2f64.powi(b) < target {
        b += 1;
    }
    Ok(RegisterWidth { bits: b as u32 })
}

/// Query accounting: binary queries per Trotter step and per Grover step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QueryConvention {
    pub per_trotter_step: f64,
    pub per_grover_step: f64,
}

impl Default for QueryConvention {
    fn default() -> Self {
        Self { per_trotter_step: 2.0, per_grover_step: 1.0 }
    }
}

/// Inputs of the complexity formulas, in abstract cost units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    pub time: f64,
    pub epsilon: f64,
    pub database_size: u64,
    /// Number of Hamiltonian terms `l`.
    pub terms: u64,
    /// Interaction-graph degree `d` (reported only).
    pub degree: u64,
    /// `‖E⁽²⁾‖` of the term split.
    pub norm_e2: f64,
    /// Cost `C` of one Trotter step.
    pub step_cost: f64,
    /// Cost `C_G` of one Grover step.
    pub grover_step_cost: f64,
    pub queries: QueryConvention,
    /// Measured per-run failure probability replacing the worst case `1/N`.
    pub per_run_error: Option<f64>,
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("time", self.time),
            ("step_cost", self.step_cost),
            ("grover_step_cost", self.grover_step_cost),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid("cost model", format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid("epsilon", format!("must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.database_size < 2 {
            return Err(Error::DatabaseTooSmall(self.database_size));
        }
        if self.terms == 0 || !(self.norm_e2 >= 0.0) {
            return Err(invalid("cost model", "terms must be ≥ 1 and norm_e2 ≥ 0"));
        }
        Ok(())
    }

    pub fn components(&self) -> f64 {
        (self.database_size as f64).log2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrotterCost {
    /// `t² ‖E⁽²⁾‖ / ε`
    pub steps: f64,
    pub cost: f64,
    pub queries: f64,
}

/// `t² (‖E⁽²⁾‖/ε) C` and the implied step count.
pub fn trotter_complexity(cm: &CostModel) -> Result<TrotterCost> {
    cm.validate()?;
    let steps = cm.time * cm.time * cm.norm_e2 / cm.epsilon;
    Ok(TrotterCost {
        steps,
        cost: steps * cm.step_cost,
        queries: steps * cm.queries.per_trotter_step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroverCost {
    /// `t/2`, the Grover steps per run used in the cost formula.
    pub steps: f64,
    /// Exact `Q_t` when `t ≤ T`.
    pub qt: Option<f64>,
    /// Smallest odd `R` whose majority failure bound is within `ε`.
    pub runs: u64,
    /// `⌈−2 ln ε / ln N⌉` rounded up to odd.
    pub runs_log_formula: u64,
    pub cost: f64,
    pub queries: f64,
}

fn next_odd(x: u64) -> u64 {
    if x.is_multiple_of(2) { x + 1 } else { x }
}

/// Majority failure bound used to size `R`. For `p ≥ 1/4` the power bound
/// never falls below `p`, so the exact tail is used there instead.
pub fn sizing_error(p: f64, runs: u64) -> f64 {
    if p >= 0.25 {
        binomial_tail(p, runs)
    } else {
        majority_power_bound(p, runs)
    }
}

/// Smallest odd `R` with `sizing_error(p, R) ≤ ε`.
pub fn runs_for_error(p: f64, epsilon: f64) -> Result<u64> {
    check_probability(p)?;
    if p >= 0.5 {
        return Err(invalid("p", format!("majority voting needs p < 1/2, got {p}")));
    }
    let mut r = 1;
    while sizing_error(p, r) > epsilon * (1.0 + 1e-12) {
        r += 2;
        if r > MAX_RUNS {
            return Err(invalid("epsilon", format!("needs more than {MAX_RUNS} runs")));
        }
    }
    Ok(r)
}

/// `(t/2) R C_G` with `R` sized by the majority bound.
pub fn grover_complexity(cm: &CostModel) -> Result<GroverCost> {
    cm.validate()?;
    let n = cm.database_size;
    let p = cm.per_run_error.unwrap_or(1.0 / n as f64);
    let runs = runs_for_error(p, cm.epsilon)?;
    let log_runs = (-2.0 * cm.epsilon.ln() / (n as f64).ln()).ceil().max(1.0) as u64;
    let inst = SearchInstance::new(n)?;
    let qt = equivalence_params(&inst, cm.time).ok().map(|e| e.qt);
    let steps = cm.time / 2.0;
    Ok(GroverCost {
        steps,
        qt,
        runs,
        runs_log_formula: next_odd(log_runs),
        cost: steps * runs as f64 * cm.grover_step_cost,
        queries: steps * runs as f64 * cm.queries.per_grover_step,
    })
}

/// Everything `cost` reports for one `(N, t, ε)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub inputs: CostInputs,
    pub trotter: TrotterSide,
    pub grover: GroverSide,
    /// `grover.cost / trotter.cost`
    pub ratio: f64,
    pub convention: QueryConvention,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostInputs {
    pub n: u64,
    pub t: f64,
    pub epsilon: f64,
    pub terms: u64,
    pub degree: u64,
    pub norm_e2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrotterSide {
    pub n: u64,
    pub dt: f64,
    pub b: u32,
    #[serde(rename = "C")]
    pub step_cost: f64,
    pub cost: f64,
    pub queries: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroverSide {
    pub steps: f64,
    pub qt: Option<f64>,
    #[serde(rename = "R")]
    pub runs: u64,
    pub r_log_formula: u64,
    pub b: u32,
    #[serde(rename = "C_G")]
    pub step_cost: f64,
    pub cost: f64,
    pub queries: f64,
}

/// Compares small-step Trotter and Grover-with-majority costs for search.
///
/// Per-step costs are `m b³` with `m = log₂ N`; the Trotter register covers
/// `n·l` exponentiations and the Grover register `2 Q_t` of them.
pub fn search_cost_report(
    n: u64,
    t: f64,
    epsilon: f64,
    norm_e2: f64,
    convention: QueryConvention,
    per_run_error: Option<f64>,
) -> Result<CostReport> {
    let terms = 2;
    let degree = 1;
    let mut cm = CostModel {
        time: t,
        epsilon,
        database_size: n,
        terms,
        degree,
        norm_e2,
        step_cost: 1.0,
        grover_step_cost: 1.0,
        queries: convention,
        per_run_error,
    };
    let steps_real = trotter_complexity(&cm)?.steps;
    let trotter_steps = steps_real.ceil().max(1.0) as u64;
    let b = register_width(trotter_steps, terms, epsilon)?;
    cm.step_cost = b.step_cost(cm.components());

    let exps = (2.0 * (t / 2.0)).ceil().max(1.0) as u64;
    let bg = register_width(exps, 1, epsilon)?;
    cm.grover_step_cost = bg.step_cost(cm.components());

    let tc = trotter_complexity(&cm)?;
    let gc = grover_complexity(&cm)?;
    Ok(CostReport {
        inputs: CostInputs { n, t, epsilon, terms, degree, norm_e2 },
        trotter: TrotterSide {
            n: trotter_steps,
            dt: t / trotter_steps as f64,
            b: b.bits,
            step_cost: cm.step_cost,
            cost: tc.cost,
            queries: tc.queries,
        },
        grover: GroverSide {
            steps: gc.steps,
            qt: gc.qt,
            runs: gc.runs,
            r_log_formula: gc.runs_log_formula,
            b: bg.bits,
            step_cost: cm.grover_step_cost,
            cost: gc.cost,
            queries: gc.queries,
        },
        ratio: gc.cost / tc.cost,
        convention,
    })
}
