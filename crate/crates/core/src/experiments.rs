//! Monte Carlo engine: relaxation-time sampling with censoring, survival
//! tail-index estimation, hybrid-zone growth tracking on a geometric time
//! grid, and deterministic replica orchestration.
//!
//! Reproducibility contract: every replica draws from a ChaCha stream
//! derived from `(master seed, replica index)`, replicas are aggregated by
//! index, and all CSV output is byte-stable for a fixed spec.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Configuration;
use crate::kernel::{apply_event, sample_event, Params, StepEvent};
use crate::lyapunov::{f1, f2, rho2};
use crate::PairIndex;

#[derive(Debug, Error, PartialEq)]
pub enum EstimationError {
    #[error("need at least {need} uncensored samples, have {have}")]
    TooFewUncensored { have: usize, need: usize },
    #[error("need at least {need} usable grid points, have {have}")]
    TooFewPoints { have: usize, need: usize },
    #[error("fit window spans {got:.2} decades, need at least {need:.1}")]
    SpanTooNarrow { got: f64, need: f64 },
}

/// A full experiment specification; serializes to the run's JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub beta: f64,
    pub p: f64,
    pub s0_blocks: Vec<u64>,
    pub horizon: u64,
    pub cap: u64,
    pub replicas: u32,
    pub seed: u64,
    pub mode: String,
}

impl RunSpec {
    pub fn s0(&self) -> Configuration {
        Configuration::from_blocks(self.s0_blocks.clone()).expect("valid block vector")
    }

    pub fn params(&self) -> Params {
        Params::new(self.beta, self.p).expect("valid parameters")
    }
}

/// Independent generator for one replica.
pub fn replica_rng(master_seed: u64, replica: u32) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(replica as u64);
    rng
}

/// Outcome of one relaxation-time replica. `tau` is the first step at which
/// the ground state is hit, `None` when censored at the cap; `tau_c` is the
/// accumulated exponential holding time of the embedded continuous-time
/// chain up to the same event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauOutcome {
    pub tau: Option<u64>,
    pub tau_c: Option<f64>,
    /// The start was the ground state under absorbing parameters, so the
    /// return time is the trivial one-step self-hit.
    pub absorbing_start: bool,
}

/// Runs one replica until the ground state is hit or `cap` steps elapse.
/// Each step draws the holding time first, then the jump event.
pub fn relaxation_time_sample<R: Rng + ?Sized>(
    s0: &Configuration,
    params: &Params,
    cap: u64,
    rng: &mut R,
) -> TauOutcome {
    let absorbing_start = s0.is_ground() && (params.beta >= 1.0 || params.p >= 1.0);
    let mut state = s0.clone();
    let mut clock = 0.0f64;
    for t in 1..=cap {
        let rate = state.pair_count() as f64;
        clock += Exp::new(rate).expect("positive rate").sample(rng);
        let event = sample_event(&state, params, rng);
        state = apply_event(&state, &event);
        if state.is_ground() {
            return TauOutcome {
                tau: Some(t),
                tau_c: Some(clock),
                absorbing_start,
            };
        }
    }
    TauOutcome {
        tau: None,
        tau_c: None,
        absorbing_start,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSample {
    pub replica: u32,
    pub seed: u64,
    pub outcome: TauOutcome,
}

/// All replicas of a relaxation-time experiment, ordered by replica index.
pub fn run_tau_replicas(spec: &RunSpec) -> Vec<TauSample> {
    let s0 = spec.s0();
    let params = spec.params();
    (0..spec.replicas)
        .into_par_iter()
        .map(|replica| {
            let mut rng = replica_rng(spec.seed, replica);
            let outcome = relaxation_time_sample(&s0, &params, spec.cap, &mut rng);
            TauSample {
                replica,
                seed: spec.seed,
                outcome,
            }
        })
        .collect()
}

pub fn censoring_fraction(samples: &[TauSample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|s| s.outcome.tau.is_none()).count() as f64 / samples.len() as f64
}

/// `tau.csv`: replica, seed, tau, censored, tau_c. Censored rows leave the
/// value columns empty.
pub fn tau_csv(samples: &[TauSample]) -> String {
    let mut out = String::from("replica,seed,tau,censored,tau_c\n");
    for s in samples {
        match (s.outcome.tau, s.outcome.tau_c) {
            (Some(tau), Some(tau_c)) => {
                out.push_str(&format!("{},{},{},0,{}\n", s.replica, s.seed, tau, tau_c));
            }
            _ => out.push_str(&format!("{},{},,1,\n", s.replica, s.seed)),
        }
    }
    out
}

/// One observation with its censoring flag, for tail estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensoredSample {
    pub value: f64,
    pub censored: bool,
}

pub fn censored_from_tau(samples: &[TauSample], cap: u64) -> Vec<CensoredSample> {
    samples
        .iter()
        .map(|s| match s.outcome.tau {
            Some(tau) => CensoredSample {
                value: tau as f64,
                censored: false,
            },
            None => CensoredSample {
                value: cap as f64,
                censored: true,
            },
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailMethod {
    /// Least-squares slope of log survival against log t over a geometric
    /// grid, censoring-aware (the survival curve is truncated at the cap).
    SurvivalSlope,
    /// Classical order-statistics estimator on the uncensored sample;
    /// biased under heavy censoring, available for comparison.
    Hill { order_statistics: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub exponent: f64,
    pub std_error: f64,
    pub censoring_fraction: f64,
    pub sample_count: usize,
    /// Set when the fitted decay is too steep to be a polynomial tail.
    pub light_tail: bool,
}

/// Exponent above which a fitted survival slope is reported as a light
/// (non-polynomial) tail.
pub const LIGHT_TAIL_EXPONENT: f64 = 4.0;
/// A light tail is also declared when the upper-window slope is this much
/// steeper than the lower-window slope: a polynomial tail is flat in
/// log-log coordinates while an exponential one steepens without bound.
pub const LIGHT_TAIL_STEEPENING: f64 = 1.5;

const MIN_UNCENSORED: usize = 100;
const MIN_FIT_POINTS: usize = 4;
const FIT_GRID_START: f64 = 4.0;
const FIT_GRID_RATIO: f64 = 1.15;
const MIN_SURVIVORS: usize = 100;
const GRID_RATIO: f64 = 1.25;

fn ols(points: &[(f64, f64)]) -> (f64, f64, f64) {
    // Returns (intercept, slope, slope standard error).
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let dof = (points.len().saturating_sub(2)).max(1) as f64;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let se = (sse / dof / sxx).sqrt();
    (intercept, slope, se)
}

/// Estimates the polynomial decay exponent of the survival function of a
/// censored sample.
pub fn tail_index_estimate(
    samples: &[CensoredSample],
    method: TailMethod,
) -> Result<TailEstimate, EstimationError> {
    let uncensored: Vec<f64> = samples
        .iter()
        .filter(|s| !s.censored)
        .map(|s| s.value)
        .collect();
    if uncensored.len() < MIN_UNCENSORED {
        return Err(EstimationError::TooFewUncensored {
            have: uncensored.len(),
            need: MIN_UNCENSORED,
        });
    }
    let censoring = 1.0 - uncensored.len() as f64 / samples.len() as f64;

    match method {
        TailMethod::SurvivalSlope => {
            let n = samples.len();
            let mut values: Vec<f64> = samples.iter().map(|s| s.value).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let top = uncensored.iter().cloned().fold(f64::MIN, f64::max);
            let mut points = Vec::new();
            let mut t = FIT_GRID_START;
            while t <= top {
                // Survivors strictly beyond t; censored values count while
                // t is below the cap they ran to.
                let survivors = n - values.partition_point(|&v| v <= t);
                if survivors >= MIN_SURVIVORS {
                    points.push((t.ln(), (survivors as f64 / n as f64).ln()));
                } else {
                    break;
                }
                t *= FIT_GRID_RATIO;
            }
            if points.len() < MIN_FIT_POINTS {
                return Err(EstimationError::TooFewPoints {
                    have: points.len(),
                    need: MIN_FIT_POINTS,
                });
            }
            let (_, slope, se) = ols(&points);
            let exponent = -slope;
            // Steepening check between quantile-anchored spans: a
            // polynomial tail has the same log-log slope on both, an
            // exponential tail steepens.
            let survival_at = |t: f64| (n - values.partition_point(|&v| v <= t)) as f64 / n as f64;
            let t_at_level = |s_level: f64| {
                let idx = (((1.0 - s_level) * n as f64).ceil() as usize).min(n - 1);
                values[idx]
            };
            let s_floor = MIN_SURVIVORS as f64 / n as f64;
            let (t1, t3) = (t_at_level(0.25), t_at_level(s_floor));
            let t2 = t_at_level((0.25 * s_floor).sqrt());
            let mut steepening = 1.0;
            if t1 < t2 && t2 < t3 {
                let (s1, s2, s3) = (survival_at(t1), survival_at(t2), survival_at(t3));
                if s1 > s2 && s2 > s3 && s3 > 0.0 {
                    let low = (s2 / s1).ln() / (t2 / t1).ln();
                    let high = (s3 / s2).ln() / (t3 / t2).ln();
                    if low < 0.0 {
                        steepening = high / low;
                    }
                }
            }
            Ok(TailEstimate {
                exponent,
                std_error: se,
                censoring_fraction: censoring,
                sample_count: n,
                light_tail: exponent > LIGHT_TAIL_EXPONENT || steepening >= LIGHT_TAIL_STEEPENING,
            })
        }
        TailMethod::Hill { order_statistics } => {
            let mut sorted = uncensored.clone();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let k = order_statistics.clamp(2, sorted.len() - 1);
            let x_k = sorted[k];
            let sum_log: f64 = sorted[..k].iter().map(|&x| (x / x_k).ln()).sum();
            let exponent = k as f64 / sum_log;
            Ok(TailEstimate {
                exponent,
                std_error: exponent / (k as f64).sqrt(),
                censoring_fraction: censoring,
                sample_count: samples.len(),
                light_tail: exponent > LIGHT_TAIL_EXPONENT,
            })
        }
    }
}

/// Observables recorded at one grid time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub t: u64,
    pub size: u64,
    pub blocks: u64,
    pub f1: u64,
    pub f2: u64,
    pub rho2: u64,
    pub max_size: u64,
    pub max_blocks: u64,
}

/// Time series of observables from one replica, sampled on a geometric
/// time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub replica: u32,
    pub seed: u64,
    pub beta: f64,
    pub p: f64,
    pub samples: Vec<GrowthSample>,
    /// First hit of the ground state within the horizon, if any.
    pub tau: Option<u64>,
}

/// The geometric sample grid: 1, then ratio 1.25 rounded up, always ending
/// at the horizon.
pub fn sample_grid(horizon: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    if horizon == 0 {
        return grid;
    }
    let mut t = 1u64;
    while t < horizon {
        grid.push(t);
        t = ((t as f64 * GRID_RATIO).ceil() as u64).max(t + 1);
    }
    grid.push(horizon);
    grid
}

/// Runs one growth replica for `horizon` steps, recording observables on
/// the geometric grid and running maxima continuously. Under pure
/// exclusion the area is tracked incrementally and the linear growth bound
/// `f1(t) <= f1(0) + t` is asserted at every step.
pub fn growth_experiment<R: Rng + ?Sized>(
    s0: &Configuration,
    params: &Params,
    horizon: u64,
    rng: &mut R,
) -> TrajectoryRecord {
    let grid = sample_grid(horizon);
    let mut samples = Vec::with_capacity(grid.len() + 1);
    let mut state = s0.clone();
    let mut max_size = state.size();
    let mut max_blocks = state.num_blocks() as u64;
    let pure_exclusion = params.beta == 0.0;
    let f1_start = f1(&state) as i64;
    let mut f1_running = f1_start;
    let mut tau = None;

    let record = |state: &Configuration, t: u64, max_size: u64, max_blocks: u64| GrowthSample {
        t,
        size: state.size(),
        blocks: state.num_blocks() as u64,
        f1: f1(state),
        f2: f2(state),
        rho2: rho2(state),
        max_size,
        max_blocks,
    };
    samples.push(record(&state, 0, max_size, max_blocks));

    let mut next_grid = 0usize;
    for t in 1..=horizon {
        let event = sample_event(&state, params, rng);
        if pure_exclusion {
            match event {
                StepEvent::Exclusion {
                    pair: PairIndex::Ten(_),
                } => f1_running += 1,
                StepEvent::Exclusion {
                    pair: PairIndex::OhOne(_),
                } => f1_running -= 1,
                _ => {}
            }
            assert!(
                f1_running <= f1_start + t as i64,
                "area exceeded the linear growth bound at step {t}"
            );
        }
        state = apply_event(&state, &event);
        max_size = max_size.max(state.size());
        max_blocks = max_blocks.max(state.num_blocks() as u64);
        if tau.is_none() && state.is_ground() {
            tau = Some(t);
        }
        if next_grid < grid.len() && grid[next_grid] == t {
            let s = record(&state, t, max_size, max_blocks);
            if pure_exclusion {
                assert_eq!(
                    s.f1 as i64, f1_running,
                    "incremental area drifted at step {t}"
                );
            }
            samples.push(s);
            next_grid += 1;
        }
    }

    TrajectoryRecord {
        replica: 0,
        seed: 0,
        beta: params.beta,
        p: params.p,
        samples,
        tau,
    }
}

/// All growth replicas, ordered by replica index.
pub fn run_growth_replicas(spec: &RunSpec) -> Vec<TrajectoryRecord> {
    let s0 = spec.s0();
    let params = spec.params();
    (0..spec.replicas)
        .into_par_iter()
        .map(|replica| {
            let mut rng = replica_rng(spec.seed, replica);
            let mut record = growth_experiment(&s0, &params, spec.horizon, &mut rng);
            record.replica = replica;
            record.seed = spec.seed;
            record
        })
        .collect()
}

/// `growth.csv`: replica, t, max_size, max_blocks, f1, f2, rho2.
pub fn growth_csv(records: &[TrajectoryRecord]) -> String {
    let mut out = String::from("replica,t,max_size,max_blocks,f1,f2,rho2\n");
    for r in records {
        for s in &r.samples {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.replica, s.t, s.max_size, s.max_blocks, s.f1, s.f2, s.rho2
            ));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub std_error: f64,
    pub points: usize,
    pub degenerate: bool,
}

/// Log-log slope of a growth series over its final two decades. Points
/// with zero values are skipped (the logarithm is undefined there).
pub fn growth_exponent(times: &[u64], values: &[u64]) -> Result<SlopeEstimate, EstimationError> {
    assert_eq!(times.len(), values.len());
    let usable: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|&(&t, &v)| t > 0 && v > 0)
        .map(|(&t, &v)| (t as f64, v as f64))
        .collect();
    if usable.len() < 10 {
        return Err(EstimationError::TooFewPoints {
            have: usable.len(),
            need: 10,
        });
    }
    let t_max = usable.iter().map(|p| p.0).fold(f64::MIN, f64::max);
    let t_min = usable.iter().map(|p| p.0).fold(f64::MAX, f64::min);
    let decades = (t_max / t_min).log10();
    if decades < 2.0 {
        return Err(EstimationError::SpanTooNarrow {
            got: decades,
            need: 2.0,
        });
    }
    let window: Vec<(f64, f64)> = usable
        .into_iter()
        .filter(|&(t, _)| t >= t_max / 100.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    if window.len() < 10 {
        return Err(EstimationError::TooFewPoints {
            have: window.len(),
            need: 10,
        });
    }
    let degenerate = window.windows(2).all(|w| w[0].1 == w[1].1);
    if degenerate {
        return Ok(SlopeEstimate {
            slope: 0.0,
            std_error: 0.0,
            points: window.len(),
            degenerate,
        });
    }
    let (_, slope, se) = ols(&window);
    Ok(SlopeEstimate {
        slope,
        std_error: se,
        points: window.len(),
        degenerate,
    })
}

/// A single-pair configuration whose largest-rectangle witness is exactly
/// `(x, y)`, for relaxation runs conditioned on the initial witness.
pub fn configuration_with_witness(x: u64, y: u64) -> Configuration {
    assert!(x >= 1 && y >= 1);
    Configuration::from_blocks(vec![x, y]).expect("positive blocks")
}

/// Report of the maximal-size probe: the empirical probability that the
/// running maximum of the zone size stays below `2 sqrt(10) t^(1/2)`,
/// against the bound `0.95 - f2(S0)/(10 t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeBoundProbe {
    pub t: u64,
    pub replicas: u32,
    pub threshold: f64,
    pub empirical: f64,
    pub bound: f64,
    pub sigma: f64,
    pub vacuous: bool,
    pub pass: bool,
}

pub fn size_bound_probe(
    s0: &Configuration,
    params: &Params,
    t: u64,
    replicas: u32,
    master_seed: u64,
) -> SizeBoundProbe {
    let threshold = 2.0 * 10.0f64.sqrt() * (t as f64).sqrt();
    let successes: u32 = (0..replicas)
        .into_par_iter()
        .map(|replica| {
            let mut rng = replica_rng(master_seed, replica);
            let mut state = s0.clone();
            let mut max_size = state.size();
            for _ in 0..t {
                state = apply_event(&state, &sample_event(&state, params, &mut rng));
                max_size = max_size.max(state.size());
            }
            u32::from((max_size as f64) <= threshold)
        })
        .sum();
    let empirical = successes as f64 / replicas as f64;
    let bound = 0.95 - f2(s0) as f64 / (10.0 * t as f64);
    let vacuous = bound <= 0.0;
    let sigma = (empirical * (1.0 - empirical) / replicas as f64).sqrt();
    SizeBoundProbe {
        t,
        replicas,
        threshold,
        empirical,
        bound,
        sigma,
        vacuous,
        pass: vacuous || empirical >= bound - 3.0 * sigma,
    }
}

/// An exploratory Monte Carlo report; never part of any pass/fail gate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExploratoryReport {
    pub label: String,
    /// Always "EXPLORATORY".
    pub status: String,
    pub details: serde_json::Value,
}

impl ExploratoryReport {
    fn new(label: &str, details: serde_json::Value) -> Self {
        ExploratoryReport {
            label: label.to_string(),
            status: "EXPLORATORY".into(),
            details,
        }
    }
}

/// Probe 1: for transient exclusion mixed with a small voter component,
/// watch how the mean and censoring of the return time blow up as beta
/// shrinks.
pub fn probe_small_beta_moments(p: f64, cap: u64, replicas: u32, seed: u64) -> ExploratoryReport {
    let betas = [0.0, 0.05, 0.1, 0.2];
    let mut rows = Vec::new();
    for (i, &beta) in betas.iter().enumerate() {
        let spec = RunSpec {
            beta,
            p,
            s0_blocks: vec![1, 1],
            horizon: 0,
            cap,
            replicas,
            seed: seed.wrapping_add(i as u64),
            mode: "tau".into(),
        };
        let samples = run_tau_replicas(&spec);
        let uncensored: Vec<u64> = samples.iter().filter_map(|s| s.outcome.tau).collect();
        let mean = if uncensored.is_empty() {
            f64::NAN
        } else {
            uncensored.iter().sum::<u64>() as f64 / uncensored.len() as f64
        };
        rows.push(serde_json::json!({
            "beta": beta,
            "censoring_fraction": censoring_fraction(&samples),
            "mean_tau_uncensored": mean,
        }));
    }
    ExploratoryReport::new("small-beta return-time moments", serde_json::json!(rows))
}

/// Probe 2: hit fractions under growing caps for the mixture with a
/// transient exclusion component.
pub fn probe_recurrence(beta: f64, p: f64, replicas: u32, seed: u64) -> ExploratoryReport {
    let caps = [1_000u64, 10_000, 100_000];
    let mut rows = Vec::new();
    for (i, &cap) in caps.iter().enumerate() {
        let spec = RunSpec {
            beta,
            p,
            s0_blocks: vec![1, 1],
            horizon: 0,
            cap,
            replicas,
            seed: seed.wrapping_add(i as u64),
            mode: "tau".into(),
        };
        let samples = run_tau_replicas(&spec);
        rows.push(serde_json::json!({
            "cap": cap,
            "hit_fraction": 1.0 - censoring_fraction(&samples),
        }));
    }
    ExploratoryReport::new("recurrence under growing caps", serde_json::json!(rows))
}

/// Probe 3: terminal-size and running-maximum growth exponents for pure
/// exclusion.
pub fn probe_exclusion_growth(p: f64, horizon: u64, replicas: u32, seed: u64) -> ExploratoryReport {
    let spec = RunSpec {
        beta: 0.0,
        p,
        s0_blocks: Vec::new(),
        horizon,
        cap: 0,
        replicas,
        seed,
        mode: "growth".into(),
    };
    let records = run_growth_replicas(&spec);
    let mut max_slopes = Vec::new();
    for r in &records {
        let times: Vec<u64> = r.samples.iter().map(|s| s.t).collect();
        let maxima: Vec<u64> = r.samples.iter().map(|s| s.max_size).collect();
        if let Ok(est) = growth_exponent(&times, &maxima) {
            max_slopes.push(est.slope);
        }
    }
    max_slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = max_slopes
        .get(max_slopes.len() / 2)
        .copied()
        .unwrap_or(f64::NAN);
    ExploratoryReport::new(
        "pure-exclusion growth exponent",
        serde_json::json!({
            "p": p,
            "median_max_size_slope": median,
            "replicas_fit": max_slopes.len(),
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{step_distribution, ExactParams};
    use crate::rat;
    use crate::Rat;
    use num_traits::Zero;

    #[test]
    fn tau_geometric_under_left_moving_exclusion() {
        // From the smallest excited state with beta = 0, p = 1 the only
        // ground-reaching move fires with probability 1/3 each step.
        let spec = RunSpec {
            beta: 0.0,
            p: 1.0,
            s0_blocks: vec![1, 1],
            horizon: 0,
            cap: 10_000,
            replicas: 4000,
            seed: 99,
            mode: "tau".into(),
        };
        let samples = run_tau_replicas(&spec);
        assert_eq!(censoring_fraction(&samples), 0.0);
        let taus: Vec<u64> = samples.iter().map(|s| s.outcome.tau.unwrap()).collect();
        assert!(taus.iter().all(|&t| t >= 1));
        let mean = taus.iter().sum::<u64>() as f64 / taus.len() as f64;
        // Geometric(1/3) has mean 3 and sd sqrt(6); 4 sigma band.
        assert!((mean - 3.0).abs() < 4.0 * 6.0f64.sqrt() / (taus.len() as f64).sqrt());
    }

    #[test]
    fn tau_first_step_hit_probability_pure_voter() {
        // Exact one-step law: 4 of the 6 voter outcomes from the smallest
        // excited state reach the ground state.
        let law = step_distribution(&Configuration::d1(), ExactParams::new(rat(1, 1), rat(1, 2)));
        assert_eq!(law.probability_of(&Configuration::ground()), rat(2, 3));

        let spec = RunSpec {
            beta: 1.0,
            p: 0.5,
            s0_blocks: vec![1, 1],
            horizon: 0,
            cap: 1_000_000,
            replicas: 10_000,
            seed: 7,
            mode: "tau".into(),
        };
        let samples = run_tau_replicas(&spec);
        let hit1 = samples.iter().filter(|s| s.outcome.tau == Some(1)).count() as f64
            / samples.len() as f64;
        assert!((hit1 - 2.0 / 3.0).abs() < 0.02, "hit1 = {hit1}");
    }

    #[test]
    fn transient_regime_censors() {
        // Returns from the ground state under symmetric pure exclusion are
        // not guaranteed; at a modest cap a visible fraction of replicas
        // never come back.
        let spec = RunSpec {
            beta: 0.0,
            p: 0.5,
            s0_blocks: vec![],
            horizon: 0,
            cap: 1000,
            replicas: 200,
            seed: 61,
            mode: "tau".into(),
        };
        let samples = run_tau_replicas(&spec);
        assert!(censoring_fraction(&samples) > 0.0);
    }

    #[test]
    fn absorbing_start_is_flagged() {
        let mut rng = replica_rng(1, 0);
        let params = Params::new(1.0, 0.2).unwrap();
        let out = relaxation_time_sample(&Configuration::ground(), &params, 10, &mut rng);
        assert!(out.absorbing_start);
        assert_eq!(out.tau, Some(1));
        let params = Params::new(0.3, 0.4).unwrap();
        let out = relaxation_time_sample(&Configuration::ground(), &params, 10, &mut rng);
        assert!(!out.absorbing_start);
    }

    #[test]
    fn continuous_clock_is_sum_of_holdings() {
        // tau_c is positive, finite, and roughly tau times the mean holding
        // time for small states.
        let spec = RunSpec {
            beta: 0.0,
            p: 1.0,
            s0_blocks: vec![1, 1],
            horizon: 0,
            cap: 100_000,
            replicas: 2000,
            seed: 5,
            mode: "tau".into(),
        };
        let samples = run_tau_replicas(&spec);
        for s in &samples {
            let tau_c = s.outcome.tau_c.unwrap();
            assert!(tau_c > 0.0 && tau_c.is_finite());
        }
        // Every holding clock here runs at rate 3 (the state never grows).
        let mean_ratio: f64 = samples
            .iter()
            .map(|s| s.outcome.tau_c.unwrap() / s.outcome.tau.unwrap() as f64)
            .sum::<f64>()
            / samples.len() as f64;
        assert!((mean_ratio - 1.0 / 3.0).abs() < 0.02, "ratio {mean_ratio}");
    }

    #[test]
    fn pareto_tail_is_recovered() {
        let mut rng = replica_rng(2024, 0);
        let alpha = 1.5;
        let samples: Vec<CensoredSample> = (0..100_000)
            .map(|_| {
                let u: f64 = rng.gen();
                CensoredSample {
                    value: (1.0 - u).powf(-1.0 / alpha),
                    censored: false,
                }
            })
            .collect();
        let est = tail_index_estimate(&samples, TailMethod::SurvivalSlope).unwrap();
        assert!((est.exponent - alpha).abs() < 0.1, "estimate {est:?}");
        assert!(!est.light_tail);
        assert_eq!(est.censoring_fraction, 0.0);

        let hill = tail_index_estimate(
            &samples,
            TailMethod::Hill {
                order_statistics: 400,
            },
        )
        .unwrap();
        assert!((hill.exponent - alpha).abs() < 0.2, "hill {hill:?}");
    }

    #[test]
    fn geometric_tail_is_flagged_light() {
        let mut rng = replica_rng(2025, 0);
        let q: f64 = 0.5;
        let samples: Vec<CensoredSample> = (0..20_000)
            .map(|_| {
                let mut v = 1u64;
                while rng.gen::<f64>() > q {
                    v += 1;
                }
                CensoredSample {
                    value: v as f64,
                    censored: false,
                }
            })
            .collect();
        let est = tail_index_estimate(&samples, TailMethod::SurvivalSlope).unwrap();
        assert!(est.light_tail, "estimate {est:?}");
    }

    #[test]
    fn censoring_is_reported_not_dropped() {
        let mut samples: Vec<CensoredSample> = (1..=400)
            .map(|i| CensoredSample {
                value: i as f64,
                censored: false,
            })
            .collect();
        samples.extend((0..100).map(|_| CensoredSample {
            value: 500.0,
            censored: true,
        }));
        let est = tail_index_estimate(&samples, TailMethod::SurvivalSlope).unwrap();
        assert!((est.censoring_fraction - 0.2).abs() < 1e-12);
        assert_eq!(est.sample_count, 500);
    }

    #[test]
    fn too_few_uncensored_is_an_error() {
        let samples: Vec<CensoredSample> = (0..50)
            .map(|i| CensoredSample {
                value: i as f64 + 1.0,
                censored: false,
            })
            .collect();
        assert_eq!(
            tail_index_estimate(&samples, TailMethod::SurvivalSlope),
            Err(EstimationError::TooFewUncensored {
                have: 50,
                need: 100
            })
        );
    }

    #[test]
    fn growth_exponent_calibration() {
        let times: Vec<u64> = sample_grid(1_000_000);
        let sqrt_series: Vec<u64> = times.iter().map(|&t| ((t as f64).sqrt()) as u64).collect();
        // Exact anchor: slope of t^(1/2) on exact values.
        let exact: Vec<(f64, f64)> = times
            .iter()
            .map(|&t| ((t as f64).ln(), (t as f64).sqrt().ln()))
            .collect();
        let (_, slope, _) = ols(&exact);
        assert!((slope - 0.5).abs() < 1e-9);
        // Rounded series stays close.
        let est = growth_exponent(&times, &sqrt_series).unwrap();
        assert!((est.slope - 0.5).abs() < 0.01, "{est:?}");

        // t^(1/3) (log t)^(1/3) on 10^3..10^6 fits in [0.33, 0.40].
        let times2: Vec<u64> = sample_grid(1_000_000)
            .into_iter()
            .filter(|&t| t >= 1000)
            .collect();
        let curve: Vec<u64> = times2
            .iter()
            .map(|&t| {
                let tf = t as f64;
                (tf.powf(1.0 / 3.0) * tf.ln().powf(1.0 / 3.0)).round() as u64
            })
            .collect();
        let est = growth_exponent(&times2, &curve).unwrap();
        assert!(
            est.slope >= 0.33 && est.slope <= 0.40,
            "slope {} outside window",
            est.slope
        );

        let constant: Vec<u64> = vec![5; times.len()];
        let est = growth_exponent(&times, &constant).unwrap();
        assert!(est.degenerate);
    }

    #[test]
    fn replica_runs_are_deterministic() {
        let spec = RunSpec {
            beta: 0.0,
            p: 0.5,
            s0_blocks: vec![],
            horizon: 2000,
            cap: 0,
            replicas: 2,
            seed: 31337,
            mode: "growth".into(),
        };
        let a = growth_csv(&run_growth_replicas(&spec));
        let b = growth_csv(&run_growth_replicas(&spec));
        assert_eq!(a, b);

        let tau_spec = RunSpec {
            beta: 1.0,
            p: 0.5,
            s0_blocks: vec![1, 1],
            horizon: 0,
            cap: 100_000,
            replicas: 50,
            seed: 8,
            mode: "tau".into(),
        };
        assert_eq!(
            tau_csv(&run_tau_replicas(&tau_spec)),
            tau_csv(&run_tau_replicas(&tau_spec))
        );
    }

    #[test]
    fn single_replica_matches_direct_run() {
        let spec = RunSpec {
            beta: 0.2,
            p: 0.6,
            s0_blocks: vec![1, 1],
            horizon: 0,
            cap: 10_000,
            replicas: 1,
            seed: 4242,
            mode: "tau".into(),
        };
        let via_pool = run_tau_replicas(&spec);
        let mut rng = replica_rng(4242, 0);
        let direct = relaxation_time_sample(&spec.s0(), &spec.params(), spec.cap, &mut rng);
        assert_eq!(via_pool[0].outcome, direct);
    }

    #[test]
    fn growth_grid_and_record_shape() {
        let grid = sample_grid(1000);
        assert_eq!(*grid.first().unwrap(), 1);
        assert_eq!(*grid.last().unwrap(), 1000);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));

        let mut rng = replica_rng(1, 0);
        let params = Params::new(0.0, 0.5).unwrap();
        let record = growth_experiment(&Configuration::ground(), &params, 1000, &mut rng);
        assert_eq!(record.samples.len(), grid.len() + 1);
        // Running maxima are monotone.
        assert!(record
            .samples
            .windows(2)
            .all(|w| w[0].max_size <= w[1].max_size));
        let spec_json = serde_json::to_string(&RunSpec {
            beta: 0.0,
            p: 0.5,
            s0_blocks: vec![],
            horizon: 1000,
            cap: 0,
            replicas: 1,
            seed: 1,
            mode: "growth".into(),
        })
        .unwrap();
        let parsed: RunSpec = serde_json::from_str(&spec_json).unwrap();
        assert_eq!(parsed.horizon, 1000);
    }

    #[test]
    fn horizon_zero_records_only_origin() {
        let mut rng = replica_rng(2, 0);
        let params = Params::new(0.5, 0.5).unwrap();
        let record = growth_experiment(&Configuration::d1(), &params, 0, &mut rng);
        assert_eq!(record.samples.len(), 1);
        assert_eq!(record.samples[0].t, 0);
        assert_eq!(record.samples[0].size, 2);
    }

    #[test]
    fn witness_configuration() {
        let s = configuration_with_witness(24, 4);
        let w = crate::lyapunov::g_rect(&s);
        assert_eq!((w.x, w.y), (24, 4));
    }

    #[test]
    fn size_probe_vacuous_bound_is_flagged() {
        let s0 = Configuration::from_blocks(vec![8, 3, 4, 1, 2, 1, 2, 1, 8, 4]).unwrap();
        let params = Params::new(0.0, 0.5).unwrap();
        // f2 = 2169 at t = 100 pushes the bound below zero.
        let probe = size_bound_probe(&s0, &params, 100, 50, 17);
        assert!(probe.vacuous);
        assert!(probe.pass);
        assert!(probe.bound < 0.0);
    }

    #[test]
    fn size_probe_mixture_case_passes() {
        // Mixture dynamics with recurrent exclusion from the smallest
        // excited state.
        let params = Params::new(0.5, 0.8).unwrap();
        let probe = size_bound_probe(&Configuration::d1(), &params, 10_000, 300, 23);
        assert!(!probe.vacuous);
        assert!(probe.pass, "{probe:?}");
    }

    #[test]
    fn exploratory_reports_are_labelled() {
        let report = probe_recurrence(0.3, 0.4, 20, 3);
        assert_eq!(report.status, "EXPLORATORY");
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("EXPLORATORY"));
    }

    #[test]
    fn tau_csv_shape() {
        let spec = RunSpec {
            beta: 0.0,
            p: 1.0,
            s0_blocks: vec![1, 1],
            horizon: 0,
            cap: 3,
            replicas: 30,
            seed: 12,
            mode: "tau".into(),
        };
        let samples = run_tau_replicas(&spec);
        let csv = tau_csv(&samples);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "replica,seed,tau,censored,tau_c");
        assert_eq!(csv.lines().count(), 31);
        // With cap 3 some replicas must censor; censored rows have empty
        // value columns.
        assert!(censoring_fraction(&samples) > 0.0);
        assert!(csv.lines().any(|l| l.ends_with(",1,")));
    }

    #[test]
    fn oracle_mean_checks_out_via_drift() {
        // The area drift from the ground state is (1-beta)(1-p); sanity
        // anchor for the Monte Carlo plumbing.
        let params = ExactParams::new(rat(0, 1), rat(0, 1));
        let drift = crate::drift::drift_oracle(&Configuration::ground(), params, |c| {
            Rat::from_integer(f1(c) as i128)
        });
        assert_eq!(drift, Rat::from_integer(1));
        assert!(!drift.is_zero());
    }
}
