//! Expected one-step increments: closed forms, an exact enumeration oracle,
//! specialized jump laws for the pure-exclusion regime, and the hitting-time
//! moment predictor.
//!
//! The oracle works in exact rational arithmetic end-to-end, so checking a
//! rational closed form against it is an equality test, not a tolerance test.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, Configuration, PairIndex};
use crate::kernel::{rat_to_f64, step_distribution, ExactParams};
use crate::lyapunov::{f1, f2, phi};
use crate::Rat;

#[derive(Debug, Error, PartialEq)]
pub enum DriftError {
    #[error("the ground state is outside this formula's domain")]
    GroundState,
    #[error("gamma = {0} must lie in [0, 1)")]
    GammaRange(f64),
}

/// Exact expected one-step increment of `functional` from `s`.
pub fn drift_oracle<F>(s: &Configuration, params: ExactParams, functional: F) -> Rat
where
    F: Fn(&Configuration) -> Rat,
{
    let here = functional(s);
    step_distribution(s, params)
        .entries()
        .iter()
        .map(|(succ, prob)| *prob * (functional(succ) - here))
        .sum()
}

/// Float variant for functionals that are not rational-valued; transition
/// probabilities are still enumerated exactly and converted at the end.
pub fn drift_oracle_f64<F>(s: &Configuration, params: ExactParams, functional: F) -> f64
where
    F: Fn(&Configuration) -> f64,
{
    let here = functional(s);
    step_distribution(s, params)
        .entries()
        .iter()
        .map(|(succ, prob)| rat_to_f64(*prob) * (functional(succ) - here))
        .sum()
}

/// Closed form for the expected increment of the area functional:
/// `(1-beta) (N(1-2p) + (1-p)) / (2N+1) - beta N / (2N+1)`.
pub fn drift_f1_formula(s: &Configuration, params: ExactParams) -> Result<Rat, DriftError> {
    if s.is_ground() {
        return Err(DriftError::GroundState);
    }
    let n = Rat::from_integer(s.num_blocks() as i128);
    let pairs = Rat::from_integer(2) * n + Rat::one();
    let beta = params.beta;
    let p = params.p;
    let one = Rat::one();
    let two = Rat::from_integer(2);
    Ok((one - beta) * (n * (one - two * p) + (one - p)) / pairs - beta * n / pairs)
}

/// Closed form for the expected increment of the second-order functional:
/// `(1-beta) (1/2 + (1/2 - p)/(2N+1) - ((2p-1)/(2N+1)) sum_i (R_i + T_i))`.
pub fn drift_f2_formula(s: &Configuration, params: ExactParams) -> Result<Rat, DriftError> {
    if s.is_ground() {
        return Err(DriftError::GroundState);
    }
    let n = Rat::from_integer(s.num_blocks() as i128);
    let pairs = Rat::from_integer(2) * n + Rat::one();
    let (r, t) = s.prefix_sums();
    let rt_sum: u64 = r.iter().sum::<u64>() + t.iter().sum::<u64>();
    let rt_sum = Rat::from_integer(rt_sum as i128);
    let beta = params.beta;
    let p = params.p;
    let half = Rat::new(1, 2);
    let one = Rat::one();
    let two = Rat::from_integer(2);
    Ok((one - beta) * (half + (half - p) / pairs - (two * p - one) / pairs * rt_sum))
}

fn phi_weights_f64(s: &Configuration, alpha: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    // a_i(j) = (T_j + R_j + i)^(-alpha) for j in 1..=N;
    // b_i(j) = (T_{j+1} + R_j + i)^(-alpha) for j in 0..=N, with R_0 = 0 and
    // T_{N+1} = 0.
    let n = s.num_blocks();
    let (r, t) = s.prefix_sums();
    let r_at = |j: usize| if j == 0 { 0 } else { r[j - 1] };
    let t_at = |j: usize| if j > n { 0 } else { t[j - 1] };
    let a = |i: u64, j: usize| ((t_at(j) + r_at(j) + i) as f64).powf(-alpha);
    let b = |i: u64, j: usize| ((t_at(j + 1) + r_at(j) + i) as f64).powf(-alpha);
    let a0: Vec<f64> = (1..=n).map(|j| a(0, j)).collect();
    let a1: Vec<f64> = (1..=n).map(|j| a(1, j)).collect();
    let b1: Vec<f64> = (0..=n).map(|j| b(1, j)).collect();
    let b2: Vec<f64> = (0..=n).map(|j| b(2, j)).collect();
    (a0, a1, b1, b2)
}

/// Closed form for the expected increment of `phi_alpha`.
///
/// Summing the per-move differences: a `01` swap at pair j removes weight
/// `a_0(j)`, a `10` swap at pair j adds `b_2(j)`, and the voter moves
/// aggregate to `N (sum_j (a_1(j) - b_1(j-1)) - b_1(N))`.
pub fn drift_phi_formula(
    s: &Configuration,
    beta: f64,
    p: f64,
    alpha: f64,
) -> Result<f64, DriftError> {
    if s.is_ground() {
        return Err(DriftError::GroundState);
    }
    let n = s.num_blocks();
    let pairs = (2 * n + 1) as f64;
    let (a0, a1, b1, b2) = phi_weights_f64(s, alpha);
    let excl = -p * a0.iter().sum::<f64>() + (1.0 - p) * b2.iter().sum::<f64>();
    let voter = n as f64 * ((1..=n).map(|j| a1[j - 1] - b1[j - 1]).sum::<f64>() - b1[n]);
    Ok((1.0 - beta) / pairs * excl + beta / pairs * voter)
}

/// Exact-rational variant of [`drift_phi_formula`] for integer exponents.
pub fn drift_phi_formula_exact(
    s: &Configuration,
    params: ExactParams,
    alpha: u32,
) -> Result<Rat, DriftError> {
    if s.is_ground() {
        return Err(DriftError::GroundState);
    }
    let n = s.num_blocks();
    let (r, t) = s.prefix_sums();
    let r_at = |j: usize| if j == 0 { 0u64 } else { r[j - 1] };
    let t_at = |j: usize| if j > n { 0u64 } else { t[j - 1] };
    let a = |i: u64, j: usize| Rat::new(1, ((t_at(j) + r_at(j) + i) as i128).pow(alpha));
    let b = |i: u64, j: usize| Rat::new(1, ((t_at(j + 1) + r_at(j) + i) as i128).pow(alpha));
    let pairs = Rat::from_integer((2 * n + 1) as i128);
    let n_rat = Rat::from_integer(n as i128);

    let mut excl = Rat::zero();
    for j in 1..=n {
        excl -= params.p * a(0, j);
    }
    for j in 0..=n {
        excl += (Rat::one() - params.p) * b(2, j);
    }
    let mut voter = Rat::zero();
    for j in 1..=n {
        voter += a(1, j) - b(1, j - 1);
    }
    voter -= b(1, n);
    voter *= n_rat;
    Ok((Rat::one() - params.beta) / pairs * excl + params.beta / pairs * voter)
}

/// Jump law of the area functional under pure exclusion: the area moves by
/// `-1, 0, +1` with probabilities `pN/(2N+1)`, `(N+p)/(2N+1)`,
/// `(1-p)(N+1)/(2N+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AreaJumpLaw {
    pub down: Rat,
    pub stay: Rat,
    pub up: Rat,
}

pub fn f1_jump_law(s: &Configuration, p: Rat) -> Result<AreaJumpLaw, DriftError> {
    if s.is_ground() {
        return Err(DriftError::GroundState);
    }
    let n = Rat::from_integer(s.num_blocks() as i128);
    let pairs = Rat::from_integer(2) * n + Rat::one();
    let one = Rat::one();
    Ok(AreaJumpLaw {
        down: p * n / pairs,
        stay: (n + p) / pairs,
        up: (one - p) * (n + one) / pairs,
    })
}

/// Exact law of the hybrid-zone size change under pure exclusion. From the
/// ground state the size jumps `+2` with probability `1-p`; from the
/// smallest excited state it moves to sizes `{0, 2, 3}`; from anywhere else
/// the jump is `+1` with probability `2(1-p)/(2N+1)` and `-1` with
/// probability `p([n_1 = 1] + [m_N = 1])/(2N+1)`.
pub fn size_jump_law(s: &Configuration, p: Rat) -> BTreeMap<i64, Rat> {
    let one = Rat::one();
    let mut law = BTreeMap::new();
    let mut add = |delta: i64, w: Rat| {
        if !w.is_zero() {
            *law.entry(delta).or_insert_with(Rat::zero) += w;
        }
    };
    if s.is_ground() {
        add(2, one - p);
        add(0, p);
    } else if *s == Configuration::d1() {
        let third = Rat::new(1, 3);
        add(-2, p * third);
        add(0, (one + p) * third);
        add(1, Rat::from_integer(2) * (one - p) * third);
    } else {
        let n = s.num_blocks();
        let pairs = Rat::from_integer((2 * n + 1) as i128);
        let up = Rat::from_integer(2) * (one - p) / pairs;
        let mut shrinking = 0i128;
        if s.zero_block(1) == 1 {
            shrinking += 1;
        }
        if s.one_block(n) == 1 {
            shrinking += 1;
        }
        let down = p * Rat::from_integer(shrinking) / pairs;
        add(1, up);
        add(-1, down);
        add(0, one - up - down);
    }
    law
}

/// Highest moment order of the return time guaranteed by a drift bound with
/// exponent `gamma`: `1 / (1 - gamma)`.
pub fn moment_bound_predictor(gamma: f64) -> Result<f64, DriftError> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(DriftError::GammaRange(gamma));
    }
    Ok(1.0 / (1.0 - gamma))
}

/// Change of the second-order functional under a single exclusion move:
/// `+1 + R_j + T_{j+1}` for the j-th `10` pair, `1 - R_j - T_j` for the
/// j-th `01` pair (`R_0 = 0`, `T_{N+1} = 0`).
pub fn f2_jump_under_exclusion(s: &Configuration, pair: PairIndex) -> Result<i64, ConfigError> {
    // Validate the pair the same way the move operators do.
    s.apply_exclusion(pair)?;
    let n = s.num_blocks();
    let (r, t) = s.prefix_sums();
    let r_at = |j: usize| if j == 0 { 0 } else { r[j - 1] } as i64;
    let t_at = |j: usize| if j > n || j == 0 { 0 } else { t[j - 1] } as i64;
    Ok(match pair {
        PairIndex::Ten(j) => 1 + r_at(j) + t_at(j + 1),
        PairIndex::OhOne(j) => 1 - r_at(j) - t_at(j),
    })
}

/// Which functional a drift verification targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftFunctional {
    F1,
    F2,
    Phi(f64),
}

impl DriftFunctional {
    pub fn label(&self) -> String {
        match self {
            DriftFunctional::F1 => "f1".into(),
            DriftFunctional::F2 => "f2".into(),
            DriftFunctional::Phi(alpha) => format!("phi{alpha}"),
        }
    }
}

/// One formula-versus-oracle comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriftReport {
    pub blocks: Vec<u64>,
    pub beta: String,
    pub p: String,
    pub functional: String,
    pub formula: String,
    pub oracle: String,
    /// Absolute difference; exactly zero whenever both sides are rational.
    pub gap: f64,
    pub exact: bool,
}

impl DriftReport {
    pub fn passes(&self, float_tol: f64) -> bool {
        if self.exact {
            self.gap == 0.0
        } else {
            self.gap <= float_tol
        }
    }
}

/// Compares the closed form against the enumeration oracle for one
/// configuration, parameter pair, and functional.
pub fn verify_drift(
    s: &Configuration,
    params: ExactParams,
    functional: DriftFunctional,
) -> Result<DriftReport, DriftError> {
    let (formula, oracle, gap, exact) = match functional {
        DriftFunctional::F1 => {
            let formula = drift_f1_formula(s, params)?;
            let oracle = drift_oracle(s, params, |c| Rat::from_integer(f1(c) as i128));
            let gap = if formula == oracle {
                0.0
            } else {
                rat_to_f64(formula - oracle).abs()
            };
            (formula.to_string(), oracle.to_string(), gap, true)
        }
        DriftFunctional::F2 => {
            let formula = drift_f2_formula(s, params)?;
            let oracle = drift_oracle(s, params, |c| Rat::from_integer(f2(c) as i128));
            let gap = if formula == oracle {
                0.0
            } else {
                rat_to_f64(formula - oracle).abs()
            };
            (formula.to_string(), oracle.to_string(), gap, true)
        }
        DriftFunctional::Phi(alpha) => {
            let float = params.to_float();
            let formula = drift_phi_formula(s, float.beta, float.p, alpha)?;
            let oracle = drift_oracle_f64(s, params, |c| phi(c, alpha));
            (
                format!("{formula}"),
                format!("{oracle}"),
                (formula - oracle).abs(),
                false,
            )
        }
    };
    Ok(DriftReport {
        blocks: s.blocks().to_vec(),
        beta: params.beta.to_string(),
        p: params.p.to_string(),
        functional: functional.label(),
        formula,
        oracle,
        gap,
        exact,
    })
}
