//! The one-step Markov transition law of the exclusion-voter mixture, its
//! sampler, the continuous-time embedding, and small-scale reachability
//! checks.
//!
//! Dynamics: each step is a voter move with probability `beta`, otherwise an
//! exclusion move. An unlike pair is chosen uniformly among the `2N+1`
//! candidates. A voter move flips the pair to `00` or `11` with equal chance.
//! An exclusion move transposes a `01` pair with probability `p` and a `10`
//! pair with probability `1-p`; failed proposals leave the state unchanged.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, Configuration, PairIndex, VoterTarget};
use crate::Rat;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("parameter {name} = {value} outside [0, 1]")]
    ParamRange { name: &'static str, value: f64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Mixture parameter `beta` and exclusion parameter `p`, both in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub beta: f64,
    pub p: f64,
}

impl Params {
    pub fn new(beta: f64, p: f64) -> Result<Self, KernelError> {
        if !(0.0..=1.0).contains(&beta) || beta.is_nan() {
            return Err(KernelError::ParamRange {
                name: "beta",
                value: beta,
            });
        }
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(KernelError::ParamRange {
                name: "p",
                value: p,
            });
        }
        Ok(Params { beta, p })
    }
}

/// Exact-rational parameters for enumeration oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactParams {
    pub beta: Rat,
    pub p: Rat,
}

impl ExactParams {
    pub fn new(beta: Rat, p: Rat) -> Self {
        assert!(
            beta >= Rat::zero() && beta <= Rat::one(),
            "beta outside [0,1]"
        );
        assert!(p >= Rat::zero() && p <= Rat::one(), "p outside [0,1]");
        ExactParams { beta, p }
    }

    pub fn to_float(self) -> Params {
        Params {
            beta: rat_to_f64(self.beta),
            p: rat_to_f64(self.p),
        }
    }
}

pub fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// One sampled step event. `Hold` is a failed exclusion proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepEvent {
    Hold,
    Voter {
        pair: PairIndex,
        target: VoterTarget,
    },
    Exclusion {
        pair: PairIndex,
    },
}

/// Draws the event of a single step. The draw order is fixed (move kind,
/// pair, then target or acceptance) so seeded runs are reproducible.
pub fn sample_event<R: Rng + ?Sized>(s: &Configuration, params: &Params, rng: &mut R) -> StepEvent {
    let voter = rng.gen::<f64>() < params.beta;
    let k = rng.gen_range(0..s.pair_count());
    let pair = s.pair_at(k);
    if voter {
        let target = if rng.gen::<bool>() {
            VoterTarget::Ones
        } else {
            VoterTarget::Zeros
        };
        StepEvent::Voter { pair, target }
    } else {
        let accept_prob = match pair {
            PairIndex::Ten(_) => 1.0 - params.p,
            PairIndex::OhOne(_) => params.p,
        };
        if rng.gen::<f64>() < accept_prob {
            StepEvent::Exclusion { pair }
        } else {
            StepEvent::Hold
        }
    }
}

/// Applies a step event; pairs produced by [`sample_event`] are always valid.
pub fn apply_event(s: &Configuration, event: &StepEvent) -> Configuration {
    match *event {
        StepEvent::Hold => s.clone(),
        StepEvent::Voter { pair, target } => {
            s.apply_voter(pair, target).expect("sampled pair is valid")
        }
        StepEvent::Exclusion { pair } => s.apply_exclusion(pair).expect("sampled pair is valid"),
    }
}

/// One step of the chain under a seeded generator.
pub fn sample_step<R: Rng + ?Sized>(
    s: &Configuration,
    params: &Params,
    rng: &mut R,
) -> Configuration {
    let event = sample_event(s, params, rng);
    apply_event(s, &event)
}

/// Stop condition for [`sample_path`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// Run the full horizon.
    Horizon,
    /// Stop the first time the ground state is hit (at a step `t >= 1`).
    OnGround,
}

/// Runs the chain for up to `horizon` steps, invoking `observe(t, state)` at
/// `t = 0` and after every step. Returns the final state and the number of
/// steps actually taken.
pub fn sample_path<R, F>(
    s0: &Configuration,
    params: &Params,
    horizon: u64,
    stop: StopRule,
    rng: &mut R,
    mut observe: F,
) -> (Configuration, u64)
where
    R: Rng + ?Sized,
    F: FnMut(u64, &Configuration),
{
    let mut state = s0.clone();
    observe(0, &state);
    for t in 1..=horizon {
        state = sample_step(&state, params, rng);
        observe(t, &state);
        if stop == StopRule::OnGround && state.is_ground() {
            return (state, t);
        }
    }
    (state, horizon)
}

/// One continuous-time transition: an exponential holding time with rate
/// `2N+1` (one unit-rate clock per unlike pair) followed by one discrete
/// step, so the embedded jump chain is exactly the discrete chain,
/// null steps included.
pub fn continuous_time_step<R: Rng + ?Sized>(
    s: &Configuration,
    params: &Params,
    rng: &mut R,
) -> (f64, Configuration) {
    let rate = s.pair_count() as f64;
    let holding = Exp::new(rate).expect("positive rate").sample(rng);
    let next = sample_step(s, params, rng);
    (holding, next)
}

/// Exact one-step law: successors paired with positive rational
/// probabilities, duplicates merged after canonicalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionLaw {
    entries: Vec<(Configuration, Rat)>,
}

/// JSON form of one law entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawEntryJson {
    pub successor_blocks: Vec<u64>,
    pub prob_num: i64,
    pub prob_den: i64,
}

impl TransitionLaw {
    pub fn entries(&self) -> &[(Configuration, Rat)] {
        &self.entries
    }

    pub fn probability_of(&self, s: &Configuration) -> Rat {
        self.entries
            .iter()
            .find(|(c, _)| c == s)
            .map(|(_, p)| *p)
            .unwrap_or_else(Rat::zero)
    }

    pub fn total(&self) -> Rat {
        self.entries.iter().map(|(_, p)| *p).sum()
    }

    pub fn float_entries(&self) -> Vec<(Configuration, f64)> {
        self.entries
            .iter()
            .map(|(c, p)| (c.clone(), rat_to_f64(*p)))
            .collect()
    }

    pub fn to_json_entries(&self) -> Vec<LawEntryJson> {
        self.entries
            .iter()
            .map(|(c, p)| LawEntryJson {
                successor_blocks: c.blocks().to_vec(),
                prob_num: i64::try_from(*p.numer()).expect("law numerator fits i64"),
                prob_den: i64::try_from(*p.denom()).expect("law denominator fits i64"),
            })
            .collect()
    }
}

/// The exact one-step distribution from `s` under `(beta, p)`.
///
/// Per pair: each voter target carries `beta / (2(2N+1))`; a `10` swap
/// carries `(1-beta)(1-p) / (2N+1)`, a `01` swap `(1-beta)p / (2N+1)`; the
/// failed-exclusion remainder accrues to a single self-loop entry.
pub fn step_distribution(s: &Configuration, params: ExactParams) -> TransitionLaw {
    let pairs = s.pair_count() as i128;
    let beta = params.beta;
    let p = params.p;
    let one = Rat::one();
    let voter_each = beta / Rat::from_integer(2 * pairs);
    let excl = one - beta;

    let mut acc: BTreeMap<Configuration, Rat> = BTreeMap::new();
    let mut add = |c: Configuration, w: Rat| {
        if !w.is_zero() {
            *acc.entry(c).or_insert_with(Rat::zero) += w;
        }
    };

    let mut self_loop = Rat::zero();
    for k in 0..s.pair_count() {
        let pair = s.pair_at(k);
        if !voter_each.is_zero() {
            add(s.apply_voter(pair, VoterTarget::Zeros).unwrap(), voter_each);
            add(s.apply_voter(pair, VoterTarget::Ones).unwrap(), voter_each);
        }
        let accept = match pair {
            PairIndex::Ten(_) => one - p,
            PairIndex::OhOne(_) => p,
        };
        let swap_w = excl * accept / Rat::from_integer(pairs);
        if !swap_w.is_zero() {
            add(s.apply_exclusion(pair).unwrap(), swap_w);
        }
        self_loop += excl * (one - accept) / Rat::from_integer(pairs);
    }
    add(s.clone(), self_loop);

    let entries: Vec<_> = acc.into_iter().collect();
    let law = TransitionLaw { entries };
    debug_assert!(law.total().is_one());
    debug_assert!(law.entries.iter().all(|(_, p)| *p > Rat::zero()));
    law
}

/// Outcome of a bounded reachability search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reachability {
    Reachable,
    /// The search exhausted every state below the cap without finding the
    /// target and never had to prune, so there is no path at any size.
    Unreachable,
    /// The search was truncated by the size cap before deciding.
    UnknownAtCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommunicationReport {
    pub forward: Reachability,
    pub backward: Reachability,
}

impl CommunicationReport {
    pub fn mutually_reachable(&self) -> bool {
        self.forward == Reachability::Reachable && self.backward == Reachability::Reachable
    }
}

fn positive_prob_successors(s: &Configuration, params: &Params) -> Vec<Configuration> {
    let mut out = Vec::new();
    for k in 0..s.pair_count() {
        let pair = s.pair_at(k);
        if params.beta > 0.0 {
            out.push(s.apply_voter(pair, VoterTarget::Zeros).unwrap());
            out.push(s.apply_voter(pair, VoterTarget::Ones).unwrap());
        }
        let accept = match pair {
            PairIndex::Ten(_) => 1.0 - params.p,
            PairIndex::OhOne(_) => params.p,
        };
        if params.beta < 1.0 && accept > 0.0 {
            out.push(s.apply_exclusion(pair).unwrap());
        }
    }
    out
}

/// All states reachable from `s` through positive-probability moves while
/// staying within `|S| <= size_bound`. The second component records whether
/// any expansion was pruned by the bound.
pub fn reachable_set(
    s: &Configuration,
    params: &Params,
    size_bound: u64,
) -> (std::collections::HashSet<Configuration>, bool) {
    use std::collections::HashSet;
    let mut seen: HashSet<Configuration> = HashSet::new();
    let mut frontier = vec![s.clone()];
    let mut pruned = false;
    seen.insert(s.clone());
    while let Some(state) = frontier.pop() {
        for succ in positive_prob_successors(&state, params) {
            if succ.size() > size_bound {
                pruned = true;
                continue;
            }
            if seen.insert(succ.clone()) {
                frontier.push(succ);
            }
        }
    }
    (seen, pruned)
}

/// Breadth-first reachability between two states, restricted to
/// `|S| <= size_cap + slack`.
pub fn communication_check(
    s1: &Configuration,
    s2: &Configuration,
    params: &Params,
    size_cap: u64,
    slack: u64,
) -> CommunicationReport {
    let bound = size_cap + slack;
    let dir = |from: &Configuration, to: &Configuration| {
        let (seen, pruned) = reachable_set(from, params, bound);
        if seen.contains(to) {
            Reachability::Reachable
        } else if pruned {
            Reachability::UnknownAtCap
        } else {
            Reachability::Unreachable
        }
    };
    CommunicationReport {
        forward: dir(s1, s2),
        backward: dir(s2, s1),
    }
}
