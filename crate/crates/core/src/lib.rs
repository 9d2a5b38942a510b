//! A laboratory for the discrete-time exclusion-voter interacting particle
//! system on shock-profile configurations: the exact transition kernel with
//! a seeded sampler and continuous-time embedding, Lyapunov functionals with
//! their inequality audit, closed-form drift checks against an exact
//! enumeration oracle, the coloured-particle coupling, and Monte Carlo
//! estimation of relaxation-time tails and hybrid-zone growth.

pub mod coloured;
pub mod config;
pub mod drift;
pub mod experiments;
pub mod kernel;
pub mod lyapunov;

/// Exact rational scalar used throughout the enumeration oracles. An `i128`
/// backing comfortably covers every denominator these computations produce.
pub type Rat = num_rational::Ratio<i128>;

/// Shorthand constructor for [`Rat`] values.
pub fn rat(num: i128, den: i128) -> Rat {
    Rat::new(num, den)
}

pub use config::{ConfigError, Configuration, PairIndex, StaircasePath, VoterTarget};
pub use kernel::{ExactParams, Params, StepEvent, StopRule, TransitionLaw};
