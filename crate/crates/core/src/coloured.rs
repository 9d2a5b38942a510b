//! The coloured-particle coupled process: a configuration plus a colour
//! state carried by particles (not sites), with the colour dynamics that
//! make the coloured-particle count a martingale.
//!
//! Colours travel with particles through exclusion swaps. A voter move on a
//! pair whose two particles disagree in colour gives both survivors the
//! colour of the particle whose type won; same-colour pairs keep their
//! common colour. Particles pushed into an infinite block keep their colour
//! there: the block edges carry a colour fringe (`left_tail`, `right_tail`)
//! so that absorbed coloured particles are still counted and can re-enter
//! the hybrid zone.

use thiserror::Error;

use crate::config::{ConfigError, Configuration, PairIndex, VoterTarget};
use crate::kernel::{apply_event, sample_event, Params, StepEvent};

#[derive(Debug, Error, PartialEq)]
pub enum ColouredError {
    #[error("the ground state has no canonical initial colouring")]
    GroundState,
    #[error("mask length {mask} does not match hybrid zone size {size}")]
    MaskLength { mask: usize, size: u64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Overlap segment between the leftmost coloured 1 and the rightmost
/// coloured 0, or the holding marker when no such overlap exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OverlapSegment {
    Holding,
    Segment(String),
}

impl OverlapSegment {
    /// Segment length, with the holding state mapped to 0.
    pub fn len(&self) -> u64 {
        match self {
            OverlapSegment::Holding => 0,
            OverlapSegment::Segment(w) => w.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_holding(&self) -> bool {
        matches!(self, OverlapSegment::Holding)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ColouredConfiguration {
    base: Configuration,
    /// Colour per hybrid-zone position 1..=|S|.
    mask: Vec<bool>,
    /// Colour fringe of the infinite 1-block, left-to-right; the last entry
    /// abuts the hybrid zone. Entries equal to `default_colour` are trimmed
    /// from the far end.
    left_tail: Vec<bool>,
    /// Colour fringe of the infinite 0-block, left-to-right; the first entry
    /// abuts the hybrid zone.
    right_tail: Vec<bool>,
    /// Colour of every untracked infinite-block particle. `true` only for
    /// the all-coloured comparison state.
    default_colour: bool,
}

/// A structurally possible move of the coloured chain, for exact
/// enumeration. Failed exclusion proposals hold the state and are not
/// listed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColouredMove {
    Voter {
        pair: PairIndex,
        target: VoterTarget,
    },
    Swap {
        pair: PairIndex,
    },
}

impl ColouredConfiguration {
    /// Colours the canonical initial pattern: with `K` the witness index of
    /// the largest inscribed rectangle and `H` the position of the last 0 of
    /// block `K`, every 0 in positions `1..=H` and every 1 in positions
    /// `H+1..=|S|` is coloured. The coloured counts are then exactly the
    /// rectangle sides `(X, Y)`.
    pub fn initial_colouring(s0: &Configuration) -> Result<Self, ColouredError> {
        if s0.is_ground() {
            return Err(ColouredError::GroundState);
        }
        let witness = crate::lyapunov::g_rect(s0);
        let k = witness.k.expect("non-ground");
        let h: u64 = (1..=k).map(|i| s0.zero_block(i)).sum::<u64>()
            + (1..k).map(|i| s0.one_block(i)).sum::<u64>();
        let mut mask = Vec::with_capacity(s0.size() as usize);
        let mut pos = 0u64;
        for (idx, &len) in s0.blocks().iter().enumerate() {
            let is_one = idx % 2 == 1;
            for _ in 0..len {
                pos += 1;
                mask.push(if pos <= h { !is_one } else { is_one });
            }
        }
        let out = ColouredConfiguration {
            base: s0.clone(),
            mask,
            left_tail: Vec::new(),
            right_tail: Vec::new(),
            default_colour: false,
        };
        debug_assert_eq!(out.coloured_zero_count(), witness.x);
        debug_assert_eq!(out.coloured_one_count(), witness.y);
        Ok(out)
    }

    /// An explicit colouring of the hybrid zone with no block fringes.
    pub fn with_mask(base: Configuration, mask: Vec<bool>) -> Result<Self, ColouredError> {
        if mask.len() as u64 != base.size() {
            return Err(ColouredError::MaskLength {
                mask: mask.len(),
                size: base.size(),
            });
        }
        Ok(ColouredConfiguration {
            base,
            mask,
            left_tail: Vec::new(),
            right_tail: Vec::new(),
            default_colour: false,
        })
    }

    /// The ground state with every particle of both infinite blocks
    /// coloured: the type-swapped image of the reversed all-coloured ground
    /// state. Under these dynamics no uncoloured particle ever appears.
    pub fn all_coloured_ground() -> Self {
        ColouredConfiguration {
            base: Configuration::ground(),
            mask: Vec::new(),
            left_tail: Vec::new(),
            right_tail: Vec::new(),
            default_colour: true,
        }
    }

    pub fn base(&self) -> &Configuration {
        &self.base
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    fn word_is_one(&self, position_index: usize) -> bool {
        // Type of hybrid position 1..=|S| (0-based index here).
        let mut acc = 0usize;
        for (idx, &len) in self.base.blocks().iter().enumerate() {
            acc += len as usize;
            if position_index < acc {
                return idx % 2 == 1;
            }
        }
        unreachable!("position inside hybrid zone")
    }

    fn coloured_zero_count(&self) -> u64 {
        assert!(!self.default_colour);
        let in_mask = self
            .mask
            .iter()
            .enumerate()
            .filter(|&(i, &c)| c && !self.word_is_one(i))
            .count() as u64;
        in_mask + self.right_tail.iter().filter(|&&c| c).count() as u64
    }

    fn coloured_one_count(&self) -> u64 {
        assert!(!self.default_colour);
        let in_mask = self
            .mask
            .iter()
            .enumerate()
            .filter(|&(i, &c)| c && self.word_is_one(i))
            .count() as u64;
        in_mask + self.left_tail.iter().filter(|&&c| c).count() as u64
    }

    /// Number of coloured particles. Finite colourings only.
    pub fn chi(&self) -> u64 {
        assert!(
            !self.default_colour,
            "chi is infinite for the all-coloured state"
        );
        (self.mask.iter().filter(|&&c| c).count()
            + self.left_tail.iter().filter(|&&c| c).count()
            + self.right_tail.iter().filter(|&&c| c).count()) as u64
    }

    /// Positions (hybrid coordinates; <= 0 in the left block, > |S| in the
    /// right block) of the extreme coloured particles, as
    /// (min coloured-1, max coloured-1, min coloured-0, max coloured-0).
    fn coloured_extremes(&self) -> (Option<i64>, Option<i64>, Option<i64>, Option<i64>) {
        let size = self.base.size() as i64;
        let ll = self.left_tail.len() as i64;
        let rl = self.right_tail.len() as i64;
        let mut one_positions: Vec<i64> = Vec::new();
        let mut zero_positions: Vec<i64> = Vec::new();
        for (i, &c) in self.left_tail.iter().enumerate() {
            if c {
                one_positions.push(i as i64 - ll + 1); // last entry maps to 0
            }
        }
        for (i, &c) in self.mask.iter().enumerate() {
            if c {
                if self.word_is_one(i) {
                    one_positions.push(i as i64 + 1);
                } else {
                    zero_positions.push(i as i64 + 1);
                }
            }
        }
        for (i, &c) in self.right_tail.iter().enumerate() {
            if c {
                zero_positions.push(size + 1 + i as i64);
            }
        }
        if self.default_colour {
            // The nearest untracked block particles are coloured too.
            one_positions.push(-ll);
            zero_positions.push(size + rl + 1);
        }
        (
            one_positions.iter().min().copied(),
            one_positions.iter().max().copied(),
            zero_positions.iter().min().copied(),
            zero_positions.iter().max().copied(),
        )
    }

    fn type_at(&self, pos: i64) -> bool {
        let size = self.base.size() as i64;
        if pos <= 0 {
            true
        } else if pos > size {
            false
        } else {
            self.word_is_one(pos as usize - 1)
        }
    }

    /// The word between the leftmost coloured 1 and the rightmost coloured
    /// 0 (inclusive), or the holding marker when the former is not strictly
    /// left of the latter. Finite colourings only.
    pub fn zeta(&self) -> OverlapSegment {
        assert!(!self.default_colour, "zeta needs a finite colouring");
        let (min_one, _, _, max_zero) = self.coloured_extremes();
        match (min_one, max_zero) {
            (Some(l), Some(r)) if l < r => {
                let word: String = (l..=r)
                    .map(|p| if self.type_at(p) { '1' } else { '0' })
                    .collect();
                OverlapSegment::Segment(word)
            }
            _ => OverlapSegment::Holding,
        }
    }

    /// Mirror-image overlap: the span from the leftmost coloured 0 to the
    /// rightmost coloured 1. Under the type-swap embedding this is the
    /// overlap length of the reversed-ground-state process.
    pub fn reflected_overlap_len(&self) -> u64 {
        let (_, max_one, min_zero, _) = self.coloured_extremes();
        match (min_zero, max_one) {
            (Some(l), Some(r)) if l < r => (r - l + 1) as u64,
            _ => 0,
        }
    }

    /// Whether the coloured pattern rules out the ground state: some
    /// coloured 0 lies strictly left of some coloured 1.
    pub fn ground_state_obstruction(&self) -> bool {
        let (_, max_one, min_zero, _) = self.coloured_extremes();
        matches!((min_zero, max_one), (Some(z), Some(o)) if z < o)
    }

    /// Colour-order invariant: over the 1's, uncoloured precede coloured;
    /// over the 0's, coloured precede uncoloured.
    pub fn colour_order_ok(&self) -> bool {
        // Virtual untracked particles carry the default colour: a leftmost
        // 1 and a rightmost 0.
        let ones = std::iter::once(self.default_colour)
            .chain(self.left_tail.iter().copied())
            .chain(
                self.mask
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| self.word_is_one(i))
                    .map(|(_, &c)| c),
            );
        let mut seen_coloured = false;
        for c in ones {
            if c {
                seen_coloured = true;
            } else if seen_coloured {
                return false;
            }
        }
        let zeros = self
            .mask
            .iter()
            .enumerate()
            .filter(|&(i, _)| !self.word_is_one(i))
            .map(|(_, &c)| c)
            .chain(self.right_tail.iter().copied())
            .chain(std::iter::once(self.default_colour));
        let mut seen_uncoloured = false;
        for c in zeros {
            if !c {
                seen_uncoloured = true;
            } else if seen_uncoloured {
                return false;
            }
        }
        true
    }

    /// Extended particle line (type, colour): tracked left fringe, hybrid
    /// zone, tracked right fringe, padded so both boundary pairs have
    /// explicit particles.
    fn line(&self) -> Vec<(bool, bool)> {
        let mut line =
            Vec::with_capacity(self.left_tail.len() + self.mask.len() + self.right_tail.len() + 2);
        if self.left_tail.is_empty() {
            line.push((true, self.default_colour));
        } else {
            line.extend(self.left_tail.iter().map(|&c| (true, c)));
        }
        for (i, &c) in self.mask.iter().enumerate() {
            line.push((self.word_is_one(i), c));
        }
        if self.right_tail.is_empty() {
            line.push((false, self.default_colour));
        } else {
            line.extend(self.right_tail.iter().map(|&c| (false, c)));
        }
        line
    }

    fn from_line(line: Vec<(bool, bool)>, default_colour: bool) -> Self {
        // A voter move at a boundary pair can leave the window all-1 or
        // all-0; either way the hybrid zone is empty.
        let first_zero = line.iter().position(|&(t, _)| !t).unwrap_or(line.len());
        let last_one = line.iter().rposition(|&(t, _)| t).map_or(0, |i| i + 1);
        let (left_end, right_start) = if last_one <= first_zero {
            // Pure step shape: everything is fringe.
            (first_zero, first_zero)
        } else {
            (first_zero, last_one)
        };
        let mut left_tail: Vec<bool> = line[..left_end].iter().map(|&(_, c)| c).collect();
        let mut right_tail: Vec<bool> = line[right_start..].iter().map(|&(_, c)| c).collect();
        let hybrid = &line[left_end..right_start];
        let types: Vec<bool> = hybrid.iter().map(|&(t, _)| t).collect();
        let mask: Vec<bool> = hybrid.iter().map(|&(_, c)| c).collect();
        let base = Configuration::from_bits(&types);
        debug_assert_eq!(base.size() as usize, mask.len());
        // Trim fringe entries indistinguishable from the untracked sea.
        while left_tail.first() == Some(&default_colour) {
            left_tail.remove(0);
        }
        while right_tail.last() == Some(&default_colour) {
            right_tail.pop();
        }
        ColouredConfiguration {
            base,
            mask,
            left_tail,
            right_tail,
            default_colour,
        }
    }

    /// Index into the line of the left particle of `pair`.
    fn pair_offset(line: &[(bool, bool)], pair: PairIndex) -> usize {
        let mut tens = 0usize;
        let mut ohones = 0usize;
        for i in 0..line.len() - 1 {
            match (line[i].0, line[i + 1].0) {
                (true, false) => {
                    if pair == PairIndex::Ten(tens) {
                        return i;
                    }
                    tens += 1;
                }
                (false, true) => {
                    ohones += 1;
                    if pair == PairIndex::OhOne(ohones) {
                        return i;
                    }
                }
                _ => {}
            }
        }
        panic!("pair {pair:?} not present in line");
    }

    /// Applies one step event, transporting colours.
    pub fn apply_coloured_event(&self, event: &StepEvent) -> Self {
        match *event {
            StepEvent::Hold => self.clone(),
            StepEvent::Exclusion { pair } => {
                let mut line = self.line();
                let i = Self::pair_offset(&line, pair);
                line.swap(i, i + 1);
                let out = Self::from_line(line, self.default_colour);
                debug_assert_eq!(out.base, apply_event(&self.base, event));
                out
            }
            StepEvent::Voter { pair, target } => {
                let mut line = self.line();
                let i = Self::pair_offset(&line, pair);
                let keep = target == VoterTarget::Ones;
                // Both survivors take the colour of the particle whose type
                // is kept.
                let winner_colour = if line[i].0 == keep {
                    line[i].1
                } else {
                    line[i + 1].1
                };
                line[i] = (keep, winner_colour);
                line[i + 1] = (keep, winner_colour);
                let out = Self::from_line(line, self.default_colour);
                debug_assert_eq!(out.base, apply_event(&self.base, event));
                out
            }
        }
    }

    /// One sampled step; the base marginal is exactly the plain chain (the
    /// same event sampler drives both).
    pub fn step<R: rand::Rng + ?Sized>(&self, params: &Params, rng: &mut R) -> Self {
        let event = sample_event(&self.base, params, rng);
        let out = self.apply_coloured_event(&event);
        debug_assert!(out.colour_order_ok());
        out
    }

    /// Every structurally possible non-hold move with its successor, for
    /// exact enumeration of the coloured chain.
    pub fn enumerate_coloured_moves(&self) -> Vec<(ColouredMove, ColouredConfiguration)> {
        let mut out = Vec::with_capacity(3 * self.base.pair_count());
        for k in 0..self.base.pair_count() {
            let pair = self.base.pair_at(k);
            for target in [VoterTarget::Zeros, VoterTarget::Ones] {
                out.push((
                    ColouredMove::Voter { pair, target },
                    self.apply_coloured_event(&StepEvent::Voter { pair, target }),
                ));
            }
            out.push((
                ColouredMove::Swap { pair },
                self.apply_coloured_event(&StepEvent::Exclusion { pair }),
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::enumerate_configurations;
    use crate::kernel::sample_step;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn blocks(v: &[u64]) -> Configuration {
        Configuration::from_blocks(v.to_vec()).unwrap()
    }

    #[test]
    fn initial_colouring_examples() {
        let c = ColouredConfiguration::initial_colouring(&Configuration::d1()).unwrap();
        assert_eq!(c.mask(), &[true, true]);
        assert_eq!(c.chi(), 2);

        // (2,3): K = 1, H = 2: both 0's and all three 1's coloured.
        let c = ColouredConfiguration::initial_colouring(&blocks(&[2, 3])).unwrap();
        assert_eq!(c.mask(), &[true; 5]);
        assert_eq!(c.chi(), 5);

        // Largest rectangle 24 x 4 at the last corner.
        let big = blocks(&[8, 3, 4, 1, 2, 1, 2, 1, 8, 4]);
        let c = ColouredConfiguration::initial_colouring(&big).unwrap();
        assert_eq!(c.chi(), 28);
        assert_eq!(c.coloured_zero_count(), 24);
        assert_eq!(c.coloured_one_count(), 4);

        assert_eq!(
            ColouredConfiguration::initial_colouring(&Configuration::ground()),
            Err(ColouredError::GroundState)
        );
    }

    #[test]
    fn exclusion_transports_colours() {
        let c = ColouredConfiguration::initial_colouring(&Configuration::d1()).unwrap();
        // Swap at the left boundary pair drags an uncoloured block 1 in;
        // the swapped-in 1 lands at position 2 of the word 011.
        let next = c.apply_coloured_event(&StepEvent::Exclusion {
            pair: PairIndex::Ten(0),
        });
        assert_eq!(next.base().blocks(), &[1, 2]);
        assert_eq!(next.mask(), &[true, false, true]);
        assert_eq!(next.chi(), 2);
    }

    #[test]
    fn voter_colour_rules() {
        // Pair 10 with the 1 coloured and the 0 not: to 11 both coloured,
        // to 00 both uncoloured.
        let base = blocks(&[1, 1, 1, 1]); // word 0101
        let mask = vec![false, true, false, false];
        let c = ColouredConfiguration::with_mask(base.clone(), mask).unwrap();
        // Ten(1) is the (position 2, position 3) pair.
        let up = c.apply_coloured_event(&StepEvent::Voter {
            pair: PairIndex::Ten(1),
            target: VoterTarget::Ones,
        });
        assert_eq!(up.base().blocks(), &[1, 3]);
        assert_eq!(up.mask(), &[false, true, true, false]);
        assert_eq!(up.chi(), 2);

        let down = c.apply_coloured_event(&StepEvent::Voter {
            pair: PairIndex::Ten(1),
            target: VoterTarget::Zeros,
        });
        assert_eq!(down.base().blocks(), &[3, 1]);
        assert_eq!(down.chi(), 0);

        // Pair 01 with the 0 coloured and the 1 not: to 00 both coloured,
        // to 11 both uncoloured.
        let mask = vec![true, false, false, false];
        let c = ColouredConfiguration::with_mask(base, mask).unwrap();
        let zeros = c.apply_coloured_event(&StepEvent::Voter {
            pair: PairIndex::OhOne(1),
            target: VoterTarget::Zeros,
        });
        assert_eq!(zeros.base().blocks(), &[3, 1]);
        assert_eq!(zeros.chi(), 2);
        let ones = c.apply_coloured_event(&StepEvent::Voter {
            pair: PairIndex::OhOne(1),
            target: VoterTarget::Ones,
        });
        assert_eq!(ones.chi(), 0);
    }

    #[test]
    fn absorbed_colours_are_kept_and_re_emerge() {
        // From the colouring of (2,1), the voter move at the right boundary
        // pair empties the zone, absorbing two coloured 0's into the
        // 0-block fringe.
        let c = ColouredConfiguration::initial_colouring(&blocks(&[2, 1])).unwrap();
        assert_eq!(c.chi(), 3);
        let grounded = c.apply_coloured_event(&StepEvent::Voter {
            pair: PairIndex::Ten(1),
            target: VoterTarget::Zeros,
        });
        assert!(grounded.base().is_ground());
        assert_eq!(grounded.chi(), 2);
        assert!(!grounded.ground_state_obstruction());
        assert!(grounded.zeta().is_holding());

        // The widening swap pulls the nearer coloured 0 back into the zone.
        let back = grounded.apply_coloured_event(&StepEvent::Exclusion {
            pair: PairIndex::Ten(0),
        });
        assert_eq!(back.base(), &Configuration::d1());
        assert_eq!(back.mask(), &[true, false]);
        assert_eq!(back.chi(), 2);
    }

    #[test]
    fn chi_changes_only_on_mixed_voter_pairs() {
        for s0 in enumerate_configurations(6) {
            if s0.is_ground() {
                continue;
            }
            let c = ColouredConfiguration::initial_colouring(&s0).unwrap();
            let chi = c.chi();
            for (mv, next) in c.enumerate_coloured_moves() {
                let delta = next.chi() as i64 - chi as i64;
                match mv {
                    ColouredMove::Swap { .. } => assert_eq!(delta, 0, "{:?} {:?}", s0, mv),
                    ColouredMove::Voter { .. } => {
                        assert!((-1..=1).contains(&delta), "{:?} {:?}", s0, mv)
                    }
                }
            }
        }
    }

    #[test]
    fn voter_chi_deltas_cancel_pairwise() {
        // For each pair, the two voter targets move chi by opposite
        // amounts, which is the martingale property at every (beta, p).
        for s0 in enumerate_configurations(6) {
            if s0.is_ground() {
                continue;
            }
            let c = ColouredConfiguration::initial_colouring(&s0).unwrap();
            let chi = c.chi() as i64;
            for k in 0..s0.pair_count() {
                let pair = s0.pair_at(k);
                let up = c.apply_coloured_event(&StepEvent::Voter {
                    pair,
                    target: VoterTarget::Ones,
                });
                let down = c.apply_coloured_event(&StepEvent::Voter {
                    pair,
                    target: VoterTarget::Zeros,
                });
                assert_eq!(
                    (up.chi() as i64 - chi) + (down.chi() as i64 - chi),
                    0,
                    "{:?} {:?}",
                    s0,
                    pair
                );
            }
        }
    }

    #[test]
    fn base_evolution_matches_plain_kernel() {
        for s0 in enumerate_configurations(6) {
            if s0.is_ground() {
                continue;
            }
            let c = ColouredConfiguration::initial_colouring(&s0).unwrap();
            for (mv, next) in c.enumerate_coloured_moves() {
                let event = match mv {
                    ColouredMove::Voter { pair, target } => StepEvent::Voter { pair, target },
                    ColouredMove::Swap { pair } => StepEvent::Exclusion { pair },
                };
                assert_eq!(next.base(), &apply_event(&s0, &event));
            }
        }
    }

    #[test]
    fn zeta_examples() {
        for s0 in enumerate_configurations(7) {
            if s0.is_ground() {
                continue;
            }
            let c = ColouredConfiguration::initial_colouring(&s0).unwrap();
            assert!(c.zeta().is_holding(), "{:?}", s0);
        }

        // No coloured 1's at all.
        let c = ColouredConfiguration::with_mask(Configuration::d1(), vec![false, false]).unwrap();
        assert!(c.zeta().is_holding());

        // Coloured 1, uncoloured 0, coloured 0 in a row.
        let base = blocks(&[1, 1, 2, 1]); // word 01001
        let mask = vec![false, true, false, true, false];
        let c = ColouredConfiguration::with_mask(base, mask).unwrap();
        assert_eq!(c.zeta(), OverlapSegment::Segment("100".into()));
        assert_eq!(c.zeta().len(), 3);
    }

    #[test]
    fn obstruction_examples() {
        let c = ColouredConfiguration::initial_colouring(&Configuration::d1()).unwrap();
        assert!(c.ground_state_obstruction());
        let plain =
            ColouredConfiguration::with_mask(Configuration::d1(), vec![false, false]).unwrap();
        assert!(!plain.ground_state_obstruction());
    }

    #[test]
    fn trajectory_invariants_hold() {
        // Colour order and the ground-state compatibility fact along
        // simulated paths.
        let params = Params::new(0.45, 0.35).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for s0 in [
            blocks(&[2, 1]),
            blocks(&[1, 2, 3, 1]),
            blocks(&[4, 2, 1, 1]),
        ] {
            let mut state = ColouredConfiguration::initial_colouring(&s0).unwrap();
            for _ in 0..2000 {
                state = state.step(&params, &mut rng);
                assert!(state.colour_order_ok());
                if state.base().is_ground() {
                    assert!(!state.ground_state_obstruction());
                }
            }
        }
    }

    #[test]
    fn reflected_overlap_matches_mirrored_chain() {
        // The reversed all-coloured ground state evolving at exclusion
        // parameter p is embedded, by the type-swap symmetry, as the
        // all-coloured ground chain at 1 - p. Its overlap observable must
        // then reproduce the plain chain's zone size at 1 - p pathwise under
        // matched seeds, which exercises the whole colour-transport
        // machinery (no colour may leak, drop, or stall).
        for nominal_p in [0.35, 0.5, 0.8] {
            let params = Params::new(0.3, 1.0 - nominal_p).unwrap();
            let mut rng_coloured = ChaCha12Rng::seed_from_u64(7777);
            let mut rng_plain = ChaCha12Rng::seed_from_u64(7777);
            let mut coloured = ColouredConfiguration::all_coloured_ground();
            let mut plain = Configuration::ground();
            for _ in 0..3000 {
                coloured = coloured.step(&params, &mut rng_coloured);
                plain = sample_step(&plain, &params, &mut rng_plain);
                assert_eq!(coloured.base(), &plain);
                assert_eq!(coloured.reflected_overlap_len(), plain.size());
            }
        }
    }

    #[test]
    fn with_mask_validates_length() {
        assert_eq!(
            ColouredConfiguration::with_mask(Configuration::d1(), vec![true]),
            Err(ColouredError::MaskLength { mask: 1, size: 2 })
        );
    }
}
