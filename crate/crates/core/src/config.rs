//! Canonical shock-profile configurations and the primitive voter/exclusion
//! move operators.
//!
//! A configuration is an infinite string of 1's, a finite hybrid zone, then an
//! infinite string of 0's, taken up to translation. Only the hybrid zone is
//! stored, as the block-length vector `(n_1, m_1, ..., n_N, m_N)` where `n_i`
//! counts the i-th 0-block and `m_i` the i-th 1-block. The empty vector is the
//! ground state (the pure step profile).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("block sequence has odd length {0}")]
    OddLength(usize),
    #[error("block length at index {index} must be positive")]
    ZeroBlock { index: usize },
    #[error("invalid character {found:?} at position {position}; expected '0' or '1'")]
    BadWordChar { position: usize, found: char },
    #[error("pair {pair:?} out of range for a configuration with {blocks} block pairs")]
    InvalidPair { pair: PairIndex, blocks: usize },
}

/// One of the `2N+1` unlike adjacent pairs of a configuration, enumerated
/// left-to-right. `Ten(j)` for `j in 0..=N` is the j-th `10` pair; `OhOne(j)`
/// for `j in 1..=N` is the j-th `01` pair. The ground state has the single
/// pair `Ten(0)` straddling the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairIndex {
    Ten(usize),
    OhOne(usize),
}

/// Target of a voter move: the chosen pair becomes `00` or `11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VoterTarget {
    Zeros,
    Ones,
}

/// A canonical configuration. Immutable after construction; all move
/// operators return a fresh canonical value.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    blocks: Vec<u64>,
    size: u64,
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration{:?}", self.blocks)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "...111{}000...", self.word())
    }
}

/// A staircase: the right-down lattice path encoding of a configuration,
/// from `(0, T_1)` to `(R_N, 0)`, one right step per 0 and one down step
/// per 1 of the hybrid zone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaircasePath {
    points: Vec<(u64, u64)>,
}

impl StaircasePath {
    /// All lattice points visited, including both endpoints. Empty for the
    /// ground state.
    pub fn points(&self) -> &[(u64, u64)] {
        &self.points
    }

    pub fn steps(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    /// Number of unit squares enclosed between the path and the axes.
    pub fn area(&self) -> u64 {
        // Sum of column heights over right steps.
        self.points
            .windows(2)
            .filter(|w| w[1].0 > w[0].0)
            .map(|w| w[0].1)
            .sum()
    }
}

/// Position and corner data for one unlike pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairInfo {
    pub index: PairIndex,
    /// Hybrid-zone position of the pair's left particle, 1-based. Position 0
    /// means the left particle is the edge of the infinite 1-block.
    pub left_position: u64,
    /// Staircase corner: `(R_j, T_{j+1})` for a `10` pair, `(R_j, T_j)` for
    /// a `01` pair.
    pub corner: (u64, u64),
}

impl Configuration {
    /// The ground state: no hybrid zone at all.
    pub fn ground() -> Self {
        Configuration {
            blocks: Vec::new(),
            size: 0,
        }
    }

    /// The smallest excited state, block vector `(1, 1)`.
    pub fn d1() -> Self {
        Configuration {
            blocks: vec![1, 1],
            size: 2,
        }
    }

    /// Builds a configuration from its block-length vector.
    pub fn from_blocks<B: Into<Vec<u64>>>(blocks: B) -> Result<Self, ConfigError> {
        let blocks = blocks.into();
        if blocks.len() % 2 != 0 {
            return Err(ConfigError::OddLength(blocks.len()));
        }
        if let Some(index) = blocks.iter().position(|&b| b == 0) {
            return Err(ConfigError::ZeroBlock { index });
        }
        let size = blocks.iter().sum();
        Ok(Configuration { blocks, size })
    }

    /// Parses a finite 0/1 word, canonicalizing by stripping leading 1's
    /// (absorbed into the infinite 1-block) and trailing 0's.
    pub fn from_string(word: &str) -> Result<Self, ConfigError> {
        let mut bits = Vec::with_capacity(word.len());
        for (position, ch) in word.chars().enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                found => return Err(ConfigError::BadWordChar { position, found }),
            }
        }
        Ok(Self::from_bits(&bits))
    }

    /// Canonicalizes an explicit particle sequence (false = 0, true = 1).
    pub(crate) fn from_bits(bits: &[bool]) -> Self {
        let start = bits.iter().position(|&b| !b);
        let end = bits.iter().rposition(|&b| b);
        let (start, end) = match (start, end) {
            (Some(s), Some(e)) if s < e => (s, e),
            _ => return Self::ground(),
        };
        let mut blocks = Vec::new();
        let mut run_is_one = false; // canonical word starts with a 0
        let mut run_len = 0u64;
        for &bit in &bits[start..=end] {
            if bit == run_is_one {
                run_len += 1;
            } else {
                blocks.push(run_len);
                run_is_one = bit;
                run_len = 1;
            }
        }
        blocks.push(run_len);
        let size = (end - start + 1) as u64;
        debug_assert_eq!(blocks.iter().sum::<u64>(), size);
        Configuration { blocks, size }
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    /// Number of finite 1-blocks (equivalently finite 0-blocks), `N`.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len() / 2
    }

    /// Length of the hybrid zone, `|S|`.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn is_ground(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `n_i`, 1-based.
    pub fn zero_block(&self, i: usize) -> u64 {
        self.blocks[2 * i - 2]
    }

    /// `m_i`, 1-based.
    pub fn one_block(&self, i: usize) -> u64 {
        self.blocks[2 * i - 1]
    }

    /// Partial sums `R_i = n_1 + ... + n_i` and `T_i = m_i + ... + m_N`,
    /// both of length `N`. Empty for the ground state.
    pub fn prefix_sums(&self) -> (Vec<u64>, Vec<u64>) {
        let n = self.num_blocks();
        let mut r = Vec::with_capacity(n);
        let mut t = vec![0u64; n];
        let mut acc = 0;
        for i in 1..=n {
            acc += self.zero_block(i);
            r.push(acc);
        }
        let mut acc = 0;
        for i in (1..=n).rev() {
            acc += self.one_block(i);
            t[i - 1] = acc;
        }
        (r, t)
    }

    /// The hybrid zone as a 0/1 word. Empty for the ground state.
    pub fn word(&self) -> String {
        let mut s = String::with_capacity(self.size as usize);
        for (idx, &len) in self.blocks.iter().enumerate() {
            let ch = if idx % 2 == 0 { '0' } else { '1' };
            for _ in 0..len {
                s.push(ch);
            }
        }
        s
    }

    /// Block lengths formatted as comma-separated integers, e.g. `"1,1"`.
    /// Empty string for the ground state.
    pub fn blocks_csv(&self) -> String {
        self.blocks
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn staircase_path(&self) -> StaircasePath {
        if self.is_ground() {
            return StaircasePath { points: Vec::new() };
        }
        let (r, t) = self.prefix_sums();
        let n = self.num_blocks();
        let mut points = Vec::with_capacity(self.size as usize + 1);
        let mut x = 0u64;
        let mut y = t[0];
        points.push((x, y));
        for i in 1..=n {
            for _ in 0..self.zero_block(i) {
                x += 1;
                points.push((x, y));
            }
            for _ in 0..self.one_block(i) {
                y -= 1;
                points.push((x, y));
            }
        }
        debug_assert_eq!(points.last(), Some(&(r[n - 1], 0)));
        StaircasePath { points }
    }

    /// Total number of unlike pairs, `2N + 1`.
    pub fn pair_count(&self) -> usize {
        2 * self.num_blocks() + 1
    }

    /// The k-th unlike pair left-to-right for `k in 0..2N+1`: pairs alternate
    /// `10, 01, 10, ..., 10`.
    pub fn pair_at(&self, k: usize) -> PairIndex {
        debug_assert!(k < self.pair_count());
        if k.is_multiple_of(2) {
            PairIndex::Ten(k / 2)
        } else {
            PairIndex::OhOne(k.div_ceil(2))
        }
    }

    fn check_pair(&self, pair: PairIndex) -> Result<(), ConfigError> {
        let n = self.num_blocks();
        let ok = match pair {
            PairIndex::Ten(j) => j <= n,
            PairIndex::OhOne(j) => j >= 1 && j <= n,
        };
        if ok {
            Ok(())
        } else {
            Err(ConfigError::InvalidPair { pair, blocks: n })
        }
    }

    /// All `2N+1` unlike pairs with their hybrid-zone positions and
    /// staircase corners.
    pub fn enumerate_pairs(&self) -> Vec<PairInfo> {
        let n = self.num_blocks();
        if n == 0 {
            return vec![PairInfo {
                index: PairIndex::Ten(0),
                left_position: 0,
                corner: (0, 0),
            }];
        }
        let (r, t) = self.prefix_sums();
        let t1 = t[0];
        let mut pairs = Vec::with_capacity(2 * n + 1);
        // Ten(j) left particle: edge of the infinite 1-block for j = 0, the
        // last 1 of block m_j otherwise (position R_j + (T_1 - T_{j+1})).
        // OhOne(j) left particle: last 0 of block n_j.
        pairs.push(PairInfo {
            index: PairIndex::Ten(0),
            left_position: 0,
            corner: (0, t1),
        });
        for j in 1..=n {
            pairs.push(PairInfo {
                index: PairIndex::OhOne(j),
                left_position: r[j - 1] + (t1 - t[j - 1]),
                corner: (r[j - 1], t[j - 1]),
            });
            let t_next = if j < n { t[j] } else { 0 };
            pairs.push(PairInfo {
                index: PairIndex::Ten(j),
                left_position: r[j - 1] + (t1 - t_next),
                corner: (r[j - 1], t_next),
            });
        }
        pairs
    }

    /// Voter move: the particle of `pair` unlike `target` flips, then the
    /// result is re-canonicalized (boundary flips merge with the infinite
    /// blocks).
    pub fn apply_voter(&self, pair: PairIndex, target: VoterTarget) -> Result<Self, ConfigError> {
        self.check_pair(pair)?;
        let n = self.num_blocks();
        let b = &self.blocks;
        let out = match (pair, target) {
            // For a 10 pair the voter move to 00 flips the 1, to 11 flips the 0.
            (PairIndex::Ten(j), VoterTarget::Zeros) => {
                if n == 0 {
                    Self::ground() // chipping the step's 1 only translates it
                } else if j == 0 {
                    // Edge 1 of the infinite block becomes a leading 0.
                    let mut v = b.clone();
                    v[0] += 1;
                    Configuration {
                        blocks: v,
                        size: self.size + 1,
                    }
                } else if j < n {
                    let mj = b[2 * j - 1];
                    if mj > 1 {
                        let mut v = b.clone();
                        v[2 * j - 1] -= 1;
                        v[2 * j] += 1;
                        Configuration {
                            blocks: v,
                            size: self.size,
                        }
                    } else {
                        // m_j vanishes: n_j, the new 0 and n_{j+1} merge.
                        let mut v = b.clone();
                        v[2 * j - 2] += 1 + b[2 * j];
                        v.drain(2 * j - 1..=2 * j);
                        Configuration {
                            blocks: v,
                            size: self.size,
                        }
                    }
                } else {
                    // j == n: the freed 0 and, if m_N dies, all of n_N are
                    // absorbed into the infinite 0-block.
                    let mn = b[2 * n - 1];
                    if mn > 1 {
                        let mut v = b.clone();
                        v[2 * n - 1] -= 1;
                        Configuration {
                            blocks: v,
                            size: self.size - 1,
                        }
                    } else {
                        let dropped = b[2 * n - 2] + 1;
                        let mut v = b.clone();
                        v.truncate(2 * n - 2);
                        Configuration {
                            blocks: v,
                            size: self.size - dropped,
                        }
                    }
                }
            }
            (PairIndex::Ten(j), VoterTarget::Ones) => {
                if n == 0 {
                    Self::ground()
                } else if j == n {
                    // First 0 of the infinite block becomes a trailing 1.
                    let mut v = b.clone();
                    v[2 * n - 1] += 1;
                    Configuration {
                        blocks: v,
                        size: self.size + 1,
                    }
                } else if j >= 1 {
                    let next_n = b[2 * j];
                    if next_n > 1 {
                        let mut v = b.clone();
                        v[2 * j - 1] += 1;
                        v[2 * j] -= 1;
                        Configuration {
                            blocks: v,
                            size: self.size,
                        }
                    } else {
                        let mut v = b.clone();
                        v[2 * j - 1] += 1 + b[2 * j + 1];
                        v.drain(2 * j..=2 * j + 1);
                        Configuration {
                            blocks: v,
                            size: self.size,
                        }
                    }
                } else {
                    // j == 0: first 0 of n_1 joins the infinite 1-block; if
                    // n_1 dies, m_1 is absorbed too.
                    if b[0] > 1 {
                        let mut v = b.clone();
                        v[0] -= 1;
                        Configuration {
                            blocks: v,
                            size: self.size - 1,
                        }
                    } else {
                        let dropped = 1 + b[1];
                        let v = b[2..].to_vec();
                        Configuration {
                            blocks: v,
                            size: self.size - dropped,
                        }
                    }
                }
            }
            // For a 01 pair the voter move to 00 flips the 1 (first of m_j),
            // to 11 flips the 0 (last of n_j).
            (PairIndex::OhOne(j), VoterTarget::Zeros) => {
                let mj = b[2 * j - 1];
                if mj > 1 {
                    let mut v = b.clone();
                    v[2 * j - 2] += 1;
                    v[2 * j - 1] -= 1;
                    Configuration {
                        blocks: v,
                        size: self.size,
                    }
                } else if j < n {
                    let mut v = b.clone();
                    v[2 * j - 2] += 1 + b[2 * j];
                    v.drain(2 * j - 1..=2 * j);
                    Configuration {
                        blocks: v,
                        size: self.size,
                    }
                } else {
                    // Last 1 of the zone dies: n_N and the new 0 are absorbed.
                    let dropped = b[2 * n - 2] + 1;
                    let mut v = b.clone();
                    v.truncate(2 * n - 2);
                    Configuration {
                        blocks: v,
                        size: self.size - dropped,
                    }
                }
            }
            (PairIndex::OhOne(j), VoterTarget::Ones) => {
                let nj = b[2 * j - 2];
                if nj > 1 {
                    let mut v = b.clone();
                    v[2 * j - 2] -= 1;
                    v[2 * j - 1] += 1;
                    Configuration {
                        blocks: v,
                        size: self.size,
                    }
                } else if j > 1 {
                    let mut v = b.clone();
                    v[2 * j - 3] += 1 + b[2 * j - 1];
                    v.drain(2 * j - 2..=2 * j - 1);
                    Configuration {
                        blocks: v,
                        size: self.size,
                    }
                } else {
                    // First 0 of the zone dies: m_1 is absorbed leftwards.
                    let dropped = 1 + b[1];
                    let v = b[2..].to_vec();
                    Configuration {
                        blocks: v,
                        size: self.size - dropped,
                    }
                }
            }
        };
        debug_assert!(out.blocks.iter().all(|&x| x > 0));
        debug_assert_eq!(out.size, out.blocks.iter().sum::<u64>());
        Ok(out)
    }

    /// Exclusion move: the two particles of `pair` transpose, then the result
    /// is re-canonicalized.
    pub fn apply_exclusion(&self, pair: PairIndex) -> Result<Self, ConfigError> {
        self.check_pair(pair)?;
        let n = self.num_blocks();
        let b = &self.blocks;
        let out = match pair {
            PairIndex::Ten(j) => {
                if n == 0 {
                    Self::d1()
                } else if j == 0 {
                    // A 1 enters at the left: 0^{n1} ... -> 0 1 0^{n1-1} ...
                    if b[0] > 1 {
                        let mut v = Vec::with_capacity(b.len() + 2);
                        v.extend_from_slice(&[1, 1, b[0] - 1]);
                        v.extend_from_slice(&b[1..]);
                        Configuration {
                            blocks: v,
                            size: self.size + 1,
                        }
                    } else {
                        let mut v = b.clone();
                        v[0] = 1;
                        v[1] += 1;
                        Configuration {
                            blocks: v,
                            size: self.size + 1,
                        }
                    }
                } else if j == n {
                    // A 0 enters at the right: ... 1^{mN} -> ... 1^{mN-1} 0 1
                    let mut v = b.clone();
                    if b[2 * n - 1] > 1 {
                        v[2 * n - 1] -= 1;
                        v.extend_from_slice(&[1, 1]);
                    } else {
                        v[2 * n - 2] += 1;
                        v[2 * n - 1] = 1;
                    }
                    Configuration {
                        blocks: v,
                        size: self.size + 1,
                    }
                } else {
                    // Interior: 1^{mj} 0^{n_{j+1}} -> 1^{mj-1} 0 1 0^{n_{j+1}-1}
                    let mj = b[2 * j - 1];
                    let nj1 = b[2 * j];
                    let mut v;
                    match (mj > 1, nj1 > 1) {
                        (true, true) => {
                            v = Vec::with_capacity(b.len() + 2);
                            v.extend_from_slice(&b[..2 * j - 1]);
                            v.extend_from_slice(&[mj - 1, 1, 1, nj1 - 1]);
                            v.extend_from_slice(&b[2 * j + 1..]);
                        }
                        (false, true) => {
                            v = b.clone();
                            v[2 * j - 2] += 1;
                            v[2 * j - 1] = 1;
                            v[2 * j] = nj1 - 1;
                        }
                        (true, false) => {
                            v = b.clone();
                            v[2 * j - 1] = mj - 1;
                            v[2 * j] = 1;
                            v[2 * j + 1] += 1;
                        }
                        (false, false) => {
                            v = b.clone();
                            v[2 * j - 2] += 1;
                            v[2 * j + 1] += 1;
                            v.drain(2 * j - 1..=2 * j);
                        }
                    }
                    Configuration {
                        blocks: v,
                        size: self.size,
                    }
                }
            }
            PairIndex::OhOne(j) => {
                // 0^{nj} 1^{mj} -> 0^{nj-1} 1 0 1^{mj-1}, with boundary strips.
                let nj = b[2 * j - 2];
                let mj = b[2 * j - 1];
                match (nj > 1, mj > 1) {
                    (true, true) => {
                        let mut v = Vec::with_capacity(b.len() + 2);
                        v.extend_from_slice(&b[..2 * j - 2]);
                        v.extend_from_slice(&[nj - 1, 1, 1, mj - 1]);
                        v.extend_from_slice(&b[2 * j..]);
                        Configuration {
                            blocks: v,
                            size: self.size,
                        }
                    }
                    (true, false) => {
                        // ... 0^{nj} 1 ... -> ... 0^{nj-1} 1 0 ...
                        if j < n {
                            let mut v = b.clone();
                            v[2 * j - 2] = nj - 1;
                            v[2 * j] += 1;
                            Configuration {
                                blocks: v,
                                size: self.size,
                            }
                        } else {
                            let mut v = b.clone();
                            v[2 * n - 2] = nj - 1;
                            Configuration {
                                blocks: v,
                                size: self.size - 1,
                            }
                        }
                    }
                    (false, true) => {
                        if j > 1 {
                            let mut v = b.clone();
                            v[2 * j - 3] += 1;
                            v[2 * j - 1] = mj - 1;
                            Configuration {
                                blocks: v,
                                size: self.size,
                            }
                        } else {
                            // Leading 1 strips into the infinite block.
                            let mut v = b.clone();
                            v[1] = mj - 1;
                            Configuration {
                                blocks: v,
                                size: self.size - 1,
                            }
                        }
                    }
                    (false, false) => {
                        if j == 1 && n == 1 {
                            Self::ground()
                        } else if j == 1 {
                            let mut v = b[2..].to_vec();
                            v[0] += 1;
                            Configuration {
                                blocks: v,
                                size: self.size - 1,
                            }
                        } else if j == n {
                            let mut v = b.clone();
                            v.truncate(2 * n - 2);
                            v[2 * n - 3] += 1;
                            Configuration {
                                blocks: v,
                                size: self.size - 1,
                            }
                        } else {
                            let mut v = b.clone();
                            v[2 * j - 3] += 1;
                            v[2 * j] += 1;
                            v.drain(2 * j - 2..=2 * j - 1);
                            Configuration {
                                blocks: v,
                                size: self.size,
                            }
                        }
                    }
                }
            }
        };
        debug_assert!(out.blocks.iter().all(|&x| x > 0));
        debug_assert_eq!(out.size, out.blocks.iter().sum::<u64>());
        Ok(out)
    }
}

/// Every configuration with `|S| <= max_size`, ground state first, then by
/// size and lexicographic word order. There are `2^(k-2)` of each size
/// `k >= 2`.
pub fn enumerate_configurations(max_size: u64) -> Vec<Configuration> {
    let mut all = vec![Configuration::ground()];
    for k in 2..=max_size {
        // Interior k-2 letters free; word starts with 0 and ends with 1.
        let interior = k as usize - 2;
        for mask in 0u64..(1u64 << interior) {
            let mut bits = Vec::with_capacity(k as usize);
            bits.push(false);
            for pos in 0..interior {
                bits.push(mask >> pos & 1 == 1);
            }
            bits.push(true);
            let c = Configuration::from_bits(&bits);
            debug_assert_eq!(c.size(), k);
            all.push(c);
        }
    }
    all
}

/// A uniformly random hybrid-zone word of size `2..=max_size`.
pub fn random_configuration<R: rand::Rng>(max_size: u64, rng: &mut R) -> Configuration {
    assert!(max_size >= 2);
    let k = rng.gen_range(2..=max_size) as usize;
    let mut bits = vec![false; k];
    for b in bits.iter_mut().take(k - 1).skip(1) {
        *b = rng.gen();
    }
    bits[k - 1] = true;
    Configuration::from_bits(&bits)
}
