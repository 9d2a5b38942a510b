//! Shared fixtures for the benchmark targets.

use evlab_core::Configuration;

/// A configuration of roughly the requested hybrid-zone size with an
/// alternating-then-heavy block profile, deterministic for stable
/// benchmarks.
pub fn fixture_configuration(target_size: u64) -> Configuration {
    let mut blocks = Vec::new();
    let mut total = 0;
    let mut k = 1u64;
    while total + 2 * k + 2 <= target_size {
        blocks.push(k);
        blocks.push(k + 1);
        total += 2 * k + 1;
        k = k % 7 + 1;
    }
    if blocks.is_empty() {
        blocks = vec![1, 1];
    }
    Configuration::from_blocks(blocks).expect("positive blocks")
}
