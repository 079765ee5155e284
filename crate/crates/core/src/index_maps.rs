//! Labels of the two-mode number basis and their flat (diagonal) enumeration.
//!
//! A two-mode label `(n1, n2)` sits in sector `L = n1 + n2` at position `m = n1`;
//! sectors are laid out contiguously, so sector `L` occupies flat indices
//! `L(L+1)/2 ..= L(L+1)/2 + L`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub n1: u64,
    pub n2: u64,
}

impl ModeIndex {
    pub const fn new(n1: u64, n2: u64) -> Self {
        Self { n1, n2 }
    }

    pub const fn total(&self) -> u64 {
        self.n1 + self.n2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SectorIndex {
    pub level: u64,
    pub m: u64,
}

impl SectorIndex {
    /// Returns `None` unless `m <= level`.
    pub fn new(level: u64, m: u64) -> Option<Self> {
        (m <= level).then_some(Self { level, m })
    }

    pub fn to_mode(self) -> ModeIndex {
        ModeIndex::new(self.m, self.level - self.m)
    }
}

/// Number of flat indices in sectors `0..level`.
pub const fn sector_start(level: u64) -> u64 {
    level * (level + 1) / 2
}

/// Flat dimension of the truncation keeping sectors `0..=l_max`.
pub const fn truncation_dim(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 2) / 2
}

pub const fn beta(idx: ModeIndex) -> u64 {
    sector_start(idx.n1 + idx.n2) + idx.n1
}

pub fn beta_inv(n: u64) -> ModeIndex {
    let level = level_of(n);
    let n1 = n - sector_start(level);
    ModeIndex::new(n1, level - n1)
}

/// Sector containing flat index `n`.
pub fn level_of(n: u64) -> u64 {
    let guess = (((8.0 * n as f64 + 1.0).sqrt() - 1.0) / 2.0).floor() as u64;
    let mut level = guess;
    while sector_start(level) > n {
        level -= 1;
    }
    while sector_start(level + 1) <= n {
        level += 1;
    }
    level
}

pub const fn sector(idx: ModeIndex) -> SectorIndex {
    SectorIndex { level: idx.n1 + idx.n2, m: idx.n1 }
}

/// Target of the Cuntz isometry `S_n` applied to the flat vector `F_m`.
pub const fn cuntz_target(m: u64, n: u64) -> u64 {
    beta(ModeIndex::new(m, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_values() {
        assert_eq!(beta(ModeIndex::new(0, 0)), 0);
        assert_eq!(beta(ModeIndex::new(0, 1)), 1);
        assert_eq!(beta(ModeIndex::new(1, 0)), 2);
        assert_eq!(beta(ModeIndex::new(3, 0)), 9);
        assert_eq!(beta_inv(0), ModeIndex::new(0, 0));
        assert_eq!(beta_inv(4), ModeIndex::new(1, 1));
        assert_eq!(beta_inv(9), ModeIndex::new(3, 0));
    }

    #[test]
    fn sectors() {
        assert_eq!(sector(ModeIndex::new(2, 1)), SectorIndex { level: 3, m: 2 });
        assert_eq!(sector(ModeIndex::new(0, 5)), SectorIndex { level: 5, m: 0 });
        assert_eq!(SectorIndex::new(1, 1).unwrap().to_mode(), ModeIndex::new(1, 0));
        assert!(SectorIndex::new(2, 3).is_none());
    }

    #[test]
    fn exhaustive_round_trip_and_injectivity() {
        let mut seen = std::collections::HashSet::new();
        for level in 0..=200u64 {
            for n1 in 0..=level {
                let idx = ModeIndex::new(n1, level - n1);
                let n = beta(idx);
                assert_eq!(beta_inv(n), idx);
                assert!(seen.insert(n));
                assert!(n >= sector_start(level) && n <= sector_start(level) + level);
                if n1 > 0 {
                    assert_eq!(beta(ModeIndex::new(n1 - 1, level - n1 + 1)) + 1, n);
                }
            }
        }
        assert_eq!(seen.len(), truncation_dim(200));
    }

    #[test]
    fn large_levels_are_exact() {
        for level in [999_999u64, 1_000_000, 3_037_000_000] {
            for n1 in [0, 1, level / 2, level] {
                let idx = ModeIndex::new(n1, level - n1);
                assert_eq!(beta_inv(beta(idx)), idx);
            }
        }
    }

    proptest! {
        #[test]
        fn flat_round_trip(n in 0u64..4_000_000_000_000) {
            prop_assert_eq!(beta(beta_inv(n)), n);
        }
    }
}
