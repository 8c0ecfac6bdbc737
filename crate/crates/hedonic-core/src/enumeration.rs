//! Exhaustive set-partition enumeration via restricted-growth strings.
//!
//! A partition of `0..n` is encoded as the string `a` with `a[i]` the block
//! index of agent `i`, where block indices appear in order of first use
//! (`a[0] = 0` and `a[i] <= max(a[..i]) + 1`).  Enumerating these strings in
//! lexicographic order yields every partition exactly once, in the canonical
//! order used throughout this crate.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{AgentId, Partition};

/// Streaming generator for restricted-growth strings in lexicographic order.
///
/// The first `fixed` symbols never change, which carves out the contiguous
/// segment of the enumeration sharing that prefix; `RgsGenerator::new` fixes
/// only the mandatory leading zero.
pub struct RgsGenerator {
    fixed: usize,
    symbols: Vec<u32>,
    prefix_max: Vec<u32>,
    started: bool,
    done: bool,
}

impl RgsGenerator {
    pub fn new(n: usize) -> Self {
        Self::with_prefix(n, &[0]).expect("the one-symbol prefix is always valid")
    }

    /// Enumerates exactly the strings extending `prefix`.
    pub fn with_prefix(n: usize, prefix: &[u32]) -> Result<Self> {
        if n == 0 || prefix.is_empty() || prefix.len() > n {
            return Err(Error::InvalidArgument {
                detail: "prefix length must be between 1 and the agent count".into(),
            });
        }
        let mut prefix_max = vec![0u32; n];
        let mut max = 0u32;
        for (i, &symbol) in prefix.iter().enumerate() {
            let bound = if i == 0 { 0 } else { max + 1 };
            if symbol > bound {
                return Err(Error::InvalidArgument {
                    detail: "prefix is not a restricted-growth string".into(),
                });
            }
            max = max.max(symbol);
            prefix_max[i] = max;
        }
        let mut symbols = vec![0u32; n];
        symbols[..prefix.len()].copy_from_slice(prefix);
        for i in prefix.len()..n {
            prefix_max[i] = max;
        }
        Ok(RgsGenerator {
            fixed: prefix.len(),
            symbols,
            prefix_max,
            started: false,
            done: false,
        })
    }

    /// Yields the next string, or `None` once the segment is exhausted.
    pub fn advance(&mut self) -> Option<&[u32]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.symbols);
        }
        let n = self.symbols.len();
        let mut i = n;
        while i > self.fixed {
            i -= 1;
            if self.symbols[i] <= self.prefix_max[i - 1] {
                self.symbols[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.symbols[i]);
                let max = self.prefix_max[i];
                for j in i + 1..n {
                    self.symbols[j] = 0;
                    self.prefix_max[j] = max;
                }
                return Some(&self.symbols);
            }
        }
        self.done = true;
        None
    }
}

/// Iterator over all partitions of `0..n_agents` in canonical order,
/// skipping any partition that puts a forbidden pair in one block.
pub struct PartitionIter {
    generator: RgsGenerator,
    forbidden: Vec<(u32, u32)>,
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        loop {
            let rgs = self.generator.advance()?;
            if self
                .forbidden
                .iter()
                .all(|&(a, b)| rgs[a as usize] != rgs[b as usize])
            {
                return Some(Partition::from_rgs_unchecked(rgs));
            }
        }
    }
}

/// All partitions of `0..n_agents` in canonical restricted-growth order.
///
/// `forbidden_pairs` prunes every partition that places such a pair in a
/// common block; the surviving partitions keep their relative order.
pub fn enumerate_partitions(
    n_agents: usize,
    forbidden_pairs: &[(AgentId, AgentId)],
) -> Result<PartitionIter> {
    if n_agents == 0 {
        return Err(Error::InvalidArgument {
            detail: "cannot enumerate partitions of zero agents".into(),
        });
    }
    let mut forbidden = Vec::with_capacity(forbidden_pairs.len());
    for &(a, b) in forbidden_pairs {
        if a.index() >= n_agents || b.index() >= n_agents {
            return Err(Error::AgentOutOfRange {
                agent: a.0.max(b.0),
                n_agents,
            });
        }
        if a == b {
            return Err(Error::InvalidArgument {
                detail: "forbidden pairs must name two distinct agents".into(),
            });
        }
        forbidden.push((a.0, b.0));
    }
    Ok(PartitionIter {
        generator: RgsGenerator::new(n_agents),
        forbidden,
    })
}

/// Number of restricted-growth completions when `remaining` symbols are
/// still free and `used_max` is the largest symbol used so far.
pub fn completion_count(remaining: usize, used_max: u32) -> u64 {
    // count(0, v) = 1; count(r, v) = (v + 1) * count(r - 1, v) + count(r - 1, v + 1).
    // row[k] holds count(r, used_max + k) for the current r, starting at r = 0.
    let mut row: Vec<u64> = vec![1u64; remaining + 1];
    for r in 1..=remaining {
        let width = remaining - r;
        for k in 0..=width {
            let v = used_max as u64 + k as u64;
            row[k] = (v + 1) * row[k] + row[k + 1];
        }
    }
    row[0]
}

/// Bell number: how many partitions of `n` agents exist.
pub fn bell(n: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    completion_count(n - 1, 0)
}

/// All restricted-growth prefixes of length `min(depth, n)`, in lexicographic
/// order.  Their completion segments tile the full enumeration of length-`n`
/// strings, which is what the sharded verification driver relies on.
pub fn rgs_prefixes(n: usize, depth: usize) -> Vec<Vec<u32>> {
    let depth = depth.clamp(1, n);
    let mut generator = RgsGenerator::new(depth);
    let mut prefixes = Vec::new();
    while let Some(rgs) = generator.advance() {
        prefixes.push(rgs.to_vec());
    }
    prefixes
}

/// A partition drawn from the generator by choosing each agent's block
/// uniformly among the existing blocks and one fresh block.
pub fn random_partition<R: rand::Rng + ?Sized>(rng: &mut R, n_agents: usize) -> Partition {
    let mut rgs = vec![0u32; n_agents];
    let mut max = 0u32;
    for symbol in rgs.iter_mut().skip(1) {
        *symbol = rng.gen_range(0..=max + 1);
        max = max.max(*symbol);
    }
    Partition::from_rgs_unchecked(&rgs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_small_bell_numbers() {
        let counts: Vec<usize> = (1..=6)
            .map(|n| enumerate_partitions(n, &[]).unwrap().count())
            .collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52, 203]);
        for n in 0..=8 {
            assert_eq!(
                bell(n),
                [1u64, 1, 2, 5, 15, 52, 203, 877, 4140][n],
                "bell({n})"
            );
        }
    }

    #[test]
    fn enumeration_is_strictly_increasing() {
        let all: Vec<Partition> = enumerate_partitions(5, &[]).unwrap().collect();
        for pair in all.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }

    #[test]
    fn first_and_last_partitions_are_grand_and_singletons() {
        let all: Vec<Partition> = enumerate_partitions(4, &[]).unwrap().collect();
        assert_eq!(all.first().unwrap(), &Partition::grand(4));
        assert_eq!(all.last().unwrap(), &Partition::singletons(4));
    }

    #[test]
    fn forbidden_pairs_match_post_hoc_filtering() {
        let forbidden = [
            (AgentId(0), AgentId(1)),
            (AgentId(2), AgentId(4)),
        ];
        let pruned: Vec<Partition> = enumerate_partitions(5, &forbidden).unwrap().collect();
        let filtered: Vec<Partition> = enumerate_partitions(5, &[])
            .unwrap()
            .filter(|p| !p.together(AgentId(0), AgentId(1)) && !p.together(AgentId(2), AgentId(4)))
            .collect();
        assert_eq!(pruned, filtered);
    }

    #[test]
    fn prefix_segments_tile_the_enumeration() {
        let mut tiled: Vec<Partition> = Vec::new();
        for prefix in rgs_prefixes(6, 3) {
            let mut generator = RgsGenerator::with_prefix(6, &prefix).unwrap();
            let mut segment = 0u64;
            while let Some(rgs) = generator.advance() {
                tiled.push(Partition::from_rgs_unchecked(rgs));
                segment += 1;
            }
            assert_eq!(segment, completion_count(6 - prefix.len(), prefix.iter().copied().max().unwrap()));
        }
        let direct: Vec<Partition> = enumerate_partitions(6, &[]).unwrap().collect();
        assert_eq!(tiled, direct);
    }

    #[test]
    fn random_partitions_are_valid_rgs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = random_partition(&mut rng, 7);
            let rgs = p.assignment();
            assert_eq!(rgs[0], 0);
            for i in 1..rgs.len() {
                let max = rgs[..i].iter().copied().max().unwrap();
                assert!(rgs[i] <= max + 1);
            }
        }
    }
}
