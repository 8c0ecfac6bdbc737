//! Exhaustive-enumeration checks against independently computed counts.

use hedonic_core::enumeration::{
    bell, completion_count, enumerate_partitions, random_partition, rgs_prefixes, RgsGenerator,
};
use hedonic_core::{AgentId, Partition};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

/// Bell numbers computed through the additive triangle: each row starts with
/// the previous row's last entry and every further entry adds the neighbor
/// above.  Shares no code with the generator-based count under test.
fn bell_by_triangle(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &above in &row {
            let previous = *next.last().unwrap();
            next.push(previous + above);
        }
        row = next;
    }
    row[0]
}

#[test]
fn bell_numbers_match_the_triangle() {
    for n in 0..=13 {
        assert_eq!(bell(n), bell_by_triangle(n), "n = {n}");
    }
    assert_eq!(bell(5), 52);
    assert_eq!(bell(8), 4140);
    assert_eq!(bell(13), 27_644_437);
}

#[test]
fn enumeration_yields_each_partition_exactly_once() {
    for n in 1..=9 {
        let mut seen = HashSet::new();
        let mut count = 0u64;
        for partition in enumerate_partitions(n, &[]).unwrap() {
            assert_eq!(partition.n_agents(), n);
            assert!(seen.insert(partition), "duplicate at n = {n}");
            count += 1;
        }
        assert_eq!(count, bell(n), "n = {n}");
    }
}

#[test]
fn enumeration_starts_at_the_grand_coalition_and_ends_at_singletons() {
    let all: Vec<Partition> = enumerate_partitions(5, &[]).unwrap().collect();
    assert_eq!(all.first().unwrap(), &Partition::grand(5));
    assert_eq!(all.last().unwrap(), &Partition::singletons(5));
}

#[test]
fn forbidden_pairs_filter_without_reordering() {
    let forbidden = [(AgentId(0), AgentId(1)), (AgentId(2), AgentId(3))];
    let pruned: Vec<Partition> = enumerate_partitions(6, &forbidden).unwrap().collect();
    let filtered: Vec<Partition> = enumerate_partitions(6, &[])
        .unwrap()
        .filter(|p| {
            !p.together(AgentId(0), AgentId(1)) && !p.together(AgentId(2), AgentId(3))
        })
        .collect();
    assert_eq!(pruned, filtered);
    assert!(pruned.len() < bell(6) as usize);
}

#[test]
fn prefix_segments_tile_the_full_enumeration() {
    let n = 7;
    let depth = 3;
    let mut tiled: Vec<Vec<u32>> = Vec::new();
    for prefix in rgs_prefixes(n, depth) {
        let mut generator = RgsGenerator::with_prefix(n, &prefix).unwrap();
        while let Some(rgs) = generator.advance() {
            assert_eq!(&rgs[..depth], &prefix[..], "completion must keep its prefix");
            tiled.push(rgs.to_vec());
        }
    }
    let mut full = RgsGenerator::new(n);
    let mut direct: Vec<Vec<u32>> = Vec::new();
    while let Some(rgs) = full.advance() {
        direct.push(rgs.to_vec());
    }
    assert_eq!(tiled, direct);
}

#[test]
fn completion_counts_predict_segment_sizes() {
    let n = 6;
    assert_eq!(completion_count(n - 1, 0), bell(n));
    for prefix in rgs_prefixes(n, 3) {
        let used_max = *prefix.iter().max().unwrap();
        let predicted = completion_count(n - prefix.len(), used_max);
        let mut generator = RgsGenerator::with_prefix(n, &prefix).unwrap();
        let mut actual = 0;
        while generator.advance().is_some() {
            actual += 1;
        }
        assert_eq!(predicted, actual, "prefix {prefix:?}");
    }
}

#[test]
fn random_partitions_are_canonical_and_cover_the_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut seen = HashSet::new();
    for _ in 0..2000 {
        let partition = random_partition(&mut rng, 4);
        assert_eq!(partition.n_agents(), 4);
        let rebuilt = Partition::from_assignment(partition.assignment()).unwrap();
        assert_eq!(rebuilt, partition, "assignment must already be canonical");
        seen.insert(partition);
    }
    assert_eq!(seen.len(), bell(4) as usize, "all 15 partitions should appear");
}
