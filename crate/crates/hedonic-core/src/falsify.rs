//! Budgeted local search for challengers that beat a given partition.
//!
//! For games too large to enumerate, this module tries to *disprove*
//! popularity: it walks the neighborhood graph of partitions, always toward
//! smaller popularity margin against the target, restarting from random
//! partitions when stuck.  Finding any partition with negative margin settles
//! the question; running out of budget leaves it open.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::enumeration::random_partition;
use crate::error::{Error, Result};
use crate::model::{HedonicGame, Partition};
use crate::popularity::{
    margin_against, popularity_margin, utilities_for_rgs, PopularityReport, Verdict,
};

/// Search budget a caller gets when it has no better idea.
pub const DEFAULT_FALSIFY_BUDGET: u64 = 20_000;

/// Tries to find a challenger more popular than `target` within `budget`
/// margin evaluations, deterministically for a fixed `seed`.
///
/// The search is steepest descent on the margin of `target` against the
/// current partition: all neighbors (single-agent moves, block merges,
/// block prefix splits, block dissolutions) are scored, the strictly best
/// one is taken, and a random restart is drawn when no neighbor improves.
/// Each margin evaluation and each restart costs one unit of budget.
///
/// The verdict is never `Popular`: a negative-margin witness yields
/// [`Verdict::NotPopular`], exhaustion yields
/// [`Verdict::UnknownWithinBudget`].
pub fn falsify_popularity(
    game: &HedonicGame,
    target: &Partition,
    budget: u64,
    seed: u64,
) -> Result<PopularityReport> {
    if target.n_agents() != game.n_agents() {
        return Err(Error::PartitionSizeMismatch {
            partition: target.n_agents(),
            game: game.n_agents(),
        });
    }
    let n = game.n_agents();
    let mut target_utils = Vec::new();
    utilities_for_rgs(game, target.assignment(), &mut target_utils);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining = budget;
    let mut examined = 0u64;
    let mut current = target.clone();
    let mut current_margin = 0i64;

    loop {
        let mut best: Option<(i64, Partition)> = None;
        let mut out_of_budget = false;
        for neighbor in neighbors_of(&current) {
            if neighbor.assignment() == target.assignment() {
                continue;
            }
            if remaining == 0 {
                out_of_budget = true;
                break;
            }
            remaining -= 1;
            examined += 1;
            let margin = margin_against(game, &target_utils, neighbor.assignment());
            if margin < 0 {
                return Ok(witness_report(game, target, neighbor, examined)?);
            }
            let better = match &best {
                None => true,
                Some((best_margin, best_partition)) => {
                    margin < *best_margin || (margin == *best_margin && neighbor < *best_partition)
                }
            };
            if better {
                best = Some((margin, neighbor));
            }
        }
        if out_of_budget {
            return Ok(exhausted_report(examined));
        }
        match best {
            Some((margin, partition)) if margin < current_margin => {
                current = partition;
                current_margin = margin;
            }
            _ => {
                if remaining == 0 {
                    return Ok(exhausted_report(examined));
                }
                remaining -= 1;
                let fresh = random_partition(&mut rng, n);
                if fresh.assignment() == target.assignment() {
                    current = fresh;
                    current_margin = 0;
                    continue;
                }
                examined += 1;
                let margin = margin_against(game, &target_utils, fresh.assignment());
                if margin < 0 {
                    return Ok(witness_report(game, target, fresh, examined)?);
                }
                current_margin = margin;
                current = fresh;
            }
        }
    }
}

fn witness_report(
    game: &HedonicGame,
    target: &Partition,
    witness: Partition,
    examined: u64,
) -> Result<PopularityReport> {
    let check = popularity_margin(game, target, &witness, None)?;
    assert!(check.margin < 0, "falsification witness must win the pairwise vote");
    Ok(PopularityReport {
        verdict: Verdict::NotPopular,
        witness: Some(witness),
        challengers_examined: examined,
        pruned: 0,
    })
}

fn exhausted_report(examined: u64) -> PopularityReport {
    PopularityReport {
        verdict: Verdict::UnknownWithinBudget,
        witness: None,
        challengers_examined: examined,
        pruned: 0,
    }
}

/// All partitions one elementary edit away from `current`, in a fixed order:
/// single-agent moves (including into a fresh singleton), merges of two
/// blocks, splits of one block into a prefix and a suffix of its sorted
/// members, and dissolutions of blocks of three or more into singletons.
fn neighbors_of(current: &Partition) -> Vec<Partition> {
    let n = current.n_agents();
    let assignment = current.assignment();
    let block_count = current.blocks().len();
    let mut out = Vec::new();

    for agent in 0..n {
        let own = assignment[agent] as usize;
        for target_block in 0..block_count {
            if target_block == own {
                continue;
            }
            let mut labels = assignment.to_vec();
            labels[agent] = target_block as u32;
            push_candidate(&labels, assignment, &mut out);
        }
        if current.blocks()[own].len() > 1 {
            let mut labels = assignment.to_vec();
            labels[agent] = block_count as u32;
            push_candidate(&labels, assignment, &mut out);
        }
    }
    for first in 0..block_count {
        for second in first + 1..block_count {
            let mut labels = assignment.to_vec();
            for label in labels.iter_mut() {
                if *label == second as u32 {
                    *label = first as u32;
                }
            }
            push_candidate(&labels, assignment, &mut out);
        }
    }
    for block in 0..block_count {
        let members = &current.blocks()[block];
        for cut in 1..members.len() {
            let mut labels = assignment.to_vec();
            for agent in &members[cut..] {
                labels[agent.index()] = block_count as u32;
            }
            push_candidate(&labels, assignment, &mut out);
        }
    }
    for block in 0..block_count {
        let members = &current.blocks()[block];
        if members.len() >= 3 {
            let mut labels = assignment.to_vec();
            for (offset, agent) in members.iter().enumerate().skip(1) {
                labels[agent.index()] = (block_count + offset - 1) as u32;
            }
            push_candidate(&labels, assignment, &mut out);
        }
    }
    out
}

fn push_candidate(labels: &[u32], current: &[u32], out: &mut Vec<Partition>) {
    let candidate = Partition::from_assignment(labels).expect("edited label vectors stay valid");
    if candidate.assignment() != current {
        out.push(candidate);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgentId, GameKind, Rational};

    fn mutual_pair_game() -> HedonicGame {
        // Agents 0 and 1 value each other; 2 and 3 value each other; cross
        // pairs repel.  The two-pairs partition is the unique optimum.
        HedonicGame::from_fn(GameKind::AdditivelySeparable, 4, |i, j| match (i, j) {
            (0, 1) | (1, 0) | (2, 3) | (3, 2) => Rational::from_integer(3),
            _ => Rational::from_integer(-1),
        })
        .unwrap()
    }

    #[test]
    fn finds_witness_against_singletons() {
        let game = mutual_pair_game();
        let report = falsify_popularity(&game, &Partition::singletons(4), 5_000, 7).unwrap();
        assert_eq!(report.verdict, Verdict::NotPopular);
        let witness = report.witness.unwrap();
        let margin = popularity_margin(&game, &Partition::singletons(4), &witness, None)
            .unwrap()
            .margin;
        assert!(margin < 0);
    }

    #[test]
    fn cannot_falsify_the_optimal_pairing() {
        let game = mutual_pair_game();
        let paired = Partition::from_blocks(
            4,
            [
                [AgentId(0), AgentId(1)],
                [AgentId(2), AgentId(3)],
            ],
        )
        .unwrap();
        let report = falsify_popularity(&game, &paired, 2_000, 7).unwrap();
        assert_eq!(report.verdict, Verdict::UnknownWithinBudget);
        assert!(report.witness.is_none());
    }

    #[test]
    fn fixed_seed_reproduces_the_report() {
        let game = mutual_pair_game();
        let target = Partition::grand(4);
        let first = falsify_popularity(&game, &target, 300, 11).unwrap();
        let second = falsify_popularity(&game, &target, 300, 11).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn zero_budget_reports_unknown() {
        let game = mutual_pair_game();
        let report = falsify_popularity(&game, &Partition::singletons(4), 0, 3).unwrap();
        assert_eq!(report.verdict, Verdict::UnknownWithinBudget);
        assert_eq!(report.challengers_examined, 0);
    }

    #[test]
    fn neighbor_moves_cover_merges_splits_and_dissolves() {
        let partition = Partition::from_blocks(
            5,
            [
                alloc::vec![AgentId(0), AgentId(1), AgentId(2)],
                alloc::vec![AgentId(3), AgentId(4)],
            ],
        )
        .unwrap();
        let neighbors = neighbors_of(&partition);
        assert!(!neighbors.is_empty());
        assert!(neighbors.iter().all(|p| p != &partition));
        assert!(neighbors.contains(&Partition::grand(5)));
        let dissolved = Partition::from_blocks(
            5,
            [
                alloc::vec![AgentId(0)],
                alloc::vec![AgentId(1)],
                alloc::vec![AgentId(2)],
                alloc::vec![AgentId(3), AgentId(4)],
            ],
        )
        .unwrap();
        assert!(neighbors.contains(&dissolved));
    }
}
