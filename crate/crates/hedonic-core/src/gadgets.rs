//! Small fixed games with known popularity behavior, used as ground-truth
//! fixtures throughout the test suites.

use alloc::string::ToString;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{GameKind, HedonicGame, Rational};

/// A five-agent additively separable game with no popular partition.
///
/// Agents in index order: `t1`, `t2`, `t3`, `b1`, `b2`. Each `t_i` and `b1`
/// value each other at 1, each `t_i` and `b2` at 2, and every other pair at
/// −7, which is hostile enough that no sane coalition ever joins them.
pub fn five_agent_noinstance() -> HedonicGame {
    let b1 = 3u32;
    let b2 = 4u32;
    HedonicGame::from_fn(GameKind::AdditivelySeparable, 5, |i, j| {
        let pair = (i.min(j), i.max(j));
        if pair.1 == b1 && pair.0 < b1 {
            Rational::from_integer(1)
        } else if pair.1 == b2 && pair.0 < b1 {
            Rational::from_integer(2)
        } else {
            Rational::from_integer(-7)
        }
    })
    .expect("fixed-size construction")
}

/// A fractional game on a star: a center `r` (index 0) and `k` leaves
/// (indices 1..=k). Center and leaf value each other at 1; leaves value each
/// other at 0. A popular partition exists exactly when `k < 6`.
pub fn star_game(k: usize) -> Result<HedonicGame> {
    if k == 0 {
        return Err(Error::InvalidArgument {
            detail: "a star needs at least one leaf".to_string(),
        });
    }
    HedonicGame::from_fn(GameKind::Fractional, k + 1, |i, j| {
        if i == 0 || j == 0 {
            Rational::from_integer(1)
        } else {
            Rational::zero()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgentId, Partition};
    use crate::popularity::{find_popular, popularity_margin};

    #[test]
    fn five_agent_values_match_the_fixture() {
        let game = five_agent_noinstance();
        assert_eq!(game.n_agents(), 5);
        assert_eq!(*game.value(AgentId(2), AgentId(4)), Rational::from_integer(2));
        assert_eq!(*game.value(AgentId(4), AgentId(2)), Rational::from_integer(2));
        assert_eq!(*game.value(AgentId(0), AgentId(3)), Rational::from_integer(1));
        assert_eq!(*game.value(AgentId(3), AgentId(0)), Rational::from_integer(1));
        assert_eq!(*game.value(AgentId(0), AgentId(1)), Rational::from_integer(-7));
        assert_eq!(*game.value(AgentId(3), AgentId(4)), Rational::from_integer(-7));
    }

    #[test]
    fn five_agent_game_has_no_popular_partition() {
        let game = five_agent_noinstance();
        assert!(find_popular(&game, 13).unwrap().is_none());
    }

    #[test]
    fn five_agent_reference_comparison_loses_by_one() {
        let game = five_agent_noinstance();
        let a = AgentId;
        let first =
            Partition::from_blocks(5, [vec![a(0), a(3)], vec![a(1), a(4)], vec![a(2)]]).unwrap();
        let second =
            Partition::from_blocks(5, [vec![a(0), a(4)], vec![a(2), a(3)], vec![a(1)]]).unwrap();
        let tally = popularity_margin(&game, &first, &second, None).unwrap();
        assert_eq!(tally.margin, -1);
        assert_eq!(
            (tally.prefers_first, tally.prefers_second, tally.indifferent),
            (1, 2, 2)
        );
    }

    #[test]
    fn star_rejects_zero_leaves() {
        assert!(matches!(
            star_game(0),
            Err(Error::InvalidArgument { .. })
        ));
    }

    #[test]
    fn tiny_star_pairs_center_with_its_leaf() {
        let game = star_game(1).unwrap();
        let (popular, report) = find_popular(&game, 13).unwrap().unwrap();
        assert_eq!(popular, Partition::grand(2));
        assert_eq!(report.challengers_examined, 1);
    }

    #[test]
    fn star_popularity_threshold_is_six_leaves() {
        for k in 1..=5 {
            let game = star_game(k).unwrap();
            assert!(
                find_popular(&game, 13).unwrap().is_some(),
                "expected a popular partition for k={k}"
            );
        }
        for k in [6, 7] {
            let game = star_game(k).unwrap();
            assert!(
                find_popular(&game, 13).unwrap().is_none(),
                "expected no popular partition for k={k}"
            );
        }
    }
}
