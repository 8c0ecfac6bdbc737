//! Margin and verification properties on random and fixed games.

use hedonic_core::enumeration::{bell, enumerate_partitions, random_partition};
use hedonic_core::falsify::falsify_popularity;
use hedonic_core::gadgets::{five_agent_noinstance, star_game};
use hedonic_core::popularity::{
    find_popular, is_pareto_optimal, pareto_table, popularity_margin, verify_popular,
    Verdict, VerificationPlan, VerifyMode,
};
use hedonic_core::{AgentId, GameKind, HedonicGame, Partition, Preference, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_game(rng: &mut ChaCha8Rng, kind: GameKind, n: usize, nonnegative: bool) -> HedonicGame {
    HedonicGame::from_fn(kind, n, |_, _| {
        let numer = if nonnegative {
            rng.gen_range(0..=6)
        } else {
            rng.gen_range(-6..=6)
        };
        Rational::new(numer, rng.gen_range(1..=3))
    })
    .unwrap()
}

#[test]
fn margins_are_antisymmetric_and_vanish_on_self() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for round in 0..60 {
        let n = rng.gen_range(2..=6);
        let kind = if round % 2 == 0 {
            GameKind::AdditivelySeparable
        } else {
            GameKind::Fractional
        };
        let game = random_game(&mut rng, kind, n, false);
        let a = random_partition(&mut rng, n);
        let b = random_partition(&mut rng, n);
        let ab = popularity_margin(&game, &a, &b, None).unwrap();
        let ba = popularity_margin(&game, &b, &a, None).unwrap();
        assert_eq!(ab.margin, -ba.margin);
        assert_eq!(ab.prefers_first, ba.prefers_second);
        assert_eq!(ab.prefers_second, ba.prefers_first);
        assert_eq!(ab.indifferent, ba.indifferent);
        assert_eq!(
            ab.prefers_first + ab.prefers_second + ab.indifferent,
            n as u64
        );
        let aa = popularity_margin(&game, &a, &a, None).unwrap();
        assert_eq!(aa.margin, 0);
        assert_eq!(aa.indifferent, n as u64);
    }
}

#[test]
fn restricted_margins_count_exactly_the_named_agents() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let n = rng.gen_range(3..=6);
        let game = random_game(&mut rng, GameKind::AdditivelySeparable, n, false);
        let a = random_partition(&mut rng, n);
        let b = random_partition(&mut rng, n);
        let subset: Vec<AgentId> = (0..n as u32)
            .filter(|_| rng.gen_bool(0.5))
            .map(AgentId)
            .collect();
        if subset.is_empty() {
            continue;
        }
        let tally = popularity_margin(&game, &a, &b, Some(&subset)).unwrap();
        let mut expected = 0i64;
        for &agent in &subset {
            match game.compare(&a, &b, agent).unwrap() {
                Preference::PrefersA => expected += 1,
                Preference::PrefersB => expected -= 1,
                Preference::Indifferent => {}
            }
        }
        assert_eq!(tally.margin, expected);
        assert_eq!(tally.restricted_to.as_deref(), Some(&subset[..]));
    }
}

#[test]
fn full_and_pareto_restricted_verdicts_agree_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut games: Vec<HedonicGame> = Vec::new();
    for round in 0..120 {
        let n = rng.gen_range(2..=6);
        let kind = if round % 2 == 0 {
            GameKind::AdditivelySeparable
        } else {
            GameKind::Fractional
        };
        games.push(random_game(&mut rng, kind, n, round % 3 == 0));
    }
    games.push(five_agent_noinstance());
    for k in 1..=5 {
        games.push(star_game(k).unwrap());
    }
    for game in &games {
        let n = game.n_agents();
        let target = random_partition(&mut rng, n);
        let full = verify_popular(game, &target, VerifyMode::Full, 13).unwrap();
        let pareto = verify_popular(game, &target, VerifyMode::ParetoRestricted, 13).unwrap();
        assert_eq!(full.verdict, pareto.verdict, "game with {n} agents");
        for report in [&full, &pareto] {
            if report.verdict == Verdict::NotPopular {
                let witness = report.witness.as_ref().expect("witness required");
                let tally = popularity_margin(game, &target, witness, None).unwrap();
                assert!(tally.margin < 0, "witness must strictly beat the target");
            }
        }
    }
}

#[test]
fn popular_targets_examine_every_other_partition() {
    let game = HedonicGame::from_fn(GameKind::AdditivelySeparable, 4, |_, _| {
        Rational::from_integer(0)
    })
    .unwrap();
    let report = verify_popular(&game, &Partition::grand(4), VerifyMode::Full, 13).unwrap();
    assert_eq!(report.verdict, Verdict::Popular);
    assert_eq!(report.challengers_examined, bell(4) - 1);
}

#[test]
fn sharded_runs_merge_to_the_sequential_report() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for round in 0..10 {
        let n = rng.gen_range(4..=7);
        let kind = if round % 2 == 0 {
            GameKind::AdditivelySeparable
        } else {
            GameKind::Fractional
        };
        let game = random_game(&mut rng, kind, n, false);
        let target = random_partition(&mut rng, n);
        let plan = VerificationPlan::new(&game, &target, 13).unwrap();
        let mut outcomes = vec![None; plan.shard_count()];
        // Shards run out of order; the merge must not care.
        for index in (0..plan.shard_count()).rev() {
            outcomes[index] = Some(plan.run_shard(index));
        }
        assert_eq!(plan.merge(&outcomes), plan.run_sequential());
    }
}

#[test]
fn fixture_games_behave_as_documented() {
    let game = five_agent_noinstance();
    assert!(find_popular(&game, 13).unwrap().is_none());
    for partition in enumerate_partitions(5, &[]).unwrap() {
        let report = verify_popular(&game, &partition, VerifyMode::ParetoRestricted, 13).unwrap();
        assert_eq!(report.verdict, Verdict::NotPopular);
    }
    for k in 1..=5 {
        let star = star_game(k).unwrap();
        let (popular, report) = find_popular(&star, 13).unwrap().expect("small stars are fine");
        assert_eq!(report.verdict, Verdict::Popular);
        let confirm = verify_popular(&star, &popular, VerifyMode::Full, 13).unwrap();
        assert_eq!(confirm.verdict, Verdict::Popular);
    }
}

#[test]
fn the_falsifier_defeats_the_fixture_and_respects_popular_targets() {
    let game = five_agent_noinstance();
    let a = AgentId;
    let target =
        Partition::from_blocks(5, [vec![a(0), a(3)], vec![a(1), a(4)], vec![a(2)]]).unwrap();
    let report = falsify_popularity(&game, &target, 10_000, 7).unwrap();
    assert_eq!(report.verdict, Verdict::NotPopular);
    let witness = report.witness.expect("witness required");
    assert!(popularity_margin(&game, &target, &witness, None).unwrap().margin < 0);

    let star = star_game(2).unwrap();
    let (popular, _) = find_popular(&star, 13).unwrap().unwrap();
    let stuck = falsify_popularity(&star, &popular, 3_000, 7).unwrap();
    assert_eq!(stuck.verdict, Verdict::UnknownWithinBudget);
    assert!(stuck.witness.is_none());
}

#[test]
fn the_dominance_table_agrees_with_the_direct_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let game = random_game(&mut rng, GameKind::AdditivelySeparable, 5, false);
    let table = pareto_table(&game, 13).unwrap();
    assert_eq!(table.partition_count(), bell(5) as usize);
    for (position, partition) in enumerate_partitions(5, &[]).unwrap().enumerate() {
        assert_eq!(
            table.is_optimal(position),
            is_pareto_optimal(&game, &partition, 13).unwrap(),
            "partition {partition}"
        );
    }
}
