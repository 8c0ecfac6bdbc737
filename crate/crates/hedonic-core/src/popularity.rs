//! Popularity margins, exhaustive popularity verification and search.
//!
//! A partition `p` is popular if no other partition `q` wins the pairwise
//! majority vote against it: for every challenger `q`, at least as many agents
//! strictly prefer `p` as strictly prefer `q`.  The margin of `p` against `q`
//! counts that difference, so popularity is "margin >= 0 for every
//! challenger".

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Zero;

use crate::enumeration::{self, RgsGenerator};
use crate::error::{Error, Result};
use crate::model::{AgentId, GameKind, HedonicGame, Partition, Preference, Rational};

/// Largest agent count the exhaustive routines accept by default; Bell(13)
/// is about 2.8e7, which keeps a full scan in the minutes range.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 13;

/// Agent counts up to which Pareto-restricted verification and popular-
/// partition search materialize the whole partition table up front.
const MATERIALIZE_LIMIT: usize = 8;

/// Prefix length used to cut the enumeration into independently runnable,
/// contiguous shards.
const SHARD_DEPTH: usize = 5;

/// Vote tally for one ordered pair of partitions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MarginBreakdown {
    /// Agents strictly preferring the first partition.
    pub prefers_first: u64,
    /// Agents strictly preferring the second partition.
    pub prefers_second: u64,
    /// Agents with equal utility under both.
    pub indifferent: u64,
    /// `prefers_first - prefers_second`.
    pub margin: i64,
    /// The agent subset the tally was restricted to, if any (sorted, deduplicated).
    pub restricted_to: Option<Vec<AgentId>>,
}

/// Result of a popularity verification or falsification run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PopularityReport {
    pub verdict: Verdict,
    /// A challenger with strictly negative margin when `verdict` is
    /// [`Verdict::NotPopular`].
    pub witness: Option<Partition>,
    /// Challengers whose margin was actually evaluated.
    pub challengers_examined: u64,
    /// Challengers skipped by a sound filter (only the Pareto-restricted
    /// mode skips any).
    pub pruned: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// Exhaustively certified: no challenger has positive margin.
    Popular,
    /// A concrete more-popular challenger is known.
    NotPopular,
    /// The budgeted search gave up without a witness.
    UnknownWithinBudget,
}

/// Which challengers an exhaustive verification compares against.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VerifyMode {
    /// Every partition.
    Full,
    /// Only Pareto-optimal partitions.  Sound and complete for the verdict:
    /// a partition beaten by anything is beaten by a Pareto-optimal
    /// challenger, so both modes agree.
    ParetoRestricted,
}

/// Popularity margin of `first` against `second`, optionally counting only
/// the agents in `restrict_to`.
pub fn popularity_margin(
    game: &HedonicGame,
    first: &Partition,
    second: &Partition,
    restrict_to: Option<&[AgentId]>,
) -> Result<MarginBreakdown> {
    let scope: Vec<AgentId> = match restrict_to {
        None => (0..game.n_agents() as u32).map(AgentId).collect(),
        Some(subset) => {
            let mut subset: Vec<AgentId> = subset.to_vec();
            subset.sort_unstable();
            subset.dedup();
            for &agent in &subset {
                if agent.index() >= game.n_agents() {
                    return Err(Error::AgentOutOfRange {
                        agent: agent.0,
                        n_agents: game.n_agents(),
                    });
                }
            }
            subset
        }
    };
    let mut breakdown = MarginBreakdown {
        prefers_first: 0,
        prefers_second: 0,
        indifferent: 0,
        margin: 0,
        restricted_to: restrict_to.map(|_| scope.clone()),
    };
    for &agent in &scope {
        match game.compare(first, second, agent)? {
            Preference::PrefersA => breakdown.prefers_first += 1,
            Preference::PrefersB => breakdown.prefers_second += 1,
            Preference::Indifferent => breakdown.indifferent += 1,
        }
    }
    breakdown.margin = breakdown.prefers_first as i64 - breakdown.prefers_second as i64;
    Ok(breakdown)
}

/// Per-agent utilities of the partition encoded by a restricted-growth
/// string, appended to `out` (which is cleared first).
pub(crate) fn utilities_for_rgs(game: &HedonicGame, rgs: &[u32], out: &mut Vec<Rational>) {
    out.clear();
    let n = rgs.len();
    for i in 0..n {
        let mut sum = Rational::zero();
        let mut size = 0i128;
        for j in 0..n {
            if rgs[j] == rgs[i] {
                size += 1;
                if j != i {
                    sum += game.value_at(i, j);
                }
            }
        }
        out.push(match game.kind() {
            GameKind::AdditivelySeparable => sum,
            GameKind::Fractional => sum / Rational::from_integer(size),
        });
    }
}

/// Margin of the partition behind `base_utils` against the challenger
/// encoded by `rgs`, without allocating.
pub(crate) fn margin_against(game: &HedonicGame, base_utils: &[Rational], rgs: &[u32]) -> i64 {
    let n = rgs.len();
    let mut margin = 0i64;
    for i in 0..n {
        let mut sum = Rational::zero();
        let mut size = 0i128;
        for j in 0..n {
            if rgs[j] == rgs[i] {
                size += 1;
                if j != i {
                    sum += game.value_at(i, j);
                }
            }
        }
        let challenger_utility = match game.kind() {
            GameKind::AdditivelySeparable => sum,
            GameKind::Fractional => sum / Rational::from_integer(size),
        };
        match base_utils[i].cmp(&challenger_utility) {
            Ordering::Greater => margin += 1,
            Ordering::Less => margin -= 1,
            Ordering::Equal => {}
        }
    }
    margin
}

/// Result of scanning one contiguous enumeration segment for challengers
/// beating the target partition.
///
/// If `witness` is `None` the segment was scanned to its end; otherwise
/// `examined` counts challengers up to and including the witness.
#[derive(Clone, Debug)]
pub struct ShardOutcome {
    pub examined: u64,
    pub witness: Option<Partition>,
}

/// An exhaustive full-mode verification, split into contiguous shards that
/// can run in any order or in parallel and merge into one deterministic
/// report.
///
/// Contract for [`VerificationPlan::merge`]: every shard that precedes the
/// first witness-carrying shard must have been run to completion; shards
/// after it may be missing.
pub struct VerificationPlan<'a> {
    game: &'a HedonicGame,
    target: &'a Partition,
    target_utils: Vec<Rational>,
    prefixes: Vec<Vec<u32>>,
}

impl<'a> VerificationPlan<'a> {
    pub fn new(game: &'a HedonicGame, target: &'a Partition, limit: usize) -> Result<Self> {
        check_exhaustive_inputs(game, target, limit)?;
        let mut target_utils = Vec::new();
        utilities_for_rgs(game, target.assignment(), &mut target_utils);
        Ok(VerificationPlan {
            game,
            target,
            target_utils,
            prefixes: enumeration::rgs_prefixes(game.n_agents(), SHARD_DEPTH),
        })
    }

    pub fn shard_count(&self) -> usize {
        self.prefixes.len()
    }

    /// Scans shard `index`; takes `&self` so shards may run concurrently.
    pub fn run_shard(&self, index: usize) -> ShardOutcome {
        let mut generator =
            RgsGenerator::with_prefix(self.game.n_agents(), &self.prefixes[index])
                .expect("plan prefixes are valid");
        let mut examined = 0u64;
        while let Some(rgs) = generator.advance() {
            if rgs == self.target.assignment() {
                continue;
            }
            examined += 1;
            if margin_against(self.game, &self.target_utils, rgs) < 0 {
                return ShardOutcome {
                    examined,
                    witness: Some(Partition::from_rgs_unchecked(rgs)),
                };
            }
        }
        ShardOutcome {
            examined,
            witness: None,
        }
    }

    /// Combines shard outcomes (indexed like the shards) into the report a
    /// sequential scan would have produced.
    pub fn merge(&self, outcomes: &[Option<ShardOutcome>]) -> PopularityReport {
        assert_eq!(outcomes.len(), self.prefixes.len(), "one outcome slot per shard");
        let mut examined = 0u64;
        for outcome in outcomes {
            let outcome = outcome
                .as_ref()
                .expect("every shard before the first witness must be complete");
            examined += outcome.examined;
            if let Some(witness) = &outcome.witness {
                return PopularityReport {
                    verdict: Verdict::NotPopular,
                    witness: Some(witness.clone()),
                    challengers_examined: examined,
                    pruned: 0,
                };
            }
        }
        PopularityReport {
            verdict: Verdict::Popular,
            witness: None,
            challengers_examined: examined,
            pruned: 0,
        }
    }

    /// Runs the shards in order with early exit, as a single thread would.
    pub fn run_sequential(&self) -> PopularityReport {
        let mut outcomes: Vec<Option<ShardOutcome>> = alloc::vec![None; self.prefixes.len()];
        for index in 0..self.prefixes.len() {
            let outcome = self.run_shard(index);
            let stop = outcome.witness.is_some();
            outcomes[index] = Some(outcome);
            if stop {
                break;
            }
        }
        self.merge(&outcomes)
    }
}

fn check_exhaustive_inputs(game: &HedonicGame, target: &Partition, limit: usize) -> Result<()> {
    if target.n_agents() != game.n_agents() {
        return Err(Error::PartitionSizeMismatch {
            partition: target.n_agents(),
            game: game.n_agents(),
        });
    }
    if game.n_agents() > limit {
        return Err(Error::EnumerationLimitExceeded {
            n_agents: game.n_agents(),
            limit,
        });
    }
    Ok(())
}

/// Exhaustively decides whether `target` is popular.
///
/// The full mode compares against every other partition; the Pareto-
/// restricted mode skips challengers that are not Pareto-optimal (counted in
/// `pruned`).  Both return the same verdict.
pub fn verify_popular(
    game: &HedonicGame,
    target: &Partition,
    mode: VerifyMode,
    limit: usize,
) -> Result<PopularityReport> {
    match mode {
        VerifyMode::Full => {
            let plan = VerificationPlan::new(game, target, limit)?;
            let report = plan.run_sequential();
            debug_assert_witness(game, target, &report);
            Ok(report)
        }
        VerifyMode::ParetoRestricted => {
            check_exhaustive_inputs(game, target, limit)?;
            let report = if game.n_agents() <= MATERIALIZE_LIMIT {
                let table = pareto_table(game, limit)?;
                verify_popular_with_table(game, target, &table)?
            } else {
                verify_pareto_streaming(game, target)
            };
            debug_assert_witness(game, target, &report);
            Ok(report)
        }
    }
}

fn debug_assert_witness(game: &HedonicGame, target: &Partition, report: &PopularityReport) {
    if report.verdict == Verdict::NotPopular {
        let witness = report.witness.as_ref().expect("not-popular verdicts carry a witness");
        let margin = popularity_margin(game, target, witness, None)
            .expect("witness stems from the same game")
            .margin;
        assert!(margin < 0, "witness must win the pairwise vote");
    }
}

/// Positions (in enumeration order) of the Pareto-optimal partitions of a
/// game, with their per-agent utilities.
pub struct ParetoTable {
    n_agents: usize,
    utilities: Vec<Rational>,
    optimal: Vec<bool>,
}

impl ParetoTable {
    pub fn partition_count(&self) -> usize {
        self.optimal.len()
    }

    pub fn optimal_count(&self) -> usize {
        self.optimal.iter().filter(|&&flag| flag).count()
    }

    pub fn is_optimal(&self, position: usize) -> bool {
        self.optimal[position]
    }

    fn utilities_at(&self, position: usize) -> &[Rational] {
        &self.utilities[position * self.n_agents..(position + 1) * self.n_agents]
    }
}

/// Classifies every partition of the game as Pareto-optimal or dominated.
/// Only available for small games, since the table is quadratic work.
pub fn pareto_table(game: &HedonicGame, limit: usize) -> Result<ParetoTable> {
    let n = game.n_agents();
    if n > limit.min(MATERIALIZE_LIMIT) {
        return Err(Error::EnumerationLimitExceeded {
            n_agents: n,
            limit: limit.min(MATERIALIZE_LIMIT),
        });
    }
    let mut utilities: Vec<Rational> = Vec::new();
    let mut buf: Vec<Rational> = Vec::new();
    let mut generator = RgsGenerator::new(n);
    while let Some(rgs) = generator.advance() {
        utilities_for_rgs(game, rgs, &mut buf);
        utilities.extend_from_slice(&buf);
    }
    let count = utilities.len() / n;
    let mut optimal = alloc::vec![true; count];
    for p in 0..count {
        let target = &utilities[p * n..(p + 1) * n];
        'search: for q in 0..count {
            if q == p {
                continue;
            }
            let other = &utilities[q * n..(q + 1) * n];
            let mut strict = false;
            for i in 0..n {
                match other[i].cmp(&target[i]) {
                    Ordering::Less => continue 'search,
                    Ordering::Greater => strict = true,
                    Ordering::Equal => {}
                }
            }
            if strict {
                optimal[p] = false;
                break;
            }
        }
    }
    Ok(ParetoTable {
        n_agents: n,
        utilities,
        optimal,
    })
}

/// Pareto-restricted verification reusing a precomputed table, so several
/// partitions of one game can be verified without rebuilding it.
pub fn verify_popular_with_table(
    game: &HedonicGame,
    target: &Partition,
    table: &ParetoTable,
) -> Result<PopularityReport> {
    if table.n_agents != game.n_agents() {
        return Err(Error::PartitionSizeMismatch {
            partition: table.n_agents,
            game: game.n_agents(),
        });
    }
    check_exhaustive_inputs(game, target, DEFAULT_ENUMERATION_LIMIT)?;
    let mut target_utils = Vec::new();
    utilities_for_rgs(game, target.assignment(), &mut target_utils);
    let mut examined = 0u64;
    let mut pruned = 0u64;
    let mut generator = RgsGenerator::new(game.n_agents());
    let mut position = 0usize;
    while let Some(rgs) = generator.advance() {
        let here = position;
        position += 1;
        if rgs == target.assignment() {
            continue;
        }
        if !table.is_optimal(here) {
            pruned += 1;
            continue;
        }
        examined += 1;
        let challenger_utils = table.utilities_at(here);
        let mut margin = 0i64;
        for i in 0..game.n_agents() {
            match target_utils[i].cmp(&challenger_utils[i]) {
                Ordering::Greater => margin += 1,
                Ordering::Less => margin -= 1,
                Ordering::Equal => {}
            }
        }
        if margin < 0 {
            return Ok(PopularityReport {
                verdict: Verdict::NotPopular,
                witness: Some(Partition::from_rgs_unchecked(rgs)),
                challengers_examined: examined,
                pruned,
            });
        }
    }
    Ok(PopularityReport {
        verdict: Verdict::Popular,
        witness: None,
        challengers_examined: examined,
        pruned,
    })
}

/// Pareto-restricted verification for games too large to materialize: each
/// challenger is checked for Pareto-optimality by its own streaming scan.
fn verify_pareto_streaming(game: &HedonicGame, target: &Partition) -> PopularityReport {
    let n = game.n_agents();
    let mut target_utils = Vec::new();
    utilities_for_rgs(game, target.assignment(), &mut target_utils);
    let mut challenger_utils = Vec::new();
    let mut examined = 0u64;
    let mut pruned = 0u64;
    let mut generator = RgsGenerator::new(n);
    while let Some(rgs) = generator.advance() {
        if rgs == target.assignment() {
            continue;
        }
        utilities_for_rgs(game, rgs, &mut challenger_utils);
        if streaming_improvement_exists(game, rgs, &challenger_utils) {
            pruned += 1;
            continue;
        }
        examined += 1;
        let mut margin = 0i64;
        for i in 0..n {
            match target_utils[i].cmp(&challenger_utils[i]) {
                Ordering::Greater => margin += 1,
                Ordering::Less => margin -= 1,
                Ordering::Equal => {}
            }
        }
        if margin < 0 {
            return PopularityReport {
                verdict: Verdict::NotPopular,
                witness: Some(Partition::from_rgs_unchecked(rgs)),
                challengers_examined: examined,
                pruned,
            };
        }
    }
    PopularityReport {
        verdict: Verdict::Popular,
        witness: None,
        challengers_examined: examined,
        pruned,
    }
}

fn streaming_improvement_exists(
    game: &HedonicGame,
    base_rgs: &[u32],
    base_utils: &[Rational],
) -> bool {
    let n = game.n_agents();
    let mut candidate_utils = Vec::new();
    let mut generator = RgsGenerator::new(n);
    while let Some(rgs) = generator.advance() {
        if rgs == base_rgs {
            continue;
        }
        utilities_for_rgs(game, rgs, &mut candidate_utils);
        let mut strict = false;
        let mut dominated = true;
        for i in 0..n {
            match candidate_utils[i].cmp(&base_utils[i]) {
                Ordering::Less => {
                    dominated = false;
                    break;
                }
                Ordering::Greater => strict = true,
                Ordering::Equal => {}
            }
        }
        if dominated && strict {
            return true;
        }
    }
    false
}

/// First partition (in enumeration order) that makes every agent weakly
/// better off than `target` and at least one strictly better off.
pub fn find_pareto_improvement(
    game: &HedonicGame,
    target: &Partition,
    limit: usize,
) -> Result<Option<Partition>> {
    check_exhaustive_inputs(game, target, limit)?;
    let mut base_utils = Vec::new();
    utilities_for_rgs(game, target.assignment(), &mut base_utils);
    let mut candidate_utils = Vec::new();
    let mut generator = RgsGenerator::new(game.n_agents());
    while let Some(rgs) = generator.advance() {
        if rgs == target.assignment() {
            continue;
        }
        utilities_for_rgs(game, rgs, &mut candidate_utils);
        let mut strict = false;
        let mut dominated = true;
        for i in 0..game.n_agents() {
            match candidate_utils[i].cmp(&base_utils[i]) {
                Ordering::Less => {
                    dominated = false;
                    break;
                }
                Ordering::Greater => strict = true,
                Ordering::Equal => {}
            }
        }
        if dominated && strict {
            return Ok(Some(Partition::from_rgs_unchecked(rgs)));
        }
    }
    Ok(None)
}

/// Whether no partition weakly dominates `target` with one strict gain.
pub fn is_pareto_optimal(game: &HedonicGame, target: &Partition, limit: usize) -> Result<bool> {
    Ok(find_pareto_improvement(game, target, limit)?.is_none())
}

/// Exhaustively searches for a popular partition, returning the first one in
/// enumeration order together with its verification report.
pub fn find_popular(
    game: &HedonicGame,
    limit: usize,
) -> Result<Option<(Partition, PopularityReport)>> {
    let n = game.n_agents();
    if n > limit {
        return Err(Error::EnumerationLimitExceeded { n_agents: n, limit });
    }
    if n <= MATERIALIZE_LIMIT {
        return Ok(find_popular_materialized(game));
    }
    let candidates = enumeration::enumerate_partitions(n, &[])?;
    for candidate in candidates {
        let report = verify_popular(game, &candidate, VerifyMode::Full, limit)?;
        if report.verdict == Verdict::Popular {
            return Ok(Some((candidate, report)));
        }
    }
    Ok(None)
}

/// Small-game search path: every partition's utility vector is computed once
/// and candidates are compared against the shared table.
fn find_popular_materialized(game: &HedonicGame) -> Option<(Partition, PopularityReport)> {
    let n = game.n_agents();
    let mut stored: Vec<Vec<u32>> = Vec::new();
    let mut utilities: Vec<Rational> = Vec::new();
    let mut buf = Vec::new();
    let mut generator = RgsGenerator::new(n);
    while let Some(rgs) = generator.advance() {
        stored.push(rgs.to_vec());
        utilities_for_rgs(game, rgs, &mut buf);
        utilities.extend_from_slice(&buf);
    }
    let count = stored.len();
    'candidates: for p in 0..count {
        let mine = &utilities[p * n..(p + 1) * n];
        let mut examined = 0u64;
        for q in 0..count {
            if q == p {
                continue;
            }
            examined += 1;
            let theirs = &utilities[q * n..(q + 1) * n];
            let mut margin = 0i64;
            for i in 0..n {
                match mine[i].cmp(&theirs[i]) {
                    Ordering::Greater => margin += 1,
                    Ordering::Less => margin -= 1,
                    Ordering::Equal => {}
                }
            }
            if margin < 0 {
                continue 'candidates;
            }
        }
        return Some((
            Partition::from_rgs_unchecked(&stored[p]),
            PopularityReport {
                verdict: Verdict::Popular,
                witness: None,
                challengers_examined: examined,
                pruned: 0,
            },
        ));
    }
    None
}

/// Agent pairs whose mutual values both lie at or below `-threshold`.
///
/// In games built around a large-negative sentinel, no partition that puts
/// such a pair together can be popular or even individually rational, so the
/// pairs can safely prune candidate enumeration.
pub fn hostile_pairs(game: &HedonicGame, threshold: &Rational) -> Vec<(AgentId, AgentId)> {
    let bound = -threshold.clone();
    let n = game.n_agents();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if *game.value_at(i, j) <= bound && *game.value_at(j, i) <= bound {
                pairs.push((AgentId(i as u32), AgentId(j as u32)));
            }
        }
    }
    pairs
}
