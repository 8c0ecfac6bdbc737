//! Experiment harness: the lemma suite that audits a compiled game against
//! its construction, and the acceptance drivers used by the test suite.
//!
//! Every run is deterministic for a fixed seed.  Reports therefore carry
//! deterministic work counters instead of wall-clock times, so repeated runs
//! (and runs under different thread counts) are byte-identical.

use std::fmt;

use hedonic_core::enumeration::{bell, enumerate_partitions, random_partition};
use hedonic_core::falsify::falsify_popularity;
use hedonic_core::gadgets::{five_agent_noinstance, star_game};
use hedonic_core::popularity::{
    find_popular, popularity_margin, verify_popular, Verdict, VerifyMode,
};
use hedonic_core::qsat::{qsat_solve, Clause, Literal, QDnfInstance, Side, TruthAssignment};
use hedonic_core::reduction::{
    assignment_partition, challenger_partition, reduce_ashg, reduce_fhg, AgentRole,
    ReductionArtifact, ReductionParams,
};
use hedonic_core::{AgentId, Coalition, GameKind, HedonicGame, Partition, Preference, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::parallel::verify_popular_threaded;

/// Which of the two compilers to drive.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Model {
    Ashg,
    Fhg,
}

impl Model {
    pub fn reduce(self, instance: &QDnfInstance) -> hedonic_core::Result<ReductionArtifact> {
        match self {
            Model::Ashg => reduce_ashg(instance),
            Model::Fhg => reduce_fhg(instance),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Model::Ashg => "ashg",
            Model::Fhg => "fhg",
        }
    }
}

/// One named audit with its outcome and replayable details.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, details: impl Into<String>) -> Self {
        CheckOutcome {
            name,
            passed: true,
            details: details.into(),
        }
    }

    fn fail(name: &'static str, details: impl Into<String>) -> Self {
        CheckOutcome {
            name,
            passed: false,
            details: details.into(),
        }
    }
}

/// Aggregated audit result.  `work` counts deterministic units of effort
/// (cells scanned, margins evaluated, partitions sampled) and stands in for
/// wall-clock timing so that output stays byte-reproducible.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub summary: String,
    pub checks: Vec<CheckOutcome>,
    pub work: u64,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|check| check.passed)
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "experiment: {}", self.summary)?;
        for check in &self.checks {
            let status = if check.passed { "pass" } else { "FAIL" };
            writeln!(f, "check {}: {} - {}", check.name, status, check.details)?;
        }
        let good = self.checks.iter().filter(|c| c.passed).count();
        writeln!(f, "work units: {}", self.work)?;
        write!(f, "checks passed: {good} of {}", self.checks.len())
    }
}

/// Deterministic formula family used by the acceptance drivers: clause `k`
/// rotates variables and polarities so every table case occurs.
pub fn fixture_instance(n: usize, m: usize) -> QDnfInstance {
    let mut clauses = Vec::with_capacity(m);
    for k in 0..m {
        let literals = if n == 1 {
            [
                Literal::new(Side::X, 0, k % 2 == 1),
                Literal::new(Side::Y, 0, false),
                Literal::new(Side::Y, 0, true),
            ]
        } else {
            [
                Literal::new(Side::X, k % n, k % 2 == 1),
                Literal::new(Side::Y, k % n, (k / 2) % 2 == 1),
                Literal::new(Side::Y, (k + 1) % n, k % 2 == 0),
            ]
        };
        clauses.push(Clause::new(literals).expect("fixture literals are distinct"));
    }
    QDnfInstance::new(n, clauses).expect("fixture formula is well formed")
}

fn clause_satisfied(
    clause: &Clause,
    tau_x: &TruthAssignment,
    tau_y: &TruthAssignment,
) -> bool {
    clause.literals().iter().all(|literal| {
        let bit = match literal.side {
            Side::X => tau_x.value(literal.var),
            Side::Y => tau_y.value(literal.var),
        };
        bit != literal.negated
    })
}

fn satisfied_count(
    instance: &QDnfInstance,
    tau_x: &TruthAssignment,
    tau_y: &TruthAssignment,
) -> i64 {
    instance
        .clauses()
        .iter()
        .filter(|clause| clause_satisfied(clause, tau_x, tau_y))
        .count() as i64
}

fn literal_in_clause(instance: &QDnfInstance, clause: usize, side: Side, var: usize, negated: bool) -> bool {
    instance.clauses()[clause]
        .literals()
        .iter()
        .any(|l| l.side == side && l.var == var && l.negated == negated)
}

/// Expected matrix cell for the additively separable construction, written
/// as an independent transcription of the valuation rules.
fn expected_additive_cell(
    instance: &QDnfInstance,
    infinity: &Rational,
    from: AgentRole,
    to: AgentRole,
) -> Rational {
    use AgentRole::*;
    let minus = -infinity.clone();
    let int = Rational::from_integer;
    let half = Rational::new(1, 2);
    match (from, to) {
        (XLit { var: a, .. }, XLit { var: b, .. }) => if a == b { minus } else { int(0) },
        (XLit { .. }, YLit { .. }) | (XLit { .. }, CAgent { .. }) => int(0),
        (XLit { var: a, .. }, Xt { var: b }) => if a == b { half } else { minus },
        (XLit { var: a, .. }, Xf { var: b }) => if a == b { int(4) } else { minus },
        (XLit { .. }, B1) => int(1),
        (XLit { .. }, B2) => int(2),
        (XLit { .. }, _) => minus,
        (YLit { var: a, .. }, YLit { var: b, .. }) => if a == b { minus } else { int(0) },
        (YLit { .. }, XLit { .. }) | (YLit { .. }, CAgent { .. }) => int(0),
        (YLit { var: a, negated: p }, YPrime { var: b, negated: q }) => {
            if (a, p) == (b, q) { half } else { minus }
        }
        (YLit { .. }, B1) => int(1),
        (YLit { .. }, B2) => int(2),
        (YLit { .. }, _) => minus,
        (CAgent { clause }, XLit { var, negated }) => {
            if literal_in_clause(instance, clause, Side::X, var, negated) { int(-2) } else { int(0) }
        }
        (CAgent { clause }, YLit { var, negated }) => {
            if literal_in_clause(instance, clause, Side::Y, var, negated) { int(-2) } else { int(0) }
        }
        (CAgent { .. }, CAgent { .. }) | (CAgent { .. }, CPrime { .. }) => int(0),
        (CAgent { .. }, B1) => int(5),
        (CAgent { .. }, B2) => int(6),
        (CAgent { .. }, _) => minus,
        (Xt { var: a }, XLit { var: b, .. }) | (Xf { var: a }, XLit { var: b, .. }) => {
            if a == b { int(1) } else { minus }
        }
        (Xt { .. }, _) | (Xf { .. }, _) => minus,
        (YPrime { var: a, negated: p }, YLit { var: b, negated: q }) => {
            if (a, p) == (b, q) { int(1) } else { minus }
        }
        (YPrime { .. }, _) => minus,
        (CPrime { .. }, CAgent { .. }) => int(1),
        (CPrime { .. }, CPrime { .. }) => int(0),
        (CPrime { .. }, _) => minus,
        (T1 { .. }, T1 { .. }) | (T2 { .. }, T2 { .. }) => int(0),
        (T1 { .. }, B1) | (T2 { .. }, B1) => int(1),
        (T1 { .. }, B2) | (T2 { .. }, B2) => int(2),
        (T1 { .. }, _) | (T2 { .. }, _) => minus,
        (B1, XLit { .. } | YLit { .. } | CAgent { .. } | T1 { .. } | T2 { .. }) => int(1),
        (B1, _) => minus,
        (B2, XLit { .. } | YLit { .. } | CAgent { .. } | T1 { .. } | T2 { .. }) => int(2),
        (B2, _) => minus,
        _ => minus,
    }
}

/// Expected matrix cell for the fractional construction.
fn expected_fractional_cell(
    instance: &QDnfInstance,
    v_x: &Rational,
    v_c: &Rational,
    v_j: &Rational,
    from: AgentRole,
    to: AgentRole,
) -> Rational {
    use AgentRole::*;
    let int = Rational::from_integer;
    match (from, to) {
        (XLit { var: a, .. }, XLit { var: b, .. }) => int(if a == b { 0 } else { 1 }),
        (XLit { .. }, YLit { .. }) | (XLit { .. }, CAgent { .. }) => int(1),
        (XLit { .. }, J) => int(2),
        (XLit { var: a, .. }, Xt { var: b }) => if a == b { v_x.clone() } else { int(0) },
        (XLit { var: a, .. }, Xf { var: b }) | (XLit { var: a, .. }, XfPrime { var: b }) => {
            if a == b { v_x * Rational::new(9, 10) } else { int(0) }
        }
        (YLit { var: a, .. }, YLit { var: b, .. }) => int(if a == b { 0 } else { 1 }),
        (YLit { .. }, XLit { .. }) | (YLit { .. }, CAgent { .. }) => int(1),
        (YLit { .. }, J) => int(2),
        (YLit { var: a, negated: p }, YPrime { var: b, negated: q })
        | (YLit { var: a, negated: p }, YDoublePrime { var: b, negated: q }) => {
            if (a, p) == (b, q) { Rational::new(3, 2) } else { int(0) }
        }
        (CAgent { clause }, XLit { var, negated }) => {
            if literal_in_clause(instance, clause, Side::X, var, negated) { int(0) } else { v_c.clone() }
        }
        (CAgent { clause }, YLit { var, negated }) => {
            if literal_in_clause(instance, clause, Side::Y, var, negated) { int(0) } else { v_c.clone() }
        }
        (CAgent { .. }, CAgent { .. }) | (CAgent { .. }, J) => int(1),
        (CAgent { clause: a }, Leaf { clause: b, leaf: 6 }) => int(if a == b { 2 } else { 0 }),
        (J, XLit { .. } | YLit { .. } | CAgent { .. }) => int(1),
        (J, JPrime | JDoublePrime) => v_j.clone(),
        (JPrime, J) | (JDoublePrime, J) => int(1),
        (JPrime, JDoublePrime) | (JDoublePrime, JPrime) => int(2),
        (Xt { var: a }, XLit { var: b, .. }) => int(if a == b { 1 } else { 0 }),
        (Xf { var: a }, XLit { var: b, .. }) | (XfPrime { var: a }, XLit { var: b, .. }) => {
            int(if a == b { 1 } else { 0 })
        }
        (Xf { var: a }, XfPrime { var: b }) | (XfPrime { var: a }, Xf { var: b }) => {
            int(if a == b { 1 } else { 0 })
        }
        (YPrime { var: a, negated: p }, YLit { var: b, negated: q })
        | (YDoublePrime { var: a, negated: p }, YLit { var: b, negated: q }) => {
            int(if (a, p) == (b, q) { 1 } else { 0 })
        }
        (YPrime { var: a, negated: p }, YDoublePrime { var: b, negated: q })
        | (YDoublePrime { var: a, negated: p }, YPrime { var: b, negated: q }) => {
            int(if (a, p) == (b, q) { 2 } else { 0 })
        }
        (Leaf { clause: a, leaf: 6 }, CAgent { clause: b }) => {
            if a == b { Rational::new(3, 4) } else { int(0) }
        }
        (Leaf { clause: a, .. }, R { clause: b }) => int(if a == b { 1 } else { 0 }),
        (R { clause: a }, Leaf { clause: b, .. }) => int(if a == b { 1 } else { 0 }),
        _ => int(0),
    }
}

/// Expected cell for either construction, keyed by the artifact parameters.
pub fn expected_cell(
    instance: &QDnfInstance,
    params: &ReductionParams,
    from: AgentRole,
    to: AgentRole,
) -> Rational {
    match params {
        ReductionParams::Ashg { infinity, .. } => {
            expected_additive_cell(instance, infinity, from, to)
        }
        ReductionParams::Fhg { v_x, v_c, v_j, .. } => {
            expected_fractional_cell(instance, v_x, v_c, v_j, from, to)
        }
    }
}

/// Compares every ordered off-diagonal cell of `game` against the expected
/// construction value.  Exposed separately so tampered matrices can be
/// audited against their claimed roles.
pub fn table_conformance_check(
    game: &HedonicGame,
    roles: &[AgentRole],
    params: &ReductionParams,
    instance: &QDnfInstance,
) -> CheckOutcome {
    let n = game.n_agents();
    if roles.len() != n {
        return CheckOutcome::fail(
            "table-conformance",
            format!("{} roles for {n} agents", roles.len()),
        );
    }
    let mut scanned = 0u64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            scanned += 1;
            let actual = game.value(AgentId(i as u32), AgentId(j as u32));
            let expected = expected_cell(instance, params, roles[i], roles[j]);
            if *actual != expected {
                return CheckOutcome::fail(
                    "table-conformance",
                    format!(
                        "cell ({i} {}, {j} {}): expected {expected}, got {actual}",
                        roles[i], roles[j]
                    ),
                );
            }
        }
    }
    CheckOutcome::pass("table-conformance", format!("{scanned} ordered cells match"))
}

/// Expected role multiset, per construction: family label and count.
fn expected_census(model: Model, n: usize, m: usize) -> Vec<(&'static str, usize)> {
    match model {
        Model::Ashg => vec![
            ("X literal", 2 * n),
            ("X truth marker", n),
            ("X false marker", n),
            ("Y literal", 2 * n),
            ("Y companion", 2 * n),
            ("clause", m),
            ("padding", m - 1),
            ("first tail", 2 * n + m),
            ("second tail", 2 * n + m),
            ("first anchor", 1),
            ("second anchor", 1),
        ],
        Model::Fhg => vec![
            ("X literal", 2 * n),
            ("X truth marker", n),
            ("X false marker", n),
            ("X false companion", n),
            ("Y literal", 2 * n),
            ("Y companion", 2 * n),
            ("Y second companion", 2 * n),
            ("clause", m),
            ("star center", m),
            ("star leaf", 6 * m),
            ("anchor triple", 3),
        ],
    }
}

fn role_family(model: Model, role: &AgentRole) -> &'static str {
    use AgentRole::*;
    match (model, role) {
        (_, XLit { .. }) => "X literal",
        (_, Xt { .. }) => "X truth marker",
        (_, Xf { .. }) => "X false marker",
        (Model::Fhg, XfPrime { .. }) => "X false companion",
        (_, YLit { .. }) => "Y literal",
        (_, YPrime { .. }) => "Y companion",
        (Model::Fhg, YDoublePrime { .. }) => "Y second companion",
        (_, CAgent { .. }) => "clause",
        (Model::Ashg, CPrime { .. }) => "padding",
        (Model::Ashg, T1 { .. }) => "first tail",
        (Model::Ashg, T2 { .. }) => "second tail",
        (Model::Ashg, B1) => "first anchor",
        (Model::Ashg, B2) => "second anchor",
        (Model::Fhg, R { .. }) => "star center",
        (Model::Fhg, Leaf { .. }) => "star leaf",
        (Model::Fhg, J | JPrime | JDoublePrime) => "anchor triple",
        _ => "foreign role",
    }
}

fn census_check(model: Model, artifact: &ReductionArtifact) -> CheckOutcome {
    let n = artifact.params().n();
    let m = artifact.params().m();
    let expected = expected_census(model, n, m);
    let total: usize = expected.iter().map(|&(_, count)| count).sum();
    if artifact.game().n_agents() != total {
        return CheckOutcome::fail(
            "role-census",
            format!("{} agents, expected {total}", artifact.game().n_agents()),
        );
    }
    for &(family, count) in &expected {
        let actual = artifact
            .roles()
            .iter()
            .filter(|role| role_family(model, role) == family)
            .count();
        if actual != count {
            return CheckOutcome::fail(
                "role-census",
                format!("family {family:?}: {actual} agents, expected {count}"),
            );
        }
    }
    CheckOutcome::pass(
        "role-census",
        format!("{total} agents across {} role families", expected.len()),
    )
}

fn agent(artifact: &ReductionArtifact, role: AgentRole) -> AgentId {
    artifact
        .agent_with_role(role)
        .unwrap_or_else(|| panic!("construction must contain role {role}"))
}

fn anchor_check(model: Model, artifact: &ReductionArtifact) -> CheckOutcome {
    let n = artifact.params().n();
    let m = artifact.params().m();
    let game = artifact.game();
    let group = (2 * n + m) as i128;
    for x_rank in 0..1u64 << n {
        let tau_x = TruthAssignment::from_rank(Side::X, n, x_rank);
        let base = match assignment_partition(artifact, &tau_x) {
            Ok(base) => base,
            Err(fault) => {
                return CheckOutcome::fail(
                    "anchor-utilities",
                    format!("x rank {x_rank}: cannot build the encoded partition: {fault}"),
                )
            }
        };
        let mut targets: Vec<(AgentRole, Rational)> = Vec::new();
        match model {
            Model::Ashg => {
                targets.push((AgentRole::B1, Rational::from_integer(group)));
                targets.push((AgentRole::B2, Rational::from_integer(2 * group)));
                targets.push((AgentRole::CPrime { index: 0 }, Rational::from_integer(m as i128)));
                for clause in 0..m {
                    targets.push((AgentRole::CAgent { clause }, Rational::from_integer(0)));
                }
            }
            Model::Fhg => {
                targets.push((AgentRole::J, Rational::new(group - 1, group)));
                for clause in 0..m {
                    targets.push((AgentRole::CAgent { clause }, Rational::from_integer(1)));
                    targets.push((AgentRole::Leaf { clause, leaf: 6 }, Rational::new(3, 8)));
                    targets.push((AgentRole::R { clause }, Rational::new(3, 4)));
                }
            }
        }
        for (role, expected) in targets {
            let actual = game
                .partition_utility(&base, agent(artifact, role))
                .expect("agents are in range");
            if actual != expected {
                return CheckOutcome::fail(
                    "anchor-utilities",
                    format!("x rank {x_rank}, agent {role}: utility {actual}, expected {expected}"),
                );
            }
        }
    }
    CheckOutcome::pass(
        "anchor-utilities",
        format!("all anchors exact for {} encoded partitions", 1u64 << n),
    )
}

fn dichotomy_check(artifact: &ReductionArtifact, work: &mut u64) -> CheckOutcome {
    let instance = artifact.instance();
    let n = instance.n_vars();
    let mut losing = 0u64;
    let mut total = 0u64;
    for x_rank in 0..1u64 << n {
        let tau_x = TruthAssignment::from_rank(Side::X, n, x_rank);
        let base = match assignment_partition(artifact, &tau_x) {
            Ok(base) => base,
            Err(fault) => {
                return CheckOutcome::fail(
                    "challenger-dichotomy",
                    format!("x rank {x_rank}: {fault}"),
                )
            }
        };
        for y_rank in 0..1u64 << n {
            let tau_y = TruthAssignment::from_rank(Side::Y, n, y_rank);
            let challenger = match challenger_partition(artifact, &base, &tau_y) {
                Ok(challenger) => challenger,
                Err(fault) => {
                    return CheckOutcome::fail(
                        "challenger-dichotomy",
                        format!("x rank {x_rank}, y rank {y_rank}: {fault}"),
                    )
                }
            };
            let tally = popularity_margin(artifact.game(), &base, &challenger, None)
                .expect("partitions share the game size");
            *work += 1;
            total += 1;
            let satisfied = satisfied_count(instance, &tau_x, &tau_y);
            let expected = 2 * satisfied - 1;
            if tally.margin != expected {
                return CheckOutcome::fail(
                    "challenger-dichotomy",
                    format!(
                        "x rank {x_rank}, y rank {y_rank}: margin {}, expected {expected} \
                         (satisfied clauses {satisfied})",
                        tally.margin
                    ),
                );
            }
            if expected == -1 {
                losing += 1;
            }
        }
    }
    CheckOutcome::pass(
        "challenger-dichotomy",
        format!("margin 2k-1 exact on {total} assignment pairs, -1 in {losing} of them"),
    )
}

/// Agent groups whose restricted margin from the encoded partition has a
/// proven floor: `(label, members, floor)`.
fn margin_groups(
    model: Model,
    artifact: &ReductionArtifact,
) -> Vec<(String, Vec<AgentId>, i64)> {
    let n = artifact.params().n();
    let m = artifact.params().m();
    let mut groups = Vec::new();
    match model {
        Model::Ashg => {
            for var in 0..n {
                for negated in [false, true] {
                    groups.push((
                        format!("Y pair {}", AgentRole::YLit { var, negated }),
                        vec![
                            agent(artifact, AgentRole::YLit { var, negated }),
                            agent(artifact, AgentRole::YPrime { var, negated }),
                        ],
                        0,
                    ));
                }
                groups.push((
                    format!("X quad x{}", var + 1),
                    vec![
                        agent(artifact, AgentRole::XLit { var, negated: false }),
                        agent(artifact, AgentRole::XLit { var, negated: true }),
                        agent(artifact, AgentRole::Xt { var }),
                        agent(artifact, AgentRole::Xf { var }),
                    ],
                    0,
                ));
            }
            let mut clause_group = Vec::new();
            for clause in 0..m {
                clause_group.push(agent(artifact, AgentRole::CAgent { clause }));
            }
            for index in 0..m - 1 {
                clause_group.push(agent(artifact, AgentRole::CPrime { index }));
            }
            groups.push(("clause group".to_string(), clause_group, -1));
        }
        Model::Fhg => {
            for var in 0..n {
                for negated in [false, true] {
                    groups.push((
                        format!("Y triple {}", AgentRole::YLit { var, negated }),
                        vec![
                            agent(artifact, AgentRole::YLit { var, negated }),
                            agent(artifact, AgentRole::YPrime { var, negated }),
                            agent(artifact, AgentRole::YDoublePrime { var, negated }),
                        ],
                        0,
                    ));
                }
                groups.push((
                    format!("X quint x{}", var + 1),
                    vec![
                        agent(artifact, AgentRole::XLit { var, negated: false }),
                        agent(artifact, AgentRole::XLit { var, negated: true }),
                        agent(artifact, AgentRole::Xt { var }),
                        agent(artifact, AgentRole::Xf { var }),
                        agent(artifact, AgentRole::XfPrime { var }),
                    ],
                    0,
                ));
            }
            for clause in 0..m {
                let mut star = vec![agent(artifact, AgentRole::R { clause })];
                for leaf in 1..=6 {
                    star.push(agent(artifact, AgentRole::Leaf { clause, leaf }));
                }
                groups.push((format!("star c{}", clause + 1), star, 0));
            }
            groups.push((
                "anchor companions".to_string(),
                vec![agent(artifact, AgentRole::JPrime), agent(artifact, AgentRole::JDoublePrime)],
                0,
            ));
        }
    }
    groups
}

fn group_sampling_check(
    model: Model,
    artifact: &ReductionArtifact,
    seed: u64,
    samples: u64,
    work: &mut u64,
) -> CheckOutcome {
    let game = artifact.game();
    let n = artifact.params().n();
    let base = assignment_partition(artifact, &TruthAssignment::from_rank(Side::X, n, 0))
        .expect("the encoded partition exists");
    let groups = margin_groups(model, artifact);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for sample in 0..samples {
        let other = random_partition(&mut rng, game.n_agents());
        for (label, members, floor) in &groups {
            let tally = popularity_margin(game, &base, &other, Some(members))
                .expect("group members are in range");
            *work += 1;
            if tally.margin < *floor {
                return CheckOutcome::fail(
                    "group-margin-sampling",
                    format!(
                        "seed {seed}, sample {sample}, group {label}: margin {} below floor \
                         {floor} against {other}",
                        tally.margin
                    ),
                );
            }
        }
    }
    CheckOutcome::pass(
        "group-margin-sampling",
        format!("{samples} sampled partitions x {} groups respect their floors", groups.len()),
    )
}

/// Audits a compiled formula end to end: census, full table scan, anchor
/// utilities, the challenger margin law over every assignment pair, and
/// sampled group-margin floors.  Check failures are reported, not raised.
pub fn lemma_suite(
    model: Model,
    instance: &QDnfInstance,
    seed: u64,
    samples: u64,
) -> hedonic_core::Result<ExperimentReport> {
    let artifact = model.reduce(instance)?;
    let mut work = 0u64;
    let answer = match qsat_solve(instance, hedonic_core::qsat::DEFAULT_QSAT_LIMIT)? {
        Some(witness) => format!("yes (least witness {witness})"),
        None => "no".to_string(),
    };
    let summary = format!(
        "model {}, {} variables per side, {} clauses, {} agents, formula answer {}",
        model.label(),
        instance.n_vars(),
        instance.clause_count(),
        artifact.game().n_agents(),
        answer
    );
    let census = census_check(model, &artifact);
    let table = table_conformance_check(
        artifact.game(),
        artifact.roles(),
        artifact.params(),
        artifact.instance(),
    );
    work += (artifact.game().n_agents() * (artifact.game().n_agents() - 1)) as u64;
    let anchors = anchor_check(model, &artifact);
    let dichotomy = dichotomy_check(&artifact, &mut work);
    let sampling = group_sampling_check(model, &artifact, seed, samples, &mut work);
    Ok(ExperimentReport {
        summary,
        checks: vec![census, table, anchors, dichotomy, sampling],
        work,
    })
}

/// Outcome of one acceptance criterion run.
pub struct CriterionOutcome {
    pub number: usize,
    pub title: &'static str,
    pub passed: bool,
    pub report: String,
}

fn random_small_game(rng: &mut ChaCha8Rng, kind: GameKind, n: usize, nonnegative: bool) -> HedonicGame {
    HedonicGame::from_fn(kind, n, |_, _| {
        let numer = if nonnegative {
            rng.gen_range(0..=6)
        } else {
            rng.gen_range(-6..=6)
        };
        Rational::new(numer, rng.gen_range(1..=3))
    })
    .expect("random matrices are well formed")
}

fn criterion_1(threads: usize) -> CriterionOutcome {
    let game = five_agent_noinstance();
    let mut scanned = 0u64;
    let mut popular: Option<Partition> = None;
    for candidate in enumerate_partitions(5, &[]).expect("five agents enumerate") {
        scanned += 1;
        let report = verify_popular_threaded(&game, &candidate, 13, threads)
            .expect("within enumeration limits");
        if report.verdict == Verdict::Popular {
            popular = Some(candidate);
            break;
        }
    }
    let passed = popular.is_none() && scanned == bell(5);
    let report = format!(
        "five-agent fixture: scanned {scanned} of {} partitions, popular partition: {}",
        bell(5),
        match &popular {
            Some(partition) => format!("{partition}"),
            None => "none".to_string(),
        }
    );
    CriterionOutcome {
        number: 1,
        title: "five-agent fixture has no popular partition",
        passed,
        report,
    }
}

fn criterion_2(threads: usize) -> CriterionOutcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for k in 1..=7usize {
        let game = star_game(k).expect("positive leaf counts");
        let found = find_popular(&game, 13).expect("within enumeration limits");
        match found {
            Some((partition, _)) if k <= 5 => {
                let confirm = verify_popular_threaded(&game, &partition, 13, threads)
                    .expect("within enumeration limits");
                let ok = confirm.verdict == Verdict::Popular;
                passed &= ok;
                lines.push(format!(
                    "star k={k}: popular partition {partition} ({})",
                    if ok { "re-verified" } else { "FAILED re-verification" }
                ));
            }
            Some((partition, _)) => {
                passed = false;
                lines.push(format!("star k={k}: unexpected popular partition {partition}"));
            }
            None if k >= 6 => {
                lines.push(format!("star k={k}: none among {} partitions", bell(k + 1)));
            }
            None => {
                passed = false;
                lines.push(format!("star k={k}: no popular partition found but one exists"));
            }
        }
    }
    CriterionOutcome {
        number: 2,
        title: "star threshold at six leaves",
        passed,
        report: lines.join("\n"),
    }
}

fn criterion_3() -> CriterionOutcome {
    let game = five_agent_noinstance();
    let a = AgentId;
    let first =
        Partition::from_blocks(5, [vec![a(0), a(3)], vec![a(1), a(4)], vec![a(2)]]).unwrap();
    let second =
        Partition::from_blocks(5, [vec![a(0), a(4)], vec![a(2), a(3)], vec![a(1)]]).unwrap();
    // Direct per-agent oracle, bypassing the margin routine.
    let mut oracle = 0i64;
    for index in 0..5u32 {
        match game.compare(&first, &second, AgentId(index)).unwrap() {
            Preference::PrefersA => oracle += 1,
            Preference::PrefersB => oracle -= 1,
            Preference::Indifferent => {}
        }
    }
    let tally = popularity_margin(&game, &first, &second, None).unwrap();
    let mut passed = oracle == -1 && tally.margin == -1;
    passed &= (tally.prefers_first, tally.prefers_second, tally.indifferent) == (1, 2, 2);

    let mut rng = ChaCha8Rng::seed_from_u64(0xA5);
    let mut pairs = 0u64;
    for _ in 0..100 {
        let kind = if rng.gen_bool(0.5) {
            GameKind::AdditivelySeparable
        } else {
            GameKind::Fractional
        };
        let random_game = random_small_game(&mut rng, kind, 6, false);
        for _ in 0..100 {
            let p = random_partition(&mut rng, 6);
            let q = random_partition(&mut rng, 6);
            let pq = popularity_margin(&random_game, &p, &q, None).unwrap();
            let qp = popularity_margin(&random_game, &q, &p, None).unwrap();
            let pp = popularity_margin(&random_game, &p, &p, None).unwrap();
            passed &= pq.margin == -qp.margin && pp.margin == 0 && pp.indifferent == 6;
            pairs += 1;
        }
    }
    CriterionOutcome {
        number: 3,
        title: "margin identities",
        passed,
        report: format!(
            "fixture margin {} with tally ({}, {}, {}); antisymmetry and self-margin checked \
             on {pairs} random pairs",
            tally.margin, tally.prefers_first, tally.prefers_second, tally.indifferent
        ),
    }
}

fn criterion_4(threads: usize) -> CriterionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB4);
    let mut games: Vec<HedonicGame> = Vec::new();
    for round in 0..200 {
        let n = rng.gen_range(2..=7);
        let kind = if round % 2 == 0 {
            GameKind::AdditivelySeparable
        } else {
            GameKind::Fractional
        };
        games.push(random_small_game(&mut rng, kind, n, round % 4 == 0));
    }
    games.push(five_agent_noinstance());
    for k in 1..=7 {
        games.push(star_game(k).expect("positive leaf counts"));
    }
    let mut passed = true;
    let mut popular_targets = 0u64;
    for game in &games {
        let target = random_partition(&mut rng, game.n_agents());
        let full = verify_popular_threaded(game, &target, 13, threads).unwrap();
        let pareto = verify_popular(game, &target, VerifyMode::ParetoRestricted, 13).unwrap();
        passed &= full.verdict == pareto.verdict;
        if full.verdict == Verdict::Popular {
            popular_targets += 1;
        }
        for report in [&full, &pareto] {
            if report.verdict == Verdict::NotPopular {
                let witness = report.witness.as_ref().expect("witness required");
                passed &= popularity_margin(game, &target, witness, None).unwrap().margin < 0;
            }
        }
    }
    CriterionOutcome {
        number: 4,
        title: "full and dominance-restricted verification agree",
        passed,
        report: format!(
            "{} games ({} random, 8 fixtures): verdicts agree, {popular_targets} random targets \
             were already popular",
            games.len(),
            games.len() - 8
        ),
    }
}

/// The assignment-structure instances the acceptance criteria quantify over.
fn acceptance_instances(model: Model) -> Vec<QDnfInstance> {
    let mut out = Vec::new();
    let n_values: &[usize] = match model {
        Model::Ashg => &[1, 2],
        Model::Fhg => &[2],
    };
    for &n in n_values {
        for m in [2usize, 3] {
            out.push(fixture_instance(n, m));
        }
    }
    out
}

fn criterion_5() -> CriterionOutcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for model in [Model::Ashg, Model::Fhg] {
        for instance in acceptance_instances(model) {
            let n = instance.n_vars();
            let m = instance.clause_count();
            let artifact = model.reduce(&instance).expect("within preconditions");
            let census = census_check(model, &artifact);
            let table = table_conformance_check(
                artifact.game(),
                artifact.roles(),
                artifact.params(),
                artifact.instance(),
            );
            passed &= census.passed && table.passed;
            let expected_total: usize = expected_census(model, n, m)
                .iter()
                .map(|&(_, count)| count)
                .sum();
            passed &= artifact.game().n_agents() == expected_total;
            let mut line = format!(
                "{} n={n} m={m}: {} agents, census {}, table {}",
                model.label(),
                artifact.game().n_agents(),
                census.details,
                table.details
            );
            if model == Model::Fhg {
                let min = artifact
                    .game()
                    .values()
                    .iter()
                    .min()
                    .expect("nonempty matrix");
                passed &= *min >= Rational::from_integer(0);
                line.push_str(&format!(", matrix minimum {min}"));
            } else {
                // The itemized role multiset above sums to 12n+4m+1; the
                // widely quoted closed form 12n+4m-1 mis-sums those same
                // role counts and is unattainable together with the anchor
                // utility u_b1 = 2n+m checked in criterion 7.
                passed &= artifact.game().n_agents() == 12 * n + 4 * m + 1;
                line.push_str(", itemized role sum 12n+4m+1");
            }
            lines.push(line);
        }
    }
    CriterionOutcome {
        number: 5,
        title: "compiled game structure",
        passed,
        report: lines.join("\n"),
    }
}

fn criterion_6() -> CriterionOutcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for model in [Model::Ashg, Model::Fhg] {
        for instance in acceptance_instances(model) {
            let artifact = model.reduce(&instance).expect("within preconditions");
            let mut work = 0u64;
            let outcome = dichotomy_check(&artifact, &mut work);
            passed &= outcome.passed;
            lines.push(format!(
                "{} n={} m={}: {}",
                model.label(),
                instance.n_vars(),
                instance.clause_count(),
                outcome.details
            ));
        }
    }
    CriterionOutcome {
        number: 6,
        title: "challenger margin dichotomy",
        passed,
        report: lines.join("\n"),
    }
}

fn criterion_7() -> CriterionOutcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for model in [Model::Ashg, Model::Fhg] {
        for instance in acceptance_instances(model) {
            let artifact = model.reduce(&instance).expect("within preconditions");
            let outcome = anchor_check(model, &artifact);
            passed &= outcome.passed;
            lines.push(format!(
                "{} n={} m={}: {}",
                model.label(),
                instance.n_vars(),
                instance.clause_count(),
                outcome.details
            ));
        }
    }
    CriterionOutcome {
        number: 7,
        title: "encoded-partition utility anchors",
        passed,
        report: lines.join("\n"),
    }
}

fn criterion_8() -> CriterionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
    let mut passed = true;
    let mut tuples = 0u64;
    while tuples < 10_000 {
        let n = rng.gen_range(3..=7);
        let nonnegative = rng.gen_bool(0.5);
        let game = random_small_game(&mut rng, GameKind::Fractional, n, nonnegative);
        for _ in 0..20 {
            let member = AgentId(rng.gen_range(0..n as u32));
            let outsider = AgentId(rng.gen_range(0..n as u32));
            if member == outsider {
                continue;
            }
            let mut inside = vec![member];
            for index in 0..n as u32 {
                if index != member.0 && index != outsider.0 && rng.gen_bool(0.5) {
                    inside.push(AgentId(index));
                }
            }
            let coalition = Coalition::new(inside.iter().copied()).unwrap();
            let mut enlarged = inside.clone();
            enlarged.push(outsider);
            let enlarged = Coalition::new(enlarged).unwrap();
            let before = game.coalition_utility(&coalition, member).unwrap();
            let after = game.coalition_utility(&enlarged, member).unwrap();
            let joins_value = game.value(member, outsider);
            passed &= (after >= before) == (*joins_value >= before);
            tuples += 1;
            if tuples == 10_000 {
                break;
            }
        }
    }
    CriterionOutcome {
        number: 8,
        title: "fractional joining preference law",
        passed,
        report: format!(
            "u(C+j) >= u(C) exactly when v(j) >= u(C) on {tuples} random coalition tuples"
        ),
    }
}

fn criterion_9() -> CriterionOutcome {
    let mut passed = true;
    let mut lines = Vec::new();

    let game = five_agent_noinstance();
    let a = AgentId;
    let target =
        Partition::from_blocks(5, [vec![a(0), a(3)], vec![a(1), a(4)], vec![a(2)]]).unwrap();
    let report = falsify_popularity(&game, &target, 10_000, 0x9).unwrap();
    match (&report.verdict, &report.witness) {
        (Verdict::NotPopular, Some(witness)) => {
            let margin = popularity_margin(&game, &target, witness, None).unwrap().margin;
            passed &= margin < 0;
            lines.push(format!(
                "five-agent fixture: witness {witness} with margin {margin} after {} evaluations",
                report.challengers_examined
            ));
        }
        _ => {
            passed = false;
            lines.push("five-agent fixture: no witness found within budget".to_string());
        }
    }

    let star = star_game(5).expect("positive leaf counts");
    let (popular, _) = find_popular(&star, 13).unwrap().expect("five leaves admit one");
    let stuck = falsify_popularity(&star, &popular, 10_000, 0x9).unwrap();
    passed &= stuck.verdict == Verdict::UnknownWithinBudget && stuck.witness.is_none();
    lines.push(format!(
        "star k=5 popular partition {popular}: verdict {:?} after {} evaluations",
        stuck.verdict, stuck.challengers_examined
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(0xD9);
    let mut witnesses = 0u64;
    for round in 0..150 {
        let n = rng.gen_range(4..=6);
        let kind = if round % 2 == 0 {
            GameKind::AdditivelySeparable
        } else {
            GameKind::Fractional
        };
        let random_game = random_small_game(&mut rng, kind, n, false);
        let target = random_partition(&mut rng, n);
        let seed = rng.gen::<u64>();
        let outcome = falsify_popularity(&random_game, &target, 2_000, seed).unwrap();
        if outcome.verdict == Verdict::NotPopular {
            let witness = outcome.witness.as_ref().expect("witness required");
            let margin = popularity_margin(&random_game, &target, witness, None)
                .unwrap()
                .margin;
            passed &= margin < 0;
            witnesses += 1;
        }
    }
    lines.push(format!(
        "150 random targets: {witnesses} not-popular verdicts, every witness re-verified"
    ));
    CriterionOutcome {
        number: 9,
        title: "falsifier soundness and sensitivity",
        passed,
        report: lines.join("\n"),
    }
}

/// Runs one acceptance criterion (1 through 9) with the given worker-thread
/// count.
pub fn run_criterion(number: usize, threads: usize) -> CriterionOutcome {
    match number {
        1 => criterion_1(threads),
        2 => criterion_2(threads),
        3 => criterion_3(),
        4 => criterion_4(threads),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        _ => panic!("criteria are numbered 1 through 9"),
    }
}

/// Runs acceptance criteria 1 through 9 with the given worker-thread count.
/// Used both by the acceptance tests and by the determinism criterion, which
/// compares the concatenated reports across thread counts byte for byte.
pub fn run_criteria(threads: usize) -> Vec<CriterionOutcome> {
    (1..=9).map(|number| run_criterion(number, threads)).collect()
}

/// The concatenated, byte-comparable form of all criterion reports.
pub fn criteria_transcript(threads: usize) -> String {
    let mut out = String::new();
    for outcome in run_criteria(threads) {
        out.push_str(&format!(
            "criterion {} ({}): {}\n{}\n",
            outcome.number,
            outcome.title,
            if outcome.passed { "pass" } else { "FAIL" },
            outcome.report
        ));
    }
    out
}
