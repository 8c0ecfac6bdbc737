//! The additively separable construction.
//!
//! Agent layout, in index order: the two literal agents of each X-variable
//! (positive first), the truth markers `x_t`, the false markers `x_f`, the
//! two literal agents of each Y-variable, their companions, the clause
//! agents, the padding agents, the two tail groups of `2n+m` agents each,
//! and finally the anchors `b1` and `b2` — `12n+4m+1` agents in total.
//!
//! Values not listed in the construction are the large negative sentinel
//! `-infinity`, whose magnitude is fixed at `6*(12n+4m-1)` so that a single
//! sentinel partner always outweighs every positive value in a coalition.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{AgentId, GameKind, HedonicGame, Partition, Rational};
use crate::qsat::{QDnfInstance, Side, TruthAssignment};

use super::{
    clause_contains, extract_into_new_block, AgentRole, ReductionArtifact, ReductionParams,
};

fn layout(n: usize, m: usize) -> Vec<AgentRole> {
    let mut roles = Vec::with_capacity(12 * n + 4 * m + 1);
    for var in 0..n {
        roles.push(AgentRole::XLit { var, negated: false });
        roles.push(AgentRole::XLit { var, negated: true });
    }
    for var in 0..n {
        roles.push(AgentRole::Xt { var });
    }
    for var in 0..n {
        roles.push(AgentRole::Xf { var });
    }
    for var in 0..n {
        roles.push(AgentRole::YLit { var, negated: false });
        roles.push(AgentRole::YLit { var, negated: true });
    }
    for var in 0..n {
        roles.push(AgentRole::YPrime { var, negated: false });
        roles.push(AgentRole::YPrime { var, negated: true });
    }
    for clause in 0..m {
        roles.push(AgentRole::CAgent { clause });
    }
    for index in 0..m - 1 {
        roles.push(AgentRole::CPrime { index });
    }
    for index in 0..2 * n + m {
        roles.push(AgentRole::T1 { index });
    }
    for index in 0..2 * n + m {
        roles.push(AgentRole::T2 { index });
    }
    roles.push(AgentRole::B1);
    roles.push(AgentRole::B2);
    roles
}

/// The value the row role assigns to the (distinct) column role.
fn value(
    instance: &QDnfInstance,
    infinity: &Rational,
    from: AgentRole,
    to: AgentRole,
) -> Rational {
    use AgentRole::*;
    let sentinel = -infinity.clone();
    let int = Rational::from_integer;
    match from {
        XLit { var, .. } => match to {
            XLit { var: w, .. } => {
                if w == var {
                    sentinel
                } else {
                    Rational::zero()
                }
            }
            YLit { .. } | CAgent { .. } => Rational::zero(),
            B1 => int(1),
            B2 => int(2),
            Xt { var: w } => {
                if w == var {
                    Rational::new(1, 2)
                } else {
                    sentinel
                }
            }
            Xf { var: w } => {
                if w == var {
                    int(4)
                } else {
                    sentinel
                }
            }
            _ => sentinel,
        },
        YLit { var, negated } => match to {
            XLit { .. } | CAgent { .. } => Rational::zero(),
            YLit { var: w, .. } => {
                if w == var {
                    sentinel
                } else {
                    Rational::zero()
                }
            }
            B1 => int(1),
            B2 => int(2),
            YPrime { var: w, negated: g } => {
                if (w, g) == (var, negated) {
                    Rational::new(1, 2)
                } else {
                    sentinel
                }
            }
            _ => sentinel,
        },
        CAgent { clause } => match to {
            XLit { var, negated } => {
                if clause_contains(instance, clause, Side::X, var, negated) {
                    int(-2)
                } else {
                    Rational::zero()
                }
            }
            YLit { var, negated } => {
                if clause_contains(instance, clause, Side::Y, var, negated) {
                    int(-2)
                } else {
                    Rational::zero()
                }
            }
            CAgent { .. } | CPrime { .. } => Rational::zero(),
            B1 => int(5),
            B2 => int(6),
            _ => sentinel,
        },
        Xt { var } | Xf { var } => match to {
            XLit { var: w, .. } if w == var => int(1),
            _ => sentinel,
        },
        YPrime { var, negated } => match to {
            YLit { var: w, negated: g } if (w, g) == (var, negated) => int(1),
            _ => sentinel,
        },
        CPrime { .. } => match to {
            CAgent { .. } => int(1),
            CPrime { .. } => Rational::zero(),
            _ => sentinel,
        },
        T1 { .. } => match to {
            T1 { .. } => Rational::zero(),
            B1 => int(1),
            B2 => int(2),
            _ => sentinel,
        },
        T2 { .. } => match to {
            T2 { .. } => Rational::zero(),
            B1 => int(1),
            B2 => int(2),
            _ => sentinel,
        },
        B1 => match to {
            XLit { .. } | YLit { .. } | CAgent { .. } | T1 { .. } | T2 { .. } => int(1),
            _ => sentinel,
        },
        B2 => match to {
            XLit { .. } | YLit { .. } | CAgent { .. } | T1 { .. } | T2 { .. } => int(2),
            _ => sentinel,
        },
        XfPrime { .. } | YDoublePrime { .. } | R { .. } | Leaf { .. } | J | JPrime
        | JDoublePrime => unreachable!("fractional-only role in the additively separable layout"),
    }
}

/// Compiles a formula into the additively separable game.
pub fn reduce_ashg(instance: &QDnfInstance) -> Result<ReductionArtifact> {
    let n = instance.n_vars();
    let m = instance.clause_count();
    if m < 2 {
        return Err(Error::ReductionPrecondition {
            detail: format!(
                "the additively separable construction needs at least two clauses, got {m}"
            ),
        });
    }
    let infinity = Rational::from_integer(6 * (12 * n as i128 + 4 * m as i128 - 1));
    let roles = layout(n, m);
    let game = HedonicGame::from_fn(GameKind::AdditivelySeparable, roles.len(), |i, j| {
        value(instance, &infinity, roles[i as usize], roles[j as usize])
    })?;
    Ok(ReductionArtifact {
        game,
        instance: instance.clone(),
        roles,
        params: ReductionParams::Ashg { n, m, infinity },
    })
}

/// The encoded-assignment partition, optionally with the two tail groups
/// swapped between the anchors (the swapped form is structurally equivalent
/// and accepted by the challenger builder).
fn canonical(
    artifact: &ReductionArtifact,
    tau_x: &TruthAssignment,
    swap_tails: bool,
) -> Result<Partition> {
    let n = artifact.params().n();
    let m = artifact.params().m();
    let mut blocks: Vec<Vec<AgentId>> = Vec::new();
    for var in 0..n {
        let positive = artifact.expect_agent(AgentRole::XLit { var, negated: false });
        let negative = artifact.expect_agent(AgentRole::XLit { var, negated: true });
        let (with_t, with_f) = if tau_x.value(var) {
            (positive, negative)
        } else {
            (negative, positive)
        };
        blocks.push(alloc::vec![with_t, artifact.expect_agent(AgentRole::Xt { var })]);
        blocks.push(alloc::vec![with_f, artifact.expect_agent(AgentRole::Xf { var })]);
    }
    for var in 0..n {
        for negated in [false, true] {
            blocks.push(alloc::vec![
                artifact.expect_agent(AgentRole::YLit { var, negated }),
                artifact.expect_agent(AgentRole::YPrime { var, negated }),
            ]);
        }
    }
    let mut clause_block = Vec::with_capacity(2 * m - 1);
    for clause in 0..m {
        clause_block.push(artifact.expect_agent(AgentRole::CAgent { clause }));
    }
    for index in 0..m - 1 {
        clause_block.push(artifact.expect_agent(AgentRole::CPrime { index }));
    }
    blocks.push(clause_block);
    let tail_count = 2 * n + m;
    let mut first_tails: Vec<AgentId> = (0..tail_count)
        .map(|index| artifact.expect_agent(AgentRole::T1 { index }))
        .collect();
    let mut second_tails: Vec<AgentId> = (0..tail_count)
        .map(|index| artifact.expect_agent(AgentRole::T2 { index }))
        .collect();
    if swap_tails {
        core::mem::swap(&mut first_tails, &mut second_tails);
    }
    first_tails.push(artifact.expect_agent(AgentRole::B1));
    second_tails.push(artifact.expect_agent(AgentRole::B2));
    blocks.push(first_tails);
    blocks.push(second_tails);
    Partition::from_blocks(artifact.game().n_agents(), blocks)
}

pub(super) fn assignment_partition(
    artifact: &ReductionArtifact,
    tau_x: &TruthAssignment,
) -> Result<Partition> {
    canonical(artifact, tau_x, false)
}

pub(super) fn challenger_partition(
    artifact: &ReductionArtifact,
    base: &Partition,
    tau_y: &TruthAssignment,
) -> Result<Partition> {
    let n = artifact.params().n();
    let m = artifact.params().m();
    let tau_x = super::extract_assignment(artifact, base).ok_or_else(|| {
        Error::StructuralMismatch {
            detail: "partition does not pair every truth marker with a literal agent".into(),
        }
    })?;
    let b1_with_first_tails = if *base == canonical(artifact, &tau_x, false)? {
        true
    } else if *base == canonical(artifact, &tau_x, true)? {
        false
    } else {
        return Err(Error::StructuralMismatch {
            detail: "partition does not have the encoded-assignment block structure".into(),
        });
    };
    let mut extracted: Vec<AgentId> = Vec::with_capacity(2 * n + m + 1);
    extracted.push(artifact.expect_agent(AgentRole::B1));
    for var in 0..n {
        extracted.push(artifact.expect_agent(AgentRole::XLit {
            var,
            negated: !tau_x.value(var),
        }));
    }
    for var in 0..n {
        extracted.push(artifact.expect_agent(AgentRole::YLit {
            var,
            negated: !tau_y.value(var),
        }));
    }
    for clause in 0..m {
        extracted.push(artifact.expect_agent(AgentRole::CAgent { clause }));
    }
    let mut labels = extract_into_new_block(base, &extracted);
    let vacated_tail = if b1_with_first_tails {
        AgentRole::T1 { index: 0 }
    } else {
        AgentRole::T2 { index: 0 }
    };
    let tail_anchor = artifact.expect_agent(vacated_tail);
    let b2 = artifact.expect_agent(AgentRole::B2);
    labels[b2.index()] = labels[tail_anchor.index()];
    Partition::from_assignment(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::popularity::popularity_margin;
    use crate::qsat::{Clause, Literal};

    /// n=1, m=2; every clause contains a complementary Y-pair, so the
    /// formula is false under every assignment pair.
    fn contradictory_instance() -> QDnfInstance {
        let y1 = Literal::new(Side::Y, 0, false);
        let not_y1 = Literal::new(Side::Y, 0, true);
        let clauses = alloc::vec![
            Clause::new([Literal::new(Side::X, 0, false), y1, not_y1]).unwrap(),
            Clause::new([Literal::new(Side::X, 0, true), y1, not_y1]).unwrap(),
        ];
        QDnfInstance::new(1, clauses).unwrap()
    }

    #[test]
    fn single_clause_formulas_are_rejected() {
        let clause = Clause::new([
            Literal::new(Side::X, 0, false),
            Literal::new(Side::Y, 0, false),
            Literal::new(Side::Y, 0, true),
        ])
        .unwrap();
        let instance = QDnfInstance::new(1, alloc::vec![clause]).unwrap();
        assert!(matches!(
            reduce_ashg(&instance),
            Err(Error::ReductionPrecondition { .. })
        ));
    }

    #[test]
    fn census_and_sentinel_magnitude() {
        let artifact = reduce_ashg(&contradictory_instance()).unwrap();
        // n=1, m=2
        assert_eq!(artifact.game().n_agents(), 21);
        let count = |probe: fn(&AgentRole) -> bool| artifact.roles().iter().filter(|r| probe(r)).count();
        assert_eq!(count(|r| matches!(r, AgentRole::XLit { .. })), 2);
        assert_eq!(count(|r| matches!(r, AgentRole::Xt { .. })), 1);
        assert_eq!(count(|r| matches!(r, AgentRole::Xf { .. })), 1);
        assert_eq!(count(|r| matches!(r, AgentRole::YLit { .. })), 2);
        assert_eq!(count(|r| matches!(r, AgentRole::YPrime { .. })), 2);
        assert_eq!(count(|r| matches!(r, AgentRole::CAgent { .. })), 2);
        assert_eq!(count(|r| matches!(r, AgentRole::CPrime { .. })), 1);
        assert_eq!(count(|r| matches!(r, AgentRole::T1 { .. })), 4);
        assert_eq!(count(|r| matches!(r, AgentRole::T2 { .. })), 4);
        match artifact.params() {
            ReductionParams::Ashg { infinity, .. } => {
                assert_eq!(*infinity, Rational::from_integer(6 * 19));
            }
            _ => panic!("wrong params kind"),
        }
    }

    #[test]
    fn encoded_partition_hits_the_utility_anchors() {
        let artifact = reduce_ashg(&contradictory_instance()).unwrap();
        let tau_x = TruthAssignment::from_rank(Side::X, 1, 1);
        let partition = assignment_partition(&artifact, &tau_x).unwrap();
        assert_eq!(partition.block_count(), 4 * 1 + 3);
        let game = artifact.game();
        let utility = |role: AgentRole| {
            game.partition_utility(&partition, artifact.expect_agent(role))
                .unwrap()
        };
        // b1 sits with 2n+m tail agents valued 1 each; b2's tails count double.
        assert_eq!(utility(AgentRole::B1), Rational::from_integer(4));
        assert_eq!(utility(AgentRole::B2), Rational::from_integer(8));
        // A padding agent sees all m clause agents at value 1.
        assert_eq!(utility(AgentRole::CPrime { index: 0 }), Rational::from_integer(2));
        assert_eq!(utility(AgentRole::CAgent { clause: 0 }), Rational::zero());
        // x1 is true: its positive literal agent pairs with the truth marker.
        assert_eq!(
            utility(AgentRole::XLit { var: 0, negated: false }),
            Rational::new(1, 2)
        );
        assert_eq!(
            utility(AgentRole::XLit { var: 0, negated: true }),
            Rational::from_integer(4)
        );
        assert_eq!(utility(AgentRole::Xt { var: 0 }), Rational::from_integer(1));
        assert_eq!(
            utility(AgentRole::YLit { var: 0, negated: false }),
            Rational::new(1, 2)
        );
    }

    #[test]
    fn falsified_formula_makes_every_challenger_win_by_one() {
        let artifact = reduce_ashg(&contradictory_instance()).unwrap();
        for x_rank in 0..2 {
            let tau_x = TruthAssignment::from_rank(Side::X, 1, x_rank);
            let base = assignment_partition(&artifact, &tau_x).unwrap();
            for y_rank in 0..2 {
                let tau_y = TruthAssignment::from_rank(Side::Y, 1, y_rank);
                let challenger = challenger_partition(&artifact, &base, &tau_y).unwrap();
                let tally =
                    popularity_margin(artifact.game(), &base, &challenger, None).unwrap();
                assert_eq!(tally.margin, -1, "x rank {x_rank}, y rank {y_rank}");
            }
        }
    }

    #[test]
    fn swapped_tail_orientation_is_accepted_and_mirrored() {
        let artifact = reduce_ashg(&contradictory_instance()).unwrap();
        let tau_x = TruthAssignment::from_rank(Side::X, 1, 0);
        let mirrored = canonical(&artifact, &tau_x, true).unwrap();
        let tau_y = TruthAssignment::from_rank(Side::Y, 1, 1);
        let challenger = challenger_partition(&artifact, &mirrored, &tau_y).unwrap();
        let tally = popularity_margin(artifact.game(), &mirrored, &challenger, None).unwrap();
        assert_eq!(tally.margin, -1);
        // b2 must sit with the tails that held b1, i.e. the second group here.
        let b2 = artifact.expect_agent(AgentRole::B2);
        let t2 = artifact.expect_agent(AgentRole::T2 { index: 0 });
        assert!(challenger.together(b2, t2));
    }

    #[test]
    fn garbage_base_partitions_are_rejected() {
        let artifact = reduce_ashg(&contradictory_instance()).unwrap();
        let tau_y = TruthAssignment::from_rank(Side::Y, 1, 0);
        let singletons = Partition::singletons(artifact.game().n_agents());
        assert!(matches!(
            challenger_partition(&artifact, &singletons, &tau_y),
            Err(Error::StructuralMismatch { .. })
        ));
        // Right marker pairs but a perturbed tail: still rejected.
        let tau_x = TruthAssignment::from_rank(Side::X, 1, 0);
        let base = assignment_partition(&artifact, &tau_x).unwrap();
        let mut labels = base.assignment().to_vec();
        let t1 = artifact.expect_agent(AgentRole::T1 { index: 0 });
        labels[t1.index()] = base.block_count() as u32;
        let perturbed = Partition::from_assignment(&labels).unwrap();
        assert!(matches!(
            challenger_partition(&artifact, &perturbed, &tau_y),
            Err(Error::StructuralMismatch { .. })
        ));
    }

    #[test]
    fn assignment_round_trips_through_the_partition() {
        let artifact = reduce_ashg(&contradictory_instance()).unwrap();
        for rank in 0..2 {
            let tau_x = TruthAssignment::from_rank(Side::X, 1, rank);
            let partition = assignment_partition(&artifact, &tau_x).unwrap();
            assert_eq!(
                super::super::extract_assignment(&artifact, &partition),
                Some(tau_x)
            );
        }
        let singletons = Partition::singletons(artifact.game().n_agents());
        assert_eq!(super::super::extract_assignment(&artifact, &singletons), None);
    }
}
