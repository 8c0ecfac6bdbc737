//! The fractional construction.
//!
//! Agent layout, in index order: the two literal agents of each X-variable
//! (positive first), the truth markers `x_t`, the false markers `x_f`, the
//! companion false markers `x_f'`, the two literal agents of each
//! Y-variable, their first companions, their second companions, the clause
//! agents, the star centers, the six star leaves of each clause, and
//! finally `j`, `j'`, `j''` — `11n+8m+3` agents in total.
//!
//! All values are nonnegative; unspecified pairs default to zero.

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
    let mut roles = Vec::with_capacity(11 * n + 8 * m + 3);
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
        roles.push(AgentRole::XfPrime { var });
    }
    for var in 0..n {
        roles.push(AgentRole::YLit { var, negated: false });
        roles.push(AgentRole::YLit { var, negated: true });
    }
    for var in 0..n {
        roles.push(AgentRole::YPrime { var, negated: false });
        roles.push(AgentRole::YPrime { var, negated: true });
    }
    for var in 0..n {
        roles.push(AgentRole::YDoublePrime { var, negated: false });
        roles.push(AgentRole::YDoublePrime { var, negated: true });
    }
    for clause in 0..m {
        roles.push(AgentRole::CAgent { clause });
    }
    for clause in 0..m {
        roles.push(AgentRole::R { clause });
    }
    for clause in 0..m {
        for leaf in 1..=6 {
            roles.push(AgentRole::Leaf { clause, leaf });
        }
    }
    roles.push(AgentRole::J);
    roles.push(AgentRole::JPrime);
    roles.push(AgentRole::JDoublePrime);
    roles
}

/// The value the row role assigns to the (distinct) column role.
fn value(
    instance: &QDnfInstance,
    v_x: &Rational,
    v_c: &Rational,
    v_j: &Rational,
    from: AgentRole,
    to: AgentRole,
) -> Rational {
    use AgentRole::*;
    let int = Rational::from_integer;
    let zero = Rational::zero();
    match from {
        XLit { var, .. } => match to {
            XLit { var: w, .. } => {
                if w == var {
                    zero
                } else {
                    int(1)
                }
            }
            YLit { .. } | CAgent { .. } => int(1),
            J => int(2),
            Xt { var: w } => {
                if w == var {
                    v_x.clone()
                } else {
                    zero
                }
            }
            Xf { var: w } | XfPrime { var: w } => {
                if w == var {
                    v_x * Rational::new(9, 10)
                } else {
                    zero
                }
            }
            _ => zero,
        },
        YLit { var, negated } => match to {
            XLit { .. } | CAgent { .. } => int(1),
            YLit { var: w, .. } => {
                if w == var {
                    zero
                } else {
                    int(1)
                }
            }
            J => int(2),
            YPrime { var: w, negated: g } | YDoublePrime { var: w, negated: g } => {
                if (w, g) == (var, negated) {
                    Rational::new(3, 2)
                } else {
                    zero
                }
            }
            _ => zero,
        },
        CAgent { clause } => match to {
            XLit { var, negated } => {
                if clause_contains(instance, clause, Side::X, var, negated) {
                    zero
                } else {
                    v_c.clone()
                }
            }
            YLit { var, negated } => {
                if clause_contains(instance, clause, Side::Y, var, negated) {
                    zero
                } else {
                    v_c.clone()
                }
            }
            CAgent { .. } | J => int(1),
            Leaf { clause: d, leaf: 6 } if d == clause => int(2),
            _ => zero,
        },
        J => match to {
            XLit { .. } | YLit { .. } | CAgent { .. } => int(1),
            JPrime | JDoublePrime => v_j.clone(),
            _ => zero,
        },
        JPrime => match to {
            J => int(1),
            JDoublePrime => int(2),
            _ => zero,
        },
        JDoublePrime => match to {
            J => int(1),
            JPrime => int(2),
            _ => zero,
        },
        Xt { var } => match to {
            XLit { var: w, .. } if w == var => int(1),
            _ => zero,
        },
        Xf { var } => match to {
            XLit { var: w, .. } if w == var => int(1),
            XfPrime { var: w } if w == var => int(1),
            _ => zero,
        },
        XfPrime { var } => match to {
            XLit { var: w, .. } if w == var => int(1),
            Xf { var: w } if w == var => int(1),
            _ => zero,
        },
        YPrime { var, negated } => match to {
            YLit { var: w, negated: g } if (w, g) == (var, negated) => int(1),
            YDoublePrime { var: w, negated: g } if (w, g) == (var, negated) => int(2),
            _ => zero,
        },
        YDoublePrime { var, negated } => match to {
            YLit { var: w, negated: g } if (w, g) == (var, negated) => int(1),
            YPrime { var: w, negated: g } if (w, g) == (var, negated) => int(2),
            _ => zero,
        },
        Leaf { clause, leaf } => match to {
            R { clause: d } if d == clause => int(1),
            CAgent { clause: d } if d == clause && leaf == 6 => Rational::new(3, 4),
            _ => zero,
        },
        R { clause } => match to {
            Leaf { clause: d, .. } if d == clause => int(1),
            _ => zero,
        },
        CPrime { .. } | T1 { .. } | T2 { .. } | B1 | B2 => {
            unreachable!("additively-separable-only role in the fractional layout")
        }
    }
}

/// Compiles a formula into the fractional game.
pub fn reduce_fhg(instance: &QDnfInstance) -> Result<ReductionArtifact> {
    let n = instance.n_vars();
    let m = instance.clause_count();
    if n < 2 || m < 2 {
        return Err(Error::ReductionPrecondition {
            detail: format!(
                "the fractional construction needs at least two variables per side and two \
                 clauses, got n={n}, m={m}"
            ),
        });
    }
    let ni = n as i128;
    let mi = m as i128;
    let v_x = Rational::new(2 * (4 * ni + mi + 1), 4 * ni + mi + 2);
    let v_c = Rational::new(4 * ni + 2, 4 * ni - 5);
    let v_j = Rational::new(3 * (2 * ni + mi - 1), 2 * (2 * ni + mi));
    let roles = layout(n, m);
    let game = HedonicGame::from_fn(GameKind::Fractional, roles.len(), |i, j| {
        value(instance, &v_x, &v_c, &v_j, roles[i as usize], roles[j as usize])
    })?;
    Ok(ReductionArtifact {
        game,
        instance: instance.clone(),
        roles,
        params: ReductionParams::Fhg { n, m, v_x, v_c, v_j },
    })
}

/// The encoded-assignment partition for the fractional construction.
fn canonical(artifact: &ReductionArtifact, tau_x: &TruthAssignment) -> Result<Partition> {
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
        blocks.push(alloc::vec![
            with_f,
            artifact.expect_agent(AgentRole::Xf { var }),
            artifact.expect_agent(AgentRole::XfPrime { var }),
        ]);
    }
    for var in 0..n {
        for negated in [false, true] {
            blocks.push(alloc::vec![
                artifact.expect_agent(AgentRole::YLit { var, negated }),
                artifact.expect_agent(AgentRole::YPrime { var, negated }),
                artifact.expect_agent(AgentRole::YDoublePrime { var, negated }),
            ]);
        }
    }
    for clause in 0..m {
        blocks.push(alloc::vec![
            artifact.expect_agent(AgentRole::CAgent { clause }),
            artifact.expect_agent(AgentRole::Leaf { clause, leaf: 6 }),
        ]);
        blocks.push(alloc::vec![
            artifact.expect_agent(AgentRole::R { clause }),
            artifact.expect_agent(AgentRole::Leaf { clause, leaf: 1 }),
            artifact.expect_agent(AgentRole::Leaf { clause, leaf: 2 }),
            artifact.expect_agent(AgentRole::Leaf { clause, leaf: 3 }),
        ]);
        blocks.push(alloc::vec![artifact.expect_agent(AgentRole::Leaf { clause, leaf: 4 })]);
        blocks.push(alloc::vec![artifact.expect_agent(AgentRole::Leaf { clause, leaf: 5 })]);
    }
    blocks.push(alloc::vec![
        artifact.expect_agent(AgentRole::J),
        artifact.expect_agent(AgentRole::JPrime),
        artifact.expect_agent(AgentRole::JDoublePrime),
    ]);
    Partition::from_blocks(artifact.game().n_agents(), blocks)
}

pub(super) fn assignment_partition(
    artifact: &ReductionArtifact,
    tau_x: &TruthAssignment,
) -> Result<Partition> {
    canonical(artifact, tau_x)
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
    if *base != canonical(artifact, &tau_x)? {
        return Err(Error::StructuralMismatch {
            detail: "partition does not have the encoded-assignment block structure".into(),
        });
    }
    let mut extracted: Vec<AgentId> = Vec::with_capacity(2 * n + m + 1);
    extracted.push(artifact.expect_agent(AgentRole::J));
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
    let labels = extract_into_new_block(base, &extracted);
    Partition::from_assignment(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::popularity::popularity_margin;
    use crate::qsat::{Clause, Literal};

    /// n=2, m=2; certified by x = (T,T): the two clauses split on y1, so
    /// exactly one fires under every Y-assignment.
    fn covering_instance() -> QDnfInstance {
        let x1 = Literal::new(Side::X, 0, false);
        let x2 = Literal::new(Side::X, 1, false);
        QDnfInstance::new(
            2,
            alloc::vec![
                Clause::new([x1, x2, Literal::new(Side::Y, 0, false)]).unwrap(),
                Clause::new([x1, x2, Literal::new(Side::Y, 0, true)]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn small_formulas_are_rejected() {
        let clause = Clause::new([
            Literal::new(Side::X, 0, false),
            Literal::new(Side::Y, 0, false),
            Literal::new(Side::Y, 0, true),
        ])
        .unwrap();
        let one_var = QDnfInstance::new(1, alloc::vec![clause.clone(), clause.clone()]).unwrap();
        assert!(matches!(
            reduce_fhg(&one_var),
            Err(Error::ReductionPrecondition { .. })
        ));
        let one_clause = QDnfInstance::new(
            2,
            alloc::vec![Clause::new([
                Literal::new(Side::X, 0, false),
                Literal::new(Side::X, 1, false),
                Literal::new(Side::Y, 0, false),
            ])
            .unwrap()],
        )
        .unwrap();
        assert!(matches!(
            reduce_fhg(&one_clause),
            Err(Error::ReductionPrecondition { .. })
        ));
    }

    #[test]
    fn census_parameters_and_nonnegativity() {
        let artifact = reduce_fhg(&covering_instance()).unwrap();
        // n=2, m=2
        assert_eq!(artifact.game().n_agents(), 41);
        let count = |probe: fn(&AgentRole) -> bool| artifact.roles().iter().filter(|r| probe(r)).count();
        assert_eq!(count(|r| matches!(r, AgentRole::XLit { .. })), 4);
        assert_eq!(count(|r| matches!(r, AgentRole::Xt { .. })), 2);
        assert_eq!(count(|r| matches!(r, AgentRole::Xf { .. })), 2);
        assert_eq!(count(|r| matches!(r, AgentRole::XfPrime { .. })), 2);
        assert_eq!(count(|r| matches!(r, AgentRole::YLit { .. })), 4);
        assert_eq!(count(|r| matches!(r, AgentRole::YPrime { .. })), 4);
        assert_eq!(count(|r| matches!(r, AgentRole::YDoublePrime { .. })), 4);
        assert_eq!(count(|r| matches!(r, AgentRole::CAgent { .. })), 2);
        assert_eq!(count(|r| matches!(r, AgentRole::R { .. })), 2);
        assert_eq!(count(|r| matches!(r, AgentRole::Leaf { .. })), 12);
        match artifact.params() {
            ReductionParams::Fhg { v_x, v_c, v_j, .. } => {
                assert_eq!(*v_x, Rational::new(11, 6));
                assert_eq!(*v_c, Rational::new(10, 3));
                assert_eq!(*v_j, Rational::new(5, 4));
            }
            _ => panic!("wrong params kind"),
        }
        let n = artifact.game().n_agents() as u32;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    assert!(
                        *artifact.game().value(AgentId(i), AgentId(j)) >= Rational::zero(),
                        "negative value from {i} to {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn encoded_partition_hits_the_utility_anchors() {
        let artifact = reduce_fhg(&covering_instance()).unwrap();
        let tau_x = TruthAssignment::from_rank(Side::X, 2, 3);
        let partition = assignment_partition(&artifact, &tau_x).unwrap();
        assert_eq!(partition.block_count(), 4 * 2 + 4 * 2 + 1);
        let game = artifact.game();
        let utility = |role: AgentRole| {
            game.partition_utility(&partition, artifact.expect_agent(role))
                .unwrap()
        };
        // j averages its two companions: (2n+m-1)/(2n+m) = 5/6 here.
        assert_eq!(utility(AgentRole::J), Rational::new(5, 6));
        assert_eq!(utility(AgentRole::CAgent { clause: 0 }), Rational::from_integer(1));
        assert_eq!(utility(AgentRole::Leaf { clause: 0, leaf: 6 }), Rational::new(3, 8));
        assert_eq!(utility(AgentRole::R { clause: 0 }), Rational::new(3, 4));
        assert_eq!(utility(AgentRole::Leaf { clause: 0, leaf: 1 }), Rational::new(1, 4));
        assert_eq!(utility(AgentRole::Leaf { clause: 0, leaf: 4 }), Rational::zero());
        assert_eq!(
            utility(AgentRole::YLit { var: 0, negated: false }),
            Rational::from_integer(1)
        );
        assert_eq!(
            utility(AgentRole::YPrime { var: 0, negated: true }),
            Rational::from_integer(1)
        );
        // x1 true: its positive literal agent pairs with the truth marker.
        assert_eq!(
            utility(AgentRole::XLit { var: 0, negated: false }),
            Rational::new(11, 12)
        );
        assert_eq!(utility(AgentRole::Xt { var: 0 }), Rational::new(1, 2));
        assert_eq!(utility(AgentRole::Xf { var: 0 }), Rational::new(2, 3));
    }

    #[test]
    fn challenger_margin_tracks_satisfied_clauses() {
        let artifact = reduce_fhg(&covering_instance()).unwrap();
        let instance = covering_instance();
        for x_rank in 0..4u64 {
            let tau_x = TruthAssignment::from_rank(Side::X, 2, x_rank);
            let base = assignment_partition(&artifact, &tau_x).unwrap();
            for y_rank in 0..4u64 {
                let tau_y = TruthAssignment::from_rank(Side::Y, 2, y_rank);
                let challenger = challenger_partition(&artifact, &base, &tau_y).unwrap();
                let tally =
                    popularity_margin(artifact.game(), &base, &challenger, None).unwrap();
                let satisfied = instance
                    .clauses()
                    .iter()
                    .filter(|clause| {
                        clause.literals().iter().all(|lit| {
                            let bit = match lit.side {
                                Side::X => tau_x.value(lit.var),
                                Side::Y => tau_y.value(lit.var),
                            };
                            bit != lit.negated
                        })
                    })
                    .count() as i64;
                assert_eq!(
                    tally.margin,
                    2 * satisfied - 1,
                    "x rank {x_rank}, y rank {y_rank}"
                );
            }
        }
    }

    #[test]
    fn garbage_base_partitions_are_rejected() {
        let artifact = reduce_fhg(&covering_instance()).unwrap();
        let tau_y = TruthAssignment::from_rank(Side::Y, 2, 0);
        let grand = Partition::grand(artifact.game().n_agents());
        assert!(matches!(
            challenger_partition(&artifact, &grand, &tau_y),
            Err(Error::StructuralMismatch { .. })
        ));
        let tau_x = TruthAssignment::from_rank(Side::X, 2, 0);
        let base = assignment_partition(&artifact, &tau_x).unwrap();
        let mut labels = base.assignment().to_vec();
        let leaf = artifact.expect_agent(AgentRole::Leaf { clause: 0, leaf: 1 });
        labels[leaf.index()] = base.block_count() as u32;
        let perturbed = Partition::from_assignment(&labels).unwrap();
        assert!(matches!(
            challenger_partition(&artifact, &perturbed, &tau_y),
            Err(Error::StructuralMismatch { .. })
        ));
    }

    #[test]
    fn assignment_round_trips_through_the_partition() {
        let artifact = reduce_fhg(&covering_instance()).unwrap();
        for rank in 0..4 {
            let tau_x = TruthAssignment::from_rank(Side::X, 2, rank);
            let partition = assignment_partition(&artifact, &tau_x).unwrap();
            assert_eq!(
                super::super::extract_assignment(&artifact, &partition),
                Some(tau_x)
            );
        }
    }
}
