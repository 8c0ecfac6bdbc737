//! Compilation of 3-DNF formulas into hedonic games whose popularity
//! behavior mirrors the formula's two-quantifier satisfiability.
//!
//! Two game families are produced: an additively separable construction
//! ([`reduce_ashg`]) and a fractional construction with nonnegative values
//! ([`reduce_fhg`]).  Both come with full bookkeeping of which agent plays
//! which structural role, a builder for the partition encoding an
//! X-assignment, and a builder for the challenger partition induced by a
//! Y-assignment.  The decisive property, exercised heavily by the tests: the
//! encoded partition loses to the challenger exactly when the assignment
//! pair falsifies the formula.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{AgentId, HedonicGame, Partition, Rational};
use crate::qsat::{QDnfInstance, Side, TruthAssignment};

pub mod ashg;
pub mod fhg;

pub use ashg::reduce_ashg;
pub use fhg::reduce_fhg;

/// The construction role an agent of a reduced game plays.
///
/// `var` indexes a variable, `negated` selects the literal over it;
/// `clause` indexes a clause.  The first group of variants appears in both
/// constructions, `CPrime`/`T1`/`T2`/`B1`/`B2` only in the additively
/// separable one, and the variants from `XfPrime` on only in the fractional
/// one.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum AgentRole {
    /// Literal agent for an X-variable.
    XLit { var: usize, negated: bool },
    /// Truth-marker agent of an X-variable.
    Xt { var: usize },
    /// False-marker agent of an X-variable.
    Xf { var: usize },
    /// Literal agent for a Y-variable.
    YLit { var: usize, negated: bool },
    /// Companion of one Y-literal agent.
    YPrime { var: usize, negated: bool },
    /// Clause agent.
    CAgent { clause: usize },
    /// Padding companion of the clause block (additively separable only).
    CPrime { index: usize },
    /// First tail group (additively separable only).
    T1 { index: usize },
    /// Second tail group (additively separable only).
    T2 { index: usize },
    /// First anchor agent (additively separable only).
    B1,
    /// Second anchor agent (additively separable only).
    B2,
    /// Second false-marker of an X-variable (fractional only).
    XfPrime { var: usize },
    /// Second companion of one Y-literal agent (fractional only).
    YDoublePrime { var: usize, negated: bool },
    /// Star center of a clause (fractional only).
    R { clause: usize },
    /// Star leaf `leaf` (1 through 6) of a clause (fractional only).
    Leaf { clause: usize, leaf: usize },
    /// Joiner agent (fractional only).
    J,
    /// First companion of the joiner (fractional only).
    JPrime,
    /// Second companion of the joiner (fractional only).
    JDoublePrime,
}

impl fmt::Display for AgentRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AgentRole::XLit { var, negated } => {
                write!(f, "{}x{}", if negated { "~" } else { "" }, var + 1)
            }
            AgentRole::Xt { var } => write!(f, "x{}_t", var + 1),
            AgentRole::Xf { var } => write!(f, "x{}_f", var + 1),
            AgentRole::XfPrime { var } => write!(f, "x{}_f'", var + 1),
            AgentRole::YLit { var, negated } => {
                write!(f, "{}y{}", if negated { "~" } else { "" }, var + 1)
            }
            AgentRole::YPrime { var, negated } => {
                write!(f, "{}y{}'", if negated { "~" } else { "" }, var + 1)
            }
            AgentRole::YDoublePrime { var, negated } => {
                write!(f, "{}y{}''", if negated { "~" } else { "" }, var + 1)
            }
            AgentRole::CAgent { clause } => write!(f, "c{}", clause + 1),
            AgentRole::CPrime { index } => write!(f, "c{}'", index + 1),
            AgentRole::T1 { index } => write!(f, "t1_{}", index + 1),
            AgentRole::T2 { index } => write!(f, "t2_{}", index + 1),
            AgentRole::B1 => write!(f, "b1"),
            AgentRole::B2 => write!(f, "b2"),
            AgentRole::R { clause } => write!(f, "r{}", clause + 1),
            AgentRole::Leaf { clause, leaf } => write!(f, "l{}_{}", clause + 1, leaf),
            AgentRole::J => write!(f, "j"),
            AgentRole::JPrime => write!(f, "j'"),
            AgentRole::JDoublePrime => write!(f, "j''"),
        }
    }
}

/// The numeric parameters a reduction was built with.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ReductionParams {
    Ashg {
        n: usize,
        m: usize,
        /// Magnitude of the large negative sentinel value.
        infinity: Rational,
    },
    Fhg {
        n: usize,
        m: usize,
        v_x: Rational,
        v_c: Rational,
        v_j: Rational,
    },
}

impl ReductionParams {
    /// Variables per formula group.
    pub fn n(&self) -> usize {
        match *self {
            ReductionParams::Ashg { n, .. } | ReductionParams::Fhg { n, .. } => n,
        }
    }

    /// Clause count.
    pub fn m(&self) -> usize {
        match *self {
            ReductionParams::Ashg { m, .. } | ReductionParams::Fhg { m, .. } => m,
        }
    }
}

/// A reduced game, the formula it came from, and the agent/role bijection
/// (`roles()[i]` is the role of agent `i`).
#[derive(Clone, Debug)]
pub struct ReductionArtifact {
    game: HedonicGame,
    instance: QDnfInstance,
    roles: Vec<AgentRole>,
    params: ReductionParams,
}

impl ReductionArtifact {
    pub fn game(&self) -> &HedonicGame {
        &self.game
    }

    pub fn instance(&self) -> &QDnfInstance {
        &self.instance
    }

    pub fn roles(&self) -> &[AgentRole] {
        &self.roles
    }

    pub fn params(&self) -> &ReductionParams {
        &self.params
    }

    pub fn role_of(&self, agent: AgentId) -> AgentRole {
        self.roles[agent.index()]
    }

    /// The agent carrying `role`; the role map is a bijection, so this is
    /// unique when present.
    pub fn agent_with_role(&self, role: AgentRole) -> Option<AgentId> {
        self.roles
            .iter()
            .position(|&candidate| candidate == role)
            .map(|index| AgentId(index as u32))
    }

    fn expect_agent(&self, role: AgentRole) -> AgentId {
        self.agent_with_role(role)
            .expect("constructions register every role they reference")
    }
}

/// The partition that encodes `tau_x`: marker pairs oriented by the
/// assignment, companion blocks for the Y- and clause-side agents, and the
/// structural blocks of the respective construction.
pub fn assignment_partition(
    artifact: &ReductionArtifact,
    tau_x: &TruthAssignment,
) -> Result<Partition> {
    check_assignment_shape(artifact, tau_x, Side::X)?;
    match artifact.params() {
        ReductionParams::Ashg { .. } => ashg::assignment_partition(artifact, tau_x),
        ReductionParams::Fhg { .. } => fhg::assignment_partition(artifact, tau_x),
    }
}

/// The challenger induced by `tau_y` against `base`, which must have the
/// exact shape produced by [`assignment_partition`] (any orientation).
///
/// A coalition `S` is formed from the anchor agent (`b1` or `j`), the
/// X-literal agents paired with a truth marker in `base`, the Y-literal
/// agents true under `tau_y`, and all clause agents; the remaining blocks
/// are inherited minus the extracted members.
pub fn challenger_partition(
    artifact: &ReductionArtifact,
    base: &Partition,
    tau_y: &TruthAssignment,
) -> Result<Partition> {
    check_assignment_shape(artifact, tau_y, Side::Y)?;
    if base.n_agents() != artifact.game().n_agents() {
        return Err(Error::PartitionSizeMismatch {
            partition: base.n_agents(),
            game: artifact.game().n_agents(),
        });
    }
    match artifact.params() {
        ReductionParams::Ashg { .. } => ashg::challenger_partition(artifact, base, tau_y),
        ReductionParams::Fhg { .. } => fhg::challenger_partition(artifact, base, tau_y),
    }
}

/// Reads an X-assignment back out of a partition: variable `x` is true
/// exactly when its positive literal agent forms a pair with the truth
/// marker `x_t`.  Returns `None` when some variable has no such pair in
/// either orientation.
pub fn extract_assignment(
    artifact: &ReductionArtifact,
    partition: &Partition,
) -> Option<TruthAssignment> {
    if partition.n_agents() != artifact.game().n_agents() {
        return None;
    }
    let n = artifact.params().n();
    let mut bits = Vec::with_capacity(n);
    for var in 0..n {
        let marker = artifact.expect_agent(AgentRole::Xt { var });
        let positive = artifact.expect_agent(AgentRole::XLit { var, negated: false });
        let negative = artifact.expect_agent(AgentRole::XLit { var, negated: true });
        let block = partition.block_of(marker);
        if block.len() != 2 {
            return None;
        }
        if block.contains(&positive) {
            bits.push(true);
        } else if block.contains(&negative) {
            bits.push(false);
        } else {
            return None;
        }
    }
    Some(TruthAssignment::new(Side::X, bits))
}

fn check_assignment_shape(
    artifact: &ReductionArtifact,
    assignment: &TruthAssignment,
    expected: Side,
) -> Result<()> {
    if assignment.side() != expected {
        return Err(Error::AssignmentMismatch {
            detail: format!(
                "expected an assignment to the {} group",
                match expected {
                    Side::X => "X",
                    Side::Y => "Y",
                }
            ),
        });
    }
    if assignment.len() != artifact.params().n() {
        return Err(Error::AssignmentMismatch {
            detail: format!(
                "assignment covers {} variables, reduction was built for {}",
                assignment.len(),
                artifact.params().n()
            ),
        });
    }
    Ok(())
}

/// Shared helper: whether the clause at `clause` contains the given signed
/// literal.
pub(crate) fn clause_contains(
    instance: &QDnfInstance,
    clause: usize,
    side: Side,
    var: usize,
    negated: bool,
) -> bool {
    instance.clauses()[clause]
        .literals()
        .iter()
        .any(|literal| literal.side == side && literal.var == var && literal.negated == negated)
}

/// Shared helper for the challenger builders: the indices of `base`'s
/// blocks, with the members of `extracted` removed, `extracted` appended as
/// one new block, and a follow-up relocation applied by the caller through
/// the returned label vector.
pub(crate) fn extract_into_new_block(base: &Partition, extracted: &[AgentId]) -> Vec<u32> {
    let mut labels: Vec<u32> = base.assignment().to_vec();
    let fresh = base.block_count() as u32;
    for &agent in extracted {
        labels[agent.index()] = fresh;
    }
    labels
}
