//! Error type shared by all core operations.

use alloc::string::String;
use core::fmt;

/// Errors reported by game construction, partition handling and the search
/// routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An agent index is not smaller than the game's agent count.
    AgentOutOfRange { agent: u32, n_agents: usize },
    /// A utility was requested for an agent outside the given coalition.
    AgentNotInCoalition { agent: u32 },
    /// Coalitions must contain at least one agent.
    EmptyCoalition,
    /// The blocks handed to a partition constructor do not partition
    /// `0..n_agents` (an agent is missing, repeated or out of range).
    NotAPartition { detail: String },
    /// A partition belongs to a game with a different agent count.
    PartitionSizeMismatch { partition: usize, game: usize },
    /// A valuation matrix was rejected (wrong length or nonzero diagonal).
    MalformedMatrix { detail: String },
    /// An exhaustive operation was asked to enumerate partitions of more
    /// agents than the configured limit allows.
    EnumerationLimitExceeded { n_agents: usize, limit: usize },
    /// The brute-force satisfiability solver was given more variables per
    /// block than the configured limit allows.
    QsatLimitExceeded { n: usize, limit: usize },
    /// A quantified formula failed validation (bad literal, clause shape or
    /// clause count).
    MalformedFormula { detail: String },
    /// A truth assignment does not fit the expected variable block or length.
    AssignmentMismatch { detail: String },
    /// A reduction precondition does not hold for the given instance.
    ReductionPrecondition { detail: String },
    /// A partition handed to a reduction helper does not have the shape the
    /// construction produces.
    StructuralMismatch { detail: String },
    /// A generic invalid argument (zero-sized gadget, bad subset, ...).
    InvalidArgument { detail: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::AgentOutOfRange { agent, n_agents } => {
                write!(f, "agent {agent} out of range for {n_agents} agents")
            }
            Error::AgentNotInCoalition { agent } => {
                write!(f, "agent {agent} is not a member of the coalition")
            }
            Error::EmptyCoalition => write!(f, "coalitions must be nonempty"),
            Error::NotAPartition { detail } => write!(f, "not a partition: {detail}"),
            Error::PartitionSizeMismatch { partition, game } => write!(
                f,
                "partition covers {partition} agents but the game has {game}"
            ),
            Error::MalformedMatrix { detail } => write!(f, "malformed valuation matrix: {detail}"),
            Error::EnumerationLimitExceeded { n_agents, limit } => write!(
                f,
                "exhaustive enumeration over {n_agents} agents exceeds the limit of {limit}"
            ),
            Error::QsatLimitExceeded { n, limit } => write!(
                f,
                "brute-force solving with {n} variables per block exceeds the limit of {limit}"
            ),
            Error::MalformedFormula { detail } => write!(f, "malformed formula: {detail}"),
            Error::AssignmentMismatch { detail } => write!(f, "assignment mismatch: {detail}"),
            Error::ReductionPrecondition { detail } => {
                write!(f, "reduction precondition violated: {detail}")
            }
            Error::StructuralMismatch { detail } => write!(f, "structural mismatch: {detail}"),
            Error::InvalidArgument { detail } => write!(f, "invalid argument: {detail}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
