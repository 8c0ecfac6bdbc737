//! Agents, games, coalitions and partitions.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};

/// Exact rational number used for all valuations and utilities.
///
/// `i128` components keep every quantity that appears here (values, utility
/// sums, cross-multiplied comparisons) far away from overflow while staying
/// `Copy`; overflow still traps rather than wrapping because the workspace
/// builds with overflow checks.
pub type Rational = num_rational::Ratio<i128>;

/// Dense agent identifier; agents of an `n`-agent game are `0..n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for AgentId {
    fn from(raw: u32) -> Self {
        AgentId(raw)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How a coalition's member derives utility from the values she assigns.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum GameKind {
    /// Utility is the sum of values assigned to coalition mates.
    AdditivelySeparable,
    /// Utility is that sum divided by the coalition size.
    Fractional,
}

/// Outcome of comparing one agent's utility under two partitions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Preference {
    PrefersA,
    PrefersB,
    Indifferent,
}

/// A cardinal hedonic game: a dense valuation matrix plus a utility model.
///
/// `values[i * n + j]` is the value agent `i` assigns to agent `j`; diagonal
/// entries are identically zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HedonicGame {
    kind: GameKind,
    n_agents: usize,
    values: Vec<Rational>,
}

impl HedonicGame {
    /// Builds a game from a row-major `n_agents * n_agents` matrix.
    pub fn new(kind: GameKind, n_agents: usize, values: Vec<Rational>) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::MalformedMatrix {
                detail: "games need at least one agent".into(),
            });
        }
        if values.len() != n_agents * n_agents {
            return Err(Error::MalformedMatrix {
                detail: format!(
                    "expected {} entries for {} agents, got {}",
                    n_agents * n_agents,
                    n_agents,
                    values.len()
                ),
            });
        }
        for i in 0..n_agents {
            if !values[i * n_agents + i].is_zero() {
                return Err(Error::MalformedMatrix {
                    detail: format!("diagonal entry for agent {i} must be zero"),
                });
            }
        }
        Ok(HedonicGame {
            kind,
            n_agents,
            values,
        })
    }

    /// Builds a game by evaluating `value(i, j)` for every ordered pair of
    /// distinct agents; the diagonal is fixed at zero.
    pub fn from_fn(
        kind: GameKind,
        n_agents: usize,
        mut value: impl FnMut(u32, u32) -> Rational,
    ) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::MalformedMatrix {
                detail: "games need at least one agent".into(),
            });
        }
        let mut values = Vec::with_capacity(n_agents * n_agents);
        for i in 0..n_agents as u32 {
            for j in 0..n_agents as u32 {
                if i == j {
                    values.push(Rational::zero());
                } else {
                    values.push(value(i, j));
                }
            }
        }
        Ok(HedonicGame {
            kind,
            n_agents,
            values,
        })
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    /// The value agent `i` assigns to agent `j`.  Panics if either index is
    /// out of range.
    pub fn value(&self, i: AgentId, j: AgentId) -> &Rational {
        &self.values[i.index() * self.n_agents + j.index()]
    }

    pub(crate) fn value_at(&self, i: usize, j: usize) -> &Rational {
        &self.values[i * self.n_agents + j]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    fn check_agent(&self, agent: AgentId) -> Result<()> {
        if agent.index() >= self.n_agents {
            return Err(Error::AgentOutOfRange {
                agent: agent.0,
                n_agents: self.n_agents,
            });
        }
        Ok(())
    }

    /// Utility of `agent` inside `coalition`; the agent must be a member.
    pub fn coalition_utility(&self, coalition: &Coalition, agent: AgentId) -> Result<Rational> {
        self.check_agent(agent)?;
        if !coalition.contains(agent) {
            return Err(Error::AgentNotInCoalition { agent: agent.0 });
        }
        for &member in coalition.members() {
            self.check_agent(member)?;
        }
        Ok(self.utility_among(coalition.members(), agent))
    }

    /// Utility of `agent` in her block of `partition`.
    pub fn partition_utility(&self, partition: &Partition, agent: AgentId) -> Result<Rational> {
        if partition.n_agents() != self.n_agents {
            return Err(Error::PartitionSizeMismatch {
                partition: partition.n_agents(),
                game: self.n_agents,
            });
        }
        self.check_agent(agent)?;
        Ok(self.utility_among(partition.block_of(agent), agent))
    }

    /// Which of two partitions the agent strictly prefers, if either.
    pub fn compare(
        &self,
        partition_a: &Partition,
        partition_b: &Partition,
        agent: AgentId,
    ) -> Result<Preference> {
        let ua = self.partition_utility(partition_a, agent)?;
        let ub = self.partition_utility(partition_b, agent)?;
        Ok(match ua.cmp(&ub) {
            Ordering::Greater => Preference::PrefersA,
            Ordering::Less => Preference::PrefersB,
            Ordering::Equal => Preference::Indifferent,
        })
    }

    /// Utility over a member slice assumed to contain `agent`.
    pub(crate) fn utility_among(&self, members: &[AgentId], agent: AgentId) -> Rational {
        let mut sum = Rational::zero();
        for &member in members {
            if member != agent {
                sum += self.value(agent, member);
            }
        }
        match self.kind {
            GameKind::AdditivelySeparable => sum,
            GameKind::Fractional => sum / Rational::from_integer(members.len() as i128),
        }
    }
}

/// A nonempty set of agents, stored sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Coalition {
    members: Vec<AgentId>,
}

impl Coalition {
    pub fn new(members: impl IntoIterator<Item = AgentId>) -> Result<Self> {
        let mut members: Vec<AgentId> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        Ok(Coalition { members })
    }

    pub fn members(&self) -> &[AgentId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, agent: AgentId) -> bool {
        self.members.binary_search(&agent).is_ok()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, member) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{member}")?;
        }
        Ok(())
    }
}

/// A partition of the agents `0..n` into disjoint nonempty blocks.
///
/// The stored form is canonical: members inside a block ascend, blocks are
/// ordered by their smallest member, and `assignment[i]` (the block index of
/// agent `i`) is then a restricted-growth string.  Equality and ordering act
/// on the canonical form, so the derived order coincides with the order in
/// which [`crate::enumeration::enumerate_partitions`] yields partitions.
#[derive(Clone, Debug)]
pub struct Partition {
    blocks: Vec<Vec<AgentId>>,
    assignment: Vec<u32>,
}

impl Partition {
    /// Builds and canonicalizes a partition of `0..n_agents` from blocks.
    pub fn from_blocks<B, I>(n_agents: usize, blocks: B) -> Result<Self>
    where
        B: IntoIterator<Item = I>,
        I: IntoIterator<Item = AgentId>,
    {
        let mut seen: Vec<bool> = alloc::vec![false; n_agents];
        let mut collected: Vec<Vec<AgentId>> = Vec::new();
        for block in blocks {
            let mut block: Vec<AgentId> = block.into_iter().collect();
            if block.is_empty() {
                return Err(Error::NotAPartition {
                    detail: "blocks must be nonempty".into(),
                });
            }
            block.sort_unstable();
            for &agent in &block {
                if agent.index() >= n_agents {
                    return Err(Error::NotAPartition {
                        detail: format!("agent {agent} out of range for {n_agents} agents"),
                    });
                }
                if seen[agent.index()] {
                    return Err(Error::NotAPartition {
                        detail: format!("agent {agent} appears in more than one block"),
                    });
                }
                seen[agent.index()] = true;
            }
            collected.push(block);
        }
        if let Some(missing) = seen.iter().position(|covered| !covered) {
            return Err(Error::NotAPartition {
                detail: format!("agent {missing} is not covered by any block"),
            });
        }
        collected.sort_unstable_by_key(|block| block[0]);
        let mut assignment = alloc::vec![0u32; n_agents];
        for (index, block) in collected.iter().enumerate() {
            for &agent in block {
                assignment[agent.index()] = index as u32;
            }
        }
        Ok(Partition {
            blocks: collected,
            assignment,
        })
    }

    /// Builds a partition from arbitrary per-agent block labels; agents with
    /// equal labels share a block.
    pub fn from_assignment(labels: &[u32]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::NotAPartition {
                detail: "partitions need at least one agent".into(),
            });
        }
        let mut canonical: Vec<u32> = Vec::with_capacity(labels.len());
        let mut names: Vec<u32> = Vec::new();
        for &label in labels {
            let index = match names.iter().position(|&seen| seen == label) {
                Some(index) => index,
                None => {
                    names.push(label);
                    names.len() - 1
                }
            };
            canonical.push(index as u32);
        }
        Ok(Self::from_rgs_unchecked(&canonical))
    }

    /// Trusts `rgs` to already be a restricted-growth string.
    pub(crate) fn from_rgs_unchecked(rgs: &[u32]) -> Self {
        let block_count = rgs.iter().copied().max().map_or(0, |max| max + 1) as usize;
        let mut blocks: Vec<Vec<AgentId>> = alloc::vec![Vec::new(); block_count];
        for (agent, &block) in rgs.iter().enumerate() {
            blocks[block as usize].push(AgentId(agent as u32));
        }
        Partition {
            blocks,
            assignment: rgs.into(),
        }
    }

    /// Every agent alone.
    pub fn singletons(n_agents: usize) -> Self {
        let rgs: Vec<u32> = (0..n_agents as u32).collect();
        Self::from_rgs_unchecked(&rgs)
    }

    /// All agents in one block.
    pub fn grand(n_agents: usize) -> Self {
        let rgs: Vec<u32> = alloc::vec![0; n_agents];
        Self::from_rgs_unchecked(&rgs)
    }

    pub fn n_agents(&self) -> usize {
        self.assignment.len()
    }

    pub fn blocks(&self) -> &[Vec<AgentId>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Canonical restricted-growth string: `assignment()[i]` is the block
    /// index of agent `i`.
    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn block_index_of(&self, agent: AgentId) -> usize {
        self.assignment[agent.index()] as usize
    }

    pub fn block_of(&self, agent: AgentId) -> &[AgentId] {
        &self.blocks[self.block_index_of(agent)]
    }

    /// Whether two agents share a block.
    pub fn together(&self, a: AgentId, b: AgentId) -> bool {
        self.assignment[a.index()] == self.assignment[b.index()]
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.assignment == other.assignment
    }
}

impl Eq for Partition {}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.assignment.cmp(&other.assignment)
    }
}

impl core::hash::Hash for Partition {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.assignment.hash(state);
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, block) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, " | ")?;
            }
            for (j, agent) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{agent}")?;
            }
        }
        Ok(())
    }
}
