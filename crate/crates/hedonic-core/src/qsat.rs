//! 3-DNF formulas over paired variable groups and the brute-force decision
//! of their two-quantifier satisfiability question.
//!
//! An instance holds `n` X-variables and `n` Y-variables plus a disjunction
//! of three-literal conjunctive clauses.  The question solved here is: does
//! some X-assignment make the formula true under *every* Y-assignment?
//! At the sizes the reductions need, plain enumeration is the most
//! trustworthy oracle.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest per-group variable count `qsat_solve` accepts by default; the
/// scan is 4^n evaluations.
pub const DEFAULT_QSAT_LIMIT: usize = 16;

/// Which variable group a literal or assignment refers to.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Side {
    X,
    Y,
}

/// A possibly negated variable; `var` is zero-based within its side.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Literal {
    pub side: Side,
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn new(side: Side, var: usize, negated: bool) -> Self {
        Literal { side, var, negated }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let group = match self.side {
            Side::X => "x",
            Side::Y => "y",
        };
        let sign = if self.negated { "~" } else { "" };
        write!(f, "{sign}{group}{}", self.var + 1)
    }
}

/// A conjunction of exactly three pairwise distinct literals.
///
/// Distinctness is as signed literals, so a clause may contain a variable
/// and its negation; such a clause is legal and simply never satisfied.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Clause {
    literals: [Literal; 3],
}

impl Clause {
    pub fn new(literals: [Literal; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in i + 1..3 {
                if literals[i] == literals[j] {
                    return Err(Error::MalformedFormula {
                        detail: format!("clause repeats the literal {}", literals[i]),
                    });
                }
            }
        }
        Ok(Clause { literals })
    }

    pub fn literals(&self) -> &[Literal; 3] {
        &self.literals
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} & {} & {}",
            self.literals[0], self.literals[1], self.literals[2]
        )
    }
}

/// A 3-DNF formula over `n_vars` X-variables and `n_vars` Y-variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QDnfInstance {
    n_vars: usize,
    clauses: Vec<Clause>,
}

impl QDnfInstance {
    pub fn new(n_vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::MalformedFormula {
                detail: "each variable group needs at least one variable".into(),
            });
        }
        if clauses.is_empty() {
            return Err(Error::MalformedFormula {
                detail: "formulas need at least one clause".into(),
            });
        }
        for clause in &clauses {
            for literal in clause.literals() {
                if literal.var >= n_vars {
                    return Err(Error::MalformedFormula {
                        detail: format!(
                            "literal {literal} out of range for {n_vars} variables per group"
                        ),
                    });
                }
            }
        }
        Ok(QDnfInstance { n_vars, clauses })
    }

    /// Number of variables in each group.
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }
}

/// A truth assignment to one variable group.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TruthAssignment {
    side: Side,
    bits: Vec<bool>,
}

impl TruthAssignment {
    pub fn new(side: Side, bits: Vec<bool>) -> Self {
        TruthAssignment { side, bits }
    }

    /// The `rank`-th assignment in lexicographic order with false < true and
    /// the first variable as the most significant position.
    pub fn from_rank(side: Side, n_vars: usize, rank: u64) -> Self {
        let bits = (0..n_vars)
            .map(|var| (rank >> (n_vars - 1 - var)) & 1 == 1)
            .collect();
        TruthAssignment { side, bits }
    }

    /// Inverse of [`TruthAssignment::from_rank`].
    pub fn rank(&self) -> u64 {
        self.bits
            .iter()
            .fold(0, |acc, &bit| (acc << 1) | u64::from(bit))
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn value(&self, var: usize) -> bool {
        self.bits[var]
    }
}

impl fmt::Display for TruthAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &bit in &self.bits {
            f.write_str(if bit { "T" } else { "F" })?;
        }
        Ok(())
    }
}

fn check_assignment(
    instance: &QDnfInstance,
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
    if assignment.len() != instance.n_vars() {
        return Err(Error::AssignmentMismatch {
            detail: format!(
                "assignment covers {} variables, instance has {}",
                assignment.len(),
                instance.n_vars()
            ),
        });
    }
    Ok(())
}

/// Whether some clause has all three literals true under the pair of
/// assignments.
pub fn eval_dnf(
    instance: &QDnfInstance,
    tau_x: &TruthAssignment,
    tau_y: &TruthAssignment,
) -> Result<bool> {
    check_assignment(instance, tau_x, Side::X)?;
    check_assignment(instance, tau_y, Side::Y)?;
    Ok(instance.clauses().iter().any(|clause| {
        clause.literals().iter().all(|literal| {
            let assignment = match literal.side {
                Side::X => tau_x,
                Side::Y => tau_y,
            };
            assignment.value(literal.var) != literal.negated
        })
    }))
}

/// Whether the formula is true under `tau_x` for every Y-assignment.
pub fn holds_for_all_y(instance: &QDnfInstance, tau_x: &TruthAssignment) -> Result<bool> {
    let n = instance.n_vars();
    if n >= u64::BITS as usize {
        return Err(Error::QsatLimitExceeded { n, limit: 63 });
    }
    for y_rank in 0..1u64 << n {
        let tau_y = TruthAssignment::from_rank(Side::Y, n, y_rank);
        if !eval_dnf(instance, tau_x, &tau_y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finds an X-assignment under which the formula is true for every
/// Y-assignment, by scanning all X-assignments in lexicographic order.
/// Returns the least such assignment, or `None`.
pub fn qsat_solve(instance: &QDnfInstance, limit: usize) -> Result<Option<TruthAssignment>> {
    let n = instance.n_vars();
    if n > limit {
        return Err(Error::QsatLimitExceeded { n, limit });
    }
    for x_rank in 0..1u64 << n {
        let tau_x = TruthAssignment::from_rank(Side::X, n, x_rank);
        if holds_for_all_y(instance, &tau_x)? {
            return Ok(Some(tau_x));
        }
    }
    Ok(None)
}
