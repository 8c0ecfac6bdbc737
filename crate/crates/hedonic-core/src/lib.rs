//! Core model and algorithms for cardinal hedonic games.
//!
//! A hedonic game assigns every ordered pair of agents a rational value; a
//! partition of the agents into coalitions gives each agent a utility derived
//! from the values she assigns to her coalition mates.  Two utility models are
//! supported: additively separable (the plain sum) and fractional (the sum
//! divided by coalition size).
//!
//! On top of the model this crate provides:
//!
//! * pairwise popularity margins between partitions, optionally restricted to
//!   an agent subset ([`popularity`]);
//! * exhaustive popular-partition verification and search over all set
//!   partitions in canonical restricted-growth order ([`popularity`] and
//!   [`enumeration`]);
//! * a budgeted, seeded local-search falsifier for popularity ([`falsify`]);
//! * a brute-force solver for two-quantified 3-DNF satisfiability ([`qsat`]);
//! * compilers from 3-DNF instances into hedonic games whose popularity
//!   behaviour tracks satisfiability, together with the certificate partitions
//!   and challenger partitions used to audit them ([`reduction`]);
//! * small fixed example games ([`gadgets`]).
//!
//! All arithmetic is exact; no floating point is used anywhere.  The crate is
//! `no_std` (with `alloc`) so the algorithmic core stays free of platform
//! dependencies; file formats, parallel drivers and the command-line interface
//! live in the companion `hedonic-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod enumeration;
pub mod error;
pub mod falsify;
pub mod gadgets;
pub mod model;
pub mod popularity;
pub mod qsat;
pub mod reduction;

pub use error::{Error, Result};
pub use model::{AgentId, Coalition, GameKind, HedonicGame, Partition, Preference, Rational};
