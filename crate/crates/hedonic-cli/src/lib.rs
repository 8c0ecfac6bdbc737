//! Workbench around the core library: file formats, a multi-threaded
//! verifier front end, the experiment harness, and the `hedonic` binary's
//! command dispatch.

pub mod cli;
pub mod formats;
pub mod harness;
pub mod parallel;
