//! File formats, output tables and the `miab-plan` command line around
//! [`miab_core`].
//!
//! Exit codes: 0 success, 1 output failure, 2 invalid input, 3 infeasible
//! assignment, 4 no feasible solution found, 5 oracle budget exceeded.

pub mod cli;
pub mod files;
pub mod manifest;
pub mod output;
