//! Repair-crew scheduling for damaged radial distribution networks.
//!
//! A damaged feeder is a tree rooted at the substation. Switch lines cut the
//! tree into islands; an island is energized only once every line inside it
//! and every line in the islands above it has been repaired. The goal is to
//! schedule `m` identical crews so that the total weighted island
//! energization time (the *harm*) is as small as possible.
//!
//! The crate provides:
//!
//! * [`model`]: instance validation, island partition, precedence tree.
//! * [`schedule`]: list scheduling, energization times and harm.
//! * [`seq_opt`]: the exact single-crew sequencer.
//! * [`lp`]: the completion-time LP relaxation solved by cutting planes.
//! * [`algos`]: LP-midpoint list scheduling and single-to-multi-crew conversion.
//! * [`oracle`]: brute-force optimum and bound checks for small instances.
//! * [`harness`]: instance I/O, random generation and batch benchmarking.

pub mod algos;
pub mod harness;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod schedule;
pub mod seq_opt;

pub use algos::{AlgoResult, Algorithm};
pub use model::{NetworkInstance, Problem};
pub use schedule::{EnergizationVector, HarmReport, Schedule};
