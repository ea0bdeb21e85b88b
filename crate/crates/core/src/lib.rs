//! Scheduling toolkit for aircraft disassembly projects.
//!
//! The problem: schedule a set of disassembly tasks on a team of technicians
//! with skill certifications and unavailability windows, under precedence
//! constraints, per-location occupancy limits and mass-balance tolerances
//! along the aft/fwd and left/right axes of the aircraft. The objective is
//! the makespan.
//!
//! The crate is organized around a shared [`model`]:
//!
//! * [`validate`] decides feasibility of a candidate schedule and produces
//!   explanatory violation reports and diagnostic profiles.
//! * [`solve`] is an anytime heuristic solver (serial schedule generation
//!   wrapped in a large neighborhood search).
//! * [`exact`] is a branch-and-bound solver for desk-scale instances, used
//!   as a ground-truth oracle.
//! * [`mip`] emits the on/off event-based MIP formulation as an LP file,
//!   encodes schedules into variable assignments and checks them row by row.
//! * [`metrics`] scores anytime runs with primal gap / primal integral.
//! * [`generator`] builds seeded random instances for testing and benchmarks.

pub mod exact;
pub mod generator;
pub mod metrics;
pub mod mip;
pub mod model;
pub mod profile;
pub mod solve;
pub mod validate;
