//! Placement of virtual machines onto physical machines when every VM's
//! virtual disks must land on pairwise distinct physical disks.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: VM/PM types, the built-in catalog, experiment presets and the
//!   JSON instance format.
//! * [`feasibility`]: exact single-PM checks (scalar capacities plus the disk
//!   matching problem, with witnesses).
//! * [`configs`]: enumeration of feasible per-PM configuration vectors.
//! * [`mip`]: a solver-neutral linear model, the direct (`F1`),
//!   configuration (`F2`) and hybrid (`COMB`) formulations, closed-form size
//!   estimates and MPS export.
//! * [`solver`]: dense bounded dual simplex, branch-and-bound, an exhaustive
//!   placement oracle and an MPS reader.
//! * [`heuristic`]: the randomized first-fit baseline.
//! * [`solution`]: decoding, validation, cost and utilization.

pub mod configs;
pub mod error;
pub mod feasibility;
pub mod heuristic;
pub mod mip;
pub mod model;
pub mod rng;
pub mod solution;
pub mod solver;

pub use error::{Error, Result};
