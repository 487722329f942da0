//! In-process exact solving: a dense dual simplex for LP relaxations,
//! branch-and-bound on top of it, an exhaustive placement oracle, and an
//! MPS reader.
//!
//! Tolerances: primal feasibility 1e-7, integrality 1e-6. The dense
//! tableau caps in-process models at [`simplex::MAX_CELLS`] cells; larger
//! models are meant for MPS export.

mod bnb;
mod brute;
mod mps_reader;
mod propagate;
pub mod simplex;

pub use bnb::{gap, solve_mip, MipParams, MipResult, MipStatus, TraceEvent, INTEGRALITY_TOL};
pub use brute::{brute_force, brute_force_with, OracleLimits};
pub use mps_reader::{read_mps, read_mps_from};
pub use simplex::{solve_lp, LpResult, LpStatus, FEAS_TOL};
