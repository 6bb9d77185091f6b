//! Steady-state heat transport in stochastic rotor chains.
//!
//! A chain of N pinned oscillators interacts through the bounded potential
//! λ_{j,l}[1 − cos(κ(q_j − q_l))] and each site feels a Langevin bath at its
//! own temperature. The crate computes:
//!
//! * low-temperature per-cut heat currents from a perturbative kernel that is
//!   exactly linear in the bath temperatures ([`analytic`]);
//! * self-consistent interior temperature profiles, steady fluxes, and
//!   rectification reports for graded chains ([`selfconsistent`]);
//! * direct ensemble integration of the stochastic dynamics with current and
//!   bath-exchange estimators, as an independent check ([`simulate`]).
//!
//! Chains, couplings (nearest-neighbor, next-nearest-neighbor, or general
//! bounded range), graded masses, and the rescaling to dimensionless units
//! live in [`model`].

pub mod analytic;
mod error;
pub mod linalg;
pub mod model;
pub mod parallel;
pub mod selfconsistent;
pub mod simulate;

pub use error::{Error, Result};
