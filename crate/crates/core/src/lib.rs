//! Two-player parity pseudotelepathy games.
//!
//! - [`games`]: game model, the two built-in games, JSON game files.
//! - [`classical`]: GF(2) feasibility with certificates, implied equalities,
//!   exact optimal values by branch-and-bound.
//! - [`quantum`]: the entangled two-photon strategy, stabilizer checks, round
//!   distributions and seeded Monte Carlo matches.
//! - [`algebra`]: the small dense complex linear algebra behind `quantum`.

pub mod algebra;
pub mod fraction;
pub mod games;
pub mod classical;
mod parallel;
pub mod quantum;

pub use parallel::default_threads;
