//! Finite-difference differentiation weights in exact rational arithmetic,
//! the discrete spectra of the resulting filters, and their application to
//! sampled signals.
//!
//! * [`weights`] generates the central, half-point (odd-node) and one-sided
//!   families for any number of nodes, plus their infinite-length limits.
//! * [`oracle`] holds independent brute-force checks: exact moment-system
//!   solves, determinant identities, polynomial exactness and series sums.
//! * [`spectra`] computes DFTs of weight sequences and compares them with
//!   the analytic limit spectra.
//! * [`signal`] differentiates sampled functions.
//! * [`cli`] is the command-line front end.

pub mod cli;
pub mod error;
pub mod oracle;
pub mod rational;
pub mod signal;
pub mod spectra;
pub mod weights;

pub use error::{Error, Result};
pub use rational::RationalWeight;
pub use weights::{GridSpec, LimitWeight, Stencil, StencilKind};
