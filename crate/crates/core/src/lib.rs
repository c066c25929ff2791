//! Exact sheaf-theoretic contextuality.
//!
//! Measurement scenarios, no-signalling empirical models, the
//! contextuality hierarchy, simulations between models, games and
//! predicates, and the hom-scenario `[S,T]` that internalises procedures.
//! All arithmetic is exact over arbitrary-precision rationals.

pub mod catalog;
pub mod cli;
pub mod contextuality;
pub mod error;
pub mod exactlp;
pub mod format;
pub mod games;
pub mod hom;
pub mod model;
pub mod procedure;
pub mod rational;
pub mod scenario;

pub use error::{Error, Result};
pub use rational::Rational;
