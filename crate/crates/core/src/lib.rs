//! Witnesses of non-classicality in a three-party network where two
//! independent sources feed a middle party whose outcome is broadcast.
//!
//! The crate evaluates concave witness functionals on quantum and classical
//! behaviors, bounds their classical maximum, and produces the data behind
//! the violation and noise-robustness results.

pub mod behavior;
pub mod bounds;
pub mod classical;
pub mod commands;
pub mod error;
pub mod optimizer;
pub mod quantum;
pub mod witness;

pub use behavior::{Behavior, CorrelatorView, DoData, SubspacePoint};
pub use classical::ClassicalModel;
pub use error::{Error, Result};
pub use quantum::{QuantumStrategy, Which};
pub use witness::{builtin, FunctionalSpec, WitnessValue};
