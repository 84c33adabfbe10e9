//! Two-qubit quantum machinery: matrices, states, effects, the Born rule and
//! the parametrized strategy family.

pub mod family;
pub mod linalg;
pub mod strategy;

pub use family::{
    critical_visibility, critical_visibility_with, family_behavior, family_rs, maximize_over_theta,
    witness_value_closed_form, CriticalVisibility, ThetaOptimum, ThetaPolicy, Which,
};
pub use linalg::{kron, ComplexMatrix, C64};
pub use strategy::{observable_effects, DensityOperator, FamilyParams, QuantumStrategy};
