//! Lower and upper bounds on a witness over the classical models.

pub mod bnb;
pub mod local;
pub mod lp;
pub mod objective;
pub mod relax;

pub use bnb::{branch_and_bound, branch_and_bound_with, BnbConfig, BoundCertificate, Termination};
pub use local::{local_search, local_search_with, LocalSearchConfig};
pub use lp::{solve_lp, LpProblem, LpSolution, LpStatus, Row};
pub use relax::{relax_node, RelaxationNode};
