//! Configuration-interaction dynamics of bosons in a 1D well.
//!
//! Builds the many-body Hamiltonian `H(t) = A + f(t) B` in an occupation
//! number basis and propagates states with adaptive Krylov exponential
//! integrators, an embedded Runge-Kutta 8(7) pair, classical RK4 and
//! Crank-Nicolson. Every method counts Hamiltonian applications so their
//! costs can be compared.

pub mod drive;
pub mod error;
pub mod fock;
pub mod groundstate;
pub mod krylov;
pub mod linsolve;
pub mod model;
pub mod propagators;
pub mod scenario;
pub mod sparse;
pub mod vector;

pub use drive::DriveFunction;
pub use error::{Error, Result};
pub use fock::FockBasis;
pub use model::WellModel;
pub use propagators::{Method, Problem, PropagationRecord, RunOptions};
pub use sparse::{MatvecCounter, SparseOperator};
pub use vector::StateVector;
