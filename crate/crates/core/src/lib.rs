//! Operator-Schmidt analysis and variational sequential approximation of
//! multiqubit unitaries.
//!
//! A global unitary on `N` qubits is approximated by a chain of two-body
//! unitaries, each coupling one qubit to a shared `D`-level ancilla. The crate
//! provides:
//!
//! * [`tensor`]: dense complex matrices, Kronecker products, realignment,
//!   partial traces, Jacobi SVD and Hermitian exponentials;
//! * [`gates`]: the standard gates and Pauli / SU(d) bases;
//! * [`schmidt`]: operator-Schmidt decomposition and Schmidt strength;
//! * [`kraus`]: Kraus operators of dilated unitaries, the ancilla-decoupling
//!   witness and Fano-form correlation analysis;
//! * [`vmpo`]: the sequential circuit, its Frobenius cost, and the
//!   alternating sweep optimizer.

pub mod error;
pub mod gates;
pub mod kraus;
pub mod random;
pub mod schmidt;
pub mod tensor;
pub mod vmpo;

pub use error::{Error, Result};
pub use tensor::{ComplexMatrix, FactorShape, C64};
