//! Truncated Fock-space linear algebra.

mod basis;
mod operator;
mod sparse;
mod state;

pub use basis::BasisDescriptor;
pub use operator::{embed, ladder_lower, ladder_raise, number_op, OperatorMatrix, Storage, DENSE_LIMIT};
pub use sparse::CsrMatrix;
pub use state::{
    blocks_from_edges, decoupled_blocks, fidelity_pure_vs_density, min_eigenvalue, min_eigenvalue_on, partial_trace,
    positive_within_on, thermal_state, QuantumState, StateForm,
};
