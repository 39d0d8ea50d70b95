//! Master-equation time evolution, exact diagonal propagation and
//! expectation values.

pub mod diagonal;
pub mod evolve;
pub mod expect;
pub mod integrator;
pub mod rhs;
mod support;

pub use diagonal::propagate_diagonal;
pub use evolve::{evolve, evolve_observed, EvolveConfig, EvolveReport, Sample, Trajectory, TRACE_FAIL, TRACE_SILENT};
pub use expect::expectation;
pub use integrator::{Dopri5Options, StepStats};
pub use rhs::{lindblad_rhs, Liouvillian};
