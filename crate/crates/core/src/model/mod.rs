//! System specifications and the Hamiltonians and collapse operators built from them.

pub mod collapse;
pub mod effective;
pub mod hamiltonian;
pub mod spec;

pub use collapse::{build_collapse_ops, mode_collapse_ops, CollapseOp};
pub use effective::{
    build_effective_hamiltonian, build_effective_hamiltonian_signed, build_multipath_effective,
    effective_params, validity_ratio, DeviceParams, EffectiveModel, EffectiveParams, KerrSign,
    MultipathModel, Port, VALIDITY_THRESHOLD,
};
pub use hamiltonian::{build_full_hamiltonian, full_quadratic_term, rwa_quadratic_term};
pub use spec::{
    CouplingKind, CouplingSpec, DriveSpec, Frame, ModeKind, ModeSpec, QuadraticForm, SystemSpec,
};
