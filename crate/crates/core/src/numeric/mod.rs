//! Finite-difference oracle: grids, eigensolver, resolvents and relation checks.

pub mod eigen;
pub mod grid;
pub mod interp;
pub mod mapping;
pub mod measure;
pub mod propagator;
pub mod quad;
pub mod resolvent;

pub use eigen::{fd_eigs, fd_spectrum, sturm_count, Eigenpairs, CONTINUUM_FLAG};
pub use grid::{apply_on_grid, auto_inset, fd_from_potential, fd_hamiltonian, Grid, GridOperator};
pub use interp::{Cubic, InterpKind};
pub use mapping::{map_wavefunction, relative_residual, MappedState, MappingReport};
pub use measure::{measure_chain, MeasureChainReport, MeasureStep};
pub use propagator::{verify_propagator_relation, PropagatorCheck, PropagatorEntry, PropagatorReport};
pub use resolvent::{fd_resolvent, resolvent_green, resolvent_matrix_element};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("no convergence: {0}")]
    ConvergenceFailure(String),
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("interpolation out of range: {0}")]
    InterpolationOutOfRange(String),
    #[error(transparent)]
    Expr(#[from] crate::expr::ExprError),
    #[error(transparent)]
    Potential(#[from] crate::potentials::PotentialError),
}
