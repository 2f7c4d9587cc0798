//! Dense complex linear algebra for small operators.

pub mod eigen;
pub mod matrix;
pub mod spectral;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, EigenSystem};
pub use matrix::{
    inner, orthonormality_defect, partial_trace, pauli, qubit_operator, tensor, ComplexMatrix,
    Subsystem, HERMITIAN_TOL,
};
pub use spectral::{
    majorizes, majorizes_slices, operator_norm_hermitian, shannon_bits, state_spectrum, trace_distance,
    von_neumann_entropy, ProbabilityVector, PROB_TOL, STATE_TOL,
};
