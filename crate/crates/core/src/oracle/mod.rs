//! Brute-force check of the analytic spectrum by diagonalizing the truncated
//! Fock-space Hamiltonian.

pub mod hamiltonian;
pub mod jacobi;
pub mod matching;

pub use hamiltonian::{build_hamiltonian, FockMatrix, Spin};
pub use jacobi::{eigenvalues_sym, SymMatrix};
pub use matching::{
    converged_levels, match_converged, match_spectra, reliability_ceiling, stabilized_levels, LevelMatch, MatchReport,
    NumericLevel,
};
