//! Exact spectrum and eigenfunctions of the generalized Rabi model on the
//! solvable lines `U = ±2ω`, with Bargmann-space norms, Stokes/Whittaker
//! classification and a brute-force Fock-space oracle.

pub mod bargmann;
pub mod eigenfunction;
pub mod error;
pub mod format;
pub mod growth;
pub mod hermite;
pub mod model;
pub mod oracle;
pub mod spectrum;
pub mod stokes;
pub mod verify;

pub use bargmann::{NormResult, TaylorSeries};
pub use eigenfunction::{build_canonical_eigenfunction, build_eigenfunction, EigenFunction};
pub use error::{Error, Result};
pub use model::{canonicalize, Canonical, CouplingClass, ModelParams, SpectralParam};
pub use oracle::{FockMatrix, MatchReport};
pub use spectrum::{Branch, SpectralClass, SpectralPoint, SweepTable};
pub use verify::{VerifyConfig, VerifyReport};
