use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("generic coupling U = {u} (U^2 != 4 omega^2) is out of scope; only U = +2 omega and U = -2 omega are solvable here")]
    OutOfScope { u: f64 },

    #[error("U = -2 omega must be reduced to U = +2 omega before this operation")]
    NeedsReduction,

    #[error("reduction applies only to U = -2 omega couplings")]
    NotUMinus,

    #[error("{what} is undefined at x = {x} (requires {requirement})")]
    Domain {
        what: &'static str,
        x: f64,
        requirement: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("ln M(r) left the floating-point range at r = {r}")]
    Overflow { r: f64 },

    #[error("Bargmann norm test is indecisive at K = {k} (tail ratio {ratio})")]
    Indecisive { k: usize, ratio: f64 },

    #[error("inner product requires finite-norm arguments")]
    DivergingInput,

    #[error("inner product tail bound {bound:e} exceeds tolerance")]
    TailTooLarge { bound: f64 },
}
