//! Truncated Fock-space matrix of `H = (ω + U/2 σ_z) a†a + ω₀/2 σ_z + g σ_x (a† + a)`.
//!
//! Basis `|n, s⟩` with `n = 0..=N` and `s = ±1`, interleaved as index
//! `2n + (s == -1)`. Couplings join `|n, s⟩` and `|n+1, -s⟩`, so the matrix
//! has bandwidth 3.

use crate::model::ModelParams;
use crate::oracle::jacobi::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    cutoff: usize,
    matrix: SymMatrix,
}

impl FockMatrix {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn index(n: usize, s: Spin) -> usize {
        2 * n + usize::from(s == Spin::Down)
    }

    /// Inverse of [`FockMatrix::index`].
    pub fn state(index: usize) -> (usize, Spin) {
        (index / 2, if index.is_multiple_of(2) { Spin::Up } else { Spin::Down })
    }

    /// Eigenvalue of the parity `P = s (-1)^n` on a basis state.
    pub fn parity(index: usize) -> i8 {
        let (n, s) = Self::state(index);
        let p = if n % 2 == 0 { 1 } else { -1 };
        if s == Spin::Up {
            p
        } else {
            -p
        }
    }

    /// Splits into the `P = +1` and `P = -1` blocks.
    pub fn parity_blocks(&self) -> (SymMatrix, SymMatrix) {
        let (even, odd): (Vec<usize>, Vec<usize>) = (0..self.dim()).partition(|&i| Self::parity(i) == 1);
        (self.matrix.submatrix(&even), self.matrix.submatrix(&odd))
    }
}

pub fn build_hamiltonian(params: &ModelParams, cutoff: usize) -> FockMatrix {
    let dim = 2 * (cutoff + 1);
    let mut m = SymMatrix::zeros(dim);
    for n in 0..=cutoff {
        for s in [Spin::Up, Spin::Down] {
            let i = FockMatrix::index(n, s);
            let sign = s.sign();
            let diag = (params.omega + 0.5 * sign * params.u) * n as f64 + 0.5 * sign * params.omega0;
            m.set_sym(i, i, diag);
            if n < cutoff {
                let j = FockMatrix::index(n + 1, s.flip());
                m.set_sym(i, j, params.g * ((n + 1) as f64).sqrt());
            }
        }
    }
    FockMatrix { cutoff, matrix: m }
}
