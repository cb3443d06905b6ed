//! Dense real symmetric eigenvalues by cyclic Jacobi rotations.
//!
//! Rotations are applied in round-robin ("tournament") order: each step
//! annihilates `n/2` disjoint off-diagonal pairs at once, so the row and
//! column updates of a step stream through contiguous memory instead of
//! walking matrix columns one rotation at a time. A sweep of `n - 1` steps
//! visits every off-diagonal pair exactly once.

use crate::error::{Error, Result};

/// Convergence threshold on the off-diagonal Frobenius norm, relative to ‖A‖_F.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
/// Sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

/// Dense square matrix stored row-major. Symmetric by contract.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    /// Builds from full row-major data; rejects non-square or asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "row {i} has length {} in a {dim}x{dim} matrix",
                    row.len()
                )));
            }
            m.data[i * dim..(i + 1) * dim].copy_from_slice(row);
        }
        if !m.is_symmetric() {
            return Err(Error::InvalidInput("matrix is not symmetric".into()));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Bitwise symmetry.
    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j).to_bits() == self.get(j, i).to_bits()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for (j, v) in self.row(i).iter().enumerate() {
                if i != j {
                    s += v * v;
                }
            }
        }
        s.sqrt()
    }

    /// Largest number of nonzero diagonals on either side of the main one.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0;
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                if self.get(i, j) != 0.0 {
                    bw = bw.max(j - i);
                }
            }
        }
        bw
    }

    /// `P A Pᵀ` for the permutation sending old index `perm[k]` to new index `k`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(perm.len());
        for (a, &i) in perm.iter().enumerate() {
            for (b, &j) in perm.iter().enumerate() {
                out.data[a * out.dim + b] = self.get(i, j);
            }
        }
        out
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        self.permuted(idx)
    }
}

#[derive(Clone, Copy)]
struct Rotation {
    p: usize,
    q: usize,
    c: f64,
    s: f64,
}

/// Rotation that annihilates `a_pq` in the `(p, q)` plane.
fn rotation_for(app: f64, aqq: f64, apq: f64) -> (f64, f64) {
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    (c, t * c)
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn eigenvalues_sym(matrix: &SymMatrix) -> Result<Vec<f64>> {
    let n = matrix.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = matrix.data.clone();
    let norm = matrix.frobenius_norm();
    let target = OFF_DIAGONAL_TOL * norm;
    let skip = f64::EPSILON * 1e-3 * norm;

    // Round-robin schedule over an even number of slots; slot `n` is a bye.
    let slots = n + n % 2;
    let mut order: Vec<usize> = (0..slots).collect();
    let mut rotations: Vec<Rotation> = Vec::with_capacity(slots / 2);

    let mut off = off_norm(&a, n);
    let mut sweeps = 0;
    while off > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        for _ in 0..slots - 1 {
            rotations.clear();
            for i in 0..slots / 2 {
                let (p, q) = (order[i], order[slots - 1 - i]);
                if p >= n || q >= n {
                    continue;
                }
                let (p, q) = (p.min(q), p.max(q));
                let apq = a[p * n + q];
                if apq.abs() <= skip {
                    continue;
                }
                let (c, s) = rotation_for(a[p * n + p], a[q * n + q], apq);
                rotations.push(Rotation { p, q, c, s });
            }
            apply_step(&mut a, n, &rotations);
            order[1..].rotate_right(1);
        }
        sweeps += 1;
        off = off_norm(&a, n);
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// `A <- Jᵀ A J` for a set of disjoint plane rotations.
fn apply_step(a: &mut [f64], n: usize, rotations: &[Rotation]) {
    for r in rotations {
        let (head, tail) = a.split_at_mut(r.q * n);
        let row_p = &mut head[r.p * n..r.p * n + n];
        let row_q = &mut tail[..n];
        for (x, y) in row_p.iter_mut().zip(row_q.iter_mut()) {
            let (xp, yq) = (*x, *y);
            *x = r.c * xp - r.s * yq;
            *y = r.s * xp + r.c * yq;
        }
    }
    for row in a.chunks_exact_mut(n) {
        for r in rotations {
            let (xp, yq) = (row[r.p], row[r.q]);
            row[r.p] = r.c * xp - r.s * yq;
            row[r.q] = r.s * xp + r.c * yq;
        }
    }
    for r in rotations {
        a[r.p * n + r.q] = 0.0;
        a[r.q * n + r.p] = 0.0;
    }
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.chunks_exact(n).enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                s += v * v;
            }
        }
    }
    s.sqrt()
}
