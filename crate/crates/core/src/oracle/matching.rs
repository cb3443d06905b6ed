//! Truncation-stability filtering and matching of numeric eigenvalues
//! against the analytic spectrum.

use serde::{Deserialize, Serialize};

use super::{build_hamiltonian, eigenvalues_sym};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectrum::{Branch, SpectralPoint};

/// Stabilization threshold between two truncations.
pub const STABILITY_TOL: f64 = 1e-8;
/// Smallest allowed gap between the two cutoffs of a stability test.
pub const MIN_CUTOFF_GAP: usize = 20;

/// An eigenvalue of the finer truncation and how far it moved from the coarser one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericLevel {
    pub energy: f64,
    /// Distance to the nearest eigenvalue of the coarser truncation.
    pub shift: f64,
    pub stabilized: bool,
}

fn nearest_distance(sorted: &[f64], v: f64) -> f64 {
    let i = sorted.partition_point(|&e| e < v);
    let below = i.checked_sub(1).map(|j| v - sorted[j]);
    let above = sorted.get(i).map(|&e| e - v);
    below.into_iter().chain(above).fold(f64::INFINITY, f64::min)
}

/// Eigenvalues of `fine` inside `[window.0, window.1]`, flagged stabilized
/// when the nearest eigenvalue of `coarse` lies within `tol`. Both inputs sorted.
pub fn stabilized_levels(coarse: &[f64], fine: &[f64], window: (f64, f64), tol: f64) -> Vec<NumericLevel> {
    fine.iter()
        .filter(|&&e| e >= window.0 && e <= window.1)
        .map(|&energy| {
            let shift = nearest_distance(coarse, energy);
            NumericLevel {
                energy,
                shift,
                stabilized: shift < tol,
            }
        })
        .collect()
}

/// Diagonalizes the truncations at `n1` and `n2` bosons and compares them inside `window`.
pub fn converged_levels(
    params: &ModelParams,
    n1: usize,
    n2: usize,
    window: (f64, f64),
    tol: f64,
) -> Result<Vec<NumericLevel>> {
    if n2 < n1 + MIN_CUTOFF_GAP {
        return Err(Error::InvalidInput(format!(
            "cutoffs must differ by at least {MIN_CUTOFF_GAP}, got {n1} and {n2}"
        )));
    }
    let coarse = eigenvalues_sym(build_hamiltonian(params, n1).matrix())?;
    let fine = eigenvalues_sym(build_hamiltonian(params, n2).matrix())?;
    Ok(stabilized_levels(&coarse, &fine, window, tol))
}

/// Highest energy trusted for matching at boson cutoff `N`: `ωN/4`.
///
/// An index-based rule (lowest quarter of the eigenvalues) would sit inside
/// the continuum window, where the flat spin-down band piles up about half of
/// all truncated eigenvalues.
pub fn reliability_ceiling(params: &ModelParams, cutoff: usize) -> f64 {
    params.omega * cutoff as f64 / 4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMatch {
    pub n: u32,
    pub branch: Branch,
    #[serde(rename = "E_analytic")]
    pub e_analytic: f64,
    #[serde(rename = "E_numeric")]
    pub e_numeric: Option<f64>,
    /// `|E_numeric - E_analytic|`, present only for a stabilized match.
    pub delta: Option<f64>,
    pub stabilized: bool,
}

impl LevelMatch {
    pub fn is_matched(&self) -> bool {
        self.delta.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub levels: Vec<LevelMatch>,
    pub unmatched_numeric: Vec<f64>,
}

impl MatchReport {
    pub fn all_matched(&self) -> bool {
        self.levels.iter().all(LevelMatch::is_matched)
    }

    pub fn max_delta(&self) -> f64 {
        self.levels.iter().filter_map(|l| l.delta).fold(0.0, f64::max)
    }
}

/// Greedy nearest-neighbour matching: candidate pairs within `tol` are taken
/// in order of increasing distance, each level used at most once. Only
/// stabilized numeric levels may be matched.
pub fn match_converged(analytic: &[SpectralPoint], numeric: &[NumericLevel], tol: f64) -> MatchReport {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, a) in analytic.iter().enumerate() {
        for (j, b) in numeric.iter().enumerate() {
            let d = (a.energy - b.energy).abs();
            if b.stabilized && d <= tol {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut of_analytic = vec![None; analytic.len()];
    let mut used = vec![false; numeric.len()];
    for (_, i, j) in pairs {
        if of_analytic[i].is_none() && !used[j] {
            of_analytic[i] = Some(j);
            used[j] = true;
        }
    }
    let levels = analytic
        .iter()
        .zip(&of_analytic)
        .map(|(a, m)| {
            let nearest = m.map(|j| numeric[j]).or_else(|| {
                numeric
                    .iter()
                    .min_by(|p, q| (p.energy - a.energy).abs().total_cmp(&(q.energy - a.energy).abs()))
                    .copied()
            });
            LevelMatch {
                n: a.n,
                branch: a.branch,
                e_analytic: a.energy,
                e_numeric: nearest.map(|l| l.energy),
                delta: m.map(|j| (numeric[j].energy - a.energy).abs()),
                stabilized: nearest.is_some_and(|l| l.stabilized),
            }
        })
        .collect();
    let unmatched_numeric = numeric
        .iter()
        .zip(&used)
        .filter(|(_, &u)| !u)
        .map(|(l, _)| l.energy)
        .collect();
    MatchReport {
        levels,
        unmatched_numeric,
    }
}

/// [`match_converged`] for a plain sorted list, every entry treated as stabilized.
pub fn match_spectra(analytic: &[SpectralPoint], numeric: &[f64], tol: f64) -> MatchReport {
    let levels: Vec<NumericLevel> = numeric
        .iter()
        .map(|&energy| NumericLevel {
            energy,
            shift: 0.0,
            stabilized: true,
        })
        .collect();
    match_converged(analytic, &levels, tol)
}
