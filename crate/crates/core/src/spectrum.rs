//! Quantization functions, root solving of the discrete spectrum, parameter
//! sweeps and classification of arbitrary energies.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sci;
use crate::model::{e_to_x, x_to_e, ModelParams, SpectralParam};

/// Guaranteed accuracy of roots on `x`. [`solve_level`] bisects further, to
/// adjacent floats, because `m` is steep next to `x = -1` and a bracket of
/// this width still leaves `sgn(x)m` off by up to `~10⁻⁸` there.
pub const ROOT_TOL: f64 = 1e-12;
/// Tolerance on `sgn(x)·m(x)` when classifying an energy.
pub const MATCH_TOL: f64 = 1e-6;

/// Innermost offset `|x| - 1` of the bracketing scan.
const SCAN_START: f64 = 1e-6;
/// Outermost `|x|` of the bracketing scan.
const SCAN_END: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `x > 1`
    Upper,
    /// `x < -1`
    Lower,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Upper, Branch::Lower];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }

    pub fn contains(self, x: f64) -> bool {
        match self {
            Branch::Upper => x > 1.0,
            Branch::Lower => x < -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Upper => "upper",
            Branch::Lower => "lower",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upper" => Ok(Branch::Upper),
            "lower" => Ok(Branch::Lower),
            other => Err(Error::InvalidInput(format!("unknown branch '{other}'"))),
        }
    }
}

/// A root of the quantization condition: quantum number, branch, `x` and energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub n: u32,
    pub branch: Branch,
    pub x: f64,
    #[serde(rename = "E")]
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum SpectralClass {
    PointSpectrumCandidate { n: u32, branch: Branch },
    Continuum,
    NonNormalizable,
    DegenerateBoundary,
}

impl SpectralClass {
    pub fn name(&self) -> &'static str {
        match self {
            SpectralClass::PointSpectrumCandidate { .. } => "PointSpectrumCandidate",
            SpectralClass::Continuum => "Continuum",
            SpectralClass::NonNormalizable => "NonNormalizable",
            SpectralClass::DegenerateBoundary => "DegenerateBoundary",
        }
    }
}

/// `√(x² - 1)` factored to keep accuracy next to `x = ±1`.
pub(crate) fn sqrt_x2_minus_1(x: f64) -> f64 {
    ((x - 1.0) * (x + 1.0)).sqrt()
}

fn check_outside_unit(what: &'static str, x: f64) -> Result<()> {
    if (x - 1.0) * (x + 1.0) > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            x,
            requirement: "x^2 > 1",
        })
    }
}

/// `(x-1)·(ω(ω-ω₀) + g²(x-1)) / (ω²√(x²-1))`
fn quantization_core(params: &ModelParams, x: f64) -> f64 {
    let ModelParams { omega, omega0, g, .. } = *params;
    (x - 1.0) * (omega * (omega - omega0) + g * g * (x - 1.0)) / (omega * omega * sqrt_x2_minus_1(x))
}

pub fn m_value(params: &ModelParams, x: f64) -> Result<f64> {
    check_outside_unit("m(x)", x)?;
    Ok(quantization_core(params, x))
}

/// Exponent shift `ρ = -m/4` of the Laplace-transformed system.
pub fn rho_value(params: &ModelParams, x: f64) -> Result<f64> {
    check_outside_unit("rho(x)", x)?;
    let ModelParams { omega, omega0, g, .. } = *params;
    Ok(-(x - 1.0) * (omega * (omega - omega0) + g * g * (x - 1.0)) / (4.0 * omega * omega * sqrt_x2_minus_1(x)))
}

/// `sgn(x)·m(x) - (2n+1)`; zero exactly on the spectrum.
pub fn quantization_residual(params: &ModelParams, x: f64, n: u32, branch: Branch) -> Result<f64> {
    if !branch.contains(x) {
        return Err(Error::Domain {
            what: "quantization residual",
            x,
            requirement: match branch {
                Branch::Upper => "x > 1 on the upper branch",
                Branch::Lower => "x < -1 on the lower branch",
            },
        });
    }
    Ok(branch.sign() * quantization_core(params, x) - (2 * n + 1) as f64)
}

/// All solutions of `sgn(x)·m(x) = target` on a branch, ascending in `x`.
///
/// Brackets sign changes on the geometric grid `|x| = 1 + 10⁻⁶·2^k` out to
/// `|x| = 10⁶`, then bisects each bracket to width `tol` (`0` bisects down to
/// adjacent floats).
pub fn solve_signed_target(params: &ModelParams, target: f64, branch: Branch, tol: f64) -> Result<Vec<f64>> {
    params.require_u_plus()?;
    if !(tol >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "root tolerance must be non-negative, got {tol}"
        )));
    }
    let sign = branch.sign();
    let f = |x: f64| sign * quantization_core(params, x) - target;

    let mut grid = Vec::new();
    let mut offset = SCAN_START;
    loop {
        grid.push(sign * (1.0 + offset));
        if 1.0 + offset >= SCAN_END {
            break;
        }
        offset *= 2.0;
    }
    if branch == Branch::Lower {
        grid.reverse();
    }

    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if i + 1 < grid.len() && values[i + 1] != 0.0 && (values[i] < 0.0) != (values[i + 1] < 0.0) {
            roots.push(bisect(&f, grid[i], grid[i + 1], values[i], tol));
        }
    }
    Ok(roots)
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> f64 {
    let lo_negative = f_lo < 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

pub fn solve_level(params: &ModelParams, n: u32, branch: Branch) -> Result<Vec<SpectralPoint>> {
    solve_level_with_tol(params, n, branch, 0.0)
}

/// [`solve_level`] with an explicit bisection tolerance on `x`.
pub fn solve_level_with_tol(params: &ModelParams, n: u32, branch: Branch, tol: f64) -> Result<Vec<SpectralPoint>> {
    let target = (2 * n + 1) as f64;
    solve_signed_target(params, target, branch, tol)?
        .into_iter()
        .map(|x| {
            Ok(SpectralPoint {
                n,
                branch,
                x,
                energy: x_to_e(params, SpectralParam(x))?,
            })
        })
        .collect()
}

/// Roots for one `(g, n, branch)` cell of a sweep; `points` may be empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub g: f64,
    pub branch: Branch,
    pub n: u32,
    pub points: Vec<SpectralPoint>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepTable {
    pub entries: Vec<SweepEntry>,
}

pub const SWEEP_CSV_HEADER: &str = "g,branch,n,x,E";

impl SweepTable {
    /// One `(g, point)` pair per found root, in sweep order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, &SpectralPoint)> + '_ {
        self.entries.iter().flat_map(|e| e.points.iter().map(move |p| (e.g, p)))
    }

    pub fn root_count(&self, branch: Branch) -> usize {
        self.entries
            .iter()
            .filter(|e| e.branch == branch)
            .map(|e| e.points.len())
            .sum()
    }

    /// Cells with more than one root for the same `(g, n, branch)`.
    pub fn multiplicities(&self) -> impl Iterator<Item = &SweepEntry> + '_ {
        self.entries.iter().filter(|e| e.points.len() > 1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for (g, p) in self.rows() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                sci(g),
                p.branch,
                p.n,
                sci(p.x),
                sci(p.energy)
            ));
        }
        out
    }
}

/// Solves every `(g, n ≤ n_max, branch)` combination.
pub fn spectrum_sweep(
    params_base: &ModelParams,
    g_grid: &[f64],
    n_max: u32,
    branches: &[Branch],
) -> Result<SweepTable> {
    if g_grid.is_empty() {
        return Err(Error::InvalidInput("coupling grid is empty".into()));
    }
    if branches.is_empty() {
        return Err(Error::InvalidInput("no branch selected".into()));
    }
    let mut entries = Vec::new();
    for &g in g_grid {
        let params = params_base.with_g(g)?;
        for &branch in branches {
            for n in 0..=n_max {
                entries.push(SweepEntry {
                    g,
                    branch,
                    n,
                    points: solve_level(&params, n, branch)?,
                });
            }
        }
    }
    Ok(SweepTable { entries })
}

/// Nearest odd positive integer `2n+1` to `v`, as `n`, if within `tol`.
pub(crate) fn odd_positive_index(v: f64, tol: f64) -> Option<u32> {
    if !v.is_finite() || v < 1.0 - tol {
        return None;
    }
    let n = ((v - 1.0) / 2.0).round().max(0.0);
    ((v - (2.0 * n + 1.0)).abs() <= tol).then_some(n as u32)
}

pub fn classify_energy(params: &ModelParams, energy: f64) -> Result<SpectralClass> {
    let x = e_to_x(params, energy)?.value();
    if (x - 1.0).abs() <= ROOT_TOL || (x + 1.0).abs() <= ROOT_TOL {
        return Ok(SpectralClass::DegenerateBoundary);
    }
    if x.abs() < 1.0 {
        return Ok(SpectralClass::Continuum);
    }
    let branch = if x > 0.0 { Branch::Upper } else { Branch::Lower };
    let signed_m = branch.sign() * quantization_core(params, x);
    Ok(match odd_positive_index(signed_m, MATCH_TOL) {
        Some(n) => SpectralClass::PointSpectrumCandidate { n, branch },
        None => SpectralClass::NonNormalizable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(omega0: f64, g: f64) -> ModelParams {
        ModelParams::u_plus(1.0, omega0, g).unwrap()
    }

    #[test]
    fn m_examples() {
        let a = p(0.5, 1.0);
        let s2 = 2f64.sqrt();
        let want = (s2 - 1.0) * (s2 - 0.5);
        assert!((m_value(&a, s2).unwrap() - want).abs() < 1e-14);
        assert!((want - 0.3787).abs() < 1e-4);
        let want = -3.0 * (0.5 - 3.0) / 3f64.sqrt();
        assert!((m_value(&a, -2.0).unwrap() - want).abs() < 1e-14);
        assert!((want - 4.330).abs() < 1e-3);
    }

    #[test]
    fn m_vanishes_at_upper_edge_when_omega_equals_omega0() {
        let a = p(1.0, 1.0);
        let mut prev = f64::INFINITY;
        for k in 1..8 {
            let eps = 10f64.powi(-k);
            let m = m_value(&a, 1.0 + eps).unwrap();
            // ~ eps^{3/2}/√2
            assert!(m < prev && (m / (eps.powf(1.5) / 2f64.sqrt()) - 1.0).abs() < 0.5);
            prev = m;
            assert!(rho_value(&a, 1.0 + eps).unwrap().abs() < eps);
        }
    }

    #[test]
    fn domain_errors() {
        let a = p(0.5, 1.0);
        for x in [-1.0, 0.0, 0.3, 1.0] {
            assert!(m_value(&a, x).is_err());
            assert!(rho_value(&a, x).is_err());
        }
        assert!(quantization_residual(&a, -2.0, 0, Branch::Upper).is_err());
        assert!(quantization_residual(&a, 2.0, 0, Branch::Lower).is_err());
    }

    #[test]
    fn rho_example() {
        let rho = rho_value(&p(0.5, 1.0), 2f64.sqrt()).unwrap();
        assert!((rho + 0.0947).abs() < 1e-4);
    }

    #[test]
    fn residual_examples() {
        let a = p(0.5, 1.0);
        let r = quantization_residual(&a, 2f64.sqrt(), 0, Branch::Upper).unwrap();
        assert!((r + 0.6213).abs() < 1e-4);
        let r = quantization_residual(&a, -2.0, 3, Branch::Lower).unwrap();
        assert!((r - (-m_value(&a, -2.0).unwrap() - 7.0)).abs() < 1e-14);
    }

    #[test]
    fn cubic_root_for_omega_equal_omega0() {
        // (x-1)^3 = x+1, i.e. x^3 - 3x^2 + 2x - 2 = 0.
        let pts = solve_level(&p(1.0, 1.0), 0, Branch::Upper).unwrap();
        assert_eq!(pts.len(), 1);
        let x = pts[0].x;
        assert!((x * x * x - 3.0 * x * x + 2.0 * x - 2.0).abs() < 1e-10);
        assert!((x - 2.521).abs() < 1e-3);
        assert!((pts[0].energy - 1.021).abs() < 1e-3);
    }

    #[test]
    fn lower_branch_empty_for_strong_coupling() {
        assert!(solve_level(&p(0.5, 1.0), 0, Branch::Lower).unwrap().is_empty());
    }

    #[test]
    fn generic_and_unreduced_rejected() {
        let generic = ModelParams::new(1.0, 0.5, 1.0, 0.0).unwrap();
        assert!(matches!(
            solve_level(&generic, 0, Branch::Upper),
            Err(Error::OutOfScope { .. })
        ));
        let minus = ModelParams::new(1.0, 0.5, 1.0, -2.0).unwrap();
        assert_eq!(solve_level(&minus, 0, Branch::Upper), Err(Error::NeedsReduction));
        assert!(classify_energy(&generic, 0.0).is_err());
    }

    #[test]
    fn classification_examples() {
        let a = p(0.5, 1.0);
        assert_eq!(classify_energy(&a, -1.0).unwrap(), SpectralClass::Continuum);
        assert_eq!(classify_energy(&a, -0.25).unwrap(), SpectralClass::DegenerateBoundary);
        assert_eq!(classify_energy(&a, -2.25).unwrap(), SpectralClass::DegenerateBoundary);
        let root = solve_level(&a, 0, Branch::Upper).unwrap()[0];
        assert_eq!(
            classify_energy(&a, root.energy).unwrap(),
            SpectralClass::PointSpectrumCandidate {
                n: 0,
                branch: Branch::Upper
            }
        );
        assert_eq!(
            classify_energy(&a, root.energy + 0.1).unwrap(),
            SpectralClass::NonNormalizable
        );
    }

    #[test]
    fn single_point_sweep_matches_solver() {
        let a = p(0.5, 1.0);
        let t = spectrum_sweep(&a, &[1.0], 0, &[Branch::Upper]).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.entries[0].points, solve_level(&a, 0, Branch::Upper).unwrap());
        let csv = t.to_csv();
        assert!(csv.starts_with("g,branch,n,x,E\n"));
        assert_eq!(csv.lines().count(), 2);
        assert!(spectrum_sweep(&a, &[], 0, &[Branch::Upper]).is_err());
    }

    #[test]
    fn odd_index() {
        assert_eq!(odd_positive_index(1.0, 1e-6), Some(0));
        assert_eq!(odd_positive_index(7.0 + 1e-7, 1e-6), Some(3));
        assert_eq!(odd_positive_index(2.0, 1e-6), None);
        assert_eq!(odd_positive_index(-1.0, 1e-6), None);
        assert_eq!(odd_positive_index(0.999, 1e-6), None);
    }
}
