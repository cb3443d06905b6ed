//! Saddle points, characteristic exponents, Stokes lines and the Whittaker
//! multiplier predicates, with a pointwise check that the multiplier
//! classification reproduces the quantization condition.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::eigenfunction::beta_coeffs;
use crate::error::Result;
use crate::model::ModelParams;
use crate::spectrum::{m_value, odd_positive_index, solve_signed_target, Branch};

/// Absolute tolerance on `2·value` for membership in `½ℕ` and on `sgn(x)m` for
/// membership in the odd integers.
pub const HALF_INTEGER_TOL: f64 = 1e-9;

/// `α₁,₂ = (-x ± √(x²-1))/2`, the roots of `4α² + 4xα + 1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddlePair {
    pub alpha1: C64,
    pub alpha2: C64,
}

pub fn saddle_points(x: f64) -> SaddlePair {
    if x * x >= 1.0 {
        // α₁ = -β₋, α₂ = -β₊ with the cancellation-free β's.
        let (beta_plus, beta_minus) = beta_coeffs(x).expect("x^2 >= 1");
        SaddlePair {
            alpha1: C64::new(-beta_minus, 0.0),
            alpha2: C64::new(-beta_plus, 0.0),
        }
    } else {
        let im = 0.5 * ((1.0 - x) * (1.0 + x)).sqrt();
        SaddlePair {
            alpha1: C64::new(-0.5 * x, im),
            alpha2: C64::new(-0.5 * x, -im),
        }
    }
}

/// Some saddle lies strictly inside `|α| < 1/2`; holds iff `x² > 1`.
pub fn normalizable_saddle_exists(x: f64) -> bool {
    let s = saddle_points(x);
    s.alpha1.norm().min(s.alpha2.norm()) < 0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponent {
    pub value: f64,
    /// A non-negative integer exponent lets the local solution truncate to a polynomial.
    pub nonneg_integer: bool,
    /// Exact form `rho_sign·ρ + quarters/4`.
    pub rho_sign: i8,
    pub quarters: i32,
}

impl Exponent {
    fn new(rho: f64, rho_sign: i8, quarters: i32) -> Self {
        let value = f64::from(rho_sign) * rho + f64::from(quarters) / 4.0;
        let k = value.round();
        Self {
            value,
            nonneg_integer: k >= 0.0 && (value - k).abs() <= HALF_INTEGER_TOL,
            rho_sign,
            quarters,
        }
    }
}

/// Local exponents of the Laplace-transformed system at its three singular points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTable {
    /// `{ρ - 3/4, ρ - 1/4}`
    pub at_alpha1: [Exponent; 2],
    /// `{-ρ - 3/4, -ρ - 1/4}`
    pub at_alpha2: [Exponent; 2],
    /// `{3/2, 1/2}`
    pub at_infinity: [Exponent; 2],
}

impl ExponentTable {
    /// `(ρ-3/4) + (-ρ-3/4)` and `(ρ-1/4) + (-ρ-1/4)`.
    /// The `ρ` parts cancel symbolically, so the sums are exact rationals.
    pub fn pair_sums(&self) -> [f64; 2] {
        let sum = |a: &Exponent, b: &Exponent| {
            debug_assert_eq!(a.rho_sign + b.rho_sign, 0);
            f64::from(a.quarters + b.quarters) / 4.0
        };
        [
            sum(&self.at_alpha1[0], &self.at_alpha2[0]),
            sum(&self.at_alpha1[1], &self.at_alpha2[1]),
        ]
    }

    pub fn has_integer_exponent(&self) -> bool {
        self.at_alpha1.iter().chain(&self.at_alpha2).any(|e| e.nonneg_integer)
    }
}

pub fn characteristic_exponents(rho: f64) -> ExponentTable {
    ExponentTable {
        at_alpha1: [Exponent::new(rho, 1, -3), Exponent::new(rho, 1, -1)],
        at_alpha2: [Exponent::new(rho, -1, -3), Exponent::new(rho, -1, -1)],
        at_infinity: [Exponent::new(rho, 0, 6), Exponent::new(rho, 0, 2)],
    }
}

/// Directions `φ` of the Stokes lines `Re(z²(α₁-α₂)) = 0` when `α₁-α₂` is
/// real and positive: `{π/4, -π/4}`.
pub fn stokes_line_angles() -> [f64; 2] {
    [FRAC_PI_4, -FRAC_PI_4]
}

/// Stokes directions for `α₁-α₂ ∝ e^{iθ}`: `(±π/2 - θ)/2`.
pub fn stokes_line_angles_for(theta: f64) -> [f64; 2] {
    [(FRAC_PI_2 - theta) / 2.0, (-FRAC_PI_2 - theta) / 2.0]
}

/// Geometry of the conjugate saddles `α_j = ½e^{iθ_j}` for `|x| < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleSaddles {
    pub thetas: [f64; 2],
    /// `φ = -θ_j/2 + kπ` for `k = 0, 1`, reduced to `(-π, π]`: the directions
    /// along which a Laplace integral can avoid the non-normalizable growth.
    pub problematic_directions: Vec<f64>,
}

pub fn circle_saddles(x: f64) -> Option<CircleSaddles> {
    if x * x >= 1.0 {
        return None;
    }
    let s = saddle_points(x);
    let thetas = [s.alpha1.arg(), s.alpha2.arg()];
    let wrap = |a: f64| {
        let r = a.rem_euclid(2.0 * PI);
        if r > PI {
            r - 2.0 * PI
        } else {
            r
        }
    };
    let problematic_directions = thetas
        .iter()
        .flat_map(|t| [wrap(-t / 2.0), wrap(-t / 2.0 + PI)])
        .collect();
    Some(CircleSaddles {
        thetas,
        problematic_directions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhittakerParams {
    pub kappa: f64,
    pub mu: f64,
}

/// `(κ, μ) = (-m/4, 1/4)`.
pub fn whittaker_params(params: &ModelParams, x: f64) -> Result<WhittakerParams> {
    Ok(WhittakerParams {
        kappa: -m_value(params, x)? / 4.0,
        mu: 0.25,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplierVanishing {
    pub alpha_vanishes: bool,
    pub beta_vanishes: bool,
}

/// `v ∈ ½ℕ` within [`HALF_INTEGER_TOL`] on `2v`.
fn in_half_naturals(v: f64) -> bool {
    let k = (2.0 * v).round();
    k >= 0.0 && (2.0 * v - k).abs() <= HALF_INTEGER_TOL
}

/// `α` vanishes iff `κ±μ ∈ ½ℕ`; `β` vanishes iff `-κ±μ ∈ ½ℕ`.
pub fn multiplier_vanishes(wp: WhittakerParams) -> MultiplierVanishing {
    let WhittakerParams { kappa, mu } = wp;
    MultiplierVanishing {
        alpha_vanishes: in_half_naturals(kappa + mu) || in_half_naturals(kappa - mu),
        beta_vanishes: in_half_naturals(-kappa - mu) || in_half_naturals(-kappa + mu),
    }
}

/// Both classifications of a single `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub x: f64,
    pub m: f64,
    pub vanishing: MultiplierVanishing,
    /// `sgn(x)·m ∈ {1, 3, 5, …}`
    pub quantized: bool,
    /// The branch-appropriate multiplier vanishes and `m` has the branch's odd sign.
    pub multiplier_says_eigenvalue: bool,
}

impl Equivalence {
    pub fn agrees(&self) -> bool {
        self.quantized == self.multiplier_says_eigenvalue
    }
}

/// Compares the Stokes-multiplier classification with the quantization condition at `x`.
///
/// At `m = ±1` both multipliers vanish together, so the multiplier side is
/// read per branch: on `x > 1` it requires `β` to vanish with `m` odd and
/// positive, on `x < -1` it requires `α` to vanish with `m` odd and negative.
pub fn equivalence_detail(params: &ModelParams, x: f64) -> Result<Equivalence> {
    let m = m_value(params, x)?;
    let vanishing = multiplier_vanishes(whittaker_params(params, x)?);
    let odd_positive = |v: f64| odd_positive_index(v, HALF_INTEGER_TOL).is_some();
    let quantized = odd_positive(x.signum() * m);
    let multiplier_says_eigenvalue = if x > 1.0 {
        vanishing.beta_vanishes && odd_positive(m)
    } else {
        vanishing.alpha_vanishes && odd_positive(-m)
    };
    Ok(Equivalence {
        x,
        m,
        vanishing,
        quantized,
        multiplier_says_eigenvalue,
    })
}

pub fn equivalence_check(params: &ModelParams, x: f64) -> Result<bool> {
    Ok(equivalence_detail(params, x)?.agrees())
}

/// `count` points `x = sgn·(1 + 10^u)`, `u` uniform on `[-4, 3]`, plus the
/// points where `sgn(x)m` hits the levels `n ≤ n_max` and the off-level
/// targets `{2, 2.5, 4, -1}`, all solved to machine precision.
pub fn equivalence_grid(params: &ModelParams, branch: Branch, count: usize, n_max: u32) -> Result<Vec<f64>> {
    let sign = branch.sign();
    let mut xs: Vec<f64> = (0..count)
        .map(|i| {
            let u = -4.0 + 7.0 * i as f64 / (count.max(2) - 1) as f64;
            sign * (1.0 + 10f64.powf(u))
        })
        .collect();
    let targets = (0..=n_max).map(|n| (2 * n + 1) as f64).chain([2.0, 2.5, 4.0, -1.0]);
    for t in targets {
        xs.extend(solve_signed_target(params, t, branch, 0.0)?);
    }
    Ok(xs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceSummary {
    pub branch: Branch,
    pub points: usize,
    pub quantized_points: usize,
    pub disagreements: Vec<f64>,
}

pub fn equivalence_sweep(params: &ModelParams, branch: Branch, count: usize, n_max: u32) -> Result<EquivalenceSummary> {
    let grid = equivalence_grid(params, branch, count, n_max)?;
    let mut quantized_points = 0;
    let mut disagreements = Vec::new();
    for &x in &grid {
        let e = equivalence_detail(params, x)?;
        quantized_points += usize::from(e.quantized);
        if !e.agrees() {
            disagreements.push(x);
        }
    }
    Ok(EquivalenceSummary {
        branch,
        points: grid.len(),
        quantized_points,
        disagreements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{rho_value, solve_level};

    fn params() -> ModelParams {
        ModelParams::u_plus(1.0, 0.5, 1.0).unwrap()
    }

    #[test]
    fn saddle_examples() {
        let s = saddle_points(1.25);
        assert_eq!((s.alpha1.re, s.alpha2.re), (-0.25, -1.0));
        let s = saddle_points(1.0);
        assert_eq!((s.alpha1.re, s.alpha2.re), (-0.5, -0.5));
        let s = saddle_points(0.0);
        assert_eq!(s.alpha1, C64::new(0.0, 0.5));
        assert_eq!(s.alpha2, C64::new(0.0, -0.5));
    }

    #[test]
    fn normalizable_saddles() {
        assert!(normalizable_saddle_exists(1.25));
        assert!(normalizable_saddle_exists(-3.0));
        assert!(!normalizable_saddle_exists(0.3));
        assert!(!normalizable_saddle_exists(-1.0));
        assert!(!normalizable_saddle_exists(1.0));
    }

    #[test]
    fn exponent_examples() {
        let t = characteristic_exponents(-0.75);
        assert_eq!(t.at_alpha2[0].value, 0.0);
        assert!(t.at_alpha2[0].nonneg_integer);
        assert!(!characteristic_exponents(0.0).has_integer_exponent());
        assert_eq!(t.pair_sums(), [-1.5, -0.5]);
        assert!(t.at_infinity.iter().all(|e| !e.nonneg_integer));
    }

    #[test]
    fn stokes_lines() {
        for phi in stokes_line_angles() {
            assert!((C64::from_polar(1.0, 2.0 * phi)).re.abs() < 1e-15);
        }
        for theta in [0.0, 0.4, -1.3, 2.0] {
            for phi in stokes_line_angles_for(theta) {
                let v = C64::from_polar(1.0, 2.0 * phi) * C64::from_polar(1.0, theta);
                assert!(v.re.abs() < 1e-15);
            }
        }
        assert_eq!(stokes_line_angles_for(0.0), stokes_line_angles());
    }

    #[test]
    fn circle_saddle_directions() {
        let c = circle_saddles(0.0).unwrap();
        assert!((c.thetas[0] - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(c.problematic_directions.len(), 4);
        for (j, &phi) in c.problematic_directions.iter().enumerate() {
            let theta = c.thetas[j / 2];
            let k = (phi + theta / 2.0) / PI;
            assert!((k - k.round()).abs() < 1e-12);
        }
        assert!(circle_saddles(1.5).is_none());
    }

    #[test]
    fn whittaker_examples() {
        let p = params();
        let x = 2f64.sqrt();
        let wp = whittaker_params(&p, x).unwrap();
        assert_eq!(wp.mu, 0.25);
        assert!((wp.kappa + 0.0947).abs() < 1e-4);
        assert!((wp.kappa - rho_value(&p, x).unwrap()).abs() < 1e-15);
        assert!(whittaker_params(&p, 0.5).is_err());
    }

    #[test]
    fn multiplier_examples() {
        let v = |m: f64| {
            multiplier_vanishes(WhittakerParams {
                kappa: -m / 4.0,
                mu: 0.25,
            })
        };
        assert_eq!(
            v(3.0),
            MultiplierVanishing {
                alpha_vanishes: false,
                beta_vanishes: true
            }
        );
        assert_eq!(
            v(2.0),
            MultiplierVanishing {
                alpha_vanishes: false,
                beta_vanishes: false
            }
        );
        assert_eq!(
            v(-1.0),
            MultiplierVanishing {
                alpha_vanishes: true,
                beta_vanishes: true
            }
        );
        assert_eq!(
            v(-3.0),
            MultiplierVanishing {
                alpha_vanishes: true,
                beta_vanishes: false
            }
        );
    }

    #[test]
    fn roots_are_equivalent() {
        let p = ModelParams::u_plus(1.0, 0.5, 0.3).unwrap();
        for branch in Branch::BOTH {
            for n in 0..=10 {
                for pt in solve_level(&p, n, branch).unwrap() {
                    let x = solve_signed_target(&p, (2 * n + 1) as f64, branch, 0.0).unwrap()[0];
                    assert!((x - pt.x).abs() < 1e-10);
                    let e = equivalence_detail(&p, x).unwrap();
                    assert!(e.quantized && e.agrees(), "{branch} n={n}: {e:?}");
                }
            }
        }
    }

    #[test]
    fn off_level_points_agree() {
        let p = params();
        for target in [2.5, 2.0, 4.0] {
            let x = solve_signed_target(&p, target, Branch::Upper, 0.0).unwrap()[0];
            let e = equivalence_detail(&p, x).unwrap();
            assert!(!e.quantized && !e.multiplier_says_eigenvalue);
        }
    }

    #[test]
    fn sweep_has_no_disagreements() {
        let p = ModelParams::u_plus(1.0, 0.5, 0.3).unwrap();
        for branch in Branch::BOTH {
            let s = equivalence_sweep(&p, branch, 1000, 10).unwrap();
            assert!(s.disagreements.is_empty(), "{s:?}");
            assert!(s.quantized_points >= 11);
        }
    }
}
