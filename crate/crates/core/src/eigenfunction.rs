//! Closed-form eigenfunctions `ψ₁ = C e^{-βz²} H_n(s z)`, `ψ₂ = ω/(g(x-1))·(zψ₁ + ψ₁')`
//! and residuals of the Bargmann-space equations they must satisfy.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bargmann::{taylor_of_gauss_poly, TaylorSeries};
use crate::error::{Error, Result};
use crate::hermite::{hermite, hermite_coeffs, hermite_derivative, hermite_ln_abs, hermite_second_derivative};
use crate::model::{Canonical, ModelParams};
use crate::spectrum::{m_value, quantization_residual, sqrt_x2_minus_1, Branch, SpectralPoint, MATCH_TOL, ROOT_TOL};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A scalar entire function with analytic first and second derivatives.
pub trait Analytic {
    fn value(&self, z: C64) -> C64;
    fn derivative(&self, z: C64) -> C64;
    fn second_derivative(&self, z: C64) -> C64;
}

/// A two-component wave function `(ψ₁, ψ₂)` with analytic derivatives.
pub trait Spinor {
    fn components(&self, z: C64) -> [C64; 2];
    fn derivatives(&self, z: C64) -> [C64; 2];
}

/// Roots `β± = (x ± √(x²-1))/2` of `4β² - 4xβ + 1 = 0`, returned as `(β₊, β₋)`.
pub fn beta_coeffs(x: f64) -> Result<(f64, f64)> {
    let d = (x - 1.0) * (x + 1.0);
    if d < 0.0 {
        return Err(Error::Domain {
            what: "beta coefficients",
            x,
            requirement: "x^2 >= 1",
        });
    }
    let d = d.sqrt();
    // The smaller-magnitude root via the product β₊β₋ = 1/4 avoids cancellation.
    let big = 0.5 * (x + x.signum() * d);
    let small = 0.25 / big;
    Ok(if x >= 0.0 { (big, small) } else { (small, big) })
}

/// `C e^{-βz²} H_n(s z)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussHermite {
    pub c: C64,
    pub beta: C64,
    pub n: usize,
    pub scale: C64,
}

impl GaussHermite {
    fn gauss(&self, z: C64) -> C64 {
        (-self.beta * z * z).exp()
    }

    /// `ln|f(z)|` without forming `e^{-βz²}`; usable far past the overflow radius.
    pub fn ln_abs(&self, z: C64) -> f64 {
        self.c.norm().ln() + (-self.beta * z * z).re + hermite_ln_abs(self.n, self.scale * z)
    }

    /// Monomial coefficients of `C·H_n(s z)`.
    pub fn polynomial(&self) -> Vec<C64> {
        let mut sk = ONE;
        hermite_coeffs(self.n)
            .into_iter()
            .map(|h| {
                let v = self.c * h * sk;
                sk *= self.scale;
                v
            })
            .collect()
    }

    pub fn taylor(&self, k: usize) -> TaylorSeries {
        taylor_of_gauss_poly(self.beta, &self.polynomial(), ONE, k)
    }
}

impl Analytic for GaussHermite {
    fn value(&self, z: C64) -> C64 {
        self.c * self.gauss(z) * hermite(self.n, self.scale * z)
    }

    fn derivative(&self, z: C64) -> C64 {
        let t = self.scale * z;
        self.c * self.gauss(z) * (self.scale * hermite_derivative(self.n, t) - 2.0 * self.beta * z * hermite(self.n, t))
    }

    fn second_derivative(&self, z: C64) -> C64 {
        let t = self.scale * z;
        let b = self.beta;
        self.c
            * self.gauss(z)
            * (self.scale * self.scale * hermite_second_derivative(self.n, t)
                - 4.0 * b * z * self.scale * hermite_derivative(self.n, t)
                + (4.0 * b * b * z * z - 2.0 * b) * hermite(self.n, t))
    }
}

/// An eigenstate at a quantized `(x, n, branch)`, in the `U = +2ω` frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenFunction {
    pub params: ModelParams,
    pub point: SpectralPoint,
    pub psi1: GaussHermite,
    /// Components are interchanged on output (parameters came from `U = -2ω`).
    pub swap: bool,
}

impl EigenFunction {
    pub fn beta(&self) -> C64 {
        self.psi1.beta
    }

    pub fn n(&self) -> usize {
        self.psi1.n
    }

    pub fn scale(&self) -> C64 {
        self.psi1.scale
    }

    pub fn c(&self) -> C64 {
        self.psi1.c
    }

    pub fn x(&self) -> f64 {
        self.point.x
    }

    pub fn energy(&self) -> f64 {
        self.point.energy
    }

    /// `ω / (g(x-1))`
    pub fn psi2_prefactor(&self) -> f64 {
        self.params.omega / (self.params.g * (self.point.x - 1.0))
    }

    pub fn psi2(&self, z: C64) -> C64 {
        self.psi2_prefactor() * (z * self.psi1.value(z) + self.psi1.derivative(z))
    }

    /// Components in the caller's original frame (swapped back for `U = -2ω`).
    pub fn physical(&self, z: C64) -> [C64; 2] {
        let [a, b] = self.components(z);
        if self.swap {
            [b, a]
        } else {
            [a, b]
        }
    }

    pub fn physical_derivatives(&self, z: C64) -> [C64; 2] {
        let [a, b] = self.derivatives(z);
        if self.swap {
            [b, a]
        } else {
            [a, b]
        }
    }

    /// Taylor series of `(ψ₁, ψ₂)` through order `k`.
    pub fn taylor_pair(&self, k: usize) -> (TaylorSeries, TaylorSeries) {
        let psi1 = self.psi1.taylor(k + 1);
        let psi2 = psi1
            .raise()
            .add(&psi1.lower())
            .scaled(C64::new(self.psi2_prefactor(), 0.0))
            .truncated(k);
        (psi1.truncated(k), psi2)
    }
}

impl Spinor for EigenFunction {
    fn components(&self, z: C64) -> [C64; 2] {
        [self.psi1.value(z), self.psi2(z)]
    }

    fn derivatives(&self, z: C64) -> [C64; 2] {
        let (w, dw, ddw) = (
            self.psi1.value(z),
            self.psi1.derivative(z),
            self.psi1.second_derivative(z),
        );
        [dw, self.psi2_prefactor() * (w + z * dw + ddw)]
    }
}

/// An eigenfunction seen in its caller's original frame.
#[derive(Debug, Clone, Copy)]
pub struct Physical<'a>(pub &'a EigenFunction);

impl Spinor for Physical<'_> {
    fn components(&self, z: C64) -> [C64; 2] {
        self.0.physical(z)
    }

    fn derivatives(&self, z: C64) -> [C64; 2] {
        self.0.physical_derivatives(z)
    }
}

/// Builds the closed-form eigenfunction for a root of the quantization condition.
///
/// Lower branch: `β = β₊`, `s = (x²-1)^{1/4}`. Upper branch: `β = β₋`,
/// `s = i(x²-1)^{1/4}`. `C` makes `ψ₁` real on the real axis with its
/// lowest-order Taylor coefficient equal to 1.
pub fn build_eigenfunction(params: &ModelParams, point: &SpectralPoint) -> Result<EigenFunction> {
    params.require_u_plus()?;
    let x = point.x;
    if (x - 1.0) * (x + 1.0) <= 0.0 {
        return Err(Error::Domain {
            what: "eigenfunction",
            x,
            requirement: "x^2 > 1",
        });
    }
    let residual = quantization_residual(params, x, point.n, point.branch)?;
    if residual.abs() > MATCH_TOL {
        return Err(Error::InvalidInput(format!(
            "x = {x} is not a level of n = {} on the {} branch (residual {residual:e})",
            point.n, point.branch
        )));
    }
    let (beta_plus, beta_minus) = beta_coeffs(x)?;
    let quarter = sqrt_x2_minus_1(x).sqrt();
    let (beta, scale) = match point.branch {
        Branch::Lower => (beta_plus, C64::new(quarter, 0.0)),
        Branch::Upper => (beta_minus, C64::new(0.0, quarter)),
    };
    let n = point.n as usize;
    let parity = n % 2;
    let lowest = hermite_coeffs(n)[parity] * scale.powu(parity as u32);
    Ok(EigenFunction {
        params: *params,
        point: *point,
        psi1: GaussHermite {
            c: ONE / lowest,
            beta: C64::new(beta, 0.0),
            n,
            scale,
        },
        swap: false,
    })
}

/// [`build_eigenfunction`] for parameters brought to canonical form; carries
/// the component-swap flag of a `U = -2ω` reduction.
pub fn build_canonical_eigenfunction(canon: &Canonical, point: &SpectralPoint) -> Result<EigenFunction> {
    let mut ef = build_eigenfunction(&canon.params, point)?;
    ef.swap = canon.swap;
    Ok(ef)
}

/// `ψ₂ = ω/(g(x-1))·(zψ₁ + ψ₁')`
pub fn psi2_from_psi1(params: &ModelParams, x: f64, psi1: &impl Analytic, z: C64) -> Result<C64> {
    if (x - 1.0).abs() <= ROOT_TOL {
        return Err(Error::Domain {
            what: "psi2 from psi1",
            x,
            requirement: "x != 1",
        });
    }
    Ok(params.omega / (params.g * (x - 1.0)) * (z * psi1.value(z) + psi1.derivative(z)))
}

/// Explicit solution at `x = 1` (`E = -ω₀/2`):
/// `ψ₁ = c e^{-z²/2}`, `ψ₂ = c/(3g)·e^{-z²/2}(2ωz³ - 3ω₀z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegenerateSolution {
    pub params: ModelParams,
    pub c1: C64,
}

impl DegenerateSolution {
    pub fn energy(&self) -> f64 {
        -0.5 * self.params.omega0
    }

    pub fn psi1(&self) -> GaussHermite {
        GaussHermite {
            c: self.c1,
            beta: C64::new(0.5, 0.0),
            n: 0,
            scale: ONE,
        }
    }

    fn cubic_prefactor(&self) -> C64 {
        self.c1 / (3.0 * self.params.g)
    }

    pub fn psi2(&self, z: C64) -> C64 {
        let ModelParams { omega, omega0, .. } = self.params;
        self.cubic_prefactor() * (-0.5 * z * z).exp() * (2.0 * omega * z * z * z - 3.0 * omega0 * z)
    }

    /// `ln|ψ₂(z)|`
    pub fn psi2_ln_abs(&self, z: C64) -> f64 {
        let ModelParams { omega, omega0, .. } = self.params;
        self.cubic_prefactor().norm().ln()
            + (-0.5 * z * z).re
            + (2.0 * omega * z * z * z - 3.0 * omega0 * z).norm().ln()
    }

    pub fn taylor_pair(&self, k: usize) -> (TaylorSeries, TaylorSeries) {
        let ModelParams { omega, omega0, .. } = self.params;
        let half = C64::new(0.5, 0.0);
        let cubic = [ZERO, C64::new(-3.0 * omega0, 0.0), ZERO, C64::new(2.0 * omega, 0.0)];
        (
            taylor_of_gauss_poly(half, &[ONE], self.c1, k),
            taylor_of_gauss_poly(half, &cubic, self.cubic_prefactor(), k),
        )
    }
}

impl Spinor for DegenerateSolution {
    fn components(&self, z: C64) -> [C64; 2] {
        [self.psi1().value(z), self.psi2(z)]
    }

    fn derivatives(&self, z: C64) -> [C64; 2] {
        let ModelParams { omega, omega0, .. } = self.params;
        let poly = 2.0 * omega * z * z * z - 3.0 * omega0 * z;
        let dpoly = 6.0 * omega * z * z - 3.0 * omega0;
        [
            -z * self.psi1().value(z),
            self.cubic_prefactor() * (-0.5 * z * z).exp() * (dpoly - z * poly),
        ]
    }
}

pub fn degenerate_solution(params: &ModelParams) -> DegenerateSolution {
    DegenerateSolution {
        params: *params,
        c1: ONE,
    }
}

fn normalizer(values: &[C64]) -> f64 {
    values.iter().fold(1.0f64, |m, v| m.max(v.norm()))
}

/// Defects of the first-order `U = +2ω` system
///
/// ```text
/// ψ₁' = -zψ₁ + (2E+ω₀)/(2g) ψ₂
/// ψ₂' = (4ωz² + 2E - ω₀)/(2g) ψ₁ - z(g² + ω(2E+ω₀))/g² ψ₂
/// ```
///
/// divided by `max(1, |ψ₁|, |ψ₂|)`.
pub fn ode_residual_system(params: &ModelParams, energy: f64, pair: &impl Spinor, z: C64) -> Result<[C64; 2]> {
    params.require_u_plus()?;
    let ModelParams { omega, omega0, g, .. } = *params;
    let [p1, p2] = pair.components(z);
    let [d1, d2] = pair.derivatives(z);
    let shifted = 2.0 * energy + omega0;
    let r1 = d1 + z * p1 - shifted / (2.0 * g) * p2;
    let r2 = d2 - (4.0 * omega * z * z + 2.0 * energy - omega0) / (2.0 * g) * p1
        + z * (g * g + omega * shifted) / (g * g) * p2;
    let norm = normalizer(&[p1, p2]);
    Ok([r1 / norm, r2 / norm])
}

/// Defects of the general two-component Bargmann system for any `U`
///
/// ```text
/// (ω + U/2) zψ₁' + ω₀/2 ψ₁ + gψ₂' + gzψ₂ = Eψ₁
/// (ω - U/2) zψ₂' - ω₀/2 ψ₂ + gψ₁' + gzψ₁ = Eψ₂
/// ```
///
/// divided by `max(1, |ψ₁|, |ψ₂|)`.
pub fn bargmann_system_residual(params: &ModelParams, energy: f64, pair: &impl Spinor, z: C64) -> [C64; 2] {
    let ModelParams { omega, omega0, g, u } = *params;
    let [p1, p2] = pair.components(z);
    let [d1, d2] = pair.derivatives(z);
    let r1 = (omega + 0.5 * u) * z * d1 + 0.5 * omega0 * p1 + g * d2 + g * z * p2 - energy * p1;
    let r2 = (omega - 0.5 * u) * z * d2 - 0.5 * omega0 * p2 + g * d1 + g * z * p1 - energy * p2;
    let norm = normalizer(&[p1, p2]);
    [r1 / norm, r2 / norm]
}

/// Defect of `w'' + 2xz w' + (z² + x - m√(x²-1)) w = 0`, divided by `max(1, |w|)`.
pub fn ode_residual_second_order(params: &ModelParams, x: f64, w: &impl Analytic, z: C64) -> Result<C64> {
    let m = m_value(params, x)?;
    let (v, dv, ddv) = (w.value(z), w.derivative(z), w.second_derivative(z));
    let r = ddv + 2.0 * x * z * dv + (z * z + x - m * sqrt_x2_minus_1(x)) * v;
    Ok(r / normalizer(&[v]))
}

/// `{-2, -1, 0, 1, 2} + i{-2, -1, 0, 1, 2}`
pub fn residual_grid() -> Vec<C64> {
    let ticks = [-2.0, -1.0, 0.0, 1.0, 2.0];
    ticks
        .iter()
        .flat_map(|&re| ticks.iter().map(move |&im| C64::new(re, im)))
        .collect()
}

/// Largest system and second-order residual magnitudes over a grid.
pub fn max_residuals(ef: &EigenFunction, grid: &[C64]) -> Result<(f64, f64)> {
    let mut sys = 0.0f64;
    let mut second = 0.0f64;
    for &z in grid {
        let [r1, r2] = ode_residual_system(&ef.params, ef.energy(), ef, z)?;
        sys = sys.max(r1.norm()).max(r2.norm());
        second = second.max(ode_residual_second_order(&ef.params, ef.x(), &ef.psi1, z)?.norm());
    }
    Ok((sys, second))
}
