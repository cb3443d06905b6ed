//! Maximum modulus `M(r)` on circles and growth order/type estimates
//! `ϱ = limsup ln ln M / ln r`, `σ = limsup ln M / r^ϱ`.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::eigenfunction::EigenFunction;
use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 64;
const GOLDEN_ITERS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    /// Slope of `ln ln M` against `ln r` over the top decade.
    pub order: f64,
    /// `order` rounded to the nearest half-integer.
    pub order_rounded: f64,
    /// `ln M(r_max) / r_max^{order_rounded}`.
    #[serde(rename = "type")]
    pub growth_type: f64,
    pub r_max: f64,
    pub ln_m_max: f64,
}

fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..GOLDEN_ITERS {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// `max_{|z|=r} ln|f(z)|` for a function given through `ln|f|`.
///
/// Samples `k_samples` (at least [`MIN_SAMPLES`]) equally spaced angles, then
/// refines the best one by golden-section search over its neighbouring cells.
pub fn max_log_modulus(ln_f: impl Fn(C64) -> f64, r: f64, k_samples: usize) -> f64 {
    let k = k_samples.max(MIN_SAMPLES);
    let at = |phi: f64| ln_f(C64::from_polar(r, phi));
    let (best_phi, best) = (0..k)
        .map(|j| {
            let phi = TAU * j as f64 / k as f64;
            (phi, at(phi))
        })
        .fold((0.0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
    let h = TAU / k as f64;
    let (_, refined) = golden_max(at, best_phi - h, best_phi + h);
    best.max(refined)
}

/// `M(r) = max_{|z|=r} |f(z)|`.
pub fn max_modulus(f: impl Fn(C64) -> C64, r: f64, k_samples: usize) -> f64 {
    max_log_modulus(|z| f(z).norm().ln(), r, k_samples).exp()
}

/// Growth order and type from `ln|f|` over an increasing radius grid.
///
/// Working with `ln|f|` lets the grid reach radii where `|f|` itself would
/// overflow.
pub fn growth_order_type_ln(ln_f: impl Fn(C64) -> f64, r_grid: &[f64]) -> Result<GrowthEstimate> {
    if r_grid.len() < 4 {
        return Err(Error::InvalidInput("growth estimate needs at least 4 radii".into()));
    }
    if r_grid[0] <= 0.0 || r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("radii must be positive and increasing".into()));
    }
    let r_max = *r_grid.last().unwrap();
    let mut points = Vec::new();
    let mut ln_m_max = f64::NAN;
    for &r in r_grid.iter().filter(|&&r| r >= r_max / 10.0) {
        let ln_m = max_log_modulus(&ln_f, r, 4 * MIN_SAMPLES);
        if !ln_m.is_finite() {
            return Err(Error::Overflow { r });
        }
        if ln_m > 0.0 {
            points.push((r.ln(), ln_m.ln()));
        }
        ln_m_max = ln_m;
    }
    if points.len() < 2 {
        return Ok(GrowthEstimate {
            order: 0.0,
            order_rounded: 0.0,
            growth_type: 0.0,
            r_max,
            ln_m_max,
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let order = sxy / sxx;
    let order_rounded = (2.0 * order).round().max(0.0) / 2.0;
    Ok(GrowthEstimate {
        order,
        order_rounded,
        growth_type: ln_m_max / r_max.powf(order_rounded),
        r_max,
        ln_m_max,
    })
}

/// Growth order and type of `f` directly; fails with `Overflow` once `|f|`
/// leaves the floating range, so radii must satisfy `|β| r² ≲ 700`.
pub fn growth_order_type(f: impl Fn(C64) -> C64, r_grid: &[f64]) -> Result<GrowthEstimate> {
    growth_order_type_ln(|z| f(z).norm().ln(), r_grid)
}

/// `count` geometric radii spanning two decades up to `r_max`.
pub fn geometric_radii(r_max: f64, count: usize) -> Vec<f64> {
    let count = count.max(4);
    (0..count)
        .map(|i| r_max * 100f64.powf(i as f64 / (count - 1) as f64 - 1.0))
        .collect()
}

/// Radii for an eigenfunction with Gaussian coefficient `β`: the top radius
/// makes `|β| r²` about `10⁶`, which swamps the Hermite factor's `n ln r`.
pub fn eigenfunction_radii(beta_abs: f64) -> Vec<f64> {
    geometric_radii((1e6 / beta_abs).sqrt(), 16)
}

/// Growth of `ψ₁`, evaluated through its log modulus.
pub fn eigenfunction_growth(ef: &EigenFunction) -> Result<GrowthEstimate> {
    let beta = ef.beta().re.abs();
    growth_order_type_ln(|z| ef.psi1.ln_abs(z), &eigenfunction_radii(beta))
}
