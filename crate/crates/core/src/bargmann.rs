//! Bargmann–Fock norms and inner products from Taylor coefficients.
//!
//! Monomials are orthogonal with `‖z^k‖² = k!`, so a series is stored as
//! `b_k = a_k √k!` and the norm is `Σ |b_k|²`. The scaled form keeps
//! high-order coefficients of Gaussian-type functions representable long
//! after `a_k` itself would underflow.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::hermite::hermite_coeffs;

/// Ratio-test margin: decaying tails must have term ratio below `1 - δ`.
pub const RATIO_DELTA: f64 = 0.05;
/// Largest truncation order tried by the adaptive norm.
pub const K_MAX: usize = 4000;
/// Initial truncation order of the adaptive norm.
pub const K_START: usize = 64;
/// A Finite verdict requires the geometric tail bound below this fraction of the sum.
pub const TAIL_REL: f64 = 1e-13;
/// Inner products require the Cauchy–Schwarz tail bound below this fraction of `‖f‖‖g‖`.
pub const INNER_TAIL_REL: f64 = 1e-12;
/// Smallest order at which a power-law tail can be told apart from a geometric one.
const POWER_FIT_MIN_K: usize = 1024;
/// Power-law tails `t_k ~ k^p` with `p` above this are summed as divergent.
const POWER_DIVERGENT_EXPONENT: f64 = -0.9;
/// Largest residual of the ratio fit `A + B/j` for a divergence verdict.
const RATIO_FIT_TOL: f64 = 1e-2;
/// Terms only count toward "all growing" past this order.
const GROWTH_MIN_K: usize = 256;

fn ln_sqrt_factorial(k: usize) -> f64 {
    0.5 * ln_factorial(k as u64)
}

/// `√k!`, from the exact product while it is representable.
fn sqrt_factorial(k: usize) -> f64 {
    if k <= 150 {
        (1..=k).map(|i| i as f64).product::<f64>().sqrt()
    } else {
        ln_sqrt_factorial(k).exp()
    }
}

/// Truncated Taylor series `Σ_{k≤K} a_k z^k`, stored as `b_k = a_k √k!`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorSeries {
    scaled: Vec<C64>,
    /// The series is a polynomial: every coefficient past `K` is zero.
    complete: bool,
}

impl TaylorSeries {
    pub fn from_scaled(scaled: Vec<C64>, complete: bool) -> Self {
        Self { scaled, complete }
    }

    /// The polynomial `Σ a_k z^k`.
    pub fn polynomial(coeffs: &[C64]) -> Self {
        let scaled = coeffs.iter().enumerate().map(|(k, &a)| a * sqrt_factorial(k)).collect();
        Self { scaled, complete: true }
    }

    pub fn monomial(k: usize) -> Self {
        let mut a = vec![C64::new(0.0, 0.0); k + 1];
        a[k] = C64::new(1.0, 0.0);
        Self::polynomial(&a)
    }

    /// Truncation order `K`.
    pub fn truncation(&self) -> usize {
        self.scaled.len().saturating_sub(1)
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn scaled_coeffs(&self) -> &[C64] {
        &self.scaled
    }

    /// `a_k` (may underflow to zero for large `k`; use [`Self::scaled_coeffs`] instead).
    pub fn coefficient(&self, k: usize) -> C64 {
        self.scaled.get(k).map_or(C64::new(0.0, 0.0), |b| b / sqrt_factorial(k))
    }

    /// `k!|a_k|²` for `k = 0..=K`.
    pub fn norm_terms(&self) -> Vec<f64> {
        self.scaled.iter().map(|b| b.norm_sqr()).collect()
    }

    pub fn partial_norm_sq(&self) -> f64 {
        self.scaled.iter().map(|b| b.norm_sqr()).sum()
    }

    pub fn eval(&self, z: C64) -> C64 {
        // w_k = z^k / √k!
        let mut w = C64::new(1.0, 0.0);
        let mut sum = C64::new(0.0, 0.0);
        for (k, b) in self.scaled.iter().enumerate() {
            if k > 0 {
                w *= z / (k as f64).sqrt();
            }
            sum += b * w;
        }
        sum
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            scaled: self.scaled.iter().map(|b| b * c).collect(),
            complete: self.complete,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.scaled.len().max(other.scaled.len());
        let zero = C64::new(0.0, 0.0);
        let scaled = (0..len)
            .map(|k| self.scaled.get(k).unwrap_or(&zero) + other.scaled.get(k).unwrap_or(&zero))
            .collect();
        Self {
            scaled,
            complete: self.complete && other.complete,
        }
    }

    pub fn truncated(&self, k: usize) -> Self {
        let complete = self.complete && self.scaled.iter().skip(k + 1).all(|b| *b == C64::new(0.0, 0.0));
        Self {
            scaled: self.scaled.iter().take(k + 1).copied().collect(),
            complete,
        }
    }

    /// Multiplication by `z`.
    pub fn raise(&self) -> Self {
        let mut scaled = Vec::with_capacity(self.scaled.len() + 1);
        scaled.push(C64::new(0.0, 0.0));
        scaled.extend(self.scaled.iter().enumerate().map(|(k, b)| b * ((k + 1) as f64).sqrt()));
        Self {
            scaled,
            complete: self.complete,
        }
    }

    /// Differentiation; the result has order `K - 1`.
    pub fn lower(&self) -> Self {
        let scaled = self
            .scaled
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, b)| b * (k as f64).sqrt())
            .collect();
        Self {
            scaled,
            complete: self.complete,
        }
    }
}

/// First `K+1` Taylor coefficients of `c·e^{-βz²}·Σ p_i z^i`.
///
/// Each contribution `p_i (-β)^j / j!` with `k = i + 2j` is formed in log
/// space together with the `√k!` weight, then summed with a common shift.
pub fn taylor_of_gauss_poly(beta: C64, poly: &[C64], c: C64, k_max: usize) -> TaylorSeries {
    let zero = C64::new(0.0, 0.0);
    let neg_beta = -beta;
    let (ln_b, arg_b) = if neg_beta == zero {
        (f64::NEG_INFINITY, 0.0)
    } else {
        (neg_beta.norm().ln(), neg_beta.arg())
    };
    let ln_c = c.norm().ln();
    let arg_c = c.arg();
    let mut scaled = Vec::with_capacity(k_max + 1);
    let mut terms: Vec<(f64, f64)> = Vec::with_capacity(poly.len());
    for k in 0..=k_max {
        terms.clear();
        let half_ln_kf = ln_sqrt_factorial(k);
        for (i, p) in poly.iter().enumerate().take(k + 1) {
            if (k - i) % 2 != 0 || *p == zero {
                continue;
            }
            let j = (k - i) / 2;
            let ln_beta_j = if j == 0 { 0.0 } else { j as f64 * ln_b };
            if ln_beta_j == f64::NEG_INFINITY {
                continue;
            }
            let ln_mag = ln_c + p.norm().ln() + ln_beta_j - ln_factorial(j as u64) + half_ln_kf;
            terms.push((ln_mag, arg_c + p.arg() + j as f64 * arg_b));
        }
        let shift = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        if shift == f64::NEG_INFINITY {
            scaled.push(zero);
            continue;
        }
        let sum: C64 = terms.iter().map(|&(l, a)| C64::from_polar((l - shift).exp(), a)).sum();
        scaled.push(sum * shift.exp());
    }
    let complete = neg_beta == zero && k_max + 1 >= poly.len();
    TaylorSeries { scaled, complete }
}

/// First `K+1` Taylor coefficients of `c·e^{-βz²}·H_n(scale·z)`.
pub fn taylor_of_gauss_hermite(beta: C64, n: usize, scale: C64, c: C64, k_max: usize) -> TaylorSeries {
    let mut sk = C64::new(1.0, 0.0);
    let poly: Vec<C64> = hermite_coeffs(n)
        .into_iter()
        .map(|h| {
            let v = h * sk;
            sk *= scale;
            v
        })
        .collect();
    taylor_of_gauss_poly(beta, &poly, c, k_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceKind {
    /// Terms stop decreasing.
    Growing,
    /// Terms decay like `k^p` with `p > -1`.
    PowerLaw,
}

/// Why a norm was judged infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceEvidence {
    pub kind: DivergenceKind,
    /// Extrapolated limit of the ratio `t_{k+2} / t_k`.
    pub ratio: f64,
    /// Power-law exponent `p` of `t_k ~ k^p`, when the power-law test decided.
    pub exponent: Option<f64>,
    /// Truncation order at which the decision was made.
    pub k: usize,
    pub partial_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum NormResult {
    Finite {
        value: f64,
        /// Estimated remainder already included in `value`.
        tail: f64,
        k: usize,
    },
    Diverging(DivergenceEvidence),
}

impl NormResult {
    pub fn is_finite(&self) -> bool {
        matches!(self, NormResult::Finite { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            NormResult::Finite { value, .. } => Some(*value),
            NormResult::Diverging(_) => None,
        }
    }
}

enum Verdict {
    Decided(NormResult),
    Undecided { ratio: f64 },
}

/// Sums `u_j = t_{2j} + t_{2j+1}` over complete pairs, so both parity chains
/// advance together.
fn pair_sums(terms: &[f64]) -> Vec<f64> {
    terms.chunks_exact(2).map(|c| c[0] + c[1]).collect()
}

/// Least-squares fit `ρ_j ≈ A + B/j`; returns the extrapolated ratio `A` and
/// the largest fit residual.
fn extrapolated_ratio(ratios: &[(usize, f64)]) -> (f64, f64) {
    let n = ratios.len() as f64;
    let mx = ratios.iter().map(|&(j, _)| 1.0 / j as f64).sum::<f64>() / n;
    let my = ratios.iter().map(|&(_, r)| r).sum::<f64>() / n;
    let sxy: f64 = ratios.iter().map(|&(j, r)| (1.0 / j as f64 - mx) * (r - my)).sum();
    let sxx: f64 = ratios.iter().map(|&(j, _)| (1.0 / j as f64 - mx).powi(2)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let a = my - slope * mx;
    let resid = ratios
        .iter()
        .map(|&(j, r)| (r - a - slope / j as f64).abs())
        .fold(0.0, f64::max);
    (a, resid)
}

fn decide(series: &TaylorSeries) -> Verdict {
    let terms = series.norm_terms();
    let k = series.truncation();
    let sum: f64 = terms.iter().sum();
    let diverging = |kind, ratio, exponent| {
        Verdict::Decided(NormResult::Diverging(DivergenceEvidence {
            kind,
            ratio,
            exponent,
            k,
            partial_sum: sum,
        }))
    };
    if series.complete {
        return Verdict::Decided(NormResult::Finite {
            value: sum,
            tail: 0.0,
            k,
        });
    }
    if !sum.is_finite() {
        return diverging(DivergenceKind::Growing, f64::INFINITY, None);
    }
    let u = pair_sums(&terms);
    if u.len() < 8 {
        return Verdict::Undecided { ratio: f64::NAN };
    }
    let last = u.len() - 1;
    // Pair-step ratios u_j / u_{j-1} over the last half.
    let ratios: Vec<(usize, f64)> = (last / 2 + 1..=last)
        .filter_map(|j| match (u[j - 1], u[j]) {
            (p, c) if p > 0.0 => Some((j, c / p)),
            (_, c) if c > 0.0 => Some((j, f64::INFINITY)),
            _ => None,
        })
        .collect();
    if ratios.is_empty() {
        // Every tail term vanishes; nothing is left to add.
        return if sum == 0.0 || k >= GROWTH_MIN_K {
            Verdict::Decided(NormResult::Finite {
                value: sum,
                tail: 0.0,
                k,
            })
        } else {
            Verdict::Undecided { ratio: 0.0 }
        };
    }
    if ratios.iter().any(|r| !r.1.is_finite()) {
        return if k >= GROWTH_MIN_K {
            diverging(DivergenceKind::Growing, f64::INFINITY, None)
        } else {
            Verdict::Undecided { ratio: f64::INFINITY }
        };
    }
    let (limit, fit_resid) = extrapolated_ratio(&ratios);
    // Divergence is only read off ratios that already follow their asymptotic form.
    let smooth = fit_resid <= RATIO_FIT_TOL;
    let all_below = ratios.iter().all(|r| r.1 < 1.0);
    let all_above = ratios.iter().all(|r| r.1 >= 1.0);

    // Decreasing ratios approach the limit from above, increasing ones from
    // below, so the larger of the recent maximum and the limit bounds the rest.
    let recent = &ratios[ratios.len() - ratios.len().div_ceil(2)..];
    let bound = recent.iter().map(|r| r.1).fold(limit, f64::max);
    if all_below && bound < 1.0 {
        let tail = u[last] * bound / (1.0 - bound);
        if tail <= TAIL_REL * sum {
            return Verdict::Decided(NormResult::Finite {
                value: sum + tail,
                tail,
                k,
            });
        }
    }
    if smooth && all_above && limit >= 1.0 && k >= GROWTH_MIN_K {
        return diverging(DivergenceKind::Growing, limit, None);
    }
    if smooth && k >= POWER_FIT_MIN_K && limit >= 1.0 - RATIO_DELTA && u[last / 2] > 0.0 && u[last] > 0.0 {
        // u_j ~ j^p over a doubling of j.
        let p = (u[last] / u[last / 2]).ln() / ((last as f64) / ((last / 2) as f64)).ln();
        if p > POWER_DIVERGENT_EXPONENT {
            let kind = if all_above {
                DivergenceKind::Growing
            } else {
                DivergenceKind::PowerLaw
            };
            return diverging(kind, limit, Some(p));
        }
    }
    Verdict::Undecided { ratio: limit }
}

/// Squared Bargmann norm `Σ k!|a_k|²` of a fixed truncation.
///
/// Polynomials are summed exactly. Otherwise the ratios `t_{k+2}/t_k` of
/// pair sums over the last half of the series decide, together with their
/// extrapolated limit from a fit `A + B/j`:
///
/// - all below 1 with a geometric tail bound under [`TAIL_REL`] of the sum: Finite;
/// - all at least 1 with limit at least 1: Diverging (growing terms);
/// - limit within `δ` of 1 and terms decaying no faster than `k^{-0.9}`: Diverging (power law);
/// - otherwise an `Indecisive` error.
///
/// Requiring every ratio in the window to agree keeps the pre-asymptotic
/// stretch of a Gaussian times a high-degree polynomial, where terms first
/// rise and oscillate, from being read as divergence.
pub fn bargmann_norm_sq(series: &TaylorSeries) -> Result<NormResult> {
    match decide(series) {
        Verdict::Decided(r) => Ok(r),
        Verdict::Undecided { ratio } => Err(Error::Indecisive {
            k: series.truncation(),
            ratio,
        }),
    }
}

/// [`bargmann_norm_sq`] with the truncation doubled from [`K_START`] until
/// the verdict is decisive or `k_max` is exceeded.
///
/// A divergent verdict below `k_max` must be repeated at the next doubling.
/// Near the normalizability threshold the decay ratio approaches 1 and a
/// slowly decaying hump can pass the power-law test once before the
/// geometric tail sets in.
pub fn bargmann_norm_sq_adaptive(series_at: impl Fn(usize) -> TaylorSeries, k_max: usize) -> Result<NormResult> {
    let mut k = K_START.min(k_max);
    let mut pending: Option<NormResult> = None;
    loop {
        let series = series_at(k);
        match decide(&series) {
            Verdict::Decided(r @ NormResult::Finite { .. }) => return Ok(r),
            Verdict::Decided(r) => {
                if pending.is_some() || k >= k_max {
                    return Ok(r);
                }
                pending = Some(r);
            }
            Verdict::Undecided { ratio } if k >= k_max => return Err(Error::Indecisive { k, ratio }),
            Verdict::Undecided { .. } => pending = None,
        }
        k = (2 * k).min(k_max);
    }
}

/// Partial-sum growth against `√K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqrtGrowth {
    /// Least-squares slope of `S_K` vs `√K` over the second half of the checkpoints.
    pub slope: f64,
    /// The same slope over the first half.
    pub early_slope: f64,
}

impl SqrtGrowth {
    /// Positive slope that changed by less than `rel` between the two halves.
    pub fn is_stable(&self, rel: f64) -> bool {
        self.slope > 0.0 && (self.slope - self.early_slope).abs() <= rel * self.slope
    }
}

fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Detects the `Σ k^{-1/2}` signature of a borderline `|β| = 1/2` function:
/// partial sums growing linearly in `√K`. Checkpoints run from `K/8` to `K`.
pub fn sqrt_growth(series: &TaylorSeries) -> SqrtGrowth {
    let terms = series.norm_terms();
    let k = terms.len();
    let mut sums = Vec::with_capacity(k);
    let mut s = 0.0;
    for t in &terms {
        s += t;
        sums.push(s);
    }
    let first = (k / 8).max(2);
    // Even checkpoints only, so alternating-parity series are sampled consistently.
    let points: Vec<(f64, f64)> = (first..k)
        .step_by(((k - first) / 64).max(2) & !1)
        .map(|i| ((i as f64).sqrt(), sums[i]))
        .collect();
    let mid = points.len() / 2;
    SqrtGrowth {
        slope: ls_slope(&points[mid..]),
        early_slope: ls_slope(&points[..mid.max(2)]),
    }
}

/// `⟨f, g⟩ = Σ k! conj(a_k) b_k`, refusing inputs whose norm is not Finite.
///
/// The truncation remainder is bounded by Cauchy–Schwarz from the two norm
/// tails and must stay below [`INNER_TAIL_REL`]`·‖f‖‖g‖`.
pub fn inner_product(f: &TaylorSeries, g: &TaylorSeries) -> Result<C64> {
    let (nf, ng) = (bargmann_norm_sq(f)?, bargmann_norm_sq(g)?);
    let (
        NormResult::Finite {
            value: vf, tail: tf, ..
        },
        NormResult::Finite {
            value: vg, tail: tg, ..
        },
    ) = (nf, ng)
    else {
        return Err(Error::DivergingInput);
    };
    let len = f.scaled.len().min(g.scaled.len());
    let sum: C64 = f.scaled[..len]
        .iter()
        .zip(&g.scaled[..len])
        .map(|(a, b)| a.conj() * b)
        .sum();
    // Norm mass of each series past the common length, including its estimated tail.
    let rest = |s: &TaylorSeries, tail: f64| tail + s.scaled[len..].iter().map(|b| b.norm_sqr()).sum::<f64>();
    let bound = (rest(f, tf) * rest(g, tg)).sqrt();
    let scale = (vf * vg).sqrt();
    if bound > INNER_TAIL_REL * scale {
        return Err(Error::TailTooLarge { bound: bound / scale });
    }
    Ok(sum)
}
