//! End-to-end self-check of one parameter set: algebraic identities,
//! equation residuals, norms, growth, the Whittaker equivalence and the
//! brute-force oracle, collected into a serializable report.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bargmann::{bargmann_norm_sq, bargmann_norm_sq_adaptive, sqrt_growth, NormResult, TaylorSeries, K_MAX};
use crate::eigenfunction::{
    bargmann_system_residual, beta_coeffs, build_canonical_eigenfunction, degenerate_solution, max_residuals,
    residual_grid, Analytic, EigenFunction, Physical,
};
use crate::error::{Error, Result};
use crate::growth::{eigenfunction_growth, geometric_radii, growth_order_type, GrowthEstimate};
use crate::model::{canonicalize, Canonical, ModelParams};
use crate::oracle::{
    build_hamiltonian, eigenvalues_sym, match_converged, reliability_ceiling, stabilized_levels, MatchReport,
};
use crate::spectrum::{m_value, rho_value, solve_level_with_tol, Branch, SpectralPoint, MATCH_TOL};
use crate::stokes::{characteristic_exponents, equivalence_sweep, saddle_points, whittaker_params};

pub const IDENTITY_TOL: f64 = 1e-12;
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const NORM_DOUBLING_TOL: f64 = 1e-10;
pub const GROWTH_ORDER_RANGE: (f64, f64) = (1.9, 2.1);
pub const GROWTH_TYPE_REL: f64 = 0.05;
pub const ORACLE_STABILITY_TOL: f64 = 1e-8;
/// Relative drift allowed between the early and late `√K` slopes of a borderline norm.
pub const SQRT_SLOPE_DRIFT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    Identities,
    Residuals,
    Norms,
    Growth,
    Whittaker,
    Oracle,
    Continuum,
}

impl Section {
    pub const ALL: [Section; 7] = [
        Section::Identities,
        Section::Residuals,
        Section::Norms,
        Section::Growth,
        Section::Whittaker,
        Section::Oracle,
        Section::Continuum,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Section::Identities => "identities",
            Section::Residuals => "residuals",
            Section::Norms => "norms",
            Section::Growth => "growth",
            Section::Whittaker => "whittaker",
            Section::Oracle => "oracle",
            Section::Continuum => "continuum",
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Section {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Section::ALL
            .into_iter()
            .find(|sec| sec.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown verify section `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// Reported but never fails the run.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Highest level index checked on each branch.
    pub n_max: u32,
    /// Boson cutoff of the finer oracle truncation.
    pub cutoff: usize,
    pub k_max: usize,
    /// Bisection width on `x`; `0` bisects to adjacent floats.
    pub tau_root: f64,
    /// Uniform x-points per branch in the Whittaker sweep.
    pub grid_points: usize,
    pub identity_samples: usize,
    pub seed: u64,
    pub skip: Vec<Section>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_max: 10,
            cutoff: 400,
            k_max: K_MAX,
            tau_root: 0.0,
            grid_points: 1000,
            identity_samples: 10_000,
            seed: 0x5eed,
            skip: Vec::new(),
        }
    }
}

impl VerifyConfig {
    /// Coarser oracle cutoff compared against [`Self::cutoff`].
    pub fn coarse_cutoff(&self) -> usize {
        self.cutoff * 3 / 4
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau_root >= 0.0) {
            return Err(Error::InvalidInput("tau_root must be non-negative".into()));
        }
        if self.cutoff < 80 {
            return Err(Error::InvalidInput(format!(
                "oracle cutoff must be at least 80, got {}",
                self.cutoff
            )));
        }
        if self.k_max < 64 {
            return Err(Error::InvalidInput(format!(
                "kmax must be at least 64, got {}",
                self.k_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionReport {
    pub section: Section,
    pub status: Status,
    pub summary: String,
    pub details: Value,
}

impl SectionReport {
    fn new(section: Section, pass: bool, summary: String, details: Value) -> Self {
        Self {
            section,
            status: if pass { Status::Pass } else { Status::Fail },
            summary,
            details,
        }
    }

    fn skipped(section: Section) -> Self {
        Self {
            section,
            status: Status::Skipped,
            summary: "skipped".into(),
            details: Value::Null,
        }
    }

    fn failed(section: Section, err: &Error) -> Self {
        Self {
            section,
            status: Status::Fail,
            summary: err.to_string(),
            details: Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub params: ModelParams,
    /// The parameters were reduced from `U = -2ω`.
    pub reduced: bool,
    pub config: VerifyConfig,
    pub sections: Vec<SectionReport>,
    pub passed: bool,
    pub first_failure: Option<Section>,
}

/// Largest relative error of each identity over random admissible `x`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityErrors {
    pub m_vs_rho: f64,
    pub beta_product: f64,
    pub beta_sum: f64,
    pub alpha_product: f64,
    pub alpha_sum: f64,
    pub kappa_vs_rho: f64,
    pub exponent_sums: f64,
}

impl IdentityErrors {
    pub fn max(&self) -> f64 {
        [
            self.m_vs_rho,
            self.beta_product,
            self.beta_sum,
            self.alpha_product,
            self.alpha_sum,
            self.kappa_vs_rho,
            self.exponent_sums,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Samples `x = ±(1 + 10^u)`, `u` uniform on `[-3, 3]`, alternating branches.
pub fn identity_errors(params: &ModelParams, samples: usize, rng: &mut impl Rng) -> Result<IdentityErrors> {
    let mut e = IdentityErrors::default();
    for i in 0..samples {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let x = sign * (1.0 + 10f64.powf(rng.gen_range(-3.0..3.0)));
        let m = m_value(params, x)?;
        let rho = rho_value(params, x)?;
        let (bp, bm) = beta_coeffs(x)?;
        let s = saddle_points(x);
        let kappa = whittaker_params(params, x)?.kappa;
        let sums = characteristic_exponents(rho).pair_sums();
        e.m_vs_rho = e.m_vs_rho.max(rel(m, -4.0 * rho));
        e.beta_product = e.beta_product.max(rel(4.0 * bp * bm, 1.0));
        e.beta_sum = e.beta_sum.max(rel(bp + bm, x));
        e.alpha_product = e.alpha_product.max(rel((4.0 * s.alpha1 * s.alpha2).re, 1.0));
        e.alpha_sum = e.alpha_sum.max(rel((s.alpha1 + s.alpha2).re, -x));
        e.kappa_vs_rho = e.kappa_vs_rho.max(rel(kappa, rho));
        e.exponent_sums = e.exponent_sums.max(rel(sums[0], -1.5)).max(rel(sums[1], -0.5));
    }
    Ok(e)
}

/// Every level with `n ≤ n_max` on both branches, solved to `tau_root`.
pub fn spectral_points(params: &ModelParams, n_max: u32, tau_root: f64) -> Result<Vec<SpectralPoint>> {
    let mut out = Vec::new();
    for branch in Branch::BOTH {
        for n in 0..=n_max {
            out.extend(solve_level_with_tol(params, n, branch, tau_root)?);
        }
    }
    Ok(out)
}

pub fn eigenfunctions(canon: &Canonical, points: &[SpectralPoint]) -> Result<Vec<EigenFunction>> {
    points.iter().map(|p| build_canonical_eigenfunction(canon, p)).collect()
}

/// Residuals of one eigenfunction: the first-order system and the second-order
/// equation in the reduced frame, plus the general-`U` system in the caller's frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualCheck {
    pub n: u32,
    pub branch: Branch,
    pub system: f64,
    pub second_order: f64,
    pub original_frame: f64,
}

impl ResidualCheck {
    pub fn max(&self) -> f64 {
        self.system.max(self.second_order).max(self.original_frame)
    }
}

pub fn residual_check(original: &ModelParams, ef: &EigenFunction) -> Result<ResidualCheck> {
    let grid = residual_grid();
    let (system, second_order) = max_residuals(ef, &grid)?;
    let original_frame = grid
        .iter()
        .map(|&z| {
            let [a, b] = bargmann_system_residual(original, ef.energy(), &Physical(ef), z);
            a.norm().max(b.norm())
        })
        .fold(0.0, f64::max);
    Ok(ResidualCheck {
        n: ef.point.n,
        branch: ef.point.branch,
        system,
        second_order,
        original_frame,
    })
}

/// Norm of `(ψ₁, ψ₂)` and its change when the deciding truncation is doubled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinorNorm {
    pub psi1: NormResult,
    pub psi2: NormResult,
    /// `‖ψ₁‖² + ‖ψ₂‖²` when both are Finite.
    pub total: Option<f64>,
    /// Relative change of `total` when every component's truncation is doubled.
    pub doubling_change: Option<f64>,
}

fn doubled(result: &NormResult, series_at: impl Fn(usize) -> TaylorSeries) -> Result<Option<f64>> {
    match result {
        NormResult::Finite { k, .. } => Ok(bargmann_norm_sq(&series_at(2 * k))?.value()),
        NormResult::Diverging(_) => Ok(None),
    }
}

pub fn spinor_norm(ef: &EigenFunction, k_max: usize) -> Result<SpinorNorm> {
    let psi1_at = |k: usize| ef.taylor_pair(k).0;
    let psi2_at = |k: usize| ef.taylor_pair(k).1;
    let psi1 = bargmann_norm_sq_adaptive(psi1_at, k_max)?;
    let psi2 = bargmann_norm_sq_adaptive(psi2_at, k_max)?;
    let total = psi1.value().zip(psi2.value()).map(|(a, b)| a + b);
    let doubling_change = match total {
        Some(t) => {
            let a = doubled(&psi1, psi1_at)?;
            let b = doubled(&psi2, psi2_at)?;
            a.zip(b).map(|(a, b)| ((a + b) - t).abs() / t)
        }
        None => None,
    };
    Ok(SpinorNorm {
        psi1,
        psi2,
        total,
        doubling_change,
    })
}

/// Norms of the `x = 1` pair: both components must diverge, `ψ₁` with
/// partial sums growing like `√K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegenerateNorm {
    pub psi1: NormResult,
    pub psi2: NormResult,
    pub sqrt_slope: f64,
    pub sqrt_slope_early: f64,
    pub sqrt_signature: bool,
}

impl DegenerateNorm {
    pub fn ok(&self) -> bool {
        !self.psi1.is_finite() && !self.psi2.is_finite() && self.sqrt_signature
    }
}

pub fn degenerate_norm(params: &ModelParams, k_max: usize) -> Result<DegenerateNorm> {
    let d = degenerate_solution(params);
    let psi1 = bargmann_norm_sq_adaptive(|k| d.taylor_pair(k).0, k_max)?;
    let psi2 = bargmann_norm_sq_adaptive(|k| d.taylor_pair(k).1, k_max)?;
    let g = sqrt_growth(&d.taylor_pair(k_max).0);
    Ok(DegenerateNorm {
        psi1,
        psi2,
        sqrt_slope: g.slope,
        sqrt_slope_early: g.early_slope,
        sqrt_signature: g.is_stable(SQRT_SLOPE_DRIFT),
    })
}

/// `‖z^k‖² = k!` for `k ≤ 20`; returns the largest relative error.
pub fn monomial_norm_error() -> Result<f64> {
    let mut worst = 0.0f64;
    let mut fact = 1.0f64;
    for k in 0..=20 {
        if k > 0 {
            fact *= k as f64;
        }
        let v = bargmann_norm_sq(&TaylorSeries::monomial(k))?
            .value()
            .ok_or(Error::DivergingInput)?;
        worst = worst.max(rel(v, fact));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub n: u32,
    pub branch: Branch,
    pub estimate: GrowthEstimate,
    /// `|Re β|` of the constructed `ψ₁`.
    pub expected_type: f64,
}

impl GrowthCheck {
    pub fn ok(&self) -> bool {
        let e = &self.estimate;
        e.order >= GROWTH_ORDER_RANGE.0
            && e.order <= GROWTH_ORDER_RANGE.1
            && (e.growth_type - self.expected_type).abs() <= GROWTH_TYPE_REL * self.expected_type
    }
}

pub fn growth_check(ef: &EigenFunction) -> Result<GrowthCheck> {
    Ok(GrowthCheck {
        n: ef.point.n,
        branch: ef.point.branch,
        estimate: eigenfunction_growth(ef)?,
        expected_type: ef.beta().re.abs(),
    })
}

/// Eigenvalues of the two oracle truncations, computed once per run.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpectra {
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    /// Reliability ceiling of the finer truncation.
    pub ceiling: f64,
}

impl OracleSpectra {
    pub fn compute(params: &ModelParams, coarse_cutoff: usize, fine_cutoff: usize) -> Result<Self> {
        Ok(Self {
            coarse: eigenvalues_sym(build_hamiltonian(params, coarse_cutoff).matrix())?,
            fine: eigenvalues_sym(build_hamiltonian(params, fine_cutoff).matrix())?,
            ceiling: reliability_ceiling(params, fine_cutoff),
        })
    }
}

/// Matches analytic levels below the reliability ceiling against the
/// stabilized oracle eigenvalues. Upper-branch levels must all match; a
/// Lower-branch level must match whenever its nearest numeric level is
/// stabilized. An empty match never passes.
pub fn oracle_match(points: &[SpectralPoint], spectra: &OracleSpectra) -> (MatchReport, bool) {
    let ceiling = spectra.ceiling;
    let numeric = stabilized_levels(
        &spectra.coarse,
        &spectra.fine,
        (f64::NEG_INFINITY, ceiling),
        ORACLE_STABILITY_TOL,
    );
    let analytic: Vec<SpectralPoint> = points.iter().copied().filter(|p| p.energy <= ceiling).collect();
    let report = match_converged(&analytic, &numeric, MATCH_TOL);
    let ok = report.levels.iter().any(|l| l.is_matched())
        && report
            .levels
            .iter()
            .all(|l| l.is_matched() || (l.branch == Branch::Lower && !l.stabilized));
    (report, ok)
}

/// Stabilization counts inside the continuum window `(-ω₀/2 - 2g²/ω, -ω₀/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumSummary {
    pub window: (f64, f64),
    pub eigenvalues: usize,
    pub stabilized: usize,
}

impl ContinuumSummary {
    pub fn unstabilized_fraction(&self) -> f64 {
        if self.eigenvalues == 0 {
            0.0
        } else {
            1.0 - self.stabilized as f64 / self.eigenvalues as f64
        }
    }
}

pub fn continuum_window(params: &ModelParams) -> (f64, f64) {
    let edge = -0.5 * params.omega0;
    (edge - 2.0 * params.g * params.g / params.omega, edge)
}

pub fn continuum_summary(params: &ModelParams, spectra: &OracleSpectra) -> ContinuumSummary {
    let window = continuum_window(params);
    let open = (window.0.next_up(), window.1.next_down());
    let levels = stabilized_levels(&spectra.coarse, &spectra.fine, open, ORACLE_STABILITY_TOL);
    ContinuumSummary {
        window,
        eigenvalues: levels.len(),
        stabilized: levels.iter().filter(|l| l.stabilized).count(),
    }
}

struct Run<'a> {
    original: &'a ModelParams,
    canon: Canonical,
    config: &'a VerifyConfig,
    spectra: Option<OracleSpectra>,
}

impl Run<'_> {
    fn spectra(&mut self) -> Result<&OracleSpectra> {
        if self.spectra.is_none() {
            // The oracle works with the caller's Hamiltonian, not the reduced one.
            self.spectra = Some(OracleSpectra::compute(
                self.original,
                self.config.coarse_cutoff(),
                self.config.cutoff,
            )?);
        }
        Ok(self.spectra.as_ref().unwrap())
    }

    fn points(&self) -> Result<Vec<SpectralPoint>> {
        spectral_points(&self.canon.params, self.config.n_max, self.config.tau_root)
    }

    fn section(&mut self, section: Section) -> Result<SectionReport> {
        let cfg = self.config;
        let p = self.canon.params;
        Ok(match section {
            Section::Identities => {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                let e = identity_errors(&p, cfg.identity_samples, &mut rng)?;
                SectionReport::new(
                    section,
                    e.max() <= IDENTITY_TOL,
                    format!("max relative error {:e} over {} samples", e.max(), cfg.identity_samples),
                    serde_json::to_value(e).unwrap(),
                )
            }
            Section::Residuals => {
                let efs = eigenfunctions(&self.canon, &self.points()?)?;
                let checks = efs
                    .iter()
                    .map(|ef| residual_check(self.original, ef))
                    .collect::<Result<Vec<_>>>()?;
                let worst = checks.iter().map(ResidualCheck::max).fold(0.0, f64::max);
                SectionReport::new(
                    section,
                    worst <= RESIDUAL_TOL,
                    format!("max normalized residual {worst:e} over {} eigenfunctions", checks.len()),
                    json!({ "levels": checks }),
                )
            }
            Section::Norms => {
                let efs = eigenfunctions(&self.canon, &self.points()?)?;
                let mut norms = Vec::new();
                let mut ok = true;
                for ef in &efs {
                    let entry = match spinor_norm(ef, cfg.k_max) {
                        Ok(s) => {
                            ok &= s.doubling_change.is_some_and(|c| c < NORM_DOUBLING_TOL);
                            json!({ "n": ef.point.n, "branch": ef.point.branch, "norm": s })
                        }
                        Err(e) => {
                            ok = false;
                            json!({ "n": ef.point.n, "branch": ef.point.branch, "error": e.to_string() })
                        }
                    };
                    norms.push(entry);
                }
                let degenerate = degenerate_norm(&p, cfg.k_max)?;
                let monomial = monomial_norm_error()?;
                ok &= degenerate.ok() && monomial <= 1e-15;
                SectionReport::new(
                    section,
                    ok,
                    format!(
                        "{} eigenfunction norms; x = 1 pair diverging: {}; monomial error {monomial:e}",
                        efs.len(),
                        degenerate.ok()
                    ),
                    json!({ "eigenfunctions": norms, "degenerate": degenerate, "monomial_error": monomial }),
                )
            }
            Section::Growth => {
                let efs = eigenfunctions(&self.canon, &self.points()?)?;
                let checks = efs.iter().map(growth_check).collect::<Result<Vec<_>>>()?;
                let d = degenerate_solution(&p);
                let degenerate = growth_order_type(|z| d.psi1().value(z), &geometric_radii(30.0, 12))?;
                let ok =
                    checks.iter().all(GrowthCheck::ok) && (degenerate.growth_type - 0.5).abs() <= GROWTH_TYPE_REL * 0.5;
                SectionReport::new(
                    section,
                    ok,
                    format!("{} eigenfunctions checked for order 2 and type |Re beta|", checks.len()),
                    json!({ "levels": checks, "degenerate": degenerate }),
                )
            }
            Section::Whittaker => {
                let sweeps = Branch::BOTH
                    .into_iter()
                    .map(|b| equivalence_sweep(&p, b, cfg.grid_points, cfg.n_max))
                    .collect::<Result<Vec<_>>>()?;
                let bad: usize = sweeps.iter().map(|s| s.disagreements.len()).sum();
                let points: usize = sweeps.iter().map(|s| s.points).sum();
                SectionReport::new(
                    section,
                    bad == 0,
                    format!("{bad} disagreements over {points} points"),
                    serde_json::to_value(&sweeps).unwrap(),
                )
            }
            Section::Oracle => {
                let points = self.points()?;
                let (report, ok) = oracle_match(&points, self.spectra()?);
                let matched = report.levels.iter().filter(|l| l.is_matched()).count();
                SectionReport::new(
                    section,
                    ok,
                    format!(
                        "{matched}/{} levels matched, max |dE| {:e}",
                        report.levels.len(),
                        report.max_delta()
                    ),
                    serde_json::to_value(&report).unwrap(),
                )
            }
            Section::Continuum => {
                let summary = continuum_summary(&p, self.spectra()?);
                SectionReport {
                    section,
                    status: Status::Info,
                    summary: format!(
                        "{} of {} truncated eigenvalues in the continuum window stabilized to {ORACLE_STABILITY_TOL:e}",
                        summary.stabilized, summary.eigenvalues
                    ),
                    details: serde_json::to_value(summary).unwrap(),
                }
            }
        })
    }
}

/// Runs every section not listed in `config.skip`. Generic couplings are rejected.
pub fn run_verify(params: &ModelParams, config: &VerifyConfig) -> Result<VerifyReport> {
    config.validate()?;
    let canon = canonicalize(params)?;
    let mut run = Run {
        original: params,
        canon,
        config,
        spectra: None,
    };
    let sections: Vec<SectionReport> = Section::ALL
        .into_iter()
        .map(|s| {
            if config.skip.contains(&s) {
                SectionReport::skipped(s)
            } else {
                run.section(s).unwrap_or_else(|e| SectionReport::failed(s, &e))
            }
        })
        .collect();
    let first_failure = sections.iter().find(|s| s.status == Status::Fail).map(|s| s.section);
    Ok(VerifyReport {
        params: *params,
        reduced: canon.swap,
        config: config.clone(),
        sections,
        passed: first_failure.is_none(),
        first_failure,
    })
}
