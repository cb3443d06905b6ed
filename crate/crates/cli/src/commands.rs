use std::fmt;
use std::io::Write;

use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};

use rabi_core::format::sci;
use rabi_core::model::e_to_x;
use rabi_core::oracle::matching::MIN_CUTOFF_GAP;
use rabi_core::spectrum::{classify_energy, m_value, solve_level, spectrum_sweep};
use rabi_core::stokes::{multiplier_vanishes, whittaker_params};
use rabi_core::verify::{
    oracle_match, residual_check, run_verify, spectral_points, spinor_norm, OracleSpectra, Section, VerifyConfig,
};
use rabi_core::{build_canonical_eigenfunction, canonicalize, Branch, Canonical, EigenFunction, Error, SpectralPoint};

use crate::args::{
    ClassifyArgs, Command, EigenfunctionArgs, Format, LevelArgs, NormArgs, OracleArgs, OutputArgs, SpectrumArgs,
    VerifyArgs,
};

/// Failure of a command, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or an I/O failure: exit 1.
    Usage(String),
    Core(Error),
    /// The requested level has no root: exit 3.
    Empty(String),
    /// A check failed: exit 4.
    Failed(Section),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(Error::OutOfScope { .. }) => 2,
            CliError::Core(_) => 1,
            CliError::Empty(_) => 3,
            CliError::Failed(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Empty(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Failed(section) => write!(f, "verification failed: first failing section `{section}`"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T = ()> = Result<T, CliError>;

pub fn run(command: Command) -> CliResult {
    match command {
        Command::Spectrum(a) => spectrum(a),
        Command::Classify(a) => classify(a),
        Command::Eigenfunction(a) => eigenfunction(a),
        Command::Norm(a) => norm(a),
        Command::Oracle(a) => oracle(a),
        Command::Verify(a) => verify(a),
    }
}

fn emit(output: &OutputArgs, content: &str) -> CliResult {
    match &output.out {
        Some(path) => {
            std::fs::write(path, content).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .lock()
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}"))),
    }
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Commands whose output is a nested report only speak JSON.
fn require_json(output: &OutputArgs, command: &str) -> CliResult {
    match output.format {
        Some(Format::Csv) => Err(CliError::Usage(format!("`{command}` writes JSON only"))),
        _ => Ok(()),
    }
}

fn spectrum(a: SpectrumArgs) -> CliResult {
    let params = a.params.params()?;
    let canon = canonicalize(&params)?;
    let grid = a.g_range.map_or_else(|| vec![params.g], |r| r.points());
    let branches = a.branch.branches();
    let table = spectrum_sweep(&canon.params, &grid, a.nmax, &branches)?;
    let summary: Vec<String> = branches
        .iter()
        .map(|&b| format!("{b}: {} roots", table.root_count(b)))
        .collect();
    eprintln!("{} over {} coupling values", summary.join(", "), grid.len());
    for e in table.multiplicities() {
        eprintln!(
            "note: {} roots for n = {} on the {} branch at g = {}",
            e.points.len(),
            e.n,
            e.branch,
            e.g
        );
    }
    let body = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(&table),
    };
    emit(&a.output, &body)
}

/// Closest analytic level on the branch containing `x`.
fn nearest_level(canon: &Canonical, energy: f64, x: f64) -> rabi_core::Result<Option<SpectralPoint>> {
    if x * x <= 1.0 {
        return Ok(None);
    }
    let branch = if x > 0.0 { Branch::Upper } else { Branch::Lower };
    let v = branch.sign() * m_value(&canon.params, x)?;
    let guess = ((v - 1.0) / 2.0).round().max(0.0) as u32;
    let mut best: Option<SpectralPoint> = None;
    for n in guess.saturating_sub(1)..=guess + 1 {
        for p in solve_level(&canon.params, n, branch)? {
            if best.is_none_or(|b| (p.energy - energy).abs() < (b.energy - energy).abs()) {
                best = Some(p);
            }
        }
    }
    Ok(best)
}

fn classify(a: ClassifyArgs) -> CliResult {
    require_json(&a.output, "classify")?;
    let params = a.params.params()?;
    let canon = canonicalize(&params)?;
    let class = classify_energy(&canon.params, a.energy)?;
    let x = e_to_x(&canon.params, a.energy)?.value();
    let whittaker = if x * x > 1.0 {
        let wp = whittaker_params(&canon.params, x)?;
        let v = multiplier_vanishes(wp);
        json!({
            "kappa": wp.kappa,
            "mu": wp.mu,
            "alpha_vanishes": v.alpha_vanishes,
            "beta_vanishes": v.beta_vanishes,
        })
    } else {
        Value::Null
    };
    let report = json!({
        "x": x,
        "class": class.name(),
        "nearest_level": nearest_level(&canon, a.energy, x)?,
        "whittaker": whittaker,
    });
    emit(&a.output, &to_json(&report))
}

/// Eigenfunctions for every root of `(n, branch)`; empty requests exit with 3.
fn level_eigenfunctions(level: &LevelArgs) -> CliResult<(rabi_core::ModelParams, Vec<EigenFunction>)> {
    let params = level.params.params()?;
    let canon = canonicalize(&params)?;
    let branch = Branch::from(level.branch);
    let points = solve_level(&canon.params, level.n, branch)?;
    if points.is_empty() {
        return Err(CliError::Empty(format!(
            "no {branch}-branch level n = {} at omega = {}, omega0 = {}, g = {}",
            level.n, params.omega, params.omega0, params.g
        )));
    }
    let efs = points
        .iter()
        .map(|p| build_canonical_eigenfunction(&canon, p))
        .collect::<rabi_core::Result<Vec<_>>>()?;
    Ok((params, efs))
}

fn eigenfunction(a: EigenfunctionArgs) -> CliResult {
    let (params, efs) = level_eigenfunctions(&a.level)?;
    if efs.len() > 1 {
        eprintln!(
            "note: {} roots for this level; sampling the one with smallest x",
            efs.len()
        );
    }
    let ef = &efs[0];
    let residual = residual_check(&params, ef)?.max();
    let grid: Vec<C64> = a
        .z_im
        .points()
        .into_iter()
        .flat_map(|im| a.z_re.points().into_iter().map(move |re| C64::new(re, im)))
        .collect();
    let samples: Vec<(C64, [C64; 2])> = grid.iter().map(|&z| (z, ef.physical(z))).collect();
    let body = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = format!(
                "# n={} branch={} x={} E={} max_residual={}\nre_z,im_z,re_psi1,im_psi1,re_psi2,im_psi2\n",
                ef.point.n,
                ef.point.branch,
                sci(ef.x()),
                sci(ef.energy()),
                sci(residual)
            );
            for (z, [p1, p2]) in &samples {
                // `+ 0.0` folds -0 into 0 so rows do not depend on the sign of zero.
                let row = [z.re, z.im, p1.re, p1.im, p2.re, p2.im].map(|v| sci(v + 0.0)).join(",");
                s.push_str(&row);
                s.push('\n');
            }
            s
        }
        Format::Json => to_json(&json!({
            "n": ef.point.n,
            "branch": ef.point.branch,
            "x": ef.x(),
            "E": ef.energy(),
            "max_residual": residual,
            "samples": samples
                .iter()
                .map(|(z, [p1, p2])| json!({
                    "re_z": z.re, "im_z": z.im,
                    "re_psi1": p1.re, "im_psi1": p1.im,
                    "re_psi2": p2.re, "im_psi2": p2.im,
                }))
                .collect::<Vec<_>>(),
        })),
    };
    emit(&a.output, &body)
}

fn norm(a: NormArgs) -> CliResult {
    require_json(&a.output, "norm")?;
    if a.kmax < 64 {
        return Err(CliError::Usage(format!("--kmax must be at least 64, got {}", a.kmax)));
    }
    let (_, efs) = level_eigenfunctions(&a.level)?;
    let levels: Vec<Value> = efs
        .iter()
        .map(|ef| {
            let mut entry = json!({
                "n": ef.point.n,
                "branch": ef.point.branch,
                "x": ef.x(),
                "E": ef.energy(),
                "abs_re_beta": ef.beta().re.abs(),
            });
            // An indecisive test is part of the answer, not a failure.
            match spinor_norm(ef, a.kmax) {
                Ok(s) => entry["norm"] = serde_json::to_value(s).unwrap(),
                Err(e) => entry["error"] = json!(e.to_string()),
            }
            entry
        })
        .collect();
    emit(&a.output, &to_json(&json!({ "levels": levels })))
}

fn oracle(a: OracleArgs) -> CliResult {
    require_json(&a.output, "oracle")?;
    let config = VerifyConfig {
        cutoff: a.cutoff,
        ..VerifyConfig::default()
    };
    if a.cutoff - config.coarse_cutoff() < MIN_CUTOFF_GAP {
        return Err(CliError::Usage(format!(
            "--cutoff must be at least {}",
            4 * MIN_CUTOFF_GAP
        )));
    }
    let params = a.params.params()?;
    let canon = canonicalize(&params)?;
    let points = spectral_points(&canon.params, a.nmax, 0.0)?;
    let spectra = OracleSpectra::compute(&params, config.coarse_cutoff(), a.cutoff)?;
    let (report, ok) = oracle_match(&points, &spectra);
    let matched = report.levels.iter().filter(|l| l.is_matched()).count();
    eprintln!(
        "{matched}/{} levels below E = {} matched, max |dE| {:e}",
        report.levels.len(),
        spectra.ceiling,
        report.max_delta()
    );
    emit(&a.output, &to_json(&report))?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Failed(Section::Oracle))
    }
}

fn verify(a: VerifyArgs) -> CliResult {
    require_json(&a.output, "verify")?;
    let params = a.params.params()?;
    let config = VerifyConfig {
        n_max: a.nmax,
        cutoff: a.cutoff,
        k_max: a.kmax,
        tau_root: a.tau_root,
        skip: a.skip,
        ..VerifyConfig::default()
    };
    let report = run_verify(&params, &config)?;
    for s in &report.sections {
        eprintln!("{:<10} {:?}: {}", s.section.as_str(), s.status, s.summary);
    }
    emit(&a.output, &to_json(&report))?;
    match report.first_failure {
        Some(section) => Err(CliError::Failed(section)),
        None => Ok(()),
    }
}
