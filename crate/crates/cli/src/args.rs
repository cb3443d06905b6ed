use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rabi_core::verify::Section;
use rabi_core::{Branch, ModelParams};

#[derive(Debug, Parser)]
#[command(
    name = "rabi",
    version,
    about = "Exact spectrum and eigenfunctions of the Rabi model at U = ±2ω"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the discrete spectrum over a coupling grid.
    Spectrum(SpectrumArgs),
    /// Classify an arbitrary energy.
    Classify(ClassifyArgs),
    /// Sample the closed-form eigenfunction on a complex grid.
    Eigenfunction(EigenfunctionArgs),
    /// Bargmann-space norm of an eigenfunction.
    Norm(NormArgs),
    /// Compare the analytic levels with a truncated Fock-space diagonalization.
    Oracle(OracleArgs),
    /// Run the self-check suite and emit a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub omega0: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub g: f64,
    /// Two-photon coupling; defaults to 2ω.
    #[arg(long, allow_negative_numbers = true)]
    pub u: Option<f64>,
}

impl ParamArgs {
    pub fn params(&self) -> rabi_core::Result<ModelParams> {
        ModelParams::new(self.omega, self.omega0, self.g, self.u.unwrap_or(2.0 * self.omega))
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Upper,
    Lower,
    Both,
}

impl BranchArg {
    pub fn branches(self) -> Vec<Branch> {
        match self {
            BranchArg::Upper => vec![Branch::Upper],
            BranchArg::Lower => vec![Branch::Lower],
            BranchArg::Both => Branch::BOTH.to_vec(),
        }
    }
}

/// Grid `start:stop:step` ending at the grid point nearest `stop`, so `stop`
/// is included up to half a step of rounding. A bare number is a one-point grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        if self.start == self.stop {
            return vec![self.start];
        }
        let count = ((self.stop - self.start) / self.step + 0.5).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts = s
            .split(':')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad number `{p}` in range `{s}`: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let r = match parts[..] {
            [v] => Range {
                start: v,
                stop: v,
                step: 1.0,
            },
            [start, stop, step] => Range { start, stop, step },
            _ => return Err(format!("range `{s}` must be `start:stop:step` or a single number")),
        };
        if !(r.start.is_finite() && r.stop.is_finite() && r.step.is_finite()) {
            return Err(format!("range `{s}` must be finite"));
        }
        if r.step <= 0.0 || r.stop < r.start {
            return Err(format!("range `{s}` needs step > 0 and stop >= start"));
        }
        Ok(r)
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Coupling grid; defaults to the single value of `--g`.
    #[arg(long, allow_hyphen_values = true)]
    pub g_range: Option<Range>,
    #[arg(long, default_value_t = 5)]
    pub nmax: u32,
    #[arg(long, value_enum, default_value = "both")]
    pub branch: BranchArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub energy: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value = "upper")]
    pub branch: SingleBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SingleBranch {
    Upper,
    Lower,
}

impl From<SingleBranch> for Branch {
    fn from(b: SingleBranch) -> Self {
        match b {
            SingleBranch::Upper => Branch::Upper,
            SingleBranch::Lower => Branch::Lower,
        }
    }
}

#[derive(Debug, Args)]
pub struct EigenfunctionArgs {
    #[command(flatten)]
    pub level: LevelArgs,
    /// Real parts of the sample grid.
    #[arg(long, default_value = "-2:2:0.5", allow_hyphen_values = true)]
    pub z_re: Range,
    /// Imaginary parts of the sample grid.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub z_im: Range,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub level: LevelArgs,
    #[arg(long, default_value_t = rabi_core::bargmann::K_MAX)]
    pub kmax: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 5)]
    pub nmax: u32,
    /// Boson cutoff of the finer truncation; the coarser one uses 3/4 of it.
    #[arg(long, default_value_t = 400)]
    pub cutoff: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 10)]
    pub nmax: u32,
    #[arg(long, default_value_t = 400)]
    pub cutoff: usize,
    #[arg(long, default_value_t = rabi_core::bargmann::K_MAX)]
    pub kmax: usize,
    /// Root bisection width on x; 0 bisects to adjacent floats.
    #[arg(long, default_value_t = 0.0)]
    pub tau_root: f64,
    /// Sections to skip, comma separated or repeated.
    #[arg(long, value_delimiter = ',', value_parser = parse_section)]
    pub skip: Vec<Section>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_section(s: &str) -> Result<Section, String> {
    s.parse().map_err(|e: rabi_core::Error| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_is_inclusive_within_half_step() {
        let r: Range = "0.1:2:0.05".parse().unwrap();
        let p = r.points();
        assert_eq!(p.len(), 39);
        assert!((p[38] - 2.0).abs() < 1e-12);
        let r: Range = "0:1:0.3".parse().unwrap();
        assert_eq!(r.points().len(), 4);
        let r: Range = "0:1:0.45".parse().unwrap();
        assert_eq!(r.points().len(), 3);
        assert_eq!("-1.5".parse::<Range>().unwrap().points(), vec![-1.5]);
    }

    #[test]
    fn bad_ranges_rejected() {
        for s in ["1:0:0.1", "0:1:0", "0:1", "a:b:c", "0:inf:1"] {
            assert!(s.parse::<Range>().is_err(), "{s}");
        }
    }
}
