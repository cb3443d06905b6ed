//! Physical parameters, the energy ↔ spectral-parameter map, and the
//! coupling-class split between the solvable `U = ±2ω` cases and the rest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for recognising `U = ±2ω`.
pub const CLASS_TOL: f64 = 1e-12;

/// Hamiltonian parameters `(ω, ω₀, g, U)` in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub omega0: f64,
    pub g: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CouplingClass {
    /// `U = +2ω`
    UPlus,
    /// `U = -2ω`
    UMinus,
    Generic,
}

impl ModelParams {
    /// Validates `ω > 0`, `g ≠ 0` and finiteness.
    pub fn new(omega: f64, omega0: f64, g: f64, u: f64) -> Result<Self> {
        if ![omega, omega0, g, u].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if omega <= 0.0 {
            return Err(Error::InvalidParams(format!("omega must be positive, got {omega}")));
        }
        if g == 0.0 {
            return Err(Error::InvalidParams("coupling g must be nonzero".into()));
        }
        Ok(Self { omega, omega0, g, u })
    }

    /// Parameters on the `U = +2ω` line.
    pub fn u_plus(omega: f64, omega0: f64, g: f64) -> Result<Self> {
        Self::new(omega, omega0, g, 2.0 * omega)
    }

    pub fn coupling_class(&self) -> CouplingClass {
        coupling_class(self)
    }

    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.omega, self.omega0, g, self.u)
    }

    /// Errors unless the parameters are on the `U = +2ω` line.
    pub(crate) fn require_u_plus(&self) -> Result<()> {
        match self.coupling_class() {
            CouplingClass::UPlus => Ok(()),
            CouplingClass::UMinus => Err(Error::NeedsReduction),
            CouplingClass::Generic => Err(Error::OutOfScope { u: self.u }),
        }
    }
}

pub fn coupling_class(params: &ModelParams) -> CouplingClass {
    let two_omega = 2.0 * params.omega;
    let tol = CLASS_TOL * two_omega;
    if (params.u - two_omega).abs() <= tol {
        CouplingClass::UPlus
    } else if (params.u + two_omega).abs() <= tol {
        CouplingClass::UMinus
    } else {
        CouplingClass::Generic
    }
}

/// Dimensionless spectral parameter `x = 1 + ω(E + ω₀/2)/g²`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectralParam(pub f64);

impl SpectralParam {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn e_to_x(params: &ModelParams, energy: f64) -> Result<SpectralParam> {
    params.require_u_plus()?;
    Ok(SpectralParam(
        1.0 + params.omega * (energy + 0.5 * params.omega0) / (params.g * params.g),
    ))
}

pub fn x_to_e(params: &ModelParams, x: SpectralParam) -> Result<f64> {
    params.require_u_plus()?;
    Ok(params.g * params.g * (x.0 - 1.0) / params.omega - 0.5 * params.omega0)
}

/// Maps `U = -2ω` onto `U = +2ω` by `ω₀ → -ω₀`. The returned flag records that
/// the two spinor components must be interchanged in every eigenfunction
/// built from the reduced parameters.
pub fn reduce_uminus(params: &ModelParams) -> Result<(ModelParams, bool)> {
    if params.coupling_class() != CouplingClass::UMinus {
        return Err(Error::NotUMinus);
    }
    let reduced = ModelParams {
        omega0: -params.omega0,
        u: 2.0 * params.omega,
        ..*params
    };
    Ok((reduced, true))
}

/// Parameters brought to the `U = +2ω` form, with the component-swap flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canonical {
    pub params: ModelParams,
    pub swap: bool,
}

/// Accepts either solvable class; rejects generic couplings.
pub fn canonicalize(params: &ModelParams) -> Result<Canonical> {
    match params.coupling_class() {
        CouplingClass::UPlus => Ok(Canonical {
            params: *params,
            swap: false,
        }),
        CouplingClass::UMinus => {
            let (params, swap) = reduce_uminus(params)?;
            Ok(Canonical { params, swap })
        }
        CouplingClass::Generic => Err(Error::OutOfScope { u: params.u }),
    }
}
